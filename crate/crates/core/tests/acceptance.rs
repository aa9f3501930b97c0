//! Acceptance criteria. Runs as a plain binary so every criterion prints a
//! PASS or FAIL line; exits nonzero if any fails.

use mobius_semigroup::arc::Arc;
use mobius_semigroup::classify::{antiparallel, classify_pair, joergensen_semigroup, replay, verify_pair_verdict, PairStatus};
use mobius_semigroup::cocycle::{find_multicone, in_e_bounded, yoccoz_counterexample, CounterexampleConfig, SchottkyParams};
use mobius_semigroup::dynamics::{
    cf_generators, continued_fraction_check, hausdorff, oracle_refute, run_sequence, sample_limit_set, DigitStream, Outcome, Side,
    WitnessKind,
};
use mobius_semigroup::elementary::{exceptional_check, find_exceptional, semidiscrete_in_mj, MjClass};
use mobius_semigroup::mobius::commutator_trace;
use mobius_semigroup::{Limits, Moebius, Tolerances, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

type Check = std::result::Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn lim() -> Limits {
    Limits::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_joergensen_equality() -> Check {
    let f = Moebius::translation(1.0);
    let g = Moebius::new(0.0, -1.0, 1.0, 0.0).unwrap();
    let r = joergensen_semigroup(&f, &g, &tol());
    ensure((r.lhs - 1.0).abs() <= 1e-12, || format!("lhs = {}", r.lhs))?;
    Ok(format!("lhs = {:.17}", r.lhs))
}

fn c2_continued_fractions() -> Check {
    let (t, l) = (tol(), lim());
    let mut truthy = Vec::new();
    let mut compared = 0;
    for k in 0..200 {
        let p = -6.0 + 9.0 * k as f64 / 199.0;
        let lambda = [1.0, 2.0, 0.5][k % 3];
        let mu = p / lambda;
        let r = continued_fraction_check(lambda, mu, &t);
        let expected = !(p > -4.0 && p <= 0.0);
        ensure(r.verdict == expected, || format!("verdict wrong at lambda mu = {p}"))?;
        let [f, g] = cf_generators(lambda, mu);
        if let Ok(v) = classify_pair(&f, &g, &t, &l) {
            if v.status != PairStatus::Borderline {
                compared += 1;
                ensure((v.status == PairStatus::SemidiscreteInverseFree) == r.verdict, || {
                    format!("classify_pair says {:?} at lambda mu = {p}", v.status)
                })?;
            }
        }
        if r.verdict {
            truthy.push((lambda, mu));
        }
    }
    let picks: Vec<(f64, f64)> = (0..20).map(|i| truthy[i * truthy.len() / 20]).collect();
    let bad: Vec<String> = picks
        .par_iter()
        .flat_map_iter(|&(lambda, mu)| {
            let gens = cf_generators(lambda, mu);
            (0..50u64).filter_map(move |seed| {
                let r = run_sequence(&gens, &DigitStream::Seeded { seed }, 10_000, &tol(), &lim()).ok()?;
                (!matches!(r.outcome, Outcome::IdealConvergence { .. })).then(|| format!("lambda mu = {} seed {seed}: {:?}", lambda * mu, r.outcome))
            })
        })
        .collect();
    ensure(bad.is_empty(), || format!("{} runs did not converge, first {}", bad.len(), bad[0]))?;
    Ok(format!("200 verdicts exact, {compared} classifier agreements, 1000 runs converged"))
}

fn c3_parabolic_hyperbolic_closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = Moebius::translation(2.0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u: f64 = rng.gen_range(0.05..5.0);
        let v: f64 = u + rng.gen_range(0.05..5.0);
        let s = u + v;
        // reflection in Re z = 0 after reflection in the geodesic from u to v
        let g = Moebius::new(-s, 2.0 * u * v, 2.0, -s).unwrap();
        // relative once the values exceed 1; close u, v make them large
        let (t1, t2) = (2.0 * s / (v - u), 16.0 / ((v - u) * (v - u)));
        let e1 = (g.tr() - t1).abs() / t1.max(1.0);
        let e2 = (commutator_trace(&f, &g) - 2.0 - t2).abs() / t2.max(1.0);
        worst = worst.max(e1).max(e2);
        ensure(e1 <= 1e-9 && e2 <= 1e-9, || format!("u = {u}, v = {v}: errors {e1:e}, {e2:e}"))?;
    }
    Ok(format!("50 pairs, worst error {worst:.3e}"))
}

/// `f = lambda z` and `g` fixing `1` (attracting) and `a` (repelling) with
/// multiplier `mu`.
fn normal_form(lambda: f64, a: f64, mu: f64) -> (Moebius, Moebius) {
    let f = Moebius::dilation(lambda).unwrap();
    let g = Moebius::new(mu - a, a - a * mu, mu - 1.0, 1.0 - a * mu).unwrap();
    (f, g)
}

fn c4_trace_criterion() -> Check {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for _ in 0..100 {
        let lambda: f64 = rng.gen_range(0.02..0.98);
        let a: f64 = rng.gen_range(0.02..0.98);
        let mu: f64 = rng.gen_range(1.1..20.0);
        let (f, g) = normal_form(lambda, a, mu);
        ensure(antiparallel(&f, &g, &t).unwrap_or(false), || format!("not antiparallel at {lambda}, {a}, {mu}"))?;
        let geometric = (lambda * a).sqrt() > a;
        let c = commutator_trace(&f, &g);
        let bound = g.tr() * g.tr() - 2.0;
        if (c - bound).abs() <= 1e-9 * bound.abs().max(1.0) {
            continue;
        }
        ensure(geometric == (c < bound), || format!("disagree at lambda {lambda}, a {a}, mu {mu}"))?;
        checked += 1;
    }
    Ok(format!("{checked} non-borderline instances agree"))
}

fn c5_reduction_loop() -> Check {
    let (t, l) = (tol(), lim());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut entered, mut finished, mut borderline) = (0, 0, Vec::new());
    while entered < 100 {
        let a: f64 = rng.gen_range(0.02..0.9);
        let lambda: f64 = rng.gen_range(a..0.99);
        let mu: f64 = rng.gen_range(1.1..20.0);
        let (f, g) = normal_form(lambda, a, mu);
        let v = classify_pair(&f, &g, &t, &l).map_err(|e| e.to_string())?;
        if v.reduction_trace.is_empty() {
            continue;
        }
        entered += 1;
        for w in v.reduction_trace.windows(2) {
            let (g0, f1, g1) = (w[0][1], w[1][0], w[1][1]);
            ensure(g0 - g1 > f1 - 2.0 - 1e-9, || format!("gap {} below {} at {lambda}, {a}, {mu}", g0 - g1, f1 - 2.0))?;
        }
        if v.status == PairStatus::Borderline {
            borderline.push(format!("{lambda:.4}/{a:.4}/{mu:.4}: {:?}", v.flags.borderline_reason));
        } else {
            finished += 1;
        }
    }
    for b in &borderline {
        println!("    borderline exclusion {b}");
    }
    ensure(finished >= 95, || format!("only {finished} of 100 terminated"))?;
    Ok(format!("{finished} of 100 terminated, trace gaps hold"))
}

fn c6_oracle_agreement() -> Check {
    let (t, l) = (tol(), lim());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = Vec::new();
    while pairs.len() < 500 {
        let mut m = || loop {
            let e: [f64; 4] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            if e[0] * e[3] - e[1] * e[2] > 0.05 {
                return Moebius::new(e[0], e[1], e[2], e[3]).unwrap();
            }
        };
        let (f, g) = (m(), m());
        let Ok(v) = classify_pair(&f, &g, &t, &l) else { continue };
        if matches!(v.status, PairStatus::Borderline | PairStatus::Elementary) {
            continue;
        }
        pairs.push(v);
    }
    let problems: Vec<String> = pairs
        .par_iter()
        .filter_map(|v| {
            let [f, g] = v.generators;
            if v.status == PairStatus::SemidiscreteInverseFree {
                if let Ok(Some(w)) = oracle_refute(&[f, g], 12, &t, &l) {
                    return Some(format!("{f:?} {g:?} certified but oracle found {:?} {}", w.kind, w.word));
                }
            }
            if v.status == PairStatus::NotSemidiscrete {
                let Some(w) = v.witness() else { return Some("NotSemidiscrete without witness".into()) };
                let value = match &w.original_word {
                    Some(word) => word.eval(&[f, g]).ok()?,
                    None => {
                        let (a, b) = replay(&f, &g, &v.substitutions);
                        w.word.eval(&[a, b]).ok()?
                    }
                };
                let c = value.classify(&t);
                if !(c.is_elliptic() || c.is_identity()) {
                    return Some(format!("witness {} evaluates to {}", w.word, c.name()));
                }
            }
            if !verify_pair_verdict(v, &t).ok {
                return Some(format!("certificate of {:?} fails to verify", v.status));
            }
            None
        })
        .collect();
    ensure(problems.is_empty(), || format!("{} problems, first: {}", problems.len(), problems[0]))?;
    let sif = pairs.iter().filter(|v| v.status == PairStatus::SemidiscreteInverseFree).count();
    let ns = pairs.iter().filter(|v| v.status == PairStatus::NotSemidiscrete).count();
    Ok(format!("500 pairs ({sif} certified, {ns} with witnesses), no disagreement"))
}

fn c7_semidiscrete_not_discrete() -> Check {
    let (t, l) = (tol(), lim());
    let gens = [Moebius::dilation(2.0).unwrap(), Moebius::affine(0.5, 1.0).unwrap()];
    let target = Moebius::translation(2.0);
    for n in [5u64, 10, 15] {
        let w = Word::power(1, n).concat(&Word::power(0, n));
        let d = w.eval(&gens).unwrap().operator_distance(&target);
        ensure(d <= 2f64.powi(1 - n as i32) + 1e-9, || format!("n = {n}: distance {d}"))?;
    }
    let w = oracle_refute(&gens, 12, &t, &l).map_err(|e| e.to_string())?;
    ensure(!matches!(w, Some(ref x) if x.kind != WitnessKind::Elliptic), || format!("oracle found {w:?}"))?;
    ensure(w.is_none(), || format!("oracle found {w:?}"))?;
    Ok("g^n f^n within 2^(1-n) of z+2; no near-identity word at depth 12".into())
}

fn c8_exceptional() -> Check {
    let t = tol();
    let gens = [Moebius::dilation(2.0).unwrap(), Moebius::dilation(0.5).unwrap(), Moebius::translation(1.0)];
    ensure(exceptional_check(&gens, &t), || "exceptional_check false".into())?;
    let j = Arc::reals(0.0, f64::INFINITY).unwrap();
    let v = semidiscrete_in_mj(&gens, &j, &t).map_err(|e| e.to_string())?;
    ensure(v.class == MjClass::NotSemidiscrete, || format!("class {:?}", v.class))?;
    let ex = find_exceptional(&gens, &t).ok_or("no exceptional witness")?;
    let (f0, _) = ex.accumulation(&gens, 0, &t).ok_or("no accumulation")?;
    let b = (f0.b() / f0.d()).abs();
    let n = 10u64;
    let (word, limit) = ex.accumulation(&gens, n, &t).ok_or("no accumulation")?;
    let d = word.operator_distance(&limit);
    ensure(d <= 2f64.powi(-(n as i32)) * b + 1e-9, || format!("distance {d}"))?;
    Ok(format!("g^-10 f g^10 within {d:.3e} of az"))
}

fn c9_limit_sets() -> Check {
    let (t, l) = (tol(), lim());
    let p = SchottkyParams::default();
    let group = p.tuple();
    let fw = sample_limit_set(&group, Side::Forward, 10, &t, &l).map_err(|e| e.to_string())?;
    let bw = sample_limit_set(&group, Side::Backward, 10, &t, &l).map_err(|e| e.to_string())?;
    let hg = hausdorff(&fw.points, &bw.points);
    ensure(hg < 0.05, || format!("group samples {hg} apart"))?;
    let semi = [p.f, p.h];
    let fw = sample_limit_set(&semi, Side::Forward, 10, &t, &l).map_err(|e| e.to_string())?;
    let bw = sample_limit_set(&semi, Side::Backward, 10, &t, &l).map_err(|e| e.to_string())?;
    let hs = hausdorff(&fw.points, &bw.points);
    ensure(hs >= 0.1, || format!("semigroup samples only {hs} apart"))?;
    Ok(format!("group {hg:.3e}, semigroup {hs:.3}"))
}

fn c10_counterexample() -> Check {
    let r = yoccoz_counterexample(&SchottkyParams::default(), &CounterexampleConfig::default(), &tol(), &lim()).map_err(|e| e.to_string())?;
    ensure(r.elliptic_search.elliptic.is_none(), || "elliptic word found".into())?;
    for rr in &r.radii {
        ensure(rr.multicones_found == 0, || format!("multicone at radius {}", rr.radius))?;
    }
    let last = r.radii.iter().find(|x| x.radius == 1e-4).ok_or("radius 1e-4 missing")?;
    ensure(last.max_quantity < 1.0, || format!("quantity {} at 1e-4", last.max_quantity))?;
    ensure(r.passes, || "report does not pass".into())?;
    let qs: Vec<String> = r.radii.iter().map(|x| format!("{:.1e}:{:.2e}", x.radius, x.max_quantity)).collect();
    Ok(format!("Q = {}, quantity by radius {}", r.q_word, qs.join(" ")))
}

fn c11_multicone_soundness() -> Check {
    let (t, l) = (tol(), lim());
    let p = SchottkyParams::default();
    let mut corpus: Vec<Vec<Moebius>> = vec![
        vec![Moebius::dilation(2.0).unwrap()],
        vec![Moebius::affine(1.0 / 3.0, 0.0).unwrap(), Moebius::affine(1.0 / 3.0, 2.0 / 3.0).unwrap()],
        vec![p.f, p.h],
        p.tuple().to_vec(),
        cf_generators(1.0, 1.0).to_vec(),
        cf_generators(1.0, -1.0).to_vec(),
        vec![Moebius::dilation(3.0).unwrap(), Moebius::new(2.0, 1.0, 1.0, 1.0).unwrap()],
        vec![Moebius::rotation(0.4), Moebius::dilation(2.0).unwrap()],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut m = || loop {
            let e: [f64; 4] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            if e[0] * e[3] - e[1] * e[2] > 0.05 {
                return Moebius::new(e[0], e[1], e[2], e[3]).unwrap();
            }
        };
        corpus.push(vec![m(), m()]);
    }
    let results: Vec<std::result::Result<bool, String>> = corpus
        .par_iter()
        .map(|gens| {
            let s = find_multicone(gens, l.seed_depth, l.max_iters, &t, &l).map_err(|e| e.to_string())?;
            let Some(mc) = s.multicone else { return Ok(false) };
            if !mc.verify(gens) || mc.margin <= 0.0 {
                return Err(format!("multicone for {gens:?} fails to verify"));
            }
            let e = in_e_bounded(gens, 8, &t, &l).map_err(|e| e.to_string())?;
            if e.elliptic.is_some() {
                return Err(format!("{gens:?} has a multicone and an elliptic word"));
            }
            Ok(true)
        })
        .collect();
    let mut found = 0;
    for r in results {
        if r? {
            found += 1;
        }
    }
    ensure(found >= 3, || format!("only {found} multicones in the corpus"))?;
    Ok(format!("{found} of {} tuples certified, all re-verify", corpus.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("1 trace inequality equality", c1_joergensen_equality),
        ("2 continued fraction sweep", c2_continued_fractions),
        ("3 parabolic-hyperbolic closed forms", c3_parabolic_hyperbolic_closed_forms),
        ("4 commutator trace criterion", c4_trace_criterion),
        ("5 reduction loop", c5_reduction_loop),
        ("6 oracle agreement", c6_oracle_agreement),
        ("7 semidiscrete but not discrete", c7_semidiscrete_not_discrete),
        ("8 exceptional semigroup", c8_exceptional),
        ("9 sampled limit sets", c9_limit_sets),
        ("10 four-map counterexample", c10_counterexample),
        ("11 multicone soundness", c11_multicone_soundness),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let r = f();
        let secs = t0.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.2}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
