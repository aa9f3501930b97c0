//! Bounded searches for the two loci of `SL(2, R)` tuples that matter for
//! uniform hyperbolicity: tuples with a strictly invariant finite union of
//! arcs (a multicone), and tuples whose semigroup holds an elliptic element.
//! Also builds the four-map tuple `(F, F^-1, H, H^-1)` from a Schottky pair
//! and reports how its perturbations behave.

use crate::arc::{chord_to_angle, Arc, ArcUnion};
use crate::boundary::BoundaryPoint;
use crate::classify::paired_intervals_hold;
use crate::dynamics::{enumerate_words, scan_elliptic, scan_table, OracleWitness, WitnessKind};
use crate::error::{Error, Result};
use crate::mobius::{commutator_trace, Moebius, MoebiusClass};
use crate::tolerance::{Limits, Tolerances};
use crate::word::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// What failed multicone searches report.
pub const NO_MULTICONE: &str = "no multicone found at these parameters";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticSearch {
    pub depth: usize,
    /// First elliptic word found.
    pub elliptic: Option<OracleWitness>,
    /// First identity or near-identity word, kept apart from the elliptic
    /// search since it only shows the semigroup gets close to containing
    /// the identity.
    pub identity_evidence: Option<OracleWitness>,
}

/// Looks for an elliptic word of length at most `depth`.
pub fn in_e_bounded(gens: &[Moebius], depth: usize, tol: &Tolerances, limits: &Limits) -> Result<EllipticSearch> {
    let table = enumerate_words(gens, depth, tol, limits)?;
    let elliptic = scan_elliptic(&table);
    let identity_evidence = scan_table(&table, tol, true).filter(|w| w.kind != WitnessKind::Elliptic).or_else(|| {
        // an elliptic hit shadows later identity hits in the combined scan
        table
            .entries()
            .iter()
            .enumerate()
            .find(|(_, e)| !e.class.is_elliptic() && e.value.operator_distance(&Moebius::IDENTITY) <= tol.near)
            .map(|(i, e)| OracleWitness {
                kind: if e.class.is_identity() { WitnessKind::Identity } else { WitnessKind::NearIdentity },
                word: table.witness(i),
                value: e.value,
                class: e.class,
                distance: e.value.operator_distance(&Moebius::IDENTITY),
            })
    });
    Ok(EllipticSearch { depth, elliptic, identity_evidence })
}

/// A finite union of arcs whose closure every generator maps into its
/// interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multicone {
    pub x: ArcUnion,
    /// Smallest chordal gap between an image arc and the boundary of the
    /// component holding it.
    pub margin: f64,
}

impl Multicone {
    /// Recomputes the margin against `gens`; `None` if some image arc is not
    /// held by a component.
    pub fn realized_margin(&self, gens: &[Moebius]) -> Option<f64> {
        let mut m = f64::INFINITY;
        for g in gens {
            for c in &self.x.components {
                let k = self.x.margin_for(&c.image(g));
                if k <= 0.0 {
                    return None;
                }
                m = m.min(k);
            }
        }
        Some(m)
    }

    pub fn verify(&self, gens: &[Moebius]) -> bool {
        match self.realized_margin(gens) {
            Some(m) => m > 0.0 && m >= self.margin - 1e-12,
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticoneSearch {
    pub multicone: Option<Multicone>,
    pub iterations: usize,
    pub seeds: usize,
    /// Set when nothing was found, with the reason in brackets.
    pub note: Option<String>,
    /// Angular measure of each iterate, for tracing growth.
    pub measures: Vec<f64>,
}

impl MulticoneSearch {
    fn failed(iterations: usize, seeds: usize, measures: Vec<f64>, why: &str) -> MulticoneSearch {
        MulticoneSearch { multicone: None, iterations, seeds, note: Some(format!("{NO_MULTICONE} ({why})")), measures }
    }
}

/// The closed arc of chordal radius `r` around `p`.
pub fn neighbourhood(p: &BoundaryPoint, r: f64) -> Result<Arc> {
    let h = chord_to_angle(r);
    Arc::from_angles(p.angle() - h, 2.0 * h)
}

/// Grows neighbourhoods of attracting fixed points of short hyperbolic words
/// until the union is mapped into itself. Image arcs are padded by a tenth
/// of the seed radius before joining, so a stable union has room to spare.
/// Failure says nothing about membership.
pub fn find_multicone(gens: &[Moebius], seed_depth: usize, max_iters: usize, tol: &Tolerances, limits: &Limits) -> Result<MulticoneSearch> {
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(g) = gens.iter().find(|g| !g.classify(tol).is_hyperbolic()) {
        let why = format!("generator {} is {}", Word::letter(gens.iter().position(|h| h == g).unwrap_or(0) as u8), g.classify(tol).name());
        return Ok(MulticoneSearch::failed(0, 0, Vec::new(), &why));
    }
    let table = enumerate_words(gens, seed_depth.max(1), tol, limits)?;
    let mut seeds = Vec::new();
    for e in table.entries() {
        if let MoebiusClass::Hyperbolic { attracting, .. } = e.class {
            seeds.push(neighbourhood(&attracting, tol.seed_radius)?);
        }
    }
    let n_seeds = seeds.len();
    let mut x = match ArcUnion::from_arcs(&seeds, tol.merge, limits.kmax) {
        Ok(x) => x,
        Err(_) => return Ok(MulticoneSearch::failed(0, n_seeds, Vec::new(), "seeds cover the circle")),
    };
    let pad = tol.seed_radius / 10.0;
    let mut measures = vec![x.measure()];
    for it in 1..=max_iters {
        let mut images = Vec::with_capacity(gens.len() * x.len());
        let mut stable = true;
        for g in gens {
            for c in &x.components {
                let im = match c.image(g).enlarged(pad) {
                    Ok(a) => a,
                    Err(_) => return Ok(MulticoneSearch::failed(it, n_seeds, measures, "an image covers the circle")),
                };
                if x.component_containing(&im, 0.0).is_none() {
                    stable = false;
                }
                images.push(im);
            }
        }
        if stable {
            let mut mc = Multicone { x: x.clone(), margin: 0.0 };
            return Ok(match mc.realized_margin(gens) {
                Some(m) if m > 0.0 => {
                    mc.margin = m;
                    MulticoneSearch { multicone: Some(mc), iterations: it, seeds: n_seeds, note: None, measures }
                }
                _ => MulticoneSearch::failed(it, n_seeds, measures, "stable union without a positive margin"),
            });
        }
        let mut all = x.components.clone();
        all.extend(images);
        x = match ArcUnion::from_arcs(&all, tol.merge, limits.kmax) {
            Ok(u) => u,
            Err(_) => return Ok(MulticoneSearch::failed(it, n_seeds, measures, "the union covers the circle")),
        };
        measures.push(x.measure());
    }
    Ok(MulticoneSearch::failed(max_iters, n_seeds, measures, "iteration cap reached"))
}

/// A pair of hyperbolic maps `F`, `H` playing ping-pong on their isometric
/// intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchottkyParams {
    pub f: Moebius,
    pub h: Moebius,
}

impl Default for SchottkyParams {
    /// `F = (5z + 4)/(4z + 5)` fixing `-1, 1` and `H` fixing `-3, 3`, with
    /// isometric intervals `[-2, -1/2]`, `[1/2, 2]` and about `[-3.84, -2.34]`,
    /// `[2.34, 3.84]`.
    fn default() -> Self {
        let s = 17f64.sqrt();
        SchottkyParams {
            f: Moebius::new(5.0, 4.0, 4.0, 5.0).expect("positive determinant"),
            h: Moebius::new(s, 12.0, 4.0 / 3.0, s).expect("unit determinant"),
        }
    }
}

/// For `m = (az + b)/(cz + d)` with `c != 0`: the interval `|cx + d| <= 1`
/// around the repelling point and `|cx - a| <= 1` around the attracting one.
/// `m` maps the complement of the first onto the second.
pub fn isometric_intervals(m: &Moebius) -> Option<(Arc, Arc)> {
    let (a, _, c, d) = (m.a(), m.b(), m.c(), m.d());
    if c.abs() < 1e-12 {
        return None;
    }
    let iv = |centre: f64| {
        let (s, t) = ((centre - 1.0) / c, (centre + 1.0) / c);
        Arc::reals(s.min(t), s.max(t)).ok()
    };
    Some((iv(-d)?, iv(a)?))
}

impl SchottkyParams {
    /// The four isometric intervals `(A, B, C, D)` after checking they pair
    /// up disjointly.
    pub fn validate(&self, tol: &Tolerances) -> Result<[Arc; 4]> {
        for (name, m) in [("F", &self.f), ("H", &self.h)] {
            if !m.classify(tol).is_hyperbolic() {
                return Err(Error::InvalidSchottkyParams(format!("{name} is not hyperbolic")));
            }
        }
        let (a, b) = isometric_intervals(&self.f).ok_or_else(|| Error::InvalidSchottkyParams("F fixes infinity".into()))?;
        let (c, d) = isometric_intervals(&self.h).ok_or_else(|| Error::InvalidSchottkyParams("H fixes infinity".into()))?;
        if !paired_intervals_hold(&self.f, &self.h, &a, &b, &c, &d, tol.cert) {
            return Err(Error::InvalidSchottkyParams("isometric intervals overlap".into()));
        }
        Ok([a, b, c, d])
    }

    pub fn tuple(&self) -> [Moebius; 4] {
        [self.f, self.f.inverse(), self.h, self.h.inverse()]
    }
}

/// `|tr(p)^2 - 4| + |tr[p, q] - 2|`.
pub fn joergensen_quantity(p: &Moebius, q: &Moebius) -> f64 {
    (p.tr() * p.tr() - 4.0).abs() + (commutator_trace(p, q) - 2.0).abs()
}

/// True when the geodesics with endpoints `p1, p2` and `q1, q2` cross or
/// share an endpoint.
pub fn axes_meet(p1: &BoundaryPoint, p2: &BoundaryPoint, q1: &BoundaryPoint, q2: &BoundaryPoint, eps: f64) -> bool {
    if [q1, q2].iter().any(|q| q.chordal(p1) <= eps || q.chordal(p2) <= eps) {
        return true;
    }
    let Ok(arc) = Arc::new(*p1, *p2) else { return true };
    arc.contains(q1) != arc.contains(q2)
}

/// Shortest hyperbolic word of the table whose axis meets neither axis of
/// the tuple's first and third maps.
pub fn choose_q(tuple: &[Moebius; 4], depth: usize, tol: &Tolerances, limits: &Limits) -> Result<Option<(Word, Moebius)>> {
    let (Ok((fa, fr)), Ok((ha, hr))) = (tuple[0].fixed_points(tol), tuple[2].fixed_points(tol)) else {
        return Ok(None);
    };
    let table = enumerate_words(tuple, depth, tol, limits)?;
    for (i, e) in table.entries().iter().enumerate() {
        if let MoebiusClass::Hyperbolic { attracting, repelling, .. } = e.class {
            if !axes_meet(&fa, &fr, &attracting, &repelling, tol.cert) && !axes_meet(&ha, &hr, &attracting, &repelling, tol.cert) {
                return Ok(Some((table.witness(i), e.value)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PerturbationSample {
    pub index: usize,
    pub tuple: [Moebius; 4],
    pub multicone_found: bool,
    pub multicone_note: Option<String>,
    /// `F_r G_r` for the perturbed first two maps.
    pub product: Moebius,
    pub quantity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadiusReport {
    pub radius: f64,
    pub samples: Vec<PerturbationSample>,
    pub multicones_found: usize,
    pub max_quantity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleConfig {
    pub depth: usize,
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
    pub q_depth: usize,
    /// The quantity has to fall below this at the smallest radius.
    pub threshold: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig { depth: 8, radii: vec![1e-2, 1e-3, 1e-4], samples_per_radius: 8, seed: 0, q_depth: 4, threshold: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleReport {
    pub params: SchottkyParams,
    pub config: CounterexampleConfig,
    pub intervals: [Arc; 4],
    pub tuple: [Moebius; 4],
    pub elliptic_search: EllipticSearch,
    pub q_word: Word,
    pub q_value: Moebius,
    /// The quantity for the exact tuple, where `FG` is the identity.
    pub unperturbed_quantity: f64,
    pub radii: Vec<RadiusReport>,
    /// No elliptic word, no multicone at any radius, and the quantity below
    /// the threshold at the smallest radius.
    pub passes: bool,
    pub note: String,
}

/// Adds `r` times a seeded direction of unit max-entry to each matrix and
/// renormalizes.
pub fn perturb(tuple: &[Moebius; 4], r: f64, seed: u64) -> Result<[Moebius; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = *tuple;
    for m in out.iter_mut() {
        let mut e = [0.0f64; 4];
        for x in e.iter_mut() {
            *x = rng.gen_range(-1.0..=1.0);
        }
        let s = e.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        let v = m.entries();
        *m = Moebius::new(v[0] + r * e[0] / s, v[1] + r * e[1] / s, v[2] + r * e[2] / s, v[3] + r * e[3] / s)?;
    }
    Ok(out)
}

pub fn yoccoz_counterexample(
    params: &SchottkyParams,
    config: &CounterexampleConfig,
    tol: &Tolerances,
    limits: &Limits,
) -> Result<CounterexampleReport> {
    let intervals = params.validate(tol)?;
    let tuple = params.tuple();
    let elliptic_search = in_e_bounded(&tuple, config.depth, tol, limits)?;
    let (q_word, _) = choose_q(&tuple, config.q_depth, tol, limits)?
        .ok_or_else(|| Error::InvalidSchottkyParams("no word with an axis clear of both axes".into()))?;
    let q_value = q_word.eval(&tuple)?;
    let unperturbed_quantity = joergensen_quantity(&tuple[0].compose(&tuple[1]), &q_value);
    let mut radii = Vec::new();
    for (ri, &r) in config.radii.iter().enumerate() {
        let idx: Vec<usize> = (0..config.samples_per_radius).collect();
        let samples = idx
            .par_iter()
            .map(|&i| -> Result<PerturbationSample> {
                let seed = config.seed.wrapping_add((ri * config.samples_per_radius + i) as u64);
                let t = perturb(&tuple, r, seed)?;
                let search = find_multicone(&t, limits.seed_depth, limits.max_iters, tol, limits)?;
                let product = t[0].compose(&t[1]);
                let q = q_word.eval(&t)?;
                Ok(PerturbationSample {
                    index: i,
                    tuple: t,
                    multicone_found: search.multicone.is_some(),
                    multicone_note: search.note,
                    product,
                    quantity: joergensen_quantity(&product, &q),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let multicones_found = samples.iter().filter(|s| s.multicone_found).count();
        let max_quantity = samples.iter().fold(0.0f64, |a, s| a.max(s.quantity));
        radii.push(RadiusReport { radius: r, samples, multicones_found, max_quantity });
    }
    let smallest = radii.iter().min_by(|a, b| a.radius.total_cmp(&b.radius));
    let passes = elliptic_search.elliptic.is_none()
        && radii.iter().all(|r| r.multicones_found == 0)
        && smallest.map(|r| r.max_quantity < config.threshold).unwrap_or(false);
    let note = format!(
        "perturbation radii {:?} with {} seeded samples each; a product near the identity against the fixed word {} keeps the quantity |tr(p)^2-4|+|tr[p,q]-2| below {} while no multicone is found",
        config.radii, config.samples_per_radius, q_word, config.threshold
    );
    Ok(CounterexampleReport {
        params: params.clone(),
        config: config.clone(),
        intervals,
        tuple,
        elliptic_search,
        q_word,
        q_value,
        unperturbed_quantity,
        radii,
        passes,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn l() -> Limits {
        Limits::default()
    }

    #[test]
    fn elliptic_search_examples() {
        let (tol, lim) = (t(), l());
        let tuple = SchottkyParams::default().tuple();
        let s = in_e_bounded(&tuple, 8, &tol, &lim).unwrap();
        assert!(s.elliptic.is_none());
        assert!(s.identity_evidence.is_some());

        let f = Moebius::translation(1.0);
        let g = Moebius::new(1.0, 0.0, -1.0, 1.0).unwrap();
        let s = in_e_bounded(&[f, g], 2, &tol, &lim).unwrap();
        assert_eq!(s.elliptic.unwrap().word.to_string(), "FG");

        let s = in_e_bounded(&[Moebius::rotation(0.3)], 1, &tol, &lim).unwrap();
        assert_eq!(s.elliptic.unwrap().word.to_string(), "F");
    }

    #[test]
    fn multicone_single_hyperbolic() {
        let (tol, lim) = (t(), l());
        let f = Moebius::dilation(2.0).unwrap();
        let s = find_multicone(&[f], 6, 200, &tol, &lim).unwrap();
        let mc = s.multicone.expect("multicone");
        assert_eq!(mc.x.len(), 1);
        assert!(mc.x.contains(&BoundaryPoint::INFINITY));
        assert!(mc.margin > 0.0 && mc.verify(&[f]));
    }

    #[test]
    fn multicone_schottky_semigroup() {
        let (tol, lim) = (t(), l());
        // both maps send [0, 1] into itself, onto [0, 1/3] and [2/3, 1]
        let gens = [Moebius::affine(1.0 / 3.0, 0.0).unwrap(), Moebius::affine(1.0 / 3.0, 2.0 / 3.0).unwrap()];
        let s = find_multicone(&gens, 6, 200, &tol, &lim).unwrap();
        let mc = s.multicone.expect("multicone");
        assert!(mc.verify(&gens));
        assert!(in_e_bounded(&gens, 6, &tol, &lim).unwrap().elliptic.is_none());
    }

    #[test]
    fn multicone_fails_on_group_tuple() {
        let (tol, lim) = (t(), l());
        let tuple = SchottkyParams::default().tuple();
        let s = find_multicone(&tuple, 6, 200, &tol, &lim).unwrap();
        assert!(s.multicone.is_none());
        assert!(s.note.unwrap().starts_with(NO_MULTICONE));
        assert!(s.measures.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn params_validation() {
        let tol = t();
        let p = SchottkyParams::default();
        let [a, b, c, d] = p.validate(&tol).unwrap();
        assert!(a.contains(&BoundaryPoint::real(-1.0)) && b.contains(&BoundaryPoint::real(1.0)));
        assert!(c.contains(&BoundaryPoint::real(-3.0)) && d.contains(&BoundaryPoint::real(3.0)));
        let bad = SchottkyParams { f: Moebius::new(1.2, 0.5, 0.5, 1.2).unwrap(), h: p.h };
        assert!(matches!(bad.validate(&tol), Err(Error::InvalidSchottkyParams(_))));
        let bad = SchottkyParams { f: Moebius::dilation(4.0).unwrap(), h: p.h };
        assert!(matches!(bad.validate(&tol), Err(Error::InvalidSchottkyParams(_))));
    }

    #[test]
    fn q_axis_is_clear() {
        let (tol, lim) = (t(), l());
        let tuple = SchottkyParams::default().tuple();
        let (w, q) = choose_q(&tuple, 4, &tol, &lim).unwrap().unwrap();
        assert!(w.len() >= 2);
        assert!(q.classify(&tol).is_hyperbolic());
        assert!(joergensen_quantity(&tuple[0].compose(&tuple[1]), &q) < 1e-9);
    }

    #[test]
    fn perturbation_is_small_and_seeded() {
        let tuple = SchottkyParams::default().tuple();
        let a = perturb(&tuple, 1e-3, 7).unwrap();
        let b = perturb(&tuple, 1e-3, 7).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.iter().zip(&tuple) {
            let d = x.operator_distance(y);
            // renormalizing scales the large entries of H as well
            assert!(d > 0.0 && d < 0.5, "{d}");
        }
    }
}
