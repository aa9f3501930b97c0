use mobius_semigroup::arc::{Arc, ArcUnion};
use mobius_semigroup::classify::{classify_pair, PairStatus};
use mobius_semigroup::cocycle::find_multicone;
use mobius_semigroup::dynamics::{continued_fraction_check, enumerate_words, hausdorff, CompositionState};
use mobius_semigroup::elementary::{classify_additive, classify_multiplicative};
use mobius_semigroup::{BoundaryPoint, Limits, Moebius, Tolerances, Word};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn entry() -> impl Strategy<Value = f64> {
    -4.0f64..4.0
}

/// Maps with determinant bounded away from zero, so lifts stay moderate.
fn moebius() -> impl Strategy<Value = Moebius> {
    (entry(), entry(), entry(), entry())
        .prop_filter("det", |(a, b, c, d)| a * d - b * c > 0.2)
        .prop_map(|(a, b, c, d)| Moebius::new(a, b, c, d).unwrap())
}

fn point() -> impl Strategy<Value = BoundaryPoint> {
    (0.0f64..std::f64::consts::TAU).prop_map(BoundaryPoint::from_angle)
}

fn status_or_skip(f: &Moebius, g: &Moebius) -> Option<PairStatus> {
    match classify_pair(f, g, &tol(), &Limits::default()) {
        Ok(v) if v.status.is_decisive() && !v.flags.undetermined => Some(v.status),
        _ => None,
    }
}

fn is_sif(s: PairStatus) -> bool {
    s == PairStatus::SemidiscreteInverseFree
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn products_keep_unit_determinant(f in moebius(), g in moebius()) {
        let h = f.compose(&g);
        prop_assert!((h.det() - 1.0).abs() < 1e-9 * h.mat().max_abs().powi(2).max(1.0));
        let loose = Tolerances { id: 1e-9, ..tol() };
        prop_assert!(f.compose(&f.inverse()).is_identity(&loose));
    }

    #[test]
    fn composition_is_associative(f in moebius(), g in moebius(), h in moebius()) {
        let l = f.compose(&g).compose(&h);
        let r = f.compose(&g.compose(&h));
        prop_assert!(l.operator_distance(&r) < 1e-9 * l.mat().max_abs().max(1.0));
    }

    #[test]
    fn class_is_conjugation_invariant(f in moebius(), h in moebius()) {
        let t = tol();
        let c = f.classify(&t);
        prop_assume!(!c.is_borderline() && (f.tr() - 2.0).abs() > 1e-6);
        prop_assert_eq!(c.name(), f.conjugate_by(&h).classify(&t).name());
    }

    #[test]
    fn fixed_points_are_fixed(f in moebius()) {
        let t = tol();
        prop_assume!(f.tr() > 2.0 + 1e-6);
        let (a, r) = f.fixed_points(&t).unwrap();
        prop_assert!(f.apply_boundary(&a).chordal(&a) < 1e-8);
        prop_assert!(f.apply_boundary(&r).chordal(&r) < 1e-8);
    }

    #[test]
    fn chordal_metric_axioms(p in point(), q in point(), r in point()) {
        prop_assert!((p.chordal(&q) - q.chordal(&p)).abs() < 1e-15);
        prop_assert!(p.chordal(&r) <= p.chordal(&q) + q.chordal(&r) + 1e-12);
        prop_assert!(p.chordal(&q) <= 2.0 + 1e-15);
    }

    #[test]
    fn arc_images_follow_points(p in point(), q in point(), s in 0.0f64..1.0, f in moebius()) {
        prop_assume!(p.chordal(&q) > 1e-3);
        let arc = Arc::new(p, q).unwrap();
        let x = arc.point_at(s);
        prop_assert!(arc.image(&f).contains_tol(&f.apply_boundary(&x), 1e-9));
    }

    #[test]
    fn unions_cover_their_arcs(starts in prop::collection::vec((0.0f64..6.2, 0.01f64..0.8), 1..20)) {
        let arcs: Vec<Arc> = starts.iter().map(|&(s, l)| Arc::from_angles(s, l).unwrap()).collect();
        if let Ok(u) = ArcUnion::from_arcs(&arcs, 1e-9, 4) {
            prop_assert!(u.len() <= 4);
            for a in &arcs {
                prop_assert!(u.component_containing(a, 1e-12).is_some());
            }
        }
    }

    #[test]
    fn pair_verdict_symmetric(f in moebius(), g in moebius()) {
        let (Some(a), Some(b)) = (status_or_skip(&f, &g), status_or_skip(&g, &f)) else { return Ok(()) };
        prop_assert_eq!(is_sif(a), is_sif(b));
    }

    #[test]
    fn pair_verdict_conjugation_invariant(f in moebius(), g in moebius(), h in moebius()) {
        prop_assume!(h.mat().max_abs() < 3.0);
        let (Some(a), Some(b)) = (status_or_skip(&f, &g), status_or_skip(&f.conjugate_by(&h), &g.conjugate_by(&h))) else { return Ok(()) };
        prop_assert_eq!(is_sif(a), is_sif(b));
    }

    #[test]
    fn reduction_traces_decrease(f in moebius(), g in moebius()) {
        let Ok(v) = classify_pair(&f, &g, &tol(), &Limits::default()) else { return Ok(()) };
        for w in v.reduction_trace.windows(2) {
            prop_assert!(w[1][1] < w[0][1]);
            prop_assert!(w[0][1] - w[1][1] > w[1][0] - 2.0 - 1e-9);
        }
    }

    #[test]
    fn additive_scale_invariance(b in prop::collection::vec(-5.0f64..5.0, 1..5), k in 0.1f64..10.0) {
        let t = tol();
        prop_assume!(b.iter().all(|x| x.abs() > 1e-3));
        let v = classify_additive(&b, &t).unwrap();
        let scaled: Vec<f64> = b.iter().map(|x| x * k).collect();
        prop_assert_eq!(v.class, classify_additive(&scaled, &t).unwrap().class);
    }

    #[test]
    fn multiplicative_power_invariance(a in prop::collection::vec(0.2f64..5.0, 1..5), p in 1u32..4) {
        let t = tol();
        prop_assume!(a.iter().all(|x| x.ln().abs() > 1e-3));
        let v = classify_multiplicative(&a, &t).unwrap();
        let powered: Vec<f64> = a.iter().map(|x| x.powi(p as i32)).collect();
        prop_assert_eq!(v.class, classify_multiplicative(&powered, &t).unwrap().class);
    }

    #[test]
    fn incremental_products_match_words(digits in prop::collection::vec(0u8..2, 1..40), f in moebius(), g in moebius()) {
        let gens = [f, g];
        let mut s = CompositionState::new(8);
        for &d in &digits {
            s.step(&gens[d as usize]);
        }
        let w = Word::from_letters(&digits).eval(&gens).unwrap();
        let p = s.product();
        prop_assert!(p.operator_distance(&w) <= 1e-8 * w.mat().max_abs().max(1.0));
    }

    #[test]
    fn hausdorff_is_symmetric(a in prop::collection::vec(point(), 1..10), b in prop::collection::vec(point(), 1..10)) {
        prop_assert!((hausdorff(&a, &b) - hausdorff(&b, &a)).abs() < 1e-15);
        prop_assert!(hausdorff(&a, &a) < 1e-15);
    }

    #[test]
    fn cf_verdict_matches_product_class(lambda in -3.0f64..3.0, mu in -3.0f64..3.0) {
        let p = lambda * mu;
        prop_assume!((p + 4.0).abs() > 1e-9 && p.abs() > 1e-9);
        let r = continued_fraction_check(lambda, mu, &tol());
        prop_assert_eq!(r.verdict, !(-4.0 < p && p < 0.0));
        if let Some(c) = r.witness_class {
            prop_assert!(c.is_elliptic());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn word_table_witnesses_evaluate(f in moebius(), g in moebius()) {
        let t = tol();
        let tab = enumerate_words(&[f, g], 5, &t, &Limits::default()).unwrap();
        for (i, e) in tab.entries().iter().enumerate() {
            let w = tab.witness(i);
            prop_assert_eq!(w.len(), e.length as u64);
            let v = w.eval(&tab.gens).unwrap();
            prop_assert!(v.operator_distance(&e.value) <= 1e-9 * v.mat().max_abs().max(1.0));
        }
    }

    #[test]
    fn multicones_verify(f in moebius(), g in moebius()) {
        let (t, l) = (tol(), Limits::default());
        let s = find_multicone(&[f, g], 4, 100, &t, &l).unwrap();
        prop_assert!(s.measures.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        if let Some(mc) = s.multicone {
            prop_assert!(mc.verify(&[f, g]));
            prop_assert!(mc.margin > 0.0 && mc.x.len() <= l.kmax);
        } else {
            prop_assert!(s.note.unwrap().starts_with("no multicone found at these parameters"));
        }
    }
}
