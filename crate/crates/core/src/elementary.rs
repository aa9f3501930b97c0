//! Elementary semigroups, the confined class `M(J)` of maps sending a closed
//! interval into itself, and exceptional semigroups.

use crate::arc::Arc;
use crate::boundary::{BoundaryPoint, HalfPlanePoint};
use crate::classify::candidate_points;
use crate::error::{Error, Result};
use crate::mobius::{elliptic_fixed_point, Moebius, MoebiusClass};
use crate::rational::{lcm, reconstruct_relative};
use crate::tolerance::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleClass {
    /// All generators move the same way; removing the identity leaves a
    /// semidiscrete inverse-free semigroup.
    OneSided,
    DiscreteGroup,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleVerdict {
    pub class: ScaleClass,
    /// Some ratio could not be matched to a fraction, so `Dense` may be a
    /// rational ratio with a large denominator.
    pub undetermined: bool,
}

/// The semigroup of translations `z + b_i`.
pub fn classify_additive(b: &[f64], tol: &Tolerances) -> Result<ScaleVerdict> {
    if b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zero = 1e-12 * scale;
    let nonzero: Vec<f64> = b.iter().copied().filter(|x| x.abs() > zero).collect();
    if nonzero.iter().all(|&x| x > 0.0) || nonzero.iter().all(|&x| x < 0.0) {
        return Ok(ScaleVerdict { class: ScaleClass::OneSided, undetermined: false });
    }
    let base = nonzero[0];
    let rational = nonzero.iter().all(|&x| reconstruct_relative(x / base, tol.qmax, tol.ratio).is_some());
    Ok(if rational {
        ScaleVerdict { class: ScaleClass::DiscreteGroup, undetermined: false }
    } else {
        ScaleVerdict { class: ScaleClass::Dense, undetermined: true }
    })
}

/// The semigroup of dilations `a_i z`, through logarithms.
pub fn classify_multiplicative(a: &[f64], tol: &Tolerances) -> Result<ScaleVerdict> {
    if let Some(&bad) = a.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::NonpositiveInput(bad));
    }
    let logs: Vec<f64> = a.iter().map(|x| x.ln()).collect();
    classify_additive(&logs, tol)
}

/// Smallest positive generator of the discrete group spanned by `b`.
fn translation_step(b: &[f64], tol: &Tolerances) -> Option<f64> {
    let base = *b.iter().find(|x| x.abs() > 0.0)?;
    let mut den = 1u64;
    let mut fracs = Vec::new();
    for &x in b {
        let (p, q) = reconstruct_relative(x / base, tol.qmax, tol.ratio).or(if x == 0.0 { Some((0, 1)) } else { None })?;
        den = lcm(den, q);
        fracs.push((p, q));
    }
    // the integers p * den / q have gcd g; the step is |base| g / den
    let g = fracs
        .iter()
        .map(|&(p, q)| (p.unsigned_abs()) * (den / q))
        .fold(0u64, crate::rational::gcd);
    Some(base.abs() * g as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementaryClass {
    /// A finite cyclic group of rotations.
    FiniteCyclicElliptic,
    /// `<az, z/a>` or `<az, z/a, -1/z>` with `a > 1`.
    HyperbolicGroupPair,
    /// Expanding affine maps together with `<z+1, z-1>`.
    TranslationMixed,
    /// Expanding and contracting affine maps with every repelling point left
    /// of every attracting point, plus nonnegative translations.
    ContractionChain,
    NotSemidiscrete,
    NotElementary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementaryVerdict {
    pub class: ElementaryClass,
    /// The normal form describes `S^{-1}` rather than `S`.
    pub inverted_flag: bool,
    pub undetermined: bool,
    /// `h` with `h g h^{-1}` in normal form for every generator `g`.
    pub conjugator: Option<Moebius>,
    /// Conjugated generators, inverted when `inverted_flag` is set.
    pub normal_form: Vec<Moebius>,
    pub order: Option<u64>,
    /// The dilation `a > 1` generating the hyperbolic part of a group.
    pub dilation: Option<f64>,
    /// Repelling points `b/(1-a)` of expanding maps, in normal form.
    pub repelling_points: Vec<f64>,
    /// Attracting points `d/(1-c)` of contracting maps, in normal form.
    pub attracting_points: Vec<f64>,
    pub translations: Vec<f64>,
    /// A point `s` with every non-identity element mapping `[s, inf]`
    /// strictly inside itself.
    pub separator: Option<f64>,
    pub translation_step: Option<f64>,
    pub note: Option<String>,
}

impl ElementaryVerdict {
    fn new(class: ElementaryClass) -> ElementaryVerdict {
        ElementaryVerdict {
            class,
            inverted_flag: false,
            undetermined: false,
            conjugator: None,
            normal_form: Vec::new(),
            order: None,
            dilation: None,
            repelling_points: Vec::new(),
            attracting_points: Vec::new(),
            translations: Vec::new(),
            separator: None,
            translation_step: None,
            note: None,
        }
    }

    fn not_semidiscrete(note: &str) -> ElementaryVerdict {
        let mut v = ElementaryVerdict::new(ElementaryClass::NotSemidiscrete);
        v.note = Some(note.to_string());
        v
    }

    fn with_conjugator(mut self, h: &Moebius, gens: &[Moebius]) -> ElementaryVerdict {
        self.conjugator = Some(*h);
        self.normal_form = gens
            .iter()
            .map(|g| {
                let c = g.conjugate_by(h);
                if self.inverted_flag {
                    c.inverse()
                } else {
                    c
                }
            })
            .collect();
        self
    }

    pub fn is_semidiscrete(&self) -> bool {
        !matches!(self.class, ElementaryClass::NotSemidiscrete | ElementaryClass::NotElementary)
    }
}

/// `(a, b)` for a map fixing infinity, read as `z -> a z + b`.
fn affine_parts(f: &Moebius) -> (f64, f64) {
    (f.a() / f.d(), f.b() / f.d())
}

fn hyperbolic_point_tol(tol: &Tolerances) -> f64 {
    1e3 * tol.pt
}

/// Classifies an elementary finitely generated semigroup, after moving its
/// common fixed configuration to `i`, `infinity` or `{0, infinity}`.
pub fn classify_elementary(gens: &[Moebius], tol: &Tolerances) -> Result<ElementaryVerdict> {
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let live: Vec<Moebius> = gens.iter().copied().filter(|g| !g.is_identity(tol)).collect();
    if live.is_empty() {
        let mut v = ElementaryVerdict::new(ElementaryClass::ContractionChain);
        v.note = Some("trivial semigroup".into());
        return Ok(v);
    }
    let classes: Vec<MoebiusClass> = live.iter().map(|g| g.classify(tol)).collect();
    if let Some(v) = common_interior_point(&live, &classes, tol) {
        return Ok(v.with_conjugator_keep(gens));
    }
    if let Some(p) = common_boundary_point(&live, &classes, tol) {
        let h = Moebius::sending_to_infinity(&p);
        return Ok(classify_affine(&live, tol, &h, gens));
    }
    if let Some((p, q)) = common_pair(&live, &classes, tol) {
        let h = Moebius::sending_to_zero_infinity(&p, &q)?;
        return Ok(classify_pair_swap(&live, tol, &h, gens));
    }
    Ok(ElementaryVerdict::new(ElementaryClass::NotElementary))
}

impl ElementaryVerdict {
    fn with_conjugator_keep(self, gens: &[Moebius]) -> ElementaryVerdict {
        match self.conjugator {
            Some(h) => self.with_conjugator(&h, gens),
            None => self,
        }
    }
}

fn common_interior_point(live: &[Moebius], classes: &[MoebiusClass], tol: &Tolerances) -> Option<ElementaryVerdict> {
    if !classes.iter().all(|c| c.is_elliptic()) {
        return None;
    }
    let z0 = elliptic_fixed_point(&live[0])?;
    for g in &live[1..] {
        let z = elliptic_fixed_point(g)?;
        if z.hyperbolic_dist(&z0) > hyperbolic_point_tol(tol) {
            return None;
        }
    }
    let mut order = 1u64;
    for c in classes {
        match c.elliptic_order() {
            Some(q) => order = lcm(order, q),
            None => {
                let mut v = ElementaryVerdict::not_semidiscrete("rotation of infinite or undetermined order");
                v.undetermined = true;
                v.conjugator = Some(Moebius::sending_to_i(&z0));
                return Some(v);
            }
        }
    }
    let mut v = ElementaryVerdict::new(ElementaryClass::FiniteCyclicElliptic);
    v.order = Some(order);
    v.conjugator = Some(Moebius::sending_to_i(&z0));
    Some(v)
}

fn fixed_set(g: &Moebius, tol: &Tolerances) -> Option<(BoundaryPoint, BoundaryPoint)> {
    g.fixed_points(tol).ok()
}

fn is_fixed(g: &Moebius, p: &BoundaryPoint, tol: &Tolerances) -> bool {
    match fixed_set(g, tol) {
        Some((a, b)) => a.approx_eq(p, tol.pt) || b.approx_eq(p, tol.pt),
        None => false,
    }
}

fn common_boundary_point(live: &[Moebius], classes: &[MoebiusClass], tol: &Tolerances) -> Option<BoundaryPoint> {
    if classes.iter().any(|c| c.is_elliptic()) {
        return None;
    }
    let (a, b) = fixed_set(&live[0], tol)?;
    [a, b].into_iter().find(|p| live.iter().all(|g| is_fixed(g, p, tol)))
}

fn swaps(e: &Moebius, p: &BoundaryPoint, q: &BoundaryPoint, tol: &Tolerances) -> bool {
    e.apply_boundary(p).chordal(q) <= tol.pt && e.apply_boundary(q).chordal(p) <= tol.pt
}

fn common_pair(live: &[Moebius], classes: &[MoebiusClass], tol: &Tolerances) -> Option<(BoundaryPoint, BoundaryPoint)> {
    let hyperbolic = live.iter().zip(classes).find(|(_, c)| c.is_hyperbolic()).map(|(g, _)| *g);
    let h = match hyperbolic {
        Some(h) => h,
        None => {
            // two half-turns about distinct points compose to a hyperbolic
            let e: Vec<&Moebius> = live.iter().zip(classes).filter(|(_, c)| c.elliptic_order() == Some(2)).map(|(g, _)| g).collect();
            if e.len() < 2 {
                return None;
            }
            let p = e[0].compose(e[1]);
            if !p.classify(tol).is_hyperbolic() {
                return None;
            }
            p
        }
    };
    let (p, q) = fixed_set(&h, tol)?;
    let ok = live.iter().zip(classes).all(|(g, c)| {
        if c.is_hyperbolic() {
            is_fixed(g, &p, tol) && is_fixed(g, &q, tol)
        } else {
            c.elliptic_order() == Some(2) && swaps(g, &p, &q, tol)
        }
    });
    if ok {
        Some((p, q))
    } else {
        None
    }
}

/// Generators fixing `{0, infinity}` as a set, at least one swapping them:
/// the semigroup is a group containing `-1/z`.
fn classify_pair_swap(live: &[Moebius], tol: &Tolerances, h: &Moebius, gens: &[Moebius]) -> ElementaryVerdict {
    let conj: Vec<Moebius> = live.iter().map(|g| g.conjugate_by(h)).collect();
    let mut logs = Vec::new();
    let mut swap_scales = Vec::new();
    for g in &conj {
        if g.c().abs() < 1e-9 * (1.0 + g.b().abs()) {
            logs.push(affine_parts(g).0.ln());
        } else {
            // -s/z has lift [[0, -sqrt s], [1/sqrt s, 0]]
            swap_scales.push((-g.b() / g.c()).abs());
        }
    }
    for s in &swap_scales[1.min(swap_scales.len())..] {
        logs.push((s / swap_scales[0]).ln());
    }
    let mut both: Vec<f64> = logs.clone();
    both.extend(logs.iter().map(|x| -x));
    let nonzero: Vec<f64> = both.iter().copied().filter(|x| x.abs() > 1e-12).collect();
    if nonzero.is_empty() {
        let mut v = ElementaryVerdict::new(ElementaryClass::FiniteCyclicElliptic);
        v.order = Some(2);
        return v.with_conjugator(h, gens);
    }
    match classify_additive(&nonzero, tol) {
        Ok(ScaleVerdict { class: ScaleClass::Dense, undetermined }) => {
            let mut v = ElementaryVerdict::not_semidiscrete("dilation part is dense");
            v.undetermined = undetermined;
            v.with_conjugator(h, gens)
        }
        _ => {
            let mut v = ElementaryVerdict::new(ElementaryClass::HyperbolicGroupPair);
            v.dilation = translation_step(&nonzero, tol).map(f64::exp);
            v.note = Some("group contains -1/z".into());
            v.with_conjugator(h, gens)
        }
    }
}

/// Generators all fixing infinity after conjugation by `h`.
fn classify_affine(live: &[Moebius], tol: &Tolerances, h: &Moebius, gens: &[Moebius]) -> ElementaryVerdict {
    let conj: Vec<Moebius> = live.iter().map(|g| g.conjugate_by(h)).collect();
    let mut exp = Vec::new();
    let mut con = Vec::new();
    let mut trans = Vec::new();
    let mut scales = Vec::new();
    for g in &conj {
        let (a, b) = affine_parts(g);
        if g.classify(tol).is_hyperbolic() {
            scales.push(a);
            if a > 1.0 {
                exp.push(b / (1.0 - a));
            } else {
                con.push(b / (1.0 - a));
            }
        } else {
            trans.push(b);
        }
    }
    let tscale = trans.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tk = if trans.is_empty() { None } else { classify_additive(&trans, tol).ok() };
    if let Some(ScaleVerdict { class: ScaleClass::Dense, undetermined }) = tk {
        let mut v = ElementaryVerdict::not_semidiscrete("translations are dense");
        v.undetermined = undetermined;
        return v.with_conjugator(h, gens);
    }
    let t_neg = trans.iter().any(|&t| t < -1e-12 * tscale);
    let t_pos = trans.iter().any(|&t| t > 1e-12 * tscale);
    let t_group = matches!(tk, Some(ScaleVerdict { class: ScaleClass::DiscreteGroup, .. }));

    if exp.is_empty() || con.is_empty() {
        let mut v;
        if t_group {
            v = ElementaryVerdict::new(ElementaryClass::TranslationMixed);
            v.inverted_flag = exp.is_empty() && !con.is_empty();
            v.translation_step = translation_step(&trans, tol);
        } else {
            v = ElementaryVerdict::new(ElementaryClass::ContractionChain);
            // class needs t >= 0; inversion flips every translation
            v.inverted_flag = t_neg && !t_pos;
        }
        return fill_affine(v, exp, con, trans, h, gens);
    }

    let inverted = con.iter().cloned().fold(f64::INFINITY, f64::min) < exp.iter().cloned().fold(f64::INFINITY, f64::min);
    let (e, c, t): (Vec<f64>, Vec<f64>, Vec<f64>) = if inverted {
        (con.clone(), exp.clone(), trans.iter().map(|x| -x).collect())
    } else {
        (exp.clone(), con.clone(), trans.clone())
    };
    let pscale = 1.0 + e.iter().chain(c.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let eps = tol.ratio * pscale;
    let max_e = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_c = c.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_e < min_c - eps {
        if t.iter().any(|&x| x < -1e-12 * tscale) {
            return ElementaryVerdict::not_semidiscrete("negative translation alongside an ordered chain").with_conjugator(h, gens);
        }
        let mut v = ElementaryVerdict::new(ElementaryClass::ContractionChain);
        v.inverted_flag = inverted;
        v.separator = Some(0.5 * (max_e + min_c));
        return fill_affine(v, exp, con, trans, h, gens);
    }
    let all_equal = e.iter().chain(c.iter()).all(|&p| (p - max_e).abs() <= eps);
    if !all_equal {
        return ElementaryVerdict::not_semidiscrete("repelling and attracting points interleave").with_conjugator(h, gens);
    }
    match classify_multiplicative(&scales, tol) {
        Ok(ScaleVerdict { class: ScaleClass::DiscreteGroup, .. }) if trans.is_empty() => {
            let mut v = ElementaryVerdict::new(ElementaryClass::HyperbolicGroupPair);
            let logs: Vec<f64> = scales.iter().map(|a| a.ln()).collect();
            v.dilation = translation_step(&logs, tol).map(f64::exp);
            // move the shared finite fixed point to 0
            let shift = Moebius::translation(-max_e).compose(h);
            fill_affine(v, exp, con, trans, &shift, gens)
        }
        Ok(ScaleVerdict { class: ScaleClass::DiscreteGroup, .. }) => {
            ElementaryVerdict::not_semidiscrete("exceptional: a translation fixes an end of the axis").with_conjugator(h, gens)
        }
        Ok(ScaleVerdict { undetermined, .. }) => {
            let mut v = ElementaryVerdict::not_semidiscrete("dilations about a common axis are dense");
            v.undetermined = undetermined;
            v.with_conjugator(h, gens)
        }
        Err(_) => ElementaryVerdict::not_semidiscrete("nonpositive dilation").with_conjugator(h, gens),
    }
}

fn fill_affine(
    mut v: ElementaryVerdict,
    exp: Vec<f64>,
    con: Vec<f64>,
    trans: Vec<f64>,
    h: &Moebius,
    gens: &[Moebius],
) -> ElementaryVerdict {
    if v.inverted_flag {
        v.repelling_points = con;
        v.attracting_points = exp;
        v.translations = trans.iter().map(|x| -x).collect();
    } else {
        v.repelling_points = exp;
        v.attracting_points = con;
        v.translations = trans;
    }
    if v.class == ElementaryClass::ContractionChain && v.separator.is_none() {
        let max_e = v.repelling_points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_c = v.attracting_points.iter().cloned().fold(f64::INFINITY, f64::min);
        v.separator = match (max_e.is_finite(), min_c.is_finite()) {
            (true, true) => Some(0.5 * (max_e + min_c)),
            (true, false) => Some(max_e + 1.0),
            (false, true) => Some(min_c - 1.0),
            (false, false) => None,
        };
    }
    v.with_conjugator(h, gens)
}

fn maps_into(g: &Moebius, j: &Arc, tol: &Tolerances) -> bool {
    j.image(g).is_subset_of(j, tol.pt)
}

/// A closed arc mapped into itself by every generator, searched over arcs
/// with endpoints among generator fixed points and their midpoints.
pub fn invariant_interval_scan(gens: &[Moebius], tol: &Tolerances) -> Option<Arc> {
    let pts = candidate_points(gens, tol, 3);
    for p in &pts {
        for q in &pts {
            let Ok(j) = Arc::new(*p, *q) else { continue };
            if gens.iter().all(|g| maps_into(g, &j, tol)) {
                return Some(j);
            }
        }
    }
    None
}

/// Data showing a semigroup is exceptional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExceptionalWitness {
    pub interval: Arc,
    /// Generators fixing both ends of the interval.
    pub group: Vec<usize>,
    /// A generator fixing exactly one end.
    pub fixer: usize,
    /// A group generator expanding toward the end fixed by `fixer`.
    pub expander: usize,
}

impl ExceptionalWitness {
    /// `g^{-n} f g^n` together with its limit, where `g` is the expander and
    /// `f` the fixer, written in coordinates where the interval is
    /// `[0, inf]` and `f` fixes infinity.
    pub fn accumulation(&self, gens: &[Moebius], n: u64, tol: &Tolerances) -> Option<(Moebius, Moebius)> {
        let (p, q) = (self.interval.p, self.interval.q);
        let f = gens[self.fixer];
        let h = if is_fixed(&f, &q, tol) {
            Moebius::sending_to_zero_infinity(&p, &q).ok()?
        } else {
            Moebius::sending_to_zero_infinity(&q, &p).ok()?
        };
        let f = f.conjugate_by(&h);
        let mut g = gens[self.expander].conjugate_by(&h);
        if affine_parts(&g).0 < 1.0 {
            g = g.inverse();
        }
        let word = g.pow(n).inverse().compose(&f).compose(&g.pow(n));
        let (a, _) = affine_parts(&f);
        Some((word, Moebius::dilation(a).ok()?))
    }
}

fn axis_multiplier(g: &Moebius, p: &BoundaryPoint, q: &BoundaryPoint) -> Option<f64> {
    let h = Moebius::sending_to_zero_infinity(p, q).ok()?;
    let c = g.conjugate_by(&h);
    Some(affine_parts(&c).0)
}

/// Follows the recipe: exactly one family of two or more hyperbolic
/// generators on a common axis generating a discrete group, every generator
/// in `M(J)` for one of the two arcs `J` between the axis endpoints, and a
/// generator fixing exactly one endpoint of `J`.
pub fn find_exceptional(gens: &[Moebius], tol: &Tolerances) -> Option<ExceptionalWitness> {
    let mut axes: Vec<((BoundaryPoint, BoundaryPoint), Vec<usize>)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if !g.classify(tol).is_hyperbolic() {
            continue;
        }
        let (a, b) = fixed_set(g, tol)?;
        match axes.iter_mut().find(|((p, q), _)| {
            (p.approx_eq(&a, tol.pt) && q.approx_eq(&b, tol.pt)) || (p.approx_eq(&b, tol.pt) && q.approx_eq(&a, tol.pt))
        }) {
            Some((_, v)) => v.push(i),
            None => axes.push(((a, b), vec![i])),
        }
    }
    let discrete: Vec<&((BoundaryPoint, BoundaryPoint), Vec<usize>)> = axes
        .iter()
        .filter(|((p, q), idx)| {
            if idx.len() < 2 {
                return false;
            }
            let m: Option<Vec<f64>> = idx.iter().map(|&i| axis_multiplier(&gens[i], p, q)).collect();
            matches!(m.map(|m| classify_multiplicative(&m, tol)), Some(Ok(ScaleVerdict { class: ScaleClass::DiscreteGroup, .. })))
        })
        .collect();
    if discrete.len() != 1 {
        return None;
    }
    let ((p, q), idx) = discrete[0];
    for (s, t) in [(*p, *q), (*q, *p)] {
        let Ok(j) = Arc::new(s, t) else { continue };
        if !gens.iter().all(|g| maps_into(g, &j, tol)) {
            continue;
        }
        let fixer = gens.iter().enumerate().find(|(i, g)| !idx.contains(i) && (is_fixed(g, &s, tol) != is_fixed(g, &t, tol)));
        if let Some((fixer, f)) = fixer {
            // pick the group generator expanding away from the end f fixes
            let end = if is_fixed(f, &t, tol) { t } else { s };
            let expander = idx
                .iter()
                .copied()
                .find(|&i| fixed_set(&gens[i], tol).map(|(a, _)| a.approx_eq(&end, tol.pt)) == Some(true))
                .unwrap_or(idx[0]);
            return Some(ExceptionalWitness { interval: j, group: idx.clone(), fixer, expander });
        }
    }
    None
}

pub fn exceptional_check(gens: &[Moebius], tol: &Tolerances) -> bool {
    find_exceptional(gens, tol).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MjClass {
    SemidiscreteInverseFreePlusIdentity,
    Semidiscrete,
    NotSemidiscrete,
    DenseInM0,
}

/// A closed region of the closed half-plane mapped into itself, properly,
/// by every non-identity generator. In coordinates where the interval is
/// `[0, inf]` and every dilation fixing it contracts, the region is the
/// part of the closed first quadrant on or below the line through `u < 0`
/// and `i v`. Its trace on the boundary is the interval itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadrantCertificate {
    pub conjugator: Moebius,
    /// The conjugation also reverses orientation by `z -> -conj(z)`.
    pub mirrored: bool,
    pub u: f64,
    pub v: f64,
    pub boundary: Arc,
}

/// Images of the generators in the certificate's coordinates.
fn quadrant_coords(gens: &[Moebius], h: &Moebius, mirrored: bool) -> Vec<Moebius> {
    gens.iter()
        .map(|g| {
            let c = g.conjugate_by(h);
            if mirrored {
                c.mirrored()
            } else {
                c
            }
        })
        .collect()
}

impl QuadrantCertificate {
    /// Checks every generator against the region. Maps fixing infinity are
    /// affine and move the line to a parallel line; the rest send the
    /// quadrant to a half-disc whose height is its radius.
    pub fn verify(&self, gens: &[Moebius], tol: &Tolerances) -> bool {
        if !(self.u < 0.0 && self.v > 0.0) {
            return false;
        }
        let j = match Arc::reals(0.0, f64::INFINITY) {
            Ok(j) => j,
            Err(_) => return false,
        };
        for g in quadrant_coords(gens, &self.conjugator, self.mirrored) {
            if g.is_identity(tol) {
                continue;
            }
            if !maps_into(&g, &j, tol) {
                return false;
            }
            let inf = g.apply_boundary(&BoundaryPoint::INFINITY);
            if inf.approx_eq(&BoundaryPoint::INFINITY, tol.pt) {
                let (a, b) = affine_parts(&g);
                // the quadrant moves to x >= b and the line to the parallel
                // line through a u + b, which lies weakly below when a u + b >= u
                if b < -tol.pt || a * self.u + b < self.u - tol.pt * (1.0 + self.u.abs()) {
                    return false;
                }
            } else {
                let x0 = g.apply_real(0.0).t_or_inf();
                let x1 = inf.t_or_inf();
                if !x0.is_finite() || !x1.is_finite() {
                    return false;
                }
                if 0.5 * (x1 - x0).abs() >= self.v {
                    return false;
                }
            }
        }
        true
    }
}

fn quadrant_certificate(gens: &[Moebius], j: &Arc, tol: &Tolerances) -> Option<QuadrantCertificate> {
    let h0 = Moebius::sending_to_zero_infinity(&j.p, &j.q).ok()?;
    let fixers: Vec<f64> = gens
        .iter()
        .map(|g| g.conjugate_by(&h0))
        .filter(|g| !g.is_identity(tol) && g.c().abs() <= tol.pt && g.b().abs() <= tol.pt)
        .map(|g| affine_parts(&g).0)
        .collect();
    // make the fixing dilations contract: conjugate by -1/z then mirror
    let (h, mirrored) = if fixers.iter().any(|&a| a > 1.0) {
        (Moebius::new(0.0, -1.0, 1.0, 0.0).ok()?.compose(&h0), true)
    } else {
        (h0, false)
    };
    let coords = quadrant_coords(gens, &h, mirrored);
    let mut beta_max = f64::NEG_INFINITY;
    let mut radius: f64 = 0.0;
    for g in &coords {
        if g.is_identity(tol) {
            continue;
        }
        let inf = g.apply_boundary(&BoundaryPoint::INFINITY);
        if inf.approx_eq(&BoundaryPoint::INFINITY, tol.pt) {
            let (a, b) = affine_parts(g);
            if a > 1.0 + tol.cls {
                beta_max = beta_max.max(b / (1.0 - a));
            }
        } else {
            let x0 = g.apply_real(0.0).t_or_inf();
            radius = radius.max(0.5 * (inf.t_or_inf() - x0).abs());
        }
    }
    let u = if beta_max.is_finite() { 0.5 * beta_max.min(0.0) } else { -1.0 };
    let u = if u < 0.0 { u } else { -1.0 };
    let v = if radius > 0.0 { 1.5 * radius } else { 1.0 };
    let cert = QuadrantCertificate { conjugator: h, mirrored, u, v, boundary: *j };
    if cert.verify(gens, tol) {
        Some(cert)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MjVerdict {
    pub class: MjClass,
    pub undetermined: bool,
    /// Indices of generators fixing both ends of the interval.
    pub fixing: Vec<usize>,
    pub certificate: Option<QuadrantCertificate>,
    pub exceptional: Option<ExceptionalWitness>,
}

/// Semidiscreteness of a finitely generated semigroup in `M(J)`.
pub fn semidiscrete_in_mj(gens: &[Moebius], j: &Arc, tol: &Tolerances) -> Result<MjVerdict> {
    for (i, g) in gens.iter().enumerate() {
        if !maps_into(g, j, tol) {
            return Err(Error::NotInvariant(i));
        }
    }
    let (p, q) = (j.p, j.q);
    let fixing: Vec<usize> = gens
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.is_identity(tol) && is_fixed(g, &p, tol) && is_fixed(g, &q, tol))
        .map(|(i, _)| i)
        .collect();
    let mult: Vec<f64> = fixing.iter().filter_map(|&i| axis_multiplier(&gens[i], &p, &q)).collect();
    let scale = if mult.is_empty() {
        ScaleVerdict { class: ScaleClass::OneSided, undetermined: false }
    } else {
        classify_multiplicative(&mult, tol)?
    };
    let mut v = MjVerdict { class: MjClass::Semidiscrete, undetermined: scale.undetermined, fixing: fixing.clone(), certificate: None, exceptional: None };
    match scale.class {
        ScaleClass::OneSided => {
            v.class = MjClass::SemidiscreteInverseFreePlusIdentity;
            v.certificate = quadrant_certificate(gens, j, tol);
        }
        ScaleClass::DiscreteGroup => {
            let fixer = gens
                .iter()
                .enumerate()
                .find(|(i, g)| !fixing.contains(i) && !g.is_identity(tol) && (is_fixed(g, &p, tol) || is_fixed(g, &q, tol)));
            if let Some((fi, f)) = fixer {
                v.class = MjClass::NotSemidiscrete;
                let end = if is_fixed(f, &q, tol) { q } else { p };
                let expander = fixing
                    .iter()
                    .copied()
                    .find(|&i| fixed_set(&gens[i], tol).map(|(a, _)| a.approx_eq(&end, tol.pt)) == Some(true))
                    .unwrap_or(fixing[0]);
                v.exceptional = Some(ExceptionalWitness { interval: *j, group: fixing.clone(), fixer: fi, expander });
            }
        }
        ScaleClass::Dense => v.class = MjClass::DenseInM0,
    }
    Ok(v)
}

/// A half-plane point as an elliptic's fixed point, for callers comparing
/// centres of rotation.
pub fn rotation_centre(e: &Moebius) -> Option<HalfPlanePoint> {
    elliptic_fixed_point(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn dil(k: f64) -> Moebius {
        Moebius::dilation(k).unwrap()
    }

    fn aff(k: f64, b: f64) -> Moebius {
        Moebius::affine(k, b).unwrap()
    }

    #[test]
    fn additive_examples() {
        let tol = t();
        assert_eq!(classify_additive(&[1.0, 2.0, 3.0], &tol).unwrap().class, ScaleClass::OneSided);
        assert_eq!(classify_additive(&[2.0, -3.0], &tol).unwrap().class, ScaleClass::DiscreteGroup);
        let d = classify_additive(&[1.0, -2f64.sqrt()], &tol).unwrap();
        assert_eq!(d.class, ScaleClass::Dense);
        assert!(d.undetermined);
        assert_eq!(classify_additive(&[], &tol), Err(Error::EmptyInput));
        assert_eq!(translation_step(&[2.0, -3.0], &tol), Some(1.0));
        assert!((translation_step(&[0.5, -0.75], &tol).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn multiplicative_examples() {
        let tol = t();
        assert_eq!(classify_multiplicative(&[2.0, 4.0], &tol).unwrap().class, ScaleClass::OneSided);
        assert_eq!(classify_multiplicative(&[2.0, 0.5], &tol).unwrap().class, ScaleClass::DiscreteGroup);
        assert_eq!(classify_multiplicative(&[2.0, 1.0 / 3.0], &tol).unwrap().class, ScaleClass::Dense);
        assert_eq!(classify_multiplicative(&[2.0, 0.0], &tol), Err(Error::NonpositiveInput(0.0)));
    }

    #[test]
    fn elementary_examples() {
        let tol = t();
        let r = Moebius::rotation(std::f64::consts::PI / 5.0);
        let v = classify_elementary(&[r], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::FiniteCyclicElliptic);
        assert_eq!(v.order, Some(5));

        let v = classify_elementary(&[dil(2.0), aff(0.5, 1.0)], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::ContractionChain);
        let s = v.separator.unwrap();
        assert!(v.repelling_points.iter().all(|&p| p < s));
        assert!(v.attracting_points.iter().all(|&p| p > s));

        let v = classify_elementary(&[dil(2.0), aff(0.5, 1.0), dil(1.0 / 3.0)], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::NotSemidiscrete);

        let v = classify_elementary(&[dil(2.0), dil(0.5)], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::HyperbolicGroupPair);
        assert!((v.dilation.unwrap() - 2.0).abs() < 1e-9);

        let v = classify_elementary(&[dil(2.0), Moebius::new(0.0, -1.0, 1.0, 0.0).unwrap()], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::HyperbolicGroupPair);

        let v = classify_elementary(&[aff(2.0, 3.0), Moebius::translation(1.0), Moebius::translation(-1.5)], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::TranslationMixed);
        assert!((v.translation_step.unwrap() - 0.5).abs() < 1e-12);

        let v = classify_elementary(&[dil(2.0), Moebius::translation(1.0)], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::ContractionChain);

        let v = classify_elementary(&[Moebius::translation(1.0), Moebius::new(1.0, 0.0, 1.0, 1.0).unwrap()], &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::NotElementary);
    }

    #[test]
    fn conjugated_chain_has_normal_form() {
        let tol = t();
        let h = Moebius::new(1.0, 2.0, 1.0, 3.0).unwrap();
        let gens: Vec<Moebius> = [dil(2.0), aff(0.5, 1.0)].iter().map(|g| g.conjugate_by(&h)).collect();
        let v = classify_elementary(&gens, &tol).unwrap();
        assert_eq!(v.class, ElementaryClass::ContractionChain);
        for g in &v.normal_form {
            assert!(g.apply_boundary(&BoundaryPoint::INFINITY).approx_eq(&BoundaryPoint::INFINITY, 1e-9));
        }
    }

    #[test]
    fn interval_scan() {
        let tol = t();
        let j = invariant_interval_scan(&[dil(2f64.sqrt()), dil(0.5), Moebius::translation(1.0)], &tol).unwrap();
        assert!(j.p.approx_eq(&BoundaryPoint::real(0.0), 1e-12));
        assert!(j.q.is_infinity());
        assert!(invariant_interval_scan(&[dil(2.0), Moebius::new(0.0, -1.0, 1.0, 0.0).unwrap()], &tol).is_none());
        let j = invariant_interval_scan(&[Moebius::translation(1.0)], &tol).unwrap();
        assert!(j.q.is_infinity() || j.p.is_infinity());
    }

    #[test]
    fn exceptional_examples() {
        let tol = t();
        let gens = [dil(2.0), dil(0.5), Moebius::translation(1.0)];
        let w = find_exceptional(&gens, &tol).unwrap();
        let (word, limit) = w.accumulation(&gens, 10, &tol).unwrap();
        assert!(word.operator_distance(&limit) <= 2f64.powi(-10) + 1e-9);
        // (z + 1)/(z + 2) maps [0, inf] into [1/2, 1]
        let g = Moebius::new(1.0, 1.0, 1.0, 2.0).unwrap();
        assert!(!exceptional_check(&[dil(2.0), dil(0.5), g], &tol));
        assert!(!exceptional_check(&[dil(2.0), dil(3.0)], &tol));
    }

    #[test]
    fn mj_examples() {
        let tol = t();
        let j = Arc::reals(0.0, f64::INFINITY).unwrap();
        let v = semidiscrete_in_mj(&[dil(2.0), dil(3.0), Moebius::translation(1.0)], &j, &tol).unwrap();
        assert_eq!(v.class, MjClass::SemidiscreteInverseFreePlusIdentity);
        let c = v.certificate.unwrap();
        assert!(c.verify(&[dil(2.0), dil(3.0), Moebius::translation(1.0)], &tol));
        let v = semidiscrete_in_mj(&[dil(2.0), dil(0.5), Moebius::translation(1.0)], &j, &tol).unwrap();
        assert_eq!(v.class, MjClass::NotSemidiscrete);
        // log sqrt(2) / log(1/2) = -1/2, so the dilations form a discrete group
        let v = semidiscrete_in_mj(&[dil(2f64.sqrt()), dil(0.5), Moebius::translation(1.0)], &j, &tol).unwrap();
        assert_eq!(v.class, MjClass::NotSemidiscrete);
        let v = semidiscrete_in_mj(&[dil(2.0), dil(1.0 / 3.0), Moebius::translation(1.0)], &j, &tol).unwrap();
        assert_eq!(v.class, MjClass::DenseInM0);
        assert_eq!(semidiscrete_in_mj(&[Moebius::translation(-1.0)], &j, &tol).unwrap_err(), Error::NotInvariant(0));
        let g = Moebius::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let v = semidiscrete_in_mj(&[dil(2.0), dil(0.5), g], &j, &tol).unwrap();
        assert_eq!(v.class, MjClass::Semidiscrete);
    }

    #[test]
    fn quadrant_certificate_rejects_expanding_line() {
        let tol = t();
        let j = Arc::reals(0.0, f64::INFINITY).unwrap();
        let gens = [dil(0.5), aff(1.0, 2.0), Moebius::new(1.0, 1.0, 1.0, 2.0).unwrap()];
        let c = quadrant_certificate(&gens, &j, &tol).unwrap();
        assert!(c.verify(&gens, &tol));
        let bad = QuadrantCertificate { v: 1e-3, ..c.clone() };
        assert!(!bad.verify(&gens, &tol));
    }
}
