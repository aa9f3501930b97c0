//! Two-generator semigroups: semidiscreteness, inverse-freeness and the
//! semigroup Jørgensen inequality.
//!
//! Every decisive verdict carries something a simple checker can re-run: a
//! pair of Schottky intervals or a common contracted interval, an elliptic
//! word, or the list of traces that ruled elliptic words out.

use crate::arc::{offset, Arc};
use crate::boundary::BoundaryPoint;
use crate::elementary::{classify_elementary, ElementaryVerdict};
use crate::error::{Error, Result};
use crate::mobius::{commutator_trace, elliptic_fixed_point, Mat2, Moebius, MoebiusClass};
use crate::tolerance::{Limits, Tolerances};
use crate::word::Word;
use serde::{Deserialize, Serialize};

/// Which configuration makes a pair elementary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementarySubtype {
    /// Two elliptics sharing their fixed point, or both of order two.
    EllipticPair,
    /// An order-two elliptic swapping the fixed points of a hyperbolic.
    OrderTwoSwap,
    /// Parabolic or hyperbolic maps with a boundary fixed point in common.
    CommonBoundaryFixedPoint,
}

/// Tolerance on the hyperbolic distance between elliptic fixed points.
fn elliptic_point_tol(tol: &Tolerances) -> f64 {
    1e3 * tol.pt
}

pub fn elementary_check(f: &Moebius, g: &Moebius, tol: &Tolerances) -> Result<Option<ElementarySubtype>> {
    let cf = f.classify(tol);
    let cg = g.classify(tol);
    if cf.is_identity() || cg.is_identity() {
        return Err(Error::IdentityInput);
    }
    match (cf.is_elliptic(), cg.is_elliptic()) {
        (true, true) => {
            if cf.elliptic_order() == Some(2) && cg.elliptic_order() == Some(2) {
                return Ok(Some(ElementarySubtype::EllipticPair));
            }
            let (zf, zg) = (elliptic_fixed_point(f), elliptic_fixed_point(g));
            if let (Some(zf), Some(zg)) = (zf, zg) {
                if zf.hyperbolic_dist(&zg) <= elliptic_point_tol(tol) {
                    return Ok(Some(ElementarySubtype::EllipticPair));
                }
            }
            Ok(None)
        }
        (true, false) | (false, true) => {
            let (e, ce, h, ch) = if cf.is_elliptic() { (f, cf, g, cg) } else { (g, cg, f, cf) };
            if ce.elliptic_order() == Some(2) && ch.is_hyperbolic() {
                let (a, b) = h.fixed_points(tol)?;
                if e.apply_boundary(&a).chordal(&b) <= tol.pt && e.apply_boundary(&b).chordal(&a) <= tol.pt {
                    return Ok(Some(ElementarySubtype::OrderTwoSwap));
                }
            }
            Ok(None)
        }
        (false, false) => {
            let (af, bf) = f.fixed_points(tol)?;
            let (ag, bg) = g.fixed_points(tol)?;
            for p in [af, bf] {
                for q in [ag, bg] {
                    if p.approx_eq(&q, tol.pt) {
                        return Ok(Some(ElementarySubtype::CommonBoundaryFixedPoint));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Outcome of the test on the two arcs between attracting fixed points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTest {
    pub antiparallel: bool,
    /// A test point landed within `tol.pt` of an arc endpoint.
    pub borderline: bool,
    /// When not antiparallel, the arc both maps send properly into itself.
    pub common: Option<Arc>,
}

/// Each map fixes its own attracting point, so an arc from `alpha_f` to
/// `alpha_g` goes into itself under `f` exactly when `f(alpha_g)` lies in it,
/// and likewise for `g`. The pair fails to be antiparallel when both test
/// points fall in the same arc.
pub fn side_test(f: &Moebius, g: &Moebius, tol: &Tolerances) -> Result<SideTest> {
    let cf = f.classify(tol);
    let cg = g.classify(tol);
    if !(cf.is_parabolic() || cf.is_hyperbolic()) || !(cg.is_parabolic() || cg.is_hyperbolic()) {
        return Err(Error::NotApplicable);
    }
    let (af, bf) = f.fixed_points(tol)?;
    let (ag, bg) = g.fixed_points(tol)?;
    for p in [af, bf] {
        for q in [ag, bg] {
            if p.approx_eq(&q, tol.pt) {
                return Err(Error::SharedFixedPoint);
            }
        }
    }
    let i1 = Arc::new(af, ag)?;
    let x = f.apply_boundary(&ag);
    let y = g.apply_boundary(&af);
    let near = |p: &BoundaryPoint| p.chordal(&af) <= tol.pt || p.chordal(&ag) <= tol.pt;
    let borderline = near(&x) || near(&y);
    let xin = i1.contains(&x);
    let yin = i1.contains(&y);
    if xin == yin {
        let j = if xin { i1 } else { i1.complement() };
        Ok(SideTest { antiparallel: false, borderline, common: Some(j) })
    } else {
        Ok(SideTest { antiparallel: true, borderline, common: None })
    }
}

pub fn antiparallel(f: &Moebius, g: &Moebius, tol: &Tolerances) -> Result<bool> {
    Ok(side_test(f, g, tol)?.antiparallel)
}

/// `ceil(2 tr(g) / sqrt(tr[f,g] - 2))` for parabolic `f` and hyperbolic `g`.
pub fn power_bound(f: &Moebius, g: &Moebius, tol: &Tolerances) -> Result<u64> {
    if !f.classify(tol).is_parabolic() || !g.classify(tol).is_hyperbolic() {
        return Err(Error::NotApplicable);
    }
    let c = commutator_trace(f, g).abs();
    if !(c > 2.0) {
        return Err(Error::CommutatorTraceNotAboveTwo(c));
    }
    let b = (2.0 * g.tr() / (c - 2.0).sqrt()).ceil();
    Ok(if b >= u64::MAX as f64 { u64::MAX } else { b.max(1.0) as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairStatus {
    SemidiscreteInverseFree,
    SemidiscreteGroupAndFree,
    RequiresGroupDiscreteness,
    NotSemidiscrete,
    Elementary,
    Borderline,
}

impl PairStatus {
    pub fn is_decisive(&self) -> bool {
        !matches!(self, PairStatus::Borderline)
    }
}

/// A rewrite of the working pair `(f, g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Substitution {
    /// `(f, g) -> (g, f)`
    Swap,
    /// `(f, g) -> (f, fg)`
    PhiA,
    /// `(f, g) -> (fg, f)`
    PhiB,
    /// `(f, g) -> (f, f^n g)`
    Power(u64),
}

impl Substitution {
    pub fn apply(&self, f: &Moebius, g: &Moebius) -> (Moebius, Moebius) {
        match self {
            Substitution::Swap => (*g, *f),
            Substitution::PhiA => (*f, f.compose(g)),
            Substitution::PhiB => (f.compose(g), *f),
            Substitution::Power(n) => (*f, f.pow(*n).compose(g)),
        }
    }

    pub fn apply_words(&self, f: &Word, g: &Word) -> (Word, Word) {
        match self {
            Substitution::Swap => (g.clone(), f.clone()),
            Substitution::PhiA => (f.clone(), f.concat(g)),
            Substitution::PhiB => (f.concat(g), f.clone()),
            Substitution::Power(n) => {
                let mut w = Word::empty();
                for _ in 0..(*n).min(1 << 20) {
                    w = w.concat(f);
                }
                (f.clone(), w.concat(g))
            }
        }
    }
}

/// Replays substitutions from the original pair.
pub fn replay(f: &Moebius, g: &Moebius, subs: &[Substitution]) -> (Moebius, Moebius) {
    subs.iter().fold((*f, *g), |(a, b), s| s.apply(&a, &b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SchottkyKind {
    /// `f` maps the complement of `cl(a)` into `b`; `g` maps the complement
    /// of `cl(c)` into `d`. The four open arcs are disjoint.
    PairedIntervals { a: Arc, b: Arc, c: Arc, d: Arc },
    /// Both maps send `j` into a proper subset of itself.
    CommonContractedInterval { j: Arc },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SchottkyCertificate {
    pub kind: SchottkyKind,
    /// Rewrites taking the input pair to the pair the arcs refer to.
    pub word_substitution: Vec<Substitution>,
}

impl SchottkyCertificate {
    /// Re-checks the arc conditions against the input pair.
    pub fn verify(&self, f: &Moebius, g: &Moebius, tol: &Tolerances) -> bool {
        let (f, g) = replay(f, g, &self.word_substitution);
        match &self.kind {
            SchottkyKind::PairedIntervals { a, b, c, d } => paired_intervals_hold(&f, &g, a, b, c, d, tol.cert),
            SchottkyKind::CommonContractedInterval { j } => {
                self.word_substitution.iter().all(|s| *s == Substitution::Swap)
                    && j.image(&f).properly_inside(j, tol)
                    && j.image(&g).properly_inside(j, tol)
            }
        }
    }
}

/// `f` maps the complement of `a` into `b`, `g` maps the complement of `c`
/// into `d`, and the four arcs have disjoint interiors.
pub fn paired_intervals_hold(f: &Moebius, g: &Moebius, a: &Arc, b: &Arc, c: &Arc, d: &Arc, eps: f64) -> bool {
    if !a.complement().image(f).is_subset_of(b, eps) || !c.complement().image(g).is_subset_of(d, eps) {
        return false;
    }
    let arcs = [a, b, c, d];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if !arcs[i].interiors_disjoint(arcs[j], eps) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EllipticWitness {
    /// Word in the letters of the working pair after substitutions.
    pub word: Word,
    /// The same word in the letters of the input pair, when short enough.
    pub original_word: Option<Word>,
    pub value: Moebius,
    pub class: MoebiusClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub word: Word,
    pub trace: f64,
    pub class: String,
}

/// Traces of the words `f^n g` that decide the elliptic-generator cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceCertificate {
    pub elliptic_order: Option<u64>,
    pub entries: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Certificate {
    Schottky(SchottkyCertificate),
    EllipticWitness(EllipticWitness),
    TraceCertificate(TraceCertificate),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictFlags {
    pub borderline_reason: Option<String>,
    /// Some elliptic order could not be determined.
    pub undetermined: bool,
    /// The Jørgensen quantity is below 1 for a pair that generates a group.
    pub joergensen_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementaryDetail {
    pub subtype: ElementarySubtype,
    pub verdict: Option<ElementaryVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairVerdict {
    pub status: PairStatus,
    pub generators: [Moebius; 2],
    pub elementary: Option<ElementaryDetail>,
    pub certificate: Option<Certificate>,
    /// `(tr f_n, tr g_n, tr f_n g_n)` before each reduction step.
    pub reduction_trace: Vec<[f64; 3]>,
    pub substitutions: Vec<Substitution>,
    pub flags: VerdictFlags,
    pub note: Option<String>,
}

impl PairVerdict {
    fn new(f: &Moebius, g: &Moebius, status: PairStatus) -> PairVerdict {
        PairVerdict {
            status,
            generators: [*f, *g],
            elementary: None,
            certificate: None,
            reduction_trace: Vec::new(),
            substitutions: Vec::new(),
            flags: VerdictFlags::default(),
            note: None,
        }
    }

    pub fn witness(&self) -> Option<&EllipticWitness> {
        match &self.certificate {
            Some(Certificate::EllipticWitness(w)) => Some(w),
            _ => None,
        }
    }
}

/// The pair being worked on, with its words in the input letters.
struct Working {
    f: Moebius,
    g: Moebius,
    fw: Option<Word>,
    gw: Option<Word>,
    subs: Vec<Substitution>,
    trace: Vec<[f64; 3]>,
}

/// Beyond this many runs the input-letter words are dropped.
const MAX_WORD_RUNS: usize = 4096;

impl Working {
    fn new(f: &Moebius, g: &Moebius) -> Working {
        Working {
            f: *f,
            g: *g,
            fw: Some(Word::letter(0)),
            gw: Some(Word::letter(1)),
            subs: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn apply(&mut self, s: Substitution) {
        let (f, g) = s.apply(&self.f, &self.g);
        self.f = f;
        self.g = g;
        let words = match (&self.fw, &self.gw) {
            (Some(a), Some(b)) => {
                let (x, y) = s.apply_words(a, b);
                if x.runs().len() + y.runs().len() <= MAX_WORD_RUNS {
                    Some((x, y))
                } else {
                    None
                }
            }
            _ => None,
        };
        match words {
            Some((x, y)) => {
                self.fw = Some(x);
                self.gw = Some(y);
            }
            None => {
                self.fw = None;
                self.gw = None;
            }
        }
        self.subs.push(s);
    }

    fn original(&self, w: &Word) -> Option<Word> {
        match (&self.fw, &self.gw) {
            (Some(a), Some(b)) => {
                let o = w.substitute(&[a.clone(), b.clone()]);
                if o.runs().len() <= MAX_WORD_RUNS {
                    Some(o)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn witness(&self, w: Word, value: Moebius, class: MoebiusClass) -> Certificate {
        let original_word = self.original(&w);
        Certificate::EllipticWitness(EllipticWitness { word: w, original_word, value, class })
    }

    fn finish(self, input: (&Moebius, &Moebius), status: PairStatus, cert: Option<Certificate>) -> PairVerdict {
        let mut v = PairVerdict::new(input.0, input.1, status);
        v.certificate = cert;
        v.reduction_trace = self.trace;
        v.substitutions = self.subs;
        v
    }
}

fn borderline(w: Working, input: (&Moebius, &Moebius), reason: &str) -> PairVerdict {
    let mut v = w.finish(input, PairStatus::Borderline, None);
    v.flags.borderline_reason = Some(reason.to_string());
    v
}

/// Status for a word that turned out elliptic or the identity. A word with
/// both letters and finite order makes the semigroup a group, so only the
/// discreteness of that group is left open.
fn status_for_witness(class: &MoebiusClass, word: &Word) -> PairStatus {
    match class {
        MoebiusClass::Elliptic { order: None, .. } => PairStatus::NotSemidiscrete,
        _ if word.distinct_letters() < 2 => PairStatus::NotSemidiscrete,
        _ => PairStatus::RequiresGroupDiscreteness,
    }
}

/// Decides whether `<f, g>` is semidiscrete and inverse free.
pub fn classify_pair(f: &Moebius, g: &Moebius, tol: &Tolerances, limits: &Limits) -> Result<PairVerdict> {
    let input = (f, g);
    let cf = f.classify(tol);
    let cg = g.classify(tol);
    if cf.is_identity() || cg.is_identity() {
        return Err(Error::IdentityInput);
    }
    if let Some(subtype) = elementary_check(f, g, tol)? {
        let mut v = PairVerdict::new(f, g, PairStatus::Elementary);
        v.elementary = Some(ElementaryDetail { subtype, verdict: classify_elementary(&[*f, *g], tol).ok() });
        return Ok(v);
    }
    let mut v = if cf.is_elliptic() || cg.is_elliptic() {
        elliptic_pair(f, g, tol)
    } else {
        let mut w = Working::new(f, g);
        if f.tr() > g.tr() {
            w.apply(Substitution::Swap);
        }
        reduce(w, input, tol, limits)
    };
    if v.status == PairStatus::RequiresGroupDiscreteness && v.note.is_none() {
        let lhs = joergensen_lhs(f, g).min(joergensen_lhs(g, f));
        if (lhs - 1.0).abs() <= 1e-12 {
            v.note = Some("trace inequality holds with equality: |tr(f)^2 - 4| + |tr[f,g] - 2| = 1".into());
        }
    }
    Ok(v)
}

/// Pairs of parabolic or hyperbolic maps, after sorting by trace.
fn reduce(mut w: Working, input: (&Moebius, &Moebius), tol: &Tolerances, limits: &Limits) -> PairVerdict {
    let mut steps = 0usize;
    loop {
        let cf = w.f.classify(tol);
        let cg = w.g.classify(tol);
        if cf.is_borderline() && !w.subs.iter().all(|s| *s == Substitution::Swap) {
            return borderline(w, input, "reduced generator has trace within the parabolic band");
        }
        if cf.is_elliptic() || cg.is_elliptic() || cf.is_identity() || cg.is_identity() {
            return borderline(w, input, "reduced generator left the parabolic/hyperbolic class");
        }
        let st = match side_test(&w.f, &w.g, tol) {
            Ok(st) => st,
            Err(_) => return borderline(w, input, "reduced pair shares a fixed point"),
        };
        if st.borderline {
            return borderline(w, input, "antiparallel test point is at an arc endpoint");
        }
        if !st.antiparallel {
            if w.subs.iter().any(|s| *s != Substitution::Swap) {
                return borderline(w, input, "reduced pair stopped being antiparallel");
            }
            let cert = SchottkyCertificate {
                kind: SchottkyKind::CommonContractedInterval { j: st.common.expect("set when not antiparallel") },
                word_substitution: w.subs.clone(),
            };
            return w.finish(input, PairStatus::SemidiscreteInverseFree, Some(Certificate::Schottky(cert)));
        }
        if cf.is_parabolic() && cg.is_parabolic() {
            return two_parabolics(w, input, tol);
        }
        if cf.is_parabolic() {
            return parabolic_hyperbolic(w, input, tol, limits);
        }
        if cg.is_parabolic() {
            // tr f <= tr g forces f to be the parabolic one
            return borderline(w, input, "trace ordering inconsistent with classes");
        }
        let fg = w.f.compose(&w.g);
        let cfg = fg.classify(tol);
        if cfg.is_elliptic() || cfg.is_identity() {
            let word = Word::from_letters(&[0, 1]);
            let status = status_for_witness(&cfg, &word);
            let cert = w.witness(word, fg, cfg);
            let mut v = w.finish(input, status, Some(cert));
            v.flags.undetermined = cfg.is_elliptic() && cfg.elliptic_order().is_none();
            return v;
        }
        if cfg.is_borderline() {
            return borderline(w, input, "fg has trace within the parabolic band");
        }
        let c = commutator_trace(&w.f, &w.g).abs();
        let tg = w.g.tr();
        if c >= tg * tg - 2.0 {
            let r = match (w.f.fixed_points(tol), w.g.fixed_points(tol)) {
                (Ok((af, bf)), Ok((ag, bg))) => reflection_through(&[(af, bf), (ag, bg)]),
                _ => None,
            };
            let kind = r.and_then(|r| paired_intervals(&w.f, &w.g, &r, tol));
            return match kind {
                Some(kind) => {
                    let cert = SchottkyCertificate { kind, word_substitution: w.subs.clone() };
                    w.finish(input, PairStatus::SemidiscreteInverseFree, Some(Certificate::Schottky(cert)))
                }
                None => borderline(w, input, "Schottky intervals failed verification"),
            };
        }
        if steps >= limits.max_phi_steps {
            return borderline(w, input, "reduction step cap reached");
        }
        steps += 1;
        let tf = w.f.tr();
        w.trace.push([tf, tg, fg.tr()]);
        if tf <= fg.tr() {
            w.apply(Substitution::PhiA);
        } else {
            w.apply(Substitution::PhiB);
        }
    }
}

/// Both maps parabolic and antiparallel: the product decides.
fn two_parabolics(w: Working, input: (&Moebius, &Moebius), tol: &Tolerances) -> PairVerdict {
    let fg = w.f.compose(&w.g);
    let cfg = fg.classify(tol);
    if cfg.is_elliptic() || cfg.is_identity() {
        let word = Word::from_letters(&[0, 1]);
        let status = status_for_witness(&cfg, &word);
        let undetermined = cfg.is_elliptic() && cfg.elliptic_order().is_none();
        let cert = w.witness(word, fg, cfg);
        let mut v = w.finish(input, status, Some(cert));
        v.flags.undetermined = undetermined;
        return v;
    }
    if cfg.is_borderline() {
        return borderline(w, input, "fg has trace within the parabolic band");
    }
    let pf = w.f.fixed_points(tol).map(|p| p.0);
    let pg = w.g.fixed_points(tol).map(|p| p.0);
    let kind = match (pf, pg) {
        (Ok(pf), Ok(pg)) => reflection_through(&[(pf, pf), (pg, pg)]).and_then(|r| paired_intervals(&w.f, &w.g, &r, tol)),
        _ => None,
    };
    match kind {
        Some(kind) => {
            let cert = SchottkyCertificate { kind, word_substitution: w.subs.clone() };
            w.finish(input, PairStatus::SemidiscreteInverseFree, Some(Certificate::Schottky(cert)))
        }
        None => borderline(w, input, "Schottky intervals failed verification"),
    }
}

/// Parabolic `f` and hyperbolic `g`, antiparallel: finitely many `f^n g`
/// decide, and the least-trace one pairs with `f` in a Schottky group.
fn parabolic_hyperbolic(mut w: Working, input: (&Moebius, &Moebius), tol: &Tolerances, limits: &Limits) -> PairVerdict {
    let bound = match power_bound(&w.f, &w.g, tol) {
        Ok(b) => b,
        Err(_) => return borderline(w, input, "commutator trace does not exceed 2"),
    };
    if bound as u128 > limits.word_cap as u128 {
        return borderline(w, input, "power bound exceeds the word cap");
    }
    let mut traces: Vec<(f64, u64)> = Vec::new();
    let mut h = w.g;
    traces.push((h.tr(), 0));
    for n in 1..=bound.saturating_add(1) {
        h = w.f.compose(&h);
        let c = h.classify(tol);
        if n <= bound {
            if c.is_elliptic() || c.is_identity() {
                let word = Word::power(0, n).concat(&Word::letter(1));
                let status = status_for_witness(&c, &word);
                let undetermined = c.is_elliptic() && c.elliptic_order().is_none();
                // recompute by squaring so the stored value matches the word
                let value = w.f.pow(n).compose(&w.g);
                let cert = w.witness(word, value, c);
                let mut v = w.finish(input, status, Some(cert));
                v.flags.undetermined = undetermined;
                return v;
            }
            if c.is_borderline() {
                return borderline(w, input, "f^n g has trace within the parabolic band");
            }
        }
        traces.push((h.tr(), n));
    }
    traces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let pf = match w.f.fixed_points(tol) {
        Ok(p) => p.0,
        Err(_) => return borderline(w, input, "parabolic fixed point unavailable"),
    };
    for &(_, n) in traces.iter().take(4) {
        let h = w.f.pow(n).compose(&w.g);
        let Ok((ah, bh)) = h.fixed_points(tol) else { continue };
        if !h.classify(tol).is_hyperbolic() {
            continue;
        }
        let Some(r) = reflection_through(&[(pf, pf), (ah, bh)]) else { continue };
        if let Some(kind) = paired_intervals(&w.f, &h, &r, tol) {
            if n > 0 {
                w.apply(Substitution::Power(n));
            }
            let cert = SchottkyCertificate { kind, word_substitution: w.subs.clone() };
            return w.finish(input, PairStatus::SemidiscreteInverseFree, Some(Certificate::Schottky(cert)));
        }
    }
    borderline(w, input, "Schottky intervals failed verification")
}

/// Linear condition on a boundary reflection `[[p, q], [r, -p]]` sending
/// `x` to `y`.
fn reflection_constraint(x: &BoundaryPoint, y: &BoundaryPoint) -> [f64; 3] {
    let v = [x.x() * y.y() + x.y() * y.x(), x.y() * y.y(), -x.x() * y.x()];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// The reflection in a hyperbolic line, as a matrix of determinant -1,
/// satisfying two point-pair conditions `R(x) = y`. A pair `(x, x)` asks for
/// `x` to be an endpoint of the line.
pub fn reflection_through(pairs: &[(BoundaryPoint, BoundaryPoint); 2]) -> Option<Mat2> {
    let u = reflection_constraint(&pairs[0].0, &pairs[0].1);
    let v = reflection_constraint(&pairs[1].0, &pairs[1].1);
    let p = u[1] * v[2] - u[2] * v[1];
    let q = u[2] * v[0] - u[0] * v[2];
    let r = u[0] * v[1] - u[1] * v[0];
    let det = -p * p - q * r;
    if !(det < -1e-24) {
        return None;
    }
    let s = 1.0 / (-det).sqrt();
    Some(Mat2::new(p * s, q * s, r * s, -p * s))
}

/// The arc between the endpoints of a reflection line whose interior avoids
/// the endpoints of `avoid`.
fn arc_away_from(line: &Mat2, avoid: &(BoundaryPoint, BoundaryPoint), eps: f64) -> Option<Arc> {
    let (e1, e2) = line.real_eigenvectors()?;
    let a = Arc::new(e1, e2).ok()?;
    let ok = |arc: &Arc| !arc.interior_contains(&avoid.0, eps) && !arc.interior_contains(&avoid.1, eps);
    match (ok(&a), ok(&a.complement())) {
        (true, false) => Some(a),
        (false, true) => Some(a.complement()),
        _ => None,
    }
}

/// Builds and checks Schottky intervals from a reflection `r` with `f r` and
/// `r h` both reflections.
fn paired_intervals(f: &Moebius, h: &Moebius, r: &Mat2, tol: &Tolerances) -> Option<SchottkyKind> {
    let line = r.real_eigenvectors()?;
    let sf = f.mat().mul(r);
    let sh = r.mul(&h.mat());
    let b = arc_away_from(&sf, &line, tol.cert)?;
    let a = b.image_mat(r)?;
    let c = arc_away_from(&sh, &line, tol.cert)?;
    let d = c.image_mat(r)?;
    if paired_intervals_hold(f, h, &a, &b, &c, &d, tol.cert) {
        Some(SchottkyKind::PairedIntervals { a, b, c, d })
    } else {
        None
    }
}

/// Cases with an elliptic generator. Only elliptics of finite order can sit
/// in a semidiscrete semigroup, and then the words `f^n g` with `n` below
/// the order decide.
fn elliptic_pair(f: &Moebius, g: &Moebius, tol: &Tolerances) -> PairVerdict {
    let cf = f.classify(tol);
    let cg = g.classify(tol);
    // e is the elliptic (the first one if both), o the other
    let (e, o, ce, co, ei, oi) = if cf.is_elliptic() { (f, g, cf, cg, 0u8, 1u8) } else { (g, f, cg, cf, 1u8, 0u8) };
    let mut w = Working::new(f, g);
    w.subs.clear();
    let witness = |word: Word, value: Moebius, class: MoebiusClass| {
        Certificate::EllipticWitness(EllipticWitness { original_word: Some(word.clone()), word, value, class })
    };
    let Some(m) = ce.elliptic_order() else {
        let mut v = PairVerdict::new(f, g, PairStatus::NotSemidiscrete);
        v.certificate = Some(witness(Word::letter(ei), *e, ce));
        v.flags.undetermined = true;
        return v;
    };
    if co.is_elliptic() {
        return match co.elliptic_order() {
            Some(k) => {
                let mut v = PairVerdict::new(f, g, PairStatus::RequiresGroupDiscreteness);
                v.certificate = Some(Certificate::TraceCertificate(TraceCertificate {
                    elliptic_order: Some(m),
                    entries: vec![TraceEntry { word: Word::letter(oi), trace: o.tr(), class: format!("Elliptic(order {k})") }],
                }));
                v.flags.joergensen_violated = joergensen_lhs(f, g) < 1.0 - 1e-12;
                v
            }
            None => {
                let mut v = PairVerdict::new(f, g, PairStatus::NotSemidiscrete);
                v.certificate = Some(witness(Word::letter(oi), *o, co));
                v.flags.undetermined = true;
                v
            }
        };
    }
    let mut entries = Vec::new();
    let mut h = *o;
    for n in 1..m {
        h = e.compose(&h);
        let c = h.classify(tol);
        let word = Word::power(ei, n).concat(&Word::letter(oi));
        if c.is_borderline() {
            return borderline(w, (f, g), "f^n g has trace within the parabolic band");
        }
        if c.is_identity() {
            return borderline(w, (f, g), "f^n g is numerically the identity");
        }
        if c.is_elliptic() {
            return match c.elliptic_order() {
                Some(_) => {
                    entries.push(TraceEntry { word, trace: h.tr(), class: c.name().to_string() });
                    let mut v = PairVerdict::new(f, g, PairStatus::RequiresGroupDiscreteness);
                    v.certificate = Some(Certificate::TraceCertificate(TraceCertificate { elliptic_order: Some(m), entries }));
                    v.flags.joergensen_violated = joergensen_lhs(f, g) < 1.0 - 1e-12;
                    v
                }
                None => {
                    let value = e.pow(n).compose(o);
                    let mut v = PairVerdict::new(f, g, PairStatus::NotSemidiscrete);
                    v.certificate = Some(witness(word, value, c));
                    v.flags.undetermined = true;
                    v
                }
            };
        }
        entries.push(TraceEntry { word, trace: h.tr(), class: c.name().to_string() });
    }
    let mut v = PairVerdict::new(f, g, PairStatus::SemidiscreteGroupAndFree);
    v.certificate = Some(Certificate::TraceCertificate(TraceCertificate { elliptic_order: Some(m), entries }));
    v
}

/// Semidiscreteness without the inverse-free requirement.
pub fn classify_pair_semidiscrete(f: &Moebius, g: &Moebius, tol: &Tolerances, limits: &Limits) -> Result<PairVerdict> {
    classify_pair(f, g, tol, limits)
}

/// `|Tr(F)^2 - 4| + |Tr[F, G] - 2|`.
pub fn joergensen_lhs(f: &Moebius, g: &Moebius) -> f64 {
    let t = f.a() + f.d();
    (t * t - 4.0).abs() + (commutator_trace(f, g) - 2.0).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JoergensenReport {
    pub satisfied: bool,
    pub lhs: f64,
    pub has_common_contracted_interval: bool,
    pub interval: Option<Arc>,
}

pub fn joergensen_semigroup(f: &Moebius, g: &Moebius, tol: &Tolerances) -> JoergensenReport {
    let lhs = joergensen_lhs(f, g);
    let interval = common_contracted_interval(&[*f, *g], tol);
    JoergensenReport {
        satisfied: lhs >= 1.0 - 1e-12 || interval.is_some(),
        lhs,
        has_common_contracted_interval: interval.is_some(),
        interval,
    }
}

/// Fixed points of the non-elliptic generators followed by angular
/// midpoints, refined `levels` times. Sorted by angle.
pub fn candidate_points(gens: &[Moebius], tol: &Tolerances, levels: usize) -> Vec<BoundaryPoint> {
    let mut pts: Vec<BoundaryPoint> = Vec::new();
    for g in gens {
        if let Ok((a, b)) = g.fixed_points(tol) {
            pts.push(a);
            pts.push(b);
        }
    }
    if pts.is_empty() {
        return pts;
    }
    let mut angles: Vec<f64> = pts.iter().map(|p| p.angle()).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if angles.len() == 1 {
        angles.push((angles[0] + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI));
        angles.sort_by(f64::total_cmp);
    }
    let mut pts: Vec<BoundaryPoint> = Vec::new();
    for g in gens {
        if let Ok((a, b)) = g.fixed_points(tol) {
            for p in [a, b] {
                if !pts.iter().any(|q| q.approx_eq(&p, 1e-14)) {
                    pts.push(p);
                }
            }
        }
    }
    if pts.len() == 1 {
        pts.push(BoundaryPoint::from_angle(angles[1]));
    }
    for _ in 0..levels {
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
        let n = sorted.len();
        for i in 0..n {
            let a = &sorted[i];
            let b = &sorted[(i + 1) % n];
            let gap = if n == 1 { 2.0 * std::f64::consts::PI } else { offset(a, b) };
            pts.push(BoundaryPoint::from_angle(a.angle() + gap / 2.0));
        }
    }
    pts.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    pts
}

/// An arc sent into a proper subset of itself by every generator, searched
/// over arcs with endpoints in [`candidate_points`].
pub fn common_contracted_interval(gens: &[Moebius], tol: &Tolerances) -> Option<Arc> {
    let pts = candidate_points(gens, tol, 3);
    for p in &pts {
        for q in &pts {
            let Ok(j) = Arc::new(*p, *q) else { continue };
            if gens.iter().all(|g| j.image(g).properly_inside(&j, tol)) {
                return Some(j);
            }
        }
    }
    None
}

/// What a certificate check established.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checked: String,
}

/// Re-checks a verdict's certificate against its own generators.
pub fn verify_pair_verdict(v: &PairVerdict, tol: &Tolerances) -> VerifyReport {
    let [f, g] = v.generators;
    let report = |ok: bool, checked: &str| VerifyReport { ok, checked: checked.to_string() };
    match v.status {
        PairStatus::Borderline => report(true, "borderline verdict carries no claim"),
        PairStatus::Elementary => {
            let sub = v.elementary.as_ref().map(|e| e.subtype);
            let again = elementary_check(&f, &g, tol).ok().flatten();
            report(sub.is_some() && sub == again, "elementary configuration recomputed")
        }
        PairStatus::SemidiscreteInverseFree => match &v.certificate {
            Some(Certificate::Schottky(c)) => {
                let same_subs = c.word_substitution == v.substitutions;
                report(same_subs && c.verify(&f, &g, tol), "Schottky intervals re-verified")
            }
            _ => report(false, "missing Schottky certificate"),
        },
        PairStatus::NotSemidiscrete | PairStatus::RequiresGroupDiscreteness | PairStatus::SemidiscreteGroupAndFree => {
            match &v.certificate {
                Some(Certificate::EllipticWitness(w)) => {
                    let (a, b) = replay(&f, &g, &v.substitutions);
                    let ok = match w.word.eval(&[a, b]) {
                        Ok(val) => {
                            let c = val.classify(tol);
                            (c.is_elliptic() || c.is_identity()) && val.operator_distance(&w.value) <= 1e-6 * (1.0 + val.mat().max_abs())
                        }
                        Err(_) => false,
                    };
                    report(ok, "witness word re-evaluated")
                }
                Some(Certificate::TraceCertificate(t)) => {
                    let ok = t.entries.iter().all(|e| match e.word.eval(&[f, g]) {
                        Ok(val) => {
                            let c = val.classify(tol);
                            (val.tr() - e.trace).abs() <= 1e-9 * (1.0 + e.trace) && e.class.starts_with(c.name())
                        }
                        Err(_) => false,
                    });
                    report(ok, "traces of f^n g re-evaluated")
                }
                _ => report(false, "missing certificate"),
            }
        }
    }
}
