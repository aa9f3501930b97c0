//! Composition sequences, bounded word enumeration, limit-set sampling and
//! the continued-fraction family `z + lambda`, `z / (mu z + 1)`.

use crate::boundary::{BoundaryPoint, HalfPlanePoint};
use crate::error::{Error, Result};
use crate::mobius::{Mat2, Moebius, MoebiusClass};
use crate::tolerance::{Limits, Tolerances};
use crate::word::Word;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::PI;

/// A point of the closed half-plane as a unit-normalized pair `(u, w)`
/// standing for `u / w`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HomPoint {
    u: Complex64,
    w: Complex64,
}

impl HomPoint {
    /// `m(i)` for a matrix `m`.
    fn image_of_i(m: &Mat2) -> HomPoint {
        let u = Complex64::new(m.b, m.a);
        let w = Complex64::new(m.d, m.c);
        let n = (u.norm_sqr() + w.norm_sqr()).sqrt();
        HomPoint { u: u / n, w: w / n }
    }

    fn chordal(&self, o: &HomPoint) -> f64 {
        2.0 * (self.u * o.w - o.u * self.w).norm()
    }

    /// The boundary point directly below, `Re(u conj w) / |w|^2`.
    fn shadow(&self) -> BoundaryPoint {
        BoundaryPoint::from_homogeneous((self.u * self.w.conj()).re, self.w.norm_sqr()).unwrap_or(BoundaryPoint::INFINITY)
    }

    fn finite(&self) -> Option<HalfPlanePoint> {
        let z = self.u / self.w;
        if z.re.is_finite() && z.im.is_finite() && z.im > 0.0 {
            Some(HalfPlanePoint { x: z.re, y: z.im })
        } else {
            None
        }
    }
}

/// The left product `F_n = f_1 ... f_n` of a composition sequence and the
/// recent history of the orbit `F_n(i)`.
///
/// The product is kept as `exp(log_scale) * m` with `m` of unit max-entry, so
/// long products neither overflow nor lose their determinant.
#[derive(Debug, Clone)]
pub struct CompositionState {
    pub n: u64,
    m: Mat2,
    log_scale: f64,
    orbit: HomPoint,
    history: VecDeque<HomPoint>,
    capacity: usize,
}

impl CompositionState {
    pub fn new(history: usize) -> CompositionState {
        let m = Mat2::IDENTITY;
        let orbit = HomPoint::image_of_i(&m);
        let mut h = VecDeque::with_capacity(history.max(1));
        h.push_back(orbit);
        CompositionState { n: 0, m, log_scale: 0.0, orbit, history: h, capacity: history.max(1) }
    }

    pub fn step(&mut self, f: &Moebius) {
        let p = self.m.mul(&f.mat());
        let s = p.max_abs();
        self.m = p.scale(1.0 / s);
        self.log_scale += s.ln();
        self.n += 1;
        self.orbit = HomPoint::image_of_i(&self.m);
        if self.history.len() == self.capacity {
            self.history.pop_front();
        }
        self.history.push_back(self.orbit);
    }

    /// The state after one more step, leaving `self` untouched.
    pub fn stepped(&self, f: &Moebius) -> CompositionState {
        let mut s = self.clone();
        s.step(f);
        s
    }

    /// `F_n`. The determinant of the stored matrix underflows once the
    /// product is large, so the scale is restored directly when it fits.
    pub fn product(&self) -> Moebius {
        let k = self.log_scale.exp();
        let m = self.m.scale(k);
        if k.is_finite() && m.max_abs().is_finite() {
            Moebius::sign_normalized(m.a, m.b, m.c, m.d)
        } else {
            Moebius::from_mat(&self.m).unwrap_or(Moebius::IDENTITY)
        }
    }

    /// `F_n(i)`, or `None` once it is numerically on the boundary.
    pub fn orbit(&self) -> Option<HalfPlanePoint> {
        self.orbit.finite()
    }

    /// The boundary point below the orbit.
    pub fn shadow(&self) -> BoundaryPoint {
        self.orbit.shadow()
    }

    /// Hyperbolic distance from `i` to `F_n(i)`, from `cosh rho = |F|^2 / 2`.
    pub fn rho(&self) -> f64 {
        let m = &self.m;
        let x = 2.0 * self.log_scale + (m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d).ln() - 2f64.ln();
        if x < 20.0 {
            x.exp().max(1.0).acosh()
        } else {
            x + 2f64.ln()
        }
    }

    /// Largest chordal distance from the current orbit point to the points
    /// in the history window.
    pub fn oscillation(&self) -> f64 {
        self.history.iter().fold(0.0f64, |m, p| m.max(p.chordal(&self.orbit)))
    }

    pub fn chordal_to(&self, z: &HalfPlanePoint) -> f64 {
        let p = HomPoint::image_of_i(&Moebius::new(z.y.sqrt(), z.x / z.y.sqrt(), 0.0, 1.0 / z.y.sqrt()).map(|h| h.mat()).unwrap_or(Mat2::IDENTITY));
        p.chordal(&self.orbit)
    }
}

/// Where the digits of a composition sequence come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum DigitStream {
    /// The listed digits once.
    Explicit { digits: Vec<usize> },
    /// The listed digits repeated.
    Periodic { digits: Vec<usize> },
    /// Uniform digits from ChaCha8 seeded with `seed_from_u64(seed)`.
    Seeded { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    IdealConvergence { limit: BoundaryPoint },
    /// Far from `i` over the whole window, but the shadow still wanders.
    EscapingNoLimit,
    NotEscaping,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceReport {
    pub outcome: Outcome,
    pub steps_used: u64,
    /// `rho(i, F_n(i))` at the last step.
    pub rho: f64,
    /// Chordal oscillation over the history window at the last step.
    pub oscillation: f64,
    pub recurrence: bool,
    pub seed: Option<u64>,
}

/// Shadow movement beyond which a distant orbit counts as wandering.
const WANDER: f64 = 0.1;

/// Runs one composition sequence and classifies the orbit of `i`.
pub fn run_sequence(
    gens: &[Moebius],
    digits: &DigitStream,
    max_steps: u64,
    tol: &Tolerances,
    limits: &Limits,
) -> Result<ConvergenceReport> {
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = gens.len();
    let mut rng = match digits {
        DigitStream::Seeded { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let list: &[usize] = match digits {
        DigitStream::Explicit { digits } | DigitStream::Periodic { digits } => digits,
        DigitStream::Seeded { .. } => &[],
    };
    if list.iter().any(|&d| d >= k) {
        return Err(Error::NotApplicable);
    }
    let steps = match digits {
        DigitStream::Explicit { digits } => (digits.len() as u64).min(max_steps),
        DigitStream::Periodic { digits } if digits.is_empty() => 0,
        _ => max_steps,
    };
    let mut state = CompositionState::new(limits.history);
    let mut cells: HashMap<(i64, i64), HalfPlanePoint> = HashMap::new();
    let mut recurrence = false;
    let mut min_rho_window = VecDeque::with_capacity(limits.history);
    record_cell(&mut cells, &state, tol, limits, &mut recurrence);
    for n in 0..steps {
        let d = match &mut rng {
            Some(r) => r.gen_range(0..k),
            None => list[(n as usize) % list.len()],
        };
        state.step(&gens[d]);
        let rho = state.rho();
        if min_rho_window.len() == limits.history.max(1) {
            min_rho_window.pop_front();
        }
        min_rho_window.push_back(rho);
        if rho <= tol.rho_min {
            record_cell(&mut cells, &state, tol, limits, &mut recurrence);
        }
    }
    let rho = state.rho();
    let osc = state.oscillation();
    let window_far = min_rho_window.iter().all(|&r| r >= tol.rho_min) && state.n as usize >= limits.history;
    let outcome = if rho >= tol.rho_min && osc <= tol.conv && state.n as usize >= limits.history {
        Outcome::IdealConvergence { limit: state.shadow() }
    } else if rho <= tol.rho_min && recurrence {
        Outcome::NotEscaping
    } else if window_far && osc > WANDER {
        Outcome::EscapingNoLimit
    } else {
        Outcome::Undecided
    };
    let seed = match digits {
        DigitStream::Seeded { seed } => Some(*seed),
        _ => None,
    };
    Ok(ConvergenceReport { outcome, steps_used: state.n, rho, oscillation: osc, recurrence, seed })
}

fn record_cell(
    cells: &mut HashMap<(i64, i64), HalfPlanePoint>,
    state: &CompositionState,
    tol: &Tolerances,
    limits: &Limits,
    recurrence: &mut bool,
) {
    let Some(z) = state.orbit() else { return };
    let s = tol.rec;
    let key = ((z.x / s).floor() as i64, (z.y / s).floor() as i64);
    if !*recurrence {
        'outer: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(p) = cells.get(&(key.0 + dx, key.1 + dy)) {
                    if (p.x - z.x).hypot(p.y - z.y) <= s {
                        *recurrence = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    if cells.len() < limits.rec_cells {
        cells.entry(key).or_insert(z);
    }
}

/// Every digit sequence of length `depth`, in lexicographic order.
pub fn run_tree(gens: &[Moebius], depth: u32, tol: &Tolerances, limits: &Limits) -> Result<Vec<ConvergenceReport>> {
    let k = gens.len();
    if k == 0 {
        return Err(Error::EmptyInput);
    }
    let count = (k as f64).powi(depth as i32);
    if count > limits.word_cap as f64 {
        return Err(Error::CapExceeded(limits.word_cap));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0usize; depth as usize];
    loop {
        out.push(run_sequence(gens, &DigitStream::Explicit { digits: digits.clone() }, depth as u64, tol, limits)?);
        let mut i = depth as usize;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < k {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordEntry {
    pub value: Moebius,
    pub class: MoebiusClass,
    pub length: u32,
    parent: u32,
    letter: u8,
}

const ROOT: u32 = u32::MAX;

/// Distinct values of the words of length at most `L`, with one witness word
/// each, grouped by the length at which each value first appears.
#[derive(Debug, Clone)]
pub struct WordTable {
    pub gens: Vec<Moebius>,
    entries: Vec<WordEntry>,
    levels: Vec<std::ops::Range<usize>>,
}

/// Rounded entries of a lift whose first clearly nonzero entry is positive.
fn dedup_key(f: &Moebius, delta: f64) -> [i64; 4] {
    let e = f.entries();
    let sign = e.iter().find(|x| x.abs() > 1e-6).map(|x| x.signum()).unwrap_or(1.0);
    let r = |x: f64| {
        let v = (sign * x / delta).round();
        v.clamp(i64::MIN as f64, i64::MAX as f64) as i64
    };
    [r(e[0]), r(e[1]), r(e[2]), r(e[3])]
}

impl WordTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[WordEntry] {
        &self.entries
    }

    /// Values first reached by a word of length `l`, for `1 <= l <= L`.
    pub fn by_length(&self, l: usize) -> &[WordEntry] {
        match self.levels.get(l.wrapping_sub(1)) {
            Some(r) => &self.entries[r.clone()],
            None => &[],
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The stored witness word of entry `i`.
    pub fn witness(&self, i: usize) -> Word {
        let mut letters = Vec::new();
        let mut j = i as u32;
        while j != ROOT {
            let e = &self.entries[j as usize];
            letters.push(e.letter);
            j = e.parent;
        }
        letters.reverse();
        Word::from_letters(&letters)
    }
}

/// Breadth-first enumeration with deduplication on a rounding grid. The cap
/// bounds the number of products evaluated.
pub fn enumerate_words(gens: &[Moebius], depth: usize, tol: &Tolerances, limits: &Limits) -> Result<WordTable> {
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    if depth == 0 {
        return Err(Error::NotApplicable);
    }
    let mut seen: HashSet<[i64; 4]> = HashSet::new();
    let mut entries: Vec<WordEntry> = Vec::new();
    let mut levels = Vec::new();
    let mut evaluated = 0usize;
    let mut frontier: Vec<Option<u32>> = vec![None];
    for l in 1..=depth {
        let start = entries.len();
        for parent in &frontier {
            for (k, g) in gens.iter().enumerate() {
                evaluated += 1;
                if evaluated > limits.word_cap {
                    return Err(Error::CapExceeded(limits.word_cap));
                }
                let value = match parent {
                    Some(p) => entries[*p as usize].value.compose(g),
                    None => *g,
                };
                if seen.insert(dedup_key(&value, tol.dedup)) {
                    entries.push(WordEntry {
                        value,
                        class: value.classify(tol),
                        length: l as u32,
                        parent: parent.unwrap_or(ROOT),
                        letter: k as u8,
                    });
                }
            }
        }
        levels.push(start..entries.len());
        frontier = (start..entries.len()).map(|i| Some(i as u32)).collect();
        if frontier.is_empty() {
            // the table closed up; deeper levels add nothing
            break;
        }
    }
    Ok(WordTable { gens: gens.to_vec(), entries, levels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    Elliptic,
    Identity,
    NearIdentity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleWitness {
    pub kind: WitnessKind,
    pub word: Word,
    pub value: Moebius,
    pub class: MoebiusClass,
    /// Distance from the value to the identity.
    pub distance: f64,
}

/// First word, in breadth-first order, whose value is elliptic, the
/// identity, or within `tol.near` of the identity. `None` is evidence at
/// this depth only.
pub fn oracle_refute(gens: &[Moebius], depth: usize, tol: &Tolerances, limits: &Limits) -> Result<Option<OracleWitness>> {
    let table = enumerate_words(gens, depth, tol, limits)?;
    Ok(scan_table(&table, tol, true))
}

pub fn scan_table(table: &WordTable, tol: &Tolerances, near: bool) -> Option<OracleWitness> {
    for (i, e) in table.entries.iter().enumerate() {
        let distance = e.value.operator_distance(&Moebius::IDENTITY);
        let kind = match e.class {
            MoebiusClass::Identity => Some(WitnessKind::Identity),
            MoebiusClass::Elliptic { .. } => Some(WitnessKind::Elliptic),
            _ if near && distance <= tol.near => Some(WitnessKind::NearIdentity),
            _ => None,
        };
        if let Some(kind) = kind {
            return Some(OracleWitness { kind, word: table.witness(i), value: e.value, class: e.class, distance });
        }
    }
    None
}

/// Only elliptic hits, for elliptic-locus searches.
pub fn scan_elliptic(table: &WordTable) -> Option<OracleWitness> {
    table.entries.iter().enumerate().find(|(_, e)| e.class.is_elliptic()).map(|(i, e)| OracleWitness {
        kind: WitnessKind::Elliptic,
        word: table.witness(i),
        value: e.value,
        class: e.class,
        distance: e.value.operator_distance(&Moebius::IDENTITY),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSetSample {
    pub points: Vec<BoundaryPoint>,
    /// For each point, the word over the sampled alphabet whose attracting
    /// fixed point it is. Backward words are over the inverse generators.
    pub words: Vec<Word>,
    pub side: Side,
    pub depth: usize,
}

/// Attracting fixed points of hyperbolic words (forward), or of words in
/// the inverse generators (backward), sorted by circle angle.
pub fn sample_limit_set(gens: &[Moebius], side: Side, depth: usize, tol: &Tolerances, limits: &Limits) -> Result<LimitSetSample> {
    let alphabet: Vec<Moebius> = match side {
        Side::Forward => gens.to_vec(),
        Side::Backward => gens.iter().map(|g| g.inverse()).collect(),
    };
    let table = enumerate_words(&alphabet, depth, tol, limits)?;
    let mut pts: Vec<(f64, BoundaryPoint, Word)> = Vec::new();
    for (i, e) in table.entries.iter().enumerate() {
        if let MoebiusClass::Hyperbolic { attracting, .. } = e.class {
            pts.push((attracting.angle(), attracting, table.witness(i)));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.1.approx_eq(&b.1, 1e-13));
    let (points, words) = pts.into_iter().map(|(_, p, w)| (p, w)).unzip();
    Ok(LimitSetSample { points, words, side, depth })
}

fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

impl LimitSetSample {
    /// Rows `t,angle,x,y` with `t` either a number or `inf`; `(x, y)` is the
    /// point on the unit circle.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("side,t,angle,x,y\n");
        let side = match self.side {
            Side::Forward => "forward",
            Side::Backward => "backward",
        };
        for p in &self.points {
            let t = match p.t() {
                Some(t) => fmt17(t),
                None => "inf".to_string(),
            };
            let (x, y) = p.disc();
            s.push_str(&format!("{side},{t},{},{},{}\n", fmt17(p.angle()), fmt17(x), fmt17(y)));
        }
        s
    }
}

/// Unit-disc picture of one or more samples: forward points in one colour,
/// backward in another.
pub fn limit_set_svg(samples: &[LimitSetSample]) -> String {
    let size = 400.0;
    let c = size / 2.0;
    let r = 0.45 * size;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n\
         <circle cx=\"{c}\" cy=\"{c}\" r=\"{r}\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n"
    );
    for sample in samples {
        let colour = match sample.side {
            Side::Forward => "#c0392b",
            Side::Backward => "#2471a3",
        };
        for p in &sample.points {
            let (x, y) = p.disc();
            s.push_str(&format!(
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"2\" fill=\"{colour}\"/>\n",
                c + r * x,
                c - r * y
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Chordal Hausdorff distance between two finite boundary sets.
pub fn hausdorff(a: &[BoundaryPoint], b: &[BoundaryPoint]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { 2.0 };
    }
    one_sided(a, b).max(one_sided(b, a))
}

fn one_sided(a: &[BoundaryPoint], b: &[BoundaryPoint]) -> f64 {
    let mut angles: Vec<f64> = b.iter().map(|p| p.angle()).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let mut worst: f64 = 0.0;
    for p in a {
        let t = p.angle();
        let i = angles.partition_point(|&x| x < t);
        let mut best = f64::INFINITY;
        for j in [i % n, (i + n - 1) % n] {
            let d = (angles[j] - t).abs();
            let d = d.min(2.0 * PI - d);
            best = best.min(2.0 * (d / 2.0).sin());
        }
        worst = worst.max(best);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CfReport {
    pub lambda: f64,
    pub mu: f64,
    pub lambda_mu: f64,
    /// Every composition sequence of `z + lambda`, `z/(mu z + 1)` converges
    /// ideally.
    pub verdict: bool,
    pub witness: Option<Word>,
    pub witness_trace: Option<f64>,
    pub witness_class: Option<MoebiusClass>,
}

/// `f(z) = z + lambda` and `g(z) = z / (mu z + 1)`.
pub fn cf_generators(lambda: f64, mu: f64) -> [Moebius; 2] {
    [Moebius::translation(lambda), Moebius::new(1.0, 0.0, mu, 1.0).expect("unit determinant")]
}

/// The lift of `fg` is `[[1 + lambda mu, lambda], [mu, 1]]` with trace
/// `2 + lambda mu`, elliptic exactly when `-4 < lambda mu < 0`.
pub fn continued_fraction_check(lambda: f64, mu: f64, tol: &Tolerances) -> CfReport {
    let p = lambda * mu;
    let verdict = p > 0.0 || p <= -4.0;
    let [f, g] = cf_generators(lambda, mu);
    let mut r = CfReport { lambda, mu, lambda_mu: p, verdict, witness: None, witness_trace: None, witness_class: None };
    if !verdict {
        let (word, value) = if lambda == 0.0 {
            (Word::letter(0), f)
        } else if mu == 0.0 {
            (Word::letter(1), g)
        } else {
            (Word::from_letters(&[0, 1]), f.compose(&g))
        };
        r.witness_trace = Some(value.a() + value.d());
        r.witness_class = Some(value.classify(tol));
        r.witness = Some(word);
    }
    r
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

    fn dil(k: f64) -> Moebius {
        Moebius::dilation(k).unwrap()
    }

    #[test]
    fn step_examples() {
        let f = Moebius::translation(3.0);
        let s = CompositionState::new(8).stepped(&f);
        let z = s.orbit().unwrap();
        assert!((z.x - 3.0).abs() < 1e-12 && (z.y - 1.0).abs() < 1e-12);

        let mut s = CompositionState::new(8);
        for _ in 0..10 {
            s.step(&dil(0.5));
        }
        let z = s.orbit().unwrap();
        assert!((z.y - 1.0 / 1024.0).abs() < 1e-15);
        assert!((s.rho() - 10.0 * 2f64.ln()).abs() < 1e-9);

        let g = Moebius::affine(0.5, 1.0).unwrap();
        for n in [3u32, 6, 10] {
            let mut s = CompositionState::new(8);
            for _ in 0..n {
                s.step(&g);
            }
            for _ in 0..n {
                s.step(&dil(2.0));
            }
            let target = HalfPlanePoint { x: 2.0, y: 1.0 };
            assert!(s.chordal_to(&target) <= 2f64.powi(1 - n as i32) + 1e-12);
        }
    }

    #[test]
    fn long_products_keep_rho() {
        let mut s = CompositionState::new(4);
        for _ in 0..5000 {
            s.step(&dil(4.0));
        }
        assert!((s.rho() - 5000.0 * 4f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn run_examples() {
        let (tol, lim) = (t(), l());
        let r = run_sequence(&[Moebius::translation(1.0)], &DigitStream::Seeded { seed: 1 }, 20_000, &tol, &lim).unwrap();
        match r.outcome {
            Outcome::IdealConvergence { limit } => assert!(limit.is_infinity() || limit.chordal(&BoundaryPoint::INFINITY) < 1e-3),
            o => panic!("{o:?}"),
        }
        let cf = cf_generators(1.0, 1.0);
        for seed in 0..5 {
            let r = run_sequence(&cf, &DigitStream::Seeded { seed }, 10_000, &tol, &lim).unwrap();
            assert!(matches!(r.outcome, Outcome::IdealConvergence { .. }), "{r:?}");
            assert_eq!(r.seed, Some(seed));
        }
        let f = dil(2.0);
        let r = run_sequence(&[f, f.inverse()], &DigitStream::Periodic { digits: vec![0, 1] }, 1000, &tol, &lim).unwrap();
        assert_eq!(r.outcome, Outcome::NotEscaping);
    }

    #[test]
    fn incremental_product_matches_word() {
        let gens = [Moebius::new(2.0, 1.0, 1.0, 1.0).unwrap(), Moebius::new(1.0, -1.0, 1.0, 0.0).unwrap()];
        let digits = [0usize, 1, 1, 0, 1, 0, 0, 1];
        let mut s = CompositionState::new(4);
        for &d in &digits {
            s.step(&gens[d]);
        }
        let w = Word::from_letters(&digits.iter().map(|&d| d as u8).collect::<Vec<_>>()).eval(&gens).unwrap();
        assert!(s.product().operator_distance(&w) < 1e-9);
    }

    #[test]
    fn tree_runs_every_sequence() {
        let r = run_tree(&[dil(2.0), dil(0.5)], 3, &t(), &l()).unwrap();
        assert_eq!(r.len(), 8);
    }

    #[test]
    fn table_examples() {
        let (tol, lim) = (t(), l());
        let tab = enumerate_words(&[Moebius::translation(1.0)], 5, &tol, &lim).unwrap();
        assert_eq!(tab.len(), 5);
        assert!(tab.entries().iter().all(|e| e.class.is_parabolic()));

        let tab = enumerate_words(&[dil(2.0), dil(0.5)], 4, &tol, &lim).unwrap();
        // 2^k z for -4 <= k <= 4 by shortest word
        assert_eq!(tab.len(), 9);
        assert_eq!(tab.by_length(4).len(), 2);
        for (i, e) in tab.entries().iter().enumerate() {
            let w = tab.witness(i);
            assert_eq!(w.len() as u32, e.length);
            assert!(w.eval(&tab.gens).unwrap().operator_distance(&e.value) < 1e-12);
        }
        assert!(matches!(enumerate_words(&[dil(2.0), dil(3.0)], 30, &tol, &Limits { word_cap: 100, ..lim }), Err(Error::CapExceeded(100))));
    }

    #[test]
    fn oracle_examples() {
        let (tol, lim) = (t(), l());
        let w = oracle_refute(&cf_generators(1.0, -1.0), 4, &tol, &lim).unwrap().unwrap();
        assert_eq!(w.word.to_string(), "FG");
        assert_eq!(w.kind, WitnessKind::Elliptic);
        assert!((w.value.tr() - 1.0).abs() < 1e-12);

        let w = oracle_refute(&[dil(2.0), dil(1.0 / 2.0005)], 4, &tol, &lim).unwrap().unwrap();
        assert_eq!(w.kind, WitnessKind::NearIdentity);
        assert_eq!(w.word.len(), 2);

        assert!(oracle_refute(&[Moebius::translation(2.0), Moebius::translation(3.0)], 10, &tol, &lim).unwrap().is_none());
    }

    #[test]
    fn limit_set_examples() {
        let (tol, lim) = (t(), l());
        let fw = sample_limit_set(&[dil(2.0)], Side::Forward, 3, &tol, &lim).unwrap();
        assert_eq!(fw.points.len(), 1);
        assert!(fw.points[0].is_infinity());
        let bw = sample_limit_set(&[dil(2.0)], Side::Backward, 3, &tol, &lim).unwrap();
        assert!(bw.points[0].approx_eq(&BoundaryPoint::real(0.0), 1e-12));

        let gens = [dil(2.0), Moebius::affine(0.5, 1.0).unwrap()];
        let fw = sample_limit_set(&gens, Side::Forward, 10, &tol, &lim).unwrap();
        for p in &fw.points {
            // both maps preserve [0, inf]
            let t = p.t_or_inf();
            assert!(t.is_infinite() || t >= -1e-9, "{t}");
        }
        let csv = fw.to_csv();
        assert!(csv.starts_with("side,t,angle,x,y\n"));
        assert!(limit_set_svg(&[fw]).starts_with("<svg"));
    }

    #[test]
    fn hausdorff_basics() {
        let a = [BoundaryPoint::real(0.0)];
        let b = [BoundaryPoint::INFINITY];
        assert!((hausdorff(&a, &b) - 2.0).abs() < 1e-12);
        assert_eq!(hausdorff(&a, &a), 0.0);
        let c = [BoundaryPoint::real(0.0), BoundaryPoint::INFINITY];
        assert!((hausdorff(&a, &c) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cf_examples() {
        let tol = t();
        assert!(continued_fraction_check(1.0, 1.0, &tol).verdict);
        let r = continued_fraction_check(1.0, -1.0, &tol);
        assert!(!r.verdict);
        assert_eq!(r.witness.unwrap().to_string(), "FG");
        assert!((r.witness_trace.unwrap() - 1.0).abs() < 1e-15);
        assert!(continued_fraction_check(2.0, -2.0, &tol).verdict);
        let r = continued_fraction_check(0.0, 3.0, &tol);
        assert_eq!(r.witness.unwrap().to_string(), "F");
    }
}
