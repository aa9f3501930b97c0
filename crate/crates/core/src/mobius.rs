//! Real Möbius transformations as unit-determinant matrices up to sign.

use crate::boundary::{BoundaryPoint, HalfPlanePoint};
use crate::error::{Error, Result};
use crate::rational;
use crate::tolerance::Tolerances;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A raw real 2x2 matrix with no normalization. Used for signed traces and
/// for orientation-reversing reflections of the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// The adjugate, which is the inverse for unit determinant.
    pub fn adjugate(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2 { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Action on homogeneous coordinates. `None` only for a singular matrix
    /// hitting its kernel.
    pub fn apply(&self, p: &BoundaryPoint) -> Option<BoundaryPoint> {
        let (x, y) = (p.x(), p.y());
        BoundaryPoint::from_homogeneous(self.a * x + self.b * y, self.c * x + self.d * y)
    }

    /// Real eigenvectors as boundary points, ordered by decreasing
    /// eigenvalue. `None` if the eigenvalues are not real and distinct.
    pub fn real_eigenvectors(&self) -> Option<(BoundaryPoint, BoundaryPoint)> {
        let t = self.trace();
        let disc = t * t - 4.0 * self.det();
        if !(disc > 0.0) {
            return None;
        }
        let s = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = if t >= 0.0 { (t + s) / 2.0 } else { (t - s) / 2.0 };
        let small = self.det() / big;
        let (l1, l2) = if big > small { (big, small) } else { (small, big) };
        Some((self.eigenvector(l1)?, self.eigenvector(l2)?))
    }

    fn eigenvector(&self, lambda: f64) -> Option<BoundaryPoint> {
        let v1 = (self.b, lambda - self.a);
        let v2 = (lambda - self.d, self.c);
        if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) {
            BoundaryPoint::from_homogeneous(v1.0, v1.1)
        } else {
            BoundaryPoint::from_homogeneous(v2.0, v2.1)
        }
    }
}

/// A real Möbius transformation `z -> (az+b)/(cz+d)` with `ad - bc = 1`,
/// normalized so that `a + d >= 0` (and, when `a + d = 0`, the first
/// nonzero of `a, b, c` is positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Serialize for Moebius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c, self.d].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Moebius {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 4]>::deserialize(d)?;
        Moebius::new(v[0], v[1], v[2], v[3]).map_err(serde::de::Error::custom)
    }
}

impl Moebius {
    pub const IDENTITY: Moebius = Moebius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds the map from any matrix with positive finite determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Moebius> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() || ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::BadDeterminant(det));
        }
        let s = 1.0 / det.sqrt();
        Ok(Moebius::sign_normalized(a * s, b * s, c * s, d * s))
    }

    /// Like [`Moebius::new`] but rescales by the largest entry first, which
    /// keeps long products from overflowing.
    pub fn from_mat(m: &Mat2) -> Result<Moebius> {
        let k = m.max_abs();
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::BadDeterminant(m.det()));
        }
        let m = m.scale(1.0 / k);
        Moebius::new(m.a, m.b, m.c, m.d)
    }

    pub(crate) fn sign_normalized(a: f64, b: f64, c: f64, d: f64) -> Moebius {
        let t = a + d;
        let flip = if t != 0.0 {
            t < 0.0
        } else {
            let first = [a, b, c].into_iter().find(|v| *v != 0.0).unwrap_or(0.0);
            first < 0.0
        };
        if flip {
            Moebius { a: -a, b: -b, c: -c, d: -d }
        } else {
            Moebius { a, b, c, d }
        }
    }

    /// `z -> z + b`.
    pub fn translation(b: f64) -> Moebius {
        Moebius { a: 1.0, b, c: 0.0, d: 1.0 }
    }

    /// `z -> k z` for `k > 0`.
    pub fn dilation(k: f64) -> Result<Moebius> {
        if !(k > 0.0) {
            return Err(Error::NonpositiveInput(k));
        }
        Moebius::new(k, 0.0, 0.0, 1.0)
    }

    /// `z -> k z + b` for `k > 0`.
    pub fn affine(k: f64, b: f64) -> Result<Moebius> {
        if !(k > 0.0) {
            return Err(Error::NonpositiveInput(k));
        }
        Moebius::new(k, b, 0.0, 1.0)
    }

    /// Rotation about `i` by angle `2 theta`.
    pub fn rotation(theta: f64) -> Moebius {
        let (s, c) = theta.sin_cos();
        Moebius::sign_normalized(c, -s, s, c)
    }

    /// The map sending `p` to 0 and `q` to infinity, with `p != q`.
    pub fn sending_to_zero_infinity(p: &BoundaryPoint, q: &BoundaryPoint) -> Result<Moebius> {
        let m = Mat2::new(p.y(), -p.x(), q.y(), -q.x());
        let m = if m.det() < 0.0 { Mat2::new(-m.a, -m.b, m.c, m.d) } else { m };
        if m.det().abs() < 1e-300 {
            return Err(Error::SharedFixedPoint);
        }
        Moebius::new(m.a, m.b, m.c, m.d)
    }

    /// A rotation of the disc sending `p` to infinity.
    pub fn sending_to_infinity(p: &BoundaryPoint) -> Moebius {
        Moebius::sign_normalized(p.x(), p.y(), -p.y(), p.x())
    }

    /// A map sending the half-plane point `z` to `i`.
    pub fn sending_to_i(z: &HalfPlanePoint) -> Moebius {
        let s = z.y.sqrt();
        Moebius::sign_normalized(1.0 / s, -z.x / s, 0.0, s)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn mat(&self) -> Mat2 {
        Mat2::new(self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `|a + d|`.
    pub fn tr(&self) -> f64 {
        (self.a + self.d).abs()
    }

    /// `z -> f(g(z))`.
    pub fn compose(&self, g: &Moebius) -> Moebius {
        // The product of unit-determinant matrices is unimodular already.
        // Rescaling by the computed determinant would import its cancellation
        // error, which is large once entries grow.
        let m = self.mat().mul(&g.mat());
        Moebius::sign_normalized(m.a, m.b, m.c, m.d)
    }

    pub fn inverse(&self) -> Moebius {
        Moebius::sign_normalized(self.d, -self.b, -self.c, self.a)
    }

    /// `h f h^{-1}`.
    pub fn conjugate_by(&self, h: &Moebius) -> Moebius {
        h.compose(self).compose(&h.inverse())
    }

    /// Conjugation by the reflection `z -> -z`.
    pub fn mirrored(&self) -> Moebius {
        Moebius::sign_normalized(self.a, -self.b, -self.c, self.d)
    }

    /// `f^n` for `n >= 0` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Moebius {
        let mut base = *self;
        let mut acc = Moebius::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        acc
    }

    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        // a unit-determinant matrix has trivial kernel
        self.mat().apply(p).unwrap_or(BoundaryPoint::INFINITY)
    }

    pub fn apply_real(&self, t: f64) -> BoundaryPoint {
        self.apply_boundary(&BoundaryPoint::real(t))
    }

    pub fn apply_halfplane(&self, w: &HalfPlanePoint) -> HalfPlanePoint {
        // (a z + b)/(c z + d) = ((a z + b)(c conj z + d)) / |c z + d|^2
        let (x, y) = (w.x, w.y);
        let nr = self.a * x + self.b;
        let ni = self.a * y;
        let dr = self.c * x + self.d;
        let di = self.c * y;
        let den = dr * dr + di * di;
        let re = (nr * dr + ni * di) / den;
        let im = y / den;
        HalfPlanePoint { x: re, y: im }
    }

    /// Distance between matrix lifts: the smaller over the sign choice of the
    /// largest entrywise difference.
    pub fn operator_distance(&self, g: &Moebius) -> f64 {
        let p = [self.a - g.a, self.b - g.b, self.c - g.c, self.d - g.d];
        let m = [self.a + g.a, self.b + g.b, self.c + g.c, self.d + g.d];
        let mx = |v: [f64; 4]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        mx(p).min(mx(m))
    }

    pub fn is_identity(&self, tol: &Tolerances) -> bool {
        self.operator_distance(&Moebius::IDENTITY) <= tol.id
    }

    pub fn classify(&self, tol: &Tolerances) -> MoebiusClass {
        classify(self, tol)
    }

    pub fn fixed_points(&self, tol: &Tolerances) -> Result<(BoundaryPoint, BoundaryPoint)> {
        fixed_points(self, tol)
    }
}

/// Classification by trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MoebiusClass {
    Identity,
    Elliptic {
        /// Half the rotation angle, in `(0, pi)`.
        angle: f64,
        /// `None` when the order is infinite or could not be determined.
        order: Option<u64>,
    },
    Parabolic {
        fixed: BoundaryPoint,
        /// The trace was within the parabolic band but not exactly 2.
        borderline: bool,
    },
    Hyperbolic {
        attracting: BoundaryPoint,
        repelling: BoundaryPoint,
        #[serde(rename = "translationLength")]
        translation_length: f64,
    },
}

impl MoebiusClass {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, MoebiusClass::Elliptic { .. })
    }
    pub fn is_parabolic(&self) -> bool {
        matches!(self, MoebiusClass::Parabolic { .. })
    }
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, MoebiusClass::Hyperbolic { .. })
    }
    pub fn is_identity(&self) -> bool {
        matches!(self, MoebiusClass::Identity)
    }
    pub fn is_borderline(&self) -> bool {
        matches!(self, MoebiusClass::Parabolic { borderline: true, .. })
    }
    /// Finite order of an elliptic, if known.
    pub fn elliptic_order(&self) -> Option<u64> {
        match self {
            MoebiusClass::Elliptic { order, .. } => *order,
            _ => None,
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            MoebiusClass::Identity => "Identity",
            MoebiusClass::Elliptic { .. } => "Elliptic",
            MoebiusClass::Parabolic { .. } => "Parabolic",
            MoebiusClass::Hyperbolic { .. } => "Hyperbolic",
        }
    }
}

pub fn classify(f: &Moebius, tol: &Tolerances) -> MoebiusClass {
    if f.is_identity(tol) {
        return MoebiusClass::Identity;
    }
    let t = f.tr();
    if t < 2.0 - tol.cls {
        let base = (t / 2.0).clamp(-1.0, 1.0).acos();
        let angle = if f.c > 0.0 { base } else { PI - base };
        let order = rational::reconstruct(angle / PI, tol.qmax, tol.ord).map(|(_, q)| q);
        return MoebiusClass::Elliptic { angle, order };
    }
    if t > 2.0 + tol.cls {
        let m = f.mat();
        let (attracting, repelling) = m.real_eigenvectors().unwrap_or((BoundaryPoint::INFINITY, BoundaryPoint::INFINITY));
        let lam = (t + (t * t - 4.0).sqrt()) / 2.0;
        return MoebiusClass::Hyperbolic { attracting, repelling, translation_length: 2.0 * lam.ln() };
    }
    MoebiusClass::Parabolic { fixed: parabolic_fixed_point(f), borderline: t != 2.0 }
}

fn parabolic_fixed_point(f: &Moebius) -> BoundaryPoint {
    let v1 = (f.b, 1.0 - f.a);
    let v2 = (1.0 - f.d, f.c);
    let v = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
    BoundaryPoint::from_homogeneous(v.0, v.1).unwrap_or(BoundaryPoint::INFINITY)
}

/// Attracting and repelling fixed points; a parabolic map returns its fixed
/// point twice.
pub fn fixed_points(f: &Moebius, tol: &Tolerances) -> Result<(BoundaryPoint, BoundaryPoint)> {
    match classify(f, tol) {
        MoebiusClass::Hyperbolic { attracting, repelling, .. } => Ok((attracting, repelling)),
        MoebiusClass::Parabolic { fixed, .. } => Ok((fixed, fixed)),
        _ => Err(Error::NotApplicable),
    }
}

/// The fixed point in the upper half-plane of an elliptic map.
pub fn elliptic_fixed_point(f: &Moebius) -> Option<HalfPlanePoint> {
    let t = f.a + f.d;
    let disc = 4.0 - t * t;
    if !(disc > 0.0) || f.c == 0.0 {
        return None;
    }
    HalfPlanePoint::new((f.a - f.d) / (2.0 * f.c), disc.sqrt() / (2.0 * f.c.abs()))
}

pub fn compose(f: &Moebius, g: &Moebius) -> Moebius {
    f.compose(g)
}

pub fn inverse(f: &Moebius) -> Moebius {
    f.inverse()
}

pub fn tr(f: &Moebius) -> f64 {
    f.tr()
}

/// Signed trace of the matrix commutator `F G F^{-1} G^{-1}`, which is
/// independent of the choice of lifts.
pub fn commutator_trace(f: &Moebius, g: &Moebius) -> f64 {
    let (fm, gm) = (f.mat(), g.mat());
    fm.mul(&gm).mul(&fm.adjugate()).mul(&gm.adjugate()).trace()
}

/// Cross ratio of the fixed points of two hyperbolic maps, computed from
/// homogeneous determinants.
pub fn cross_ratio(f: &Moebius, g: &Moebius, tol: &Tolerances) -> Result<f64> {
    let cf = classify(f, tol);
    let cg = classify(g, tol);
    if !cf.is_hyperbolic() || !cg.is_hyperbolic() {
        return Err(Error::NotApplicable);
    }
    let (af, bf) = fixed_points(f, tol)?;
    let (ag, bg) = fixed_points(g, tol)?;
    cross_ratio_points(&af, &bf, &ag, &bg, tol)
}

/// `(af - ag)(bf - bg) / ((af - bg)(bf - ag))` for four boundary points.
pub fn cross_ratio_points(
    af: &BoundaryPoint,
    bf: &BoundaryPoint,
    ag: &BoundaryPoint,
    bg: &BoundaryPoint,
    tol: &Tolerances,
) -> Result<f64> {
    let pts = [af, bf, ag, bg];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if pts[i].approx_eq(pts[j], tol.pt) {
                return Err(Error::SharedFixedPoint);
            }
        }
    }
    Ok(af.cross(ag) * bf.cross(bg) / (af.cross(bg) * bf.cross(ag)))
}
