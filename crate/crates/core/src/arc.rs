//! Closed oriented arcs of the extended real line and finite unions of them.
//!
//! All orientation questions are answered through [`BoundaryPoint::angle`],
//! the position on the circle after the Cayley transform. Along that circle
//! the chordal metric is the Euclidean chord, so a chordal radius `eta`
//! corresponds to the angle `2 asin(eta / 2)`.

use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::mobius::{Mat2, Moebius};
use crate::tolerance::Tolerances;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Counterclockwise angular offset from `a` to `b`, in `[0, 2pi)`.
pub fn offset(a: &BoundaryPoint, b: &BoundaryPoint) -> f64 {
    let o = (b.angle() - a.angle()).rem_euclid(TAU);
    if o >= TAU {
        0.0
    } else {
        o
    }
}

/// Angle subtended by a chord of length `eta`.
pub fn chord_to_angle(eta: f64) -> f64 {
    2.0 * (eta / 2.0).clamp(0.0, 1.0).asin()
}

/// Chord length of an angle.
pub fn angle_to_chord(theta: f64) -> f64 {
    2.0 * (theta.abs().min(PI) / 2.0).sin()
}

/// The closed arc from `p` counterclockwise to `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub p: BoundaryPoint,
    pub q: BoundaryPoint,
}

impl Arc {
    /// Fails when the endpoints coincide, since singletons and the whole
    /// circle are not arcs.
    pub fn new(p: BoundaryPoint, q: BoundaryPoint) -> Result<Arc> {
        if p.cross(&q) == 0.0 {
            return Err(Error::DegenerateArc);
        }
        Ok(Arc { p, q })
    }

    /// The arc from `s` to `t`, infinities allowed.
    pub fn reals(s: f64, t: f64) -> Result<Arc> {
        Arc::new(BoundaryPoint::real(s), BoundaryPoint::real(t))
    }

    /// The arc starting at angle `start` of angular length `len`.
    pub fn from_angles(start: f64, len: f64) -> Result<Arc> {
        if !(len > 0.0) || len >= TAU {
            return Err(Error::DegenerateArc);
        }
        Arc::new(BoundaryPoint::from_angle(start), BoundaryPoint::from_angle(start + len))
    }

    pub fn start(&self) -> f64 {
        self.p.angle()
    }

    /// Angular length in `(0, 2pi)`.
    pub fn length(&self) -> f64 {
        offset(&self.p, &self.q)
    }

    pub fn midpoint(&self) -> BoundaryPoint {
        BoundaryPoint::from_angle(self.start() + self.length() / 2.0)
    }

    /// Point at fraction `s` of the way from `p` to `q`.
    pub fn point_at(&self, s: f64) -> BoundaryPoint {
        if s <= 0.0 {
            return self.p;
        }
        if s >= 1.0 {
            return self.q;
        }
        BoundaryPoint::from_angle(self.start() + s * self.length())
    }

    /// Closure of the complement.
    pub fn complement(&self) -> Arc {
        Arc { p: self.q, q: self.p }
    }

    pub fn reversed_endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.q, self.p)
    }

    /// Weak membership.
    pub fn contains(&self, r: &BoundaryPoint) -> bool {
        offset(&self.p, r) <= self.length()
    }

    /// Membership with a chordal slack around the endpoints.
    pub fn contains_tol(&self, r: &BoundaryPoint, eps: f64) -> bool {
        self.contains(r) || self.p.chordal(r) <= eps || self.q.chordal(r) <= eps
    }

    /// Membership in the open arc, keeping `eps` away from both endpoints.
    pub fn interior_contains(&self, r: &BoundaryPoint, eps: f64) -> bool {
        self.contains(r) && self.p.chordal(r) > eps && self.q.chordal(r) > eps
    }

    /// Weak containment `self ⊆ outer`, with endpoints allowed to overshoot
    /// by chordal `eps`.
    pub fn is_subset_of(&self, outer: &Arc, eps: f64) -> bool {
        let delta = chord_to_angle(eps);
        let l = outer.length();
        let mut o1 = offset(&outer.p, &self.p);
        if o1 > TAU - delta {
            o1 = 0.0;
        }
        let mut o2 = offset(&outer.p, &self.q);
        if o2 > l + delta && o2 > TAU - delta {
            o2 = 0.0;
        }
        o1 <= o2 && o2 <= l + delta && (o2 - o1 - self.length()).abs() <= 2.0 * delta + 1e-12
    }

    /// Gap between `self` and the complement of `outer`: the smaller chordal
    /// distance between matching endpoints. Negative when not contained.
    pub fn containment_margin(&self, outer: &Arc) -> f64 {
        if !self.is_subset_of(outer, 0.0) {
            return -1.0;
        }
        self.p.chordal(&outer.p).min(self.q.chordal(&outer.q))
    }

    /// True when `self` lies in the interior of `outer` with chordal margin at
    /// least `tol.strict` at both ends.
    pub fn strictly_inside(&self, outer: &Arc, tol: &Tolerances) -> bool {
        self.containment_margin(outer) >= tol.strict
    }

    /// True when `self ⊆ outer` and `self != outer`, both up to `tol.pt`.
    pub fn properly_inside(&self, outer: &Arc, tol: &Tolerances) -> bool {
        self.is_subset_of(outer, tol.pt)
            && (self.p.chordal(&outer.p) > tol.pt || self.q.chordal(&outer.q) > tol.pt)
    }

    /// The image under `f`.
    pub fn image(&self, f: &Moebius) -> Arc {
        Arc { p: f.apply_boundary(&self.p), q: f.apply_boundary(&self.q) }
    }

    /// The image under any invertible matrix. A negative determinant reverses
    /// the orientation of the boundary, so the endpoints swap roles.
    pub fn image_mat(&self, m: &Mat2) -> Option<Arc> {
        let a = m.apply(&self.p)?;
        let b = m.apply(&self.q)?;
        if m.det() > 0.0 {
            Some(Arc { p: a, q: b })
        } else {
            Some(Arc { p: b, q: a })
        }
    }

    /// The arc grown by chordal `eta` on both sides. Fails if that covers the
    /// circle.
    pub fn enlarged(&self, eta: f64) -> Result<Arc> {
        let d = chord_to_angle(eta);
        Arc::from_angles(self.start() - d, self.length() + 2.0 * d)
    }

    /// True when the open arcs are disjoint, up to `eps` overlap.
    pub fn interiors_disjoint(&self, other: &Arc, eps: f64) -> bool {
        other.is_subset_of(&self.complement(), eps)
    }
}

/// The closed arc with endpoints `a` and `b` not containing `avoid`.
pub fn arc_avoiding(a: &BoundaryPoint, b: &BoundaryPoint, avoid: &BoundaryPoint) -> Result<Arc> {
    let ab = Arc::new(*a, *b)?;
    if ab.contains(avoid) {
        Ok(ab.complement())
    } else {
        Ok(ab)
    }
}

/// The closed arc with endpoints `a`, `b` containing `include`.
pub fn arc_through(a: &BoundaryPoint, b: &BoundaryPoint, include: &BoundaryPoint) -> Result<Arc> {
    let ab = Arc::new(*a, *b)?;
    if ab.contains(include) {
        Ok(ab)
    } else {
        Ok(ab.complement())
    }
}

pub fn arc_image(f: &Moebius, j: &Arc) -> Arc {
    j.image(f)
}

pub fn arc_strictly_inside(inner: &Arc, outer: &Arc, tol: &Tolerances) -> bool {
    inner.strictly_inside(outer, tol)
}

/// A sorted union of pairwise disjoint closed arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcUnion {
    pub components: Vec<Arc>,
}

impl ArcUnion {
    /// Merges the arcs, joining neighbours whose gap is below chordal
    /// `merge`. While more than `kmax` components remain, the two closest
    /// neighbours are joined. Fails when the result is the whole circle.
    pub fn from_arcs(arcs: &[Arc], merge: f64, kmax: usize) -> Result<ArcUnion> {
        if arcs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let gap = chord_to_angle(merge);
        // (start, end) with end possibly beyond 2pi, and their endpoints
        let mut iv: Vec<(f64, f64, BoundaryPoint, BoundaryPoint)> =
            arcs.iter().map(|a| (a.start(), a.start() + a.length(), a.p, a.q)).collect();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0).then(y.1.total_cmp(&x.1)));
        let mut out: Vec<(f64, f64, BoundaryPoint, BoundaryPoint)> = Vec::new();
        for cur in iv {
            match out.last_mut() {
                Some(last) if cur.0 <= last.1 + gap => {
                    if cur.1 > last.1 {
                        last.1 = cur.1;
                        last.3 = cur.3;
                    }
                }
                _ => out.push(cur),
            }
        }
        // wrap-around: the last component may reach past the first
        while out.len() >= 2 {
            let first = out[0];
            let last = *out.last().unwrap();
            if last.1 + gap < first.0 + TAU {
                break;
            }
            out.pop();
            let q = if first.1 + TAU >= last.1 { first.3 } else { last.3 };
            out[0] = (last.0, (first.1 + TAU).max(last.1), last.2, q);
            out.sort_by(|x, y| x.0.total_cmp(&y.0));
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        if out.len() == 1 && out[0].1 - out[0].0 + gap >= TAU {
            return Err(Error::DegenerateArc);
        }
        while out.len() > kmax.max(1) {
            let n = out.len();
            let mut best = 0;
            let mut best_gap = f64::INFINITY;
            for i in 0..n {
                let j = (i + 1) % n;
                let next_start = if j == 0 { out[0].0 + TAU } else { out[j].0 };
                let g = next_start - out[i].1;
                if g < best_gap {
                    best_gap = g;
                    best = i;
                }
            }
            let j = (best + 1) % n;
            if j == 0 {
                let last = out.pop().unwrap();
                let first = out[0];
                out[0] = (last.0, first.1 + TAU, last.2, first.3);
            } else {
                let nxt = out.remove(j);
                out[best].1 = nxt.1;
                out[best].3 = nxt.3;
            }
            out.sort_by(|x, y| x.0.total_cmp(&y.0));
            if out.len() == 1 && out[0].1 - out[0].0 >= TAU {
                return Err(Error::DegenerateArc);
            }
        }
        let components = out
            .into_iter()
            .map(|(_, _, p, q)| Arc::new(p, q))
            .collect::<Result<Vec<_>>>()?;
        Ok(ArcUnion { components })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, r: &BoundaryPoint) -> bool {
        self.components.iter().any(|a| a.contains(r))
    }

    /// Index of a component containing `arc`, if any.
    pub fn component_containing(&self, arc: &Arc, eps: f64) -> Option<usize> {
        self.components.iter().position(|c| arc.is_subset_of(c, eps))
    }

    /// Largest margin with which `arc` sits inside one component; negative
    /// if no component contains it.
    pub fn margin_for(&self, arc: &Arc) -> f64 {
        self.components
            .iter()
            .map(|c| arc.containment_margin(c))
            .fold(-1.0, f64::max)
    }

    /// Every component of `other` lies in a component of `self`.
    pub fn contains_union(&self, other: &ArcUnion, eps: f64) -> bool {
        other.components.iter().all(|a| self.component_containing(a, eps).is_some())
    }

    pub fn image(&self, f: &Moebius) -> Vec<Arc> {
        self.components.iter().map(|a| a.image(f)).collect()
    }

    /// Total angular measure.
    pub fn measure(&self) -> f64 {
        self.components.iter().map(|a| a.length()).sum()
    }

    /// The union grown by chordal `eta`.
    pub fn enlarged(&self, eta: f64, merge: f64, kmax: usize) -> Result<ArcUnion> {
        let arcs = self
            .components
            .iter()
            .map(|a| a.enlarged(eta))
            .collect::<Result<Vec<_>>>()?;
        ArcUnion::from_arcs(&arcs, merge, kmax)
    }
}
