//! Points of the extended real line and of the upper half-plane.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;

/// A point of the extended real line in homogeneous coordinates `(x : y)`,
/// kept on the unit circle with `y >= 0`. `(1, 0)` is infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    x: f64,
    y: f64,
}

impl BoundaryPoint {
    pub const INFINITY: BoundaryPoint = BoundaryPoint { x: 1.0, y: 0.0 };

    /// Normalizes homogeneous coordinates. Returns `None` for the zero vector
    /// or non-finite input.
    pub fn from_homogeneous(x: f64, y: f64) -> Option<BoundaryPoint> {
        let n = x.hypot(y);
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        let (mut x, mut y) = (x / n, y / n);
        if y < 0.0 || (y == 0.0 && x < 0.0) {
            x = -x;
            y = -y;
        }
        if y == 0.0 {
            return Some(BoundaryPoint::INFINITY);
        }
        Some(BoundaryPoint { x, y })
    }

    /// The finite point `t`. Infinite input gives infinity.
    pub fn real(t: f64) -> BoundaryPoint {
        if t.is_infinite() {
            return BoundaryPoint::INFINITY;
        }
        BoundaryPoint::from_homogeneous(t, 1.0).unwrap_or(BoundaryPoint::INFINITY)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn is_infinity(&self) -> bool {
        self.y == 0.0
    }

    /// The real value `x / y`, or `None` at infinity.
    pub fn t(&self) -> Option<f64> {
        if self.y == 0.0 {
            None
        } else {
            Some(self.x / self.y)
        }
    }

    /// The real value with infinity mapped to `f64::INFINITY`.
    pub fn t_or_inf(&self) -> f64 {
        self.t().unwrap_or(f64::INFINITY)
    }

    /// Position on the circle after the Cayley transform `(z - i)/(z + i)`,
    /// in `[0, 2pi)`. Infinity sits at 0 and the angle increases with `t`.
    pub fn angle(&self) -> f64 {
        let a = 2.0 * self.x.atan2(self.y) + PI;
        let a = a.rem_euclid(2.0 * PI);
        if a >= 2.0 * PI {
            0.0
        } else {
            a
        }
    }

    /// Inverse of [`BoundaryPoint::angle`].
    pub fn from_angle(theta: f64) -> BoundaryPoint {
        let half = (theta - PI) / 2.0;
        BoundaryPoint::from_homogeneous(half.sin(), half.cos()).unwrap_or(BoundaryPoint::INFINITY)
    }

    /// The point of the unit disc under the Cayley transform.
    pub fn disc(&self) -> (f64, f64) {
        let a = self.angle();
        (a.cos(), a.sin())
    }

    /// The 2x2 determinant `x1 y2 - x2 y1`.
    pub fn cross(&self, other: &BoundaryPoint) -> f64 {
        self.x * other.y - other.x * self.y
    }

    /// Equality up to `eps` in the homogeneous determinant.
    pub fn approx_eq(&self, other: &BoundaryPoint, eps: f64) -> bool {
        self.cross(other).abs() <= eps
    }

    /// Chordal distance, equal to `2|z - w| / (sqrt(1+z^2) sqrt(1+w^2))`.
    pub fn chordal(&self, other: &BoundaryPoint) -> f64 {
        2.0 * self.cross(other).abs()
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.t() {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "inf"),
        }
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.t() {
            Some(t) => s.serialize_f64(t),
            None => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = BoundaryPoint;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a real number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<BoundaryPoint, E> {
                Ok(BoundaryPoint::real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<BoundaryPoint, E> {
                Ok(BoundaryPoint::real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<BoundaryPoint, E> {
                Ok(BoundaryPoint::real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<BoundaryPoint, E> {
                match v.trim() {
                    "inf" | "infinity" | "Infinity" | "+inf" | "-inf" => Ok(BoundaryPoint::INFINITY),
                    s => s
                        .parse::<f64>()
                        .map(BoundaryPoint::real)
                        .map_err(|_| E::custom(format!("bad boundary point {s:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    /// The default base point `i`.
    pub const I: HalfPlanePoint = HalfPlanePoint { x: 0.0, y: 1.0 };

    /// Returns `None` unless `y > 0`.
    pub fn new(x: f64, y: f64) -> Option<HalfPlanePoint> {
        if y > 0.0 && x.is_finite() && y.is_finite() {
            Some(HalfPlanePoint { x, y })
        } else {
            None
        }
    }

    /// Chordal distance on the Riemann sphere.
    pub fn chordal(&self, other: &HalfPlanePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let n1 = 1.0 + self.x * self.x + self.y * self.y;
        let n2 = 1.0 + other.x * other.x + other.y * other.y;
        2.0 * dx.hypot(dy) / (n1.sqrt() * n2.sqrt())
    }

    /// Hyperbolic distance for the metric `|dz| / y`.
    pub fn hyperbolic_dist(&self, other: &HalfPlanePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let q = (dx * dx + dy * dy) / (2.0 * self.y * other.y);
        // acosh(1 + q) written to stay accurate for small q
        (q + (q * (q + 2.0)).sqrt()).ln_1p()
    }
}

/// Chordal distance between a half-plane point and a boundary point.
pub fn chordal_mixed(z: &HalfPlanePoint, p: &BoundaryPoint) -> f64 {
    // homogeneous form: z = (z : 1), p = (x : y)
    let (px, py) = (p.x(), p.y());
    let re = z.x * py - px;
    let im = z.y * py;
    let nz = (1.0 + z.x * z.x + z.y * z.y).sqrt();
    2.0 * re.hypot(im) / nz
}
