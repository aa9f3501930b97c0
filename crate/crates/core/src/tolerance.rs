//! Numerical tolerances and resource limits shared by every module.

use serde::{Deserialize, Serialize};

/// Floating-point tolerances. Every field is overridable from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Allowed deviation of `ad - bc` from 1.
    pub det: f64,
    /// Homogeneous-coordinate equality of boundary points.
    pub pt: f64,
    /// Width of the parabolic band around trace 2.
    pub cls: f64,
    /// Entrywise distance below which a map counts as the identity.
    pub id: f64,
    /// Chordal margin required by strict arc containment.
    pub strict: f64,
    /// Absolute error allowed when recognising a rational rotation number.
    pub ord: f64,
    /// Relative error allowed when recognising a rational ratio.
    pub ratio: f64,
    /// Largest denominator tried by rational reconstruction.
    pub qmax: u32,
    /// Distance to the identity that counts as a near-identity word.
    pub near: f64,
    /// Chordal oscillation allowed over the history window.
    pub conv: f64,
    /// Hyperbolic distance an orbit must reach before it may converge ideally.
    pub rho_min: f64,
    /// Cell size used by recurrence detection.
    pub rec: f64,
    /// Rounding grid used to deduplicate word values.
    pub dedup: f64,
    /// Gap below which adjacent arcs of a union are merged.
    pub merge: f64,
    /// Chordal radius of the seed neighbourhoods in multicone search.
    pub seed_radius: f64,
    /// Chordal slack allowed when re-verifying interval certificates.
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            det: 1e-12,
            pt: 1e-10,
            cls: 1e-9,
            id: 1e-10,
            strict: 1e-9,
            ord: 1e-9,
            ratio: 1e-9,
            qmax: 1000,
            near: 1e-3,
            conv: 1e-6,
            rho_min: 10.0,
            rec: 1e-6,
            dedup: 1e-8,
            merge: 1e-9,
            seed_radius: 1e-3,
            cert: 1e-8,
        }
    }
}

impl Tolerances {
    /// Sets a field by its configuration key. Returns false for unknown keys
    /// or values that are not positive.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        if !(value > 0.0) || !value.is_finite() {
            return false;
        }
        let key = key.replace('-', "_");
        match key.as_str() {
            "det" => self.det = value,
            "pt" => self.pt = value,
            "cls" => self.cls = value,
            "id" => self.id = value,
            "strict" => self.strict = value,
            "ord" => self.ord = value,
            "ratio" => self.ratio = value,
            "qmax" => self.qmax = value as u32,
            "near" => self.near = value,
            "conv" => self.conv = value,
            "rho_min" => self.rho_min = value,
            "rec" => self.rec = value,
            "dedup" => self.dedup = value,
            "merge" => self.merge = value,
            "seed_radius" => self.seed_radius = value,
            "cert" => self.cert = value,
            _ => return false,
        }
        true
    }

    /// True when every field is strictly positive.
    pub fn is_valid(&self) -> bool {
        [
            self.det,
            self.pt,
            self.cls,
            self.id,
            self.strict,
            self.ord,
            self.ratio,
            self.near,
            self.conv,
            self.rho_min,
            self.rec,
            self.dedup,
            self.merge,
            self.seed_radius,
            self.cert,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite())
            && self.qmax > 0
    }
}

/// Resource limits for the iterative and enumerative procedures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Cap on reduction steps in the two-generator loop.
    pub max_phi_steps: usize,
    /// Cap on evaluated products during word enumeration.
    pub word_cap: usize,
    /// Longest witness word that is spelled out letter by letter.
    pub max_word_len: usize,
    /// Maximum number of components of an arc union.
    pub kmax: usize,
    /// Length of the orbit history window.
    pub history: usize,
    /// Seed word length for multicone search.
    pub seed_depth: usize,
    /// Iteration cap for multicone search.
    pub max_iters: usize,
    /// Maximum number of recorded recurrence cells.
    pub rec_cells: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_phi_steps: 10_000,
            word_cap: 10_000_000,
            max_word_len: 1_000_000,
            kmax: 64,
            history: 64,
            seed_depth: 6,
            max_iters: 200,
            rec_cells: 1_000_000,
        }
    }
}
