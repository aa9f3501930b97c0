//! Semidiscreteness and inverse-freeness of semigroups of real Möbius
//! transformations.
//!
//! The crate is layered: [`mobius`], [`boundary`] and [`arc`] provide the
//! algebra and boundary geometry; [`classify`] decides two-generator
//! semigroups; [`elementary`] handles semigroups with a finite orbit in the
//! closed half-plane; [`dynamics`] runs composition sequences and the
//! word-enumeration oracle; [`cocycle`] searches for multicones.

pub mod arc;
pub mod boundary;
pub mod classify;
pub mod cocycle;
pub mod dynamics;
pub mod elementary;
pub mod error;
pub mod mobius;
pub mod rational;
pub mod tolerance;
pub mod word;

pub use arc::{Arc, ArcUnion};
pub use boundary::{BoundaryPoint, HalfPlanePoint};
pub use error::{Error, Result};
pub use mobius::{Mat2, Moebius, MoebiusClass};
pub use tolerance::{Limits, Tolerances};
pub use word::Word;
