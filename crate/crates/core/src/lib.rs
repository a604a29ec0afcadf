//! Numerical toolkit for decoherence of a nucleus bound to its electrons.
//!
//! All physics routines work in atomic-style dimensionless variables: lengths
//! in Bohr radii, momenta in `ħ/a_B`, masses in electron masses and times in
//! `ħ/E_h`. SI quantities enter only through [`units::PhysicalConstants`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod momentum;
pub mod quadrature;
pub mod scattering;
pub mod twoslit;
pub mod units;
pub mod wavepacket;

pub use density::{CoherenceKernel, Species};
pub use error::{Error, Result};
pub use quadrature::{QuadratureError, QuadratureResult, QuadratureSpec};
pub use scattering::{AngularTable, ScanMethod, ScatteringConfig};
pub use twoslit::TwoSlitConfig;
pub use units::PhysicalConstants;
pub use wavepacket::GaussianPacket;

/// Plain 3-vector in Bohr radii (or `ħ/a_B` for momenta).
pub type Vec3 = [f64; 3];

pub(crate) fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}
