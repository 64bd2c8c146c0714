//! Spectral laboratory for one-dimensional quasiperiodic Schrödinger
//! operators whose potentials are monotone with a single jump per period,
//! possibly taking the value `∞`.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: extended reals, the Cayley map, arcs on the projective
//!   line, frequencies and continued fractions.
//! - [`potentials`]: sampling functions, monotonicity audits and the extended
//!   circle maps used to parametrise jumps.
//! - [`hull`]: the Cantor-type compactification of the phase circle.
//! - [`spectra`]: transfer matrices, periodic blocks, band edges, Green's
//!   functions, Lyapunov exponents and `θ`-sweeps.
//! - [`perturb`]: rank-one coupling at the origin, generalized operators with
//!   infinite sites and their Cayley transforms.
//! - [`analysis`]: set distances, band statistics, determinant winding, gap
//!   filling and eigenvector diagnostics.
//! - [`oracle`]: independent dense routines used to cross-check the fast paths.

pub mod analysis;
pub mod error;
pub mod hull;
pub mod numerics;
pub mod oracle;
pub mod perturb;
pub mod potentials;
pub mod spectra;

pub use error::{Error, Result};
pub use numerics::{cayley, inverse_cayley, CircleArc, ExtendedReal, Frequency};
