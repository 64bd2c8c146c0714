//! Periodic blocks, band edges, transfer matrices, Green's functions,
//! Lyapunov exponents and unions of spectra over the compactified circle.

mod block;
mod green;
mod lyapunov;
mod set;
mod sites;
pub mod sturm;
mod sweep;
mod transfer;

pub use block::{discriminant_bands, finite_sites, periodic_spectrum, BlockSpectrum, Boundary, Chain, PeriodicBlock};
pub use green::{green_00, green_00_truncated, GreenValue, GREEN_MAX, GREEN_START, GREEN_TOL};
pub use lyapunov::{lyapunov, LyapunovEstimate};
pub use set::SpectrumSet;
pub use sites::{site_values, LoopPoint, RationalPhase, ThetaLoop};
pub use sweep::{union_spectrum_over_phases, union_spectrum_over_theta, UnionOptions, UnionSpectrum};
pub use transfer::{discriminant, transfer_product, TransferMatrix};
