//! Grids, Fourier-coefficient fields, norms and projections.

mod field;
mod grid;
mod norms;
pub mod snapshot;
mod spacetime;
pub mod transform;

pub use field::SpectralField;
pub use grid::{fractional_symbol, GridSpec};
pub use norms::{
    critical_index, japanese, lwp_threshold, project, sobolev_norm, Band, Domain, NormSpec,
};
pub use spacetime::{xsb_norm, Modulation, SpaceTimeField, Taper};
