//! Pseudo-spectral laboratory for the one-dimensional cubic fractional
//! nonlinear Schrödinger equation
//!
//! ```text
//! i ∂_t u = D^α u ± |u|² u,     x ∈ ℝ / Lℤ,
//! ```
//!
//! with its renormalized and gauged forms, the two gauge transforms between
//! them, the I-method modified and corrected masses, and a set of brute-force
//! checkers that turn the analytic toolbox (resonance factorization, counting,
//! Strichartz-type bounds, almost conservation) into measurable properties.
//!
//! Fields are stored as Fourier coefficients with the convention
//! `u(x) = Σ_n û(n) e^{i n κ x}`, `κ = 2π/L`, so that `Σ|û(n)|²` is the
//! normalized mass `⨍|u|²`.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gauges;
pub mod imethod;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string recorded in every artifact manifest.
pub const CODE_VERSION: &str = concat!("fnls-core ", env!("CARGO_PKG_VERSION"));
