//! The three equivalent equations and their time integration:
//!
//! ```text
//! original      i u_t = D^α u + λ|u|²u
//! renormalized  i v_t = D^α v + λ(|v|² − 2⨍|v|²)v
//! gauged        i w_t = D^α w + λ(𝒩₂(w) − ℛ₂(w))
//! ```

mod integrate;
mod nonlinear;
mod spec;
mod trajectory;

pub use integrate::{evolve, free_evolve, step, Propagator, Stepper, BLOW_UP_THRESHOLD};
pub use nonlinear::{cubic, non_resonant_1, non_resonant_2, nonlinearity, resonant_1, resonant_2};
pub use spec::{
    EquationForm, EquationSpec, ExplicitMode, InitialDataKind, InitialDataSpec, IntegratorSpec,
    Scheme, Sign,
};
pub use trajectory::{
    run, variant_for, Diagnostic, DiagnosticsSpec, RunFailure, Trajectory, TrajectoryManifest,
};
