//! Numerical checks of the estimates behind the almost-conservation law:
//! exhaustive lemma checkers, random-ensemble probes of the space-time
//! estimates, and the threshold sweep of the corrected mass.

mod lemmas;
mod probes;
mod report;
mod sweep;
mod theory;

pub use lemmas::{
    bracket_derivative_inf, check_counting_lemma, check_counting_phase_samples, check_resonance_bound,
    counting_phase, counting_phase_derivative_inf, resonance_ratio, Interval, DERIVATIVE_BRACKET_POINTS,
    RESONANCE_MAX_RANGE,
};
pub use probes::{
    concentration_profile, non_resonant_trilinear, probe_strichartz, probe_trilinear, strichartz_ratio,
    trilinear_concentration, trilinear_ratio, Ensemble, StrichartzExponent, TrilinearForm, MIN_ENSEMBLE,
};
pub use report::{BoundReport, Extremum};
pub use sweep::{
    corrected_mass_decrement, fit_line, sweep_almost_conservation, ScalingReport, SweepSpec, SweepVariant,
    SWEEP_NOISE_FLOOR,
};
pub use theory::{almost_conservation_exponent, growth_exponent, torus_exponent_candidates};
