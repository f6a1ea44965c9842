//! I-method quantities: the smoothing operator, multilinear forms on the
//! zero-sum hyperplane, and the plain and corrected modified masses.

mod correction;
mod multilinear;
mod operator;

pub use correction::{
    corrected_mass, corrected_mass_parts, m4_multiplier, m6_multiplier, mass_derivative_rhs,
    psi_phase, resonance_function, scan_sigma4_bound, sigma4, sigma4_multiplier, Flow, Variant,
    IMAGINARY_RESIDUE_TOLERANCE, ORDER6_MAX_MODES,
};
pub use multilinear::{elongate, lambda_d, lambda_d_of, tree_sum, MultiplierOrderD, LAMBDA6_MAX_MODES};
#[allow(non_snake_case)]
pub use operator::apply_I;
pub use operator::{
    i_multiplier, i_symbol, modified_mass, scan_smoothing_constants, IFamily, IOperatorSpec,
    SmoothingConstants,
};
