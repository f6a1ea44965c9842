//! FFT plumbing shared by the field transforms and the cubic products.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Unnormalized forward DFT in place: `X_k = Σ_j x_j e^{-2πijk/n}`.
pub fn fft_forward(buf: &mut [Complex64]) {
    forward_plan(buf.len()).process(buf);
}

/// Unnormalized inverse DFT in place: `x_j = Σ_k X_k e^{2πijk/n}`.
pub fn fft_inverse(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}

/// Length of the zero-padded grid used for alias-free cubic products of
/// fields supported in `|n| ≤ cutoff`.
pub fn padded_len(cutoff: i64) -> usize {
    ((4 * cutoff.max(1) + 1) as usize).next_power_of_two()
}

/// Galerkin cubic product.
///
/// Returns, for every resolved `|n| ≤ cutoff`, the exact sum
/// `Σ_{n₁-n₂+n₃=n} â(n₁) conj(b̂(n₂)) ĉ(n₃)` over resolved inputs; all other
/// slots are zero. Computed on a zero-padded grid of length `> 4·cutoff`, so
/// no aliased triple can land inside the band.
pub fn cubic_product(
    grid: &GridSpec,
    a: &[Complex64],
    b: &[Complex64],
    c: &[Complex64],
) -> Vec<Complex64> {
    let cutoff = grid.cutoff();
    let p = padded_len(cutoff);
    let inv = inverse_plan(p);
    let fwd = forward_plan(p);

    let lift = |src: &[Complex64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        for n in grid.band() {
            let v = src[grid.index(n).expect("band inside grid")];
            buf[n.rem_euclid(p as i64) as usize] = v;
        }
        inv.process(&mut buf);
        buf
    };

    let pa = lift(a);
    let same_ab = std::ptr::eq(a, b);
    let pb = if same_ab { pa.clone() } else { lift(b) };
    let pc = if std::ptr::eq(a, c) { pa.clone() } else { lift(c) };

    let mut prod: Vec<Complex64> = pa
        .iter()
        .zip(&pb)
        .zip(&pc)
        .map(|((x, y), z)| x * y.conj() * z)
        .collect();
    fwd.process(&mut prod);

    let scale = 1.0 / p as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.modes];
    for n in grid.band() {
        out[grid.index(n).expect("band inside grid")] =
            prod[n.rem_euclid(p as i64) as usize] * scale;
    }
    out
}
