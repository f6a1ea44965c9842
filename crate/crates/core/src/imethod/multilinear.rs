//! Multilinear forms on the zero-sum hyperplane
//!
//! ```text
//! Λ_d(M; f₁, …, f_d) = Σ_{ξ₁+…+ξ_d = 0} M(ξ₁, …, ξ_d) Π_j F_j(ξ_j),
//! F_j(ξ) = f̂_j(ξ) for odd j,  conj f̂_j(−ξ) for even j,
//! ```
//!
//! evaluated by brute force over resolved integer frequencies. Multipliers
//! receive integer indices `k_j`; the physical frequency is `k_j κ`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spectral::SpectralField;
use crate::{Error, Result};

type Eval = dyn Fn(&[i64]) -> Result<Complex64> + Send + Sync;

/// An order-`d` multiplier defined on `Γ_d = {Σ ξ_j = 0}`.
#[derive(Clone)]
pub struct MultiplierOrderD {
    order: usize,
    eval: Arc<Eval>,
}

impl fmt::Debug for MultiplierOrderD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierOrderD").field("order", &self.order).finish()
    }
}

impl MultiplierOrderD {
    pub fn new(
        order: usize,
        eval: impl Fn(&[i64]) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if order < 2 || order % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "multiplier order must be even and >= 2, got {order}"
            )));
        }
        Ok(Self {
            order,
            eval: Arc::new(eval),
        })
    }

    /// Multiplier that never fails.
    pub fn from_fn(order: usize, eval: impl Fn(&[i64]) -> Complex64 + Send + Sync + 'static) -> Result<Self> {
        Self::new(order, move |k| Ok(eval(k)))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Evaluates at a point of `Γ_d`.
    pub fn eval(&self, k: &[i64]) -> Result<Complex64> {
        if k.len() != self.order {
            return Err(Error::ShapeMismatch {
                expected: self.order,
                found: k.len(),
            });
        }
        if k.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidParameter(format!("{k:?} is not on the zero-sum hyperplane")));
        }
        (self.eval)(k)
    }

    pub(crate) fn eval_unchecked(&self, k: &[i64]) -> Result<Complex64> {
        (self.eval)(k)
    }

    /// Pointwise product with another multiplier of the same order.
    pub fn times(&self, other: &MultiplierOrderD) -> Result<Self> {
        if other.order != self.order {
            return Err(Error::InvalidParameter("orders differ".into()));
        }
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::new(self.order, move |k| Ok(a(k)? * b(k)?))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let a = self.eval.clone();
        Self {
            order: self.order,
            eval: Arc::new(move |k| Ok(a(k)? * factor)),
        }
    }
}

/// Elongation: the order-`(d+k)` multiplier obtained by feeding
/// `ξ_j + ξ_{j+1} + … + ξ_{j+k}` into slot `j` (1-based) of `mult`.
pub fn elongate(mult: &MultiplierOrderD, j: usize, k: usize) -> Result<MultiplierOrderD> {
    let d = mult.order;
    if j == 0 || j > d {
        return Err(Error::InvalidParameter(format!("slot {j} outside 1..={d}")));
    }
    if k % 2 != 0 {
        return Err(Error::InvalidParameter(format!("elongation length must be even, got {k}")));
    }
    if k == 0 {
        return Ok(mult.clone());
    }
    let inner = mult.eval.clone();
    MultiplierOrderD::new(d + k, move |xi| {
        let mut collapsed = Vec::with_capacity(d);
        collapsed.extend_from_slice(&xi[..j - 1]);
        collapsed.push(xi[j - 1..j + k].iter().sum());
        collapsed.extend_from_slice(&xi[j + k..]);
        inner(&collapsed)
    })
}

/// Largest grid for which order-6 forms are summed by brute force.
pub const LAMBDA6_MAX_MODES: usize = 64;

/// Pairwise (tree) summation; fixed association order for bit-stable results.
pub fn tree_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// `Λ_d(M; f₁, …, f_d)`.
pub fn lambda_d(mult: &MultiplierOrderD, fields: &[&SpectralField]) -> Result<Complex64> {
    let d = mult.order;
    if fields.len() != d {
        return Err(Error::ShapeMismatch {
            expected: d,
            found: fields.len(),
        });
    }
    if !matches!(d, 2 | 4 | 6) {
        return Err(Error::InvalidParameter(format!("Λ_d is implemented for d ∈ {{2, 4, 6}}, got {d}")));
    }
    let grid = fields[0].grid;
    for f in fields {
        grid.ensure_same(&f.grid)?;
    }
    if d == 6 && grid.modes > LAMBDA6_MAX_MODES {
        return Err(Error::CostGuard(format!(
            "Λ_6 brute force limited to K <= {LAMBDA6_MAX_MODES}, got K = {}",
            grid.modes
        )));
    }
    let c = grid.cutoff();
    let width = (2 * c + 1) as usize;
    // slot tables indexed by k + c
    let slots: Vec<Vec<Complex64>> = fields
        .iter()
        .enumerate()
        .map(|(j, f)| {
            (-c..=c)
                .map(|k| if j % 2 == 0 { f.coeff(k) } else { f.coeff(-k).conj() })
                .collect()
        })
        .collect();

    let partials: Vec<Result<Complex64>> = (0..width)
        .into_par_iter()
        .map(|i1| {
            let k1 = i1 as i64 - c;
            let a1 = slots[0][i1];
            if a1 == Complex64::new(0.0, 0.0) {
                return Ok(a1);
            }
            let mut k = vec![0i64; d];
            k[0] = k1;
            inner_sum(mult, &slots, c, &mut k, 1, k1, a1)
        })
        .collect();
    let partials = partials.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(tree_sum(&partials))
}

/// Sum over slots `depth..d` given the first `depth` indices; each loop
/// level is reduced with [`tree_sum`].
fn inner_sum(
    mult: &MultiplierOrderD,
    slots: &[Vec<Complex64>],
    c: i64,
    k: &mut [i64],
    depth: usize,
    partial: i64,
    prod: Complex64,
) -> Result<Complex64> {
    let d = k.len();
    let zero = Complex64::new(0.0, 0.0);
    if depth == d - 1 {
        let last = -partial;
        if last.abs() > c {
            return Ok(zero);
        }
        let a = slots[d - 1][(last + c) as usize];
        if a == zero {
            return Ok(zero);
        }
        k[d - 1] = last;
        return Ok(mult.eval_unchecked(k)? * prod * a);
    }
    let mut level = Vec::with_capacity((2 * c + 1) as usize);
    for kj in -c..=c {
        let a = slots[depth][(kj + c) as usize];
        if a == zero {
            continue;
        }
        k[depth] = kj;
        level.push(inner_sum(mult, slots, c, k, depth + 1, partial + kj, prod * a)?);
    }
    Ok(tree_sum(&level))
}

/// `Λ_d(M; f) = Λ_d(M; f, f̄, …, f, f̄)`.
pub fn lambda_d_of(mult: &MultiplierOrderD, f: &SpectralField) -> Result<Complex64> {
    let fields: Vec<&SpectralField> = (0..mult.order).map(|_| f).collect();
    lambda_d(mult, &fields)
}
