//! Exhaustive and sampled checks of the two elementary counting/resonance
//! lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundReport, Extremum};
use crate::{Error, Result};

/// Largest enumeration range accepted by [`check_resonance_bound`].
pub const RESONANCE_MAX_RANGE: i64 = 128;

/// `|φ(ξ)| / (|ξ₁+ξ₂| |ξ₂+ξ₃| |ξ_max|^{α−2})` on integer `ξ` with `Σξ = 0`;
/// `None` on the resonant set.
pub fn resonance_ratio(alpha: f64, xi: [i64; 4]) -> Option<f64> {
    let a = xi[0] + xi[1];
    let b = xi[1] + xi[2];
    if a == 0 || b == 0 || xi.iter().sum::<i64>() != 0 {
        return None;
    }
    let p = |x: i64| (x.abs() as f64).powf(alpha);
    let phi = p(xi[0]) - p(xi[1]) + p(xi[2]) - p(xi[3]);
    let max = xi.iter().map(|x| x.abs()).max().expect("four entries") as f64;
    Some(phi.abs() / ((a.abs() * b.abs()) as f64 * max.powf(alpha - 2.0)))
}

/// Minimum of [`resonance_ratio`] over all non-resonant quadruples with
/// `|ξ_j| ≤ range` and `ξ₁+ξ₂+ξ₃+ξ₄ = 0`.
pub fn check_resonance_bound(alpha: f64, range: i64) -> Result<BoundReport> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("need α > 1, got {alpha}")));
    }
    if !(1..=RESONANCE_MAX_RANGE).contains(&range) {
        return Err(Error::CostGuard(format!(
            "resonance enumeration needs 1 <= R <= {RESONANCE_MAX_RANGE}, got {range}"
        )));
    }
    let description = "resonance lower bound: |φ| / (|ξ1+ξ2||ξ2+ξ3||ξmax|^(α-2))";
    let partials: Vec<BoundReport> = (-range..=range)
        .into_par_iter()
        .map(|x1| {
            let mut r = BoundReport::new(description, Extremum::Min);
            for x2 in -range..=range {
                for x3 in -range..=range {
                    let x4 = -(x1 + x2 + x3);
                    if x4.abs() > range {
                        continue;
                    }
                    let xi = [x1, x2, x3, x4];
                    if let Some(ratio) = resonance_ratio(alpha, xi) {
                        r.observe(ratio, &xi);
                    }
                }
            }
            r
        })
        .collect();
    let mut report = BoundReport::new(description, Extremum::Min);
    for p in &partials {
        report.merge(p);
    }
    report.parameter("alpha", alpha);
    report.parameter("range", range as f64);
    Ok(report)
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Number of points used to bracket `inf |g'|` when it is not supplied.
pub const DERIVATIVE_BRACKET_POINTS: usize = 100_001;

/// Numerical `inf_{x∈J} |g'(x)|` from centered differences on a uniform grid.
pub fn bracket_derivative_inf(g: impl Fn(f64) -> f64, j: Interval) -> f64 {
    let len = j.length();
    let h = (len * 1e-7).max(1e-9);
    (0..DERIVATIVE_BRACKET_POINTS)
        .map(|i| {
            let x = j.lo + len * i as f64 / (DERIVATIVE_BRACKET_POINTS - 1) as f64;
            let (a, b) = ((x - h).max(j.lo), (x + h).min(j.hi));
            ((g(b) - g(a)) / (b - a)).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `#{k ∈ J ∩ ℤ : g(k) ∈ I}` against `|I| / inf_J |g'| + 1`.
///
/// `derivative_inf` is bracketed numerically when not given. The report's
/// ratio is count/bound, so the lemma holds iff it is at most 1.
pub fn check_counting_lemma(
    g: impl Fn(f64) -> f64,
    i: Interval,
    j: Interval,
    derivative_inf: Option<f64>,
) -> Result<BoundReport> {
    if !(j.lo.is_finite() && j.hi.is_finite()) {
        return Err(Error::InvalidParameter("J must be bounded".into()));
    }
    let inf = match derivative_inf {
        Some(v) => v,
        None => bracket_derivative_inf(&g, j),
    };
    if !(inf > 1e-12) {
        return Err(Error::Degenerate(format!("inf |g'| = {inf} on J: the bound is vacuous")));
    }
    let mut count = 0u64;
    let mut k = j.lo.ceil() as i64;
    while (k as f64) <= j.hi {
        if i.contains(g(k as f64)) {
            count += 1;
        }
        k += 1;
    }
    let bound = i.length() / inf + 1.0;
    let mut report = BoundReport::new("counting lemma: #{k : g(k) ∈ I} / (|I|/inf|g'| + 1)", Extremum::Max);
    report.observe(count as f64 / bound, &[count as i64]);
    report.parameter("count", count as f64);
    report.parameter("bound", bound);
    report.parameter("inf_derivative", inf);
    Ok(report)
}

/// `g(x) = τ − |x|^α + |n − x|^α`, the phase whose level sets are counted.
pub fn counting_phase(tau: f64, n: f64, alpha: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| tau - x.abs().powf(alpha) + (n - x).abs().powf(alpha)
}

/// `inf |g'|` of [`counting_phase`] on `{x ≥ n − x ≥ 0} = [n/2, n]`:
/// `|g'| = α(x^{α−1} + (n−x)^{α−1})` is convex and symmetric about `n/2`,
/// so the infimum is `2α(n/2)^{α−1}`.
pub fn counting_phase_derivative_inf(n: f64, alpha: f64) -> f64 {
    2.0 * alpha * (n / 2.0).powf(alpha - 1.0)
}

/// Samples `(τ, n, α, I)` and checks the counting bound for the phase on
/// `J = [n/2, n]`; the report's worst ratio exceeds 1 iff some sample fails.
pub fn check_counting_phase_samples(samples: usize, seed: u64) -> Result<BoundReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BoundReport::new("counting lemma on τ − |x|^α + |n−x|^α over [n/2, n]", Extremum::Max);
    let mut violations = 0u64;
    for sample in 0..samples {
        let alpha = rng.random_range(2.0..5.0);
        let n = rng.random_range(2..=400) as f64;
        let tau = rng.random_range(-1e3..1e3);
        let g = counting_phase(tau, n, alpha);
        let j = Interval::new(n / 2.0, n)?;
        // Level windows of random width around a value attained on J.
        let span = (g(j.lo) - g(j.hi)).abs();
        let centre = g(rng.random_range(j.lo..=j.hi));
        let width = span * rng.random_range(0.0..0.5);
        let i = Interval::new(centre - width / 2.0, centre + width / 2.0)?;
        let r = check_counting_lemma(&g, i, j, Some(counting_phase_derivative_inf(n, alpha)))?;
        if r.worst_ratio > 1.0 {
            violations += 1;
        }
        let count = r.parameters["count"] as i64;
        report.observe(r.worst_ratio, &[sample as i64, n as i64, count]);
    }
    report.parameter("violations", violations as f64);
    report.parameter("seed", seed as f64);
    Ok(report)
}
