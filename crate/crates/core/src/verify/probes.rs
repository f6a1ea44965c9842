//! Finite-constant probes of the space-time estimates on random ensembles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundReport, Extremum};
use crate::dynamics::InitialDataSpec;
use crate::spectral::transform::cubic_product;
use crate::spectral::{
    lwp_threshold, xsb_norm, Domain, GridSpec, Modulation, NormSpec, SpaceTimeField, SpectralField, Taper,
};
use crate::{Error, Result};

/// Random space-time fields `û(t,n) = e^{-it|nκ|^α}(a_n + b_n sin(2πt/T))`,
/// with `a`, `b` rough random data; member `j` uses seeds `seed + 2j`,
/// `seed + 2j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ensemble {
    pub size: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub t_end: f64,
    pub time_samples: usize,
    #[serde(default)]
    pub taper: Taper,
    /// Decay exponent of the random data.
    pub gamma: f64,
}

/// Smallest ensemble the probes accept.
pub const MIN_ENSEMBLE: usize = 100;

impl Ensemble {
    pub fn desk(size: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            size,
            seed,
            grid: GridSpec::torus(32)?,
            t_end: 0.1,
            time_samples: 128,
            taper: Taper::default(),
            gamma: 0.5,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.size < MIN_ENSEMBLE {
            return Err(Error::InvalidParameter(format!(
                "ensembles need at least {MIN_ENSEMBLE} members, got {}",
                self.size
            )));
        }
        if !self.time_samples.is_power_of_two() {
            return Err(Error::InvalidParameter("time_samples must be a power of two".into()));
        }
        Ok(())
    }

    fn with_samples(&self, time_samples: usize) -> Self {
        Self { time_samples, ..*self }
    }

    /// Member `j` sampled for dispersion exponent `alpha`.
    pub fn member(&self, j: usize, alpha: f64) -> Result<SpaceTimeField> {
        let a = InitialDataSpec::random_rough(self.gamma, self.seed + 2 * j as u64, 1.0).build(self.grid, 0)?;
        let b = InitialDataSpec::random_rough(self.gamma, self.seed + 2 * j as u64 + 1, 0.5).build(self.grid, 0)?;
        let grid = self.grid;
        let t_end = self.t_end;
        SpaceTimeField::sample(grid, t_end, self.time_samples, self.taper, |t| {
            let envelope = (2.0 * std::f64::consts::PI * t / t_end).sin();
            let mut f = SpectralField::zeros(grid).with_time(t);
            for (i, c) in f.coeffs.iter_mut().enumerate() {
                let n = grid.frequency(i);
                *c = (a.coeffs[i] + b.coeffs[i] * envelope) * Complex64::from_polar(1.0, -t * grid.symbol(n, alpha));
            }
            Ok(f)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrichartzExponent {
    /// `‖u‖_{L⁴} ≲ ‖u‖_{X^{0,b}}`.
    L4,
    /// `‖u‖_{L⁶} ≲ ‖u‖_{X^{ε,1/2−ε}}`.
    L6,
}

fn ratio_or_degenerate(num: f64, den: f64) -> Result<f64> {
    if !(den > 0.0) {
        return Err(Error::Degenerate("zero denominator in probe ratio".into()));
    }
    Ok(num / den)
}

/// `‖u‖_{L^p}/‖u‖_{X^{s,b}}` for one field.
pub fn strichartz_ratio(
    field: &SpaceTimeField,
    alpha: f64,
    b: f64,
    exponent: StrichartzExponent,
    eps: f64,
) -> Result<f64> {
    let modulation = Modulation::Standard { alpha };
    let (p, norm) = match exponent {
        StrichartzExponent::L4 => (4.0, NormSpec::space_time(0.0, b)),
        StrichartzExponent::L6 => (6.0, NormSpec::space_time(eps, 0.5 - eps)),
    };
    ratio_or_degenerate(field.lp_norm(p), xsb_norm(field, &norm, &modulation)?)
}

fn ensemble_max(
    description: &str,
    ensemble: &Ensemble,
    eval: impl Fn(&Ensemble, usize) -> Result<f64> + Sync,
) -> Result<BoundReport> {
    ensemble.validate()?;
    let coarse: Vec<f64> = (0..ensemble.size)
        .into_par_iter()
        .map(|j| eval(ensemble, j))
        .collect::<Result<_>>()?;
    let fine_ensemble = ensemble.with_samples(2 * ensemble.time_samples);
    let fine: Vec<f64> = (0..ensemble.size)
        .into_par_iter()
        .map(|j| eval(&fine_ensemble, j))
        .collect::<Result<_>>()?;
    let mut report = BoundReport::new(description, Extremum::Max);
    for (j, r) in coarse.iter().enumerate() {
        report.observe(*r, &[j as i64]);
    }
    let fine_max = fine.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.parameter("doubled_grid_worst_ratio", fine_max);
    report.parameter("doubling_change", (fine_max - report.worst_ratio).abs() / report.worst_ratio);
    report.parameter("ensemble_seed", ensemble.seed as f64);
    report.parameter("ensemble_size", ensemble.size as f64);
    report.parameter("K", ensemble.grid.modes as f64);
    report.parameter("T", ensemble.t_end);
    report.parameter("S", ensemble.time_samples as f64);
    if let Taper::Cosine { fraction } = ensemble.taper {
        report.parameter("taper_fraction", fraction);
    }
    Ok(report)
}

/// Worst `L^p / X^{s,b}` ratio over the ensemble, with the same statistic on
/// a temporally doubled grid recorded as `doubling_change`.
pub fn probe_strichartz(
    alpha: f64,
    b: f64,
    exponent: StrichartzExponent,
    eps: f64,
    ensemble: &Ensemble,
) -> Result<BoundReport> {
    let desc = match exponent {
        StrichartzExponent::L4 => "strichartz L4: ‖u‖_L4 / ‖u‖_X^{0,b}",
        StrichartzExponent::L6 => "strichartz L6: ‖u‖_L6 / ‖u‖_X^{ε,1/2-ε}",
    };
    let mut report = ensemble_max(desc, ensemble, |e, j| {
        strichartz_ratio(&e.member(j, alpha)?, alpha, b, exponent, eps)
    })?;
    report.parameter("alpha", alpha);
    report.parameter("b", b);
    report.parameter("eps", eps);
    Ok(report)
}

/// Which trilinear expression is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrilinearForm {
    /// The full product `u₁ ū₂ u₃`.
    Line,
    /// The non-resonant part over `Γ(n)`.
    Circle,
}

impl TrilinearForm {
    pub fn domain(self) -> Domain {
        match self {
            TrilinearForm::Line => Domain::Line,
            TrilinearForm::Circle => Domain::Circle,
        }
    }
}

/// Non-resonant trilinear `Σ_{Γ(n)} â(n₁) conj b̂(n₂) ĉ(n₃)`.
pub fn non_resonant_trilinear(a: &SpectralField, b: &SpectralField, c: &SpectralField) -> Result<SpectralField> {
    a.grid.ensure_same(&b.grid)?;
    a.grid.ensure_same(&c.grid)?;
    let grid = a.grid;
    let mut out = SpectralField {
        grid,
        coeffs: cubic_product(&grid, &a.coeffs, &b.coeffs, &c.coeffs),
        time: a.time,
    };
    let dot = |x: &SpectralField, y: &SpectralField| -> Complex64 {
        grid.band()
            .map(|n| x.coeff(n) * y.coeff(n).conj())
            .sum()
    };
    let ab = dot(a, b);
    let cb = dot(c, b);
    for n in grid.band() {
        let i = grid.index(n).expect("band inside grid");
        let (an, bn, cn) = (a.coeffs[i], b.coeffs[i], c.coeffs[i]);
        out.coeffs[i] -= ab * cn + cb * an - an * bn.conj() * cn;
    }
    Ok(out)
}

fn trilinear_field(form: TrilinearForm, u: [&SpaceTimeField; 3]) -> Result<SpaceTimeField> {
    let mut fields = Vec::with_capacity(u[0].time_samples);
    for j in 0..u[0].time_samples {
        let (a, b, c) = (u[0].field_at(j), u[1].field_at(j), u[2].field_at(j));
        fields.push(match form {
            TrilinearForm::Line => SpectralField {
                grid: a.grid,
                coeffs: cubic_product(&a.grid, &a.coeffs, &b.coeffs, &c.coeffs),
                time: a.time,
            },
            TrilinearForm::Circle => non_resonant_trilinear(&a, &b, &c)?,
        });
    }
    SpaceTimeField::from_fields(&fields, u[0].t_end, u[0].taper)
}

/// `‖T(u₁,u₂,u₃)‖_{X^{s,−1/2+2ε}} / Π‖u_j‖_{X^{s,1/2+ε}}`.
pub fn trilinear_ratio(alpha: f64, s: f64, form: TrilinearForm, eps: f64, u: [&SpaceTimeField; 3]) -> Result<f64> {
    let modulation = Modulation::Standard { alpha };
    let lhs = xsb_norm(&trilinear_field(form, u)?, &NormSpec::space_time(s, -0.5 + 2.0 * eps), &modulation)?;
    let mut rhs = 1.0;
    for f in u {
        rhs *= xsb_norm(f, &NormSpec::space_time(s, 0.5 + eps), &modulation)?;
    }
    ratio_or_degenerate(lhs, rhs)
}

/// Worst trilinear ratio over triples of ensemble members `(3j, 3j+1, 3j+2)`;
/// requires `s` at or above the local well-posedness threshold.
pub fn probe_trilinear(
    alpha: f64,
    s: f64,
    form: TrilinearForm,
    eps: f64,
    ensemble: &Ensemble,
) -> Result<BoundReport> {
    let threshold = lwp_threshold(alpha, form.domain())?;
    if s < threshold {
        return Err(Error::InvalidParameter(format!(
            "trilinear probe needs s >= {threshold}, got {s}; use trilinear_concentration below it"
        )));
    }
    let desc = match form {
        TrilinearForm::Line => "trilinear (line): ‖u1 ū2 u3‖_X^{s,-1/2+2ε} / Π‖uj‖_X^{s,1/2+ε}",
        TrilinearForm::Circle => "trilinear (circle): ‖N(u1,u2,u3)‖_X^{s,-1/2+2ε} / Π‖uj‖_X^{s,1/2+ε}",
    };
    let mut report = ensemble_max(desc, ensemble, |e, j| {
        let fields = [e.member(3 * j, alpha)?, e.member(3 * j + 1, alpha)?, e.member(3 * j + 2, alpha)?];
        trilinear_ratio(alpha, s, form, eps, [&fields[0], &fields[1], &fields[2]])
    })?;
    report.parameter("alpha", alpha);
    report.parameter("s", s);
    report.parameter("eps", eps);
    report.parameter("threshold", threshold);
    Ok(report)
}

/// Free waves packed at `{N−1, N, N+1}`.
pub fn concentration_profile(
    grid: GridSpec,
    frequency: i64,
    alpha: f64,
    t_end: f64,
    time_samples: usize,
    taper: Taper,
) -> Result<SpaceTimeField> {
    if frequency + 1 > grid.cutoff() {
        return Err(Error::InvalidParameter(format!(
            "frequency {frequency} is not resolved (cutoff {})",
            grid.cutoff()
        )));
    }
    SpaceTimeField::sample(grid, t_end, time_samples, taper, |t| {
        let mut f = SpectralField::zeros(grid).with_time(t);
        for n in frequency - 1..=frequency + 1 {
            f.set_coeff(n, Complex64::from_polar(1.0, -t * grid.symbol(n, alpha)))?;
        }
        Ok(f)
    })
}

/// Trilinear ratio on the concentration profile at each frequency `2^k`.
pub fn trilinear_concentration(
    alpha: f64,
    s: f64,
    form: TrilinearForm,
    eps: f64,
    exponents: &[u32],
    grid: GridSpec,
    t_end: f64,
    time_samples: usize,
) -> Result<Vec<f64>> {
    exponents
        .iter()
        .map(|&k| {
            let u = concentration_profile(grid, 1 << k, alpha, t_end, time_samples, Taper::default())?;
            trilinear_ratio(alpha, s, form, eps, [&u, &u, &u])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::non_resonant_1;
    use proptest::prelude::*;

    #[test]
    fn non_resonant_trilinear_reduces_to_the_cubic_one() {
        let g = GridSpec::torus(32).unwrap();
        let u = InitialDataSpec::random_rough(0.5, 3, 1.0).build(g, 0).unwrap();
        let a = non_resonant_trilinear(&u, &u, &u).unwrap();
        assert!(a.distance(&non_resonant_1(&u)).unwrap() < 1e-13 * a.l2_norm());
    }

    #[test]
    fn non_resonant_trilinear_matches_brute_force() {
        let g = GridSpec::torus(16).unwrap();
        let f = |s| InitialDataSpec::random_rough(0.3, s, 1.0).build(g, 0).unwrap();
        let (a, b, c) = (f(1), f(2), f(3));
        let got = non_resonant_trilinear(&a, &b, &c).unwrap();
        let cut = g.cutoff();
        for n in -cut..=cut {
            let mut sum = Complex64::new(0.0, 0.0);
            for n1 in -cut..=cut {
                for n2 in -cut..=cut {
                    let n3 = n - n1 + n2;
                    if n3.abs() > cut || n2 == n1 || n2 == n3 {
                        continue;
                    }
                    sum += a.coeff(n1) * b.coeff(n2).conj() * c.coeff(n3);
                }
            }
            assert!((got.coeff(n) - sum).norm() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn ensembles_are_reproducible_and_sized() {
        let e = Ensemble::desk(MIN_ENSEMBLE, 5).unwrap();
        assert_eq!(e.member(7, 3.0).unwrap(), e.member(7, 3.0).unwrap());
        assert!(probe_strichartz(3.0, 1.0 / 3.0, StrichartzExponent::L4, 0.01, &Ensemble::desk(10, 5).unwrap()).is_err());
    }

    #[test]
    fn trilinear_below_threshold_is_rejected() {
        let e = Ensemble::desk(MIN_ENSEMBLE, 5).unwrap();
        assert!(probe_trilinear(3.0, -0.3, TrilinearForm::Line, 0.01, &e).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn ratios_are_phase_invariant(theta in 0.0f64..6.28, j in 0usize..50) {
            let e = Ensemble::desk(MIN_ENSEMBLE, 9).unwrap();
            let u = e.member(j, 3.0).unwrap();
            let mut v = u.clone();
            let rot = Complex64::from_polar(1.0, theta);
            v.values.iter_mut().for_each(|c| *c *= rot);
            for exp in [StrichartzExponent::L4, StrichartzExponent::L6] {
                let a = strichartz_ratio(&u, 3.0, 1.0 / 3.0, exp, 0.01).unwrap();
                let b = strichartz_ratio(&v, 3.0, 1.0 / 3.0, exp, 0.01).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }
            let w = e.member(j + 50, 3.0).unwrap();
            for form in [TrilinearForm::Line, TrilinearForm::Circle] {
                let a = trilinear_ratio(3.0, 0.0, form, 0.01, [&u, &w, &u]).unwrap();
                let b = trilinear_ratio(3.0, 0.0, form, 0.01, [&v, &w, &v]).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }
        }
    }
}
