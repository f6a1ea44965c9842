use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::spectral::{japanese, GridSpec, SpectralField};
use crate::{Error, Result};

/// Sign of the cubic term: `i u_t = D^α u + λ|u|²u` with `λ = +1`
/// (defocusing), `-1` (focusing) or `0` (the linear control).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[default]
    Defocusing,
    Focusing,
    Free,
}

impl Sign {
    pub fn coupling(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
            Sign::Free => 0.0,
        }
    }
}

/// Which of the three equivalent equations is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationForm {
    /// `λ|u|²u`.
    #[default]
    Original,
    /// `λ(|v|² − 2⨍|v|²)v = λ(𝒩₁(v) − ℛ₁(v))`.
    Renormalized,
    /// `λ(𝒩₂(w) − ℛ₂(w))`, phased by the frozen spectrum `û₀`.
    Gauged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitMode {
    pub n: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn default_width() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataKind {
    /// Listed coefficients; everything else zero.
    Explicit { modes: Vec<ExplicitMode> },
    /// `e^{-((x - L/2)/width)²} e^{i·momentum·κx}`, sampled and band-limited.
    Gaussian {
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        momentum: i64,
    },
    /// `û(n) = e^{-rate|n|} e^{i n}`: entire, with a broken reflection symmetry.
    Analytic { rate: f64 },
    /// `û(n) = g_n / ⟨nκ⟩^γ` with i.i.d. standard complex Gaussians `g_n`.
    /// A missing seed falls back to the run seed.
    RandomRough {
        gamma: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    #[serde(flatten)]
    pub kind: InitialDataKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

impl InitialDataSpec {
    pub fn random_rough(gamma: f64, seed: u64, amplitude: f64) -> Self {
        Self {
            kind: InitialDataKind::RandomRough {
                gamma,
                seed: Some(seed),
            },
            amplitude,
        }
    }

    pub fn analytic(rate: f64, amplitude: f64) -> Self {
        Self {
            kind: InitialDataKind::Analytic { rate },
            amplitude,
        }
    }

    pub fn explicit(modes: &[(i64, Complex64)]) -> Self {
        Self {
            kind: InitialDataKind::Explicit {
                modes: modes
                    .iter()
                    .map(|&(n, c)| ExplicitMode { n, re: c.re, im: c.im })
                    .collect(),
            },
            amplitude: 1.0,
        }
    }

    /// The band-limited initial field at `t = 0`.
    pub fn build(&self, grid: GridSpec, fallback_seed: u64) -> Result<SpectralField> {
        let amp = self.amplitude;
        if !amp.is_finite() {
            return Err(Error::InvalidParameter(format!("amplitude {amp} is not finite")));
        }
        let field = match &self.kind {
            InitialDataKind::Explicit { modes } => {
                let mut f = SpectralField::zeros(grid);
                for m in modes {
                    if !grid.in_band(m.n) {
                        return Err(Error::InvalidParameter(format!(
                            "explicit mode {} lies outside the resolved band |n| <= {}",
                            m.n,
                            grid.cutoff()
                        )));
                    }
                    f.set_coeff(m.n, Complex64::new(m.re, m.im) * amp)?;
                }
                f
            }
            InitialDataKind::Gaussian { width, momentum } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter(format!("width must be positive, got {width}")));
                }
                let k = grid.modes;
                let kappa = grid.wavenumber();
                let values: Vec<Complex64> = (0..k)
                    .map(|j| {
                        let x = j as f64 * grid.period / k as f64;
                        let r = (x - 0.5 * grid.period) / width;
                        Complex64::from_polar(amp * (-r * r).exp(), *momentum as f64 * kappa * x)
                    })
                    .collect();
                SpectralField::from_physical(grid, &values, 0.0)?.truncated()
            }
            InitialDataKind::Analytic { rate } => {
                if !(*rate > 0.0) {
                    return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
                }
                let mut f = SpectralField::zeros(grid);
                for n in grid.band() {
                    let c = Complex64::from_polar(amp * (-rate * n.abs() as f64).exp(), n as f64);
                    f.set_coeff(n, c)?;
                }
                f
            }
            InitialDataKind::RandomRough { gamma, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(fallback_seed));
                let mut f = SpectralField::zeros(grid);
                let scale = 0.5f64.sqrt();
                for n in grid.band() {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    let weight = amp * scale / japanese(grid.physical_frequency(n)).powf(*gamma);
                    f.set_coeff(n, Complex64::new(re, im) * weight)?;
                }
                f
            }
        };
        Ok(field)
    }
}

/// Everything that fixes the continuous dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub alpha: f64,
    #[serde(default)]
    pub sign: Sign,
    #[serde(default)]
    pub form: EquationForm,
    pub initial_data: InitialDataSpec,
    /// Frozen spectrum `û₀` used by the gauged form.
    #[serde(default)]
    pub reference_data: Option<SpectralField>,
}

impl EquationSpec {
    pub fn new(alpha: f64, sign: Sign, form: EquationForm, initial_data: InitialDataSpec) -> Self {
        Self {
            alpha,
            sign,
            form,
            initial_data,
            reference_data: None,
        }
    }

    pub fn coupling(&self) -> f64 {
        self.sign.coupling()
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        grid.validate()?;
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed 2, got {}",
                self.alpha
            )));
        }
        match (&self.reference_data, self.form) {
            (None, EquationForm::Gauged) => return Err(Error::MissingReference),
            (Some(r), _) => grid.ensure_same(&r.grid)?,
            _ => {}
        }
        Ok(())
    }

    /// Fills a missing gauged-form reference with the initial data itself,
    /// so that `w(0) = u₀` and `ℛ₂` starts at zero.
    pub fn with_reference_from_initial(mut self, grid: GridSpec, seed: u64) -> Result<Self> {
        if self.form == EquationForm::Gauged && self.reference_data.is_none() {
            self.reference_data = Some(self.initial_data.build(grid, seed)?);
        }
        Ok(self)
    }

    pub fn reference(&self) -> Result<&SpectralField> {
        self.reference_data.as_ref().ok_or(Error::MissingReference)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Fourth-order Runge–Kutta in the interaction picture.
    #[default]
    Rk4Ip,
    /// Strang splitting with an RK4 nonlinear substep (second order).
    SplitStep,
}

fn default_store_every() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default)]
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_store_every")]
    pub store_every: usize,
}

impl IntegratorSpec {
    pub fn new(dt: f64, t_end: f64, store_every: usize) -> Self {
        Self {
            scheme: Scheme::Rk4Ip,
            dt,
            t_end,
            store_every,
        }
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.store_every == 0 {
            return Err(Error::InvalidParameter("store_every must be positive".into()));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end || steps < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.steps().map(|_| ())
    }
}
