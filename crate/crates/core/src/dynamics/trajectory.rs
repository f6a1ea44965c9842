use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::integrate::{check_state, Propagator, Stepper};
use super::{EquationForm, EquationSpec, IntegratorSpec};
use crate::imethod::{self, IOperatorSpec, Variant};
use crate::spectral::{snapshot, sobolev_norm, GridSpec, NormSpec, SpectralField};
use crate::{Error, Result};

/// Scalar series recorded at every stored snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Mass,
    #[serde(rename = "h_s_norm")]
    HsNorm,
    ModifiedMass,
    CorrectedMass,
    Lambda4ResidualImag,
    MaxAbs,
}

impl Diagnostic {
    pub fn column(self) -> &'static str {
        match self {
            Diagnostic::Mass => "mass",
            Diagnostic::HsNorm => "h_s_norm",
            Diagnostic::ModifiedMass => "modified_mass",
            Diagnostic::CorrectedMass => "corrected_mass",
            Diagnostic::Lambda4ResidualImag => "lambda4_residual_imag",
            Diagnostic::MaxAbs => "max_abs",
        }
    }

    fn needs_i_operator(self) -> bool {
        matches!(
            self,
            Diagnostic::ModifiedMass | Diagnostic::CorrectedMass | Diagnostic::Lambda4ResidualImag
        )
    }
}

fn default_series() -> Vec<Diagnostic> {
    vec![Diagnostic::Mass]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    #[serde(default = "default_series")]
    pub series: Vec<Diagnostic>,
    /// Index `s` of the `h_s_norm` column.
    #[serde(default)]
    pub sobolev_index: f64,
    #[serde(default)]
    pub i_operator: Option<IOperatorSpec>,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        Self {
            series: default_series(),
            sobolev_index: 0.0,
            i_operator: None,
        }
    }
}

impl DiagnosticsSpec {
    pub fn validate(&self) -> Result<()> {
        if let Some(op) = &self.i_operator {
            op.validate()?;
        }
        if self.i_operator.is_none() && self.series.iter().any(|d| d.needs_i_operator()) {
            return Err(Error::InvalidParameter(
                "modified/corrected mass diagnostics need an i_operator".into(),
            ));
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<String> {
        std::iter::once("t".to_string())
            .chain(self.series.iter().map(|d| d.column().to_string()))
            .collect()
    }

    /// One diagnostics row for `u`, a state of `spec`'s equation.
    pub fn evaluate(&self, u: &SpectralField, spec: &EquationSpec) -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(self.series.len() + 1);
        row.push(u.time);
        let mut corrected: Option<(f64, f64)> = None;
        for d in &self.series {
            let value = match d {
                Diagnostic::Mass => u.mass(),
                Diagnostic::HsNorm => sobolev_norm(u, &NormSpec::sobolev(self.sobolev_index)),
                Diagnostic::MaxAbs => u.max_abs(),
                Diagnostic::ModifiedMass => imethod::modified_mass(u, self.op()?),
                Diagnostic::CorrectedMass | Diagnostic::Lambda4ResidualImag => {
                    if corrected.is_none() {
                        let variant = variant_for(spec, u.time)?;
                        corrected = Some(imethod::corrected_mass_parts(u, self.op()?, &imethod::Flow::of(spec), &variant)?);
                    }
                    let (value, residual) = corrected.expect("just computed");
                    if *d == Diagnostic::CorrectedMass {
                        value
                    } else {
                        residual
                    }
                }
            };
            row.push(value);
        }
        Ok(row)
    }

    fn op(&self) -> Result<&IOperatorSpec> {
        self.i_operator
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("i_operator missing".into()))
    }
}

/// The corrected-mass variant matching an equation form: the gauged form
/// carries the time phase of its frozen spectrum.
pub fn variant_for(spec: &EquationSpec, time: f64) -> Result<Variant> {
    Ok(match spec.form {
        EquationForm::Gauged => Variant::Torus {
            reference: spec.reference()?.clone(),
            time,
        },
        _ => Variant::Line,
    })
}

/// Stored states plus diagnostic series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: GridSpec,
    pub equation: EquationSpec,
    pub integrator: IntegratorSpec,
    pub diagnostics: DiagnosticsSpec,
    pub seed: u64,
    pub snapshots: Vec<SpectralField>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// A failed run: the error and everything stored before it.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Trajectory,
}

impl From<Box<RunFailure>> for Error {
    fn from(f: Box<RunFailure>) -> Self {
        f.error
    }
}

/// Integrates `spec` on `grid` and records snapshots every `store_every`
/// steps (and at the final time).
pub fn run(
    grid: GridSpec,
    spec: &EquationSpec,
    integ: &IntegratorSpec,
    diagnostics: &DiagnosticsSpec,
    seed: u64,
) -> std::result::Result<Trajectory, Box<RunFailure>> {
    let mut traj = Trajectory {
        grid,
        equation: spec.clone(),
        integrator: *integ,
        diagnostics: diagnostics.clone(),
        seed,
        snapshots: Vec::new(),
        columns: diagnostics.columns(),
        rows: Vec::new(),
    };
    match drive(&mut traj) {
        Ok(()) => Ok(traj),
        Err(error) => Err(Box::new(RunFailure { error, partial: traj })),
    }
}

fn drive(traj: &mut Trajectory) -> Result<()> {
    let grid = traj.grid;
    let spec = traj.equation.clone();
    let integ = traj.integrator;
    let steps = integ.steps()?;
    traj.diagnostics.validate()?;
    let stepper = Stepper::new(grid, &spec, integ.scheme)?;
    let u = spec.initial_data.build(grid, traj.seed)?;
    check_state(&u)?;
    traj.rows.push(traj.diagnostics.evaluate(&u, &spec)?);
    traj.snapshots.push(u.clone());
    let mut p = Propagator::new(&stepper, &u)?;
    for j in 1..=steps {
        p.advance_to(j as f64 * integ.dt)?;
        if j % integ.store_every == 0 || j == steps {
            let u = p.field();
            traj.rows.push(traj.diagnostics.evaluate(&u, &spec)?);
            traj.snapshots.push(u.clone());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub code_version: String,
    pub grid: GridSpec,
    pub equation: EquationSpec,
    pub integrator: IntegratorSpec,
    pub diagnostics: DiagnosticsSpec,
    pub seed: u64,
    pub snapshots: Vec<String>,
    #[serde(default)]
    pub extra: serde_json::Value,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// `diagnostics.csv` contents: header plus shortest round-trip decimals.
    pub fn diagnostics_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    /// Writes `manifest.json`, `snapshots/NNNNN.fnls` and `diagnostics.csv`.
    pub fn save(&self, dir: &Path, extra: serde_json::Value) -> Result<()> {
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        let mut names = Vec::with_capacity(self.snapshots.len());
        for (i, s) in self.snapshots.iter().enumerate() {
            let name = format!("{i:05}.fnls");
            snapshot::write(&snap_dir.join(&name), s)?;
            names.push(format!("snapshots/{name}"));
        }
        let manifest = TrajectoryManifest {
            code_version: crate::CODE_VERSION.to_string(),
            grid: self.grid,
            equation: self.equation.clone(),
            integrator: self.integrator,
            diagnostics: self.diagnostics.clone(),
            seed: self.seed,
            snapshots: names,
            extra,
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        fs::write(dir.join("diagnostics.csv"), self.diagnostics_csv()?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: TrajectoryManifest =
            serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let snapshots = manifest
            .snapshots
            .iter()
            .map(|name| snapshot::read(&dir.join(name), manifest.grid.dealias_fraction))
            .collect::<Result<Vec<_>>>()?;
        let mut reader = csv::Reader::from_path(dir.join("diagnostics.csv"))?;
        let columns = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|v| {
                    v.parse::<f64>().map_err(|e| Error::Snapshot {
                        path: dir.join("diagnostics.csv"),
                        reason: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            grid: manifest.grid,
            equation: manifest.equation,
            integrator: manifest.integrator,
            diagnostics: manifest.diagnostics,
            seed: manifest.seed,
            snapshots,
            columns,
            rows,
        })
    }
}
