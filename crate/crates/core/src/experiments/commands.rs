//! The five laboratory commands. Each writes into a run-private staging
//! directory that is renamed into place when done; failed runs keep their
//! partial output next to a `FAILED` marker.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::output::{
    bound_reports_text, csv_text, diagnostics_gnuplot, scaling_csv, scaling_gnuplot, scaling_text, write_json,
    write_manifest, ArtifactDir,
};
use super::suite::{run_suite, VerifySummary};
use super::{ExperimentConfig, SweepSection};
use crate::dynamics::{run, EquationForm, EquationSpec, InitialDataSpec, IntegratorSpec, Sign};
use crate::imethod::scan_sigma4_bound;
use crate::spectral::{lwp_threshold, GridSpec};
use crate::verify::{
    check_counting_phase_samples, check_resonance_bound, probe_strichartz, probe_trilinear, sweep_almost_conservation,
    trilinear_concentration, BoundReport, Ensemble, Extremum, ScalingReport, StrichartzExponent, SweepSpec,
    SweepVariant, TrilinearForm, SWEEP_NOISE_FLOOR,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Verify,
    Probe,
    Sweep,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Probe => "probe",
            Command::Sweep => "sweep",
            Command::Report => "report",
        }
    }
}

/// What a command produced; `passed` is false iff a hard assertion failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub dir: PathBuf,
    pub passed: bool,
    pub summary: String,
}

/// Runs `f` on a dedicated pool of `jobs` workers (the global pool when
/// `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidParameter("jobs must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Publishes a staged directory, recording `err` as the failure reason.
fn finish<T>(dir: ArtifactDir, result: Result<T>) -> Result<(PathBuf, T)> {
    match result {
        Ok(v) => Ok((dir.publish()?, v)),
        Err(e) => {
            let _ = dir.publish_failed(&e.to_string());
            Err(e)
        }
    }
}

/// Integrates the configured equation: `manifest.json`, `snapshots/`,
/// `diagnostics.csv` and `diagnostics.gp`.
pub fn simulate(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let equation = config.resolved_equation()?;
    let dir = ArtifactDir::begin(&config.output_dir, &config.name)?;
    let extra = serde_json::json!({ "command": "simulate", "config": config });
    let traj = match run(config.grid, &equation, &config.integrator, &config.diagnostics_spec(), config.seed) {
        Ok(t) => t,
        Err(failure) => {
            let reason = failure.error.to_string();
            let saved = failure.partial.save(dir.path(), extra);
            let path = dir.publish_failed(&reason)?;
            saved?;
            return Ok(Outcome {
                command: Command::Simulate,
                dir: path,
                passed: false,
                summary: format!("run failed: {reason}"),
            });
        }
    };
    let written = traj.save(dir.path(), extra).and_then(|()| {
        fs::write(dir.path().join("diagnostics.gp"), diagnostics_gnuplot("diagnostics.csv", &traj.columns))?;
        Ok(())
    });
    let (path, ()) = finish(dir, written)?;
    Ok(Outcome {
        command: Command::Simulate,
        dir: path,
        passed: true,
        summary: format!("{} snapshots up to t = {}", traj.snapshots.len(), config.integrator.t_end),
    })
}

/// Runs the desk-scale identity/lemma suite: `summary.json`, `summary.txt`.
pub fn verify(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = ArtifactDir::begin(&config.output_dir, &format!("{}-verify", config.name))?;
    let summary = run_suite(config);
    let written = write_manifest(dir.path(), "verify", config)
        .and_then(|()| write_json(&dir.path().join("summary.json"), &summary))
        .and_then(|()| Ok(fs::write(dir.path().join("summary.txt"), summary_text(&summary))?));
    let failed = summary.checks.iter().filter(|c| !c.passed).count();
    let (path, ()) = if summary.passed {
        finish(dir, written)?
    } else {
        written?;
        (dir.publish_failed(&format!("{failed} check(s) failed"))?, ())
    };
    Ok(Outcome {
        command: Command::Verify,
        dir: path,
        passed: summary.passed,
        summary: format!("{} checks, {failed} failed", summary.checks.len()),
    })
}

pub fn summary_text(summary: &VerifySummary) -> String {
    let bound = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:e}"));
    let rows: Vec<Vec<String>> = summary
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                if c.passed { "PASS" } else { "FAIL" }.to_string(),
                format!("{:.6e}", c.measured),
                bound(c.above),
                bound(c.at_most),
                c.detail.clone(),
            ]
        })
        .collect();
    super::output::aligned_table(&["check", "status", "measured", "above", "at_most", "detail"], &rows)
}

/// Largest ratio change tolerated when the probe's time grid is doubled.
pub const PROBE_DOUBLING_TOLERANCE: f64 = 0.2;

/// Grid of the concentration scan (its band holds frequency 17).
const CONCENTRATION_MODES: usize = 64;

fn concentration_report(
    alpha: f64,
    s: f64,
    form: TrilinearForm,
    eps: f64,
    exponents: &[u32],
) -> Result<BoundReport> {
    let grid = GridSpec::torus(CONCENTRATION_MODES)?;
    let ratios = trilinear_concentration(alpha, s, form, eps, exponents, grid, 0.1, 128)?;
    let mut r = BoundReport::new(
        format!("trilinear concentration ({form:?}) at frequencies 2^k").to_lowercase(),
        Extremum::Max,
    );
    for (&k, &ratio) in exponents.iter().zip(&ratios) {
        r.observe(ratio, &[k as i64]);
        r.parameter(&format!("ratio_k{k}"), ratio);
    }
    if let (Some(first), Some(last)) = (ratios.first(), ratios.last()) {
        r.parameter("growth", last / first);
    }
    r.parameter("alpha", alpha);
    r.parameter("s", s);
    r.parameter("threshold", lwp_threshold(alpha, form.domain())?);
    Ok(r)
}

fn probe_reports(config: &ExperimentConfig) -> Result<(Vec<BoundReport>, Vec<String>)> {
    let p = &config.probe;
    let alpha = config.equation.alpha;
    let seed = p.seed.unwrap_or(config.seed);
    let mut reports = Vec::new();
    let mut failures = Vec::new();

    let resonance = check_resonance_bound(alpha, p.resonance_range)?;
    if !(resonance.worst_ratio > 0.0) {
        failures.push(format!("resonance minimum {} is not positive", resonance.worst_ratio));
    }
    let control = check_resonance_bound(2.0, p.resonance_range)?;
    if (control.worst_ratio - 2.0).abs() > 1e-12 {
        failures.push(format!("alpha=2 resonance control returned {}", control.worst_ratio));
    }
    reports.extend([resonance, control]);

    let counting = check_counting_phase_samples(p.counting_samples, seed)?;
    if counting.parameters["violations"] != 0.0 {
        failures.push(format!("{} counting-lemma violations", counting.parameters["violations"]));
    }
    reports.push(counting);

    let ensemble = Ensemble::desk(p.ensemble_size, seed)?;
    for exponent in [StrichartzExponent::L4, StrichartzExponent::L6] {
        let r = probe_strichartz(alpha, p.b, exponent, p.eps, &ensemble)?;
        let change = r.parameters.get("doubling_change").copied().unwrap_or(f64::NAN);
        if !(change <= PROBE_DOUBLING_TOLERANCE) {
            failures.push(format!("{exponent:?} ratio changed by {change} under grid doubling"));
        }
        reports.push(r);
    }
    for form in [TrilinearForm::Line, TrilinearForm::Circle] {
        let s = p.s.unwrap_or(lwp_threshold(alpha, form.domain())?);
        reports.push(probe_trilinear(alpha, s, form, p.eps, &ensemble)?);
        for &s in &p.concentration_s {
            reports.push(concentration_report(alpha, s, form, p.eps, &p.concentration_k)?);
        }
    }
    if let Some(op) = &config.i_operator {
        reports.push(scan_sigma4_bound(op, &config.grid, alpha)?);
    }
    for r in &reports {
        if !r.worst_ratio.is_finite() {
            failures.push(format!("non-finite ratio in `{}`", r.description));
        }
    }
    Ok((reports, failures))
}

/// Lemma checks and estimate probes: `probe.json`, `probe.txt`.
pub fn probe(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = ArtifactDir::begin(&config.output_dir, &format!("{}-probe", config.name))?;
    let result = write_manifest(dir.path(), "probe", config).and_then(|()| {
        let (reports, failures) = probe_reports(config)?;
        write_json(&dir.path().join("probe.json"), &reports)?;
        fs::write(dir.path().join("probe.txt"), bound_reports_text(&reports))?;
        Ok((reports.len(), failures))
    });
    let (n, failures) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = dir.publish_failed(&e.to_string());
            return Err(e);
        }
    };
    let passed = failures.is_empty();
    let path = if passed { dir.publish()? } else { dir.publish_failed(&failures.join("\n"))? };
    Ok(Outcome {
        command: Command::Probe,
        dir: path,
        passed,
        summary: if passed {
            format!("{n} reports")
        } else {
            format!("{n} reports; failures: {}", failures.join("; "))
        },
    })
}

/// Phase increment `dt·max|nκ|^α` that the sweep presets keep below.
pub const SWEEP_PHASE_STEP: f64 = 0.375;

/// Steps that resolve the linear phases on `grid`, rounded so that
/// `snapshots` stores are evenly spaced in blocks of 50 steps.
fn resolved_integrator(grid: &GridSpec, alpha: f64, t_end: f64, base_dt: f64, snapshots: usize) -> IntegratorSpec {
    let omega = grid.symbol(grid.cutoff(), alpha);
    let phase_steps = (t_end * omega / SWEEP_PHASE_STEP).ceil() as usize;
    let base_steps = (t_end / base_dt).round() as usize;
    let block = 50 * snapshots;
    let steps = phase_steps.max(base_steps).div_ceil(block) * block;
    IntegratorSpec::new(t_end / steps as f64, t_end, steps / snapshots)
}

/// The built-in sweep setups.
///
/// * torus: `K = 128` on `ℝ/2πℤ`, gauged flow from rough random data
///   (`γ = 1/2`), `α = 3`, `s = −1/6`, `t ≤ 0.1`;
/// * line: `K = 128` on `ℝ/16πℤ`, original flow from rough random data of
///   amplitude 1/2, `α = 5/2`, `s = −1/8`, `t ≤ 0.5`.
///
/// Steps resolve the dispersive phase (see [`SWEEP_PHASE_STEP`]).
pub fn sweep_preset(section: &SweepSection) -> Result<SweepSpec> {
    let (grid, alpha, s, form, amplitude, t_end, snapshots) = match section.variant {
        SweepVariant::Torus => (GridSpec::torus(128)?, 3.0, -1.0 / 6.0, EquationForm::Gauged, 1.0, 0.1, 20),
        SweepVariant::Line => (
            GridSpec::new(128, 16.0 * PI, 2.0 / 3.0)?,
            2.5,
            -0.125,
            EquationForm::Original,
            0.5,
            0.5,
            10,
        ),
    };
    let alpha = section.alpha.unwrap_or(alpha);
    let equation = EquationSpec::new(alpha, Sign::Defocusing, form, InitialDataSpec::random_rough(0.5, 11, amplitude))
        .with_reference_from_initial(grid, 0)?;
    Ok(SweepSpec {
        grid,
        equation,
        integrator: resolved_integrator(&grid, alpha, t_end, 1e-3, snapshots),
        variant: section.variant,
        s: section.s.unwrap_or(s),
        ns: section.ns.clone(),
        m_power: section.m_power,
        seed: 0,
    })
}

/// The sweep described by a configuration.
pub fn sweep_spec(config: &ExperimentConfig) -> Result<SweepSpec> {
    let section = &config.sweep;
    if !section.use_base {
        return sweep_preset(section);
    }
    let mut equation = config.resolved_equation()?;
    if let Some(a) = section.alpha {
        equation.alpha = a;
    }
    let s = section
        .s
        .or(config.i_operator.map(|op| op.s))
        .ok_or_else(|| Error::InvalidParameter("sweep.s or i_operator.s is required with use_base".into()))?;
    Ok(SweepSpec {
        grid: config.grid,
        equation,
        integrator: config.integrator,
        variant: section.variant,
        s,
        ns: section.ns.clone(),
        m_power: section.m_power,
        seed: config.seed,
    })
}

/// The same sweep along the linear flow.
pub fn free_control(spec: &SweepSpec) -> SweepSpec {
    let mut free = spec.clone();
    free.equation.sign = Sign::Free;
    free
}

/// Everything `sweep.json` records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub report: ScalingReport,
    pub slack: f64,
    /// Decrements of the linear flow, which conserves `M⁴` exactly.
    pub free_control: Option<Vec<f64>>,
    pub free_control_tolerance: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Hard assertions of a sweep.
pub fn judge_sweep(report: &ScalingReport, slack: f64, free: Option<&ScalingReport>) -> (f64, Vec<String>) {
    let mut failures = Vec::new();
    if !report.monotone {
        failures.push(format!("decrements not monotone in N: {:?}", report.decrements));
    }
    match report.fitted_slope {
        Some(a) if a <= report.theory_exponent + slack => {}
        Some(a) => failures.push(format!(
            "fitted slope {a:.4} exceeds theory exponent {:.4} + slack {slack}",
            report.theory_exponent
        )),
        None => failures.push("no fitted slope (vanishing decrement)".into()),
    }
    let tolerance = SWEEP_NOISE_FLOOR * report.initial_mass.powi(2).max(1.0);
    if let Some(f) = free {
        let worst = f.decrements.iter().copied().fold(0.0, f64::max);
        if !(worst <= tolerance) {
            failures.push(format!("free-flow decrement {worst:e} exceeds {tolerance:e}"));
        }
    }
    (tolerance, failures)
}

/// Almost-conservation sweep: `sweep.json`, `sweep.csv`, `sweep.txt`,
/// `sweep.gp`. The nonlinear run and the free control run concurrently.
pub fn sweep(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let spec = sweep_spec(config)?;
    spec.validate()?;
    let name = format!(
        "{}-sweep-{}",
        config.name,
        match spec.variant {
            SweepVariant::Line => "line",
            SweepVariant::Torus => "torus",
        }
    );
    let dir = ArtifactDir::begin(&config.output_dir, &name)?;
    let result = write_manifest(dir.path(), "sweep", &serde_json::json!({ "config": config, "sweep": spec }))
        .and_then(|()| {
            let (main, free) = rayon::join(
                || sweep_almost_conservation(&spec),
                || config.sweep.free_control.then(|| sweep_almost_conservation(&free_control(&spec))).transpose(),
            );
            let mut report = main?;
            let free = free?;
            report.manifest_ref = Some(dir.target().join("manifest.json"));
            let (tolerance, failures) = judge_sweep(&report, config.sweep.slack, free.as_ref());
            let outcome = SweepOutcome {
                report,
                slack: config.sweep.slack,
                free_control: free.map(|f| f.decrements),
                free_control_tolerance: tolerance,
                passed: failures.is_empty(),
                failures,
            };
            write_sweep_files(dir.path(), &outcome)?;
            Ok(outcome)
        });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = dir.publish_failed(&e.to_string());
            return Err(e);
        }
    };
    let path = if outcome.passed { dir.publish()? } else { dir.publish_failed(&outcome.failures.join("\n"))? };
    let slope = outcome.report.fitted_slope.map_or("n/a".into(), |a| format!("{a:.4}"));
    Ok(Outcome {
        command: Command::Sweep,
        dir: path,
        passed: outcome.passed,
        summary: format!(
            "slope {slope}, theory exponent {:.4}, monotone {}{}",
            outcome.report.theory_exponent,
            outcome.report.monotone,
            if outcome.passed { String::new() } else { format!("; failures: {}", outcome.failures.join("; ")) }
        ),
    })
}

fn write_sweep_files(dir: &Path, outcome: &SweepOutcome) -> Result<()> {
    write_json(&dir.join("sweep.json"), outcome)?;
    fs::write(dir.join("sweep.csv"), scaling_csv(&outcome.report)?)?;
    fs::write(dir.join("sweep.gp"), scaling_gnuplot("sweep.csv", &outcome.report))?;
    let mut text = scaling_text(&outcome.report);
    if let Some(free) = &outcome.free_control {
        text.push_str(&format!(
            "free-flow control decrements {free:?} (tolerance {:e})\n",
            outcome.free_control_tolerance
        ));
    }
    fs::write(dir.join("sweep.txt"), text)?;
    Ok(())
}

/// Renders the artifacts found in `dir` into `report.txt` (and regenerates
/// the gnuplot scripts); returns the rendered text.
pub fn report(dir: &Path) -> Result<Outcome> {
    if !dir.is_dir() {
        return Err(Error::InvalidParameter(format!("{} is not a directory", dir.display())));
    }
    let mut text = String::new();
    let mut passed = true;
    let mut found = 0;
    if dir.join("diagnostics.csv").exists() {
        found += 1;
        let csv_path = dir.join("diagnostics.csv");
        let table = csv_text(&csv_path)?;
        let header: Vec<String> = csv::Reader::from_path(&csv_path)?
            .headers()?
            .iter()
            .map(str::to_string)
            .collect();
        fs::write(dir.join("diagnostics.gp"), diagnostics_gnuplot("diagnostics.csv", &header))?;
        text.push_str("== diagnostics ==\n");
        text.push_str(&table);
    }
    if dir.join("summary.json").exists() {
        found += 1;
        let summary: VerifySummary = serde_json::from_str(&fs::read_to_string(dir.join("summary.json"))?)?;
        passed &= summary.passed;
        text.push_str("== verify ==\n");
        text.push_str(&summary_text(&summary));
    }
    if dir.join("probe.json").exists() {
        found += 1;
        let reports: Vec<BoundReport> = serde_json::from_str(&fs::read_to_string(dir.join("probe.json"))?)?;
        text.push_str("== probe ==\n");
        text.push_str(&bound_reports_text(&reports));
    }
    if dir.join("sweep.json").exists() {
        found += 1;
        let outcome: SweepOutcome = serde_json::from_str(&fs::read_to_string(dir.join("sweep.json"))?)?;
        passed &= outcome.passed;
        fs::write(dir.join("sweep.gp"), scaling_gnuplot("sweep.csv", &outcome.report))?;
        text.push_str("== sweep ==\n");
        text.push_str(&scaling_text(&outcome.report));
    }
    if found == 0 {
        return Err(Error::InvalidParameter(format!("no artifacts found in {}", dir.display())));
    }
    if dir.join(super::output::FAILED_MARKER).exists() {
        passed = false;
        text.push_str("== FAILED ==\n");
        text.push_str(&fs::read_to_string(dir.join(super::output::FAILED_MARKER))?);
    }
    fs::write(dir.join("report.txt"), &text)?;
    Ok(Outcome {
        command: Command::Report,
        dir: dir.to_path_buf(),
        passed,
        summary: text,
    })
}
