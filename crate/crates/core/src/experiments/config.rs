//! Experiment configuration: TOML (human) or JSON (machine), with dotted
//! `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{Diagnostic, DiagnosticsSpec, EquationSpec, IntegratorSpec};
use crate::imethod::IOperatorSpec;
use crate::spectral::GridSpec;
use crate::verify::SweepVariant;
use crate::{Error, Result};

/// The configuration shipped with the laboratory.
pub const DEFAULT_CONFIG: &str = include_str!("../../configs/default.toml");

fn default_diagnostics() -> Vec<Diagnostic> {
    vec![Diagnostic::Mass]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

/// Parameters of the `sweep` command. Without `use_base` the grid, data and
/// step are taken from the built-in preset of the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_variant")]
    pub variant: SweepVariant,
    /// Overrides the preset dispersion exponent.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Overrides the preset Sobolev index.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default = "default_ns")]
    pub ns: Vec<f64>,
    #[serde(default = "default_m_power")]
    pub m_power: f64,
    /// Accepted slack `δ`: the fitted slope must not exceed `theory + δ`.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Also runs the linear flow, whose decrement must vanish.
    #[serde(default = "default_true")]
    pub free_control: bool,
    /// Sweep the top-level grid/equation/integrator instead of the preset.
    #[serde(default)]
    pub use_base: bool,
}

fn default_variant() -> SweepVariant {
    SweepVariant::Torus
}

fn default_ns() -> Vec<f64> {
    vec![4.0, 8.0, 16.0, 32.0]
}

fn default_m_power() -> f64 {
    2.0
}

fn default_slack() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            variant: default_variant(),
            alpha: None,
            s: None,
            ns: default_ns(),
            m_power: default_m_power(),
            slack: default_slack(),
            free_control: true,
            use_base: false,
        }
    }
}

/// Parameters of the `probe` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
    /// Ensemble seed; the run seed when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Temporal exponent of the `X^{0,b}` norm in the L⁴ probe.
    #[serde(default = "default_b")]
    pub b: f64,
    /// The `ε` of the L⁶ and trilinear norms.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Regularity of the trilinear probe; the local threshold when absent.
    #[serde(default)]
    pub s: Option<f64>,
    /// Regularities of the concentration scan (may lie below the threshold).
    #[serde(default = "default_concentration_s")]
    pub concentration_s: Vec<f64>,
    /// Concentration frequencies `2^k`.
    #[serde(default = "default_concentration_k")]
    pub concentration_k: Vec<u32>,
    /// Range of the exhaustive resonance enumeration.
    #[serde(default = "default_resonance_range")]
    pub resonance_range: i64,
    #[serde(default = "default_counting_samples")]
    pub counting_samples: usize,
}

fn default_ensemble_size() -> usize {
    100
}

fn default_b() -> f64 {
    1.0 / 3.0
}

fn default_eps() -> f64 {
    0.01
}

fn default_concentration_s() -> Vec<f64> {
    vec![0.0, -0.25, -0.5]
}

fn default_concentration_k() -> Vec<u32> {
    vec![2, 3, 4]
}

fn default_resonance_range() -> i64 {
    32
}

fn default_counting_samples() -> usize {
    1000
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            ensemble_size: default_ensemble_size(),
            seed: None,
            b: default_b(),
            eps: default_eps(),
            s: None,
            concentration_s: default_concentration_s(),
            concentration_k: default_concentration_k(),
            resonance_range: default_resonance_range(),
            counting_samples: default_counting_samples(),
        }
    }
}

/// One complete experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridSpec,
    pub equation: EquationSpec,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub i_operator: Option<IOperatorSpec>,
    #[serde(default = "default_diagnostics")]
    pub diagnostics: Vec<Diagnostic>,
    /// Index of the `h_s_norm` diagnostic.
    #[serde(default)]
    pub sobolev_index: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub probe: ProbeSection,
}

/// 1-based line of byte `offset` in `text`.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn config_error(origin: &str, line: Option<usize>, reason: impl std::fmt::Display) -> Error {
    let path = match line {
        Some(l) => format!("{origin}:{l}"),
        None => origin.to_string(),
    };
    Error::Config {
        path,
        reason: reason.to_string(),
    }
}

/// Parses `text` (JSON when `json`, TOML otherwise) into `T`, reporting the
/// line of the first error.
fn parse_text<T: serde::de::DeserializeOwned>(text: &str, json: bool, origin: &str) -> Result<T> {
    if json {
        serde_json::from_str(text).map_err(|e| config_error(origin, Some(e.line()), e))
    } else {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            config_error(origin, line, e.message())
        })
    }
}

/// Interprets the right-hand side of an override: JSON literals (numbers,
/// booleans, arrays, objects, quoted strings) or else a bare string.
fn override_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Applies `a.b.c=value` to a JSON tree, creating intermediate tables.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error("--set", None, format!("expected key=value, got `{assignment}`")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_error("--set", None, format!("malformed key `{key}`")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        if !node.is_object() {
            return Err(config_error("--set", None, format!("`{key}`: `{part}` is not a table")));
        }
        node = node
            .as_object_mut()
            .expect("checked above")
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| config_error("--set", None, format!("`{key}` does not name a table entry")))?;
    obj.insert(parts[parts.len() - 1].to_string(), override_value(raw.trim()));
    Ok(())
}

impl ExperimentConfig {
    /// The shipped default configuration.
    pub fn default_config() -> Result<Self> {
        parse_text(DEFAULT_CONFIG, false, "<default config>")
    }

    /// Parses configuration text, applies overrides and validates.
    pub fn from_text(text: &str, json: bool, origin: &str, overrides: &[String]) -> Result<Self> {
        let config: Self = if overrides.is_empty() {
            parse_text(text, json, origin)?
        } else {
            let mut tree: Value = parse_text(text, json, origin)?;
            for o in overrides {
                apply_override(&mut tree, o)?;
            }
            serde_json::from_value(tree).map_err(|e| {
                // Blame the file (with its line) unless overrides could have filled a gap.
                match parse_text::<Self>(text, json, origin) {
                    Err(Error::Config { path, reason }) if !reason.contains("missing field") => {
                        Error::Config { path, reason }
                    }
                    _ => config_error(origin, None, format!("after --set overrides: {e}")),
                }
            })?
        };
        config.validate().map_err(|e| match e {
            Error::Config { .. } => e,
            other => config_error(origin, None, other),
        })?;
        Ok(config)
    }

    /// Loads a file, or the shipped default when `path` is `None`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        match path {
            None => Self::from_text(DEFAULT_CONFIG, false, "<default config>", overrides),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| config_error(&p.display().to_string(), None, e))?;
                Self::from_text(&text, is_json(p), &p.display().to_string(), overrides)
            }
        }
    }

    /// The equation with a gauged-form reference filled from the data.
    pub fn resolved_equation(&self) -> Result<EquationSpec> {
        self.equation.clone().with_reference_from_initial(self.grid, self.seed)
    }

    pub fn diagnostics_spec(&self) -> DiagnosticsSpec {
        DiagnosticsSpec {
            series: self.diagnostics.clone(),
            sobolev_index: self.sobolev_index,
            i_operator: self.i_operator,
        }
    }

    /// Validates the configuration as a whole.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::InvalidParameter(format!(
                "name must be a non-empty single path component, got `{}`",
                self.name
            )));
        }
        let equation = self.resolved_equation()?;
        equation.validate(&self.grid)?;
        self.integrator.validate()?;
        self.diagnostics_spec().validate()?;
        let sweep = &self.sweep;
        if sweep.ns.len() < 4 || sweep.ns.windows(2).any(|w| w[1] != 2.0 * w[0]) {
            return Err(Error::InvalidParameter(format!(
                "sweep.ns must hold at least 4 dyadic thresholds, got {:?}",
                sweep.ns
            )));
        }
        if !(sweep.slack >= 0.0 && sweep.slack.is_finite()) {
            return Err(Error::InvalidParameter(format!("sweep.slack must be >= 0, got {}", sweep.slack)));
        }
        if let Some(s) = sweep.s {
            if !(s < 0.0) {
                return Err(Error::InvalidParameter(format!("sweep.s must be negative, got {s}")));
            }
        }
        if let Some(a) = sweep.alpha {
            if !(a > 2.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!("sweep.alpha must exceed 2, got {a}")));
            }
        }
        let probe = &self.probe;
        if !(probe.b > 0.0 && probe.eps > 0.0 && probe.eps < 0.5) {
            return Err(Error::InvalidParameter("probe.b must be > 0 and probe.eps in (0, 1/2)".into()));
        }
        if !(1..=crate::verify::RESONANCE_MAX_RANGE).contains(&probe.resonance_range) {
            return Err(Error::InvalidParameter(format!(
                "probe.resonance_range must lie in 1..={}",
                crate::verify::RESONANCE_MAX_RANGE
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_parses_and_validates() {
        let c = ExperimentConfig::default_config().unwrap();
        c.validate().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back = ExperimentConfig::from_text(&json, true, "json", &[]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = ExperimentConfig::from_text(
            DEFAULT_CONFIG,
            false,
            "default",
            &["equation.alpha=3.5".into(), "name=other".into(), "sweep.ns=[2,4,8,16]".into()],
        )
        .unwrap();
        assert_eq!(c.equation.alpha, 3.5);
        assert_eq!(c.name, "other");
        assert_eq!(c.sweep.ns, vec![2.0, 4.0, 8.0, 16.0]);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let text = format!("{DEFAULT_CONFIG}\nbogus = 1\n");
        match ExperimentConfig::from_text(&text, false, "cfg.toml", &[]) {
            Err(Error::Config { path, reason }) => {
                assert!(path.starts_with("cfg.toml:"), "{path}");
                assert!(reason.contains("bogus"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        match ExperimentConfig::from_text("name = \"x\"\nbogus = 1\n", false, "cfg.toml", &["seed=3".into()]) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "cfg.toml:2"),
            other => panic!("{other:?}"),
        }
        let e = ExperimentConfig::from_text(DEFAULT_CONFIG, false, "cfg", &["grid.nonsense=3".into()]);
        assert!(matches!(e, Err(Error::Config { .. })));
    }

    #[test]
    fn json_errors_carry_lines() {
        match ExperimentConfig::from_text("{\n\"name\": \"x\",\n\"grid\": 3\n}", true, "c.json", &[]) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "c.json:3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        for o in ["equation.alpha=1.5", "integrator.dt=-1", "grid.modes=7", "name=a/b"] {
            assert!(ExperimentConfig::from_text(DEFAULT_CONFIG, false, "d", &[o.into()]).is_err(), "{o}");
        }
    }
}
