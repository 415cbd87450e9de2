// Copyright 2026 HybridSim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario configuration: JSON schema, command-line overrides, and
//! validation.
//!
//! A config file fully describes a run; every field can also be overridden
//! on the command line with `--set dotted.path=value` (flags win over the
//! file). The canonical JSON serialization of the *effective* config — after
//! all overrides, with execution-only fields masked — is hashed into the
//! output table's provenance header so emitted artifacts are traceable to
//! their exact physics inputs.
//!
//! Schema (all sections optional except `scenario`; defaults in brackets):
//!
//! ```json
//! {
//!   "scenario": "bz_map | adiabaticity_map | population_sweep |
//!                equivalence_check | eigen_report",
//!   "params":   { "field_scale": 1.0, "mu": 1.0, "d": 1.0, "a": 1.0,
//!                 "gamma": 1.0, "big_gamma": 0.0, "mass": 1.0,
//!                 "omega": 0.1 },
//!   "weights":  [0.333…, 0.333…, 0.333…, 0.0],
//!   "sweep":    [ { "name": "d", "min": 0.8, "max": 3.0, "count": 60 } ],
//!   "numerics": { "dt": 1e-3, "t_final": null, "a_min": 1e-6,
//!                 "equivalence_tol": 1e-7, "norm_tol": 1e-8, "cases": 50 },
//!   "report":   { "theta": 1.57, "phi": 0.0 },
//!   "output":   { "path": "out.csv", "format": "csv" },
//!   "seed": 42,
//!   "jobs": 0
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use hybridsim_core::dipole::HybridParams;
use hybridsim_core::geometry::Weights;
use serde::{Deserialize, Serialize};

/// Errors surfaced while loading or validating a configuration; all map to
/// the config-error exit code.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    BzMap,
    AdiabaticityMap,
    PopulationSweep,
    EquivalenceCheck,
    EigenReport,
}

impl ScenarioKind {
    /// Stable token used in CLI arguments and the config file alike.
    pub fn token(&self) -> &'static str {
        match self {
            Self::BzMap => "bz_map",
            Self::AdiabaticityMap => "adiabaticity_map",
            Self::PopulationSweep => "population_sweep",
            Self::EquivalenceCheck => "equivalence_check",
            Self::EigenReport => "eigen_report",
        }
    }

    /// Default evolution span where the scenario propagates in time.
    /// The equivalence oracle compares short evolutions; the figure sweeps
    /// cover the full damped collapse.
    pub fn default_t_final(&self) -> f64 {
        match self {
            Self::EquivalenceCheck => 8.0,
            _ => 200.0,
        }
    }
}

/// Physical parameters (mirrors the engine's parameter set; see the core
/// crate for the unit conventions).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub field_scale: f64,
    pub mu: f64,
    pub d: f64,
    pub a: f64,
    pub gamma: f64,
    pub big_gamma: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = HybridParams::default_reference();
        Self {
            field_scale: p.field_scale,
            mu: p.mu,
            d: p.d,
            a: p.a,
            gamma: p.gamma,
            big_gamma: p.big_gamma,
            mass: p.mass,
            omega: p.omega,
        }
    }
}

impl ParamsConfig {
    pub fn to_core(self) -> Result<HybridParams, ConfigError> {
        let params = HybridParams {
            field_scale: self.field_scale,
            mu: self.mu,
            d: self.d,
            a: self.a,
            gamma: self.gamma,
            big_gamma: self.big_gamma,
            mass: self.mass,
            omega: self.omega,
        };
        params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(params)
    }
}

/// One sweep axis: `count` evenly spaced values covering [min, max].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.to_string(),
            min,
            max,
            count,
        }
    }

    /// The grid values, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.count < 2 {
            return Err(ConfigError::Invalid(format!(
                "sweep axis '{}' needs count >= 2, got {}",
                self.name, self.count
            )));
        }
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "sweep axis '{}' needs finite min < max, got [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Integrator and tolerance knobs. `t_final` of `null` defers to the
/// scenario default (8 for the equivalence oracle, 200 for figure sweeps);
/// sweep scenarios with an explicit `t` axis take their span from that axis
/// instead.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Integrator step for propagation-based scenarios.
    pub dt: f64,
    /// Evolution span; `null` = scenario default.
    pub t_final: Option<f64>,
    /// Singular-disc radius under which geometric quantities are refused.
    pub a_min: f64,
    /// Max allowed master-vs-vectorized deviation per equivalence case.
    pub equivalence_tol: f64,
    /// Norm-drift level at which a population row is flagged.
    pub norm_tol: f64,
    /// Number of random cases in the equivalence check.
    pub cases: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: None,
            a_min: hybridsim_core::tolerances::A_MIN_DEFAULT,
            equivalence_tol: hybridsim_core::tolerances::EQUIVALENCE,
            norm_tol: hybridsim_core::tolerances::NORM_DRIFT,
            cases: 50,
        }
    }
}

impl NumericsConfig {
    pub fn resolved_t_final(&self, scenario: ScenarioKind) -> f64 {
        self.t_final.unwrap_or_else(|| scenario.default_t_final())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("dt", self.dt),
            ("a_min", self.a_min),
            ("equivalence_tol", self.equivalence_tol),
            ("norm_tol", self.norm_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::Invalid(format!(
                    "numerics.{name} must be positive and finite, got {v}"
                )));
            }
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0) || !t.is_finite() {
                return Err(ConfigError::Invalid(format!(
                    "numerics.t_final must be positive and finite, got {t}"
                )));
            }
        }
        if self.cases == 0 {
            return Err(ConfigError::Invalid(
                "numerics.cases must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Explicit (θ, φ) for the eigen report; when absent the report evaluates
/// the local frame at the reference position (a, 0).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportPoint {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Gnuplot,
}

/// Output destination recorded in the config (the `--out`/`--format` flags
/// override these).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

fn default_weights() -> [f64; 4] {
    *Weights::equal_thirds().p()
}

fn default_seed() -> u64 {
    42
}

/// A complete scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub params: ParamsConfig,
    /// Branch weights p₁..p₄ (must sum to 1); default (⅓, ⅓, ⅓, 0).
    #[serde(default = "default_weights")]
    pub weights: [f64; 4],
    /// Sweep axes; empty = scenario defaults.
    #[serde(default)]
    pub sweep: Vec<AxisSpec>,
    #[serde(default)]
    pub numerics: NumericsConfig,
    /// Eigen-report evaluation point (ignored by other scenarios).
    #[serde(default)]
    pub report: Option<ReportPoint>,
    #[serde(default)]
    pub output: OutputConfig,
    /// RNG seed for randomized scenarios.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Parallel workers; 0 = all available cores.
    #[serde(default)]
    pub jobs: usize,
}

impl ScenarioConfig {
    /// Minimal in-memory config for programmatic use (tests, defaults).
    pub fn for_scenario(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            params: ParamsConfig::default(),
            weights: default_weights(),
            sweep: Vec::new(),
            numerics: NumericsConfig::default(),
            report: None,
            output: OutputConfig::default(),
            seed: default_seed(),
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.to_core()?;
        Weights::new(self.weights).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.numerics.validate()?;
        let mut seen = std::collections::HashSet::new();
        for axis in &self.sweep {
            axis.validate()?;
            if !seen.insert(axis.name.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "duplicate sweep axis '{}'",
                    axis.name
                )));
            }
        }
        Ok(())
    }

    /// The named axis, or the scenario's documented default.
    pub fn axis_or(&self, name: &str, default: AxisSpec) -> AxisSpec {
        self.sweep
            .iter()
            .find(|a| a.name == name)
            .cloned()
            .unwrap_or(default)
    }

    /// Canonical JSON of the physics-relevant content: execution-only
    /// fields (output destination, worker count) are masked so the hash in
    /// the provenance header identifies the computed result, not where or
    /// how parallel it ran.
    pub fn canonical_json(&self) -> String {
        let mut masked = self.clone();
        masked.output = OutputConfig::default();
        masked.jobs = 0;
        serde_json::to_string(&masked).expect("config serializes")
    }
}

/// Load a config file and apply `--set dotted.path=value` overrides in
/// order, then validate.
///
/// Override values parse as JSON when possible (numbers, booleans, arrays)
/// and fall back to strings, so `--set params.gamma=2.5` and
/// `--set output.format=gnuplot` both work. Numeric path segments index
/// arrays: `--set weights.3=0.1`, `--set sweep.0.count=10`.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    finish_config(value, overrides)
}

/// All-defaults config for a scenario with `--set` overrides applied —
/// the no-config-file invocation path.
pub fn config_for_scenario(
    scenario: ScenarioKind,
    overrides: &[String],
) -> Result<ScenarioConfig, ConfigError> {
    let base = ScenarioConfig::for_scenario(scenario);
    let value = serde_json::to_value(&base)?;
    finish_config(value, overrides)
}

fn finish_config(
    mut value: serde_json::Value,
    overrides: &[String],
) -> Result<ScenarioConfig, ConfigError> {
    for spec in overrides {
        apply_override(&mut value, spec)?;
    }
    let config: ScenarioConfig = serde_json::from_value(value)?;
    config.validate()?;
    Ok(config)
}

fn apply_override(root: &mut serde_json::Value, spec: &str) -> Result<(), ConfigError> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| {
        ConfigError::Invalid(format!("--set expects dotted.path=value, got '{spec}'"))
    })?;
    if path.is_empty() {
        return Err(ConfigError::Invalid("--set path is empty".into()));
    }
    let leaf: serde_json::Value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));

    let mut cursor = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i == segments.len() - 1;
        if let Ok(index) = seg.parse::<usize>() {
            let arr = cursor.as_array_mut().ok_or_else(|| {
                ConfigError::Invalid(format!("'{path}': segment '{seg}' indexes a non-array"))
            })?;
            if index >= arr.len() {
                return Err(ConfigError::Invalid(format!(
                    "'{path}': index {index} out of bounds (len {})",
                    arr.len()
                )));
            }
            if last {
                arr[index] = leaf;
                return Ok(());
            }
            cursor = &mut arr[index];
        } else {
            let obj = cursor.as_object_mut().ok_or_else(|| {
                ConfigError::Invalid(format!("'{path}': segment '{seg}' keys a non-object"))
            })?;
            if last {
                obj.insert(seg.to_string(), leaf);
                return Ok(());
            }
            cursor = obj
                .entry(seg.to_string())
                .or_insert_with(|| serde_json::Value::Object(serde_json::Map::new()));
        }
    }
    unreachable!("loop returns on the last segment");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> PathBuf {
        let path = std::env::temp_dir().join(format!(
            "hybridsim-config-{}-{:?}.json",
            std::process::id(),
            std::thread::current().id()
        ));
        fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let path = write_temp(r#"{"scenario": "bz_map"}"#);
        let config = load_config(&path, &[]).unwrap();
        assert_eq!(config.scenario, ScenarioKind::BzMap);
        assert_eq!(config.params.d, 1.0);
        assert_eq!(config.seed, 42);
        assert!((config.weights[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(config.weights[3], 0.0);
        fs::remove_file(path).ok();
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let path = write_temp(r#"{"scenario": "bz_map", "sweep": [{"name": "d", "min": 1.0, "max": 2.0, "count": 5}]}"#);
        let overrides = vec![
            "params.gamma=2.5".to_string(),
            "sweep.0.count=9".to_string(),
            "numerics.dt=0.01".to_string(),
            "output.format=gnuplot".to_string(),
        ];
        let config = load_config(&path, &overrides).unwrap();
        assert_eq!(config.params.gamma, 2.5);
        assert_eq!(config.sweep[0].count, 9);
        assert_eq!(config.numerics.dt, 0.01);
        assert_eq!(config.output.format, OutputFormat::Gnuplot);
        fs::remove_file(path).ok();
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for (content, what) in [
            (r#"{"scenario": "bz_map", "params": {"d": -1.0}}"#, "negative d"),
            (r#"{"scenario": "bz_map", "weights": [1.0, 1.0, 0.0, 0.0]}"#, "weights sum"),
            (
                r#"{"scenario": "bz_map", "sweep": [{"name": "d", "min": 1.0, "max": 1.0, "count": 5}]}"#,
                "empty axis range",
            ),
            (
                r#"{"scenario": "bz_map", "sweep": [{"name": "d", "min": 0.0, "max": 1.0, "count": 1}]}"#,
                "count below 2",
            ),
            (r#"{"scenario": "bz_map", "numerics": {"dt": 0.0}}"#, "zero dt"),
            (r#"{"scenario": "bz_map", "typo_field": 1}"#, "unknown field"),
            (r#"{"scenario": "warp_drive"}"#, "unknown scenario"),
        ] {
            let path = write_temp(content);
            assert!(load_config(&path, &[]).is_err(), "accepted config with {what}");
            fs::remove_file(path).ok();
        }
    }

    #[test]
    fn canonical_json_masks_execution_fields() {
        let mut a = ScenarioConfig::for_scenario(ScenarioKind::EigenReport);
        let mut b = a.clone();
        a.jobs = 1;
        b.jobs = 8;
        b.output.path = Some(PathBuf::from("/somewhere/else.csv"));
        assert_eq!(a.canonical_json(), b.canonical_json());
    }

    #[test]
    fn axis_values_hit_endpoints_exactly() {
        let axis = AxisSpec::new("gamma", 0.0, 50.0, 60);
        let values = axis.values();
        assert_eq!(values.len(), 60);
        assert_eq!(values[0], 0.0);
        assert_eq!(values[59], 50.0);
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }
}
