//! JSON run configuration. Every field is optional; command-line flags take
//! precedence over values read from the file.

use std::path::Path;

use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub drive: DriveConfig,
    pub sweep: SweepConfig,
    pub scenario: ScenarioConfig,
    pub integrator: IntegratorConfig,
    pub gate: GateConfig,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    pub rabi: Option<f64>,
    pub detuning_ratio: Option<f64>,
    pub rabi_ratio: Option<f64>,
    pub t_max: Option<f64>,
    pub decay_a_over_imc: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: Option<String>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mass: Option<f64>,
    pub lambda0: Option<f64>,
    pub k0r: Option<f64>,
    pub theta: Option<f64>,
    pub einstein_a: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    /// `"adaptive"` or `"rk4"`.
    pub method: Option<String>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_dt: Option<f64>,
    pub sample_every: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateConfig {
    pub ion: Option<u8>,
    pub angle: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}
