use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::model::{ModelKind, ProbeParams, SpinModel, ThermalParams};

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub lambda: f64,
    pub h0: f64,
}

/// TOML model description; unknown keys are rejected.
///
/// ```toml
/// sites = 2
/// kind = "ising_zz"
/// couplings = [[0, 1, 1.0]]
/// field_h = -1.0
/// beta = 0.5
/// hbar = 1.0
///
/// [probe]
/// lambda = 1.0
/// h0 = -1.0
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub sites: usize,
    pub kind: ModelKind,
    #[serde(default)]
    pub couplings: Vec<(usize, usize, f64)>,
    pub field_h: f64,
    pub probe: ProbeSection,
    pub beta: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub model: SpinModel,
    pub probe: ProbeParams,
    pub thermal: ThermalParams,
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<LoadedModel, CliError> {
        let invalid = |e: crate::Error| CliError::Parse(e.to_string());
        Ok(LoadedModel {
            model: SpinModel::new(self.sites, self.kind, self.couplings.iter().copied(), self.field_h)
                .map_err(invalid)?,
            probe: ProbeParams::new(self.probe.lambda, self.probe.h0).map_err(invalid)?,
            thermal: ThermalParams::with_hbar(self.beta, self.hbar).map_err(invalid)?,
        })
    }
}
