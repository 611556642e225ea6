//! Run configuration (TOML).
//!
//! ```toml
//! [grid]
//! n = 32
//! L = 6.283185307179586
//!
//! [model]
//! kind = "ml-alpha"      # or "leray-alpha", "nse"
//! nu = 0.05
//! alpha = 0.1
//!
//! [forcing]
//! shell_m = 2
//! amplitude = 0.5        # f_rms; 0 disables forcing
//! seed = 1
//!
//! [init]
//! kind = "random"        # or "taylor-green", "rest"
//! amplitude = 0.5
//!
//! [time]
//! t_end = 10.0
//! output_every = 10      # steps between CSV rows
//! spinup = "auto"        # or a time
//! # dt = 0.01            # optional override of the CFL choice
//! # checkpoint_every = 1000
//!
//! [diagnostics]
//! N_max = 6
//! ladder_C_ref = 5.0     # C_ref(N) = ladder_C_ref * 2^N for N >= 1
//!
//! [paths]
//! outdir = "run"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::forcing::ForcingSpec;
use crate::grid::TorusGrid;
use crate::initial::InitKind;
use crate::model::{ModelKind, ModelParams};
use crate::norms::ORDER_LIMIT;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config value {field}: {message}")]
    Field { field: &'static str, message: String },
}

fn field_err(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub nu: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingConfig {
    pub shell_m: i64,
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: InitKind,
    #[serde(default = "default_init_amplitude")]
    pub amplitude: f64,
}

fn default_init_amplitude() -> f64 {
    1.0
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            kind: InitKind::Random,
            amplitude: default_init_amplitude(),
        }
    }
}

/// Spinup time, or `auto` for five large-eddy times `ℓ/U`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Spinup {
    #[default]
    Auto,
    Time(f64),
}

impl Serialize for Spinup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Spinup::Auto => s.serialize_str("auto"),
            Spinup::Time(t) => s.serialize_f64(*t),
        }
    }
}

impl<'de> Deserialize<'de> for Spinup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Spinup;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"auto\" or a non-negative time")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Spinup, E> {
                if v == "auto" {
                    Ok(Spinup::Auto)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Spinup, E> {
                Ok(Spinup::Time(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Spinup, E> {
                Ok(Spinup::Time(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Spinup, E> {
                Ok(Spinup::Time(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    #[serde(default)]
    pub spinup: Spinup,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
}

fn default_output_every() -> usize {
    10
}

fn default_checkpoint_every() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(rename = "N_max", default = "default_n_max")]
    pub n_max: usize,
    #[serde(rename = "ladder_C_ref", default = "default_c_ref")]
    pub ladder_c_ref: f64,
}

fn default_n_max() -> usize {
    crate::norms::DEFAULT_MAX_ORDER
}

fn default_c_ref() -> f64 {
    5.0
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            n_max: default_n_max(),
            ladder_c_ref: default_c_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub outdir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            outdir: PathBuf::from("run"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub forcing: ForcingConfig,
    #[serde(default)]
    pub init: InitConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub paths: PathsConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field; the error names the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let grid = TorusGrid::new(self.grid.n, self.grid.length).map_err(|e| {
            let field = if self.grid.length.is_finite() && self.grid.length > 0.0 {
                "grid.n"
            } else {
                "grid.L"
            };
            field_err(field, e.to_string())
        })?;
        if !(self.model.nu.is_finite() && self.model.nu > 0.0) {
            return Err(field_err("model.nu", format!("must be positive, got {}", self.model.nu)));
        }
        if !(self.model.alpha.is_finite() && self.model.alpha >= 0.0) {
            return Err(field_err(
                "model.alpha",
                format!("must be non-negative, got {}", self.model.alpha),
            ));
        }
        let max_shell = grid.dealias_cut() as i64 - 1;
        if self.forcing.shell_m < 2 || self.forcing.shell_m > max_shell {
            return Err(field_err(
                "forcing.shell_m",
                format!("must lie in [2, {max_shell}] for n = {}, got {}", self.grid.n, self.forcing.shell_m),
            ));
        }
        if !(self.forcing.amplitude.is_finite() && self.forcing.amplitude >= 0.0) {
            return Err(field_err(
                "forcing.amplitude",
                format!("must be non-negative, got {}", self.forcing.amplitude),
            ));
        }
        if !(self.init.amplitude.is_finite() && self.init.amplitude >= 0.0) {
            return Err(field_err(
                "init.amplitude",
                format!("must be non-negative, got {}", self.init.amplitude),
            ));
        }
        if !(self.time.t_end.is_finite() && self.time.t_end > 0.0) {
            return Err(field_err("time.t_end", format!("must be positive, got {}", self.time.t_end)));
        }
        if self.time.output_every == 0 {
            return Err(field_err("time.output_every", "must be at least 1"));
        }
        if self.time.checkpoint_every == 0 {
            return Err(field_err("time.checkpoint_every", "must be at least 1"));
        }
        if let Spinup::Time(t) = self.time.spinup {
            if !(t.is_finite() && t >= 0.0) {
                return Err(field_err("time.spinup", format!("must be \"auto\" or non-negative, got {t}")));
            }
        }
        if let Some(dt) = self.time.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(field_err("time.dt", format!("must be positive, got {dt}")));
            }
        }
        if self.diagnostics.n_max < 3 || self.diagnostics.n_max > ORDER_LIMIT {
            return Err(field_err(
                "diagnostics.N_max",
                format!("must lie in [3, {ORDER_LIMIT}], got {}", self.diagnostics.n_max),
            ));
        }
        if !(self.diagnostics.ladder_c_ref.is_finite() && self.diagnostics.ladder_c_ref > 0.0) {
            return Err(field_err(
                "diagnostics.ladder_C_ref",
                format!("must be positive, got {}", self.diagnostics.ladder_c_ref),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> TorusGrid {
        TorusGrid::new(self.grid.n, self.grid.length).expect("validated")
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.model.kind, self.model.nu, self.model.alpha).expect("validated")
    }

    pub fn forcing_spec(&self) -> ForcingSpec {
        ForcingSpec {
            shell_m: self.forcing.shell_m,
            amplitude: self.forcing.amplitude,
            seed: self.forcing.seed,
        }
    }

    /// Reference constant for ladder order `N`: 0 at `N = 0`, `C·2^N` above.
    pub fn ladder_c_ref(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.diagnostics.ladder_c_ref * 2f64.powi(n as i32)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"
[grid]
n = 16
L = 6.283185307179586

[model]
kind = "ml-alpha"
nu = 0.05
alpha = 0.1

[forcing]
shell_m = 2
amplitude = 0.5
seed = 3

[init]
kind = "random"
amplitude = 0.5

[time]
t_end = 1.0
output_every = 5
spinup = "auto"
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.grid.n, 16);
        assert_eq!(cfg.time.spinup, Spinup::Auto);
        assert_eq!(cfg.diagnostics.n_max, 6);
        assert_eq!(cfg.ladder_c_ref(0), 0.0);
        assert_eq!(cfg.ladder_c_ref(3), 40.0);
        let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn negative_viscosity_names_the_field() {
        let bad = SAMPLE.replace("nu = 0.05", "nu = -0.05");
        let err = RunConfig::from_toml(&bad).unwrap_err();
        assert!(err.to_string().contains("model.nu"), "{err}");
    }

    #[test]
    fn unknown_keys_and_kinds_are_rejected() {
        let bad = SAMPLE.replace("seed = 3", "seed = 3\ncolour = 1");
        assert!(matches!(RunConfig::from_toml(&bad), Err(ConfigError::Parse(_))));
        let bad = SAMPLE.replace("\"ml-alpha\"", "\"bardina\"");
        assert!(matches!(RunConfig::from_toml(&bad), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn numeric_spinup_and_field_checks() {
        let cfg = RunConfig::from_toml(&SAMPLE.replace("\"auto\"", "2")).unwrap();
        assert_eq!(cfg.time.spinup, Spinup::Time(2.0));
        for (from, to, field) in [
            ("shell_m = 2", "shell_m = 5", "forcing.shell_m"),
            ("n = 16", "n = 15", "grid.n"),
            ("t_end = 1.0", "t_end = 0.0", "time.t_end"),
            ("alpha = 0.1", "alpha = -1.0", "model.alpha"),
            ("spinup = \"auto\"", "spinup = -1.0", "time.spinup"),
        ] {
            let err = RunConfig::from_toml(&SAMPLE.replace(from, to)).unwrap_err();
            assert!(err.to_string().contains(field), "{err}");
        }
    }
}
