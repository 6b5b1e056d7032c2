//! Engine configuration: one JSON document, one section per subsystem.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::DspConfig;
use crate::gesture::GestureConfig;
use crate::ingest::IngestConfig;
use crate::mapping::MapConfig;
use crate::wand::WandConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    #[default]
    Osc,
    Keys,
    Script,
}

impl std::str::FromStr for InputMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "osc" => Ok(Self::Osc),
            "keys" => Ok(Self::Keys),
            "script" => Ok(Self::Script),
            other => Err(format!("unknown input mode `{other}` (osc | keys | script)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    pub input: InputMode,
    pub tick_hz: f64,
    /// WebSocket endpoint for UI clients.
    pub ws: String,
    pub broadcast_max_hz: f64,
    pub client_queue: usize,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            input: InputMode::Osc,
            tick_hz: 120.0,
            ws: "127.0.0.1:8080".into(),
            broadcast_max_hz: 30.0,
            client_queue: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub ingest: IngestConfig,
    pub gesture: GestureConfig,
    pub wand: WandConfig,
    pub mapping: MapConfig,
    pub dsp: DspConfig,
    pub control: ControlConfig,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl EngineConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let i = &self.ingest;
        if !(0.0..=1.0).contains(&i.min_confidence) {
            return Err(ConfigError::Invalid("ingest.min_confidence must be in [0, 1]".into()));
        }
        if i.hand_timeout_ms == 0 || i.queue_capacity == 0 {
            return Err(ConfigError::Invalid(
                "ingest.hand_timeout_ms and ingest.queue_capacity must be positive".into(),
            ));
        }
        let c = &self.control;
        if !(c.tick_hz > 0.0 && c.tick_hz <= 1000.0) {
            return Err(ConfigError::Invalid("control.tick_hz must be in (0, 1000]".into()));
        }
        if !(c.broadcast_max_hz > 0.0) || c.client_queue == 0 {
            return Err(ConfigError::Invalid(
                "control.broadcast_max_hz and control.client_queue must be positive".into(),
            ));
        }
        self.gesture.validate().map_err(ConfigError::Invalid)?;
        self.wand.validate().map_err(ConfigError::Invalid)?;
        self.dsp.validate().map_err(ConfigError::Invalid)?;
        self.mapping
            .validate(self.dsp.rate())
            .map_err(ConfigError::Invalid)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let cfg = EngineConfig::default();
        cfg.validate().unwrap();
        assert_eq!(EngineConfig::from_json(&cfg.to_json_pretty()).unwrap(), cfg);
    }

    #[test]
    fn partial_document_fills_defaults() {
        let cfg = EngineConfig::from_json(r#"{"wand": {"key_step": 0.1}}"#).unwrap();
        assert_eq!(cfg.wand.key_step, 0.1);
        assert_eq!(cfg.wand.depth_step, 0.1);
        assert_eq!(cfg.mapping, MapConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = EngineConfig::from_json(r#"{"wand": {"key_stpe": 0.1}}"#).unwrap_err();
        assert!(err.to_string().contains("key_stpe"), "{err}");
        assert!(EngineConfig::from_json(r#"{"extra": {}}"#).is_err());
    }

    #[test]
    fn invalid_values_name_the_field() {
        let err = EngineConfig::from_json(r#"{"mapping": {"c_max": 9000}}"#).unwrap_err();
        assert!(err.to_string().contains("mapping.c_max"), "{err}");
        let err = EngineConfig::from_json(r#"{"gesture": {"theta_close": 2.0}}"#).unwrap_err();
        assert!(err.to_string().contains("gesture.theta_close"), "{err}");
    }
}
