//! Gesture-controlled two-wand synthesizer engine.
//!
//! Data flows `protocol`/`ingest` → `gesture` → `wand` → `mapping` → `dsp`,
//! with `control` wiring everything into the live engine and the
//! deterministic script renderer.

pub mod config;
pub mod control;
pub mod dsp;
pub mod gesture;
pub mod ingest;
pub mod mapping;
pub mod protocol;
pub mod wand;

pub use config::{ConfigError, EngineConfig, InputMode};
pub use gesture::{GestureConfig, GestureEvent, GestureKind, HandTrackState};
pub use mapping::{map_scene, MapConfig, SynthParams, VoiceParams};
pub use protocol::{decode_frame, encode_frame, Decoded, Landmark, LandmarkFrame, Side};
pub use wand::{SceneState, WandAction, WandConfig, WandState};
