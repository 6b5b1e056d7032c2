//! Control activity: keys, scripts, state snapshots, the live engine and the
//! UI broadcast.

use std::io;

use thiserror::Error;

use crate::config::ConfigError;
use crate::dsp::DspError;

mod broadcast;
mod engine;
mod keys;
mod live;
mod script;
mod snapshot;

pub use broadcast::{spawn_ws_server, BroadcastHub, ClientQueue, ControlInput};
pub use engine::{render_script_file, report_path, run_script, Controller, ScriptOutcome};
pub use keys::{key_to_action, KeyAction, KeyCode};
pub use live::{run_live, AudioStats, LiveEngine, LiveOptions};
pub use script::{parse_script, ScriptError, ScriptEvent, ScriptInput};
pub use snapshot::{ClientMessage, Diagnostics, StateSnapshot};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error("cannot bind {what} on {addr}: {source}")]
    Bind {
        what: &'static str,
        addr: String,
        source: io::Error,
    },
    #[error("no audio output device backend is available in this build; rerun with --no-audio")]
    NoAudioDevice,
    #[error("input mode `{0}` is not available for live runs (use osc or keys)")]
    UnsupportedInput(&'static str),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("cannot start {what} thread: {source}")]
    Thread { what: &'static str, source: io::Error },
}
