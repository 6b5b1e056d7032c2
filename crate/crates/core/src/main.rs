use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand};

use wandsynth_core::control::{render_script_file, report_path, run_live, EngineError, LiveOptions};
use wandsynth_core::{EngineConfig, InputMode};

#[derive(Parser)]
#[command(name = "wandsynth", version, about = "Two-wand gesture synthesizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the live engine until interrupted.
    Run {
        #[arg(long, env = "NL_CONFIG")]
        config: Option<PathBuf>,
        /// osc | keys
        #[arg(long)]
        input: Option<InputMode>,
        /// UDP address for landmark frames.
        #[arg(long, value_name = "ADDR:PORT")]
        listen: Option<String>,
        /// WebSocket address for UI clients.
        #[arg(long, value_name = "ADDR:PORT")]
        ws: Option<String>,
        /// Render into a paced null sink instead of an audio device.
        #[arg(long)]
        no_audio: bool,
    },
    /// Render a key/gesture script to a WAV file.
    Render {
        #[arg(long, env = "NL_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seconds; defaults to one second past the last event.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Print the effective configuration as JSON.
    PrintConfig {
        #[arg(long, env = "NL_CONFIG")]
        config: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>) -> Result<EngineConfig, EngineError> {
    let cfg = match path {
        Some(p) => EngineConfig::load(p)?,
        None => EngineConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), EngineError> {
    match cli.command {
        Command::PrintConfig { config } => {
            println!("{}", load(config.as_ref())?.to_json_pretty());
        }
        Command::Render {
            config,
            script,
            out,
            duration,
        } => {
            let cfg = load(config.as_ref())?;
            let duration = match duration {
                Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
                Some(s) => {
                    return Err(EngineError::Io {
                        path: "--duration".into(),
                        source: std::io::Error::new(
                            std::io::ErrorKind::InvalidInput,
                            format!("{s} is not a non-negative number of seconds"),
                        ),
                    })
                }
                None => None,
            };
            let outcome = render_script_file(&cfg, &script, &out, duration)?;
            let d = outcome.final_state.diag;
            eprintln!(
                "wrote {} ({} frames) and {}; nan_resets={} freq_clamps={} cutoff_clamps={}",
                out.display(),
                outcome.samples.len() / 2,
                report_path(&out).display(),
                d.nan_resets,
                d.freq_clamps,
                d.cutoff_clamps,
            );
        }
        Command::Run {
            config,
            input,
            listen,
            ws,
            no_audio,
        } => {
            let cfg = load(config.as_ref())?;
            let opts = LiveOptions {
                input,
                listen,
                ws,
                audio: !no_audio,
            };
            let interrupt = Arc::new(AtomicBool::new(false));
            let flag = interrupt.clone();
            if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
                log::warn!("cannot install interrupt handler: {e}");
            }
            let last = run_live(&cfg, &opts, &interrupt)?;
            print!("{}", last.report());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
