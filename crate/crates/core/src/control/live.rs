//! The live engine: ingest, control and audio activities plus the UI server.

use std::io::{self, BufRead};
use std::net::{SocketAddr, TcpListener, UdpSocket};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, SyncSender};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::broadcast::{spawn_ws_server, BroadcastHub, ControlInput};
use super::engine::Controller;
use super::snapshot::{Diagnostics, StateSnapshot};
use super::EngineError;
use crate::config::{EngineConfig, InputMode};
use crate::dsp::{DspConfig, Synth, CHANNELS};
use crate::ingest::{run_ingest, Clock, FrameQueue, IngestStats, MonotonicClock};
use crate::mapping::SynthParams;

#[derive(Debug, Clone, Default)]
pub struct LiveOptions {
    /// Overrides `control.input`.
    pub input: Option<InputMode>,
    /// Overrides `ingest.listen`.
    pub listen: Option<String>,
    /// Overrides `control.ws`.
    pub ws: Option<String>,
    /// Play through an audio device. Without one, audio is rendered into a
    /// paced null sink.
    pub audio: bool,
}

/// Counters shared by the audio activity.
#[derive(Debug, Default)]
pub struct AudioStats {
    pub blocks: AtomicU64,
    pub underruns: AtomicU64,
    pub nan_resets: AtomicU64,
    pub freq_clamps: AtomicU64,
    pub cutoff_clamps: AtomicU64,
    /// Bit pattern of the last block's peak absolute sample.
    peak_bits: AtomicU64,
}

impl AudioStats {
    pub fn last_peak(&self) -> f64 {
        f64::from_bits(self.peak_bits.load(Ordering::Relaxed))
    }
}

/// Blocks the null sink may fall behind before it counts an underrun,
/// standing in for a device buffer.
const SINK_BUFFER_BLOCKS: u32 = 4;
const INBOX_CAPACITY: usize = 256;

pub struct LiveEngine {
    stop: Arc<AtomicBool>,
    fade: Arc<AtomicBool>,
    audio: Option<JoinHandle<()>>,
    workers: Vec<JoinHandle<()>>,
    latest: Arc<Mutex<StateSnapshot>>,
    keys: SyncSender<ControlInput>,
    ingest_stats: Arc<IngestStats>,
    audio_stats: Arc<AudioStats>,
    hub: Arc<BroadcastHub>,
    udp_addr: Option<SocketAddr>,
    ws_addr: SocketAddr,
}

impl LiveEngine {
    pub fn start(cfg: &EngineConfig, opts: &LiveOptions) -> Result<Self, EngineError> {
        cfg.validate()?;
        if opts.audio {
            return Err(EngineError::NoAudioDevice);
        }
        let input = opts.input.unwrap_or(cfg.control.input);
        if input == InputMode::Script {
            return Err(EngineError::UnsupportedInput("script"));
        }

        let udp = if input == InputMode::Osc {
            let addr = opts.listen.clone().unwrap_or_else(|| cfg.ingest.listen.clone());
            let sock = UdpSocket::bind(&addr).map_err(|source| EngineError::Bind {
                what: "osc input",
                addr: addr.clone(),
                source,
            })?;
            Some(sock)
        } else {
            None
        };
        let udp_addr = udp.as_ref().and_then(|s| s.local_addr().ok());
        let ws_spec = opts.ws.clone().unwrap_or_else(|| cfg.control.ws.clone());
        let listener = TcpListener::bind(&ws_spec).map_err(|source| EngineError::Bind {
            what: "ui websocket",
            addr: ws_spec.clone(),
            source,
        })?;
        let ws_addr = listener.local_addr().map_err(|source| EngineError::Bind {
            what: "ui websocket",
            addr: ws_spec,
            source,
        })?;

        let clock = MonotonicClock::new();
        let stop = Arc::new(AtomicBool::new(false));
        let fade = Arc::new(AtomicBool::new(false));
        let ingest_stats = Arc::new(IngestStats::default());
        let audio_stats = Arc::new(AudioStats::default());
        let hub = Arc::new(BroadcastHub::new(
            cfg.control.broadcast_max_hz,
            cfg.control.client_queue,
        ));
        let queue = Arc::new(FrameQueue::new(cfg.ingest.queue_capacity));
        let (keys, inbox) = mpsc::sync_channel(INBOX_CAPACITY);

        let mut ctl = Controller::new(cfg);
        let first = ctl.snapshot(clock.now(), Diagnostics::default());
        let latest = Arc::new(Mutex::new(first));
        let (mut params_in, params_out) = triple_buffer::triple_buffer(&first.params);

        let spawn = |what: &'static str, f: Box<dyn FnOnce() + Send>| {
            thread::Builder::new()
                .name(what.into())
                .spawn(f)
                .map_err(|source| EngineError::Thread { what, source })
        };

        let mut engine = Self {
            stop: stop.clone(),
            fade: fade.clone(),
            audio: None,
            workers: Vec::new(),
            latest: latest.clone(),
            keys: keys.clone(),
            ingest_stats: ingest_stats.clone(),
            audio_stats: audio_stats.clone(),
            hub: hub.clone(),
            udp_addr,
            ws_addr,
        };

        let dsp = cfg.dsp.clone();
        let stats = audio_stats.clone();
        let fade_flag = fade.clone();
        engine.audio = Some(spawn(
            "audio",
            Box::new(move || audio_loop(&dsp, params_out, &stats, &fade_flag)),
        )?);

        if let Some(mut sock) = udp {
            let (stop, stats, queue, icfg) = (stop.clone(), ingest_stats.clone(), queue.clone(), cfg.ingest.clone());
            engine.workers.push(spawn(
                "ingest",
                Box::new(move || {
                    let res = run_ingest(&mut sock, &clock, &icfg, &stats, &stop, |ev| {
                        if queue.push(clock.now(), ev) {
                            stats.overflow.fetch_add(1, Ordering::Relaxed);
                        }
                        true
                    });
                    if let Err(e) = res {
                        log::error!("ingest stopped: {e}");
                    }
                }),
            )?);
        }

        let tick = Duration::from_secs_f64(1.0 / cfg.control.tick_hz);
        let ctl_ctx = ControlContext {
            clock,
            tick,
            inbox,
            queue,
            ingest: ingest_stats,
            audio: audio_stats,
            hub: hub.clone(),
            latest,
            stop: stop.clone(),
        };
        engine.workers.push(spawn(
            "control",
            Box::new(move || ctl_ctx.run(ctl, &mut params_in)),
        )?);

        engine
            .workers
            .push(spawn_ws_server(listener, hub, keys, stop).map_err(|source| {
                EngineError::Thread {
                    what: "ws-accept",
                    source,
                }
            })?);
        log::info!(
            "engine running: osc {:?}, ui ws://{ws_addr}",
            engine.udp_addr.map(|a| a.to_string())
        );
        Ok(engine)
    }

    pub fn udp_addr(&self) -> Option<SocketAddr> {
        self.udp_addr
    }

    pub fn ws_addr(&self) -> SocketAddr {
        self.ws_addr
    }

    pub fn latest_snapshot(&self) -> StateSnapshot {
        *self.latest.lock().expect("snapshot poisoned")
    }

    /// Feeds key names to the control activity as if typed.
    pub fn key_sender(&self) -> SyncSender<ControlInput> {
        self.keys.clone()
    }

    pub fn ingest_stats(&self) -> &IngestStats {
        &self.ingest_stats
    }

    pub fn audio_stats(&self) -> &AudioStats {
        &self.audio_stats
    }

    pub fn client_count(&self) -> usize {
        self.hub.client_count()
    }

    /// Fades the audio out, then stops every activity.
    pub fn shutdown(mut self) -> StateSnapshot {
        self.stop_all();
        self.latest_snapshot()
    }

    fn stop_all(&mut self) {
        self.fade.store(true, Ordering::SeqCst);
        if let Some(h) = self.audio.take() {
            let _ = h.join();
        }
        self.stop.store(true, Ordering::SeqCst);
        for h in self.workers.drain(..) {
            let _ = h.join();
        }
    }
}

impl Drop for LiveEngine {
    fn drop(&mut self) {
        self.stop_all();
    }
}

struct ControlContext {
    clock: MonotonicClock,
    tick: Duration,
    inbox: Receiver<ControlInput>,
    queue: Arc<FrameQueue>,
    ingest: Arc<IngestStats>,
    audio: Arc<AudioStats>,
    hub: Arc<BroadcastHub>,
    latest: Arc<Mutex<StateSnapshot>>,
    stop: Arc<AtomicBool>,
}

impl ControlContext {
    fn run(self, mut ctl: Controller, params: &mut triple_buffer::Input<SynthParams>) {
        let mut last = *ctl.params();
        let mut next = self.clock.now();
        while !self.stop.load(Ordering::Relaxed) {
            while let Ok(ControlInput::Key(name)) = self.inbox.try_recv() {
                if ctl.key_named(&name).is_none() {
                    log::debug!("ignored key {name:?}");
                }
            }
            for (at, ev) in self.queue.drain() {
                ctl.ingest(at, &ev);
            }
            let now = self.clock.now();
            let diag = Diagnostics {
                dropped_frames: self.ingest.dropped_frames(),
                nan_resets: self.audio.nan_resets.load(Ordering::Relaxed),
                freq_clamps: self.audio.freq_clamps.load(Ordering::Relaxed),
                cutoff_clamps: self.audio.cutoff_clamps.load(Ordering::Relaxed),
                underruns: self.audio.underruns.load(Ordering::Relaxed),
                ..Default::default()
            };
            let snap = ctl.snapshot(now, diag);
            if snap.params != last {
                params.write(snap.params);
                last = snap.params;
            }
            self.hub.publish(&snap);
            *self.latest.lock().expect("snapshot poisoned") = snap;

            next += self.tick;
            let now = self.clock.now();
            if next > now {
                thread::sleep(next - now);
            } else {
                next = now;
            }
        }
    }
}

/// Renders blocks into a null sink paced at the sample rate.
fn audio_loop(
    cfg: &DspConfig,
    mut params: triple_buffer::Output<SynthParams>,
    stats: &AudioStats,
    fade: &AtomicBool,
) {
    let mut synth = Synth::new(cfg);
    let mut block = vec![0.0f32; cfg.block_size * CHANNELS];
    let period = Duration::from_secs_f64(cfg.block_size as f64 / cfg.rate());
    let slack = period * SINK_BUFFER_BLOCKS;
    let clock = MonotonicClock::new();
    let mut deadline = clock.now() + slack;
    synth.set_params(params.read());
    loop {
        if fade.load(Ordering::Relaxed) {
            synth.begin_fade_out();
        }
        if params.update() {
            synth.set_params(params.peek_output_buffer());
        }
        synth.render_block(&mut block);
        let peak = block.iter().fold(0.0f64, |m, s| m.max(s.abs() as f64));
        stats.peak_bits.store(peak.to_bits(), Ordering::Relaxed);
        let d = synth.diagnostics();
        stats.nan_resets.store(d.nan_resets, Ordering::Relaxed);
        stats.freq_clamps.store(d.freq_clamps, Ordering::Relaxed);
        stats.cutoff_clamps.store(d.cutoff_clamps, Ordering::Relaxed);
        stats.blocks.fetch_add(1, Ordering::Relaxed);
        if synth.faded_out() {
            return;
        }

        let now = clock.now();
        if now > deadline {
            stats.underruns.fetch_add(1, Ordering::Relaxed);
            deadline = now + slack;
        }
        deadline += period;
        // keep at most `slack` rendered ahead of the device position
        let ahead = deadline.saturating_sub(now);
        if ahead > slack {
            thread::sleep(ahead - slack);
        }
    }
}

/// Runs until `interrupt` is set. In keys mode, whitespace-separated key
/// names are read line by line from stdin.
pub fn run_live(
    cfg: &EngineConfig,
    opts: &LiveOptions,
    interrupt: &AtomicBool,
) -> Result<StateSnapshot, EngineError> {
    let engine = LiveEngine::start(cfg, opts)?;
    if opts.input.unwrap_or(cfg.control.input) == InputMode::Keys {
        let keys = engine.key_sender();
        // detached: a blocking stdin read cannot be interrupted
        thread::Builder::new()
            .name("stdin-keys".into())
            .spawn(move || {
                for line in io::stdin().lock().lines() {
                    let Ok(line) = line else { break };
                    for word in line.split_whitespace() {
                        if keys.send(ControlInput::Key(word.to_string())).is_err() {
                            return;
                        }
                    }
                }
            })
            .map_err(|source| EngineError::Thread {
                what: "stdin-keys",
                source,
            })?;
    }
    while !interrupt.load(Ordering::Relaxed) {
        thread::sleep(Duration::from_millis(20));
    }
    Ok(engine.shutdown())
}
