//! Python bindings for the wand synth engine.

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use wandsynth_core::control::{run_script, Controller};
use wandsynth_core::gesture::{compute_aperture, compute_centroid, HandInput};
use wandsynth_core::ingest::{IngestEvent, IngestStats, Ingestor};
use wandsynth_core::{
    Decoded, EngineConfig, GestureEvent, GestureKind, HandTrackState, Landmark, LandmarkFrame,
    SceneState, Side, SynthParams, WandState,
};

type Point = (f32, f32, f32);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_side(side: &str) -> PyResult<Side> {
    Side::parse(side).ok_or_else(|| value_err(format!("unknown side {side:?}")))
}

fn secs(t: f64) -> PyResult<Duration> {
    Duration::try_from_secs_f64(t).map_err(value_err)
}

fn config(json: Option<&str>) -> PyResult<EngineConfig> {
    let cfg = match json {
        Some(text) => EngineConfig::from_json(text).map_err(value_err)?,
        None => EngineConfig::default(),
    };
    cfg.validate().map_err(value_err)?;
    Ok(cfg)
}

fn frame(side: &str, seq: u64, confidence: f32, points: &[Point]) -> PyResult<LandmarkFrame> {
    let points: Vec<Landmark> = points.iter().map(|&(x, y, z)| Landmark::new(x, y, z)).collect();
    LandmarkFrame::from_points(parse_side(side)?, seq, confidence, &points).map_err(value_err)
}

fn side_key(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn frame_dict<'py>(py: Python<'py>, f: &LandmarkFrame) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("side", f.side.as_str())?;
    d.set_item("seq", f.seq)?;
    d.set_item("confidence", f.confidence)?;
    let points: Vec<Point> = f.points.iter().map(|p| (p.x, p.y, p.z)).collect();
    d.set_item("points", points)?;
    Ok(d)
}

fn params_dict<'py>(py: Python<'py>, p: &SynthParams) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for side in Side::BOTH {
        let v = p.voice(side);
        let voice = PyDict::new(py);
        voice.set_item("freq", v.freq)?;
        voice.set_item("amp", v.amp)?;
        voice.set_item("cutoff", v.cutoff)?;
        voice.set_item("rt60", v.rt60)?;
        voice.set_item("active", v.active)?;
        d.set_item(side_key(side), voice)?;
    }
    d.set_item("xmod", p.xmod)?;
    Ok(d)
}

fn scene_dict<'py>(py: Python<'py>, s: &SceneState) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for side in Side::BOTH {
        let w = s.wand(side);
        let wand = PyDict::new(py);
        wand.set_item("x", w.x)?;
        wand.set_item("y", w.y)?;
        wand.set_item("z", w.z)?;
        wand.set_item("radius", w.radius)?;
        wand.set_item("active", w.active)?;
        d.set_item(side_key(side), wand)?;
    }
    d.set_item("overlap", s.overlap)?;
    Ok(d)
}

fn event_tuple(e: &GestureEvent) -> (String, &'static str, f64, f64, f64) {
    let (name, dx, dy) = match e.kind {
        GestureKind::MoveDelta { dx, dy } => ("move", dx, dy),
        GestureKind::OpenHand => ("open", 0.0, 0.0),
        GestureKind::CloseHand => ("close", 0.0, 0.0),
        GestureKind::Swipe => ("swipe", 0.0, 0.0),
    };
    (e.side.as_str().to_string(), name, dx, dy, e.time.as_secs_f64())
}

/// Encodes one hand frame as an OSC datagram.
#[pyfunction]
#[pyo3(signature = (side, seq, confidence, points))]
fn encode_frame<'py>(
    py: Python<'py>,
    side: &str,
    seq: u64,
    confidence: f32,
    points: Vec<Point>,
) -> PyResult<Bound<'py, PyBytes>> {
    let f = frame(side, seq, confidence, &points)?;
    let bytes = wandsynth_core::encode_frame(&f).map_err(value_err)?;
    Ok(PyBytes::new(py, &bytes))
}

/// Decodes a datagram; None for messages on other addresses.
#[pyfunction]
fn decode_frame<'py>(py: Python<'py>, data: &[u8]) -> PyResult<Option<Bound<'py, PyDict>>> {
    match wandsynth_core::decode_frame(data).map_err(value_err)? {
        Decoded::Frame(f) => Ok(Some(frame_dict(py, &f)?)),
        Decoded::Ignored { .. } => Ok(None),
    }
}

#[pyfunction]
fn aperture(points: Vec<Point>) -> PyResult<f64> {
    compute_aperture(&frame("L", 0, 1.0, &points)?).map_err(value_err)
}

#[pyfunction]
fn centroid(points: Vec<Point>) -> PyResult<(f64, f64)> {
    Ok(compute_centroid(&frame("L", 0, 1.0, &points)?))
}

/// Maps two wands given as (x, y, z, active) to synth parameters.
#[pyfunction]
#[pyo3(signature = (left, right, config_json=None))]
fn map_wands<'py>(
    py: Python<'py>,
    left: (f64, f64, f64, bool),
    right: (f64, f64, f64, bool),
    config_json: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(config_json)?;
    let wand = |side, (x, y, z, active): (f64, f64, f64, bool)| {
        WandState::at(side, x, y, z, active, &cfg.wand)
    };
    let scene = SceneState::from_wands(wand(Side::Left, left), wand(Side::Right, right));
    params_dict(py, &wandsynth_core::map_scene(&scene, &cfg.mapping))
}

/// Renders a script offline; returns (wav bytes, final-state report).
#[pyfunction]
#[pyo3(signature = (script, duration=None, config_json=None))]
fn render_script<'py>(
    py: Python<'py>,
    script: &str,
    duration: Option<f64>,
    config_json: Option<&str>,
) -> PyResult<(Bound<'py, PyBytes>, String)> {
    let cfg = config(config_json)?;
    let duration = duration.map(secs).transpose()?;
    let out = py
        .detach(|| run_script(&cfg, script, duration))
        .map_err(value_err)?;
    Ok((PyBytes::new(py, &out.wav_bytes()), out.report()))
}

#[pyfunction]
fn default_config() -> String {
    EngineConfig::default().to_json_pretty()
}

/// Gesture classifier for one hand.
#[pyclass(module = "wandsynth")]
struct Classifier {
    state: HandTrackState,
    cfg: EngineConfig,
}

#[pymethods]
impl Classifier {
    #[new]
    #[pyo3(signature = (side, config_json=None))]
    fn new(side: &str, config_json: Option<&str>) -> PyResult<Self> {
        Ok(Self {
            state: HandTrackState::new(parse_side(side)?),
            cfg: config(config_json)?,
        })
    }

    /// Feeds one frame at time `t` seconds; returns (side, kind, dx, dy, t) tuples.
    fn step(&mut self, t: f64, points: Vec<Point>) -> PyResult<Vec<(String, &'static str, f64, f64, f64)>> {
        let f = frame(self.state.side.as_str(), 0, 1.0, &points)?;
        let mut events = vec![];
        self.state
            .step(HandInput::Frame(&f), secs(t)?, &self.cfg.gesture, &mut events)
            .map_err(value_err)?;
        Ok(events.iter().map(event_tuple).collect())
    }

    fn lost(&mut self, t: f64) -> PyResult<()> {
        let mut events = vec![];
        self.state
            .step(HandInput::Lost, secs(t)?, &self.cfg.gesture, &mut events)
            .map_err(value_err)
    }
}

/// Control path without audio: keys, datagrams, scene and parameters.
#[pyclass(module = "wandsynth")]
struct Engine {
    ctl: Controller,
    ingestor: Ingestor,
    stats: IngestStats,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (config_json=None))]
    fn new(config_json: Option<&str>) -> PyResult<Self> {
        let cfg = config(config_json)?;
        Ok(Self {
            ingestor: Ingestor::new(&cfg.ingest),
            ctl: Controller::new(&cfg),
            stats: IngestStats::default(),
        })
    }

    fn key(&mut self, name: &str) -> PyResult<()> {
        self.ctl
            .key_named(name)
            .map(|_| ())
            .ok_or_else(|| value_err(format!("unknown key {name:?}")))
    }

    /// Feeds a datagram received at `t` seconds; returns the number of gestures it produced.
    fn feed(&mut self, t: f64, data: &[u8]) -> PyResult<usize> {
        let at = secs(t)?;
        Ok(match self.ingestor.accept_datagram(data, at, &self.stats) {
            Some(f) => self.ctl.ingest(at, &IngestEvent::Frame(f)),
            None => 0,
        })
    }

    fn dropped_frames(&self) -> u64 {
        self.stats.dropped_frames()
    }

    fn scene<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        scene_dict(py, self.ctl.scene())
    }

    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        params_dict(py, self.ctl.params())
    }

    /// The UI state message for time `t` seconds.
    fn snapshot_json(&mut self, t: f64) -> PyResult<String> {
        Ok(self.ctl.snapshot(secs(t)?, Default::default()).to_json())
    }
}

#[pymodule]
pub fn wandsynth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(encode_frame, m)?)?;
    m.add_function(wrap_pyfunction!(decode_frame, m)?)?;
    m.add_function(wrap_pyfunction!(aperture, m)?)?;
    m.add_function(wrap_pyfunction!(centroid, m)?)?;
    m.add_function(wrap_pyfunction!(map_wands, m)?)?;
    m.add_function(wrap_pyfunction!(render_script, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_class::<Classifier>()?;
    m.add_class::<Engine>()?;
    Ok(())
}
