//! Synthetic hands, scripted traces, and a from-scratch reference classifier.

use std::f64::consts::PI;
use std::time::Duration;

use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng};

use wandsynth_core::gesture::{HandInput, HandTrackState};
use wandsynth_core::protocol::LANDMARK_COUNT;
use wandsynth_core::{GestureConfig, GestureKind, Landmark, LandmarkFrame, Side};

/// A hand with palm centroid `c`, palm length `palm`, rotated by `angle`,
/// whose fingertips sit `aperture` palm lengths from the wrist.
pub fn hand(side: Side, c: (f64, f64), palm: f64, aperture: f64, angle: f64) -> LandmarkFrame {
    let rot = |dx: f64, dy: f64| {
        let (s, co) = angle.sin_cos();
        (dx * co - dy * s, dx * s + dy * co)
    };
    // wrist 0.8 palm below, MCPs 0.2 above: the five palm points average to `c`
    let wrist = rot(0.0, -0.8 * palm);
    let mut pts = [(c.0, c.1); LANDMARK_COUNT];
    pts[0] = (c.0 + wrist.0, c.1 + wrist.1);
    let o = rot(0.0, 0.2 * palm);
    for mcp in [5, 9, 13, 17] {
        pts[mcp] = (c.0 + o.0, c.1 + o.1);
    }
    for (k, tip) in [4, 8, 12, 16, 20].into_iter().enumerate() {
        let a = PI / 2.0 + (k as f64 - 2.0) * 0.3;
        let d = aperture * palm;
        let o = rot(d * a.cos(), d * a.sin());
        pts[tip] = (pts[0].0 + o.0, pts[0].1 + o.1);
    }
    let mut points = [Landmark::new(0.0, 0.0, 0.0); LANDMARK_COUNT];
    for (p, q) in points.iter_mut().zip(pts) {
        *p = Landmark::new(q.0 as f32, q.1 as f32, 0.0);
    }
    LandmarkFrame {
        side,
        seq: 0,
        confidence: 1.0,
        points,
    }
}

#[derive(Debug, Clone)]
pub enum TraceStep {
    Frame(LandmarkFrame),
    Lost,
}

pub type Trace = Vec<(Duration, TraceStep)>;

/// Scripted trace: piecewise segments of holds, drifts, flicks, aperture
/// ramps and tracking gaps. Deterministic in `seed`.
pub fn scripted_trace(seed: u64, side: Side) -> Trace {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = TestRng::from_seed(RngAlgorithm::ChaCha, &bytes);
    let palm = rng.random_range(0.07..0.15);
    let angle = rng.random_range(-0.4..0.4);
    let frame_ms = rng.random_range(25.0..40.0);
    let mut t = 0.0f64;
    let mut c: (f64, f64) = (rng.random_range(0.3..0.7), rng.random_range(0.3..0.7));
    let mut ap = rng.random_range(0.9..2.2);
    let mut seq = 0u64;
    let mut out = Trace::new();
    for _ in 0..12 {
        let len = rng.random_range(150.0..700.0);
        let kind = rng.random_range(0..6);
        if kind == 5 {
            // tracking gap long enough for the hand to be declared lost
            t += 500.0 + len;
            out.push((Duration::from_secs_f64(t / 1e3), TraceStep::Lost));
            continue;
        }
        let target_c: (f64, f64) = match kind {
            0 => c,
            1 => (c.0 + rng.random_range(-0.1..0.1), c.1 + rng.random_range(-0.1..0.1)),
            2 => (c.0 + rng.random_range(0.2..0.4) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }, c.1 + rng.random_range(-0.05..0.05)),
            3 => (c.0 + rng.random_range(-0.05..0.05), c.1 + rng.random_range(-0.3..0.3)),
            _ => (c.0 + rng.random_range(-0.02..0.02), c.1 + rng.random_range(-0.02..0.02)),
        };
        let target_c = (target_c.0.clamp(0.15, 0.85), target_c.1.clamp(0.2, 0.8));
        let target_ap = if rng.random_bool(0.6) { rng.random_range(0.8..2.4) } else { ap };
        let dur = if kind == 2 { rng.random_range(100.0..250.0) } else { len };
        let (c0, ap0, t0) = (c, ap, t);
        while t < t0 + dur {
            t += frame_ms + rng.random_range(-5.0..5.0);
            let u = ((t - t0) / dur).min(1.0);
            c = (c0.0 + u * (target_c.0 - c0.0), c0.1 + u * (target_c.1 - c0.1));
            ap = ap0 + u * (target_ap - ap0);
            let jitter = if kind == 4 { 0.003 } else { 0.0005 };
            let cj = (c.0 + rng.random_range(-jitter..jitter), c.1 + rng.random_range(-jitter..jitter));
            let mut f = hand(side, cj, palm, ap, angle);
            seq += 1;
            f.seq = seq;
            out.push((Duration::from_secs_f64(t / 1e3), TraceStep::Frame(f)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefEvent {
    Move(f64, f64),
    Open,
    Close,
    Swipe,
}

pub fn kind_to_ref(kind: &GestureKind) -> RefEvent {
    match *kind {
        GestureKind::MoveDelta { dx, dy } => RefEvent::Move(dx, dy),
        GestureKind::OpenHand => RefEvent::Open,
        GestureKind::CloseHand => RefEvent::Close,
        GestureKind::Swipe => RefEvent::Swipe,
    }
}

/// Independent straight-line reading of the classification rules.
#[derive(Debug, Default)]
pub struct ReferenceClassifier {
    last: Option<(f64, f64)>,
    history: Vec<(f64, (f64, f64))>,
    mode: i8,
    last_aperture_event: f64,
    swipe_blocked_until: f64,
}

impl ReferenceClassifier {
    pub fn feed(&mut self, t: Duration, step: &TraceStep, cfg: &GestureConfig) -> Vec<RefEvent> {
        let now = t.as_secs_f64() * 1e3;
        let f = match step {
            TraceStep::Lost => {
                self.last = None;
                self.history.clear();
                self.mode = 0;
                return vec![];
            }
            TraceStep::Frame(f) => f,
        };
        let p = |i: usize| (f.points[i].x as f64, f.points[i].y as f64);
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in [0, 5, 9, 13, 17] {
            cx += p(i).0 / 5.0;
            cy += p(i).1 / 5.0;
        }
        let mut events = vec![];

        self.history.retain(|(ts, _)| now - ts <= cfg.swipe_window_ms as f64);
        if now >= self.swipe_blocked_until && !self.history.is_empty() {
            let first = self.history[0].1;
            let (dx, dy) = (cx - first.0, cy - first.1);
            if dx.abs() >= cfg.swipe_dist && dx.abs() > 2.0 * dy.abs() {
                events.push(RefEvent::Swipe);
                self.swipe_blocked_until = now + cfg.swipe_refractory_ms as f64;
                self.history.clear();
            }
        }
        self.history.push((now, (cx, cy)));

        let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        let palm = dist(p(0), p(9));
        if palm >= 1e-6 {
            let ap = [4, 8, 12, 16, 20].iter().map(|&i| dist(p(i), p(0))).sum::<f64>() / 5.0 / palm;
            let repeat_due = now - self.last_aperture_event >= cfg.repeat_ms as f64;
            if ap >= cfg.theta_open {
                if self.mode != 1 || repeat_due {
                    events.push(RefEvent::Open);
                    self.mode = 1;
                    self.last_aperture_event = now;
                }
            } else if ap <= cfg.theta_close && (self.mode != -1 || repeat_due) {
                events.push(RefEvent::Close);
                self.mode = -1;
                self.last_aperture_event = now;
            }
        }

        if let Some(prev) = self.last {
            let (dx, dy) = (cx - prev.0, cy - prev.1);
            if now >= self.swipe_blocked_until && (dx * dx + dy * dy).sqrt() >= cfg.move_deadzone {
                events.push(RefEvent::Move(
                    dx.clamp(-cfg.max_step, cfg.max_step),
                    dy.clamp(-cfg.max_step, cfg.max_step),
                ));
            }
        }
        self.last = Some((cx, cy));
        events
    }
}

/// Runs a trace through the engine classifier, tagging each event with its time.
pub fn run_engine(trace: &Trace, side: Side, cfg: &GestureConfig) -> Vec<(Duration, RefEvent)> {
    let mut state = HandTrackState::new(side);
    let mut out = vec![];
    let mut buf = vec![];
    for (t, step) in trace {
        buf.clear();
        let input = match step {
            TraceStep::Frame(f) => HandInput::Frame(f),
            TraceStep::Lost => HandInput::Lost,
        };
        state.step(input, *t, cfg, &mut buf).expect("classify");
        out.extend(buf.iter().map(|e| (e.time, kind_to_ref(&e.kind))));
    }
    out
}

pub fn run_reference(trace: &Trace, cfg: &GestureConfig) -> Vec<(Duration, RefEvent)> {
    let mut r = ReferenceClassifier::default();
    trace
        .iter()
        .flat_map(|(t, s)| r.feed(*t, s, cfg).into_iter().map(move |e| (*t, e)))
        .collect()
}

/// Same kinds in the same order at the same times, move deltas within 1e-12.
pub fn same_events(a: &[(Duration, RefEvent)], b: &[(Duration, RefEvent)]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|((ta, ea), (tb, eb))| {
            ta == tb
                && match (ea, eb) {
                    (RefEvent::Move(ax, ay), RefEvent::Move(bx, by)) => {
                        (ax - bx).abs() < 1e-12 && (ay - by).abs() < 1e-12
                    }
                    _ => ea == eb,
                }
        })
}
