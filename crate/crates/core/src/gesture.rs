//! Two-frame gesture classification: hand movement, open/close, swipe.
//!
//! Each hand is tracked independently by a [`HandTrackState`]. Classification
//! is a pure step `(state, frame, now) -> (events, state')`; the control
//! activity owns the states.

use std::collections::VecDeque;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{LandmarkFrame, Side, FINGERTIPS, MIDDLE_MCP, PALM_POINTS, WRIST};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GestureConfig {
    /// Aperture at or above which the hand counts as open.
    pub theta_open: f64,
    /// Aperture at or below which the hand counts as closed.
    pub theta_close: f64,
    pub repeat_ms: u64,
    /// Minimum centroid displacement per frame for a move event.
    pub move_deadzone: f64,
    /// Per-axis clamp on a single move event.
    pub max_step: f64,
    pub swipe_dist: f64,
    pub swipe_window_ms: u64,
    pub swipe_refractory_ms: u64,
}

impl Default for GestureConfig {
    fn default() -> Self {
        Self {
            theta_open: 1.6,
            theta_close: 1.2,
            repeat_ms: 250,
            move_deadzone: 0.004,
            max_step: 0.08,
            swipe_dist: 0.25,
            swipe_window_ms: 300,
            swipe_refractory_ms: 500,
        }
    }
}

impl GestureConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.theta_close > 0.0 && self.theta_close < self.theta_open) {
            return Err("gesture.theta_close must be positive and below theta_open".into());
        }
        if !(self.move_deadzone >= 0.0 && self.max_step > 0.0 && self.move_deadzone <= self.max_step) {
            return Err("gesture.move_deadzone must be in [0, max_step] and max_step > 0".into());
        }
        if !(self.swipe_dist > 0.0) || self.swipe_window_ms == 0 {
            return Err("gesture.swipe_dist and swipe_window_ms must be positive".into());
        }
        if self.repeat_ms == 0 {
            return Err("gesture.repeat_ms must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApertureState {
    Open,
    Closed,
    #[default]
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GestureKind {
    MoveDelta { dx: f64, dy: f64 },
    OpenHand,
    CloseHand,
    Swipe,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GestureEvent {
    pub side: Side,
    pub kind: GestureKind,
    /// Displacement length for moves, aperture for open/close, |dx| for swipes.
    pub magnitude: f64,
    pub time: Duration,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GestureError {
    #[error("degenerate hand: palm length {0} is ~0")]
    DegenerateHand(f64),
    #[error("frame for side {frame} fed to the {state} hand tracker")]
    SideMismatch { state: Side, frame: Side },
    #[error("time went backwards: {now:?} < {prev:?}")]
    TimeWentBackwards { now: Duration, prev: Duration },
}

/// Per-hand classifier memory.
#[derive(Debug, Clone, PartialEq)]
pub struct HandTrackState {
    pub side: Side,
    pub prev_centroid: Option<(f64, f64)>,
    pub prev_time: Option<Duration>,
    pub aperture_state: ApertureState,
    pub swipe_window: VecDeque<(Duration, (f64, f64))>,
    pub refractory_until: Duration,
    pub repeat_next: Duration,
}

impl HandTrackState {
    pub fn new(side: Side) -> Self {
        Self {
            side,
            prev_centroid: None,
            prev_time: None,
            aperture_state: ApertureState::Neutral,
            swipe_window: VecDeque::new(),
            refractory_until: Duration::ZERO,
            repeat_next: Duration::ZERO,
        }
    }
}

/// What the classifier is fed each step.
#[derive(Debug, Clone, Copy)]
pub enum HandInput<'a> {
    Frame(&'a LandmarkFrame),
    /// The ingest layer stopped seeing this hand.
    Lost,
}

fn dist2d(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn xy(frame: &LandmarkFrame, i: usize) -> (f64, f64) {
    (frame.points[i].x as f64, frame.points[i].y as f64)
}

/// Mean fingertip-to-wrist distance in units of palm length (wrist to middle MCP).
pub fn compute_aperture(frame: &LandmarkFrame) -> Result<f64, GestureError> {
    let wrist = xy(frame, WRIST);
    let palm = dist2d(wrist, xy(frame, MIDDLE_MCP));
    if palm < 1e-6 {
        return Err(GestureError::DegenerateHand(palm));
    }
    let sum: f64 = FINGERTIPS.iter().map(|&i| dist2d(wrist, xy(frame, i))).sum();
    Ok(sum / FINGERTIPS.len() as f64 / palm)
}

/// Mean of the wrist and the four MCP joints.
pub fn compute_centroid(frame: &LandmarkFrame) -> (f64, f64) {
    let (sx, sy) = PALM_POINTS
        .iter()
        .map(|&i| xy(frame, i))
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let n = PALM_POINTS.len() as f64;
    (sx / n, sy / n)
}

/// Pure classification step.
pub fn classify(
    state: &HandTrackState,
    input: HandInput<'_>,
    now: Duration,
    config: &GestureConfig,
) -> Result<(Vec<GestureEvent>, HandTrackState), GestureError> {
    let mut next = state.clone();
    let mut events = Vec::new();
    next.step(input, now, config, &mut events)?;
    Ok((events, next))
}

impl HandTrackState {
    /// In-place form of [`classify`]; events are appended to `out`.
    pub fn step(
        &mut self,
        input: HandInput<'_>,
        now: Duration,
        config: &GestureConfig,
        out: &mut Vec<GestureEvent>,
    ) -> Result<(), GestureError> {
        let frame = match input {
            HandInput::Lost => {
                self.prev_centroid = None;
                self.swipe_window.clear();
                self.aperture_state = ApertureState::Neutral;
                return Ok(());
            }
            HandInput::Frame(frame) => frame,
        };
        if frame.side != self.side {
            return Err(GestureError::SideMismatch {
                state: self.side,
                frame: frame.side,
            });
        }
        if let Some(prev) = self.prev_time {
            if now < prev {
                return Err(GestureError::TimeWentBackwards { now, prev });
            }
        }
        let side = self.side;
        let centroid = compute_centroid(frame);

        // Swipe: net horizontal travel across the retained window.
        let window = Duration::from_millis(config.swipe_window_ms);
        while self
            .swipe_window
            .front()
            .is_some_and(|&(t, _)| now.saturating_sub(t) > window)
        {
            self.swipe_window.pop_front();
        }
        if now >= self.refractory_until {
            if let Some(&(_, oldest)) = self.swipe_window.front() {
                let dx = centroid.0 - oldest.0;
                let dy = centroid.1 - oldest.1;
                if dx.abs() >= config.swipe_dist && dx.abs() > 2.0 * dy.abs() {
                    out.push(GestureEvent {
                        side,
                        kind: GestureKind::Swipe,
                        magnitude: dx.abs(),
                        time: now,
                    });
                    self.refractory_until = now + Duration::from_millis(config.swipe_refractory_ms);
                    self.swipe_window.clear();
                }
            }
        }
        self.swipe_window.push_back((now, centroid));

        // Open / close with hysteresis, auto-repeat while held past the threshold.
        if let Ok(aperture) = compute_aperture(frame) {
            let repeat = Duration::from_millis(config.repeat_ms);
            let fire = |kind| GestureEvent {
                side,
                kind,
                magnitude: aperture,
                time: now,
            };
            let opened = aperture >= config.theta_open;
            let closed = aperture <= config.theta_close;
            match self.aperture_state {
                s if s != ApertureState::Open && opened => {
                    self.aperture_state = ApertureState::Open;
                    self.repeat_next = now + repeat;
                    out.push(fire(GestureKind::OpenHand));
                }
                s if s != ApertureState::Closed && closed => {
                    self.aperture_state = ApertureState::Closed;
                    self.repeat_next = now + repeat;
                    out.push(fire(GestureKind::CloseHand));
                }
                ApertureState::Open if opened && now >= self.repeat_next => {
                    self.repeat_next = now + repeat;
                    out.push(fire(GestureKind::OpenHand));
                }
                ApertureState::Closed if closed && now >= self.repeat_next => {
                    self.repeat_next = now + repeat;
                    out.push(fire(GestureKind::CloseHand));
                }
                _ => {}
            }
        }

        // Continuous movement, muted while a swipe is in its refractory period.
        if let Some(prev) = self.prev_centroid {
            let (dx, dy) = (centroid.0 - prev.0, centroid.1 - prev.1);
            if now >= self.refractory_until && dx.hypot(dy) >= config.move_deadzone {
                let dx = dx.clamp(-config.max_step, config.max_step);
                let dy = dy.clamp(-config.max_step, config.max_step);
                out.push(GestureEvent {
                    side,
                    kind: GestureKind::MoveDelta { dx, dy },
                    magnitude: dx.hypot(dy),
                    time: now,
                });
            }
        }
        self.prev_centroid = Some(centroid);
        self.prev_time = Some(now);
        Ok(())
    }
}
