//! The two wand spheres: position, active flag, radius, and their overlap.

use serde::{Deserialize, Serialize};

use crate::gesture::{GestureEvent, GestureKind};
use crate::protocol::Side;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WandConfig {
    /// Position change per key press.
    pub key_step: f64,
    /// Depth change per key press or open/close gesture.
    pub depth_step: f64,
    /// Scale from hand centroid motion to scene motion.
    pub gesture_gain: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for WandConfig {
    fn default() -> Self {
        Self {
            key_step: 0.05,
            depth_step: 0.10,
            gesture_gain: 1.0,
            r_min: 0.02,
            r_max: 0.08,
        }
    }
}

impl WandConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max) {
            return Err("wand.r_min must be positive and below r_max".into());
        }
        for (name, v) in [
            ("key_step", self.key_step),
            ("depth_step", self.depth_step),
            ("gesture_gain", self.gesture_gain),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("wand.{name} must be a positive number"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WandState {
    #[serde(serialize_with = "serialize_side")]
    pub side: Side,
    /// 0 = left, 1 = right.
    pub x: f64,
    /// 0 = bottom, 1 = top.
    pub y: f64,
    /// 0 = farthest, 1 = closest.
    pub z: f64,
    pub active: bool,
    pub radius: f64,
}

fn serialize_side<S: serde::Serializer>(side: &Side, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(side.as_str())
}

impl WandState {
    /// Centered and inactive.
    pub fn new(side: Side, config: &WandConfig) -> Self {
        Self::at(side, 0.5, 0.5, 0.5, false, config)
    }

    pub fn at(side: Side, x: f64, y: f64, z: f64, active: bool, config: &WandConfig) -> Self {
        let mut w = Self {
            side,
            x: x.clamp(0.0, 1.0),
            y: y.clamp(0.0, 1.0),
            z: z.clamp(0.0, 1.0),
            active,
            radius: 0.0,
        };
        w.radius = radius_for(w.z, config);
        w
    }

    pub fn center(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

pub fn radius_for(z: f64, config: &WandConfig) -> f64 {
    config.r_min + z * (config.r_max - config.r_min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActionKind {
    Delta { dx: f64, dy: f64, dz: f64 },
    Toggle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WandAction {
    pub side: Side,
    pub kind: ActionKind,
}

impl WandAction {
    pub fn delta(side: Side, dx: f64, dy: f64, dz: f64) -> Self {
        Self {
            side,
            kind: ActionKind::Delta { dx, dy, dz },
        }
    }

    pub fn toggle(side: Side) -> Self {
        Self {
            side,
            kind: ActionKind::Toggle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneState {
    pub left: WandState,
    pub right: WandState,
    /// Kept equal to `overlap_fraction(self)` by every update.
    pub overlap: f64,
}

impl SceneState {
    pub fn new(config: &WandConfig) -> Self {
        Self::from_wands(
            WandState::new(Side::Left, config),
            WandState::new(Side::Right, config),
        )
    }

    pub fn from_wands(left: WandState, right: WandState) -> Self {
        let mut scene = Self {
            left,
            right,
            overlap: 0.0,
        };
        scene.overlap = overlap_fraction(&scene);
        scene
    }

    pub fn wand(&self, side: Side) -> &WandState {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn wand_mut(&mut self, side: Side) -> &mut WandState {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

/// Hand bindings: movement follows the hand, open brings the sphere
/// closer, close pushes it away, swipe toggles.
pub fn gesture_to_action(event: &GestureEvent, config: &WandConfig) -> WandAction {
    let side = event.side;
    match event.kind {
        GestureKind::MoveDelta { dx, dy } => {
            WandAction::delta(side, config.gesture_gain * dx, config.gesture_gain * dy, 0.0)
        }
        GestureKind::OpenHand => WandAction::delta(side, 0.0, 0.0, config.depth_step),
        GestureKind::CloseHand => WandAction::delta(side, 0.0, 0.0, -config.depth_step),
        GestureKind::Swipe => WandAction::toggle(side),
    }
}

pub fn apply_action(scene: &SceneState, action: &WandAction, config: &WandConfig) -> SceneState {
    let mut next = *scene;
    let wand = next.wand_mut(action.side);
    match action.kind {
        ActionKind::Delta { dx, dy, dz } => {
            wand.x = (wand.x + dx).clamp(0.0, 1.0);
            wand.y = (wand.y + dy).clamp(0.0, 1.0);
            wand.z = (wand.z + dz).clamp(0.0, 1.0);
            wand.radius = radius_for(wand.z, config);
        }
        ActionKind::Toggle => wand.active = !wand.active,
    }
    next.overlap = overlap_fraction(&next);
    next
}

/// Normalized sphere intersection depth; 0 when either wand is inactive.
pub fn overlap_fraction(scene: &SceneState) -> f64 {
    let (l, r) = (&scene.left, &scene.right);
    if !(l.active && r.active) {
        return 0.0;
    }
    let [ax, ay, az] = l.center();
    let [bx, by, bz] = r.center();
    let d = ((ax - bx).powi(2) + (ay - by).powi(2) + (az - bz).powi(2)).sqrt();
    let reach = l.radius + r.radius;
    ((reach - d) / reach).clamp(0.0, 1.0)
}
