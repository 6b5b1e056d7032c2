//! Keyboard fallback: fourteen keys, one action each.

use std::fmt;
use std::time::Duration;

use crate::protocol::Side;
use crate::wand::{WandAction, WandConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyCode {
    W,
    A,
    S,
    D,
    Up,
    Left,
    Down,
    Right,
    Q,
    Z,
    E,
    C,
    O,
    P,
}

impl KeyCode {
    pub const ALL: [KeyCode; 14] = [
        KeyCode::W,
        KeyCode::A,
        KeyCode::S,
        KeyCode::D,
        KeyCode::Up,
        KeyCode::Left,
        KeyCode::Down,
        KeyCode::Right,
        KeyCode::Q,
        KeyCode::Z,
        KeyCode::E,
        KeyCode::C,
        KeyCode::O,
        KeyCode::P,
    ];

    /// Accepts single letters in either case and arrow names with or without
    /// the browser's `Arrow` prefix.
    pub fn parse(name: &str) -> Option<KeyCode> {
        let name = name.trim();
        let bare = name.strip_prefix("Arrow").unwrap_or(name);
        Some(match bare.to_ascii_lowercase().as_str() {
            "w" => KeyCode::W,
            "a" => KeyCode::A,
            "s" => KeyCode::S,
            "d" => KeyCode::D,
            "up" => KeyCode::Up,
            "left" => KeyCode::Left,
            "down" => KeyCode::Down,
            "right" => KeyCode::Right,
            "q" => KeyCode::Q,
            "z" => KeyCode::Z,
            "e" => KeyCode::E,
            "c" => KeyCode::C,
            "o" => KeyCode::O,
            "p" => KeyCode::P,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            KeyCode::W => "W",
            KeyCode::A => "A",
            KeyCode::S => "S",
            KeyCode::D => "D",
            KeyCode::Up => "Up",
            KeyCode::Left => "Left",
            KeyCode::Down => "Down",
            KeyCode::Right => "Right",
            KeyCode::Q => "Q",
            KeyCode::Z => "Z",
            KeyCode::E => "E",
            KeyCode::C => "C",
            KeyCode::O => "O",
            KeyCode::P => "P",
        }
    }
}

impl fmt::Display for KeyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyAction {
    pub key: KeyCode,
    pub time: Duration,
}

pub fn key_to_action(key: KeyCode, cfg: &WandConfig) -> WandAction {
    use KeyCode::*;
    let (k, d) = (cfg.key_step, cfg.depth_step);
    match key {
        W => WandAction::delta(Side::Left, 0.0, k, 0.0),
        A => WandAction::delta(Side::Left, -k, 0.0, 0.0),
        S => WandAction::delta(Side::Left, 0.0, -k, 0.0),
        D => WandAction::delta(Side::Left, k, 0.0, 0.0),
        Up => WandAction::delta(Side::Right, 0.0, k, 0.0),
        Left => WandAction::delta(Side::Right, -k, 0.0, 0.0),
        Down => WandAction::delta(Side::Right, 0.0, -k, 0.0),
        Right => WandAction::delta(Side::Right, k, 0.0, 0.0),
        Q => WandAction::delta(Side::Left, 0.0, 0.0, d),
        Z => WandAction::delta(Side::Left, 0.0, 0.0, -d),
        E => WandAction::delta(Side::Right, 0.0, 0.0, d),
        C => WandAction::delta(Side::Right, 0.0, 0.0, -d),
        O => WandAction::toggle(Side::Left),
        P => WandAction::toggle(Side::Right),
    }
}
