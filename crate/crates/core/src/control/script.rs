//! Plain-text input scripts for deterministic replay.
//!
//! One event per line, `#` starts a comment:
//!
//! ```text
//! <t_ms> <KEY>
//! <t_ms> GESTURE <L|R> MOVE <dx> <dy>
//! <t_ms> GESTURE <L|R> OPEN|CLOSE|SWIPE
//! ```
//!
//! Timestamps must not decrease.

use std::time::Duration;

use thiserror::Error;

use super::keys::KeyCode;
use crate::gesture::GestureKind;
use crate::protocol::Side;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScriptInput {
    Key(KeyCode),
    Gesture { side: Side, kind: GestureKind },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptEvent {
    pub time: Duration,
    pub line: usize,
    pub input: ScriptInput,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptEvent>, ScriptError> {
    let mut events: Vec<ScriptEvent> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ScriptError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let t_tok = tokens.next().expect("non-empty line has a token");
        let t_ms: u64 = t_tok
            .parse()
            .map_err(|_| err(format!("`{t_tok}` is not a millisecond timestamp")))?;
        let time = Duration::from_millis(t_ms);
        if let Some(prev) = events.last() {
            if time < prev.time {
                return Err(err(format!(
                    "timestamp {t_ms} ms precedes line {} ({} ms)",
                    prev.line,
                    prev.time.as_millis()
                )));
            }
        }
        let word = tokens
            .next()
            .ok_or_else(|| err("missing key or GESTURE after timestamp".into()))?;
        let input = if word.eq_ignore_ascii_case("GESTURE") {
            parse_gesture(&mut tokens).map_err(err)?
        } else {
            ScriptInput::Key(KeyCode::parse(word).ok_or_else(|| err(format!("unknown key `{word}`")))?)
        };
        if let Some(extra) = tokens.next() {
            return Err(err(format!("unexpected trailing token `{extra}`")));
        }
        events.push(ScriptEvent { time, line, input });
    }
    Ok(events)
}

fn parse_gesture<'a>(tokens: &mut impl Iterator<Item = &'a str>) -> Result<ScriptInput, String> {
    let side_tok = tokens.next().ok_or("GESTURE needs a side (L or R)")?;
    let side = match side_tok {
        "L" | "l" => Side::Left,
        "R" | "r" => Side::Right,
        other => return Err(format!("`{other}` is not a side (L or R)")),
    };
    let kind_tok = tokens.next().ok_or("GESTURE needs a kind")?;
    let kind = match kind_tok.to_ascii_uppercase().as_str() {
        "OPEN" => GestureKind::OpenHand,
        "CLOSE" => GestureKind::CloseHand,
        "SWIPE" => GestureKind::Swipe,
        "MOVE" => {
            let mut num = |name: &str| -> Result<f64, String> {
                let tok = tokens.next().ok_or(format!("MOVE needs {name}"))?;
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or(format!("`{tok}` is not a number for {name}"))
            };
            let dx = num("dx")?;
            let dy = num("dy")?;
            GestureKind::MoveDelta { dx, dy }
        }
        other => return Err(format!("unknown gesture `{other}`")),
    };
    Ok(ScriptInput::Gesture { side, kind })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_gestures_and_comments() {
        let text = "# warmup\n0 O\n0 P  # both on\n\n100 GESTURE L MOVE 0.1 -0.05\n150 gesture r swipe\n200 ArrowUp\n";
        let ev = parse_script(text).unwrap();
        assert_eq!(ev.len(), 5);
        assert_eq!(ev[0].input, ScriptInput::Key(KeyCode::O));
        assert_eq!(ev[1].line, 3);
        assert_eq!(
            ev[2].input,
            ScriptInput::Gesture {
                side: Side::Left,
                kind: GestureKind::MoveDelta { dx: 0.1, dy: -0.05 }
            }
        );
        assert_eq!(
            ev[3].input,
            ScriptInput::Gesture {
                side: Side::Right,
                kind: GestureKind::Swipe
            }
        );
        assert_eq!(ev[4].time, Duration::from_millis(200));
    }

    #[test]
    fn empty_script() {
        assert!(parse_script("").unwrap().is_empty());
        assert!(parse_script("# nothing\n\n").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("0 O\n10 X\n", 2, "unknown key"),
            ("100 O\n50 P\n", 2, "precedes"),
            ("abc O\n", 1, "timestamp"),
            ("0\n", 1, "missing"),
            ("0 O P\n", 1, "trailing"),
            ("\n\n0 GESTURE L MOVE 1\n", 3, "dy"),
            ("0 GESTURE X OPEN\n", 1, "side"),
            ("0 GESTURE L WAVE\n", 1, "unknown gesture"),
            ("-5 O\n", 1, "timestamp"),
        ];
        for (text, line, needle) in cases {
            let e = parse_script(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}");
            assert!(e.message.contains(needle), "{text:?}: {e}");
        }
    }
}
