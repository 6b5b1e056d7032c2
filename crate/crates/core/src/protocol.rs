//! Wire format for hand-landmark frames.
//!
//! One OSC 1.0 message per hand per camera frame, big-endian, 4-byte aligned:
//!
//! ```text
//! "/nl/hand\0\0\0\0"                      address (12 bytes)
//! ",shfff…f\0"  (",sh" + 64 × 'f' + NUL)  type tags (68 bytes)
//! "L\0\0\0" | "R\0\0\0"                   side
//! i64                                     sequence number
//! f32                                     detector confidence
//! 63 × f32                                x0 y0 z0 x1 … z20
//! ```
//!
//! Every message is exactly [`FRAME_MESSAGE_LEN`] bytes. No bundles.

use std::fmt;

use thiserror::Error;

/// OSC address carried by every landmark frame.
pub const FRAME_ADDRESS: &str = "/nl/hand";

/// Number of landmarks in one detected hand.
pub const LANDMARK_COUNT: usize = 21;

/// Encoded size of one landmark frame message.
pub const FRAME_MESSAGE_LEN: usize = 12 + 68 + 4 + 8 + 4 + LANDMARK_COUNT * 3 * 4;

pub const WRIST: usize = 0;
pub const FINGERTIPS: [usize; 5] = [4, 8, 12, 16, 20];
pub const MIDDLE_MCP: usize = 9;
/// Wrist plus the four finger MCP joints.
pub const PALM_POINTS: [usize; 5] = [0, 5, 9, 13, 17];

const COORD_MIN: f32 = -0.5;
const COORD_MAX: f32 = 1.5;

/// Which hand (and therefore which wand) a frame or event belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "L" | "l" | "left" | "Left" => Some(Side::Left),
            "R" | "r" | "right" | "Right" => Some(Side::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One landmark in normalized image coordinates (y grows upward).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Landmark {
    pub x: f32,
    pub y: f32,
    pub z: f32,
}

impl Landmark {
    pub const fn new(x: f32, y: f32, z: f32) -> Self {
        Self { x, y, z }
    }
}

/// One hand's detected landmarks for a single camera frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    pub side: Side,
    /// Per-side sequence number assigned by the capture adapter.
    pub seq: u64,
    pub confidence: f32,
    pub points: [Landmark; LANDMARK_COUNT],
}

/// A frame field that violates the frame invariants.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid frame field `{field}`: {reason}")]
pub struct FrameError {
    pub field: String,
    pub reason: String,
}

impl FrameError {
    fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl LandmarkFrame {
    /// Builds a frame from a flat point list, refusing anything but 21 points.
    pub fn from_points(
        side: Side,
        seq: u64,
        confidence: f32,
        points: &[Landmark],
    ) -> Result<Self, FrameError> {
        let points: [Landmark; LANDMARK_COUNT] = points.try_into().map_err(|_| {
            FrameError::new(
                "points",
                format!("expected {LANDMARK_COUNT} landmarks, got {}", points.len()),
            )
        })?;
        let frame = Self {
            side,
            seq,
            confidence,
            points,
        };
        frame.validate()?;
        Ok(frame)
    }

    pub fn validate(&self) -> Result<(), FrameError> {
        if self.seq > i64::MAX as u64 {
            return Err(FrameError::new("seq", "does not fit a signed 64-bit OSC integer"));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(FrameError::new(
                "confidence",
                format!("{} outside [0, 1]", self.confidence),
            ));
        }
        for (i, p) in self.points.iter().enumerate() {
            for (axis, v) in [("x", p.x), ("y", p.y)] {
                if !(COORD_MIN..=COORD_MAX).contains(&v) {
                    return Err(FrameError::new(
                        format!("points[{i}].{axis}"),
                        format!("{v} outside [{COORD_MIN}, {COORD_MAX}]"),
                    ));
                }
            }
            if !p.z.is_finite() {
                return Err(FrameError::new(format!("points[{i}].z"), "not finite"));
            }
        }
        Ok(())
    }
}

/// Serializes a frame as a single OSC message.
pub fn encode_frame(frame: &LandmarkFrame) -> Result<Vec<u8>, FrameError> {
    frame.validate()?;
    let mut out = Vec::with_capacity(FRAME_MESSAGE_LEN);
    write_osc_string(&mut out, FRAME_ADDRESS);
    write_osc_string(&mut out, &expected_type_tags());
    write_osc_string(&mut out, frame.side.as_str());
    out.extend_from_slice(&(frame.seq as i64).to_be_bytes());
    out.extend_from_slice(&frame.confidence.to_be_bytes());
    for p in &frame.points {
        out.extend_from_slice(&p.x.to_be_bytes());
        out.extend_from_slice(&p.y.to_be_bytes());
        out.extend_from_slice(&p.z.to_be_bytes());
    }
    debug_assert_eq!(out.len(), FRAME_MESSAGE_LEN);
    Ok(out)
}

/// Outcome of decoding one datagram.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoded {
    Frame(LandmarkFrame),
    /// Well-formed OSC addressed elsewhere; other traffic may share the port.
    Ignored { address: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("malformed OSC message at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error(transparent)]
    InvalidFrame(#[from] FrameError),
}

fn malformed(offset: usize, reason: impl Into<String>) -> DecodeError {
    DecodeError::Malformed {
        offset,
        reason: reason.into(),
    }
}

/// Parses one datagram. Never reads past `bytes`.
pub fn decode_frame(bytes: &[u8]) -> Result<Decoded, DecodeError> {
    let mut reader = Reader { bytes, pos: 0 };
    let address = reader.osc_string()?;
    if !address.starts_with('/') {
        // Bundles ("#bundle") and anything else that isn't a plain message.
        return Ok(Decoded::Ignored { address });
    }
    if address != FRAME_ADDRESS {
        return Ok(Decoded::Ignored { address });
    }
    let tags_at = reader.pos;
    let tags = reader.osc_string()?;
    if tags != expected_type_tags() {
        return Err(malformed(tags_at, format!("unexpected type tags `{tags}`")));
    }
    let side_at = reader.pos;
    let side_str = reader.osc_string()?;
    let side = Side::parse(&side_str)
        .filter(|s| s.as_str() == side_str)
        .ok_or_else(|| FrameError::new("side", format!("`{side_str}` is not L or R (byte {side_at})")))?;
    let seq = reader.i64()?;
    if seq < 0 {
        return Err(FrameError::new("seq", format!("negative sequence number {seq}")).into());
    }
    let confidence = reader.f32()?;
    let mut points = [Landmark::default(); LANDMARK_COUNT];
    for p in points.iter_mut() {
        p.x = reader.f32()?;
        p.y = reader.f32()?;
        p.z = reader.f32()?;
    }
    if reader.pos != bytes.len() {
        return Err(malformed(reader.pos, "trailing bytes after last argument"));
    }
    let frame = LandmarkFrame {
        side,
        seq: seq as u64,
        confidence,
        points,
    };
    frame.validate()?;
    Ok(Decoded::Frame(frame))
}

fn expected_type_tags() -> String {
    let mut tags = String::with_capacity(3 + LANDMARK_COUNT * 3 + 1);
    tags.push_str(",sh");
    tags.extend(std::iter::repeat('f').take(1 + LANDMARK_COUNT * 3));
    tags
}

fn write_osc_string(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(s.as_bytes());
    let padded = (s.len() / 4 + 1) * 4;
    out.resize(out.len() + padded - s.len(), 0);
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], DecodeError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| malformed(self.pos, format!("need {n} bytes, datagram ends")))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn osc_string(&mut self) -> Result<String, DecodeError> {
        let start = self.pos;
        let rest = &self.bytes[start.min(self.bytes.len())..];
        let nul = rest
            .iter()
            .position(|&b| b == 0)
            .ok_or_else(|| malformed(start, "unterminated string"))?;
        let s = std::str::from_utf8(&rest[..nul])
            .map_err(|_| malformed(start, "string is not valid UTF-8"))?
            .to_owned();
        let padded = (nul / 4 + 1) * 4;
        let raw = self.take(padded)?;
        if raw[nul..].iter().any(|&b| b != 0) {
            return Err(malformed(start + nul, "non-zero string padding"));
        }
        Ok(s)
    }

    fn i64(&mut self) -> Result<i64, DecodeError> {
        let raw = self.take(8)?;
        Ok(i64::from_be_bytes(raw.try_into().expect("8 bytes")))
    }

    fn f32(&mut self) -> Result<f32, DecodeError> {
        let raw = self.take(4)?;
        Ok(f32::from_be_bytes(raw.try_into().expect("4 bytes")))
    }
}
