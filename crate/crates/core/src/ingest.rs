//! Datagram ingest: decode, drop stale or low-confidence frames, detect lost hands.

use std::collections::VecDeque;
use std::io;
use std::net::UdpSocket;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::protocol::{decode_frame, Decoded, LandmarkFrame, Side};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub listen: String,
    pub min_confidence: f32,
    pub hand_timeout_ms: u64,
    pub queue_capacity: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            listen: "0.0.0.0:9000".into(),
            min_confidence: 0.5,
            hand_timeout_ms: 500,
            queue_capacity: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IngestEvent {
    Frame(LandmarkFrame),
    /// No frame for this side within the hand timeout.
    HandLost(Side),
}

impl IngestEvent {
    pub fn side(&self) -> Side {
        match self {
            IngestEvent::Frame(f) => f.side,
            IngestEvent::HandLost(s) => *s,
        }
    }
}

/// Counters shared between the ingest activity and whoever reports diagnostics.
#[derive(Debug, Default)]
pub struct IngestStats {
    pub accepted: AtomicU64,
    pub ignored: AtomicU64,
    pub decode_errors: AtomicU64,
    pub stale: AtomicU64,
    pub low_confidence: AtomicU64,
    pub overflow: AtomicU64,
}

impl IngestStats {
    /// Frames that reached the socket but never reached the classifier.
    pub fn dropped_frames(&self) -> u64 {
        self.decode_errors.load(Ordering::Relaxed)
            + self.stale.load(Ordering::Relaxed)
            + self.low_confidence.load(Ordering::Relaxed)
            + self.overflow.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SideTrack {
    last_seq: Option<u64>,
    last_seen: Option<Duration>,
}

/// Ordering and liveness filter. Pure with respect to time: callers pass `now`.
#[derive(Debug, Clone)]
pub struct Ingestor {
    min_confidence: f32,
    hand_timeout: Duration,
    sides: [SideTrack; 2],
}

impl Ingestor {
    pub fn new(config: &IngestConfig) -> Self {
        Self {
            min_confidence: config.min_confidence,
            hand_timeout: Duration::from_millis(config.hand_timeout_ms),
            sides: Default::default(),
        }
    }

    pub fn accept_datagram(
        &mut self,
        bytes: &[u8],
        now: Duration,
        stats: &IngestStats,
    ) -> Option<LandmarkFrame> {
        match decode_frame(bytes) {
            Ok(Decoded::Frame(frame)) => self.accept_frame(frame, now, stats),
            Ok(Decoded::Ignored { .. }) => {
                stats.ignored.fetch_add(1, Ordering::Relaxed);
                None
            }
            Err(e) => {
                log::debug!("dropping datagram: {e}");
                stats.decode_errors.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn accept_frame(
        &mut self,
        frame: LandmarkFrame,
        now: Duration,
        stats: &IngestStats,
    ) -> Option<LandmarkFrame> {
        if frame.confidence < self.min_confidence {
            stats.low_confidence.fetch_add(1, Ordering::Relaxed);
            return None;
        }
        let track = &mut self.sides[frame.side.index()];
        if track.last_seq.is_some_and(|last| frame.seq <= last) {
            stats.stale.fetch_add(1, Ordering::Relaxed);
            return None;
        }
        track.last_seq = Some(frame.seq);
        track.last_seen = Some(now);
        stats.accepted.fetch_add(1, Ordering::Relaxed);
        Some(frame)
    }

    /// Sides whose last frame is older than the hand timeout. Each loss is
    /// reported once; sequence tracking for that side restarts so a restarted
    /// adapter is accepted again.
    pub fn poll_timeouts(&mut self, now: Duration) -> Vec<Side> {
        let mut lost = Vec::new();
        for side in Side::BOTH {
            let track = &mut self.sides[side.index()];
            if let Some(seen) = track.last_seen {
                if now.saturating_sub(seen) >= self.hand_timeout {
                    *track = SideTrack::default();
                    lost.push(side);
                }
            }
        }
        lost
    }
}

/// Monotonic time source.
pub trait Clock {
    fn now(&self) -> Duration;
}

#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    start: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self {
            start: Instant::now(),
        }
    }

    pub fn starting_at(start: Instant) -> Self {
        Self { start }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> Duration {
        self.start.elapsed()
    }
}

/// Manually advanced clock for tests and scripted replays.
#[derive(Debug, Clone, Default)]
pub struct ManualClock(Arc<AtomicU64>);

impl ManualClock {
    pub fn set(&self, t: Duration) {
        self.0.store(t.as_micros() as u64, Ordering::SeqCst);
    }

    pub fn advance(&self, dt: Duration) {
        self.0.fetch_add(dt.as_micros() as u64, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        Duration::from_micros(self.0.load(Ordering::SeqCst))
    }
}

/// Anything that yields whole datagrams.
pub trait DatagramSource {
    /// Waits up to `timeout` for one datagram. `Ok(None)` on timeout.
    fn recv(&mut self, buf: &mut [u8], timeout: Duration) -> io::Result<Option<usize>>;
}

impl DatagramSource for UdpSocket {
    fn recv(&mut self, buf: &mut [u8], timeout: Duration) -> io::Result<Option<usize>> {
        self.set_read_timeout(Some(timeout.max(Duration::from_millis(1))))?;
        match self.recv_from(buf) {
            Ok((n, _)) => Ok(Some(n)),
            Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

/// Replays timestamped datagrams against a [`ManualClock`].
///
/// Once the script is exhausted the clock keeps advancing by the poll timeout
/// until `end`, after which `recv` fails with `UnexpectedEof`.
#[derive(Debug)]
pub struct ScriptedSource {
    clock: ManualClock,
    datagrams: VecDeque<(Duration, Vec<u8>)>,
    end: Duration,
}

impl ScriptedSource {
    pub fn new(clock: ManualClock, datagrams: Vec<(Duration, Vec<u8>)>, end: Duration) -> Self {
        Self {
            clock,
            datagrams: datagrams.into(),
            end,
        }
    }
}

impl DatagramSource for ScriptedSource {
    fn recv(&mut self, buf: &mut [u8], timeout: Duration) -> io::Result<Option<usize>> {
        let now = self.clock.now();
        match self.datagrams.front() {
            Some((at, _)) if *at <= now + timeout => {
                let (at, bytes) = self.datagrams.pop_front().expect("front exists");
                if at > now {
                    self.clock.set(at);
                }
                let n = bytes.len().min(buf.len());
                buf[..n].copy_from_slice(&bytes[..n]);
                Ok(Some(n))
            }
            _ if now >= self.end => Err(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "scripted source exhausted",
            )),
            _ => {
                self.clock.advance(timeout);
                Ok(None)
            }
        }
    }
}

/// Per-side bounded hand-off from ingest to control. On overflow the oldest
/// entry for that side is discarded.
#[derive(Debug)]
pub struct FrameQueue {
    capacity: usize,
    sides: Mutex<[VecDeque<(Duration, IngestEvent)>; 2]>,
}

impl FrameQueue {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            sides: Mutex::new(Default::default()),
        }
    }

    /// Queues an event received at `at`. Returns true when an older entry
    /// had to be dropped.
    pub fn push(&self, at: Duration, event: IngestEvent) -> bool {
        let mut sides = self.sides.lock().expect("frame queue poisoned");
        let q = &mut sides[event.side().index()];
        let overflow = q.len() >= self.capacity;
        if overflow {
            q.pop_front();
        }
        q.push_back((at, event));
        overflow
    }

    pub fn drain(&self) -> Vec<(Duration, IngestEvent)> {
        let mut sides = self.sides.lock().expect("frame queue poisoned");
        let mut out: Vec<_> = sides[0].drain(..).collect();
        out.extend(sides[1].drain(..));
        out
    }
}

/// Poll interval for liveness checks while the socket is quiet.
const POLL: Duration = Duration::from_millis(20);

/// Runs the ingest activity until `stop` is set, `sink` returns false, or the
/// source fails. Decode errors are counted and skipped.
pub fn run_ingest<S, C, F>(
    source: &mut S,
    clock: &C,
    config: &IngestConfig,
    stats: &IngestStats,
    stop: &AtomicBool,
    mut sink: F,
) -> io::Result<()>
where
    S: DatagramSource + ?Sized,
    C: Clock + ?Sized,
    F: FnMut(IngestEvent) -> bool,
{
    let mut ingestor = Ingestor::new(config);
    let mut buf = [0u8; 2048];
    while !stop.load(Ordering::Relaxed) {
        let received = source.recv(&mut buf, POLL)?;
        let now = clock.now();
        if let Some(n) = received {
            if let Some(frame) = ingestor.accept_datagram(&buf[..n], now, stats) {
                if !sink(IngestEvent::Frame(frame)) {
                    return Ok(());
                }
            }
        }
        for side in ingestor.poll_timeouts(now) {
            if !sink(IngestEvent::HandLost(side)) {
                return Ok(());
            }
        }
    }
    Ok(())
}
