//! State broadcast to UI clients over WebSocket.
//!
//! The control activity calls [`BroadcastHub::publish`] every tick. The hub
//! never blocks it: each client has its own small drop-oldest queue, drained
//! by that client's thread.

use std::collections::VecDeque;
use std::io;
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::SyncSender;
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use tungstenite::protocol::WebSocketConfig;
use tungstenite::{Message, WebSocket};

use super::snapshot::{ClientMessage, Diagnostics, StateSnapshot};
use crate::mapping::SynthParams;
use crate::wand::SceneState;

/// Outbound queue for one client.
#[derive(Debug)]
pub struct ClientQueue {
    capacity: usize,
    inner: Mutex<VecDeque<Arc<str>>>,
    dropped: AtomicU64,
    closed: AtomicBool,
}

impl ClientQueue {
    fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            inner: Mutex::new(VecDeque::with_capacity(capacity)),
            dropped: AtomicU64::new(0),
            closed: AtomicBool::new(false),
        }
    }

    fn push(&self, msg: Arc<str>) {
        let mut q = self.inner.lock().expect("client queue poisoned");
        if q.len() >= self.capacity {
            q.pop_front();
            self.dropped.fetch_add(1, Ordering::Relaxed);
        }
        q.push_back(msg);
    }

    pub fn pop(&self) -> Option<Arc<str>> {
        self.inner.lock().expect("client queue poisoned").pop_front()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("client queue poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dropped(&self) -> u64 {
        self.dropped.load(Ordering::Relaxed)
    }

    /// Marks the client gone; the hub forgets it on the next publish.
    pub fn close(&self) {
        self.closed.store(true, Ordering::Relaxed);
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::Relaxed)
    }
}

type Content = (SceneState, SynthParams, Diagnostics);

#[derive(Debug)]
struct Subscriber {
    queue: Arc<ClientQueue>,
    last_sent: Option<(std::time::Duration, Content)>,
}

/// Fan-out of state snapshots with per-client rate limiting.
///
/// A client is sent a snapshot when its content differs from the last one it
/// received (or a heartbeat interval has passed) and at least
/// `1 / max_hz` has elapsed since its previous message.
#[derive(Debug)]
pub struct BroadcastHub {
    min_interval: Duration,
    heartbeat: Duration,
    queue_capacity: usize,
    subscribers: Mutex<Vec<Subscriber>>,
}

impl BroadcastHub {
    pub fn new(max_hz: f64, queue_capacity: usize) -> Self {
        Self {
            min_interval: Duration::from_secs_f64(1.0 / max_hz),
            heartbeat: Duration::from_secs(1),
            queue_capacity,
            subscribers: Mutex::new(Vec::new()),
        }
    }

    pub fn subscribe(&self) -> Arc<ClientQueue> {
        let queue = Arc::new(ClientQueue::new(self.queue_capacity));
        self.subscribers
            .lock()
            .expect("hub poisoned")
            .push(Subscriber {
                queue: queue.clone(),
                last_sent: None,
            });
        queue
    }

    pub fn client_count(&self) -> usize {
        self.subscribers.lock().expect("hub poisoned").len()
    }

    /// Queues `snapshot` for every client that is due. Returns how many
    /// clients it was queued for. Serializes at most once.
    pub fn publish(&self, snapshot: &StateSnapshot) -> usize {
        let mut subs = self.subscribers.lock().expect("hub poisoned");
        subs.retain(|s| !s.queue.is_closed());
        if subs.is_empty() {
            return 0;
        }
        let now = snapshot.time;
        let content = (snapshot.scene, snapshot.params, snapshot.diag);
        let mut json: Option<Arc<str>> = None;
        let mut sent = 0;
        for sub in subs.iter_mut() {
            let due = match &sub.last_sent {
                None => true,
                Some((at, last)) => {
                    let elapsed = now.saturating_sub(*at);
                    elapsed >= self.min_interval && (*last != content || elapsed >= self.heartbeat)
                }
            };
            if due {
                let msg = json.get_or_insert_with(|| snapshot.to_json().into());
                sub.queue.push(msg.clone());
                sub.last_sent = Some((now, content));
                sent += 1;
            }
        }
        sent
    }
}

/// Inputs that UI clients (or a local terminal) forward to the control activity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ControlInput {
    Key(String),
}

const WS_POLL: Duration = Duration::from_millis(5);
const WS_WRITE_TIMEOUT: Duration = Duration::from_millis(100);

/// Accepts WebSocket clients until `stop` is set.
pub fn spawn_ws_server(
    listener: TcpListener,
    hub: Arc<BroadcastHub>,
    inbox: SyncSender<ControlInput>,
    stop: Arc<AtomicBool>,
) -> io::Result<JoinHandle<()>> {
    listener.set_nonblocking(true)?;
    thread::Builder::new()
        .name("ws-accept".into())
        .spawn(move || {
            let mut clients = Vec::new();
            while !stop.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, peer)) => {
                        log::info!("ui client connected from {peer}");
                        let hub = hub.clone();
                        let inbox = inbox.clone();
                        let stop = stop.clone();
                        let spawned = thread::Builder::new()
                            .name(format!("ws-{peer}"))
                            .spawn(move || {
                                if let Err(e) = serve_client(stream, &hub, &inbox, &stop) {
                                    log::info!("ui client {peer} dropped: {e}");
                                }
                            });
                        match spawned {
                            Ok(h) => clients.push(h),
                            Err(e) => log::warn!("cannot spawn client thread: {e}"),
                        }
                    }
                    Err(e) if e.kind() == io::ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_millis(10));
                    }
                    Err(e) => log::warn!("accept failed: {e}"),
                }
                clients.retain(|h: &JoinHandle<()>| !h.is_finished());
            }
            for h in clients {
                let _ = h.join();
            }
        })
}

fn serve_client(
    stream: TcpStream,
    hub: &BroadcastHub,
    inbox: &SyncSender<ControlInput>,
    stop: &AtomicBool,
) -> Result<(), tungstenite::Error> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(Duration::from_secs(2)))?;
    let mut config = WebSocketConfig::default();
    config.write_buffer_size = 0;
    config.max_write_buffer_size = 64 * 1024;
    let mut ws = tungstenite::accept_with_config(stream, Some(config))
        .map_err(|e| match e {
            tungstenite::HandshakeError::Failure(e) => e,
            tungstenite::HandshakeError::Interrupted(_) => {
                tungstenite::Error::Io(io::Error::new(io::ErrorKind::TimedOut, "handshake stalled"))
            }
        })?;
    ws.get_mut().set_read_timeout(Some(WS_POLL))?;
    ws.get_mut().set_write_timeout(Some(WS_WRITE_TIMEOUT))?;
    let queue = hub.subscribe();
    let result = client_loop(&mut ws, &queue, inbox, stop);
    queue.close();
    if result.is_ok() {
        let _ = ws.close(None);
        let _ = ws.flush();
    }
    result
}

fn is_timeout(e: &tungstenite::Error) -> bool {
    matches!(e, tungstenite::Error::Io(io) if matches!(io.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut))
}

fn client_loop(
    ws: &mut WebSocket<TcpStream>,
    queue: &ClientQueue,
    inbox: &SyncSender<ControlInput>,
    stop: &AtomicBool,
) -> Result<(), tungstenite::Error> {
    while !stop.load(Ordering::Relaxed) {
        match ws.read() {
            Ok(Message::Text(text)) => match serde_json::from_str::<ClientMessage>(&text) {
                Ok(ClientMessage::Key { code }) => {
                    if inbox.try_send(ControlInput::Key(code)).is_err() {
                        log::debug!("control inbox full, key dropped");
                    }
                }
                Ok(ClientMessage::Hello { client }) => log::info!("ui client says hello: {client}"),
                Err(e) => log::debug!("unrecognized client message: {e}"),
            },
            Ok(Message::Close(_)) => return Ok(()),
            Ok(_) => {}
            Err(e) if is_timeout(&e) => {}
            Err(tungstenite::Error::ConnectionClosed) => return Ok(()),
            Err(e) => return Err(e),
        }
        while let Some(msg) = queue.pop() {
            match ws.send(Message::Text(msg.to_string())) {
                Ok(()) => {}
                Err(e) if is_timeout(&e) => break,
                Err(tungstenite::Error::WriteBufferFull(_)) => {
                    queue.dropped.fetch_add(1, Ordering::Relaxed);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
