//! WebSocket transport for the session protocol.
//!
//! Each connection joins the session named by its URL path (`/` joins
//! `main`). Every session lives behind one lock, so its messages are
//! handled in a single total order and each client receives its frames in
//! that order. Frames are canonical JSON text, one message per frame.

use std::collections::BTreeMap;
use std::future::Future;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use futures_util::{SinkExt, StreamExt};
use morphplay_core::scene::Scene;
use morphplay_core::session::protocol::ClientEnvelope;
use morphplay_core::session::{ErrorCode, Mode, Outbound, SessionConfig, SessionState, Target};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc::{unbounded_channel, UnboundedSender};
use tokio_tungstenite::tungstenite::handshake::server::{ErrorResponse, Request, Response};
use tokio_tungstenite::tungstenite::http::StatusCode;
use tokio_tungstenite::tungstenite::Message as Frame;

use crate::replay::DEFAULT_SESSION;

/// Longest accepted session id.
pub const MAX_SESSION_ID_LEN: usize = 64;

pub struct ServerConfig {
    pub scene: Arc<Scene>,
    pub mode: Mode,
    pub session: SessionConfig,
    /// Where final snapshots are written on shutdown; `None` writes nothing.
    pub snapshot_dir: Option<PathBuf>,
    /// Sessions restored from snapshots, served under their own ids.
    pub restored: Vec<SessionState>,
}

/// Session id named by a request path, if it is acceptable.
pub fn session_from_path(path: &str) -> Option<String> {
    let id = path.trim_start_matches('/').trim_end_matches('/');
    if id.is_empty() {
        return Some(DEFAULT_SESSION.to_owned());
    }
    let ok = id.len() <= MAX_SESSION_ID_LEN
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
    ok.then(|| id.to_owned())
}

/// File a session's final snapshot is written to.
pub fn snapshot_path(dir: &Path, session: &str) -> PathBuf {
    dir.join(format!("{session}.snapshot.json"))
}

struct Hub {
    state: SessionState,
    clients: BTreeMap<u64, UnboundedSender<String>>,
}

impl Hub {
    fn dispatch(&mut self, client: u64, text: &str) {
        let out = match ClientEnvelope::parse(text) {
            Ok(env) => self.state.handle_message(&client_name(client), &env),
            Err(e) => vec![Outbound {
                target: Target::Requester,
                message: self
                    .state
                    .error_message(ErrorCode::BadMessage, e.to_string()),
            }],
        };
        self.route(client, out);
    }

    fn reject(&mut self, client: u64, detail: &str) {
        let message = self.state.error_message(ErrorCode::BadMessage, detail);
        self.route(
            client,
            vec![Outbound {
                target: Target::Requester,
                message,
            }],
        );
    }

    fn route(&mut self, client: u64, out: Vec<Outbound>) {
        for o in out {
            let line = o.message.to_line();
            match o.target {
                Target::Broadcast => {
                    for tx in self.clients.values() {
                        let _ = tx.send(line.clone());
                    }
                }
                Target::Requester => {
                    if let Some(tx) = self.clients.get(&client) {
                        let _ = tx.send(line);
                    }
                }
            }
        }
    }
}

fn client_name(client: u64) -> String {
    format!("conn-{client}")
}

struct Shared {
    scene: Arc<Scene>,
    mode: Mode,
    session: SessionConfig,
    hubs: Mutex<BTreeMap<String, Arc<Mutex<Hub>>>>,
    next_client: AtomicU64,
}

impl Shared {
    fn hub(&self, id: &str) -> Arc<Mutex<Hub>> {
        let mut hubs = self.hubs.lock().expect("hub table poisoned");
        hubs.entry(id.to_owned())
            .or_insert_with(|| {
                Arc::new(Mutex::new(Hub {
                    state: SessionState::with_id(id, self.scene.clone(), self.mode, self.session),
                    clients: BTreeMap::new(),
                }))
            })
            .clone()
    }
}

/// Serves connections from `listener` until `shutdown` resolves, then
/// disconnects every client and writes one snapshot per session.
/// Returns the snapshot files written.
pub async fn serve(
    listener: TcpListener,
    config: ServerConfig,
    shutdown: impl Future<Output = ()>,
) -> io::Result<Vec<PathBuf>> {
    let hubs = config
        .restored
        .into_iter()
        .map(|state| {
            let id = state.session_id().to_owned();
            let hub = Hub {
                state,
                clients: BTreeMap::new(),
            };
            (id, Arc::new(Mutex::new(hub)))
        })
        .collect();
    let shared = Arc::new(Shared {
        scene: config.scene,
        mode: config.mode,
        session: config.session,
        hubs: Mutex::new(hubs),
        next_client: AtomicU64::new(1),
    });

    tokio::pin!(shutdown);
    loop {
        tokio::select! {
            _ = &mut shutdown => break,
            accepted = listener.accept() => {
                if let Ok((stream, _)) = accepted {
                    tokio::spawn(connection(stream, shared.clone()));
                }
            }
        }
    }

    let hubs: Vec<_> = {
        let table = shared.hubs.lock().expect("hub table poisoned");
        table.values().cloned().collect()
    };
    let mut written = Vec::new();
    for hub in hubs {
        let (id, text) = {
            let mut hub = hub.lock().expect("session poisoned");
            hub.clients.clear();
            (hub.state.session_id().to_owned(), hub.state.snapshot_text())
        };
        if let Some(dir) = &config.snapshot_dir {
            let path = snapshot_path(dir, &id);
            write_atomically(&path, &text)?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_atomically(path: &Path, text: &str) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

#[allow(clippy::result_large_err)]
async fn connection(stream: TcpStream, shared: Arc<Shared>) {
    let mut session = None;
    let callback = |req: &Request, resp: Response| -> Result<Response, ErrorResponse> {
        match session_from_path(req.uri().path()) {
            Some(id) => {
                session = Some(id);
                Ok(resp)
            }
            None => {
                let mut err = ErrorResponse::new(Some("invalid session id".to_owned()));
                *err.status_mut() = StatusCode::BAD_REQUEST;
                Err(err)
            }
        }
    };
    let Ok(ws) = tokio_tungstenite::accept_hdr_async(stream, callback).await else {
        return;
    };
    let Some(session) = session else { return };

    let (mut sink, mut frames) = ws.split();
    let (tx, mut rx) = unbounded_channel::<String>();
    let client = shared.next_client.fetch_add(1, Ordering::Relaxed);
    let hub = shared.hub(&session);
    hub.lock()
        .expect("session poisoned")
        .clients
        .insert(client, tx);

    let writer = tokio::spawn(async move {
        while let Some(line) = rx.recv().await {
            if sink.send(Frame::Text(line)).await.is_err() {
                return;
            }
        }
        let _ = sink.close().await;
    });

    while let Some(Ok(frame)) = frames.next().await {
        match frame {
            Frame::Text(text) => hub
                .lock()
                .expect("session poisoned")
                .dispatch(client, &text),
            Frame::Binary(_) => hub
                .lock()
                .expect("session poisoned")
                .reject(client, "binary frames are not supported"),
            Frame::Close(_) => break,
            _ => {}
        }
    }
    hub.lock()
        .expect("session poisoned")
        .clients
        .remove(&client);
    let _ = writer.await;
}
