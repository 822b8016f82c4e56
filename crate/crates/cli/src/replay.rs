//! Scripted sessions over the newline-delimited stdio transport.
//!
//! A script holds one client message envelope per line. Blank lines and
//! lines starting with `#` are skipped. A replay opens with an implicit
//! `hello` and closes with a `snapshot_request`, so the transcript always
//! starts with the scene and state and ends with a snapshot.

use std::sync::Arc;

use morphplay_core::scene::Scene;
use morphplay_core::session::protocol::{self, ClientEnvelope};
use morphplay_core::session::{Mode, SessionConfig, SessionState};
use serde_json::json;
use thiserror::Error;

/// Client name used for the implicit `hello`.
pub const REPLAY_CLIENT: &str = "replay";

/// Session id used when none is given.
pub const DEFAULT_SESSION: &str = "main";

#[derive(Debug, Clone, PartialEq, Error)]
#[error("script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub session: String,
    pub mode: Mode,
    pub config: SessionConfig,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            session: DEFAULT_SESSION.to_owned(),
            mode: Mode::Rotation,
            config: SessionConfig::default(),
        }
    }
}

pub fn parse_script(text: &str) -> Result<Vec<ClientEnvelope>, ScriptError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| {
            ClientEnvelope::parse(l).map_err(|e| ScriptError {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn hello_envelope() -> ClientEnvelope {
    ClientEnvelope::new(protocol::HELLO, json!({ "client_name": REPLAY_CLIENT }))
}

pub fn snapshot_request_envelope() -> ClientEnvelope {
    ClientEnvelope::new(protocol::SNAPSHOT_REQUEST, json!({}))
}

/// The full client side of a replay: hello, the script, a final snapshot request.
pub fn framed(messages: &[ClientEnvelope]) -> Vec<ClientEnvelope> {
    let mut out = Vec::with_capacity(messages.len() + 2);
    out.push(hello_envelope());
    out.extend_from_slice(messages);
    out.push(snapshot_request_envelope());
    out
}

/// Runs `messages` against a fresh session and returns every outbound
/// message as a canonical JSON line.
pub fn replay(
    scene: Arc<Scene>,
    messages: &[ClientEnvelope],
    options: &ReplayOptions,
) -> Vec<String> {
    let mut state =
        SessionState::with_id(options.session.clone(), scene, options.mode, options.config);
    framed(messages)
        .iter()
        .flat_map(|m| state.handle_message(REPLAY_CLIENT, m))
        .map(|o| o.message.to_line())
        .collect()
}

/// Joins transcript lines into newline-terminated text.
pub fn transcript_text(lines: &[String]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(l);
        out.push('\n');
    }
    out
}

/// First line where two transcripts differ, 1-based.
pub fn first_difference(actual: &str, expected: &str) -> Option<usize> {
    if actual == expected {
        return None;
    }
    let mut a = actual.lines();
    let mut e = expected.lines();
    let mut line = 1;
    loop {
        match (a.next(), e.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            _ => return Some(line),
        }
    }
}
