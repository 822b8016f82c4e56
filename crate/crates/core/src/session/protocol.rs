//! Wire envelope shared by the WebSocket and stdio transports: one JSON
//! object per frame or line.
//!
//! Client to server: `hello`, `set_param`, `select_part`, `set_mode`,
//! `reset`, `snapshot_request`. Server to client: `scene`, `state_update`,
//! `preview`, `snapshot`, `error`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::Mode;
use crate::canonical;

pub const HELLO: &str = "hello";
pub const SET_PARAM: &str = "set_param";
pub const SELECT_PART: &str = "select_part";
pub const SET_MODE: &str = "set_mode";
pub const RESET: &str = "reset";
pub const SNAPSHOT_REQUEST: &str = "snapshot_request";

pub const SCENE: &str = "scene";
pub const STATE_UPDATE: &str = "state_update";
pub const PREVIEW: &str = "preview";
pub const SNAPSHOT: &str = "snapshot";
pub const ERROR: &str = "error";

/// A server-to-client message. `seq` is the state sequence number the
/// message reflects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    #[serde(rename = "type")]
    pub kind: String,
    pub session: String,
    pub seq: u64,
    pub payload: Value,
}

impl Message {
    /// Canonical single-line JSON, as written to transcripts and frames.
    pub fn to_line(&self) -> String {
        canonical::canonical(self).expect("message serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Broadcast,
    Requester,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub target: Target,
    pub message: Message,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadMessage,
    BadPayload,
    UnknownType,
    UnknownParam,
    OutOfBounds,
    OffStep,
    WrongType,
    WrongMode,
    WrongSession,
    StaleSeq,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("malformed message: {0}")]
pub struct EnvelopeError(pub String);

/// A client-to-server message before its payload is interpreted. `seq`, when
/// present, is the client's own counter and must strictly increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientEnvelope {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    #[serde(default = "empty_object")]
    pub payload: Value,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

impl ClientEnvelope {
    pub fn new(kind: &str, payload: Value) -> Self {
        Self {
            kind: kind.into(),
            session: None,
            seq: None,
            payload,
        }
    }

    pub fn parse(text: &str) -> Result<Self, EnvelopeError> {
        serde_json::from_str(text).map_err(|e| EnvelopeError(e.to_string()))
    }

    pub fn to_line(&self) -> String {
        canonical::canonical(self).expect("envelope serializes")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct HelloPayload {
    #[serde(default, rename = "client_name")]
    _client_name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SetParamPayload {
    pub id: String,
    pub value: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SelectPartPayload {
    pub index: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SetModePayload {
    pub mode: Mode,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct EmptyPayload {}
