//! Scripted WebSocket client, the socket counterpart of [`crate::replay`].

use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use morphplay_core::session::protocol::{self, ClientEnvelope};
use thiserror::Error;
use tokio_tungstenite::tungstenite::Message as Frame;

use crate::replay::framed;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("websocket error: {0}")]
    Socket(#[from] tokio_tungstenite::tungstenite::Error),
    #[error("server closed the connection after {0} frames")]
    Closed(usize),
    #[error("timed out after {0} frames")]
    Timeout(usize),
}

/// Sends the framed script (implicit hello, the messages, a final
/// snapshot request) to `url` and collects every frame received until the
/// final snapshot arrives. One snapshot is expected per `snapshot_request`
/// sent, so scripts whose snapshot requests are rejected will time out.
pub async fn socket_replay(
    url: &str,
    messages: &[ClientEnvelope],
    timeout: Duration,
) -> Result<Vec<String>, ClientError> {
    let (ws, _) = tokio_tungstenite::connect_async(url).await?;
    let (mut sink, mut frames) = ws.split();
    let outgoing = framed(messages);
    let expected = outgoing
        .iter()
        .filter(|m| m.kind == protocol::SNAPSHOT_REQUEST)
        .count();
    for m in &outgoing {
        sink.send(Frame::Text(m.to_line())).await?;
    }

    let mut lines = Vec::new();
    let mut snapshots = 0;
    let collect = async {
        while snapshots < expected {
            match frames.next().await {
                Some(Ok(Frame::Text(text))) => {
                    if is_snapshot(&text) {
                        snapshots += 1;
                    }
                    lines.push(text);
                }
                Some(Ok(_)) => {}
                Some(Err(e)) => return Err(ClientError::Socket(e)),
                None => return Err(ClientError::Closed(lines.len())),
            }
        }
        Ok(())
    };
    match tokio::time::timeout(timeout, collect).await {
        Ok(result) => result?,
        Err(_) => return Err(ClientError::Timeout(lines.len())),
    }
    let _ = sink.close().await;
    Ok(lines)
}

fn is_snapshot(line: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(line)
        .ok()
        .and_then(|v| {
            v.get("type")
                .and_then(|t| t.as_str())
                .map(|t| t == protocol::SNAPSHOT)
        })
        .unwrap_or(false)
}
