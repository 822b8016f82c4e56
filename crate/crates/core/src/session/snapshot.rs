//! Canonical session snapshots and restore.
//!
//! A snapshot records the session id, scene name, mode, seq and parameter
//! values, plus the selection and preview verdict they imply. Restore reads
//! back only the independent fields and recomputes the rest, so
//! `snapshot → restore → snapshot` reproduces the same bytes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{Mode, SessionConfig, SessionState};
use crate::canonical;
use crate::feasibility::Verdict;
use crate::geometry::RigidTransform;
use crate::scene::{Scene, Selection};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapshotError {
    #[error("malformed snapshot: {0}")]
    Malformed(String),
    #[error("snapshot is for scene `{found}`, not `{expected}`")]
    SceneMismatch { expected: String, found: String },
    #[error("snapshot parameter `{id}`: {message}")]
    BadParam { id: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreviewSummary {
    pub part_id: String,
    pub pose: RigidTransform,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotDocument {
    pub session: String,
    pub scene: String,
    pub mode: Mode,
    pub seq: u64,
    pub params: BTreeMap<String, super::ParamValue>,
    pub selection: Option<Selection>,
    pub preview: Option<PreviewSummary>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotInput {
    session: String,
    scene: String,
    mode: Mode,
    seq: u64,
    params: BTreeMap<String, Value>,
    // Derived from the fields above; read but not trusted.
    #[allow(dead_code)]
    selection: Value,
    #[allow(dead_code)]
    preview: Value,
}

impl SessionState {
    pub fn snapshot(&self) -> SnapshotDocument {
        SnapshotDocument {
            session: self.session_id.clone(),
            scene: self.scene.name().to_owned(),
            mode: self.mode,
            seq: self.seq,
            params: self.params.clone(),
            selection: self.selection.clone(),
            preview: self.last_preview.as_ref().map(|p| PreviewSummary {
                part_id: p.part_id.clone(),
                pose: p.preview_pose,
                verdict: p.verdict.clone(),
            }),
        }
    }

    /// Canonical snapshot document text (newline-terminated).
    pub fn snapshot_text(&self) -> String {
        canonical::canonical_document(&self.snapshot()).expect("snapshot serializes")
    }

    /// Rebuilds a session from snapshot text taken on the same scene.
    pub fn restore(
        scene: Arc<Scene>,
        config: SessionConfig,
        text: &str,
    ) -> Result<Self, SnapshotError> {
        let input: SnapshotInput =
            serde_json::from_str(text).map_err(|e| SnapshotError::Malformed(e.to_string()))?;
        if input.scene != scene.name() {
            return Err(SnapshotError::SceneMismatch {
                expected: scene.name().to_owned(),
                found: input.scene,
            });
        }
        let mut state = SessionState::with_id(input.session, scene, input.mode, config);
        if let Some(extra) = input.params.keys().find(|k| state.def(k).is_none()) {
            return Err(SnapshotError::BadParam {
                id: extra.clone(),
                message: "not defined in this mode".into(),
            });
        }
        let mut params = BTreeMap::new();
        for def in &state.defs {
            let raw = input
                .params
                .get(&def.id)
                .ok_or_else(|| SnapshotError::BadParam {
                    id: def.id.clone(),
                    message: "missing".into(),
                })?;
            let value = def.coerce(raw).map_err(|e| SnapshotError::BadParam {
                id: def.id.clone(),
                message: e.to_string(),
            })?;
            params.insert(def.id.clone(), value);
        }
        state.params = params;
        state.seq = input.seq;
        state.refresh();
        Ok(state)
    }
}
