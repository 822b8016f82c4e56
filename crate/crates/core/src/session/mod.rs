//! The live session: parameter state for one scene and mode, driven by
//! client messages and mirrored to every viewer.
//!
//! All changes to a session go through [`SessionState::handle_message`],
//! which the transport must call from a single ordered stream. Every
//! accepted change bumps `seq` by one (no-op `set_param` included) and is
//! broadcast as a `state_update` followed by a `preview`. Rejected messages
//! leave the state untouched and produce an `error` for the sender only.

pub mod params;
pub mod protocol;
mod snapshot;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::feasibility::{
    apply_request, PivotTolerance, PreviewResult, Request, RotationRequest, TranslationRequest,
};
use crate::geometry::{AngleDeg, PrincipalAxis, RotationSense, RotationSpec, Vec3};
use crate::scene::{resolve_pivot, PivotControls, Scene, SceneDocument, Selection, Snap};

pub use params::{ParamDef, ParamError, ParamKind, ParamValue};
pub use protocol::{ClientEnvelope, ErrorCode, Message, Outbound, Target};
pub use snapshot::{SnapshotDocument, SnapshotError};

use protocol::{EmptyPayload, HelloPayload, SelectPartPayload, SetModePayload, SetParamPayload};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Translation,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SessionConfig {
    pub pivot_tolerance: PivotTolerance,
    /// Strip the verdict from preview messages, leaving the student to judge
    /// feasibility on their own.
    pub silent_verdicts: bool,
}

static SESSION_COUNTER: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone)]
pub struct SessionState {
    session_id: String,
    scene: Arc<Scene>,
    config: SessionConfig,
    mode: Mode,
    defs: Vec<ParamDef>,
    params: BTreeMap<String, ParamValue>,
    selection: Option<Selection>,
    last_preview: Option<PreviewResult>,
    /// Pivot came from a clamped free offset.
    pivot_clamped: bool,
    seq: u64,
    /// Highest client-supplied seq per connection. Connection-scoped, so it
    /// is not part of snapshots.
    client_seqs: HashMap<String, u64>,
}

struct Rejection(ErrorCode, String);

impl From<ParamError> for Rejection {
    fn from(e: ParamError) -> Self {
        let code = match e {
            ParamError::OutOfBounds { .. } => ErrorCode::OutOfBounds,
            ParamError::OffStep { .. } => ErrorCode::OffStep,
            ParamError::WrongType { .. } => ErrorCode::WrongType,
        };
        Rejection(code, e.to_string())
    }
}

fn decode<T: serde::de::DeserializeOwned>(kind: &str, payload: &Value) -> Result<T, Rejection> {
    T::deserialize(payload).map_err(|e| Rejection(ErrorCode::BadPayload, format!("{kind}: {e}")))
}

fn defs_for(mode: Mode, scene: &Scene) -> Vec<ParamDef> {
    match mode {
        Mode::Translation => params::translation_defs(),
        Mode::Rotation => params::rotation_defs(scene.rotatable_index().len()),
    }
}

impl SessionState {
    /// New session with a process-unique id.
    pub fn create(scene: Arc<Scene>, mode: Mode, config: SessionConfig) -> Self {
        let n = SESSION_COUNTER.fetch_add(1, Ordering::Relaxed);
        Self::with_id(format!("session-{n}"), scene, mode, config)
    }

    pub fn with_id(
        id: impl Into<String>,
        scene: Arc<Scene>,
        mode: Mode,
        config: SessionConfig,
    ) -> Self {
        let mut state = Self {
            session_id: id.into(),
            scene,
            config,
            mode,
            defs: Vec::new(),
            params: BTreeMap::new(),
            selection: None,
            last_preview: None,
            pivot_clamped: false,
            seq: 0,
            client_seqs: HashMap::new(),
        };
        state.load_defaults(mode);
        state
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn scene(&self) -> &Arc<Scene> {
        &self.scene
    }

    pub fn config(&self) -> SessionConfig {
        self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn defs(&self) -> &[ParamDef] {
        &self.defs
    }

    pub fn def(&self, id: &str) -> Option<&ParamDef> {
        self.defs.iter().find(|d| d.id == id)
    }

    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.params
    }

    pub fn param(&self, id: &str) -> Option<ParamValue> {
        self.params.get(id).copied()
    }

    pub fn selection(&self) -> Option<&Selection> {
        self.selection.as_ref()
    }

    pub fn last_preview(&self) -> Option<&PreviewResult> {
        self.last_preview.as_ref()
    }

    /// Every parameter is present, defined and within its definition.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.params.len() != self.defs.len() {
            return Err(format!(
                "{} params for {} definitions",
                self.params.len(),
                self.defs.len()
            ));
        }
        for def in &self.defs {
            match self.params.get(&def.id) {
                Some(v) if def.admits(*v) => {}
                Some(v) => return Err(format!("{} holds {v:?}, violating {:?}", def.id, def.kind)),
                None => return Err(format!("{} missing", def.id)),
            }
        }
        Ok(())
    }

    fn load_defaults(&mut self, mode: Mode) {
        self.mode = mode;
        self.defs = defs_for(mode, &self.scene);
        self.params = self
            .defs
            .iter()
            .map(|d| (d.id.clone(), d.default))
            .collect();
        self.refresh();
    }

    /// Recomputes the selection and preview from the current parameters.
    fn refresh(&mut self) {
        self.selection = match self.mode {
            Mode::Rotation => self
                .scene
                .select_part(self.index_param(params::PART) as i64)
                .ok(),
            Mode::Translation => None,
        };
        let request = self.current_request();
        self.last_preview = request
            .as_ref()
            .map(|req| apply_request(&self.scene, req, self.config.pivot_tolerance));
    }

    fn number_param(&self, id: &str) -> f64 {
        self.params.get(id).map_or(0.0, |v| v.as_f64())
    }

    fn index_param(&self, id: &str) -> usize {
        self.params.get(id).map_or(0, |v| v.as_index())
    }

    /// The transformation request described by the current parameters, if
    /// the scene has a part for this mode.
    pub fn current_request(&mut self) -> Option<Request> {
        self.pivot_clamped = false;
        match self.mode {
            Mode::Translation => {
                let part = self.scene.translatable_parts().next()?;
                let t = Vec3::new(
                    self.number_param(params::TX),
                    self.number_param(params::TY),
                    self.number_param(params::TZ),
                );
                Some(Request::Translation(TranslationRequest {
                    part_id: part.id.clone(),
                    t,
                }))
            }
            Mode::Rotation => {
                let id = self
                    .scene
                    .rotatable_index()
                    .get(self.index_param(params::PART))?;
                let part = self.scene.part(id)?;
                let mut controls = PivotControls::default();
                for i in 0..3 {
                    controls.snaps[i] = Snap::from_index(self.index_param(params::PIVOT_SNAP[i]))
                        .unwrap_or(Snap::Center);
                    controls.offsets[i] = self.number_param(params::PIVOT_OFFSET[i]);
                }
                let pivot = resolve_pivot(part, &controls);
                self.pivot_clamped = pivot.clamped;
                let axis = PrincipalAxis::from_index(self.index_param(params::AXIS))?;
                let sense = if self.params.get(params::SENSE).is_some_and(|v| v.as_bool()) {
                    RotationSense::Cw
                } else {
                    RotationSense::Ccw
                };
                let angle = AngleDeg::new(self.number_param(params::ANGLE)).ok()?;
                let spec = RotationSpec::new(axis, sense, angle, pivot.world).ok()?;
                Some(Request::Rotation(RotationRequest {
                    part_id: id.clone(),
                    spec,
                }))
            }
        }
    }

    fn message(&self, kind: &str, payload: Value) -> Message {
        Message {
            kind: kind.into(),
            session: self.session_id.clone(),
            seq: self.seq,
            payload,
        }
    }

    pub fn scene_message(&self) -> Message {
        let doc =
            serde_json::to_value(SceneDocument::from_scene(&self.scene)).expect("scene serializes");
        self.message(protocol::SCENE, doc)
    }

    pub fn state_update_message(&self) -> Message {
        self.message(
            protocol::STATE_UPDATE,
            json!({
                "mode": self.mode,
                "params": self.params,
                "param_defs": self.defs,
                "selection": self.selection,
                "seq": self.seq,
            }),
        )
    }

    pub fn preview_message(&self) -> Option<Message> {
        let preview = self.last_preview.as_ref()?;
        let mut payload = serde_json::to_value(preview).expect("preview serializes");
        let obj = payload.as_object_mut().expect("preview is an object");
        obj.insert("seq".into(), json!(self.seq));
        if self.pivot_clamped {
            obj.insert("pivot_clamped".into(), json!(true));
        }
        if self.config.silent_verdicts {
            obj.remove("verdict");
        }
        Some(self.message(protocol::PREVIEW, payload))
    }

    pub fn snapshot_message(&self) -> Message {
        let doc = serde_json::to_value(self.snapshot()).expect("snapshot serializes");
        self.message(protocol::SNAPSHOT, doc)
    }

    pub fn error_message(&self, code: ErrorCode, detail: impl Into<String>) -> Message {
        self.message(
            protocol::ERROR,
            json!({"code": code, "detail": detail.into()}),
        )
    }

    /// Messages a newly connected client needs: the scene and current state.
    pub fn hello_messages(&self) -> Vec<Message> {
        vec![self.scene_message(), self.state_update_message()]
    }

    /// Applies one client message. `client` identifies the sending
    /// connection for sequence checks and replies.
    pub fn handle_message(&mut self, client: &str, msg: &ClientEnvelope) -> Vec<Outbound> {
        let result = self.try_handle(client, msg);
        if let Some(s) = msg.seq {
            if !matches!(result, Err(Rejection(ErrorCode::StaleSeq, _))) {
                self.client_seqs.insert(client.to_owned(), s);
            }
        }
        match result {
            Ok(out) => out,
            Err(Rejection(code, detail)) => vec![Outbound {
                target: Target::Requester,
                message: self.error_message(code, detail),
            }],
        }
    }

    fn try_handle(
        &mut self,
        client: &str,
        msg: &ClientEnvelope,
    ) -> Result<Vec<Outbound>, Rejection> {
        if let (Some(s), Some(last)) = (msg.seq, self.client_seqs.get(client)) {
            if s <= *last {
                return Err(Rejection(
                    ErrorCode::StaleSeq,
                    format!("client seq {s} is not after {last}"),
                ));
            }
        }
        if let Some(session) = &msg.session {
            if *session != self.session_id {
                return Err(Rejection(
                    ErrorCode::WrongSession,
                    format!(
                        "message for session `{session}` sent to `{}`",
                        self.session_id
                    ),
                ));
            }
        }
        let kind = msg.kind.as_str();
        match kind {
            protocol::HELLO => {
                decode::<HelloPayload>(kind, &msg.payload)?;
                Ok(self.to_requester(self.hello_messages()))
            }
            protocol::SNAPSHOT_REQUEST => {
                decode::<EmptyPayload>(kind, &msg.payload)?;
                Ok(self.to_requester(vec![self.snapshot_message()]))
            }
            protocol::SET_PARAM => {
                let p: SetParamPayload = decode(kind, &msg.payload)?;
                self.set_param(&p.id, &p.value)?;
                Ok(self.commit())
            }
            protocol::SELECT_PART => {
                let p: SelectPartPayload = decode(kind, &msg.payload)?;
                if self.mode != Mode::Rotation {
                    return Err(Rejection(
                        ErrorCode::WrongMode,
                        "select_part is only available in rotation mode".into(),
                    ));
                }
                self.set_param(params::PART, &p.index)?;
                Ok(self.commit())
            }
            protocol::SET_MODE => {
                let p: SetModePayload = decode(kind, &msg.payload)?;
                self.load_defaults(p.mode);
                Ok(self.commit())
            }
            protocol::RESET => {
                decode::<EmptyPayload>(kind, &msg.payload)?;
                self.load_defaults(self.mode);
                Ok(self.commit())
            }
            other => Err(Rejection(
                ErrorCode::UnknownType,
                format!("unknown message type `{other}`"),
            )),
        }
    }

    fn set_param(&mut self, id: &str, raw: &Value) -> Result<(), Rejection> {
        let def = self.def(id).ok_or_else(|| {
            Rejection(
                ErrorCode::UnknownParam,
                format!("no parameter `{id}` in {} mode", mode_name(self.mode)),
            )
        })?;
        let value = def.coerce(raw)?;
        self.params.insert(id.to_owned(), value);
        self.refresh();
        Ok(())
    }

    /// Bumps seq and builds the broadcast for an accepted change.
    fn commit(&mut self) -> Vec<Outbound> {
        self.seq += 1;
        let mut out = vec![self.state_update_message()];
        out.extend(self.preview_message());
        out.into_iter()
            .map(|message| Outbound {
                target: Target::Broadcast,
                message,
            })
            .collect()
    }

    fn to_requester(&self, messages: Vec<Message>) -> Vec<Outbound> {
        messages
            .into_iter()
            .map(|message| Outbound {
                target: Target::Requester,
                message,
            })
            .collect()
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Translation => "translation",
        Mode::Rotation => "rotation",
    }
}
