//! Feedback engine: compares a requested transformation against the part's
//! physical constraint.
//!
//! The preview is always computed, whether or not the request is feasible.
//! Rotation checks run in a fixed order and the first failure wins:
//! part exists, part is rotatable, axis, direction, pivot, angle range.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augmentation::{self, Annotation};
use crate::geometry::{compose, RigidTransform, RotationSpec, Vec3};
use crate::scene::{DoFConstraint, Scene};

pub const DEFAULT_PIVOT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("pivot tolerance must be positive and finite, got {0}")]
pub struct BadTolerance(pub f64);

/// Largest pivot-to-hinge distance (scene units) still accepted as "on the hinge".
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PivotTolerance(f64);

impl PivotTolerance {
    pub fn new(v: f64) -> Result<Self, BadTolerance> {
        if v > 0.0 && v.is_finite() {
            Ok(Self(v))
        } else {
            Err(BadTolerance(v))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for PivotTolerance {
    fn default() -> Self {
        Self(DEFAULT_PIVOT_TOLERANCE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NotRotatable,
    NotTranslatable,
    WrongAxis,
    WrongDirection,
    WrongPivot,
    AngleOutOfRange,
    UnknownPart,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::NotRotatable => "not rotatable",
            Reason::NotTranslatable => "not translatable",
            Reason::WrongAxis => "wrong axis",
            Reason::WrongDirection => "wrong direction",
            Reason::WrongPivot => "wrong pivot",
            Reason::AngleOutOfRange => "angle out of range",
            Reason::UnknownPart => "unknown part",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerdictWire {
    status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<Reason>,
    detail: String,
}

/// Outcome of a feasibility check. A reason exists exactly when the request
/// is infeasible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "VerdictWire", try_from = "VerdictWire")]
pub enum Verdict {
    Feasible { detail: String },
    Infeasible { reason: Reason, detail: String },
}

impl Verdict {
    fn feasible(detail: impl Into<String>) -> Self {
        Verdict::Feasible {
            detail: detail.into(),
        }
    }

    fn infeasible(reason: Reason, detail: impl Into<String>) -> Self {
        Verdict::Infeasible {
            reason,
            detail: detail.into(),
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Verdict::Feasible { .. } => Status::Feasible,
            Verdict::Infeasible { .. } => Status::Infeasible,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible { .. })
    }

    pub fn reason(&self) -> Option<Reason> {
        match self {
            Verdict::Feasible { .. } => None,
            Verdict::Infeasible { reason, .. } => Some(*reason),
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Verdict::Feasible { detail } | Verdict::Infeasible { detail, .. } => detail,
        }
    }
}

impl From<Verdict> for VerdictWire {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Feasible { detail } => VerdictWire {
                status: Status::Feasible,
                reason: None,
                detail,
            },
            Verdict::Infeasible { reason, detail } => VerdictWire {
                status: Status::Infeasible,
                reason: Some(reason),
                detail,
            },
        }
    }
}

impl TryFrom<VerdictWire> for Verdict {
    type Error = String;

    fn try_from(w: VerdictWire) -> Result<Self, String> {
        match (w.status, w.reason) {
            (Status::Feasible, None) => Ok(Verdict::Feasible { detail: w.detail }),
            (Status::Infeasible, Some(reason)) => Ok(Verdict::Infeasible {
                reason,
                detail: w.detail,
            }),
            (Status::Feasible, Some(_)) => Err("feasible verdict must not carry a reason".into()),
            (Status::Infeasible, None) => Err("infeasible verdict requires a reason".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationRequest {
    pub part_id: String,
    /// Pivot is in world space.
    pub spec: RotationSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationRequest {
    pub part_id: String,
    pub t: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    Rotation(RotationRequest),
    Translation(TranslationRequest),
}

impl Request {
    pub fn part_id(&self) -> &str {
        match self {
            Request::Rotation(r) => &r.part_id,
            Request::Translation(t) => &t.part_id,
        }
    }
}

pub fn check_rotation(scene: &Scene, req: &RotationRequest, tolerance: PivotTolerance) -> Verdict {
    let id = &req.part_id;
    let Some(part) = scene.part(id) else {
        return Verdict::infeasible(Reason::UnknownPart, format!("no part named `{id}`"));
    };
    let rc = match scene.constraint(id) {
        Some(DoFConstraint::Rotatable(rc)) => rc,
        Some(other) => {
            return Verdict::infeasible(
                Reason::NotRotatable,
                format!("{} is {} and cannot rotate", part.name, other.kind_name()),
            )
        }
        None => {
            return Verdict::infeasible(
                Reason::NotRotatable,
                format!("{} cannot rotate", part.name),
            )
        }
    };
    let spec = &req.spec;
    if spec.axis != rc.axis {
        return Verdict::infeasible(
            Reason::WrongAxis,
            format!(
                "{} turns about the {} axis, not {}",
                part.name, rc.axis, spec.axis
            ),
        );
    }
    let theta = spec.effective_degrees();
    if theta != 0.0 && theta.signum() != rc.sense.sign() {
        return Verdict::infeasible(
            Reason::WrongDirection,
            format!(
                "{} only opens {}, requested {:+} degrees",
                part.name, rc.sense, theta
            ),
        );
    }
    let anchor = part.to_world(rc.anchor);
    let distance = spec.pivot.distance(anchor);
    if distance > tolerance.get() {
        return Verdict::infeasible(
            Reason::WrongPivot,
            format!(
                "pivot is {distance:.3} from the hinge of {} (tolerance {})",
                part.name,
                tolerance.get()
            ),
        );
    }
    if !rc.angle_range.contains(theta) {
        return Verdict::infeasible(
            Reason::AngleOutOfRange,
            format!(
                "{} swings through [{}, {}] degrees, requested {}",
                part.name, rc.angle_range.lo, rc.angle_range.hi, theta
            ),
        );
    }
    Verdict::feasible(format!("{} can make this rotation", part.name))
}

pub fn check_translation(scene: &Scene, req: &TranslationRequest) -> Verdict {
    let id = &req.part_id;
    let Some(part) = scene.part(id) else {
        return Verdict::infeasible(Reason::UnknownPart, format!("no part named `{id}`"));
    };
    match scene.constraint(id) {
        Some(DoFConstraint::Translatable) => {
            Verdict::feasible(format!("{} can make this translation", part.name))
        }
        other => Verdict::infeasible(
            Reason::NotTranslatable,
            format!(
                "{} is {} and cannot translate",
                part.name,
                other.map_or("fixed", DoFConstraint::kind_name)
            ),
        ),
    }
}

/// The virtual result of a request together with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreviewResult {
    pub part_id: String,
    #[serde(rename = "pose")]
    pub preview_pose: RigidTransform,
    pub verdict: Verdict,
    pub annotations: Vec<Annotation>,
}

/// Computes the preview pose, verdict and annotations for `req`.
///
/// The preview pose is the transformed pose even for infeasible requests.
/// Only an unknown part yields no preview (identity pose, no annotations).
pub fn apply_request(scene: &Scene, req: &Request, tolerance: PivotTolerance) -> PreviewResult {
    let part_id = req.part_id().to_owned();
    let Some(part) = scene.part(&part_id) else {
        let verdict = match req {
            Request::Rotation(r) => check_rotation(scene, r, tolerance),
            Request::Translation(t) => check_translation(scene, t),
        };
        return PreviewResult {
            part_id,
            preview_pose: RigidTransform::IDENTITY,
            verdict,
            annotations: Vec::new(),
        };
    };
    match req {
        Request::Rotation(r) => PreviewResult {
            part_id,
            preview_pose: compose(&r.spec.to_transform(), &part.base_pose),
            verdict: check_rotation(scene, r, tolerance),
            annotations: augmentation::rotation_annotation(&r.spec, part.annotation_radius())
                .expect("part radius is positive"),
        },
        Request::Translation(t) => PreviewResult {
            part_id,
            preview_pose: compose(&RigidTransform::from_translation(t.t), &part.base_pose),
            verdict: check_translation(scene, t),
            annotations: augmentation::translation_annotation(part.world_center(), t.t),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AngleDeg, PrincipalAxis, RotationSense};
    use crate::scene::bundled_house;

    fn door_request(
        axis: PrincipalAxis,
        sense: RotationSense,
        deg: f64,
        pivot: Vec3,
    ) -> RotationRequest {
        RotationRequest {
            part_id: "entrance_door".into(),
            spec: RotationSpec::new(axis, sense, AngleDeg::new(deg).unwrap(), pivot).unwrap(),
        }
    }

    fn anchor() -> Vec3 {
        bundled_house().world_anchor("entrance_door").unwrap()
    }

    #[test]
    fn door_examples() {
        let scene = bundled_house();
        let tol = PivotTolerance::default();
        let ok = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Z, RotationSense::Cw, 45.0, anchor()),
            tol,
        );
        assert!(ok.is_feasible(), "{ok:?}");
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::X, RotationSense::Cw, 45.0, anchor()),
            tol,
        );
        assert_eq!(v.reason(), Some(Reason::WrongAxis));
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Z, RotationSense::Ccw, 45.0, anchor()),
            tol,
        );
        assert_eq!(v.reason(), Some(Reason::WrongDirection));
        let off = anchor() + Vec3::new(5.0 * tol.get(), 0.0, 0.0);
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Z, RotationSense::Cw, 45.0, off),
            tol,
        );
        assert_eq!(v.reason(), Some(Reason::WrongPivot));
    }

    #[test]
    fn zero_angle_passes_direction_check() {
        let scene = bundled_house();
        for sense in [RotationSense::Cw, RotationSense::Ccw] {
            let v = check_rotation(
                &scene,
                &door_request(PrincipalAxis::Z, sense, 0.0, anchor()),
                PivotTolerance::default(),
            );
            assert!(v.is_feasible());
        }
    }

    #[test]
    fn direction_is_judged_on_effective_angle() {
        let scene = bundled_house();
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Z, RotationSense::Ccw, -45.0, anchor()),
            PivotTolerance::default(),
        );
        assert!(v.is_feasible());
    }

    #[test]
    fn angle_range() {
        let scene = bundled_house();
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Z, RotationSense::Cw, 130.0, anchor()),
            PivotTolerance::default(),
        );
        assert_eq!(v.reason(), Some(Reason::AngleOutOfRange));
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Z, RotationSense::Cw, 120.0, anchor()),
            PivotTolerance::default(),
        );
        assert!(v.is_feasible());
    }

    #[test]
    fn axis_beats_direction() {
        let scene = bundled_house();
        let v = check_rotation(
            &scene,
            &door_request(PrincipalAxis::Y, RotationSense::Ccw, 45.0, Vec3::ZERO),
            PivotTolerance::default(),
        );
        assert_eq!(v.reason(), Some(Reason::WrongAxis));
    }

    #[test]
    fn unknown_and_non_rotatable_parts() {
        let scene = bundled_house();
        let mut req = door_request(PrincipalAxis::Z, RotationSense::Cw, 45.0, anchor());
        req.part_id = "moat".into();
        assert_eq!(
            check_rotation(&scene, &req, PivotTolerance::default()).reason(),
            Some(Reason::UnknownPart)
        );
        req.part_id = "attic".into();
        assert_eq!(
            check_rotation(&scene, &req, PivotTolerance::default()).reason(),
            Some(Reason::NotRotatable)
        );
    }

    #[test]
    fn translation_checks() {
        let scene = bundled_house();
        let attic = |t| TranslationRequest {
            part_id: "attic".into(),
            t,
        };
        assert!(check_translation(&scene, &attic(Vec3::new(0.0, 0.0, 3.0))).is_feasible());
        assert!(check_translation(&scene, &attic(Vec3::ZERO)).is_feasible());
        let wall = TranslationRequest {
            part_id: "walls".into(),
            t: Vec3::X,
        };
        assert_eq!(
            check_translation(&scene, &wall).reason(),
            Some(Reason::NotTranslatable)
        );
        let door = TranslationRequest {
            part_id: "entrance_door".into(),
            t: Vec3::X,
        };
        assert_eq!(
            check_translation(&scene, &door).reason(),
            Some(Reason::NotTranslatable)
        );
        let ghost = TranslationRequest {
            part_id: "ghost".into(),
            t: Vec3::X,
        };
        assert_eq!(
            check_translation(&scene, &ghost).reason(),
            Some(Reason::UnknownPart)
        );
    }

    #[test]
    fn infeasible_rotation_still_previews() {
        let scene = bundled_house();
        let req = Request::Rotation(door_request(
            PrincipalAxis::X,
            RotationSense::Cw,
            45.0,
            anchor(),
        ));
        let preview = apply_request(&scene, &req, PivotTolerance::default());
        assert_eq!(preview.verdict.reason(), Some(Reason::WrongAxis));
        let base = scene.part("entrance_door").unwrap().base_pose;
        assert!(preview.preview_pose.max_abs_diff(&base) > 0.1);
    }

    #[test]
    fn zero_angle_preview_is_base_pose() {
        let scene = bundled_house();
        let req = Request::Rotation(door_request(
            PrincipalAxis::Z,
            RotationSense::Cw,
            0.0,
            anchor(),
        ));
        let preview = apply_request(&scene, &req, PivotTolerance::default());
        assert_eq!(
            preview.preview_pose,
            scene.part("entrance_door").unwrap().base_pose
        );
        assert!(preview.verdict.is_feasible());
    }

    #[test]
    fn unknown_part_has_no_preview() {
        let scene = bundled_house();
        let req = Request::Translation(TranslationRequest {
            part_id: "ghost".into(),
            t: Vec3::X,
        });
        let preview = apply_request(&scene, &req, PivotTolerance::default());
        assert_eq!(preview.preview_pose, RigidTransform::IDENTITY);
        assert!(preview.annotations.is_empty());
    }

    #[test]
    fn verdict_wire_shape() {
        let v = Verdict::infeasible(Reason::WrongAxis, "x");
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"status": "infeasible", "reason": "wrong_axis", "detail": "x"})
        );
        let back: Verdict = serde_json::from_value(json).unwrap();
        assert_eq!(back, v);
        let bad = serde_json::json!({"status": "feasible", "reason": "wrong_axis", "detail": ""});
        assert!(serde_json::from_value::<Verdict>(bad).is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(PivotTolerance::new(0.0).is_err());
        assert!(PivotTolerance::new(-1.0).is_err());
        assert!(PivotTolerance::new(f64::INFINITY).is_err());
        assert_eq!(PivotTolerance::new(0.1).unwrap().get(), 0.1);
    }
}
