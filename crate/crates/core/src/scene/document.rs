//! Scene-document text format (UTF-8 JSON).
//!
//! ```json
//! {"name": "...",
//!  "parts": [{"id", "name", "bbox": {"min": [x,y,z], "max": [x,y,z]},
//!             "pose": {"rotation": [9 numbers, row-major], "translation": [x,y,z]},
//!             "mesh_ref"?}],
//!  "constraints": {"<id>": {"kind": "rotatable", "axis": "x|y|z", "sense": "cw|ccw",
//!                           "anchor": [x,y,z], "angle_range": [lo, hi]}
//!                        | {"kind": "translatable", "free"?: true} | {"kind": "fixed"}}}
//! ```
//!
//! Unknown keys are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Aabb, DoFConstraint, Part, RotationConstraint, Scene, SceneError};
use crate::canonical;
use crate::geometry::{PrincipalAxis, RigidTransform, RotationSense, Vec3};

/// Poses read from text carry at most nine significant digits, which is not
/// always enough to meet the 1e-9 orthonormality bound exactly.
const DOCUMENT_ROTATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub name: String,
    pub parts: Vec<PartDocument>,
    #[serde(default)]
    pub constraints: BTreeMap<String, ConstraintDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartDocument {
    pub id: String,
    pub name: String,
    pub bbox: BoxDocument,
    pub pose: PoseDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDocument {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseDocument {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConstraintDocument {
    Rotatable {
        axis: PrincipalAxis,
        sense: RotationSense,
        anchor: [f64; 3],
        angle_range: [f64; 2],
    },
    Translatable {
        /// Only free translation is supported; `false` is rejected.
        #[serde(default = "free_default", skip_serializing_if = "is_true")]
        free: bool,
    },
    Fixed {},
}

fn free_default() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

/// Parses and validates a scene document.
pub fn load_scene(doc: &[u8]) -> Result<Scene, SceneError> {
    let mut de = serde_json::Deserializer::from_slice(doc);
    let parsed: SceneDocument =
        serde_path_to_error::deserialize(&mut de).map_err(|e| SceneError::Malformed {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    de.end().map_err(|e| SceneError::Malformed {
        path: ".".to_owned(),
        message: e.to_string(),
    })?;
    parsed.into_scene()
}

impl SceneDocument {
    pub fn into_scene(self) -> Result<Scene, SceneError> {
        let parts = self
            .parts
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.into_part(i))
            .collect::<Result<Vec<_>, _>>()?;
        let constraints = self
            .constraints
            .into_iter()
            .map(|(id, c)| {
                let c = match c {
                    ConstraintDocument::Translatable { free: false } => {
                        return Err(SceneError::invalid(
                            &id,
                            format!("constraints.{id}.free"),
                            "only free translation is supported",
                        ))
                    }
                    ConstraintDocument::Rotatable {
                        axis,
                        sense,
                        anchor,
                        angle_range,
                    } => DoFConstraint::Rotatable(RotationConstraint {
                        axis,
                        sense,
                        anchor: anchor.into(),
                        angle_range: angle_range.into(),
                    }),
                    ConstraintDocument::Translatable { free: true } => DoFConstraint::Translatable,
                    ConstraintDocument::Fixed {} => DoFConstraint::Fixed,
                };
                Ok((id, c))
            })
            .collect::<Result<_, _>>()?;
        Scene::new(self.name, parts, constraints)
    }

    pub fn from_scene(scene: &Scene) -> Self {
        let parts = scene
            .parts()
            .iter()
            .map(|p| {
                let r = p.base_pose.rotation();
                PartDocument {
                    id: p.id.clone(),
                    name: p.name.clone(),
                    bbox: BoxDocument {
                        min: p.bbox.min.to_array(),
                        max: p.bbox.max.to_array(),
                    },
                    pose: PoseDocument {
                        rotation: [
                            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1],
                            r[2][2],
                        ],
                        translation: p.base_pose.translation().to_array(),
                    },
                    mesh_ref: p.mesh_ref.clone(),
                }
            })
            .collect();
        let constraints = scene
            .constraints()
            .iter()
            .map(|(id, c)| {
                let doc = match c {
                    DoFConstraint::Rotatable(rc) => ConstraintDocument::Rotatable {
                        axis: rc.axis,
                        sense: rc.sense,
                        anchor: rc.anchor.to_array(),
                        angle_range: rc.angle_range.into(),
                    },
                    DoFConstraint::Translatable => ConstraintDocument::Translatable { free: true },
                    DoFConstraint::Fixed => ConstraintDocument::Fixed {},
                };
                (id.clone(), doc)
            })
            .collect();
        SceneDocument {
            name: scene.name().to_owned(),
            parts,
            constraints,
        }
    }
}

impl PartDocument {
    fn into_part(self, index: usize) -> Result<Part, SceneError> {
        let bbox = Aabb::new(self.bbox.min.into(), self.bbox.max.into()).ok_or_else(|| {
            SceneError::invalid(
                &self.id,
                format!("parts[{index}].bbox"),
                "bbox.min must not exceed bbox.max on any axis",
            )
        })?;
        let r = self.pose.rotation;
        let rotation = [[r[0], r[1], r[2]], [r[3], r[4], r[5]], [r[6], r[7], r[8]]];
        let base_pose = RigidTransform::with_tolerance(
            rotation,
            Vec3::from(self.pose.translation),
            DOCUMENT_ROTATION_TOLERANCE,
        )
        .map_err(|e| {
            SceneError::invalid(&self.id, format!("parts[{index}].pose"), e.to_string())
        })?;
        Ok(Part {
            id: self.id,
            name: self.name,
            bbox,
            base_pose,
            mesh_ref: self.mesh_ref,
        })
    }
}

impl Scene {
    pub fn to_document(&self) -> SceneDocument {
        SceneDocument::from_scene(self)
    }

    /// Canonical scene-document text (sorted keys, newline-terminated).
    pub fn to_canonical_document(&self) -> String {
        canonical::canonical_document(&self.to_document()).expect("scene document serializes")
    }
}
