//! The house scene: transformable parts, the degrees of freedom each part
//! physically allows, selection by index, and pivot placement.

mod document;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augmentation::{self, Annotation};
use crate::geometry::{PrincipalAxis, RigidTransform, RotationSense, Vec3};

pub use document::{load_scene, SceneDocument};

/// The bundled house model, as scene-document text.
pub const BUNDLED_HOUSE: &str = include_str!("../../fixtures/house.json");

/// Loads the bundled house model.
pub fn bundled_house() -> Scene {
    load_scene(BUNDLED_HOUSE.as_bytes()).expect("bundled house scene is valid")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("malformed scene document at `{path}`: {message}")]
    Malformed { path: String, message: String },
    #[error("duplicate part id `{id}` at `{path}`")]
    DuplicateId { id: String, path: String },
    #[error("part `{part}`: {path}: {message}")]
    Invalid {
        part: String,
        path: String,
        message: String,
    },
    #[error("constraint given for unknown part `{id}` at `constraints.{id}`")]
    UnknownConstraintTarget { id: String },
    #[error("part index {index} out of range (valid {})", valid_range(*.count))]
    OutOfRange { index: i64, count: usize },
}

fn valid_range(count: usize) -> String {
    if count == 0 {
        "none: scene has no rotatable parts".to_owned()
    } else {
        format!("0..{}", count - 1)
    }
}

impl SceneError {
    fn invalid(part: &str, path: String, message: impl Into<String>) -> Self {
        SceneError::Invalid {
            part: part.to_owned(),
            path,
            message: message.into(),
        }
    }
}

/// Axis-aligned box in part-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Option<Self> {
        let ok = min.is_finite()
            && max.is_finite()
            && min.x <= max.x
            && min.y <= max.y
            && min.z <= max.z;
        ok.then_some(Self { min, max })
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max).scale(0.5)
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|i| {
            let v = p.component(i);
            self.min.component(i) <= v && v <= self.max.component(i)
        })
    }
}

/// A transformable element of the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub id: String,
    pub name: String,
    pub bbox: Aabb,
    pub base_pose: RigidTransform,
    pub mesh_ref: Option<String>,
}

impl Part {
    pub fn to_world(&self, local: Vec3) -> Vec3 {
        self.base_pose.apply(local)
    }

    pub fn world_center(&self) -> Vec3 {
        self.to_world(self.bbox.center())
    }

    /// Radius used for rotation arcs and pivot triads drawn on this part.
    pub fn annotation_radius(&self) -> f64 {
        let e = self.bbox.extent();
        (0.5 * e.x.max(e.y).max(e.z)).max(1.0)
    }
}

/// Inclusive range of effective angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct AngleRange {
    pub lo: f64,
    pub hi: f64,
}

impl AngleRange {
    pub fn contains(&self, degrees: f64) -> bool {
        self.lo <= degrees && degrees <= self.hi
    }
}

impl From<[f64; 2]> for AngleRange {
    fn from(a: [f64; 2]) -> Self {
        Self { lo: a[0], hi: a[1] }
    }
}

impl From<AngleRange> for [f64; 2] {
    fn from(r: AngleRange) -> Self {
        [r.lo, r.hi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationConstraint {
    pub axis: PrincipalAxis,
    pub sense: RotationSense,
    /// Hinge point in part-local coordinates.
    pub anchor: Vec3,
    pub angle_range: AngleRange,
}

/// The physical degrees of freedom of a part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DoFConstraint {
    Rotatable(RotationConstraint),
    /// Free translation in x, y and z.
    Translatable,
    Fixed,
}

impl DoFConstraint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DoFConstraint::Rotatable(_) => "rotatable",
            DoFConstraint::Translatable => "translatable",
            DoFConstraint::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Snap {
    Min,
    Center,
    Max,
    Free,
}

impl Snap {
    pub const ALL: [Snap; 4] = [Snap::Min, Snap::Center, Snap::Max, Snap::Free];

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|s| *s == self).unwrap_or(0)
    }
}

/// The six pivot-placement controls: one snap selector and one free offset
/// per axis. An offset only matters when its axis is snapped to `Free`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotControls {
    pub snaps: [Snap; 3],
    pub offsets: [f64; 3],
}

impl Default for PivotControls {
    fn default() -> Self {
        Self {
            snaps: [Snap::Center; 3],
            offsets: [0.0; 3],
        }
    }
}

impl PivotControls {
    pub fn snapped(snaps: [Snap; 3]) -> Self {
        Self {
            snaps,
            offsets: [0.0; 3],
        }
    }

    pub fn free(local: Vec3) -> Self {
        Self {
            snaps: [Snap::Free; 3],
            offsets: local.to_array(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedPivot {
    pub local: Vec3,
    pub world: Vec3,
    /// Set when a free offset had to be clamped into the part's box.
    pub clamped: bool,
}

/// Maps the six pivot controls to a point on `part`.
pub fn resolve_pivot(part: &Part, controls: &PivotControls) -> ResolvedPivot {
    let mut local = [0.0; 3];
    let mut clamped = false;
    for (i, slot) in local.iter_mut().enumerate() {
        let lo = part.bbox.min.component(i);
        let hi = part.bbox.max.component(i);
        *slot = match controls.snaps[i] {
            Snap::Min => lo,
            Snap::Center => 0.5 * (lo + hi),
            Snap::Max => hi,
            Snap::Free => {
                let raw = controls.offsets[i];
                let v = if raw.is_finite() {
                    raw.clamp(lo, hi)
                } else {
                    lo
                };
                clamped |= v != raw;
                v
            }
        };
    }
    let local = Vec3::from(local);
    ResolvedPivot {
        local,
        world: part.to_world(local),
        clamped,
    }
}

/// A part chosen through the index selector, with the coordinate frame drawn
/// at its hinge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub part_id: String,
    pub origin: Vec3,
    pub axes: [Vec3; 3],
}

impl Selection {
    pub fn triad(&self, length: f64) -> Annotation {
        augmentation::triad(self.origin, self.axes, length)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    name: String,
    parts: Vec<Part>,
    constraints: BTreeMap<String, DoFConstraint>,
    rotatable_index: Vec<String>,
}

impl Scene {
    /// Builds and validates a scene. Parts without an entry in
    /// `constraints` are fixed.
    pub fn new(
        name: impl Into<String>,
        parts: Vec<Part>,
        mut constraints: BTreeMap<String, DoFConstraint>,
    ) -> Result<Self, SceneError> {
        let mut seen = BTreeMap::new();
        for (i, part) in parts.iter().enumerate() {
            if seen.insert(part.id.clone(), i).is_some() {
                return Err(SceneError::DuplicateId {
                    id: part.id.clone(),
                    path: format!("parts[{i}].id"),
                });
            }
        }
        if let Some(id) = constraints.keys().find(|id| !seen.contains_key(*id)) {
            return Err(SceneError::UnknownConstraintTarget { id: id.clone() });
        }
        for part in &parts {
            let c = constraints
                .entry(part.id.clone())
                .or_insert(DoFConstraint::Fixed);
            if let DoFConstraint::Rotatable(rc) = c {
                validate_rotatable(part, rc)?;
            }
        }
        let rotatable_index = parts
            .iter()
            .filter(|p| matches!(constraints[&p.id], DoFConstraint::Rotatable(_)))
            .map(|p| p.id.clone())
            .collect();
        Ok(Self {
            name: name.into(),
            parts,
            constraints,
            rotatable_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn part(&self, id: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.id == id)
    }

    pub fn constraint(&self, id: &str) -> Option<&DoFConstraint> {
        self.constraints.get(id)
    }

    pub fn constraints(&self) -> &BTreeMap<String, DoFConstraint> {
        &self.constraints
    }

    /// Ids of the rotatable parts in declaration order.
    pub fn rotatable_index(&self) -> &[String] {
        &self.rotatable_index
    }

    pub fn translatable_parts(&self) -> impl Iterator<Item = &Part> {
        self.parts
            .iter()
            .filter(|p| matches!(self.constraints[&p.id], DoFConstraint::Translatable))
    }

    /// Hinge of a rotatable part in world space.
    pub fn world_anchor(&self, id: &str) -> Option<Vec3> {
        match (self.part(id), self.constraints.get(id)) {
            (Some(part), Some(DoFConstraint::Rotatable(rc))) => Some(part.to_world(rc.anchor)),
            _ => None,
        }
    }

    pub fn select_part(&self, index: i64) -> Result<Selection, SceneError> {
        let id = usize::try_from(index)
            .ok()
            .and_then(|i| self.rotatable_index.get(i))
            .ok_or(SceneError::OutOfRange {
                index,
                count: self.rotatable_index.len(),
            })?;
        let origin = self.world_anchor(id).expect("indexed part is rotatable");
        Ok(Selection {
            part_id: id.clone(),
            origin,
            axes: [Vec3::X, Vec3::Y, Vec3::Z],
        })
    }
}

fn validate_rotatable(part: &Part, rc: &RotationConstraint) -> Result<(), SceneError> {
    let base = format!("constraints.{}", part.id);
    let r = rc.angle_range;
    if !(r.lo.is_finite() && r.hi.is_finite()) || r.lo < -180.0 || r.hi > 180.0 {
        return Err(SceneError::invalid(
            &part.id,
            format!("{base}.angle_range"),
            format!("[{}, {}] not within [-180, 180]", r.lo, r.hi),
        ));
    }
    if r.lo > r.hi {
        return Err(SceneError::invalid(
            &part.id,
            format!("{base}.angle_range"),
            format!("lower bound {} exceeds upper bound {}", r.lo, r.hi),
        ));
    }
    if !part.bbox.contains(rc.anchor) {
        return Err(SceneError::invalid(
            &part.id,
            format!("{base}.anchor"),
            format!(
                "anchor {} lies outside bbox {}..{}",
                rc.anchor, part.bbox.min, part.bbox.max
            ),
        ));
    }
    Ok(())
}
