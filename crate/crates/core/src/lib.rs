//! Core of morphplay: geometric transformations taught as parameterized
//! mappings on a house model.
//!
//! - [`geometry`]: translation, rotation about a pivot, composition.
//! - [`scene`]: parts, their physical degrees of freedom, pivot controls.
//! - [`feasibility`]: verdicts on whether a transformation is physically possible.
//! - [`augmentation`]: arrows, arcs, triads and labels to draw.
//! - [`session`]: the synchronized parameter state machine and its protocol.
//! - [`canonical`]: canonical JSON text used for documents and golden files.

pub mod augmentation;
pub mod canonical;
pub mod feasibility;
pub mod geometry;
pub mod scene;
pub mod session;

pub use feasibility::{PivotTolerance, Reason, Verdict};
pub use geometry::{AngleDeg, PrincipalAxis, RigidTransform, RotationSense, RotationSpec, Vec3};
pub use scene::{bundled_house, load_scene, Scene};
pub use session::{Mode, SessionConfig, SessionState};
