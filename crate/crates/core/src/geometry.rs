//! Rigid transformation math.
//!
//! Translation is vector addition. Rotation is restricted to the three
//! principal axes and always happens about a pivot point:
//!
//! ```text
//! p' = R · (p − pivot) + pivot
//! ```
//!
//! # Sense convention
//!
//! 3D has no intrinsic "clockwise". Here [`RotationSense::Ccw`] is the
//! positive right-hand-rule angle about the axis's `+` direction (the turn
//! looks counterclockwise when viewed from the positive end of the axis
//! toward the origin) and [`RotationSense::Cw`] negates it. The effective
//! signed angle is therefore `θ_eff = sign(sense) · angle`, so `(Cw, θ)` and
//! `(Ccw, −θ)` describe the same geometry.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for orthonormality and determinant checks.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite component in {what}")]
    NonFinite { what: &'static str },
    #[error("rotation angle {0}° outside [-180, 180]")]
    AngleOutOfRange(f64),
    #[error("rotation matrix is not orthonormal (max |RᵀR − I| = {0:e})")]
    NotOrthonormal(f64),
    #[error("rotation matrix is not a proper rotation (det = {0})")]
    NotProper(f64),
}

/// A point or vector in scene units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Builds a vector, rejecting NaN and infinities.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        Vec3::new(x, y, z).validated("vector")
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub(crate) fn validated(self, what: &'static str) -> Result<Self, GeometryError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(GeometryError::NonFinite { what })
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn scale(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }

    /// Component by axis index (0 = x, 1 = y, 2 = z).
    pub fn component(self, i: usize) -> f64 {
        self.to_array()[i]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrincipalAxis {
    X,
    Y,
    Z,
}

impl PrincipalAxis {
    pub const ALL: [PrincipalAxis; 3] = [PrincipalAxis::X, PrincipalAxis::Y, PrincipalAxis::Z];

    pub fn index(self) -> usize {
        match self {
            PrincipalAxis::X => 0,
            PrincipalAxis::Y => 1,
            PrincipalAxis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn unit(self) -> Vec3 {
        match self {
            PrincipalAxis::X => Vec3::X,
            PrincipalAxis::Y => Vec3::Y,
            PrincipalAxis::Z => Vec3::Z,
        }
    }

    /// Next axis in cyclic order: X→Y, Y→Z, Z→X.
    pub fn next(self) -> Self {
        match self {
            PrincipalAxis::X => PrincipalAxis::Y,
            PrincipalAxis::Y => PrincipalAxis::Z,
            PrincipalAxis::Z => PrincipalAxis::X,
        }
    }
}

impl fmt::Display for PrincipalAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrincipalAxis::X => "x",
            PrincipalAxis::Y => "y",
            PrincipalAxis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationSense {
    Cw,
    Ccw,
}

impl RotationSense {
    /// +1 for counterclockwise, −1 for clockwise.
    pub fn sign(self) -> f64 {
        match self {
            RotationSense::Ccw => 1.0,
            RotationSense::Cw => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            RotationSense::Cw => RotationSense::Ccw,
            RotationSense::Ccw => RotationSense::Cw,
        }
    }
}

impl fmt::Display for RotationSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationSense::Cw => "cw",
            RotationSense::Ccw => "ccw",
        })
    }
}

/// A rotation angle in degrees, constrained to `[-180, 180]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(into = "f64")]
pub struct AngleDeg(f64);

impl AngleDeg {
    pub const MIN: f64 = -180.0;
    pub const MAX: f64 = 180.0;
    pub const ZERO: AngleDeg = AngleDeg(0.0);

    pub fn new(degrees: f64) -> Result<Self, GeometryError> {
        if !degrees.is_finite() {
            return Err(GeometryError::NonFinite { what: "angle" });
        }
        if !(Self::MIN..=Self::MAX).contains(&degrees) {
            return Err(GeometryError::AngleOutOfRange(degrees));
        }
        Ok(AngleDeg(degrees))
    }

    pub fn degrees(self) -> f64 {
        self.0
    }
}

impl From<AngleDeg> for f64 {
    fn from(a: AngleDeg) -> f64 {
        a.0
    }
}

impl Neg for AngleDeg {
    type Output = AngleDeg;
    fn neg(self) -> AngleDeg {
        AngleDeg(-self.0)
    }
}

/// The four rotation-function parameters: axis, sense, angle and pivot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationSpec {
    pub axis: PrincipalAxis,
    pub sense: RotationSense,
    pub angle: AngleDeg,
    pub pivot: Vec3,
}

impl RotationSpec {
    pub fn new(
        axis: PrincipalAxis,
        sense: RotationSense,
        angle: AngleDeg,
        pivot: Vec3,
    ) -> Result<Self, GeometryError> {
        Ok(Self {
            axis,
            sense,
            angle,
            pivot: pivot.validated("pivot")?,
        })
    }

    /// Signed angle after folding in the sense toggle.
    pub fn effective_degrees(&self) -> f64 {
        self.sense.sign() * self.angle.degrees()
    }

    pub fn matrix(&self) -> Mat3 {
        axis_rotation_matrix(self.axis, self.sense, self.angle)
    }

    pub fn to_transform(&self) -> RigidTransform {
        RigidTransform::rotation_about(self.matrix(), self.pivot)
    }
}

/// `(sin θ, cos θ)` for θ in degrees, exact at multiples of 90°.
pub fn sin_cos_deg(degrees: f64) -> (f64, f64) {
    let quarter = degrees / 90.0;
    if quarter.fract() == 0.0 {
        match (quarter as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        degrees.to_radians().sin_cos()
    }
}

/// Closed-form rotation matrix about a principal axis for the effective
/// angle `sign(sense) · angle`.
pub fn axis_rotation_matrix(axis: PrincipalAxis, sense: RotationSense, angle: AngleDeg) -> Mat3 {
    let (s, c) = sin_cos_deg(sense.sign() * angle.degrees());
    match axis {
        PrincipalAxis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        PrincipalAxis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
        PrincipalAxis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
    }
}

pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    Vec3::new(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = *v;
        }
    }
    out
}

pub fn determinant(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `max |RᵀR − I|` over all entries.
pub fn orthonormality_error(m: &Mat3) -> f64 {
    let rtr = mat_mul(&transpose(m), m);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((rtr[i][j] - IDENTITY3[i][j]).abs());
        }
    }
    worst
}

/// Checks that `m` is a proper rotation within `tolerance`.
pub fn check_rotation_matrix(m: &Mat3, tolerance: f64) -> Result<(), GeometryError> {
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite { what: "rotation" });
    }
    let err = orthonormality_error(m);
    if err >= tolerance {
        return Err(GeometryError::NotOrthonormal(err));
    }
    let det = determinant(m);
    if (det - 1.0).abs() >= tolerance {
        return Err(GeometryError::NotProper(det));
    }
    Ok(())
}

/// `p ↦ R·p + t` with `R` a proper rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: Mat3,
    translation: Vec3,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation: IDENTITY3,
        translation: Vec3::ZERO,
    };

    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self, GeometryError> {
        Self::with_tolerance(rotation, translation, ORTHONORMAL_TOLERANCE)
    }

    /// Like [`RigidTransform::new`] with a caller-chosen tolerance, for
    /// matrices read back from text with limited precision.
    pub fn with_tolerance(
        rotation: Mat3,
        translation: Vec3,
        tolerance: f64,
    ) -> Result<Self, GeometryError> {
        check_rotation_matrix(&rotation, tolerance)?;
        Ok(Self {
            rotation,
            translation: translation.validated("translation")?,
        })
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self {
            rotation: IDENTITY3,
            translation: t,
        }
    }

    /// Rotation `R` about `pivot`: `p ↦ R·(p − pivot) + pivot`.
    pub fn rotation_about(rotation: Mat3, pivot: Vec3) -> Self {
        Self {
            rotation,
            translation: pivot - mat_vec(&rotation, pivot),
        }
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        mat_vec(&self.rotation, p) + self.translation
    }

    pub fn apply_vector(&self, v: Vec3) -> Vec3 {
        mat_vec(&self.rotation, v)
    }

    pub fn is_identity(&self, tolerance: f64) -> bool {
        let rot = self
            .rotation
            .iter()
            .flatten()
            .zip(IDENTITY3.iter().flatten())
            .all(|(a, b)| (a - b).abs() <= tolerance);
        rot && self.translation.norm() <= tolerance
    }

    pub fn max_abs_diff(&self, other: &RigidTransform) -> f64 {
        let rot = self
            .rotation
            .iter()
            .flatten()
            .zip(other.rotation.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let d = self.translation - other.translation;
        rot.max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }

    fn row_major(&self) -> [f64; 9] {
        let r = &self.rotation;
        [
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
        ]
    }
}

impl Mul for RigidTransform {
    type Output = RigidTransform;

    /// `a * b` applies `b` first, then `a`.
    fn mul(self, b: RigidTransform) -> RigidTransform {
        compose(&self, &b)
    }
}

impl Serialize for RigidTransform {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Pose {
            rotation: [f64; 9],
            translation: [f64; 3],
        }
        Pose {
            rotation: self.row_major(),
            translation: self.translation.to_array(),
        }
        .serialize(serializer)
    }
}

/// `points[i] + t` for every point.
pub fn translate(points: &[Vec3], t: Vec3) -> Result<Vec<Vec3>, GeometryError> {
    let t = t.validated("translation")?;
    points
        .iter()
        .map(|p| Ok(p.validated("point")? + t))
        .collect()
}

/// `R·(p − pivot) + pivot` for every point.
pub fn rotate_about_pivot(
    points: &[Vec3],
    spec: &RotationSpec,
) -> Result<Vec<Vec3>, GeometryError> {
    let pivot = spec.pivot.validated("pivot")?;
    let r = spec.matrix();
    points
        .iter()
        .map(|p| Ok(mat_vec(&r, p.validated("point")? - pivot) + pivot))
        .collect()
}

/// The transform that applies `b` first, then `a`.
pub fn compose(a: &RigidTransform, b: &RigidTransform) -> RigidTransform {
    RigidTransform {
        rotation: mat_mul(&a.rotation, &b.rotation),
        translation: mat_vec(&a.rotation, b.translation) + a.translation,
    }
}

pub fn invert(t: &RigidTransform) -> RigidTransform {
    let rt = transpose(&t.rotation);
    RigidTransform {
        rotation: rt,
        translation: -mat_vec(&rt, t.translation),
    }
}
