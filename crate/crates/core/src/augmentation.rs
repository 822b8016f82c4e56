//! Annotation geometry: translation arrows, rotation arcs, pivot triads and
//! their text labels, as plain data for any client to draw.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    rotate_about_pivot, AngleDeg, PrincipalAxis, RotationSense, RotationSpec, Vec3,
};

/// Arrows shorter than this are not drawn.
pub const MIN_ARROW_LENGTH: f64 = 1e-9;
/// Sweeps smaller than this (degrees) draw no arc.
pub const MIN_ARC_SWEEP: f64 = 1e-9;
/// Largest angular gap between consecutive arc samples, in degrees.
pub const ARC_SAMPLE_STEP: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnotationError {
    #[error("arc radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    Arrow,
    Arc,
    Triad,
    Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorHint {
    AxisX,
    AxisY,
    AxisZ,
    Neutral,
    Feasible,
    Infeasible,
}

impl From<PrincipalAxis> for ColorHint {
    fn from(axis: PrincipalAxis) -> Self {
        match axis {
            PrincipalAxis::X => ColorHint::AxisX,
            PrincipalAxis::Y => ColorHint::AxisY,
            PrincipalAxis::Z => ColorHint::AxisZ,
        }
    }
}

/// One drawable abstraction.
///
/// Point layout per kind: `Arrow` is `[tail, head]`, `Arc` is the sampled
/// polyline (at least two points), `Triad` is three `origin, tip` pairs in
/// x, y, z order, and `Label` carries no points, only `anchor` and `text`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annotation {
    pub kind: AnnotationKind,
    pub points: Vec<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub anchor: Vec3,
    pub color_hint: ColorHint,
}

impl Annotation {
    fn label(anchor: Vec3, text: String) -> Self {
        Annotation {
            kind: AnnotationKind::Label,
            points: Vec::new(),
            text: Some(text),
            anchor,
            color_hint: ColorHint::Neutral,
        }
    }
}

/// Formats a length for labels: fixed point, three decimals.
pub fn format_length(v: f64) -> String {
    format!("{v:.3}")
}

/// Formats a signed angle for labels, e.g. `+90.0°`.
pub fn format_angle(degrees: f64) -> String {
    format!("{degrees:+.1}°")
}

/// Arrow from `origin` to `origin + t` with a magnitude label, or nothing for
/// a zero vector.
pub fn translation_annotation(origin: Vec3, t: Vec3) -> Vec<Annotation> {
    let length = t.norm();
    if length.is_nan() || length <= MIN_ARROW_LENGTH {
        return Vec::new();
    }
    let head = origin + t;
    vec![
        Annotation {
            kind: AnnotationKind::Arrow,
            points: vec![origin, head],
            text: Some(format_length(length)),
            anchor: (origin + head).scale(0.5),
            color_hint: ColorHint::Neutral,
        },
        Annotation::label((origin + head).scale(0.5), format_length(length)),
    ]
}

/// Coordinate triad: `(origin, origin + length·axis)` for each of the three
/// axis directions.
pub fn triad(origin: Vec3, axes: [Vec3; 3], length: f64) -> Annotation {
    let points = axes
        .iter()
        .flat_map(|a| [origin, origin + a.scale(length)])
        .collect();
    Annotation {
        kind: AnnotationKind::Triad,
        points,
        text: None,
        anchor: origin,
        color_hint: ColorHint::Neutral,
    }
}

/// Start point of the arc drawn for a rotation about `axis`: one radius
/// along the next axis in cyclic order.
pub fn arc_start(axis: PrincipalAxis, pivot: Vec3, radius: f64) -> Vec3 {
    pivot + axis.next().unit().scale(radius)
}

/// Triad at the pivot, plus an arc and signed-angle label when the effective
/// angle is non-zero.
pub fn rotation_annotation(
    spec: &RotationSpec,
    radius: f64,
) -> Result<Vec<Annotation>, AnnotationError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(AnnotationError::BadRadius(radius));
    }
    let mut out = vec![triad(spec.pivot, [Vec3::X, Vec3::Y, Vec3::Z], radius)];
    let sweep = spec.effective_degrees();
    if sweep.abs() <= MIN_ARC_SWEEP {
        return Ok(out);
    }

    let start = arc_start(spec.axis, spec.pivot, radius);
    let segments = (sweep.abs() / ARC_SAMPLE_STEP).ceil().max(1.0) as usize;
    let points = (0..=segments)
        .map(|k| {
            let theta = if k == segments {
                sweep
            } else {
                sweep * k as f64 / segments as f64
            };
            let step = RotationSpec {
                axis: spec.axis,
                sense: RotationSense::Ccw,
                angle: AngleDeg::new(theta).expect("sub-sweep stays within a half turn"),
                pivot: spec.pivot,
            };
            rotate_about_pivot(&[start], &step).expect("finite arc sample")[0]
        })
        .collect::<Vec<_>>();
    let middle = points[points.len() / 2];

    out.push(Annotation {
        kind: AnnotationKind::Arc,
        points,
        text: Some(format_angle(sweep)),
        anchor: middle,
        color_hint: spec.axis.into(),
    });
    out.push(Annotation::label(middle, format_angle(sweep)));
    Ok(out)
}
