//! Parameter definitions (sliders, toggles, index selectors) and value
//! validation.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::canonical::quantize;

/// Absolute slack for bounds and step checks.
pub const PARAM_TOLERANCE: f64 = 1e-9;

pub const TX: &str = "tx";
pub const TY: &str = "ty";
pub const TZ: &str = "tz";

pub const PART: &str = "part";
pub const AXIS: &str = "axis";
/// Toggle; on means clockwise.
pub const SENSE: &str = "sense";
pub const ANGLE: &str = "angle";
pub const PIVOT_SNAP: [&str; 3] = ["pivot_snap_x", "pivot_snap_y", "pivot_snap_z"];
pub const PIVOT_OFFSET: [&str; 3] = ["pivot_offset_x", "pivot_offset_y", "pivot_offset_z"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{id}: {value} out of bounds [{min}, {max}]")]
    OutOfBounds {
        id: String,
        value: String,
        min: f64,
        max: f64,
    },
    #[error("{id}: {value} is not a multiple of step {step} from {min}")]
    OffStep {
        id: String,
        value: f64,
        min: f64,
        step: f64,
    },
    #[error("{id}: expected {expected}, got {got}")]
    WrongType {
        id: String,
        expected: &'static str,
        got: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamKind {
    Slider { min: f64, max: f64, step: f64 },
    Toggle,
    IndexSelector { count: usize },
}

/// A current parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Toggle(bool),
    Index(usize),
    Number(f64),
}

impl ParamValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ParamValue::Number(v) => v,
            ParamValue::Index(i) => i as f64,
            ParamValue::Toggle(b) => f64::from(u8::from(b)),
        }
    }

    pub fn as_index(self) -> usize {
        match self {
            ParamValue::Index(i) => i,
            ParamValue::Number(v) => v as usize,
            ParamValue::Toggle(b) => usize::from(b),
        }
    }

    pub fn as_bool(self) -> bool {
        match self {
            ParamValue::Toggle(b) => b,
            other => other.as_f64() != 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDef {
    pub id: String,
    pub label: String,
    #[serde(flatten)]
    pub kind: ParamKind,
    pub default: ParamValue,
}

fn describe(v: &Value) -> String {
    match v {
        Value::String(s) => format!("string {s:?}"),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

impl ParamDef {
    pub fn slider(id: &str, label: &str, min: f64, max: f64, step: f64, default: f64) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            kind: ParamKind::Slider { min, max, step },
            default: ParamValue::Number(default),
        }
    }

    pub fn toggle(id: &str, label: &str, default: bool) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            kind: ParamKind::Toggle,
            default: ParamValue::Toggle(default),
        }
    }

    pub fn index(id: &str, label: &str, count: usize, default: usize) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            kind: ParamKind::IndexSelector { count },
            default: ParamValue::Index(default),
        }
    }

    /// Validates a wire value and returns the value to store. Slider values
    /// are snapped onto their step grid.
    pub fn coerce(&self, raw: &Value) -> Result<ParamValue, ParamError> {
        let id = self.id.clone();
        match self.kind {
            ParamKind::Slider { min, max, step } => {
                let Some(v) = raw.as_f64() else {
                    return Err(ParamError::WrongType {
                        id,
                        expected: "number",
                        got: describe(raw),
                    });
                };
                if !(v >= min - PARAM_TOLERANCE && v <= max + PARAM_TOLERANCE) {
                    return Err(ParamError::OutOfBounds {
                        id,
                        value: describe(raw),
                        min,
                        max,
                    });
                }
                let steps = ((v - min) / step).round();
                let snapped = min + steps * step;
                if (v - snapped).abs() > PARAM_TOLERANCE {
                    return Err(ParamError::OffStep {
                        id,
                        value: v,
                        min,
                        step,
                    });
                }
                Ok(ParamValue::Number(quantize(snapped).clamp(min, max)))
            }
            ParamKind::Toggle => {
                raw.as_bool()
                    .map(ParamValue::Toggle)
                    .ok_or(ParamError::WrongType {
                        id,
                        expected: "boolean",
                        got: describe(raw),
                    })
            }
            ParamKind::IndexSelector { count } => {
                let Some(v) = raw.as_f64() else {
                    return Err(ParamError::WrongType {
                        id,
                        expected: "integer",
                        got: describe(raw),
                    });
                };
                if v.fract() != 0.0 {
                    return Err(ParamError::WrongType {
                        id,
                        expected: "integer",
                        got: describe(raw),
                    });
                }
                if v < 0.0 || v >= count as f64 {
                    return Err(ParamError::OutOfBounds {
                        id,
                        value: describe(raw),
                        min: 0.0,
                        max: count as f64 - 1.0,
                    });
                }
                Ok(ParamValue::Index(v as usize))
            }
        }
    }

    /// Whether a stored value satisfies this definition. An empty index
    /// selector holds 0.
    pub fn admits(&self, value: ParamValue) -> bool {
        match (self.kind, value) {
            (ParamKind::Slider { min, max, step }, ParamValue::Number(v)) => {
                let on_step =
                    (v - (min + ((v - min) / step).round() * step)).abs() <= PARAM_TOLERANCE;
                v.is_finite() && v >= min && v <= max && on_step
            }
            (ParamKind::Toggle, ParamValue::Toggle(_)) => true,
            (ParamKind::IndexSelector { count }, ParamValue::Index(i)) => {
                i < count || (count == 0 && i == 0)
            }
            _ => false,
        }
    }
}

/// The three translation sliders.
pub fn translation_defs() -> Vec<ParamDef> {
    vec![
        ParamDef::slider(TX, "translate x", -10.0, 10.0, 0.1, 0.0),
        ParamDef::slider(TY, "translate y", -10.0, 10.0, 0.1, 0.0),
        ParamDef::slider(TZ, "translate z", -10.0, 10.0, 0.1, 0.0),
    ]
}

/// Rotation controls: part index, axis, sense, angle and the six pivot
/// controls (snap 0 = min, 1 = center, 2 = max, 3 = free).
pub fn rotation_defs(rotatable_count: usize) -> Vec<ParamDef> {
    let mut defs = vec![
        ParamDef::index(PART, "part", rotatable_count, 0),
        ParamDef::index(AXIS, "rotation axis (x, y, z)", 3, 0),
        ParamDef::toggle(SENSE, "clockwise", false),
        ParamDef::slider(ANGLE, "rotation angle", -180.0, 180.0, 1.0, 0.0),
    ];
    for (id, axis) in PIVOT_SNAP.iter().zip(["x", "y", "z"]) {
        defs.push(ParamDef::index(id, &format!("pivot {axis} snap"), 4, 1));
    }
    for (id, axis) in PIVOT_OFFSET.iter().zip(["x", "y", "z"]) {
        defs.push(ParamDef::slider(
            id,
            &format!("pivot {axis} offset"),
            -50.0,
            50.0,
            0.1,
            0.0,
        ));
    }
    defs
}
