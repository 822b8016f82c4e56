//! Reference transform evaluator.
//!
//! A general homogeneous 4×4 pipeline with rotation matrices from the
//! Rodrigues formula. It deliberately shares no code with
//! `morphplay_core::geometry`, so that the two can be cross-checked.

use thiserror::Error;

pub type Point = [f64; 3];
type M4 = [[f64; 4]; 4];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("expected three comma-separated numbers, got `{0}`")]
    BadTriple(String),
    #[error("unknown axis `{0}` (expected x, y or z)")]
    BadAxis(String),
    #[error("unknown sense `{0}` (expected cw or ccw)")]
    BadSense(String),
    #[error("{0} cannot be combined with --translate")]
    Conflict(&'static str),
    #[error("give either --translate or all of --axis, --sense and --angle")]
    Incomplete,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// A transform the oracle can evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOp {
    /// Rotation by `degrees` about the line through `pivot` along `axis`.
    /// Positive degrees with `ccw` follow the right-hand rule.
    Rotate {
        axis: Point,
        ccw: bool,
        degrees: f64,
        pivot: Point,
    },
    Translate(Point),
}

impl OracleOp {
    /// Builds an operation from command-line style text fields.
    pub fn from_flags(
        axis: Option<&str>,
        sense: Option<&str>,
        angle: Option<f64>,
        pivot: Option<&str>,
        translate: Option<&str>,
    ) -> Result<Self, OracleError> {
        if let Some(t) = translate {
            for (given, flag) in [
                (axis.is_some(), "--axis"),
                (sense.is_some(), "--sense"),
                (angle.is_some(), "--angle"),
                (pivot.is_some(), "--pivot"),
            ] {
                if given {
                    return Err(OracleError::Conflict(flag));
                }
            }
            return Ok(OracleOp::Translate(parse_triple(t)?));
        }
        let (Some(axis), Some(sense), Some(degrees)) = (axis, sense, angle) else {
            return Err(OracleError::Incomplete);
        };
        if !degrees.is_finite() {
            return Err(OracleError::NonFinite("--angle"));
        }
        let axis = match axis.to_ascii_lowercase().as_str() {
            "x" => [1.0, 0.0, 0.0],
            "y" => [0.0, 1.0, 0.0],
            "z" => [0.0, 0.0, 1.0],
            _ => return Err(OracleError::BadAxis(axis.to_owned())),
        };
        let ccw = match sense.to_ascii_lowercase().as_str() {
            "ccw" => true,
            "cw" => false,
            _ => return Err(OracleError::BadSense(sense.to_owned())),
        };
        let pivot = pivot.map(parse_triple).transpose()?.unwrap_or([0.0; 3]);
        Ok(OracleOp::Rotate {
            axis,
            ccw,
            degrees,
            pivot,
        })
    }

    pub fn matrix(&self) -> M4 {
        match *self {
            OracleOp::Translate(t) => translation(t),
            OracleOp::Rotate {
                axis,
                ccw,
                degrees,
                pivot,
            } => {
                let signed = if ccw { degrees } else { -degrees };
                mul(
                    &translation(pivot),
                    &mul(
                        &rodrigues(axis, signed.to_radians()),
                        &translation([-pivot[0], -pivot[1], -pivot[2]]),
                    ),
                )
            }
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = self.matrix();
        let h = [p[0], p[1], p[2], 1.0];
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| m[i][k] * h[k]).sum();
        }
        out
    }
}

/// Parses `"x,y,z"`.
pub fn parse_triple(text: &str) -> Result<Point, OracleError> {
    let parts: Vec<_> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(OracleError::BadTriple(text.to_owned()));
    }
    let mut out = [0.0; 3];
    for (o, s) in out.iter_mut().zip(&parts) {
        *o = s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| OracleError::BadTriple(text.to_owned()))?;
    }
    Ok(out)
}

/// Nine decimals per coordinate, space separated, never `-0.000000000`.
pub fn format_point(p: Point) -> String {
    p.iter()
        .map(|v| {
            let s = format!("{v:.9}");
            if s.trim_start_matches('-')
                .bytes()
                .all(|b| b == b'0' || b == b'.')
            {
                s.trim_start_matches('-').to_owned()
            } else {
                s
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn translation(t: Point) -> M4 {
    [
        [1.0, 0.0, 0.0, t[0]],
        [0.0, 1.0, 0.0, t[1]],
        [0.0, 0.0, 1.0, t[2]],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// `I + sin θ K + (1 − cos θ) K²` for the unit axis cross-product matrix `K`.
fn rodrigues(axis: Point, radians: f64) -> M4 {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
    let k = [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]];
    let (s, c) = radians.sin_cos();
    let mut m = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            let k2: f64 = (0..3).map(|l| k[i][l] * k[l][j]).sum();
            let id = if i == j { 1.0 } else { 0.0 };
            m[i][j] = id + s * k[i][j] + (1.0 - c) * k2;
        }
    }
    m[3][3] = 1.0;
    m
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}
