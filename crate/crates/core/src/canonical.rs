//! Canonical JSON text: sorted object keys, no insignificant whitespace and
//! floating-point numbers reduced to at most nine significant digits.
//!
//! Every document and protocol message that ends up in a golden file goes
//! through [`to_canonical_string`], so equal values always produce equal
//! bytes.

use serde::Serialize;
use serde_json::{Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds `v` to nine significant digits. Negative zero becomes zero.
pub fn round_significant(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Snaps `v` onto a 1e-9 absolute grid and then to nine significant digits.
///
/// Used for slider values so that step arithmetic residue (`0.30000000000000004`)
/// never reaches the wire.
pub fn quantize(v: f64) -> f64 {
    let snapped = (v * 1e9).round() / 1e9;
    round_significant(snapped)
}

pub fn format_number(v: f64) -> String {
    let r = round_significant(v);
    if r.is_finite() {
        format!("{r}")
    } else {
        // JSON has no spelling for these; serde_json maps them to null as well.
        "null".to_owned()
    }
}

fn write_number(n: &Number, out: &mut String) {
    if let Some(i) = n.as_i64() {
        out.push_str(&i.to_string());
    } else if let Some(u) = n.as_u64() {
        out.push_str(&u.to_string());
    } else {
        out.push_str(&format_number(n.as_f64().unwrap_or(f64::NAN)));
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serializes"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push(':');
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

/// Single-line canonical text for `value`, without a trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

/// Canonical text of any serializable value, without a trailing newline.
pub fn canonical<T: Serialize + ?Sized>(value: &T) -> Result<String, serde_json::Error> {
    Ok(to_canonical_string(&serde_json::to_value(value)?))
}

/// Canonical document text: [`canonical`] plus a terminating newline.
pub fn canonical_document<T: Serialize + ?Sized>(value: &T) -> Result<String, serde_json::Error> {
    let mut s = canonical(value)?;
    s.push('\n');
    Ok(s)
}
