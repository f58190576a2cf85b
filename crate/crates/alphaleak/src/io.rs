//! JSON distribution files.
//!
//! A file is an object with `x_labels`, `y_labels`, an optional `z_labels`,
//! and exactly one way of giving the joint law:
//!
//! * `joint`: nested array, X-major then Y (then Z when `z_labels` is present);
//! * `px` + `channel_yx`: input distribution and row-major `P(y|x)`; Z is
//!   constant;
//! * `px` + `channel_yx` + `channel_zx`: additionally `P(z|x)`, which makes
//!   `Z - X - Y` a Markov chain by construction.
//!
//! Channel matrices may be nested rows or a flat row-major array.

use std::path::Path;

use alphaleak_core::prob::pair_label;
use alphaleak_core::{Channel, Joint3, Pmf};
use serde_json::{Map, Value};
use thiserror::Error;

/// Label of the single `Z` symbol of files without side information.
pub const CONSTANT_Z: &str = "*";

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
}

fn schema(field: &str, message: impl Into<String>) -> InputError {
    InputError::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

pub fn load_joint(path: &Path) -> Result<Joint3, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_joint(&text)
}

pub fn parse_joint(text: &str) -> Result<Joint3, InputError> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema("<root>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "x_labels" | "y_labels" | "z_labels" | "joint" | "px" | "channel_yx" | "channel_zx"
        ) {
            return Err(schema(key, "unknown field"));
        }
    }
    let x = labels(obj, "x_labels")?.ok_or_else(|| schema("x_labels", "missing"))?;
    let y = labels(obj, "y_labels")?.ok_or_else(|| schema("y_labels", "missing"))?;
    let z = labels(obj, "z_labels")?;

    let has_joint = obj.contains_key("joint");
    let has_px = obj.contains_key("px");
    match (has_joint, has_px) {
        (true, true) => Err(schema(
            "joint",
            "give either `joint` or `px` + channels, not both",
        )),
        (false, false) => Err(schema("joint", "missing (or give `px` + `channel_yx`)")),
        (true, false) => {
            for k in ["channel_yx", "channel_zx"] {
                if obj.contains_key(k) {
                    return Err(schema(k, "not allowed together with `joint`"));
                }
            }
            let mut dims = vec![x.len(), y.len()];
            if let Some(z) = &z {
                dims.push(z.len());
            }
            let mut data = Vec::new();
            flatten(&obj["joint"], &dims, "joint", &mut data)?;
            let z = z.unwrap_or_else(|| vec![CONSTANT_Z.to_string()]);
            Joint3::new(x, y, z, data).map_err(|e| schema("joint", e.to_string()))
        }
        (false, true) => {
            let px_raw = numbers(&obj["px"], "px")?;
            let px = Pmf::new(x.clone(), px_raw).map_err(|e| schema("px", e.to_string()))?;
            let yx = obj
                .get("channel_yx")
                .ok_or_else(|| schema("channel_yx", "missing"))?;
            let ch_yx = matrix(yx, x.len(), y.len(), "channel_yx")?;
            let ch_yx = Channel::new(x.clone(), y.clone(), ch_yx)
                .map_err(|e| schema("channel_yx", e.to_string()))?;
            let (z_labels, z_rows) = match (obj.get("channel_zx"), z) {
                (Some(zx), Some(z)) => {
                    let m = matrix(zx, x.len(), z.len(), "channel_zx")?;
                    let ch = Channel::new(x.clone(), z.clone(), m)
                        .map_err(|e| schema("channel_zx", e.to_string()))?;
                    (z, ch.matrix().to_vec())
                }
                (Some(_), None) => return Err(schema("z_labels", "required by `channel_zx`")),
                (None, Some(_)) => {
                    return Err(schema(
                        "channel_zx",
                        "required when `z_labels` is given with `px`",
                    ))
                }
                (None, None) => (vec![CONSTANT_Z.to_string()], vec![1.0; x.len()]),
            };
            let nz = z_labels.len();
            let mut inputs = Vec::new();
            let mut m = Vec::new();
            for (xi, xl) in x.iter().enumerate() {
                for yl in &y {
                    inputs.push(pair_label(xl, yl));
                    m.extend_from_slice(&z_rows[xi * nz..(xi + 1) * nz]);
                }
            }
            let ch_z = Channel::new(inputs, z_labels, m)
                .map_err(|e| schema("channel_zx", e.to_string()))?;
            Joint3::compose(&px, &ch_yx, &ch_z).map_err(|e| schema("px", e.to_string()))
        }
    }
}

fn labels(obj: &Map<String, Value>, field: &str) -> Result<Option<Vec<String>>, InputError> {
    let Some(v) = obj.get(field) else {
        return Ok(None);
    };
    let arr = v
        .as_array()
        .ok_or_else(|| schema(field, "expected an array of labels"))?;
    if arr.is_empty() {
        return Err(schema(field, "must contain at least one label"));
    }
    let mut out = Vec::with_capacity(arr.len());
    for item in arr {
        let l = match item {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(schema(field, "labels must be strings or numbers")),
        };
        if out.contains(&l) {
            return Err(schema(field, format!("duplicate label `{l}`")));
        }
        out.push(l);
    }
    Ok(Some(out))
}

fn numbers(v: &Value, field: &str) -> Result<Vec<f64>, InputError> {
    v.as_array()
        .ok_or_else(|| schema(field, "expected an array of numbers"))?
        .iter()
        .map(|n| n.as_f64().ok_or_else(|| schema(field, "expected a number")))
        .collect()
}

/// Nested rows or flat row-major array of `rows * cols` numbers.
fn matrix(v: &Value, rows: usize, cols: usize, field: &str) -> Result<Vec<f64>, InputError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(field, "expected an array"))?;
    let mut out = Vec::with_capacity(rows * cols);
    if arr.first().is_some_and(Value::is_array) {
        flatten(v, &[rows, cols], field, &mut out)?;
    } else {
        out = numbers(v, field)?;
        if out.len() != rows * cols {
            return Err(schema(
                field,
                format!("expected {} entries, found {}", rows * cols, out.len()),
            ));
        }
    }
    Ok(out)
}

fn flatten(v: &Value, dims: &[usize], field: &str, out: &mut Vec<f64>) -> Result<(), InputError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(field, "expected a nested array"))?;
    if arr.len() != dims[0] {
        return Err(schema(
            field,
            format!(
                "expected {} entries at this level, found {}",
                dims[0],
                arr.len()
            ),
        ));
    }
    if dims.len() == 1 {
        for n in arr {
            out.push(
                n.as_f64()
                    .ok_or_else(|| schema(field, "expected a number"))?,
            );
        }
    } else {
        for item in arr {
            flatten(item, &dims[1..], field, out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alphaleak_core::Axis;

    #[test]
    fn joint_form_with_and_without_z() {
        let j = parse_joint(
            r#"{"x_labels":["a","b"],"y_labels":["0","1"],"joint":[[0.375,0.125],[0.125,0.375]]}"#,
        )
        .unwrap();
        assert_eq!(j.z_labels(), [CONSTANT_Z]);
        assert_eq!(j.get(0, 1, 0), 0.125);

        let j = parse_joint(
            r#"{"x_labels":[0,1],"y_labels":[0],"z_labels":["u","v"],
                "joint":[[[0.25,0.25]],[[1.25e-1,3.75E-1]]]}"#,
        )
        .unwrap();
        assert_eq!(j.x_labels(), ["0", "1"]);
        assert_eq!(j.get(1, 0, 1), 0.375);
    }

    #[test]
    fn channel_forms() {
        let j = parse_joint(
            r#"{"x_labels":["0","1"],"y_labels":["0","1"],"px":[0.5,0.5],
                "channel_yx":[0.75,0.25,0.25,0.75]}"#,
        )
        .unwrap();
        assert_eq!(j.dims(), (2, 2, 1));
        assert_eq!(j.get(0, 0, 0), 0.375);

        let j = parse_joint(
            r#"{"x_labels":["0","1"],"y_labels":["0","1"],"z_labels":["0","1"],"px":[0.5,0.5],
                "channel_yx":[[0.75,0.25],[0.25,0.75]],"channel_zx":[[0.9,0.1],[0.1,0.9]]}"#,
        )
        .unwrap();
        assert!((j.get(0, 0, 0) - 0.5 * 0.75 * 0.9).abs() < 1e-15);
        assert!((j.marginal(Axis::Z).probs()[0] - 0.5).abs() < 1e-15);
    }

    fn field_of(text: &str) -> String {
        match parse_joint(text) {
            Err(InputError::Schema { field, .. }) => field,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        assert_eq!(field_of(r#"{"y_labels":["0"],"joint":[[1]]}"#), "x_labels");
        assert_eq!(
            field_of(r#"{"x_labels":["0"],"y_labels":["0"],"joint":[[0.5]]}"#),
            "joint"
        );
        assert_eq!(
            field_of(r#"{"x_labels":["0","1"],"y_labels":["0"],"joint":[[1]]}"#),
            "joint"
        );
        assert_eq!(
            field_of(r#"{"x_labels":["0"],"y_labels":["0"],"px":[1],"channel_yx":[1],"bogus":1}"#),
            "bogus"
        );
        assert_eq!(
            field_of(r#"{"x_labels":["0"],"y_labels":["0","1"],"px":[1],"channel_yx":[0.5,0.6]}"#),
            "channel_yx"
        );
        assert_eq!(
            field_of(
                r#"{"x_labels":["0"],"y_labels":["0"],"px":[1],"channel_yx":[1],"channel_zx":[1]}"#
            ),
            "z_labels"
        );
        assert_eq!(
            field_of(r#"{"x_labels":["0","0"],"y_labels":["0"],"joint":[[0.5],[0.5]]}"#),
            "x_labels"
        );
        assert_eq!(
            field_of(r#"{"x_labels":["0"],"y_labels":["0"],"joint":[[1]],"px":[1]}"#),
            "joint"
        );
        assert!(matches!(parse_joint("{"), Err(InputError::Json(_))));
    }
}
