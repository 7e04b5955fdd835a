//! Report emission: versioned JSON, markdown and static SVG charts.

pub mod dossier;
pub mod markdown;
pub mod svg;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal places for fractions in serialized output.
pub const FRACTION_DECIMALS: u32 = 5;
/// Decimal places for regression coefficients.
pub const REGRESSION_DECIMALS: u32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid JSON report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}")]
    SchemaVersion(u64),
    #[error("expected a `{expected}` report, found `{found}`")]
    Kind { expected: String, found: String },
}

pub fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every floating-point number in `value` to `decimals` places.
pub fn round_json(value: &mut Value, decimals: u32) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(|x| round_to(x, decimals)) {
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| round_json(v, decimals)),
        Value::Object(map) => map.values_mut().for_each(|v| round_json(v, decimals)),
        _ => {}
    }
}

/// Wraps a payload as `{ "schema_version": 1, "kind": ..., "data": ... }`
/// with floats rounded to `decimals`.
pub fn to_json_value<T: Serialize>(kind: &str, payload: &T, decimals: u32) -> Value {
    let mut data = serde_json::to_value(payload).expect("report types serialize");
    round_json(&mut data, decimals);
    let mut root = Map::new();
    root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    root.insert("kind".into(), Value::from(kind));
    root.insert("data".into(), data);
    Value::Object(root)
}

pub fn to_json<T: Serialize>(kind: &str, payload: &T, decimals: u32) -> String {
    serde_json::to_string_pretty(&to_json_value(kind, payload, decimals))
        .expect("JSON values serialize")
}

#[derive(Deserialize)]
struct Envelope {
    schema_version: u64,
    kind: String,
    data: Value,
}

/// Reads back a report written by [`to_json`].
pub fn from_json<T: DeserializeOwned>(kind: &str, text: &str) -> Result<T, ReportError> {
    let env: Envelope = serde_json::from_str(text)?;
    if env.schema_version != u64::from(SCHEMA_VERSION) {
        return Err(ReportError::SchemaVersion(env.schema_version));
    }
    if env.kind != kind {
        return Err(ReportError::Kind {
            expected: kind.to_string(),
            found: env.kind,
        });
    }
    Ok(serde_json::from_value(env.data)?)
}
