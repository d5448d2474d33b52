//! Versioned JSON run reports.
//!
//! Reports are built from `serde_json::Value` maps, whose keys are ordered, and
//! every float is rounded to 9 significant digits on construction. Together
//! that makes output byte-identical for identical inputs and lets a report
//! survive a serialize/parse round trip unchanged.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every float in a JSON tree. Integers are left alone.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|f| serde_json::Number::from_f64(round_sig(f)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x)
        .map(round_value)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub version: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub config: Value,
}

impl RunReport {
    pub fn new(
        command: &str,
        inputs: &impl Serialize,
        results: &impl Serialize,
        config: &impl Serialize,
    ) -> Result<Self> {
        Ok(RunReport {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs: to_value(inputs)?,
            results: to_value(results)?,
            config: to_value(config)?,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain JSON");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Error report with the machine-readable error code.
pub fn error_json(command: &str, err: &Error) -> String {
    let v = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "error": { "code": err.code(), "message": err.to_string() },
    });
    let mut s = serde_json::to_string_pretty(&v).expect("plain JSON");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_nine_digits() {
        assert_eq!(round_sig(-0.760_588_829_068_972), -0.760_588_829);
        assert_eq!(round_sig(1e-12), 1e-12);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(123_456_789_012.0), 123_456_789_000.0);
    }

    #[test]
    fn integers_untouched() {
        let v = round_value(json!({"n": 123456789012u64, "x": 2.0f64/3.0}));
        assert_eq!(v["n"], json!(123456789012u64));
        assert_eq!(v["x"], json!(0.666666667));
    }

    #[test]
    fn report_round_trip() {
        let r = RunReport::new(
            "integral",
            &json!({"poly": [1.0, -1.0, 1.0, 1.0]}),
            &json!({"total": -0.760_588_829_068_972, "pairs": [0.128300059819917, -1.01718917]}),
            &json!({"root_tol": 1e-12}),
        )
        .unwrap();
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }
}
