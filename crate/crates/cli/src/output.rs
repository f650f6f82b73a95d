//! Report rendering. Floats are rounded to 12 significant digits so reports
//! are byte-identical across runs and platforms.

use serde_json::{Map, Number, Value};

const SIGNIFICANT_DIGITS: usize = 12;

fn round_float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses");
    Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

/// Rounds every non-integer number in place.
pub fn normalize(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round_float(n.as_f64().expect("f64 number")),
        Value::Array(items) => Value::Array(items.iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), normalize(v))).collect::<Map<_, _>>()),
        other => other.clone(),
    }
}

pub fn json(report: &Value) -> String {
    serde_json::to_string_pretty(&normalize(report)).expect("values serialize")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flat_row(items: &[Value]) -> Option<String> {
    items.iter().map(scalar).collect::<Option<Vec<_>>>().map(|v| format!("[{}]", v.join(" ")))
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
    if let Some(s) = scalar(v) {
        out.push(format!("{prefix}: {s}"));
        return;
    }
    match v {
        Value::Array(items) => {
            if let Some(row) = flat_row(items) {
                out.push(format!("{prefix}: {row}"));
            } else if let Some(rows) = items
                .iter()
                .map(|r| r.as_array().and_then(|r| flat_row(r)))
                .collect::<Option<Vec<_>>>()
            {
                out.push(format!("{prefix}: [{}]", rows.join(" ")));
            } else {
                for (i, item) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), item, out);
                }
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(&p, item, out);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

/// One `path: value` line per leaf; matrices on one line.
pub fn text(report: &Value) -> String {
    let mut lines = Vec::new();
    walk("", &normalize(report), &mut lines);
    lines.join("\n")
}
