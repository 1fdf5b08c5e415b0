//! Canonical rendering: sorted `key=value` lines, or JSON with sorted keys.

use serde::Serialize;
use serde_json::{Map, Value};

pub fn render<T: Serialize>(record: &T, json: bool) -> String {
    let value = sorted(serde_json::to_value(record).expect("records serialize"));
    if json {
        let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
        s.push('\n');
        s
    } else {
        let mut lines = Vec::new();
        flatten("", &value, &mut lines);
        lines.sort();
        lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

fn sorted(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, sorted(v)))
                    .collect::<Map<_, _>>(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sorted).collect()),
        v => v,
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<String>) {
    match value {
        Value::Null => {}
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(prefix, k), v, out);
            }
        }
        Value::Array(items) if items.is_empty() => out.push(format!("{prefix}=")),
        Value::Array(items) => {
            // Zero-padded so that lexicographic order is index order.
            let width = (items.len() - 1).to_string().len();
            for (i, v) in items.iter().enumerate() {
                flatten(&join(prefix, &format!("{i:0width$}")), v, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}={s}")),
        v => out.push(format!("{prefix}={v}")),
    }
}
