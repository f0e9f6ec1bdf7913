//! Key-value reports, printed as aligned text or as JSON with sorted keys.

use serde_json::{Map, Value};

/// Fields are kept sorted by key, so both renderings are deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.fields).expect("values serialise");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.fields.keys().map(String::len).max().unwrap_or(0);
        for (k, v) in &self.fields {
            match v {
                Value::Object(m) if !m.is_empty() => {
                    out.push_str(&format!("{k}:\n"));
                    let inner = m.keys().map(String::len).max().unwrap_or(0);
                    for (ik, iv) in m {
                        out.push_str(&format!("  {ik:<inner$}  {}\n", scalar(iv)));
                    }
                }
                _ => out.push_str(&format!("{k:<width$}  {}\n", scalar(v))),
            }
        }
        out
    }
}

/// Floats print with six decimals, in scientific notation below 1e-3 so
/// energies in joules stay readable; lists are space separated.
fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            if x != 0.0 && x.abs() < 1e-3 {
                format!("{x:.6e}")
            } else {
                format!("{x:.6}")
            }
        }
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.is_empty() => "(none)".into(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        Value::Object(m) if m.is_empty() => "(none)".into(),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", scalar(v)))
            .collect::<Vec<_>>()
            .join(" "),
    }
}
