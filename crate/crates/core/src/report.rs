//! Machine-readable report records.
//!
//! Every record carries the schema tag. Maps are `BTreeMap`s so the JSON
//! output has sorted keys and is byte-stable across runs.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "sll/1";

/// `{scene, hypotheses, conclusions, counts, ratios}` plus free-form labels.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Record {
    pub kind: String,
    pub scene: BTreeMap<String, String>,
    pub hypotheses: BTreeMap<String, bool>,
    pub conclusions: BTreeMap<String, bool>,
    pub counts: BTreeMap<String, u64>,
    pub ratios: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Record { kind: kind.to_string(), ..Default::default() }
    }

    pub fn scene(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.scene.insert(k.to_string(), v.to_string());
        self
    }

    pub fn hypothesis(&mut self, k: &str, v: bool) -> &mut Self {
        self.hypotheses.insert(k.to_string(), v);
        self
    }

    pub fn conclusion(&mut self, k: &str, v: bool) -> &mut Self {
        self.conclusions.insert(k.to_string(), v);
        self
    }

    pub fn count(&mut self, k: &str, v: u64) -> &mut Self {
        self.counts.insert(k.to_string(), v);
        self
    }

    pub fn ratio(&mut self, k: &str, v: f64) -> &mut Self {
        self.ratios.insert(k.to_string(), v);
        self
    }

    pub fn label(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.labels.insert(k.to_string(), v.to_string());
        self
    }

    pub fn note(&mut self, v: impl Into<String>) -> &mut Self {
        self.notes.push(v.into());
        self
    }

    pub fn all_hypotheses_hold(&self) -> bool {
        self.hypotheses.values().all(|&b| b)
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("record serializes");
        v["schema"] = json!(SCHEMA);
        v
    }
}

/// Wraps a payload as `{"schema": .., "config": .., "result": ..}`.
pub fn envelope(config: Value, result: Value) -> Value {
    json!({ "schema": SCHEMA, "config": config, "result": result })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted() {
        let mut r = Record::new("x");
        r.hypothesis("b", true).hypothesis("a", false).count("n", 3);
        let s = to_string(&r.to_json());
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("\"schema\": \"sll/1\""));
        assert!(!r.all_hypotheses_hold());
    }
}
