//! Machine-readable run reports.
//!
//! A report is a JSON object with the keys
//!
//! * `schema`: the string [`SCHEMA`];
//! * `command`: the command that produced it;
//! * `config`: object echoing the inputs;
//! * `seeds`: array of the random seeds used;
//! * `results`: object of measured values;
//! * `checks`: array of `{name, pass, value?, relation?}`;
//! * `pass`: true iff every check passed.
//!
//! Object keys are sorted and every number is finite, so identical runs
//! give byte-identical documents. Absent optional values are omitted rather
//! than written as `null`; a `null` anywhere marks a non-finite number and
//! fails validation.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Error, Result};

pub const SCHEMA: &str = "spinc-report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Human-readable acceptance rule, e.g. `< 1e-8`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    command: String,
    config: Map<String, Value>,
    seeds: Vec<u64>,
    results: Map<String, Value>,
    checks: Vec<Check>,
    error: Option<String>,
}

fn to_value(key: &str, value: impl Serialize) -> Result<Value> {
    let v = serde_json::to_value(value).map_err(|e| Error::Report(format!("{key}: {e}")))?;
    find_null(&v, key).map_or(Ok(v), |path| Err(Error::Report(format!("{path} is not a finite number"))))
}

fn find_null(v: &Value, path: &str) -> Option<String> {
    match v {
        Value::Null => Some(path.to_string()),
        Value::Array(items) => items.iter().enumerate().find_map(|(i, x)| find_null(x, &format!("{path}[{i}]"))),
        Value::Object(map) => map.iter().find_map(|(k, x)| find_null(x, &format!("{path}.{k}"))),
        _ => None,
    }
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) -> Result<&mut Self> {
        self.config.insert(key.into(), to_value(key, value)?);
        Ok(self)
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seeds.push(seed);
        self
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> Result<&mut Self> {
        self.results.insert(key.into(), to_value(key, value)?);
        Ok(self)
    }

    /// Record a failure that stopped the command early (bad input, solver
    /// breakdown). It is reported under `results.error` and fails the run.
    pub fn fail(&mut self, message: impl Into<String>) -> &mut Self {
        self.error = Some(message.into());
        self
    }

    fn push(&mut self, name: &str, pass: bool, value: Option<f64>, relation: Option<String>) -> bool {
        // A non-finite measurement can never pass and is stored without a value.
        let finite = value.is_none_or(f64::is_finite);
        self.checks.push(Check {
            name: name.into(),
            pass: pass && finite,
            value: value.filter(|v| v.is_finite()),
            relation: if finite { relation } else { Some("non-finite".into()) },
        });
        pass && finite
    }

    pub fn check_flag(&mut self, name: &str, pass: bool) -> bool {
        self.push(name, pass, None, None)
    }

    pub fn check_below(&mut self, name: &str, value: f64, bound: f64) -> bool {
        self.push(name, value < bound, Some(value), Some(format!("< {bound:e}")))
    }

    pub fn check_at_least(&mut self, name: &str, value: f64, bound: f64) -> bool {
        self.push(name, value >= bound, Some(value), Some(format!(">= {bound}")))
    }

    pub fn check_within(&mut self, name: &str, value: f64, lo: f64, hi: f64) -> bool {
        self.push(name, (lo..=hi).contains(&value), Some(value), Some(format!("in [{lo}, {hi}]")))
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn to_value(&self) -> Value {
        let mut results = self.results.clone();
        if let Some(e) = &self.error {
            results.insert("error".into(), Value::String(e.clone()));
        }
        let mut doc = Map::new();
        doc.insert("schema".into(), SCHEMA.into());
        doc.insert("command".into(), self.command.clone().into());
        doc.insert("config".into(), Value::Object(self.config.clone()));
        doc.insert("seeds".into(), self.seeds.clone().into());
        doc.insert("results".into(), Value::Object(results));
        doc.insert(
            "checks".into(),
            serde_json::to_value(&self.checks).expect("checks serialize"),
        );
        doc.insert("pass".into(), self.passed().into());
        Value::Object(doc)
    }

    /// Pretty-printed document with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Check that `doc` follows the report schema.
pub fn validate(doc: &Value) -> Result<()> {
    let bad = |m: String| Err(Error::Report(m));
    let Some(obj) = doc.as_object() else {
        return bad("report is not an object".into());
    };
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let expected = ["checks", "command", "config", "pass", "results", "schema", "seeds"];
    if keys != expected {
        return bad(format!("report keys {keys:?}, expected {expected:?}"));
    }
    if obj["schema"] != SCHEMA {
        return bad(format!("schema {}", obj["schema"]));
    }
    if !obj["command"].is_string() || !obj["config"].is_object() || !obj["results"].is_object() {
        return bad("command/config/results have the wrong type".into());
    }
    if !obj["seeds"].as_array().is_some_and(|s| s.iter().all(Value::is_u64)) {
        return bad("seeds must be unsigned integers".into());
    }
    let Some(checks) = obj["checks"].as_array() else {
        return bad("checks must be an array".into());
    };
    let mut all = true;
    for c in checks {
        let name_ok = c.get("name").is_some_and(Value::is_string);
        match c.get("pass").and_then(Value::as_bool) {
            Some(p) if name_ok => all &= p,
            _ => return bad(format!("malformed check {c}")),
        }
    }
    let has_error = obj["results"].get("error").is_some();
    if obj["pass"].as_bool() != Some(all && !has_error) {
        return bad("pass flag disagrees with the checks".into());
    }
    if let Some(path) = find_null(doc, "$") {
        return bad(format!("{path} is null"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_sorted_and_valid() {
        let mut r = RunReport::new("demo");
        r.config("grid", [8, 8, 8, 8]).unwrap().config("alpha", 0.5).unwrap();
        r.seed(7);
        r.result("residual", 1.5e-9).unwrap();
        assert!(r.check_below("residual", 1.5e-9, 1e-8));
        assert!(r.check_flag("flag", true));
        let doc = r.to_value();
        validate(&doc).unwrap();
        let text = r.to_json();
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"grid\"").unwrap());
        assert!(text.ends_with("}\n"));
        assert_eq!(doc["pass"], true);
        assert_eq!(text, r.to_json());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut r = RunReport::new("demo");
        assert!(matches!(r.result("x", f64::NAN), Err(Error::Report(_))));
        assert!(matches!(r.result("v", vec![1.0, f64::INFINITY]), Err(Error::Report(_))));
        assert!(!r.check_below("nan", f64::NAN, 1.0));
        let doc = r.to_value();
        validate(&doc).unwrap();
        assert_eq!(doc["pass"], false);
    }

    #[test]
    fn failures_and_tampering() {
        let mut r = RunReport::new("demo");
        assert!(!r.check_within("order", 1.2, 1.7, 2.3));
        let mut doc = r.to_value();
        validate(&doc).unwrap();
        doc["pass"] = true.into();
        assert!(validate(&doc).is_err());

        let mut e = RunReport::new("demo");
        e.fail("input missing");
        let doc = e.to_value();
        validate(&doc).unwrap();
        assert_eq!(doc["pass"], false);
        assert_eq!(doc["results"]["error"], "input missing");

        let mut nulled = RunReport::new("demo").to_value();
        nulled["results"]["x"] = Value::Null;
        assert!(validate(&nulled).is_err());
    }
}
