use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use serde_json::{Map, Number, Value};

/// Significant digits kept for every float in JSON output.
pub const FLOAT_DIGITS: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Plain,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Format::Plain),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}; expected plain, json or csv")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Plain => "plain",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// One assertion. `name` is stable across releases so CI can key on it.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            detail: detail.into(),
            counterexample: None,
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>, counterexample: Option<Value>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            detail: detail.into(),
            counterexample,
        }
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        if ok {
            Check::pass(name, detail)
        } else {
            Check::fail(name, detail, None)
        }
    }

    pub fn plain_line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!("{tag}  {}: {}", self.name, self.detail);
        if let Some(cx) = &self.counterexample {
            line.push_str("\n      counterexample: ");
            line.push_str(&cx.to_string());
        }
        line
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        ReportDocument {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            checks: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.inputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.outputs.insert(key.to_string(), to_value(value));
        self
    }

    pub fn timing(&mut self, key: &str, seconds: f64) -> &mut Self {
        self.timings.insert(key.to_string(), seconds);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    /// Pretty JSON with sorted keys and floats rounded to [`FLOAT_DIGITS`].
    pub fn to_json(&self) -> String {
        let v = normalize(to_value(self));
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn checks_plain(&self) -> String {
        let mut out: Vec<String> = self.checks.iter().map(Check::plain_line).collect();
        let failed = self.failures();
        out.push(if failed == 0 {
            format!("all {} checks passed", self.checks.len())
        } else {
            format!("{failed} of {} checks failed", self.checks.len())
        });
        out.join("\n")
    }

    pub fn checks_csv(&self) -> String {
        let mut t = CsvTable::new(&["check", "passed", "detail"]);
        for c in &self.checks {
            t.row(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
        }
        t.finish()
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

/// Rounds a float to [`FLOAT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", FLOAT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rebuilds `v` with every object key-sorted and every float rounded.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => {
            let sorted: BTreeMap<String, Value> = o.into_iter().map(|(k, v)| (k, normalize(v))).collect();
            Value::Object(sorted.into_iter().collect::<Map<_, _>>())
        }
        other => other,
    }
}

/// A JSON number when the value fits in 64 bits, else a decimal string.
pub fn big_uint(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(n.to_string()),
    }
}

pub fn big_int(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(n.to_string()),
    }
}

/// Minimal RFC 4180 writer.
pub struct CsvTable {
    lines: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            lines: vec![header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(",")],
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.lines.push(cells.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
    }

    pub fn finish(self) -> String {
        self.lines.join("\n")
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}
