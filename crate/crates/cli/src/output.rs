use std::fmt;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

/// How a command failed. Precondition failures exit with 1, numerical and
/// verification failures with 2.
#[derive(Debug)]
pub enum Failure {
    Precondition(String),
    Numerical(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Precondition(_) => 1,
            Failure::Numerical(_) | Failure::Verification(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Precondition(_) => "precondition",
            Failure::Numerical(_) => "numerical",
            Failure::Verification(_) => "verification",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Precondition(m) | Failure::Numerical(m) | Failure::Verification(m) => m,
        }
    }

    /// One line of JSON for stderr.
    pub fn to_json_line(&self) -> String {
        let v = json!({ "schema": SCHEMA, "error": { "kind": self.kind(), "message": self.message() } });
        serde_json::to_string(&v).expect("error JSON")
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl From<inflatlab::Error> for Failure {
    fn from(e: inflatlab::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Precondition(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Precondition(format!("json: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Precondition(format!("csv: {e}"))
    }
}

pub enum Body {
    Json(Value),
    Text(String),
}

/// A rendered result plus an optional failure reported after it is written,
/// such as a stalled ascent or a failed check.
pub struct Report {
    pub body: Body,
    pub failure: Option<Failure>,
}

impl Report {
    pub fn ok(body: Body) -> Self {
        Report { body, failure: None }
    }
}

/// `{"schema": 1, "command": ..., "params": ..., ...payload}`.
pub fn envelope(command: &str, params: Value, payload: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    map.insert("params".into(), params);
    if let Value::Object(rest) = payload {
        map.extend(rest);
    }
    Value::Object(map)
}

pub fn render(body: &Body) -> String {
    match body {
        Body::Json(v) => serde_json::to_string_pretty(v).expect("JSON values always serialize") + "\n",
        Body::Text(s) => s.clone(),
    }
}

pub fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("core types serialize")
}
