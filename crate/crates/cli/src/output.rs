use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use sixstate_core::QkdError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invariant(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "error: {msg}"),
            CliError::Invariant(msg) => write!(f, "invariant violation: {msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<QkdError> for CliError {
    fn from(e: QkdError) -> Self {
        match e {
            QkdError::InvariantViolation(msg) => CliError::Invariant(msg),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Echoed at the top of every artifact so a run can be repeated.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub version: &'static str,
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, with_timestamp: bool) -> Self {
        Self {
            command: command.to_string(),
            params: Map::new(),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: with_timestamp.then(timestamp_now),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn csv_header(&self) -> String {
        let params = serde_json::to_string(&self.params).expect("serializable");
        let timestamp = self.timestamp.as_deref().unwrap_or("null");
        format!(
            "# command: {}\n# params: {params}\n# seed: {}\n# version: {}\n# timestamp: {timestamp}\n",
            self.command, self.seed, self.version
        )
    }
}

fn timestamp_now() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    pinned.unwrap_or_else(Utc::now).to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Rounds to 12 significant digits, then prints the shortest decimal that
/// reads back to the rounded value.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("own output parses");
    format!("{rounded}")
}

/// Pretty JSON object with the manifest under `"manifest"`.
pub fn json_with_manifest(manifest: &RunManifest, body: impl Serialize) -> CliResult<String> {
    let mut obj = Map::new();
    obj.insert("manifest".into(), serde_json::to_value(manifest)?);
    match serde_json::to_value(body)? {
        Value::Object(fields) => obj.extend(fields),
        other => {
            obj.insert("result".into(), other);
        }
    }
    Ok(serde_json::to_string_pretty(&Value::Object(obj))? + "\n")
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
