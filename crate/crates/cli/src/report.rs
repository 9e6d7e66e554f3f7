use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use loggas::LogGasError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] LogGasError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::FileNotFound(_) => "FileNotFound",
            CliError::Io { .. } => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::FileNotFound(_) => 2,
            CliError::Usage(_) => 64,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let v = json!({ "error": { "kind": self.kind(), "message": self.to_string() } });
        serde_json::to_string(&v).expect("error record serializes") + "\n"
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| match source.kind() {
        io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolved description of one invocation, embedded in every report.
#[derive(Debug, Serialize)]
pub struct RunSpec<'a, A: Serialize> {
    pub subcommand: &'a str,
    pub version: &'a str,
    pub format: &'a str,
    pub args: &'a A,
}

/// Serializes `body` as a JSON object, adds `run_spec`, and renders it with
/// sorted keys and a trailing newline.
pub fn render<B: Serialize, A: Serialize>(body: &B, spec: &RunSpec<'_, A>) -> CliResult<String> {
    let mut map: Map<String, Value> = match to_value(body)? {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("run_spec".into(), to_value(spec)?);
    let text = serde_json::to_string_pretty(&Value::Object(map))
        .map_err(|e| CliError::Usage(format!("report serialization failed: {e}")))?;
    Ok(text + "\n")
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Usage(format!("report serialization failed: {e}")))
}

pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}
