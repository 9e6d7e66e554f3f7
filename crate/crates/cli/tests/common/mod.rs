use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loggas"));
    cmd.env_remove("LOGGAS_THREADS");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn schema(subcommand: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{subcommand}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        "string" => v.is_string(),
        "array" => v.is_array(),
        "object" => v.is_object(),
        other => panic!("unsupported schema type {other}"),
    }
}

/// Checks `value` against the `type`, `enum`, `required`, `properties` and
/// `items` keywords. Returns the first violation as a JSON-pointer-ish path.
pub fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_matches(s, value),
            Value::Array(ts) => ts.iter().any(|s| type_matches(s.as_str().unwrap(), value)),
            _ => panic!("bad type keyword at {path}"),
        };
        if !ok {
            return Err(format!("{path}: {value} is not of type {t}"));
        }
    }
    if let Some(Value::Array(allowed)) = schema.get("enum") {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in {allowed:?}"));
        }
    }
    if let Value::Object(obj) = value {
        if let Some(Value::Array(req)) = schema.get("required") {
            for k in req {
                let k = k.as_str().unwrap();
                if !obj.contains_key(k) {
                    return Err(format!("{path}: missing `{k}`"));
                }
            }
        }
        if let Some(Value::Object(props)) = schema.get("properties") {
            for (k, v) in obj {
                match props.get(k) {
                    Some(s) => validate(s, v, &format!("{path}/{k}"))?,
                    None => return Err(format!("{path}: unexpected `{k}`")),
                }
            }
        }
    }
    if let (Some(items), Value::Array(xs)) = (schema.get("items"), value) {
        for (i, x) in xs.iter().enumerate() {
            validate(items, x, &format!("{path}/{i}"))?;
        }
    }
    Ok(())
}
