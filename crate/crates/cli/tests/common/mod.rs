//! Shared helpers for the CLI integration and acceptance suites: a small
//! JSON-Schema-subset validator for the documents shipped under `schemas/`,
//! plus process-spawning conveniences.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

/// Path to the compiled `graspscene` binary under test.
pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_graspscene")
}

/// Runs the binary with `args` and returns the finished process output.
pub fn run_cli<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary under test should spawn")
}

pub fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

pub fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Parses JSON-lines output into values, failing loudly on malformed lines.
pub fn parse_json_lines(text: &str) -> Vec<Value> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad JSON line {l:?}: {e}")))
        .collect()
}

/// Repo-root `schemas/` directory, located relative to this crate.
pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

pub fn load_schema(name: &str) -> Value {
    let path = schema_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("schema {} unreadable: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("schema {name} is not JSON: {e}"))
}

/// Validates `value` against `schema`, resolving `$ref` against `root`.
/// Supports the subset the shipped schemas use: `type`, `enum`, `required`,
/// `properties`, `additionalProperties` (boolean), `items` (single schema),
/// `minItems`/`maxItems`, `minimum`/`maximum`, and `#/definitions/...` refs.
pub fn validate(value: &Value, schema: &Value, root: &Value, path: &str) -> Result<(), String> {
    if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
        let target = resolve_ref(root, reference)
            .ok_or_else(|| format!("{path}: unresolvable $ref {reference}"))?;
        return validate(value, target, root, path);
    }

    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        if !type_matches(value, ty) {
            return Err(format!("{path}: expected type {ty}, got {value}"));
        }
    }

    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.iter().any(|a| a == value) {
            return Err(format!("{path}: {value} not in enum {allowed:?}"));
        }
    }

    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        let n = value
            .as_f64()
            .ok_or_else(|| format!("{path}: minimum applied to non-number {value}"))?;
        if n < min {
            return Err(format!("{path}: {n} below minimum {min}"));
        }
    }
    if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
        let n = value
            .as_f64()
            .ok_or_else(|| format!("{path}: maximum applied to non-number {value}"))?;
        if n > max {
            return Err(format!("{path}: {n} above maximum {max}"));
        }
    }

    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required property {key:?}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    validate(v, sub, root, &format!("{path}.{key}"))?;
                }
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if props.is_none_or(|p| !p.contains_key(key)) {
                    return Err(format!("{path}: unexpected property {key:?}"));
                }
            }
        }
    }

    if let Some(arr) = value.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                return Err(format!("{path}: {} items, minItems {min}", arr.len()));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if (arr.len() as u64) > max {
                return Err(format!("{path}: {} items, maxItems {max}", arr.len()));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in arr.iter().enumerate() {
                validate(item, item_schema, root, &format!("{path}[{i}]"))?;
            }
        }
    }

    Ok(())
}

fn resolve_ref<'a>(root: &'a Value, reference: &str) -> Option<&'a Value> {
    let pointer = reference.strip_prefix('#')?;
    root.pointer(pointer)
}

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        other => panic!("schema uses unsupported type {other:?}"),
    }
}

/// Asserts `value` validates against the named shipped schema.
pub fn assert_valid(value: &Value, schema_name: &str) {
    let schema = load_schema(schema_name);
    if let Err(e) = validate(value, &schema, &schema, "$") {
        panic!("document does not satisfy {schema_name}: {e}\n{value:#}");
    }
}

/// Removes the wall-clock `timing` field, leaving the byte-stable part.
pub fn strip_timing(mut value: Value) -> Value {
    if let Some(obj) = value.as_object_mut() {
        obj.remove("timing");
    }
    value
}

/// Recursive comparison with a relative tolerance on numbers — used for the
/// frozen golden record so the check is robust to last-ulp differences in
/// libm across platforms while still pinning every structural detail.
pub fn values_close(a: &Value, b: &Value, rel_tol: f64) -> Result<(), String> {
    fn go(a: &Value, b: &Value, rel_tol: f64, path: &str) -> Result<(), String> {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
                let scale = x.abs().max(y.abs()).max(1.0);
                if (x - y).abs() > rel_tol * scale {
                    return Err(format!("{path}: {x} != {y}"));
                }
                Ok(())
            }
            (Value::Array(xs), Value::Array(ys)) => {
                if xs.len() != ys.len() {
                    return Err(format!("{path}: length {} != {}", xs.len(), ys.len()));
                }
                for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                    go(x, y, rel_tol, &format!("{path}[{i}]"))?;
                }
                Ok(())
            }
            (Value::Object(xs), Value::Object(ys)) => {
                let mut keys: Vec<&String> = xs.keys().chain(ys.keys()).collect();
                keys.sort();
                keys.dedup();
                for key in keys {
                    match (xs.get(key), ys.get(key)) {
                        (Some(x), Some(y)) => go(x, y, rel_tol, &format!("{path}.{key}"))?,
                        (x, _) => {
                            let side = if x.is_some() { "right" } else { "left" };
                            return Err(format!("{path}.{key}: missing on {side} side"));
                        }
                    }
                }
                Ok(())
            }
            _ => {
                if a == b {
                    Ok(())
                } else {
                    Err(format!("{path}: {a} != {b}"))
                }
            }
        }
    }
    go(a, b, rel_tol, "$")
}
