//! JSON report envelope shared by every command.

use std::fs;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// Wraps `body` (which must serialize to an object) with the schema
/// version and command name.
pub fn envelope(command: &str, body: impl Serialize) -> Value {
    let mut out = Map::new();
    out.insert("schema_version".into(), SCHEMA_VERSION.into());
    out.insert("command".into(), command.into());
    match serde_json::to_value(body).expect("reports serialize") {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

/// Writes to `path`, or stdout when absent or `-`.
pub fn write_text(path: Option<&str>, text: &str) -> Result<(), Failure> {
    match path {
        None | Some("-") => {
            print!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| Failure::Invalid(format!("{p}: {e}"))),
    }
}

pub fn write_json(path: Option<&str>, v: &Value) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    write_text(path, &s)
}
