//! Input loading, report envelopes and output writing.

use std::fs;
use std::path::Path;

use nritt::funclass::{FunctionSpec, HoloFn};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Command, Common};

#[derive(Debug)]
pub enum Failure {
    Domain(nritt::Error),
    Input { kind: &'static str, message: String },
}

impl From<nritt::Error> for Failure {
    fn from(e: nritt::Error) -> Self {
        Failure::Domain(e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

pub fn io_error(message: String) -> Failure {
    Failure::Input { kind: "IoError", message }
}

pub fn parse_error(message: String) -> Failure {
    Failure::Input { kind: "ParseError", message }
}

pub fn error_object(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

pub fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| io_error(format!("{}: {e}", path.display())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(format!("{}: {e}", path.display())))
}

pub fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Outcome<&'a T> {
    value.as_ref().ok_or_else(|| parse_error(format!("missing required flag {flag}")))
}

/// Raw JSON of `--function`: inline when it starts with `{` or `[`, a file
/// path otherwise.
fn function_json(arg: &str) -> Outcome<Value> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| parse_error(format!("--function: {e}")))
    } else {
        read_json(Path::new(arg))
    }
}

fn to_holo(v: Value) -> Outcome<HoloFn> {
    let spec: FunctionSpec = serde_json::from_value(v).map_err(|e| parse_error(format!("function spec: {e}")))?;
    Ok(HoloFn::try_from(&spec)?)
}

pub fn load_function(arg: &str) -> Outcome<HoloFn> {
    match function_json(arg)? {
        Value::Array(_) => Err(parse_error("expected a single function spec, got an array".into())),
        v => to_holo(v),
    }
}

/// A single spec or an array of specs.
pub fn load_family(arg: &str) -> Outcome<Vec<HoloFn>> {
    match function_json(arg)? {
        Value::Array(items) => items.into_iter().map(to_holo).collect(),
        v => Ok(vec![to_holo(v)?]),
    }
}

/// SHA-256 over the canonical JSON of the command, the shared flags (minus
/// the output path) and the contents of every input file.
pub fn config_hash(command: &Command, common: &Common, inputs: &[&Path]) -> Outcome<String> {
    let mut contents = Vec::with_capacity(inputs.len());
    for p in inputs {
        let bytes = fs::read(p).map_err(|e| io_error(format!("{}: {e}", p.display())))?;
        contents.push(format!("{:x}", Sha256::digest(&bytes)));
    }
    let canonical = json!({ "command": command, "common": common, "inputs": contents });
    Ok(format!("{:x}", Sha256::digest(canonical.to_string().as_bytes())))
}

pub struct Meta {
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

pub fn envelope(meta: &Meta, result: impl Serialize) -> Outcome<String> {
    let result = serde_json::to_value(result).map_err(|e| parse_error(format!("serializing report: {e}")))?;
    let doc = json!({
        "command": meta.command,
        "version": nritt::VERSION,
        "config_hash": meta.config_hash,
        "seed": meta.seed,
        "result": result,
    });
    serde_json::to_string_pretty(&doc)
        .map(|s| s + "\n")
        .map_err(|e| parse_error(format!("serializing report: {e}")))
}

pub fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_error(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
