//! Run manifests and report writing.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            config: Value::Null,
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<String>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn config(mut self, config: impl Serialize) -> Self {
        self.config = serde_json::to_value(config).expect("config serializes");
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Hash of everything but the timestamp.
pub fn content_hash(manifest: &RunManifest, body: &Value) -> String {
    let mut m = serde_json::to_value(manifest).expect("manifest serializes");
    m.as_object_mut().expect("manifest is an object").remove("timestamp");
    // serde_json maps are ordered, so this is canonical
    let text = serde_json::to_string(&json!({ "manifest": m, "body": body })).expect("value serializes");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `body` with `manifest` and `content_hash` fields added.
pub fn with_manifest(manifest: &RunManifest, body: impl Serialize) -> Value {
    let mut body = serde_json::to_value(body).expect("report serializes");
    let hash = content_hash(manifest, &body);
    let obj = body.as_object_mut().expect("reports are objects");
    obj.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    obj.insert("content_hash".into(), Value::String(hash));
    body
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path`, or stdout when absent.
pub fn emit_json(path: Option<&Path>, value: &Value) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{}", serde_json::to_string_pretty(value)?).context("writing to stdout")
        }
    }
}
