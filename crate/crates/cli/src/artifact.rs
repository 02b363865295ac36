//! Artifact envelope: every JSON file written by the tool carries a `meta`
//! object with the tool version, the parameters of the run and the SHA-256
//! of each input file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const META_VERSION: u32 = 1;

pub struct Run {
    out: PathBuf,
    deterministic: bool,
    command: &'static str,
    parameters: Value,
    input_hashes: BTreeMap<String, String>,
}

impl Run {
    pub fn new(out: PathBuf, deterministic: bool, command: &'static str, parameters: Value) -> Self {
        Self {
            out,
            deterministic,
            command,
            parameters,
            input_hashes: BTreeMap::new(),
        }
    }

    /// Reads a JSON input, records its hash and drops any `meta` object
    /// before deserializing.
    pub fn read<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        self.input_hashes
            .insert(path.display().to_string(), format!("{:x}", Sha256::digest(&bytes)));
        let mut value: Value = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let Value::Object(map) = &mut value {
            map.remove("meta");
        }
        serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn meta(&self) -> Value {
        let mut meta = json!({
            "meta_version": META_VERSION,
            "tool": "l22embed",
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "parameters": self.parameters,
            "input_hashes": self.input_hashes,
        });
        if !self.deterministic {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            meta["timestamp_unix"] = json!(secs);
        }
        meta
    }

    /// Serializes `value` with the `meta` envelope into `<out>/<name>` and
    /// returns the text written.
    pub fn write<T: Serialize>(&self, name: &str, value: &T) -> Result<String, CliError> {
        let mut v = serde_json::to_value(value).map_err(|e| CliError::Usage(e.to_string()))?;
        match &mut v {
            Value::Object(map) => {
                map.insert("meta".into(), self.meta());
            }
            other => {
                let mut map = Map::new();
                map.insert("value".into(), other.take());
                map.insert("meta".into(), self.meta());
                v = Value::Object(map);
            }
        }
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Usage(e.to_string()))?;
        text.push('\n');
        self.write_raw(name, &text)?;
        Ok(text)
    }

    /// One JSON document per line, without the envelope.
    pub fn write_lines<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut text = String::new();
        for row in rows {
            text.push_str(&serde_json::to_string(row).map_err(|e| CliError::Usage(e.to_string()))?);
            text.push('\n');
        }
        self.write_raw(name, &text)
    }

    fn write_raw(&self, name: &str, text: &str) -> Result<(), CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::Usage(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        fs::write(&path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}
