//! Run manifests and output files.
//!
//! A manifest records what a command read and how it was configured. Its
//! SHA-256 is written into every output so a result can be traced back to
//! the exact inputs that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<InputFile>,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    pub outputs: Vec<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            inputs: Vec::new(),
            config: json!({}),
            outputs: Vec::new(),
        }
    }

    /// Reads an input file and records its hash.
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes =
            fs::read(path).map_err(|e| CliError::NoInput(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputFile {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes)
            .map_err(|_| CliError::Data(format!("{}: not UTF-8 text", path.display())))
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("config values serialize");
        self.config
            .as_object_mut()
            .expect("config is an object")
            .insert(key.to_string(), value);
    }

    pub fn output(&mut self, path: Option<&PathBuf>) {
        if let Some(p) = path {
            self.outputs.push(p.clone());
        }
    }

    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("manifest serializes"))
    }

    /// `{"manifest_hash", "manifest", key: payload}`.
    pub fn wrap(&self, key: &str, payload: Value) -> Value {
        json!({
            "manifest_hash": self.hash(),
            "manifest": self,
            key: payload,
        })
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes pretty JSON to `path`, or to stdout when no path is given.
pub fn emit_json(path: Option<&PathBuf>, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    match path {
        Some(p) => write_bytes(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes CSV produced by `body`, prefixed with a comment line carrying
/// the manifest hash. Every data row must have as many fields as the
/// header.
pub fn emit_csv<F>(path: &Path, manifest_hash: &str, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = format!("# manifest_hash={manifest_hash}\n").into_bytes();
    body(&mut buf).map_err(|e| CliError::Output(e.to_string()))?;
    validate_csv(&buf).map_err(CliError::Internal)?;
    write_bytes(path, &buf)
}

pub fn write_binary(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_bytes(path, bytes)
}

fn validate_csv(bytes: &[u8]) -> Result<(), String> {
    let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header = rows.next().ok_or("CSV without header")?;
    let width = header.split(',').count();
    for (i, row) in rows.enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != width {
            return Err(format!(
                "CSV row {} has {} fields, expected {width}",
                i + 1,
                fields.len()
            ));
        }
        if fields.iter().skip(1).any(|f| f.parse::<f64>().is_err()) {
            return Err(format!("CSV row {} has a non-numeric field", i + 1));
        }
    }
    Ok(())
}

/// Every report must carry the fields scripts rely on.
pub fn validate_reports(reports: &Value) -> Result<(), String> {
    const KEYS: [&str; 7] = [
        "check",
        "lhs",
        "rhs",
        "margin",
        "tolerance",
        "verdict",
        "provenance",
    ];
    let list = reports.as_array().ok_or("reports must be an array")?;
    for r in list {
        for key in KEYS {
            if r.get(key).is_none() {
                return Err(format!("report lacks field {key}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let mut a = RunManifest::new("solve");
        a.set("h", 0.0078125);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        b.set("h", 0.015625);
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_validation() {
        assert!(validate_csv(b"# h\nx,y,v\n1,2,3\n").is_ok());
        assert!(validate_csv(b"x,y,v\n1,2\n").is_err());
        assert!(validate_csv(b"x,y,v\n1,2,nope\n").is_err());
        assert!(validate_csv(b"").is_err());
    }

    #[test]
    fn report_validation() {
        assert!(validate_reports(&json!([])).is_ok());
        assert!(validate_reports(&json!([{"check": "sign"}])).is_err());
        assert!(validate_reports(&json!({})).is_err());
    }
}
