//! Run directories, hashing and manifests.

use std::fs;
use std::path::{Path, PathBuf};

use crossdiff::config::RunConfig;
use crossdiff::{Error, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Common;

/// Hex digits of the hash used in directory names.
const DIR_HASH_LEN: usize = 16;

/// serde_json's default map is ordered, so this text is canonical.
pub fn canonical(value: &Value) -> String {
    value.to_string()
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Load the configuration and apply command-line overrides.
pub fn load_config(common: &Common) -> Result<RunConfig> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::invalid("config", "--config PATH is required for this command"))?;
    let text = fs::read_to_string(path).map_err(|e| Error::invalid("config", format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(eps) = &common.epsilons {
        cfg.sweep.epsilons = eps.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

pub struct RunDir {
    pub path: PathBuf,
    pub hash: String,
    command: String,
    resolved: Value,
    outputs: Vec<String>,
}

impl RunDir {
    /// Create `<out>/<hash>` for `command` with the given resolved inputs.
    pub fn create(common: &Common, command: &str, resolved: Value, default_parent: Option<&str>) -> Result<Self> {
        let hash = sha256_hex(&canonical(&json!({ "command": command, "inputs": resolved })));
        let parent = common
            .out
            .clone()
            .or_else(|| default_parent.map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("runs"));
        let path = parent.join(&hash[..DIR_HASH_LEN]);
        fs::create_dir_all(&path)?;
        Ok(Self {
            path,
            hash,
            command: command.to_string(),
            resolved,
            outputs: Vec::new(),
        })
    }

    pub fn file(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.path.join(name)
    }

    /// Pretty JSON with sorted keys.
    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let path = self.file(name);
        write_json(&path, value)
    }

    pub fn finish(mut self, quiet: bool, summary: &str) -> Result<()> {
        self.outputs.sort();
        let mut manifest = json!({
            "command": self.command,
            "config_hash": self.hash,
            "version": env!("CARGO_PKG_VERSION"),
            "outputs": self.outputs,
        });
        let m = manifest.as_object_mut().unwrap();
        // `config` lets the manifest be passed back as --config
        match self.resolved.get("config") {
            Some(cfg) => {
                m.insert("config".into(), cfg.clone());
                m.insert("inputs".into(), self.resolved.clone());
            }
            None => {
                m.insert("inputs".into(), self.resolved.clone());
            }
        }
        write_json(&self.path.join("manifest.json"), &manifest)?;
        if !quiet {
            println!("{}", self.path.display());
            if !summary.is_empty() {
                println!("{summary}");
            }
        }
        Ok(())
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
