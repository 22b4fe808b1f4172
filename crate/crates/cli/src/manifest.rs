//! Run manifests: every output directory records how it was produced.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    /// Arguments as given, with defaults filled in.
    pub params: serde_json::Value,
    /// Values derived from the arguments, such as automatic neighbour counts.
    pub resolved: serde_json::Value,
    /// Output file names relative to the manifest.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new<P: Serialize>(subcommand: &str, seed: Option<u64>, params: &P) -> Result<Self> {
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            seed,
            params: serde_json::to_value(params)?,
            resolved: serde_json::Value::Object(Default::default()),
            outputs: Vec::new(),
        })
    }

    pub fn resolve<V: Serialize>(&mut self, key: &str, value: V) -> Result<()> {
        if let serde_json::Value::Object(m) = &mut self.resolved {
            m.insert(key.to_string(), serde_json::to_value(value)?);
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        self.write_as(dir, &self.subcommand)
    }

    /// Writes `{stem}_manifest.json`.
    pub fn write_as(&self, dir: &Path, stem: &str) -> Result<()> {
        io::write_json(dir, &format!("{stem}_manifest.json"), self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a valid manifest", path.display()))
    }
}
