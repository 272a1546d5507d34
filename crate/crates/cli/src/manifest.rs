//! Run manifests written next to every output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use cedesign::Result;

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub struct Manifest {
    start: Instant,
    config: BTreeMap<String, String>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    notes: BTreeMap<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(config: &BTreeMap<String, String>) -> Self {
        Self {
            start: Instant::now(),
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, p: impl Into<PathBuf>) {
        self.inputs.push(p.into());
    }

    pub fn output(&mut self, p: impl Into<PathBuf>) {
        self.outputs.push(p.into());
    }

    pub fn note(&mut self, key: &str, v: serde_json::Value) {
        self.notes.insert(key.to_string(), v);
    }

    fn files(list: &[PathBuf]) -> Result<Vec<serde_json::Value>> {
        list.iter()
            .map(|p| {
                Ok(serde_json::json!({
                    "path": p.display().to_string(),
                    "sha256": sha256_file(p)?,
                }))
            })
            .collect()
    }

    /// Write `<primary>.manifest.json`.
    pub fn write(&self, primary: &Path) -> Result<PathBuf> {
        let seeds: BTreeMap<&String, &String> = self.config.iter().filter(|(k, _)| k.contains("seed")).collect();
        let doc = serde_json::json!({
            "command": self.config.get("command"),
            "config": self.config,
            "seeds": seeds,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "threads": rayon::current_num_threads(),
            "inputs": Self::files(&self.inputs)?,
            "outputs": Self::files(&self.outputs)?,
            "wall_clock_s": self.start.elapsed().as_secs_f64(),
            "notes": self.notes,
        });
        let mut path = primary.as_os_str().to_owned();
        path.push(".manifest.json");
        let path = PathBuf::from(path);
        let text = serde_json::to_string_pretty(&doc).map_err(|e| cedesign::Error::Format(e.to_string()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
