use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use expander_ising::{Error, Result};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub subcommand: String,
    pub graph: String,
    pub lambda: Option<String>,
    pub q: Option<String>,
    pub beta: Option<f64>,
    pub mode_flags: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, graph: &str) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            graph: graph.to_string(),
            ..Default::default()
        }
    }

    pub fn flag(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("flag values serialize");
        self.mode_flags.insert(key.to_string(), value);
    }
}

fn io_error(path: &Path, err: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {err}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn json_text(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

pub fn write_tv_csv(path: &Path, curve: &[(u64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "tv"]).map_err(|e| io_error(path, e))?;
    for (t, tv) in curve {
        w.write_record([t.to_string(), format!("{tv:e}")]).map_err(|e| io_error(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| io_error(path, e))?;
    write_text(path, &String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Collects artifacts for an optional output directory and writes the
/// manifest last.
pub struct Artifacts {
    dir: Option<PathBuf>,
    pub manifest: RunManifest,
}

impl Artifacts {
    pub fn new(dir: Option<&str>, manifest: RunManifest) -> Self {
        Artifacts {
            dir: dir.map(PathBuf::from),
            manifest,
        }
    }

    pub fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        if let Some(path) = self.path(name) {
            write_text(&path, &json_text(value))?;
            self.manifest.outputs.push(path.display().to_string());
        }
        Ok(())
    }

    pub fn tv_csv(&mut self, name: &str, curve: &[(u64, f64)]) -> Result<()> {
        if let Some(path) = self.path(name) {
            write_tv_csv(&path, curve)?;
            self.manifest.outputs.push(path.display().to_string());
        }
        Ok(())
    }

    pub fn record(&mut self, path: &Path) {
        self.manifest.outputs.push(path.display().to_string());
    }

    pub fn finish(self, beside: Option<&Path>) -> Result<()> {
        let path = match (&self.dir, beside) {
            (Some(d), _) => d.join("manifest.json"),
            (None, Some(file)) => {
                let mut name = file.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
            (None, None) => return Ok(()),
        };
        write_text(&path, &json_text(&self.manifest))
    }
}
