use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

/// `<out>/{graphs,docs,links,posts,pathdb,reports}` plus `manifest.json`.
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn graphs(&self) -> PathBuf {
        self.dir("graphs")
    }

    pub fn reports(&self) -> PathBuf {
        self.dir("reports")
    }

    pub fn default_doc_index(&self) -> PathBuf {
        self.dir("docs").join("index.jsonl")
    }

    pub fn imports_report(&self) -> PathBuf {
        self.reports().join("imports.json")
    }

    /// Records this command's configuration, keeping entries of other
    /// commands.
    pub fn record_manifest(&self, command: &str, config: &RunConfig) -> Result<(), CliError> {
        let path = self.root.join("manifest.json");
        let mut commands: BTreeMap<String, Value> = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str::<Value>(&text)
                .ok()
                .and_then(|v| v.get("commands").cloned())
                .and_then(|c| serde_json::from_value(c).ok())
                .unwrap_or_default(),
            Err(_) => BTreeMap::new(),
        };
        commands.insert(command.to_owned(), serde_json::to_value(config).expect("config serializes"));
        let manifest = serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "commands": commands,
        });
        write_json(&path, &manifest)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_text(path, &text)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut text = String::new();
    for r in rows {
        text.push_str(&serde_json::to_string(&r).expect("rows serialize"));
        text.push('\n');
    }
    write_text(path, &text)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(CliError::io(path))
}
