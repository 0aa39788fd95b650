//! Output writers: CSV and JSON-lines files stamped with the config hash,
//! plus the human-readable summary (the only artifact carrying wall times).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Short hex digest of the raw config text; stamped into every output file.
pub fn config_hash(raw: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(raw.as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub struct OutputDir {
    root: PathBuf,
    hash: String,
}

impl OutputDir {
    pub fn create(root: &Path, hash: &str) -> anyhow::Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("creating output dir {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            hash: hash.to_string(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// CSV writer with the config-hash comment line and a header row.
    pub fn csv(&self, name: &str, columns: &[&str]) -> anyhow::Result<CsvWriter> {
        let path = self.path(name);
        let mut file = BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(file, "# config_hash={} schema=v1", self.hash)?;
        writeln!(file, "{}", columns.join(","))?;
        Ok(CsvWriter { file })
    }

    /// JSON-lines writer; the first record is a header with the hash.
    pub fn jsonl(&self, name: &str) -> anyhow::Result<JsonlWriter> {
        let path = self.path(name);
        let mut file = BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(
            file,
            "{}",
            serde_json::json!({"record": "header", "schema": "v1", "config_hash": self.hash})
        )?;
        Ok(JsonlWriter { file })
    }

    pub fn write_summary(&self, text: &str) -> anyhow::Result<()> {
        std::fs::write(self.path("summary.txt"), text)?;
        Ok(())
    }
}

pub struct CsvWriter {
    file: BufWriter<File>,
}

impl CsvWriter {
    pub fn row(&mut self, fields: &[String]) -> anyhow::Result<()> {
        writeln!(self.file, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.file.flush()?;
        Ok(())
    }
}

pub struct JsonlWriter {
    file: BufWriter<File>,
}

impl JsonlWriter {
    pub fn record(&mut self, kind: &str, payload: impl Serialize) -> anyhow::Result<()> {
        let mut value = serde_json::to_value(payload)?;
        if let serde_json::Value::Object(map) = &mut value {
            map.insert("record".into(), serde_json::Value::String(kind.into()));
            writeln!(self.file, "{}", serde_json::Value::Object(map.clone()))?;
        } else {
            writeln!(
                self.file,
                "{}",
                serde_json::json!({"record": kind, "value": value})
            )?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.file.flush()?;
        Ok(())
    }
}

/// Format a float with full round-trip precision (shortest representation).
pub fn fmt(v: f64) -> String {
    format!("{v}")
}
