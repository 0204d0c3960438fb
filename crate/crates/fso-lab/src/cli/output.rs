//! Run artifacts: manifest, line-delimited JSON records, and CSV tables
//! with a fixed column order. Files are written atomically
//! (write-temp-then-rename), and CSV bodies are byte-identical across
//! reruns of the same config and seed.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip an f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Hex prefix of the SHA-256 of the resolved config.
pub fn config_hash(canonical: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .ok_or_else(|| Error::Config(format!("no parent directory for {}", path.display())))?;
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// A CSV table with a fixed header; rows are preformatted strings.
#[derive(Debug, Clone)]
pub struct CsvTable {
    header: String,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            header: columns.join(","),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// The run manifest. The timestamp is informational and excluded from
/// reproducibility comparisons.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: &'static str,
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub crate_version: &'static str,
    pub probe_generator: &'static str,
    pub created_unix: u64,
}

impl Manifest {
    pub fn new(subcommand: &str, hash: &str, seed: u64) -> Self {
        Self {
            schema: "manifest/v1",
            subcommand: subcommand.to_string(),
            config_hash: hash.to_string(),
            seed,
            crate_version: env!("CARGO_PKG_VERSION"),
            probe_generator: crate::lab::PROBE_GENERATOR_ID,
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Where one run writes its artifacts.
#[derive(Debug, Clone)]
pub struct RunDirectory {
    pub root: PathBuf,
}

impl RunDirectory {
    pub fn new(output_dir: &str, subcommand: &str, hash: &str) -> Self {
        Self {
            root: PathBuf::from(output_dir).join(subcommand).join(hash),
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn records_path(&self) -> PathBuf {
        self.root.join("records.jsonl")
    }

    pub fn table_path(&self) -> PathBuf {
        self.root.join("table.csv")
    }

    pub fn extra_path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_manifest(&self, manifest: &Manifest) -> Result<()> {
        let mut text = serde_json::to_string_pretty(manifest)
            .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
        text.push('\n');
        write_atomic(&self.manifest_path(), text.as_bytes())
    }

    pub fn write_records(&self, records: &[serde_json::Value]) -> Result<()> {
        let mut text = String::new();
        for r in records {
            text.push_str(&r.to_string());
            text.push('\n');
        }
        write_atomic(&self.records_path(), text.as_bytes())
    }

    pub fn write_table(&self, table: &CsvTable) -> Result<()> {
        write_atomic(&self.table_path(), table.render().as_bytes())
    }
}

/// Wrap a record with its schema tag.
pub fn record(schema: &str, body: serde_json::Value) -> serde_json::Value {
    let mut obj = json!({ "schema": schema });
    if let (Some(target), Some(src)) = (obj.as_object_mut(), body.as_object()) {
        for (k, v) in src {
            target.insert(k.clone(), v.clone());
        }
    }
    obj
}
