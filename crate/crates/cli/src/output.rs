//! Output directory handling: atomic writes, provenance headers, manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use telic::Base;

use crate::config::LoadedConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST: &str = "manifest.json";

/// Everything an output file needs to say where it came from.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: &'static str,
    pub seed: u64,
    pub base: Base,
    pub config: Value,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(command: &'static str, seed: u64, base: Base, cfg: &LoadedConfig) -> Self {
        Self {
            command,
            seed,
            base,
            config: cfg.json.clone(),
            config_sha256: cfg.sha256(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub base: Base,
    pub wall_time_seconds: f64,
    /// Every file written by the run, including this manifest.
    pub files: Vec<String>,
}

pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
    started: Instant,
    pub provenance: Provenance,
}

impl OutputDir {
    pub fn create(root: &Path, provenance: Provenance) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
            provenance,
        })
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).context("creating temporary file")?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
        }
        let path = self.root.join(name);
        tmp.persist(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }

    /// JSON wrapped with the config, seed, base and version.
    pub fn write_json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<()> {
        let p = &self.provenance;
        let doc = json!({
            "tool": "telic",
            "version": VERSION,
            "command": p.command,
            "seed": p.seed,
            "base": p.base,
            "config_sha256": p.config_sha256,
            "config": p.config,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// CSV preceded by `#` comment lines carrying the provenance.
    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let p = &self.provenance;
        let mut buf = Vec::new();
        writeln!(buf, "# telic {VERSION} {}", p.command)?;
        writeln!(buf, "# seed: {}", p.seed)?;
        writeln!(buf, "# base: {}", p.base)?;
        writeln!(buf, "# config_sha256: {}", p.config_sha256)?;
        writeln!(buf, "# config: {}", serde_json::to_string(&p.config)?)?;
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        self.write(name, &buf)
    }

    pub fn write_svg(&mut self, name: &str, svg: String) -> Result<()> {
        self.write(name, svg.as_bytes())
    }

    /// Writes the manifest last, listing itself.
    pub fn finish(mut self) -> Result<RunManifest> {
        let mut files = self.files.clone();
        files.push(MANIFEST.to_string());
        files.sort();
        files.dedup();
        let p = &self.provenance;
        let manifest = RunManifest {
            tool: "telic",
            version: VERSION,
            command: p.command,
            config_sha256: p.config_sha256.clone(),
            seed: p.seed,
            base: p.base,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.write(MANIFEST, text.as_bytes())?;
        Ok(manifest)
    }
}

/// Shortest round-trip form, `""` for `None`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
