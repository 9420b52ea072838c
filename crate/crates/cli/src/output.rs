//! Output directories: fields, JSON reports and the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use conevortex::torus::{cvf, Backend, ComplexField, RealField};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    /// SHA-256 of the effective configuration (after overrides, without `out_dir`).
    pub config_sha256: String,
    pub seed: u64,
    pub backend: Backend,
    pub files: &'a [String],
}

pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

fn io(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| io(root, e))?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    fn target(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.root.join(name)
    }

    pub fn real(&mut self, name: &str, field: &RealField) -> Result<(), Failure> {
        let p = self.target(name);
        cvf::save_real(&p, field).map_err(|e| io(&p, e))
    }

    pub fn complex(&mut self, name: &str, field: &ComplexField) -> Result<(), Failure> {
        let p = self.target(name);
        cvf::save_complex(&p, field).map_err(|e| io(&p, e))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let p = self.target(name);
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| io(&p, e))?;
        bytes.push(b'\n');
        fs::write(&p, bytes).map_err(|e| io(&p, e))
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        let p = self.target(name);
        fs::write(&p, body).map_err(|e| io(&p, e))
    }

    /// Writes `manifest.json` listing every file produced so far.
    pub fn finish<C: Serialize>(
        mut self,
        subcommand: &str,
        config: &C,
        seed: u64,
        backend: Backend,
    ) -> Result<(), Failure> {
        self.files.sort();
        let canonical = serde_json::to_vec(config).expect("config serializes");
        let manifest = Manifest {
            tool: "conevortex",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            config_sha256: hex::encode(Sha256::digest(&canonical)),
            seed,
            backend,
            files: &self.files,
        };
        let p = self.root.join("manifest.json");
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| io(&p, e))?;
        bytes.push(b'\n');
        fs::write(&p, bytes).map_err(|e| io(&p, e))
    }
}
