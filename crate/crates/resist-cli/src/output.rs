//! Output directory with a manifest of every written file.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    seed: u64,
    config: &'a C,
    files: &'a [FileEntry],
}

pub const MANIFEST: &str = "manifest.json";

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, name: &str, content: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let content = content.as_ref();
        let path = self.dir.join(name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileEntry {
            path: name.to_string(),
            bytes: content.len(),
            sha256: hex::encode(Sha256::digest(content)),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        self.write(name, text + "\n")
    }

    /// Writes `manifest.json`, which lists every other file.
    pub fn finish<C: Serialize>(self, command: &str, seed: u64, config: &C) -> Result<Vec<FileEntry>, CliError> {
        let m = Manifest {
            command,
            seed,
            config,
            files: &self.files,
        };
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Runtime(e.to_string()))?;
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, text + "\n")
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Ok(self.files)
    }
}
