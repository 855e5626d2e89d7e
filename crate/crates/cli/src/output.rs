//! Output directory handling and the CSV/JSON writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Output directory that refuses to replace existing files unless forced.
pub struct Outputs {
    dir: PathBuf,
    force: bool,
}

impl Outputs {
    pub fn new(dir: &Path, force: bool) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            force,
        }
    }

    /// Fails before any work is done if a target already exists.
    pub fn reserve(&self, names: &[&str]) -> Result<(), CliError> {
        if !self.force {
            for name in names {
                let path = self.dir.join(name);
                if path.exists() {
                    return Err(CliError::Exists(path));
                }
            }
        }
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::io(format!("creating {}", self.dir.display()), e))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let context = || format!("writing {}", path.display());
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(context(), e.into()))?;
        w.write_record(header).map_err(|e| CliError::io(context(), e.into()))?;
        for row in rows {
            w.write_record(row).map_err(|e| CliError::io(context(), e.into()))?;
        }
        w.flush().map_err(|e| CliError::io(context(), e))?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
        Ok(path)
    }
}

pub fn flag(noisy: bool) -> String {
    u8::from(noisy).to_string()
}
