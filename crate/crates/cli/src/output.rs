//! Report writing. Reports are byte-stable for identical runs; the only
//! time-dependent value goes to a `.meta.json` sidecar.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use topic_floor::report::{hash_inputs, write_file, Envelope};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct Outputs {
    dir: PathBuf,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        write_file(&path, contents)?;
        Ok(path)
    }

    /// Writes `<name>.json` wrapped in the provenance envelope.
    pub fn report<R: Serialize>(
        &self,
        name: &str,
        command: &str,
        config: &RunConfig,
        inputs: &[(&str, &Path)],
        result: &R,
    ) -> Result<PathBuf, CliError> {
        let hashes: BTreeMap<String, String> = hash_inputs(inputs.iter().copied())?;
        let json = Envelope::new(command, config, hashes, result).to_json();
        let path = self.write(&format!("{name}.json"), &json)?;
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = serde_json::json!({ "report": format!("{name}.json"), "created_unix_s": created });
        self.write(&format!("{name}.meta.json"), &format!("{meta:#}\n"))?;
        Ok(path)
    }
}
