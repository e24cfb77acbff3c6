//! Provenance for emitted artifacts: content hashes and the JSON envelope
//! every report is wrapped in.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// A report body plus the configuration and input hashes that produced it.
/// Contains nothing time-dependent, so identical runs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub inputs: BTreeMap<String, String>,
    pub result: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, config: &'a C, inputs: BTreeMap<String, String>, result: &'a R) -> Self {
        Self {
            tool: "topic-floor",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Hashes each named input file.
pub fn hash_inputs<'p, I>(inputs: I) -> Result<BTreeMap<String, String>>
where
    I: IntoIterator<Item = (&'p str, &'p Path)>,
{
    inputs
        .into_iter()
        .map(|(name, path)| Ok((name.to_string(), file_sha256(path)?)))
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn envelope_is_stable() {
        let cfg = BTreeMap::from([("seed", 1)]);
        let body = vec![0.5];
        let e = Envelope::new("x", &cfg, BTreeMap::new(), &body);
        assert_eq!(e.to_json(), e.to_json());
        assert!(e.to_json().contains("\"command\": \"x\""));
    }
}
