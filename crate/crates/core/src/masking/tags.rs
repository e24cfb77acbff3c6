use std::collections::BTreeMap;
use std::path::Path;

use crate::{Error, Result};

const STTS_UPOS: &str = include_str!("stts_upos.tsv");

/// Source tag to target tag mapping, read from two-column TSV.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagConversionTable {
    map: BTreeMap<String, String>,
}

impl TagConversionTable {
    /// STTS/TIGER to Universal POS, following the UD tagset-conversion table.
    pub fn stts_to_upos() -> Self {
        Self::from_tsv_str(STTS_UPOS).expect("bundled table parses")
    }

    pub fn identity<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            map: tags
                .into_iter()
                .map(|t| {
                    let t = t.into();
                    (t.clone(), t)
                })
                .collect(),
        }
    }

    pub fn from_tsv_str(input: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (src, dst) = line.split_once('\t').ok_or_else(|| {
                Error::Format(format!("conversion table line {}: expected two columns", lineno + 1))
            })?;
            if dst.contains('\t') || src.is_empty() || dst.is_empty() {
                return Err(Error::Format(format!(
                    "conversion table line {}: expected two non-empty columns",
                    lineno + 1
                )));
            }
            if map.insert(src.to_string(), dst.to_string()).is_some() {
                return Err(Error::Format(format!("conversion table repeats tag {src:?}")));
            }
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv_str(&text)
    }

    pub fn get(&self, tag: &str) -> Option<&str> {
        self.map.get(tag).map(String::as_str)
    }

    pub fn convert(&self, tag: &str) -> Result<String> {
        self.get(tag)
            .map(str::to_string)
            .ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    pub fn convert_all(&self, tags: &[String]) -> Result<Vec<String>> {
        tags.iter().map(|t| self.convert(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_rows() {
        let t = TagConversionTable::stts_to_upos();
        assert_eq!(t.convert("APPO").unwrap(), "ADP");
        assert_eq!(t.convert("PRELS").unwrap(), "PRON");
        assert_eq!(t.convert("KOUI").unwrap(), "SCONJ");
        assert_eq!(t.convert("PPOSAT").unwrap(), "DET");
        assert_eq!(t.convert("TRUNC").unwrap(), "X");
        assert_eq!(t.convert("PROAV").unwrap(), "ADV");
        assert_eq!(t.convert("PTKANT").unwrap(), "PART");
        assert!(matches!(t.convert("NOPE"), Err(Error::UnknownTag(_))));
    }

    #[test]
    fn malformed_tables() {
        assert!(TagConversionTable::from_tsv_str("A\tB\tC\n").is_err());
        assert!(TagConversionTable::from_tsv_str("A B\n").is_err());
        assert!(TagConversionTable::from_tsv_str("A\tB\nA\tC\n").is_err());
    }
}
