//! Run configuration: one TOML file, every field overridable by a flag.
//!
//! Sub-seeds for the split, LDA replicates, training and bootstrap are all
//! derived from the single global `seed`, and the resolved values are written
//! into every report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use topic_floor::classify::{BootstrapConfig, FeatureSpec, TrainHyper};
use topic_floor::corpus::{CorpusFormat, SplitSpec, TokenizerConfig};
use topic_floor::lda::LdaConfig;
use topic_floor::seed::derive_seed;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub corpus: CorpusSection,
    pub tokenizer: TokenizerConfig,
    pub split: SplitSection,
    pub lda: LdaConfig,
    pub sweep: SweepSection,
    pub mask: MaskSection,
    pub features: FeatureSpec,
    pub train: TrainHyper,
    pub bootstrap: BootstrapConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("out"),
            corpus: CorpusSection::default(),
            tokenizer: TokenizerConfig::default(),
            split: SplitSection::default(),
            lda: LdaConfig::default(),
            sweep: SweepSection::default(),
            mask: MaskSection::default(),
            features: FeatureSpec::default(),
            train: TrainHyper::default(),
            bootstrap: BootstrapConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub path: Option<PathBuf>,
    /// Inferred from the file extension when absent.
    pub format: Option<CorpusFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    /// `train,dev,test` as decimals, fractions or raw counts (`a:b:c`).
    pub ratio: String,
    /// Derived from the global seed.
    pub seed: u64,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            ratio: "0.8,0.1,0.1".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub ns: Vec<usize>,
    /// LDA chains per n; the curve is their mean.
    pub replicates: usize,
    pub jobs: usize,
    /// Derived from the global seed, one per replicate.
    pub seeds: Vec<u64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            ns: topic_floor::alignment::DEFAULT_SWEEP.to_vec(),
            replicates: 3,
            jobs: 1,
            seeds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskSection {
    /// Tag conversion table (`source<TAB>target`); the bundled STTS to UPOS
    /// table when absent.
    pub table: Option<PathBuf>,
}

impl RunConfig {
    /// Reads the optional config file and applies `key.path=value` overrides.
    /// Values are parsed as TOML, falling back to a bare string.
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self, CliError> {
        let (mut table, origin) = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
                let table: Table = toml::from_str(&text)
                    .map_err(|e| CliError::ConfigFile(path.to_path_buf(), e.to_string()))?;
                (table, path.to_path_buf())
            }
            None => (Table::new(), PathBuf::from("<defaults>")),
        };
        for set in sets {
            apply_override(&mut table, set)?;
        }
        Table::try_into(table).map_err(|e| CliError::ConfigFile(origin, e.to_string()))
    }

    /// Fills in every derived seed. Call after all overrides are applied.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let g = self.seed;
        self.split.seed = derive_seed(g, "split");
        self.lda.seed = derive_seed(g, "lda");
        self.sweep.seeds = (0..self.sweep.replicates)
            .map(|r| derive_seed(g, &format!("lda/replicate/{r}")))
            .collect();
        self.train.seed = derive_seed(g, "train");
        self.bootstrap.seed = derive_seed(g, "bootstrap");
        if self.sweep.replicates == 0 {
            return Err(CliError::Usage("sweep.replicates must be at least 1".into()));
        }
        if self.sweep.jobs == 0 {
            return Err(CliError::Usage("sweep.jobs must be at least 1".into()));
        }
        self.features.validate()?;
        self.lda.validate()?;
        self.split_spec()?;
        Ok(self)
    }

    pub fn split_spec(&self) -> Result<SplitSpec, CliError> {
        Ok(SplitSpec::parse(&self.split.ratio, self.split.seed)?)
    }

    pub fn corpus_format(&self, path: &Path) -> Result<CorpusFormat, CliError> {
        match self.corpus.format {
            Some(f) => Ok(f),
            None => Ok(CorpusFormat::from_path(path)?),
        }
    }
}

fn apply_override(table: &mut Table, set: &str) -> Result<(), CliError> {
    let (key, raw) = set
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got {set:?}")))?;
    let value = toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut node = table;
    for part in parents {
        node = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("--set {key}: {part:?} is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}
