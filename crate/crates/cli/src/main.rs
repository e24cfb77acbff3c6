//! `topic-floor`: audit a labeled corpus for topic signal that a classifier
//! could exploit instead of the target phenomenon.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 usage or configuration,
//! 3 i/o, 4 malformed input, 5 inconsistent inputs, 6 missing or unusable
//! annotations, 7 model fitting or training, 8 empty split.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topic_floor::corpus::CorpusFormat;

use config::RunConfig;
use error::{exit, CliError};

#[derive(Parser)]
#[command(name = "topic-floor", version, about = "Topic-floor audit for labeled text corpora")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override any configuration field, e.g. `--set lda.iterations=200`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Global seed; every component seed is derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports and artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CorpusArgs {
    /// Corpus file (`.jsonl` or `.tsv`).
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    format: Option<CorpusFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus and write it back as normalized JSONL.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratified train/dev/test split.
    Split {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// e.g. `0.8,0.1,0.1` or `29580:6336:6344`.
        #[arg(long)]
        ratio: Option<String>,
    },
    /// Sweep LDA topic counts and report the topic floor.
    TopicFloor {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Comma-separated topic counts.
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long)]
        replicates: Option<usize>,
        /// Worker threads for independent fits.
        #[arg(long)]
        jobs: Option<usize>,
        /// Extra curve point from an imported assignment, `name=path`.
        #[arg(long = "assignment")]
        assignments: Vec<String>,
    },
    /// Score an external topic assignment (e.g. BERTopic) against the labels.
    AssignImport {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        assignment: PathBuf,
        /// Also write the corpus relabeled by topic.
        #[arg(long)]
        relabel_out: Option<PathBuf>,
        /// Train and evaluate a classifier that predicts topics.
        #[arg(long)]
        classify: bool,
    },
    /// Replace named-entity spans with [LOC]/[PER]/[ORG] tags.
    MaskNe {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace every token with its POS tag.
    MaskPos {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map POS tags through a conversion table (default STTS to UPOS).
    ConvertTags {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train and evaluate; with --masked, the four-way masking matrix.
    TrainEval {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Masked variant of the same corpus.
        #[arg(long)]
        masked: Option<PathBuf>,
        #[arg(long)]
        ratio: Option<String>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Rank tokens by average attribution per class.
    Attribute {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Exact-match span scoring of NER predictions.
    NerEval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
}

fn apply_corpus(cfg: &mut RunConfig, args: CorpusArgs) {
    if args.corpus.is_some() {
        cfg.corpus.path = args.corpus;
    }
    if args.format.is_some() {
        cfg.corpus.format = args.format;
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.sets)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = cli.out_dir {
        cfg.output_dir = d;
    }
    match cli.command {
        Command::Ingest { corpus, out } => {
            apply_corpus(&mut cfg, corpus);
            commands::ingest(&cfg.resolve()?, out)
        }
        Command::Split { corpus, ratio } => {
            apply_corpus(&mut cfg, corpus);
            if let Some(r) = ratio {
                cfg.split.ratio = r;
            }
            commands::split(&cfg.resolve()?)
        }
        Command::TopicFloor {
            corpus,
            ns,
            replicates,
            jobs,
            assignments,
        } => {
            apply_corpus(&mut cfg, corpus);
            if let Some(ns) = ns {
                cfg.sweep.ns = ns;
            }
            if let Some(r) = replicates {
                cfg.sweep.replicates = r;
            }
            if let Some(j) = jobs {
                cfg.sweep.jobs = j;
            }
            commands::topic_floor(&cfg.resolve()?, &assignments)
        }
        Command::AssignImport {
            corpus,
            assignment,
            relabel_out,
            classify,
        } => {
            apply_corpus(&mut cfg, corpus);
            commands::assign_import(&cfg.resolve()?, &assignment, relabel_out, classify)
        }
        Command::MaskNe { corpus, out } => {
            apply_corpus(&mut cfg, corpus);
            commands::mask_ne_cmd(&cfg.resolve()?, out)
        }
        Command::MaskPos { corpus, out } => {
            apply_corpus(&mut cfg, corpus);
            commands::mask_pos_cmd(&cfg.resolve()?, out)
        }
        Command::ConvertTags { corpus, table, out } => {
            apply_corpus(&mut cfg, corpus);
            if table.is_some() {
                cfg.mask.table = table;
            }
            commands::convert_tags_cmd(&cfg.resolve()?, out)
        }
        Command::TrainEval {
            corpus,
            masked,
            ratio,
            epochs,
        } => {
            apply_corpus(&mut cfg, corpus);
            if let Some(r) = ratio {
                cfg.split.ratio = r;
            }
            if let Some(e) = epochs {
                cfg.train.epochs = e;
            }
            commands::train_eval(&cfg.resolve()?, masked)
        }
        Command::Attribute { model, test, k } => commands::attribute(&cfg.resolve()?, &model, &test, k),
        Command::NerEval { gold, pred } => commands::ner_eval(&cfg.resolve()?, &gold, &pred),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::from(exit::OK),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(exit::OTHER),
    }
}
