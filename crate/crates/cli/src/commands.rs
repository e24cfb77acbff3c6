use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use topic_floor::alignment::{score_assignment, topic_floor_sweep, AlignmentReport, SweepConfig};
use topic_floor::attribution::top_attributions;
use topic_floor::classify::{
    evaluate, majority_baseline, majority_transfer_baseline, run_matrix, topic_classification, train,
    EvalResult, LinearModel, MatrixReport, TopicClassification,
};
use topic_floor::corpus::{load_corpus, split_corpus, Corpus};
use topic_floor::eval_ner::{score_ner, NerReport, SpanSet};
use topic_floor::lda::import_assignment;
use topic_floor::masking::{convert_tags, count_tag_tokens, mask_ne, mask_pos, TagConversionTable};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Outputs;

type Res<T = ()> = Result<T, CliError>;

fn corpus_path(cfg: &RunConfig) -> Res<PathBuf> {
    cfg.corpus
        .path
        .clone()
        .ok_or_else(|| CliError::Usage("no corpus given (--corpus or corpus.path)".into()))
}

fn load(cfg: &RunConfig, path: &Path) -> Res<Corpus> {
    Ok(load_corpus(path, cfg.corpus_format(path)?, cfg.tokenizer)?)
}

/// Like [`load`] but infers the format from the extension, for secondary inputs.
fn load_other(cfg: &RunConfig, path: &Path) -> Res<Corpus> {
    let format = topic_floor::corpus::CorpusFormat::from_path(path)?;
    Ok(load_corpus(path, format, cfg.tokenizer)?)
}

#[derive(Serialize)]
struct CorpusSummary {
    documents: usize,
    tokens: usize,
    labels: BTreeMap<String, usize>,
    with_ne_spans: usize,
    ne_spans: usize,
    with_pos_tags: usize,
    majority_baseline: f64,
}

fn summarize(c: &Corpus) -> CorpusSummary {
    let docs = c.documents();
    CorpusSummary {
        documents: c.len(),
        tokens: c.token_count(),
        labels: c.label_counts().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        with_ne_spans: docs.iter().filter(|d| d.ne_spans.is_some()).count(),
        ne_spans: docs.iter().filter_map(|d| d.ne_spans.as_ref()).map(Vec::len).sum(),
        with_pos_tags: docs.iter().filter(|d| d.pos_tags.is_some()).count(),
        majority_baseline: majority_baseline(c),
    }
}

pub fn ingest(cfg: &RunConfig, out: Option<PathBuf>) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let outputs = Outputs::create(&cfg.output_dir)?;
    let target = out.unwrap_or_else(|| outputs.path("corpus.jsonl"));
    corpus.write_jsonl(&target)?;
    let summary = summarize(&corpus);
    outputs.report("ingest", "ingest", cfg, &[("corpus", &path)], &summary)?;
    println!(
        "{} documents, {} tokens, labels {:?} -> {}",
        summary.documents,
        summary.tokens,
        summary.labels,
        target.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SplitSummary {
    train: CorpusSummary,
    dev: CorpusSummary,
    test: CorpusSummary,
}

pub fn split(cfg: &RunConfig) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let (train_c, dev_c, test_c) = split_corpus(&corpus, &cfg.split_spec()?)?;
    let outputs = Outputs::create(&cfg.output_dir)?;
    for (name, part) in [("train", &train_c), ("dev", &dev_c), ("test", &test_c)] {
        part.write_jsonl(&outputs.path(&format!("{name}.jsonl")))?;
    }
    let summary = SplitSummary {
        train: summarize(&train_c),
        dev: summarize(&dev_c),
        test: summarize(&test_c),
    };
    outputs.report("split", "split", cfg, &[("corpus", &path)], &summary)?;
    println!(
        "train {} / dev {} / test {} -> {}",
        train_c.len(),
        dev_c.len(),
        test_c.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct FloorSummary<'a> {
    floor: f64,
    floor_source: &'a str,
    floor_n: usize,
    majority_baseline: f64,
    delta: f64,
    recommendation: String,
    sweep: &'a topic_floor::alignment::TopicFloor,
}

/// Parses `name=path`, or a bare path named after its file stem.
fn named_path(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((name, path)) if !name.is_empty() => (name.to_string(), PathBuf::from(path)),
        _ => {
            let p = PathBuf::from(spec);
            let name = p.file_stem().map_or("external".into(), |s| s.to_string_lossy().into_owned());
            (name, p)
        }
    }
}

pub fn topic_floor(cfg: &RunConfig, assignments: &[String]) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let sweep_cfg = SweepConfig {
        ns: cfg.sweep.ns.clone(),
        seeds: cfg.sweep.seeds.clone(),
        template: cfg.lda.clone(),
        jobs: cfg.sweep.jobs,
    };
    let mut floor = topic_floor_sweep(&corpus, &sweep_cfg)?;
    let named: Vec<(String, PathBuf)> = assignments.iter().map(|a| named_path(a)).collect();
    for (name, p) in &named {
        let a = import_assignment(p, &corpus)?;
        floor.add_external(name, &corpus, &a)?;
    }
    let outputs = Outputs::create(&cfg.output_dir)?;
    outputs.write("curve.csv", &floor.curve_csv())?;
    let summary = FloorSummary {
        floor: floor.floor.avg_align,
        floor_source: &floor.floor.source,
        floor_n: floor.floor.n,
        majority_baseline: floor.majority_baseline,
        delta: floor.delta,
        recommendation: format!(
            "A classifier on this corpus should beat {:.4} accuracy (topic floor, {} at n = {}) rather than the majority baseline {:.4}.",
            floor.floor.avg_align, floor.floor.source, floor.floor.n, floor.majority_baseline
        ),
        sweep: &floor,
    };
    let mut inputs: Vec<(&str, &Path)> = vec![("corpus", &path)];
    inputs.extend(named.iter().map(|(n, p)| (n.as_str(), p.as_path())));
    outputs.report("topic_floor", "topic-floor", cfg, &inputs, &summary)?;
    for p in floor.curve.iter().chain(floor.external.iter().map(|(p, _)| p)) {
        println!("{:>10} n={:<4} avg_align {:.4}", p.source, p.n, p.avg_align);
    }
    println!(
        "topic floor {:.4} ({} n={}), majority baseline {:.4}, delta {:+.4}",
        summary.floor, summary.floor_source, summary.floor_n, summary.majority_baseline, summary.delta
    );
    Ok(())
}

#[derive(Serialize)]
struct ImportSummary {
    n_topics: usize,
    outlier_topic: Option<usize>,
    alignment: AlignmentReport,
    classification: Option<TopicClassification>,
}

pub fn assign_import(cfg: &RunConfig, assignment: &Path, relabel_out: Option<PathBuf>, classify: bool) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let a = import_assignment(assignment, &corpus)?;
    let alignment = score_assignment(&corpus, &a)?;
    if let Some(out) = &relabel_out {
        a.relabel(&corpus)?.write_jsonl(out)?;
    }
    let classification = if classify {
        Some(topic_classification(
            &corpus,
            &a,
            &cfg.split_spec()?,
            &cfg.features,
            &cfg.train,
            &cfg.bootstrap,
        )?)
    } else {
        None
    };
    println!("{} topics, avg_align {:.4}", alignment.n_topics, alignment.value());
    if let Some(tc) = &classification {
        println!(
            "topic classification accuracy {:.4} [{:.4}, {:.4}], majority {:.4}, train-majority {:.4}",
            tc.result.accuracy, tc.result.ci_low, tc.result.ci_high, tc.majority_baseline, tc.train_majority_baseline
        );
    }
    let summary = ImportSummary {
        n_topics: a.n_topics,
        outlier_topic: a.outlier_topic,
        alignment,
        classification,
    };
    let outputs = Outputs::create(&cfg.output_dir)?;
    outputs.report(
        "assignment",
        "assign-import",
        cfg,
        &[("corpus", &path), ("assignment", assignment)],
        &summary,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct MaskSummary {
    documents: usize,
    tokens_before: usize,
    tokens_after: usize,
    tag_tokens: usize,
}

fn write_masked(cfg: &RunConfig, command: &str, input: &Path, before: &Corpus, after: &Corpus, out: Option<PathBuf>, default: &str) -> Res {
    let outputs = Outputs::create(&cfg.output_dir)?;
    let target = out.unwrap_or_else(|| outputs.path(default));
    after.write_jsonl(&target)?;
    let summary = MaskSummary {
        documents: after.len(),
        tokens_before: before.token_count(),
        tokens_after: after.token_count(),
        tag_tokens: count_tag_tokens(after),
    };
    let name = command.replace('-', "_");
    outputs.report(&name, command, cfg, &[("corpus", input)], &summary)?;
    println!(
        "{} documents, {} -> {} tokens ({} tags) -> {}",
        summary.documents,
        summary.tokens_before,
        summary.tokens_after,
        summary.tag_tokens,
        target.display()
    );
    Ok(())
}

pub fn mask_ne_cmd(cfg: &RunConfig, out: Option<PathBuf>) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let masked = mask_ne(&corpus)?;
    write_masked(cfg, "mask-ne", &path, &corpus, &masked, out, "masked_ne.jsonl")
}

pub fn mask_pos_cmd(cfg: &RunConfig, out: Option<PathBuf>) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let masked = mask_pos(&corpus)?;
    write_masked(cfg, "mask-pos", &path, &corpus, &masked, out, "masked_pos.jsonl")
}

pub fn convert_tags_cmd(cfg: &RunConfig, out: Option<PathBuf>) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let table = match &cfg.mask.table {
        Some(t) => TagConversionTable::load(t)?,
        None => TagConversionTable::stts_to_upos(),
    };
    let converted = convert_tags(&corpus, &table)?;
    write_masked(cfg, "convert-tags", &path, &corpus, &converted, out, "converted.jsonl")
}

#[derive(Serialize)]
struct TrainEvalSummary {
    train_size: usize,
    test_size: usize,
    majority_baseline: f64,
    train_majority_baseline: f64,
    matrix: MatrixReport,
}

pub fn train_eval(cfg: &RunConfig, masked: Option<PathBuf>) -> Res {
    let path = corpus_path(cfg)?;
    let corpus = load(cfg, &path)?;
    let spec = cfg.split_spec()?;
    let (train_u, _, test_u) = split_corpus(&corpus, &spec)?;
    let outputs = Outputs::create(&cfg.output_dir)?;
    let mut inputs: Vec<(&str, &Path)> = vec![("corpus", &path)];
    let matrix = match &masked {
        Some(mpath) => {
            let masked_c = load_other(cfg, mpath)?;
            let (train_m, _, test_m) = split_corpus(&masked_c, &spec)?;
            let out = run_matrix(&train_u, &train_m, &test_u, &test_m, &cfg.features, &cfg.train, &cfg.bootstrap)?;
            outputs.write("model_unmasked.json", &out.unmasked_model.to_json())?;
            outputs.write("model_masked.json", &out.masked_model.to_json())?;
            inputs.push(("masked", mpath));
            out.report
        }
        None => {
            let model = train(&train_u, &cfg.features, &cfg.train)?;
            outputs.write("model_unmasked.json", &model.to_json())?;
            let r: EvalResult = evaluate(&model, &test_u, &cfg.bootstrap, "u-u")?;
            MatrixReport {
                results: vec![r],
                masking_delta: f64::NAN,
                non_overlapping_with_uu: Vec::new(),
            }
        }
    };
    outputs.write("matrix.csv", &matrix.to_csv())?;
    for r in &matrix.results {
        println!("{}  accuracy {:.4}  95% CI [{:.4}, {:.4}]  n={}", r.config_name, r.accuracy, r.ci_low, r.ci_high, r.n_test);
    }
    if masked.is_some() {
        println!("masking delta (u-u - m-m) {:+.4}", matrix.masking_delta);
    }
    let summary = TrainEvalSummary {
        train_size: train_u.len(),
        test_size: test_u.len(),
        majority_baseline: majority_baseline(&test_u),
        train_majority_baseline: majority_transfer_baseline(&train_u, &test_u),
        matrix,
    };
    outputs.report("train_eval", "train-eval", cfg, &inputs, &summary)?;
    Ok(())
}

pub fn attribute(cfg: &RunConfig, model_path: &Path, test_path: &Path, k: usize) -> Res {
    let text = std::fs::read_to_string(model_path).map_err(|e| CliError::Io(model_path.to_path_buf(), e))?;
    let model = LinearModel::from_json(&text)?;
    let test = load_other(cfg, test_path)?;
    let report = top_attributions(&model, &test, k)?;
    let outputs = Outputs::create(&cfg.output_dir)?;
    outputs.write("attributions.csv", &report.to_csv())?;
    outputs.report(
        "attributions",
        "attribute",
        cfg,
        &[("model", model_path), ("test", test_path)],
        &report,
    )?;
    for c in &report.classes {
        let top: Vec<String> = c.rows.iter().take(5).map(|r| format!("{} ({:.4})", r.token, r.score)).collect();
        println!("{}: {}", c.label, top.join(", "));
    }
    Ok(())
}

pub fn ner_eval(cfg: &RunConfig, gold: &Path, pred: &Path) -> Res {
    let report: NerReport = score_ner(&SpanSet::load(gold)?, &SpanSet::load(pred)?)?;
    let outputs = Outputs::create(&cfg.output_dir)?;
    outputs.report("ner_eval", "ner-eval", cfg, &[("gold", gold), ("pred", pred)], &report)?;
    let o = &report.overall;
    println!("overall  P {:.4}  R {:.4}  F1 {:.4}", o.precision, o.recall, o.f1);
    for (t, s) in &report.per_type {
        println!("{t:<8} P {:.4}  R {:.4}  F1 {:.4}", s.precision, s.recall, s.f1);
    }
    Ok(())
}
