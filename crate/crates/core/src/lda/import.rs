use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde_json::Value;

use super::TopicAssignment;
use crate::corpus::Corpus;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentFormat {
    /// `{"id": "...", "topic": 3}` per line.
    Jsonl,
    /// `id<TAB>topic` per line.
    Tsv,
}

impl AssignmentFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("txt") => AssignmentFormat::Tsv,
            _ => AssignmentFormat::Jsonl,
        }
    }
}

/// Reads an external topic assignment (e.g. from BERTopic) for `corpus`.
pub fn import_assignment(path: &Path, corpus: &Corpus) -> Result<TopicAssignment> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_assignment(&text, AssignmentFormat::from_path(path), corpus)
}

/// Parses an assignment. Topic `-1` marks an outlier; all outliers are moved
/// to one extra topic numbered just past the largest regular topic.
pub fn parse_assignment(
    input: &str,
    format: AssignmentFormat,
    corpus: &Corpus,
) -> Result<TopicAssignment> {
    let known: HashSet<&str> = corpus.ids().collect();
    let mut raw: HashMap<String, i64> = HashMap::new();
    for (lineno, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = |m: String| Error::Format(format!("assignment line {}: {m}", lineno + 1));
        let (id, topic) = match format {
            AssignmentFormat::Jsonl => {
                let v: Value = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
                let id = v
                    .get("id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| at("missing string \"id\"".into()))?
                    .to_string();
                let topic = v
                    .get("topic")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| at("\"topic\" must be an integer".into()))?;
                (id, topic)
            }
            AssignmentFormat::Tsv => {
                let (id, topic) = line
                    .split_once('\t')
                    .ok_or_else(|| at("expected id<TAB>topic".into()))?;
                let topic = topic
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| at(format!("topic {topic:?} is not an integer")))?;
                (id.to_string(), topic)
            }
        };
        if topic < -1 {
            return Err(at(format!("topic {topic} is negative")));
        }
        if !known.contains(id.as_str()) {
            return Err(Error::UnknownDocument(id));
        }
        if raw.insert(id.clone(), topic).is_some() {
            return Err(at(format!("document {id:?} assigned twice")));
        }
    }

    let regular = raw.values().copied().filter(|&t| t >= 0).max().map_or(0, |m| m as usize + 1);
    let has_outliers = raw.values().any(|&t| t == -1);
    let outlier_topic = has_outliers.then_some(regular);
    let topics = corpus
        .ids()
        .map(|id| match raw.get(id) {
            None => Err(Error::IncompleteAssignment(id.to_string())),
            Some(-1) => Ok(regular),
            Some(&t) => Ok(t as usize),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TopicAssignment {
        doc_ids: corpus.ids().map(String::from).collect(),
        topics,
        n_topics: regular + usize::from(has_outliers),
        outlier_topic,
    })
}
