//! Masked corpus variants: NE type tags, full POS delexicalization and POS
//! tagset conversion.
//!
//! Masked documents carry their tokens explicitly; their `text` is the tokens
//! joined by single spaces. Ids, labels and document order never change.

mod gazetteer;
mod tags;

pub use gazetteer::Gazetteer;
pub use tags::TagConversionTable;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{is_tag_token, Corpus, Document, NeType};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    Ne,
    PosFull,
}

impl MaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskKind::Ne => "ne",
            MaskKind::PosFull => "pos_full",
        }
    }
}

/// How a corpus was masked. Tags are always atomic single tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRecipe {
    pub kind: MaskKind,
    pub tag_vocabulary: BTreeSet<String>,
    pub atomic_tags: bool,
}

impl MaskRecipe {
    pub fn ne() -> Self {
        Self {
            kind: MaskKind::Ne,
            tag_vocabulary: NeType::ALL.iter().map(|t| t.tag()).collect(),
            atomic_tags: true,
        }
    }

    pub fn pos(tagset: BTreeSet<String>) -> Self {
        Self {
            kind: MaskKind::PosFull,
            tag_vocabulary: tagset,
            atomic_tags: true,
        }
    }

    /// Reconstructs a recipe for documents read back from disk.
    pub(crate) fn observed(kind: MaskKind, docs: &[Document]) -> Self {
        match kind {
            MaskKind::Ne => Self::ne(),
            MaskKind::PosFull => {
                Self::pos(docs.iter().flat_map(|d| d.tokens.iter().cloned()).collect())
            }
        }
    }
}

fn masked_document(d: &Document, tokens: Vec<String>) -> Document {
    Document {
        id: d.id.clone(),
        text: tokens.join(" "),
        tokens,
        label: d.label.clone(),
        ne_spans: None,
        pos_tags: None,
    }
}

/// Replaces each NE span with one atomic type tag.
///
/// Every token whose character range intersects a span is absorbed into that
/// span's single tag. Tokens outside spans are copied unchanged. The output
/// documents carry an empty span list, so masking twice is the identity.
pub fn mask_ne(corpus: &Corpus) -> Result<Corpus> {
    let tokenizer = *corpus.tokenizer();
    let docs = corpus
        .documents()
        .iter()
        .map(|d| {
            let spans = d
                .ne_spans
                .as_ref()
                .ok_or_else(|| Error::MissingAnnotation(d.id.clone(), "ne_spans"))?;
            if spans.is_empty() {
                let mut out = masked_document(d, d.tokens.clone());
                out.ne_spans = Some(Vec::new());
                return Ok(out);
            }
            let with_offsets = tokenizer.tokenize_with_offsets(&d.text);
            if with_offsets.len() != d.tokens.len()
                || with_offsets.iter().zip(&d.tokens).any(|(a, b)| &a.text != b)
            {
                return Err(Error::Alignment {
                    doc: d.id.clone(),
                    detail: "tokens do not match the text; cannot place NE spans".into(),
                });
            }
            let mut tokens = Vec::with_capacity(with_offsets.len());
            let mut next_span = 0;
            let mut emitted = vec![false; spans.len()];
            for t in &with_offsets {
                while next_span < spans.len() && spans[next_span].end <= t.start {
                    next_span += 1;
                }
                let hit = spans[next_span..]
                    .iter()
                    .position(|s| s.start < t.end && t.start < s.end)
                    .map(|k| k + next_span);
                match hit {
                    Some(k) => {
                        if !emitted[k] {
                            emitted[k] = true;
                            tokens.push(spans[k].ne_type.tag());
                        }
                    }
                    None => tokens.push(t.text.clone()),
                }
            }
            // A span covering only whitespace or filtered tokens still counts.
            for (k, s) in spans.iter().enumerate() {
                if !emitted[k] {
                    let pos = tokens_before(&with_offsets, spans, &emitted, s.start);
                    tokens.insert(pos, s.ne_type.tag());
                    emitted[k] = true;
                }
            }
            let mut out = masked_document(d, tokens);
            out.ne_spans = Some(Vec::new());
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::with_mask(docs, tokenizer, Some(MaskRecipe::ne()))
}

fn tokens_before(
    toks: &[crate::corpus::Token],
    spans: &[crate::corpus::NeSpan],
    emitted: &[bool],
    offset: usize,
) -> usize {
    let plain = toks
        .iter()
        .filter(|t| t.start < offset && !spans.iter().any(|s| s.start < t.end && t.start < s.end))
        .count();
    let tags = spans
        .iter()
        .zip(emitted)
        .filter(|(s, &e)| e && s.start < offset)
        .count();
    plain + tags
}

/// Replaces every token by its POS tag.
pub fn mask_pos(corpus: &Corpus) -> Result<Corpus> {
    let mut tagset = BTreeSet::new();
    let docs = corpus
        .documents()
        .iter()
        .map(|d| {
            let tags = d.pos_tags.as_ref().ok_or_else(|| Error::Alignment {
                doc: d.id.clone(),
                detail: "missing pos_tags".into(),
            })?;
            if tags.len() != d.tokens.len() {
                return Err(Error::Alignment {
                    doc: d.id.clone(),
                    detail: format!("{} POS tags for {} tokens", tags.len(), d.tokens.len()),
                });
            }
            tagset.extend(tags.iter().cloned());
            Ok(masked_document(d, tags.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::with_mask(docs, *corpus.tokenizer(), Some(MaskRecipe::pos(tagset)))
}

/// Maps every POS tag through `table`. Tokens are left alone, except on an
/// already POS-masked corpus where tokens are the tags and are mapped too.
pub fn convert_tags(corpus: &Corpus, table: &TagConversionTable) -> Result<Corpus> {
    let pos_masked = corpus.mask().is_some_and(|m| m.kind == MaskKind::PosFull);
    let docs = corpus
        .documents()
        .iter()
        .map(|d| {
            let mut out = d.clone();
            if let Some(tags) = &d.pos_tags {
                out.pos_tags = Some(table.convert_all(tags)?);
            }
            if pos_masked {
                out.tokens = table.convert_all(&d.tokens)?;
                out.text = out.tokens.join(" ");
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mask = corpus.mask().cloned().map(|m| match m.kind {
        MaskKind::PosFull => MaskRecipe::pos(
            m.tag_vocabulary
                .iter()
                .filter_map(|t| table.get(t).map(str::to_string))
                .collect(),
        ),
        MaskKind::Ne => m,
    });
    Corpus::with_mask(docs, *corpus.tokenizer(), mask)
}

/// Tokens in `corpus` that are mask tags.
pub fn count_tag_tokens(corpus: &Corpus) -> usize {
    corpus
        .documents()
        .iter()
        .flat_map(|d| &d.tokens)
        .filter(|t| is_tag_token(t))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{NeSpan, TokenizerConfig};

    fn ne_doc(id: &str, text: &str, spans: Vec<NeSpan>) -> Document {
        Document::new(id, text, "O", &TokenizerConfig::default())
            .with_spans(spans)
            .unwrap()
    }

    #[test]
    fn worked_example_masks_names() {
        let d = ne_doc(
            "x",
            "John will go to Berlin.",
            vec![NeSpan::new(0, 4, NeType::Per), NeSpan::new(16, 22, NeType::Loc)],
        );
        let c = Corpus::new(vec![d], TokenizerConfig::default()).unwrap();
        let m = mask_ne(&c).unwrap();
        assert_eq!(m.documents()[0].text, "[PER] will go to [LOC] .");
        assert_eq!(m.documents()[0].tokens, ["[PER]", "will", "go", "to", "[LOC]", "."]);
        assert_eq!(m.mask().unwrap().kind, MaskKind::Ne);
    }

    #[test]
    fn multi_token_span_collapses_to_one_tag() {
        let d = ne_doc(
            "x",
            "Die Europäische Kommission tagt.",
            vec![NeSpan::new(4, 26, NeType::Org)],
        );
        let c = Corpus::new(vec![d], TokenizerConfig::default()).unwrap();
        assert_eq!(mask_ne(&c).unwrap().documents()[0].tokens, ["die", "[ORG]", "tagt", "."]);
    }

    #[test]
    fn zero_spans_leave_tokens_and_idempotent() {
        let d = ne_doc("x", "nichts zu sehen", vec![]);
        let c = Corpus::new(vec![d], TokenizerConfig::default()).unwrap();
        let once = mask_ne(&c).unwrap();
        assert_eq!(once.documents()[0].tokens, c.documents()[0].tokens);
        assert_eq!(mask_ne(&once).unwrap(), once);
    }

    #[test]
    fn missing_spans_is_reported() {
        let d = Document::new("x", "a b", "O", &TokenizerConfig::default());
        let c = Corpus::new(vec![d], TokenizerConfig::default()).unwrap();
        assert!(matches!(mask_ne(&c), Err(Error::MissingAnnotation(..))));
        assert!(matches!(mask_pos(&c), Err(Error::Alignment { .. })));
    }

    #[test]
    fn pos_delexicalization_matches_tiger_example() {
        let tags: Vec<String> = "ADV VMFIN ADJD ART NN VVPP VAINF $."
            .split(' ')
            .map(String::from)
            .collect();
        let d = Document::new(
            "s",
            "Jetzt solle erneut ein Antrag gestellt werden .",
            "T",
            &TokenizerConfig::default(),
        )
        .with_pos_tags(tags)
        .unwrap();
        let c = Corpus::new(vec![d], TokenizerConfig::default()).unwrap();
        let m = mask_pos(&c).unwrap();
        assert_eq!(m.documents()[0].text, "ADV VMFIN ADJD ART NN VVPP VAINF $.");

        let upos = convert_tags(&m, &TagConversionTable::stts_to_upos()).unwrap();
        // VMFIN maps to VERB in the published table.
        assert_eq!(upos.documents()[0].text, "ADV VERB ADJ DET NOUN VERB AUX PUNCT");
    }

    #[test]
    fn empty_document_masks_to_empty() {
        let d = Document::new("e", "", "O", &TokenizerConfig::default())
            .with_pos_tags(vec![])
            .unwrap();
        let c = Corpus::new(vec![d], TokenizerConfig::default()).unwrap();
        assert!(mask_pos(&c).unwrap().documents()[0].tokens.is_empty());
    }
}
