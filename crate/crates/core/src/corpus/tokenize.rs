use serde::{Deserialize, Serialize};

/// Rule-based tokenizer settings.
///
/// The tokenizer splits on Unicode whitespace, optionally detaches every
/// non-alphanumeric character into its own token, and keeps bracketed
/// upper-case tags such as `[LOC]` atomic (and never lowercases them).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub split_punctuation: bool,
    pub min_token_len: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            split_punctuation: true,
            min_token_len: 1,
        }
    }
}

/// A token with its character (not byte) offsets in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl TokenizerConfig {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        self.tokenize_with_offsets(text)
            .into_iter()
            .map(|t| t.text)
            .collect()
    }

    pub fn tokenize_with_offsets(&self, text: &str) -> Vec<Token> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            self.split_chunk(&chars, start, i, &mut out);
        }
        out.retain(|t| t.end - t.start >= self.min_token_len.max(1));
        out
    }

    fn split_chunk(&self, chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
        let mut i = start;
        let mut word_start: Option<usize> = None;
        while i < end {
            if let Some(tag_end) = tag_at(chars, i, end) {
                self.flush_word(chars, &mut word_start, i, out);
                out.push(Token {
                    text: chars[i..tag_end].iter().collect(),
                    start: i,
                    end: tag_end,
                });
                i = tag_end;
                continue;
            }
            if self.split_punctuation && !chars[i].is_alphanumeric() {
                self.flush_word(chars, &mut word_start, i, out);
                out.push(self.word(chars, i, i + 1));
            } else if word_start.is_none() {
                word_start = Some(i);
            }
            i += 1;
        }
        self.flush_word(chars, &mut word_start, end, out);
    }

    fn flush_word(&self, chars: &[char], word_start: &mut Option<usize>, end: usize, out: &mut Vec<Token>) {
        if let Some(s) = word_start.take() {
            out.push(self.word(chars, s, end));
        }
    }

    fn word(&self, chars: &[char], start: usize, end: usize) -> Token {
        let raw: String = chars[start..end].iter().collect();
        let text = if self.lowercase { raw.to_lowercase() } else { raw };
        Token { text, start, end }
    }
}

/// Returns the end offset of a `[UPPER]` tag starting at `i`, if any.
fn tag_at(chars: &[char], i: usize, end: usize) -> Option<usize> {
    if chars[i] != '[' {
        return None;
    }
    let mut j = i + 1;
    while j < end && chars[j].is_ascii_uppercase() {
        j += 1;
    }
    (j > i + 1 && j < end && chars[j] == ']').then_some(j + 1)
}

/// True if `token` is an atomic bracketed tag like `[PER]`.
pub fn is_tag_token(token: &str) -> bool {
    let chars: Vec<char> = token.chars().collect();
    !chars.is_empty() && tag_at(&chars, 0, chars.len()) == Some(chars.len())
}
