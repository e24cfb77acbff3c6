//! Corpus auditing for spurious topic signal.
//!
//! The crate measures how well unsupervised topics line up with class labels
//! (the "topic floor"), and quantifies known spurious carriers by masking
//! named entities or delexicalizing to POS tags and re-running a linear
//! classifier under the four train/test masking configurations.
//!
//! Module map:
//!
//! - [`corpus`]: loading, tokenization, stratified splitting.
//! - [`lda`]: collapsed Gibbs LDA and external topic-assignment import.
//! - [`alignment`]: topic-label alignment, purity and the topic-floor sweep.
//! - [`masking`]: NE masking, POS delexicalization, tagset conversion.
//! - [`classify`]: bag-of-n-grams logistic regression with bootstrap CIs.
//! - [`attribution`]: exact per-token attributions for the linear model.
//! - [`eval_ner`]: span-level NER precision/recall/F1.

pub mod alignment;
pub mod attribution;
pub mod classify;
pub mod corpus;
pub mod eval_ner;
pub mod lda;
pub mod masking;
pub mod report;
pub mod seed;
pub mod synth;

mod error;

pub use error::{Error, Result};
