//! Unsupervised affective-response annotation for social-media posts.
//!
//! Comments on a post are matched against a small pattern language plus a
//! keyword lexicon; per-comment affect labels are aggregated into post
//! labels under support thresholds; frequent n-grams from labeled posts
//! feed an expansion loop that proposes new keywords and patterns; and an
//! evaluation suite scores annotations against human labels.
//!
//! The crate is organized around that pipeline:
//!
//! - [`taxonomy`], [`lexicon`], [`wordlists`]: the seven affect classes,
//!   the indicator lexicon, and the exaggerator/negation/contrast lists.
//! - [`pattern`], [`preprocess`], [`matcher`]: the pattern DSL and the
//!   sentence-level extraction engine.
//! - [`aggregate`]: post-level thresholding, exclusion lists, and fusion
//!   with external comment labels.
//! - [`expand`]: n-gram mining and candidate proposal for the bootstrap
//!   loop, plus applying human-reviewed candidates.
//! - [`eval`]: annotator agreement, Fleiss' kappa, precision/recall
//!   threshold sweeps, per-match false-positive rates, prevalence, and
//!   label intersection.
//! - [`corpus`], [`pipeline`]: JSONL corpus I/O and end-to-end runs.
//! - [`synth`]: seeded synthetic corpora for tests and benchmarks.
//!
//! ```
//! use care_core::pipeline::Artifacts;
//!
//! let artifacts = Artifacts::seed();
//! let matcher = artifacts.matcher();
//! let label = matcher.label_comment("c1", "I was bored but this is so funny.");
//! assert_eq!(label.classes.names(), ["amused"]);
//! ```

pub mod aggregate;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod expand;
mod io_util;
pub mod lexicon;
pub mod matcher;
pub mod pattern;
pub mod pipeline;
pub mod preprocess;
pub mod synth;
pub mod taxonomy;
pub mod wordlists;

pub use aggregate::{
    aggregate_post, annotate_corpus, ensemble_annotate, AggregationConfig, EnsembleAnnotation,
    EnsembleDiagnostics, PostAnnotation,
};
pub use error::{CareError, Result};
pub use io_util::write_atomic;
pub use lexicon::{Lexicon, LexiconEntry, Provenance};
pub use matcher::{count_instantiations, CommentLabel, MatchRecord, Matcher, SentenceMatch};
pub use pattern::{parse_patterns, seed_patterns, CarePattern, Slot};
pub use preprocess::{preprocess_comment, tokenize, PreprocessedSentence};
pub use taxonomy::{AffectClass, ClassMapping, ClassSet, Valence};
pub use wordlists::WordLists;
