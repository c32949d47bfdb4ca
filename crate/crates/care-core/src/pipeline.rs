//! End-to-end runs: artifact loading with seed fallbacks, corpus
//! annotation to disk, comment-level label extraction for evaluation and
//! ensembles, and training-data export.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::aggregate::{
    annotate_corpus, AggregationConfig, AnnotateSummary, CommentClasses, PostAnnotation,
};
use crate::corpus::{read_comments, read_posts, to_jsonl, Comment, Post};
use crate::error::Result;
use crate::eval::PostCommentLabels;
use crate::io_util::write_atomic;
use crate::lexicon::Lexicon;
use crate::matcher::{MatchRecord, Matcher};
use crate::pattern::{load_patterns, seed_patterns, CarePattern};
use crate::taxonomy::Valence;
use crate::wordlists::WordLists;

/// Loaded matching artifacts. Every path is optional; missing ones fall
/// back to the seed artifacts shipped with the crate.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub patterns: Vec<CarePattern>,
    pub lexicon: Lexicon,
    pub lists: WordLists,
}

/// Optional artifact path overrides.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ArtifactPaths {
    pub patterns: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub exaggerators: Option<PathBuf>,
    pub negations: Option<PathBuf>,
    pub contrast: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
}

impl Artifacts {
    pub fn seed() -> Self {
        Self {
            patterns: seed_patterns(),
            lexicon: Lexicon::seed(),
            lists: WordLists::seed(),
        }
    }

    pub fn load(paths: &ArtifactPaths) -> Result<Self> {
        let patterns = match &paths.patterns {
            Some(p) => load_patterns(p)?,
            None => seed_patterns(),
        };
        let lexicon = match &paths.lexicon {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::seed(),
        };
        let lists = WordLists::load_with_fallback(
            paths.exaggerators.as_deref(),
            paths.negations.as_deref(),
            paths.contrast.as_deref(),
            paths.stopwords.as_deref(),
        )?;
        Ok(Self {
            patterns,
            lexicon,
            lists,
        })
    }

    pub fn matcher(&self) -> Matcher<'_> {
        Matcher::new(&self.patterns, &self.lexicon, &self.lists)
    }
}

/// Runs `f` inside a rayon pool of the requested size; 0 means the global
/// default pool. Output of the pipeline does not depend on this choice.
pub fn with_parallelism<T: Send>(parallelism: usize, f: impl FnOnce() -> T + Send) -> T {
    if parallelism == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .expect("thread pool construction")
            .install(f)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub annotate: AnnotateSummary,
    pub elapsed_ms: u64,
    pub output: String,
}

/// Full annotation run: read corpus, match, aggregate, write one JSONL
/// annotation per post (atomically). Returns the run summary.
pub fn run_pipeline(
    artifacts: &Artifacts,
    posts_path: &Path,
    comments_path: &Path,
    output_path: &Path,
    cfg: &AggregationConfig,
    parallelism: usize,
) -> Result<RunSummary> {
    let started = Instant::now();
    let posts = read_posts(posts_path)?;
    let comments = read_comments(comments_path)?;
    let matcher = artifacts.matcher();
    let result = with_parallelism(parallelism, || {
        annotate_corpus(&posts, &comments, &matcher, cfg)
    });
    let payload = to_jsonl(&result.annotations)?;
    write_atomic(output_path, payload.as_bytes())?;
    Ok(RunSummary {
        annotate: result.summary,
        elapsed_ms: started.elapsed().as_millis() as u64,
        output: output_path.display().to_string(),
    })
}

/// Renders annotations to the JSONL byte payload written by
/// [`run_pipeline`]; used by tests comparing outputs across parallelism.
pub fn annotations_jsonl(annotations: &[PostAnnotation]) -> Result<String> {
    to_jsonl(annotations)
}

/// Per-comment class labels for every comment of a known post, including
/// comments with no matches (empty class set). Returns the labels and the
/// dangling-comment count.
pub fn comment_class_labels(
    posts: &[Post],
    comments: &[Comment],
    matcher: &Matcher<'_>,
    cfg: &AggregationConfig,
) -> (Vec<CommentClasses>, u64) {
    let known: HashMap<&str, ()> = posts.iter().map(|p| (p.post_id.as_str(), ())).collect();
    let mut dangling = 0;
    let mut out = Vec::with_capacity(comments.len());
    for comment in comments {
        if !known.contains_key(comment.post_id.as_str()) {
            dangling += 1;
            continue;
        }
        let classes = crate::aggregate::comment_classes(matcher, comment, &cfg.exclusions);
        out.push(CommentClasses {
            post_id: comment.post_id.clone(),
            comment_id: comment.comment_id.clone(),
            classes,
        });
    }
    (out, dangling)
}

/// Comment labels grouped per post with the post's text length, the input
/// shape of the threshold sweep. Posts with no labeled comments are
/// retained with an empty list so they stay in the evaluation universe.
pub fn post_comment_labels(
    posts: &[Post],
    comments: &[Comment],
    matcher: &Matcher<'_>,
    cfg: &AggregationConfig,
) -> (Vec<PostCommentLabels>, u64) {
    let (labels, dangling) = comment_class_labels(posts, comments, matcher, cfg);
    let mut grouped: HashMap<&str, Vec<(String, crate::taxonomy::ClassSet)>> = HashMap::new();
    for l in &labels {
        if !l.classes.is_empty() {
            grouped
                .entry(l.post_id.as_str())
                .or_default()
                .push((l.comment_id.clone(), l.classes));
        }
    }
    let mut out: Vec<PostCommentLabels> = posts
        .iter()
        .map(|p| PostCommentLabels {
            post_id: p.post_id.clone(),
            text_chars: p.text.chars().count(),
            comments: grouped.remove(p.post_id.as_str()).unwrap_or_default(),
        })
        .collect();
    out.sort_by(|a, b| a.post_id.cmp(&b.post_id));
    (out, dangling)
}

/// Every match record attributed to its post, for false-positive analysis.
/// Exclusion pairs are deliberately not applied: this analysis is how
/// exclusion lists get built in the first place.
pub fn corpus_match_records(
    posts: &[Post],
    comments: &[Comment],
    matcher: &Matcher<'_>,
) -> Vec<(String, MatchRecord)> {
    let known: HashMap<&str, ()> = posts.iter().map(|p| (p.post_id.as_str(), ())).collect();
    let mut out = Vec::new();
    for comment in comments {
        if !known.contains_key(comment.post_id.as_str()) {
            continue;
        }
        let label = matcher.label_comment(&comment.comment_id, &comment.text);
        for record in label.records {
            out.push((comment.post_id.clone(), record));
        }
    }
    out
}

/// One exported training example.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TrainingExample {
    pub post_id: String,
    pub text: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    /// Labels are the class names.
    Classes,
    /// Labels are collapsed to positive/negative valence.
    Valence,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct ExportSummary {
    pub written: u64,
    pub skipped_missing_post: u64,
    pub skipped_short_text: u64,
}

/// Joins annotations with post text into training examples. Annotations
/// without a post are skipped with a warning count, as are posts whose
/// text shrank below `min_post_chars`.
pub fn export_training_data(
    annotations: &[PostAnnotation],
    posts: &[Post],
    format: ExportFormat,
    min_post_chars: usize,
) -> (Vec<TrainingExample>, ExportSummary) {
    let by_id: HashMap<&str, &Post> = posts.iter().map(|p| (p.post_id.as_str(), p)).collect();
    let mut summary = ExportSummary::default();
    let mut out = Vec::new();
    for ann in annotations {
        if ann.labels.is_empty() {
            continue;
        }
        let Some(post) = by_id.get(ann.post_id.as_str()) else {
            summary.skipped_missing_post += 1;
            log::warn!("annotation for {} has no post text; skipped", ann.post_id);
            continue;
        };
        if post.text.chars().count() < min_post_chars {
            summary.skipped_short_text += 1;
            continue;
        }
        let labels: Vec<String> = match format {
            ExportFormat::Classes => ann.labels.iter().map(|c| c.name().to_string()).collect(),
            ExportFormat::Valence => {
                let mut valences: Vec<&str> =
                    ann.labels.iter().map(|c| c.valence().name()).collect();
                valences.sort_by_key(|v| *v != Valence::Positive.name());
                valences.dedup();
                valences.into_iter().map(str::to_string).collect()
            }
        };
        out.push(TrainingExample {
            post_id: ann.post_id.clone(),
            text: post.text.clone(),
            labels,
        });
        summary.written += 1;
    }
    (out, summary)
}
