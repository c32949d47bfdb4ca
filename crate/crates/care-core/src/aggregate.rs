//! Post-level aggregation: support counting, thresholding, exclusion
//! pairs, and fusion with external comment labels.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Comment, ExternalCommentLabels, Post};
use crate::error::{CareError, Result};
use crate::matcher::Matcher;
use crate::pattern::CarePattern;
use crate::taxonomy::{AffectClass, ClassMapping, ClassSet};

pub const DEFAULT_THRESHOLD: u32 = 5;
pub const DEFAULT_MIN_POST_CHARS: usize = 10;
pub const DEFAULT_ENSEMBLE_T_CARE: u32 = 5;
pub const DEFAULT_ENSEMBLE_T_EXT: u32 = 4;

/// Thresholds and filters applied when turning comment labels into post
/// labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregationConfig {
    /// Minimum number of distinct supporting comments for a label.
    pub default_threshold: u32,
    /// Per-class overrides of the default threshold.
    #[serde(default)]
    pub per_class_thresholds: BTreeMap<AffectClass, u32>,
    /// `(pattern_name, indicator)` pairs whose matches are discarded.
    #[serde(default)]
    pub exclusions: BTreeSet<(String, String)>,
    /// Posts with fewer characters of text are never annotated.
    pub min_post_chars: usize,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        Self {
            default_threshold: DEFAULT_THRESHOLD,
            per_class_thresholds: BTreeMap::new(),
            exclusions: BTreeSet::new(),
            min_post_chars: DEFAULT_MIN_POST_CHARS,
        }
    }
}

impl AggregationConfig {
    pub fn with_threshold(mut self, t: u32) -> Self {
        self.default_threshold = t;
        self
    }

    /// Effective threshold for a class. A label always needs at least one
    /// supporting comment, so a configured 0 behaves as 1.
    pub fn threshold(&self, class: AffectClass) -> u32 {
        self.per_class_thresholds
            .get(&class)
            .copied()
            .unwrap_or(self.default_threshold)
            .max(1)
    }

    /// Smallest threshold any class can satisfy; posts with fewer comments
    /// than this are skipped before matching.
    pub fn min_threshold(&self) -> u32 {
        AffectClass::ALL
            .into_iter()
            .map(|c| self.threshold(c))
            .min()
            .unwrap_or(1)
    }

    /// Checks the stated invariants: thresholds at least 1, and exclusion
    /// pairs referring to known pattern names.
    pub fn validate(&self, patterns: &[CarePattern]) -> Result<()> {
        if self.default_threshold < 1 {
            return Err(CareError::Validation(
                "default threshold must be at least 1".into(),
            ));
        }
        for (class, t) in &self.per_class_thresholds {
            if *t < 1 {
                return Err(CareError::Validation(format!(
                    "threshold for {class} must be at least 1"
                )));
            }
        }
        for (pattern, _) in &self.exclusions {
            if !patterns.iter().any(|p| &p.name == pattern) {
                return Err(CareError::Validation(format!(
                    "exclusion references unknown pattern `{pattern}`"
                )));
            }
        }
        Ok(())
    }
}

/// Final annotation for one post.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PostAnnotation {
    pub post_id: String,
    /// Labels in canonical class order.
    pub labels: Vec<AffectClass>,
    /// Distinct supporting comments per class; zero-support classes are
    /// omitted.
    pub support: BTreeMap<AffectClass, u32>,
}

impl PostAnnotation {
    pub fn label_set(&self) -> ClassSet {
        self.labels.iter().copied().collect()
    }

    pub fn support_for(&self, class: AffectClass) -> u32 {
        self.support.get(&class).copied().unwrap_or(0)
    }
}

/// Counts distinct supporting comments per class and applies thresholds.
/// A comment appearing multiple times has its class sets unioned first, so
/// it counts at most once per class.
pub fn aggregate_post(
    post_id: &str,
    comment_labels: &[(String, ClassSet)],
    cfg: &AggregationConfig,
) -> PostAnnotation {
    let mut per_comment: HashMap<&str, ClassSet> = HashMap::new();
    for (comment_id, classes) in comment_labels {
        let entry = per_comment.entry(comment_id.as_str()).or_default();
        *entry = entry.union(*classes);
    }

    let mut support: BTreeMap<AffectClass, u32> = BTreeMap::new();
    for classes in per_comment.values() {
        for class in classes.iter() {
            *support.entry(class).or_insert(0) += 1;
        }
    }

    let labels: Vec<AffectClass> = AffectClass::ALL
        .into_iter()
        .filter(|&c| support.get(&c).copied().unwrap_or(0) >= cfg.threshold(c))
        .collect();

    PostAnnotation {
        post_id: post_id.to_string(),
        labels,
        support,
    }
}

/// Counters reported by [`annotate_corpus`].
#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct AnnotateSummary {
    pub posts_total: u64,
    pub comments_total: u64,
    /// Comments whose post_id does not occur in the posts file.
    pub dangling_comments: u64,
    /// Comments with at least one surviving match record.
    pub comments_matched: u64,
    pub posts_skipped_short: u64,
    pub posts_annotated: u64,
    pub per_class: BTreeMap<AffectClass, u64>,
}

#[derive(Debug, Clone)]
pub struct AnnotatedCorpus {
    pub annotations: Vec<PostAnnotation>,
    pub summary: AnnotateSummary,
}

/// Annotates every post in the corpus. Output is ordered by post_id and
/// contains only posts with a non-empty label set and enough text.
///
/// Matching fans out across posts with rayon; results are collected in
/// post order, so output is identical for any parallelism degree.
pub fn annotate_corpus(
    posts: &[Post],
    comments: &[Comment],
    matcher: &Matcher<'_>,
    cfg: &AggregationConfig,
) -> AnnotatedCorpus {
    let mut summary = AnnotateSummary {
        posts_total: posts.len() as u64,
        comments_total: comments.len() as u64,
        ..AnnotateSummary::default()
    };

    let post_index: HashMap<&str, &Post> = posts.iter().map(|p| (p.post_id.as_str(), p)).collect();
    let mut grouped: HashMap<&str, Vec<&Comment>> = HashMap::new();
    for comment in comments {
        if post_index.contains_key(comment.post_id.as_str()) {
            grouped
                .entry(comment.post_id.as_str())
                .or_default()
                .push(comment);
        } else {
            summary.dangling_comments += 1;
            log::warn!(
                "comment {} references unknown post {}; skipped",
                comment.comment_id,
                comment.post_id
            );
        }
    }

    let mut post_ids: Vec<&str> = grouped.keys().copied().collect();
    post_ids.sort_unstable();

    let min_needed = cfg.min_threshold() as usize;
    struct PerPost {
        annotation: Option<PostAnnotation>,
        matched_comments: u64,
        skipped_short: bool,
    }

    let results: Vec<PerPost> = post_ids
        .par_iter()
        .map(|post_id| {
            let post = post_index[post_id];
            let group = &grouped[post_id];
            if post.text.chars().count() < cfg.min_post_chars {
                return PerPost {
                    annotation: None,
                    matched_comments: 0,
                    skipped_short: true,
                };
            }
            if group.len() < min_needed {
                return PerPost {
                    annotation: None,
                    matched_comments: 0,
                    skipped_short: false,
                };
            }
            let mut matched = 0u64;
            let mut labels: Vec<(String, ClassSet)> = Vec::new();
            for comment in group {
                let classes = comment_classes(matcher, comment, &cfg.exclusions);
                if !classes.is_empty() {
                    matched += 1;
                    labels.push((comment.comment_id.clone(), classes));
                }
            }
            let annotation = aggregate_post(post_id, &labels, cfg);
            PerPost {
                annotation: (!annotation.labels.is_empty()).then_some(annotation),
                matched_comments: matched,
                skipped_short: false,
            }
        })
        .collect();

    let mut annotations = Vec::new();
    for r in results {
        summary.comments_matched += r.matched_comments;
        summary.posts_skipped_short += u64::from(r.skipped_short);
        if let Some(a) = r.annotation {
            for &label in &a.labels {
                *summary.per_class.entry(label).or_insert(0) += 1;
            }
            annotations.push(a);
        }
    }
    summary.posts_annotated = annotations.len() as u64;

    AnnotatedCorpus {
        annotations,
        summary,
    }
}

/// Classes a comment contributes after exclusion filtering.
pub fn comment_classes(
    matcher: &Matcher<'_>,
    comment: &Comment,
    exclusions: &BTreeSet<(String, String)>,
) -> ClassSet {
    let label = matcher.label_comment(&comment.comment_id, &comment.text);
    if exclusions.is_empty() {
        return label.classes;
    }
    label
        .records
        .iter()
        .filter(|r| !exclusions.contains(&(r.pattern_name.clone(), r.indicator_key())))
        .fold(ClassSet::empty(), |acc, r| acc.union(r.classes))
}

/// Comment-level class labels with their post attribution; the unit the
/// ensemble and sweep operate on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentClasses {
    pub post_id: String,
    pub comment_id: String,
    pub classes: ClassSet,
}

/// Post annotation produced by fusing two label sources.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct EnsembleAnnotation {
    pub post_id: String,
    pub labels: Vec<AffectClass>,
    pub care_support: BTreeMap<AffectClass, u32>,
    pub external_support: BTreeMap<AffectClass, u32>,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct EnsembleDiagnostics {
    /// External label names that did not resolve through the mapping.
    pub unmapped_names: BTreeMap<String, u64>,
    /// External rows whose comment_id is not in the corpus.
    pub unknown_comments: u64,
}

/// Combines per-comment labels from this pipeline with labels from an
/// external classifier. Final labels are the union of the two thresholded
/// label sets: classes with `care_support >= t_care` or
/// `external_support >= t_ext`.
pub fn ensemble_annotate(
    comments: &[CommentClasses],
    external: &ExternalCommentLabels,
    mapping: &ClassMapping,
    t_care: u32,
    t_ext: u32,
) -> (Vec<EnsembleAnnotation>, EnsembleDiagnostics) {
    let t_care = t_care.max(1);
    let t_ext = t_ext.max(1);
    let mut diagnostics = EnsembleDiagnostics::default();

    let mut comment_posts: HashMap<&str, &str> = HashMap::new();
    // post_id -> class -> distinct supporting comment ids
    let mut care: HashMap<&str, HashMap<AffectClass, HashSet<&str>>> = HashMap::new();
    for c in comments {
        comment_posts.insert(&c.comment_id, &c.post_id);
        let per_class = care.entry(c.post_id.as_str()).or_default();
        for class in c.classes.iter() {
            per_class.entry(class).or_default().insert(&c.comment_id);
        }
    }

    let mut ext: HashMap<&str, HashMap<AffectClass, HashSet<&str>>> = HashMap::new();
    for (comment_id, names) in external {
        let Some(post_id) = comment_posts.get(comment_id.as_str()) else {
            diagnostics.unknown_comments += 1;
            continue;
        };
        let mut mapped = ClassSet::empty();
        for name in names {
            match mapping.map_external(name) {
                Some(class) => mapped.insert(class),
                None => {
                    *diagnostics
                        .unmapped_names
                        .entry(name.trim().to_lowercase())
                        .or_insert(0) += 1;
                }
            }
        }
        let per_class = ext.entry(post_id).or_default();
        for class in mapped.iter() {
            per_class.entry(class).or_default().insert(comment_id);
        }
    }

    let mut post_ids: Vec<&str> = care.keys().copied().collect();
    post_ids.sort_unstable();

    let mut out = Vec::new();
    for post_id in post_ids {
        let care_support: BTreeMap<AffectClass, u32> = care
            .get(post_id)
            .map(|m| m.iter().map(|(&c, ids)| (c, ids.len() as u32)).collect())
            .unwrap_or_default();
        let external_support: BTreeMap<AffectClass, u32> = ext
            .get(post_id)
            .map(|m| m.iter().map(|(&c, ids)| (c, ids.len() as u32)).collect())
            .unwrap_or_default();
        let labels: Vec<AffectClass> = AffectClass::ALL
            .into_iter()
            .filter(|c| {
                care_support.get(c).copied().unwrap_or(0) >= t_care
                    || external_support.get(c).copied().unwrap_or(0) >= t_ext
            })
            .collect();
        if labels.is_empty() {
            continue;
        }
        out.push(EnsembleAnnotation {
            post_id: post_id.to_string(),
            labels,
            care_support,
            external_support,
        });
    }
    (out, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicon;
    use crate::pattern::seed_patterns;
    use crate::wordlists::WordLists;

    fn labels(n: usize, class: AffectClass) -> Vec<(String, ClassSet)> {
        (0..n)
            .map(|i| (format!("c{class}{i}"), ClassSet::of(&[class])))
            .collect()
    }

    #[test]
    fn threshold_admits_exactly_at_t() {
        let cfg = AggregationConfig::default();
        let ann = aggregate_post("p", &labels(5, AffectClass::Amused), &cfg);
        assert_eq!(ann.labels, vec![AffectClass::Amused]);
        assert_eq!(ann.support_for(AffectClass::Amused), 5);
    }

    #[test]
    fn below_threshold_class_is_dropped() {
        let cfg = AggregationConfig::default();
        let mut comment_labels = labels(4, AffectClass::Amused);
        comment_labels.extend(labels(6, AffectClass::Approving));
        let ann = aggregate_post("p", &comment_labels, &cfg);
        assert_eq!(ann.labels, vec![AffectClass::Approving]);
        assert_eq!(ann.support_for(AffectClass::Amused), 4);
    }

    #[test]
    fn per_class_override_lowers_bar() {
        let mut cfg = AggregationConfig::default();
        cfg.per_class_thresholds.insert(AffectClass::Scared, 3);
        let ann = aggregate_post("p", &labels(3, AffectClass::Scared), &cfg);
        assert_eq!(ann.labels, vec![AffectClass::Scared]);
    }

    #[test]
    fn duplicate_comment_counts_once_per_class() {
        let cfg = AggregationConfig::default().with_threshold(2);
        let comment_labels = vec![
            ("c1".to_string(), ClassSet::of(&[AffectClass::Amused])),
            ("c1".to_string(), ClassSet::of(&[AffectClass::Amused])),
            ("c2".to_string(), ClassSet::of(&[AffectClass::Amused])),
        ];
        let ann = aggregate_post("p", &comment_labels, &cfg);
        assert_eq!(ann.support_for(AffectClass::Amused), 2);
        assert_eq!(ann.labels, vec![AffectClass::Amused]);
    }

    #[test]
    fn multi_class_comment_counts_toward_each() {
        let cfg = AggregationConfig::default().with_threshold(1);
        let comment_labels = vec![(
            "c1".to_string(),
            ClassSet::of(&[AffectClass::Amused, AffectClass::Saddened]),
        )];
        let ann = aggregate_post("p", &comment_labels, &cfg);
        assert_eq!(ann.support_for(AffectClass::Amused), 1);
        assert_eq!(ann.support_for(AffectClass::Saddened), 1);
        assert_eq!(ann.labels.len(), 2);
    }

    fn demo_corpus() -> (Vec<Post>, Vec<Comment>) {
        let posts = vec![
            Post {
                post_id: "p1".into(),
                text: "look at this little puppy video".into(),
            },
            Post {
                post_id: "p2".into(),
                text: "hi".into(),
            },
        ];
        let mut comments = Vec::new();
        for i in 0..5 {
            comments.push(Comment {
                comment_id: format!("p1-{i}"),
                post_id: "p1".into(),
                text: "this is so funny".into(),
            });
            comments.push(Comment {
                comment_id: format!("p2-{i}"),
                post_id: "p2".into(),
                text: "this is so funny".into(),
            });
        }
        comments.push(Comment {
            comment_id: "ghost".into(),
            post_id: "p404".into(),
            text: "this is so funny".into(),
        });
        (posts, comments)
    }

    #[test]
    fn corpus_annotation_thresholds_filters_and_counts() {
        let patterns = seed_patterns();
        let lexicon = Lexicon::seed();
        let lists = WordLists::seed();
        let matcher = Matcher::new(&patterns, &lexicon, &lists);
        let (posts, comments) = demo_corpus();
        let result = annotate_corpus(&posts, &comments, &matcher, &AggregationConfig::default());
        assert_eq!(result.annotations.len(), 1);
        assert_eq!(result.annotations[0].post_id, "p1");
        assert_eq!(result.annotations[0].labels, vec![AffectClass::Amused]);
        assert_eq!(result.summary.dangling_comments, 1);
        assert_eq!(result.summary.posts_skipped_short, 1);
        assert_eq!(result.summary.posts_annotated, 1);
        assert_eq!(result.summary.comments_matched, 5);
    }

    #[test]
    fn exclusion_pair_suppresses_support() {
        let patterns = seed_patterns();
        let lexicon = Lexicon::seed();
        let lists = WordLists::seed();
        let matcher = Matcher::new(&patterns, &lexicon, &lists);
        let (posts, comments) = demo_corpus();
        let mut cfg = AggregationConfig::default();
        cfg.exclusions
            .insert(("demonstrative".into(), "funny".into()));
        let result = annotate_corpus(&posts, &comments, &matcher, &cfg);
        assert!(result.annotations.is_empty());
    }

    #[test]
    fn ensemble_unions_thresholded_sides() {
        let mapping = ClassMapping::builtin();
        let mut comments = Vec::new();
        for i in 0..5 {
            comments.push(CommentClasses {
                post_id: "p".into(),
                comment_id: format!("c{i}"),
                classes: if i < 3 {
                    ClassSet::of(&[AffectClass::Excited])
                } else {
                    ClassSet::empty()
                },
            });
        }
        let mut external = ExternalCommentLabels::new();
        for i in 0..4 {
            external.insert(format!("c{i}"), vec!["joy".to_string()]);
        }
        external.insert("c4".into(), vec!["boredom".to_string()]);
        let (anns, diag) = ensemble_annotate(&comments, &external, &mapping, 5, 4);
        // CARE support 3 < 5, but external joy support 4 >= 4.
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].labels, vec![AffectClass::Excited]);
        assert_eq!(anns[0].care_support[&AffectClass::Excited], 3);
        assert_eq!(anns[0].external_support[&AffectClass::Excited], 4);
        assert_eq!(diag.unmapped_names["boredom"], 1);
    }

    #[test]
    fn ensemble_includes_care_only_side() {
        let mapping = ClassMapping::builtin();
        let comments: Vec<CommentClasses> = (0..5)
            .map(|i| CommentClasses {
                post_id: "p".into(),
                comment_id: format!("c{i}"),
                classes: ClassSet::of(&[AffectClass::Amused]),
            })
            .collect();
        let (anns, _) = ensemble_annotate(&comments, &ExternalCommentLabels::new(), &mapping, 5, 4);
        assert_eq!(anns[0].labels, vec![AffectClass::Amused]);
        assert!(anns[0].external_support.is_empty());
    }
}
