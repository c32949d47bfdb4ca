//! Seeded synthetic corpora for tests and benchmarks. Everything here is
//! deterministic in the seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Comment, Post};
use crate::lexicon::{Lexicon, Provenance};
use crate::pattern::{parse_patterns_named, seed_patterns, CarePattern};
use crate::taxonomy::{AffectClass, ClassSet};

/// Extra patterns in the shape the expansion loop tends to discover,
/// used to scale matching work beyond the six seeds.
const EXTRA_PATTERN_DSL: &str = "\
i-feel: {i|we} {feel|felt} {like}? E* I+
made-me: {this|that} {made|makes}? {me|us} E* I+
you-are: {you|u} {are|r}? E* I+
he-she-so: {he|she} {was|were}? E+ I+
this-is-the: {this|that} {is|are}? {the} E* I+
my-heart: {my|our} {heart|soul} {is|was}? E* I+
it-is: {it|that thing} {is|was}? E* I+
looks-so: {looks|seems|sounds} E+ I+
feels-so: {feels|felt} E+ I+
thats-one: {that's|thats} {one|a}? E* I+
im-getting: {getting|becoming} E+ I+
everyone-is: {everyone|everybody} {is|was}? E* I+
the-ending: {the} {ending|beginning|middle} {is|was}? E* I+
absolute-unit: {an|the} {absolute|total} E* I+
makes-us: {makes|made} {everyone|us} E* I+
watching-this: {watching|reading|seeing} {this|that} {is|was}? E* I+
kids-are: {kids|dogs|cats} {are}? E+ I+
";

/// The seed patterns plus enough generated ones to reach `n`. Panics if
/// `n` exceeds the available pool (6 + 17 = 23, the full-scale count).
pub fn scaled_patterns(n: usize) -> Vec<CarePattern> {
    let mut patterns = seed_patterns();
    let extra =
        parse_patterns_named(EXTRA_PATTERN_DSL, "<extra patterns>").expect("extra patterns parse");
    assert!(
        n <= patterns.len() + extra.len(),
        "scaled_patterns supports up to {} patterns",
        patterns.len() + extra.len()
    );
    patterns.extend(extra);
    patterns.truncate(n);
    patterns
}

/// The seed lexicon grown with synthetic indicators (`kw0`, `kw1`, ...)
/// spread round-robin over the classes until it holds `n` entries.
pub fn scaled_lexicon(n: usize) -> Lexicon {
    let mut lexicon = Lexicon::seed();
    let mut i = 0;
    while lexicon.len() < n {
        let class = AffectClass::ALL[i % AffectClass::ALL.len()];
        lexicon
            .insert(
                &format!("kw{i}"),
                ClassSet::of(&[class]),
                Provenance::Expansion,
            )
            .expect("synthetic entry is valid");
        i += 1;
    }
    lexicon
}

const FILLER: &[&str] = &[
    "the",
    "a",
    "an",
    "i",
    "you",
    "we",
    "they",
    "it",
    "was",
    "were",
    "in",
    "on",
    "at",
    "of",
    "with",
    "and",
    "or",
    "my",
    "your",
    "their",
    "here",
    "there",
    "today",
    "yesterday",
    "again",
    "still",
    "game",
    "team",
    "video",
    "photo",
    "story",
    "thread",
    "post",
    "comment",
    "update",
    "news",
    "dog",
    "cat",
    "recipe",
    "song",
    "movie",
    "show",
    "season",
    "episode",
    "goal",
    "weather",
    "coffee",
    "morning",
    "night",
    "work",
    "home",
    "school",
    "city",
    "friend",
    "family",
    "time",
    "year",
    "week",
    "thing",
    "stuff",
    "part",
    "moment",
    "place",
];

const MATCH_TEMPLATES: &[&str] = &[
    "this is {E} {I}",
    "that was {E} {I}",
    "{E} {I} to see this",
    "i am {E} {I} about this",
    "what a {I} moment",
    "some people are {E} {I}",
    "he is {E} {I}",
    "so {I} honestly",
];

const EXAGGERATOR_POOL: &[&str] = &["so", "very", "really", "extremely", "super", "totally"];

/// Configuration for [`synthetic_corpus`].
#[derive(Debug, Clone)]
pub struct SynthesisConfig {
    pub seed: u64,
    pub n_posts: usize,
    pub comments_per_post: usize,
    /// Fraction of comments drawn from matching templates.
    pub match_fraction: f64,
    /// Fraction of posts given a sub-threshold-length text.
    pub short_post_fraction: f64,
    /// Probability that a matching comment reuses the post's topic
    /// indicator instead of a random one. Comments on one post tend to
    /// react the same way; this is what pushes posts over the support
    /// threshold.
    pub topic_bias: f64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_posts: 1000,
            comments_per_post: 10,
            match_fraction: 0.3,
            short_post_fraction: 0.02,
            topic_bias: 0.7,
        }
    }
}

/// Generates a corpus whose comments are a mix of template sentences that
/// exercise the patterns and random filler.
pub fn synthetic_corpus(cfg: &SynthesisConfig, lexicon: &Lexicon) -> (Vec<Post>, Vec<Comment>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let indicators: Vec<&str> = lexicon.iter_sorted().iter().map(|(k, _)| *k).collect();
    assert!(!indicators.is_empty(), "lexicon must not be empty");

    let width = cfg.n_posts.to_string().len();
    let mut posts = Vec::with_capacity(cfg.n_posts);
    let mut comments = Vec::with_capacity(cfg.n_posts * cfg.comments_per_post);
    for pi in 0..cfg.n_posts {
        let post_id = format!("p{pi:0width$}");
        let text = if rng.gen_bool(cfg.short_post_fraction) {
            "ok".to_string()
        } else {
            filler_sentence(&mut rng, 6, 12)
        };
        posts.push(Post {
            post_id: post_id.clone(),
            text,
        });
        let topic = *indicators.choose(&mut rng).unwrap();
        for ci in 0..cfg.comments_per_post {
            let text = if rng.gen_bool(cfg.match_fraction) {
                let indicator = if rng.gen_bool(cfg.topic_bias) {
                    topic
                } else {
                    *indicators.choose(&mut rng).unwrap()
                };
                template_sentence(&mut rng, indicator)
            } else {
                filler_sentence(&mut rng, 4, 14)
            };
            comments.push(Comment {
                comment_id: format!("{post_id}-c{ci}"),
                post_id: post_id.clone(),
                text,
            });
        }
    }
    (posts, comments)
}

fn filler_sentence(rng: &mut ChaCha8Rng, min_words: usize, max_words: usize) -> String {
    let n = rng.gen_range(min_words..=max_words);
    let words: Vec<&str> = (0..n).map(|_| *FILLER.choose(rng).unwrap()).collect();
    words.join(" ")
}

fn template_sentence(rng: &mut ChaCha8Rng, indicator: &str) -> String {
    let template = MATCH_TEMPLATES.choose(rng).unwrap();
    let exaggerator = EXAGGERATOR_POOL.choose(rng).unwrap();
    template
        .replace("{E}", exaggerator)
        .replace("{I}", indicator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_artifacts_hit_requested_sizes() {
        assert_eq!(scaled_patterns(23).len(), 23);
        assert_eq!(scaled_lexicon(163).len(), 163);
        // Names stay unique after scaling.
        let patterns = scaled_patterns(23);
        let mut names: Vec<&str> = patterns.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 23);
    }

    #[test]
    fn corpus_generation_is_deterministic_in_seed() {
        let cfg = SynthesisConfig {
            n_posts: 20,
            ..SynthesisConfig::default()
        };
        let lexicon = Lexicon::seed();
        let (p1, c1) = synthetic_corpus(&cfg, &lexicon);
        let (p2, c2) = synthetic_corpus(&cfg, &lexicon);
        assert_eq!(p1, p2);
        assert_eq!(c1, c2);
        assert_eq!(c1.len(), 200);
    }

    #[test]
    fn different_seeds_differ() {
        let lexicon = Lexicon::seed();
        let a = synthetic_corpus(
            &SynthesisConfig {
                seed: 1,
                n_posts: 10,
                ..SynthesisConfig::default()
            },
            &lexicon,
        );
        let b = synthetic_corpus(
            &SynthesisConfig {
                seed: 2,
                n_posts: 10,
                ..SynthesisConfig::default()
            },
            &lexicon,
        );
        assert_ne!(a.1, b.1);
    }
}
