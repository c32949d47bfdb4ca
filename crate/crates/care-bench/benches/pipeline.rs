//! Pipeline benchmarks: single-comment matching, corpus annotation
//! throughput at several scales, and the expansion counting pass.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use care_core::aggregate::{annotate_corpus, AggregationConfig};
use care_core::expand::{
    collect_ngrams, propose_lexicon_candidates, propose_pattern_candidates, ExpansionConfig,
};
use care_core::pipeline::Artifacts;
use care_core::synth::{scaled_lexicon, scaled_patterns, synthetic_corpus, SynthesisConfig};
use care_core::Matcher;

fn bench_label_comment(c: &mut Criterion) {
    let artifacts = Artifacts::seed();
    let matcher = artifacts.matcher();
    let cases = [
        ("match_simple", "this is so funny"),
        ("match_long", "I was bored at first but honestly this is soooo funny I watched it twice. So sad it ends there."),
        ("no_match", "the meeting got moved to thursday again for some reason"),
        ("negated", "this is not funny at all"),
    ];
    let mut group = c.benchmark_group("label_comment");
    for (name, text) in cases {
        group.bench_function(name, |b| {
            b.iter(|| matcher.label_comment("c", std::hint::black_box(text)))
        });
    }
    group.finish();
}

fn bench_annotate_corpus(c: &mut Criterion) {
    let patterns = scaled_patterns(23);
    let lexicon = scaled_lexicon(163);
    let lists = care_core::WordLists::seed();
    let matcher = Matcher::new(&patterns, &lexicon, &lists);
    let cfg = AggregationConfig::default();

    let mut group = c.benchmark_group("annotate_corpus");
    group.sample_size(10);
    for n_posts in [100usize, 1_000, 10_000] {
        let synth = SynthesisConfig {
            seed: 7,
            n_posts,
            comments_per_post: 10,
            ..SynthesisConfig::default()
        };
        let (posts, comments) = synthetic_corpus(&synth, &lexicon);
        group.throughput(Throughput::Elements(comments.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(comments.len()), &(), |b, _| {
            b.iter(|| annotate_corpus(&posts, &comments, &matcher, &cfg))
        });
    }
    group.finish();
}

fn bench_expansion(c: &mut Criterion) {
    let artifacts = Artifacts::seed();
    let matcher = artifacts.matcher();
    let synth = SynthesisConfig {
        seed: 21,
        n_posts: 2_000,
        comments_per_post: 10,
        match_fraction: 0.5,
        ..SynthesisConfig::default()
    };
    let (posts, comments) = synthetic_corpus(&synth, &artifacts.lexicon);
    let annotated = annotate_corpus(&posts, &comments, &matcher, &AggregationConfig::default());
    let cfg = ExpansionConfig {
        f_lexicon: 50,
        f_pattern: 10,
        count_distinct_comments: false,
    };

    let mut group = c.benchmark_group("expansion");
    group.sample_size(10);
    group.bench_function("collect_and_propose", |b| {
        b.iter(|| {
            let stats = collect_ngrams(&annotated.annotations, &comments, &matcher, &cfg);
            let lex = propose_lexicon_candidates(&stats, &cfg, matcher.word_lists());
            let pat = propose_pattern_candidates(&stats, &cfg);
            (lex.len(), pat.len())
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_label_comment,
    bench_annotate_corpus,
    bench_expansion
);
criterion_main!(benches);
