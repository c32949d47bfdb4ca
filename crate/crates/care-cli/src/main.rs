//! `care`: annotate social-media corpora with affective-response labels,
//! run the pattern/lexicon expansion loop, and evaluate against gold
//! annotations. File-based I/O only; exit codes: 0 success, 1 validation
//! error, 2 i/o error.

mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use care_core::aggregate::{ensemble_annotate, AggregationConfig, DEFAULT_ENSEMBLE_T_EXT};
use care_core::corpus::{
    read_comments, read_exclusions, read_external_labels, read_gold, read_jsonl, read_posts,
    to_jsonl,
};
use care_core::eval::{
    agreement_rates, class_prevalence, kappa_by_class, label_intersection_rate, match_fp_rates,
    match_fp_tsv, sweep_csv, threshold_sweep,
};
use care_core::expand::{
    collect_ngrams, lexicon_candidates_tsv, load_review, pattern_candidates_tsv,
    propose_lexicon_candidates, propose_pattern_candidates, ExpansionConfig,
};
use care_core::pattern::save_patterns;
use care_core::pipeline::{
    comment_class_labels, corpus_match_records, export_training_data, post_comment_labels,
    run_pipeline, with_parallelism, ArtifactPaths, Artifacts, ExportFormat,
};
use care_core::taxonomy::{AffectClass, ClassMapping};
use care_core::{count_instantiations, CareError, PostAnnotation, Result};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "care",
    version,
    about = "Affective-response annotation from comment patterns",
    propagate_version = true
)]
struct Cli {
    /// Declarative TOML config; explicit flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate a corpus: match comments, aggregate per post, write JSONL.
    Annotate(AnnotateArgs),
    /// Mine n-gram candidates for new lexicon entries and patterns.
    Expand(ExpandArgs),
    /// Apply a reviewed candidate file to the lexicon and pattern list.
    ReviewApply(ReviewApplyArgs),
    /// Evaluation reports against gold annotations.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Export annotated posts as training data.
    Export(ExportArgs),
    /// Closed-form size of the pattern/indicator/exaggerator space.
    CountInstantiations(CountArgs),
}

#[derive(Args, Default)]
struct ArtifactArgs {
    /// Pattern DSL file (default: built-in seed patterns).
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Lexicon TSV (default: built-in seed lexicon).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Exaggerator word list, one token per line.
    #[arg(long)]
    exaggerators: Option<PathBuf>,
    /// Negation word list.
    #[arg(long)]
    negations: Option<PathBuf>,
    /// Contrast-marker word list.
    #[arg(long)]
    contrast: Option<PathBuf>,
    /// Stop-word list (used by expansion candidate filtering).
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SummaryFormat {
    Text,
    Json,
}

#[derive(Args)]
struct AnnotateArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,
    /// Posts JSONL: {"post_id", "text"}.
    #[arg(long)]
    posts: Option<PathBuf>,
    /// Comments JSONL: {"comment_id", "post_id", "text"}.
    #[arg(long)]
    comments: Option<PathBuf>,
    /// Output annotations JSONL.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Support threshold t.
    #[arg(long, short = 't')]
    threshold: Option<u32>,
    /// Per-class threshold override, e.g. --class-threshold amused=3.
    #[arg(long = "class-threshold", value_name = "CLASS=T")]
    class_thresholds: Vec<String>,
    /// Exclusion pairs TSV: `pattern_name<TAB>indicator`.
    #[arg(long)]
    exclusions: Option<PathBuf>,
    /// Minimum post text length in characters.
    #[arg(long)]
    min_post_chars: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Fuse with external comment labels (ensemble annotation), reading
    /// them from --external-labels or the config's `[paths].external_labels`.
    #[arg(long)]
    ensemble: bool,
    /// External comment labels JSONL; implies --ensemble.
    #[arg(long)]
    external_labels: Option<PathBuf>,
    /// Class mapping TSV for external label names (default: built-in).
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Support threshold for the external side of the ensemble.
    #[arg(long)]
    t_ext: Option<u32>,
    /// Summary format on stdout.
    #[arg(long, value_enum, default_value = "text")]
    summary: SummaryFormat,
    /// Also write N randomly sampled unmatched comments for inspection.
    #[arg(long, value_name = "N")]
    sample_unmatched: Option<usize>,
    /// Where to write the sample (default: `<out>.unmatched.jsonl`).
    #[arg(long)]
    sample_out: Option<PathBuf>,
    /// Seed for sampling utilities.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,
    #[arg(long)]
    posts: Option<PathBuf>,
    #[arg(long)]
    comments: Option<PathBuf>,
    /// Annotations JSONL from a prior annotate run.
    #[arg(long)]
    annotations: PathBuf,
    /// Output TSV for lexicon candidates.
    #[arg(long, default_value = "candidates_lexicon.tsv")]
    out_lexicon: PathBuf,
    /// Output TSV for pattern candidates.
    #[arg(long, default_value = "candidates_pattern.tsv")]
    out_patterns: PathBuf,
    #[arg(long)]
    f_lexicon: Option<u64>,
    #[arg(long)]
    f_pattern: Option<u64>,
    /// Count each n-gram once per comment instead of per occurrence.
    #[arg(long)]
    distinct_comments: bool,
}

#[derive(Args)]
struct ReviewApplyArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,
    /// Review file: accept-lex / accept-pat / reject lines.
    #[arg(long)]
    review: PathBuf,
    /// Where to write the expanded lexicon TSV.
    #[arg(long)]
    out_lexicon: PathBuf,
    /// Where to write the expanded pattern DSL file.
    #[arg(long)]
    out_patterns: PathBuf,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Annotator agreement with predicted labels at k = 1, 2, 3.
    Agreement(AgreementArgs),
    /// Per-class Fleiss' kappa over the gold annotations.
    Kappa(KappaArgs),
    /// Precision/recall of each class across thresholds.
    Sweep(SweepArgs),
    /// False-positive rate per (pattern, indicator) pair.
    Fp(FpArgs),
    /// Label prevalence and multi-label histogram of annotations.
    Prevalence(PrevalenceArgs),
    /// How often annotated labels appear in a predicted label set.
    Intersect(IntersectArgs),
}

#[derive(Args)]
struct AgreementArgs {
    /// Gold JSONL: {"post_id", "annotators": [[...], ...]}.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: ReportFormat,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KappaArgs {
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Restrict to one class.
    #[arg(long)]
    class: Option<AffectClass>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: ReportFormat,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    posts: Option<PathBuf>,
    #[arg(long)]
    comments: Option<PathBuf>,
    #[arg(long)]
    exclusions: Option<PathBuf>,
    /// Sweep thresholds 0..=t_max.
    #[arg(long, default_value_t = 9)]
    t_max: u32,
    /// Gold consensus level.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    min_post_chars: Option<usize>,
    /// Output CSV (default: stdout).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FpArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    posts: Option<PathBuf>,
    #[arg(long)]
    comments: Option<PathBuf>,
    /// Suppress pairs supported by fewer posts than this.
    #[arg(long, default_value_t = 10)]
    min_support: u64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    format: ReportFormat,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PrevalenceArgs {
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: ReportFormat,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapSide {
    Annotated,
    Predicted,
}

#[derive(Args)]
struct IntersectArgs {
    /// Annotated labels JSONL: {"id"|"post_id"|"comment_id", "labels"}.
    #[arg(long)]
    annotated: PathBuf,
    /// Predicted labels JSONL, same shape.
    #[arg(long)]
    predicted: PathBuf,
    /// Class mapping TSV applied to one side's label names.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Which side the mapping translates.
    #[arg(long, value_enum, default_value = "predicted")]
    map_side: MapSide,
    #[arg(long, value_enum, default_value = "tsv")]
    format: ReportFormat,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    posts: Option<PathBuf>,
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Collapse labels to positive/negative valence.
    #[arg(long)]
    valence: bool,
    #[arg(long)]
    min_post_chars: Option<usize>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    artifacts: ArtifactArgs,
    /// Pattern count (default: loaded pattern file).
    #[arg(long, value_name = "N")]
    n_patterns: Option<u64>,
    /// Indicator count (default: loaded lexicon).
    #[arg(long, value_name = "N")]
    n_indicators: Option<u64>,
    /// Exaggerator count (default: loaded word list).
    #[arg(long, value_name = "N")]
    n_exaggerators: Option<u64>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CARE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(cause) = source {
            eprintln!("  caused by: {cause}");
            source = cause.source();
        }
        std::process::exit(if e.is_validation() { 1 } else { 2 });
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => config::load_config(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Annotate(args) => annotate(args, &cfg),
        Command::Expand(args) => expand(args, &cfg),
        Command::ReviewApply(args) => review_apply(args, &cfg),
        Command::Eval(cmd) => eval(cmd, &cfg),
        Command::Export(args) => export(args, &cfg),
        Command::CountInstantiations(args) => count(args, &cfg),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing

fn pick(flag: Option<PathBuf>, cfg: Option<PathBuf>) -> Option<PathBuf> {
    flag.or(cfg)
}

fn require(opt: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    opt.ok_or_else(|| {
        CareError::Validation(format!(
            "missing required path `{what}` (pass --{what} or set [paths].{what} in the config)"
        ))
    })
}

fn load_artifacts(args: &ArtifactArgs, cfg: &FileConfig) -> Result<Artifacts> {
    let paths = ArtifactPaths {
        patterns: pick(args.patterns.clone(), cfg.paths.patterns.clone()),
        lexicon: pick(args.lexicon.clone(), cfg.paths.lexicon.clone()),
        exaggerators: pick(args.exaggerators.clone(), cfg.paths.exaggerators.clone()),
        negations: pick(args.negations.clone(), cfg.paths.negations.clone()),
        contrast: pick(args.contrast.clone(), cfg.paths.contrast.clone()),
        stopwords: pick(args.stopwords.clone(), cfg.paths.stopwords.clone()),
    };
    Artifacts::load(&paths)
}

fn parse_class_thresholds(pairs: &[String]) -> Result<BTreeMap<AffectClass, u32>> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (class, value) = pair.split_once('=').ok_or_else(|| {
            CareError::Validation(format!("--class-threshold expects CLASS=T, got `{pair}`"))
        })?;
        let class: AffectClass = class.parse()?;
        let value: u32 = value.parse().map_err(|_| {
            CareError::Validation(format!("invalid threshold `{value}` for {class}"))
        })?;
        map.insert(class, value);
    }
    Ok(map)
}

fn aggregation_config(
    threshold: Option<u32>,
    class_thresholds: &[String],
    exclusions: Option<PathBuf>,
    min_post_chars: Option<usize>,
    cfg: &FileConfig,
) -> Result<AggregationConfig> {
    let mut out = AggregationConfig {
        default_threshold: threshold.unwrap_or(cfg.aggregation.default_threshold),
        min_post_chars: min_post_chars.unwrap_or(cfg.aggregation.min_post_chars),
        ..AggregationConfig::default()
    };
    for (name, t) in &cfg.aggregation.per_class {
        out.per_class_thresholds.insert(name.parse()?, *t);
    }
    for (class, t) in parse_class_thresholds(class_thresholds)? {
        out.per_class_thresholds.insert(class, t);
    }
    if let Some(path) = pick(exclusions, cfg.paths.exclusions.clone()) {
        out.exclusions = read_exclusions(&path)?;
    }
    Ok(out)
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => care_core::write_atomic(path, content.as_bytes()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CareError::Validation(format!("serialization failed: {e}")))
}

fn load_mapping(path: Option<&Path>) -> Result<ClassMapping> {
    match path {
        Some(p) => ClassMapping::load(p),
        None => Ok(ClassMapping::builtin()),
    }
}

// ---------------------------------------------------------------------------
// annotate

fn annotate(args: AnnotateArgs, cfg: &FileConfig) -> Result<()> {
    let artifacts = load_artifacts(&args.artifacts, cfg)?;
    let posts_path = require(pick(args.posts.clone(), cfg.paths.posts.clone()), "posts")?;
    let comments_path = require(
        pick(args.comments.clone(), cfg.paths.comments.clone()),
        "comments",
    )?;
    let out_path = require(pick(args.out.clone(), cfg.paths.output.clone()), "out")?;
    let agg = aggregation_config(
        args.threshold,
        &args.class_thresholds,
        args.exclusions.clone(),
        args.min_post_chars,
        cfg,
    )?;
    agg.validate(&artifacts.patterns)?;
    let parallelism = args.parallelism.unwrap_or(cfg.run.parallelism);

    if args.ensemble || args.external_labels.is_some() {
        let external_path = require(
            pick(
                args.external_labels.clone(),
                cfg.paths.external_labels.clone(),
            ),
            "external-labels",
        )?;
        return annotate_ensemble(
            &args,
            cfg,
            &artifacts,
            &agg,
            &posts_path,
            &comments_path,
            &out_path,
            &external_path,
            parallelism,
        );
    }

    let summary = run_pipeline(
        &artifacts,
        &posts_path,
        &comments_path,
        &out_path,
        &agg,
        parallelism,
    )?;

    if let Some(n) = args.sample_unmatched {
        let sample_path = args
            .sample_out
            .clone()
            .unwrap_or_else(|| out_path.with_extension("unmatched.jsonl"));
        sample_unmatched(
            &artifacts,
            &posts_path,
            &comments_path,
            &agg,
            n,
            args.seed.or(cfg.run.seed).unwrap_or(42),
            &sample_path,
        )?;
    }

    match args.summary {
        SummaryFormat::Json => print!("{}", to_json_pretty(&summary)?),
        SummaryFormat::Text => {
            let s = &summary.annotate;
            println!("posts            {}", s.posts_total);
            println!("comments         {}", s.comments_total);
            println!("comments matched {}", s.comments_matched);
            println!("dangling         {}", s.dangling_comments);
            println!("skipped short    {}", s.posts_skipped_short);
            println!("posts annotated  {}", s.posts_annotated);
            for (class, n) in &s.per_class {
                println!("  {class:<10} {n}");
            }
            println!("elapsed          {} ms", summary.elapsed_ms);
            println!("wrote            {}", summary.output);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn annotate_ensemble(
    args: &AnnotateArgs,
    cfg: &FileConfig,
    artifacts: &Artifacts,
    agg: &AggregationConfig,
    posts_path: &Path,
    comments_path: &Path,
    out_path: &Path,
    external_path: &Path,
    parallelism: usize,
) -> Result<()> {
    let mut posts = read_posts(posts_path)?;
    // Same post-length filter the plain pipeline applies.
    posts.retain(|p| p.text.chars().count() >= agg.min_post_chars);
    let comments = read_comments(comments_path)?;
    let external = read_external_labels(external_path)?;
    let mapping =
        load_mapping(pick(args.mapping.clone(), cfg.paths.class_mapping.clone()).as_deref())?;
    let matcher = artifacts.matcher();
    // Counts both true orphans and comments on length-filtered posts.
    let (labels, skipped_comments) = with_parallelism(parallelism, || {
        comment_class_labels(&posts, &comments, &matcher, agg)
    });
    let t_ext = args.t_ext.unwrap_or(DEFAULT_ENSEMBLE_T_EXT);
    let (annotations, diagnostics) =
        ensemble_annotate(&labels, &external, &mapping, agg.default_threshold, t_ext);
    care_core::write_atomic(out_path, to_jsonl(&annotations)?.as_bytes())?;

    let report = json!({
        "posts_annotated": annotations.len(),
        "t_care": agg.default_threshold,
        "t_ext": t_ext,
        "comments_without_eligible_post": skipped_comments,
        "unknown_external_comments": diagnostics.unknown_comments,
        "unmapped_external_names": diagnostics.unmapped_names,
        "output": out_path.display().to_string(),
    });
    match args.summary {
        SummaryFormat::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        SummaryFormat::Text => {
            println!("posts annotated  {}", annotations.len());
            println!("t_care/t_ext     {}/{}", agg.default_threshold, t_ext);
            println!("skipped comments {skipped_comments}");
            println!("unknown external {}", diagnostics.unknown_comments);
            for (name, n) in &diagnostics.unmapped_names {
                println!("  unmapped {name:<14} {n}");
            }
            println!("wrote            {}", out_path.display());
        }
    }
    Ok(())
}

fn sample_unmatched(
    artifacts: &Artifacts,
    posts_path: &Path,
    comments_path: &Path,
    agg: &AggregationConfig,
    n: usize,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let posts = read_posts(posts_path)?;
    let comments = read_comments(comments_path)?;
    let matcher = artifacts.matcher();
    let (labels, _) = comment_class_labels(&posts, &comments, &matcher, agg);
    let unmatched_ids: std::collections::HashSet<&str> = labels
        .iter()
        .filter(|l| l.classes.is_empty())
        .map(|l| l.comment_id.as_str())
        .collect();
    let mut pool: Vec<&care_core::corpus::Comment> = comments
        .iter()
        .filter(|c| unmatched_ids.contains(c.comment_id.as_str()))
        .collect();
    log::info!(
        "sampling {n} of {} unmatched comments with seed {seed}",
        pool.len()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    pool.truncate(n);
    pool.sort_by(|a, b| a.comment_id.cmp(&b.comment_id));
    care_core::write_atomic(out, to_jsonl(&pool)?.as_bytes())
}

// ---------------------------------------------------------------------------
// expand / review-apply

fn expand(args: ExpandArgs, cfg: &FileConfig) -> Result<()> {
    let artifacts = load_artifacts(&args.artifacts, cfg)?;
    let posts_path = require(pick(args.posts.clone(), cfg.paths.posts.clone()), "posts")?;
    let comments_path = require(
        pick(args.comments.clone(), cfg.paths.comments.clone()),
        "comments",
    )?;
    let expansion = ExpansionConfig {
        f_lexicon: args.f_lexicon.unwrap_or(cfg.expansion.f_lexicon),
        f_pattern: args.f_pattern.unwrap_or(cfg.expansion.f_pattern),
        count_distinct_comments: args.distinct_comments || cfg.expansion.count_distinct_comments,
    };
    expansion.validate()?;

    let posts = read_posts(&posts_path)?;
    let comments = read_comments(&comments_path)?;
    let annotations: Vec<PostAnnotation> = read_jsonl(&args.annotations)?;
    // Sanity: annotations must reference this corpus.
    let known: std::collections::HashSet<&str> = posts.iter().map(|p| p.post_id.as_str()).collect();
    if !annotations.is_empty()
        && !annotations
            .iter()
            .any(|a| known.contains(a.post_id.as_str()))
    {
        return Err(CareError::Validation(
            "annotations reference none of the posts in this corpus".into(),
        ));
    }

    let matcher = artifacts.matcher();
    let stats = collect_ngrams(&annotations, &comments, &matcher, &expansion);
    let lexicon_candidates = propose_lexicon_candidates(&stats, &expansion, &artifacts.lists);
    let pattern_candidates = propose_pattern_candidates(&stats, &expansion);

    care_core::write_atomic(
        &args.out_lexicon,
        lexicon_candidates_tsv(&lexicon_candidates).as_bytes(),
    )?;
    care_core::write_atomic(
        &args.out_patterns,
        pattern_candidates_tsv(&pattern_candidates).as_bytes(),
    )?;
    println!(
        "lexicon candidates  {} -> {}",
        lexicon_candidates.len(),
        args.out_lexicon.display()
    );
    println!(
        "pattern candidates  {} -> {}",
        pattern_candidates.len(),
        args.out_patterns.display()
    );
    Ok(())
}

fn review_apply(args: ReviewApplyArgs, cfg: &FileConfig) -> Result<()> {
    let artifacts = load_artifacts(&args.artifacts, cfg)?;
    let review = load_review(&args.review)?;
    let (lexicon, patterns) = care_core::expand::apply_reviewed_candidates(
        &artifacts.lexicon,
        &artifacts.patterns,
        &review,
    )?;
    lexicon.save(&args.out_lexicon)?;
    save_patterns(&patterns, &args.out_patterns)?;
    println!(
        "lexicon {} -> {} entries -> {}",
        artifacts.lexicon.len(),
        lexicon.len(),
        args.out_lexicon.display()
    );
    println!(
        "patterns {} -> {} -> {}",
        artifacts.patterns.len(),
        patterns.len(),
        args.out_patterns.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// eval

fn eval(cmd: EvalCommand, cfg: &FileConfig) -> Result<()> {
    match cmd {
        EvalCommand::Agreement(args) => {
            let gold_path = require(pick(args.gold.clone(), cfg.paths.gold.clone()), "gold")?;
            let gold = read_gold(&gold_path)?;
            let annotations: Vec<PostAnnotation> = read_jsonl(&args.annotations)?;
            let report = agreement_rates(&gold, &annotations, &[1, 2, 3])?;
            let content = match args.format {
                ReportFormat::Tsv => report.to_tsv(),
                ReportFormat::Json => to_json_pretty(&report)?,
            };
            emit(args.out.as_deref(), &content)
        }
        EvalCommand::Kappa(args) => {
            let gold_path = require(pick(args.gold.clone(), cfg.paths.gold.clone()), "gold")?;
            let gold = read_gold(&gold_path)?;
            let rows = match args.class {
                Some(class) => vec![(class, Some(care_core::eval::fleiss_kappa(&gold, class)?))],
                None => kappa_by_class(&gold)?,
            };
            let defined: Vec<f64> = rows.iter().filter_map(|(_, k)| *k).collect();
            let average =
                (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            let content = match args.format {
                ReportFormat::Tsv => {
                    let mut out = String::from("class\tkappa\n");
                    for (class, kappa) in &rows {
                        match kappa {
                            Some(v) => out.push_str(&format!("{class}\t{v:.4}\n")),
                            None => out.push_str(&format!("{class}\tdegenerate\n")),
                        }
                    }
                    if let Some(avg) = average {
                        out.push_str(&format!("average\t{avg:.4}\n"));
                    }
                    out
                }
                ReportFormat::Json => to_json_pretty(&json!({
                    "rows": rows
                        .iter()
                        .map(|(c, k)| json!({"class": c.name(), "kappa": k}))
                        .collect::<Vec<_>>(),
                    "average": average,
                }))?,
            };
            emit(args.out.as_deref(), &content)
        }
        EvalCommand::Sweep(args) => {
            let artifacts = load_artifacts(&args.artifacts, cfg)?;
            let gold_path = require(pick(args.gold.clone(), cfg.paths.gold.clone()), "gold")?;
            let posts_path = require(pick(args.posts.clone(), cfg.paths.posts.clone()), "posts")?;
            let comments_path = require(
                pick(args.comments.clone(), cfg.paths.comments.clone()),
                "comments",
            )?;
            let gold = read_gold(&gold_path)?;
            let posts = read_posts(&posts_path)?;
            let comments = read_comments(&comments_path)?;
            let agg =
                aggregation_config(None, &[], args.exclusions.clone(), args.min_post_chars, cfg)?;
            agg.validate(&artifacts.patterns)?;
            let matcher = artifacts.matcher();
            let (corpus, _) = post_comment_labels(&posts, &comments, &matcher, &agg);
            let ts: Vec<u32> = (0..=args.t_max).collect();
            let points = threshold_sweep(&gold, &corpus, &ts, args.k, agg.min_post_chars)?;
            emit(args.out.as_deref(), &sweep_csv(&points))
        }
        EvalCommand::Fp(args) => {
            let artifacts = load_artifacts(&args.artifacts, cfg)?;
            let gold_path = require(pick(args.gold.clone(), cfg.paths.gold.clone()), "gold")?;
            let posts_path = require(pick(args.posts.clone(), cfg.paths.posts.clone()), "posts")?;
            let comments_path = require(
                pick(args.comments.clone(), cfg.paths.comments.clone()),
                "comments",
            )?;
            let gold = read_gold(&gold_path)?;
            let posts = read_posts(&posts_path)?;
            let comments = read_comments(&comments_path)?;
            let matcher = artifacts.matcher();
            let records = corpus_match_records(&posts, &comments, &matcher);
            let rows = match_fp_rates(&records, &gold, args.k, args.min_support);
            let content = match args.format {
                ReportFormat::Tsv => match_fp_tsv(&rows),
                ReportFormat::Json => to_json_pretty(&rows)?,
            };
            emit(args.out.as_deref(), &content)
        }
        EvalCommand::Prevalence(args) => {
            let annotations: Vec<PostAnnotation> = read_jsonl(&args.annotations)?;
            let report = class_prevalence(&annotations);
            let content = match args.format {
                ReportFormat::Tsv => report.to_tsv(),
                ReportFormat::Json => to_json_pretty(&report)?,
            };
            emit(args.out.as_deref(), &content)
        }
        EvalCommand::Intersect(args) => {
            let mapping = args
                .mapping
                .as_deref()
                .map(ClassMapping::load)
                .transpose()?;
            let annotated = load_labeled_items(
                &args.annotated,
                if args.map_side == MapSide::Annotated {
                    mapping.as_ref()
                } else {
                    None
                },
            )?;
            let predicted = load_labeled_items(
                &args.predicted,
                if args.map_side == MapSide::Predicted {
                    mapping.as_ref()
                } else {
                    None
                },
            )?;
            let report = label_intersection_rate(&annotated, &predicted)?;
            let content = match args.format {
                ReportFormat::Tsv => report.to_tsv(),
                ReportFormat::Json => to_json_pretty(&report)?,
            };
            emit(args.out.as_deref(), &content)
        }
    }
}

#[derive(Debug, Deserialize)]
struct LabeledItem {
    #[serde(alias = "post_id", alias = "comment_id")]
    id: String,
    labels: Vec<String>,
}

/// Loads `{"id"|"post_id"|"comment_id", "labels": [...]}` rows. With a
/// mapping, label names are translated and unmapped ones dropped (logged);
/// without one they must be class names.
fn load_labeled_items(
    path: &Path,
    mapping: Option<&ClassMapping>,
) -> Result<Vec<(String, care_core::ClassSet)>> {
    let rows: Vec<LabeledItem> = read_jsonl(path)?;
    let mut unmapped: BTreeMap<String, u64> = BTreeMap::new();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut set = care_core::ClassSet::empty();
        for name in &row.labels {
            match mapping {
                Some(m) => match m.map_external(name) {
                    Some(class) => set.insert(class),
                    None => *unmapped.entry(name.to_lowercase()).or_insert(0) += 1,
                },
                None => set.insert(name.parse()?),
            }
        }
        out.push((row.id, set));
    }
    for (name, n) in &unmapped {
        log::warn!("{}: unmapped label `{name}` on {n} items", path.display());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// export / count-instantiations

fn export(args: ExportArgs, cfg: &FileConfig) -> Result<()> {
    let posts_path = require(pick(args.posts.clone(), cfg.paths.posts.clone()), "posts")?;
    let annotations: Vec<PostAnnotation> = read_jsonl(&args.annotations)?;
    let posts = read_posts(&posts_path)?;
    let format = if args.valence {
        ExportFormat::Valence
    } else {
        ExportFormat::Classes
    };
    let min_chars = args
        .min_post_chars
        .unwrap_or(cfg.aggregation.min_post_chars);
    let (examples, summary) = export_training_data(&annotations, &posts, format, min_chars);
    care_core::write_atomic(&args.out, to_jsonl(&examples)?.as_bytes())?;
    println!("written          {}", summary.written);
    println!("missing post     {}", summary.skipped_missing_post);
    println!("short text       {}", summary.skipped_short_text);
    println!("wrote            {}", args.out.display());
    Ok(())
}

fn count(args: CountArgs, cfg: &FileConfig) -> Result<()> {
    let artifacts = load_artifacts(&args.artifacts, cfg)?;
    let n_patterns = args.n_patterns.unwrap_or(artifacts.patterns.len() as u64);
    let n_indicators = args.n_indicators.unwrap_or(artifacts.lexicon.len() as u64);
    let n_exaggerators = args
        .n_exaggerators
        .unwrap_or(artifacts.lists.exaggerator_count() as u64);
    let (expressions, instantiations) =
        count_instantiations(n_patterns, n_indicators, n_exaggerators);
    println!("patterns       {n_patterns}");
    println!("indicators     {n_indicators}");
    println!("exaggerators   {n_exaggerators}");
    println!("expressions    {expressions}");
    println!("instantiations {instantiations}");
    Ok(())
}
