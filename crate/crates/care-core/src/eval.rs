//! Evaluation against human annotations: agreement rates, Fleiss' kappa,
//! precision/recall threshold sweeps, per-match false-positive rates,
//! label prevalence, and cross-source label intersection.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::aggregate::{aggregate_post, AggregationConfig, PostAnnotation};
use crate::corpus::GoldPost;
use crate::error::{CareError, Result};
use crate::matcher::MatchRecord;
use crate::taxonomy::{AffectClass, ClassSet};

// ---------------------------------------------------------------------------
// Annotator agreement

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AgreementRow {
    /// Consensus level: how many annotators must share a label.
    pub k: usize,
    /// % of posts where at least one predicted label is confirmed.
    pub any_pct: f64,
    /// % of posts where every predicted label is confirmed.
    pub all_pct: f64,
    /// % of posts where annotators agree on a label outside the prediction.
    pub other_pct: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AgreementReport {
    pub posts_evaluated: usize,
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("k\tany_care\tall_care\tother\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{:.1}\t{:.1}\t{:.1}\n",
                row.k, row.any_pct, row.all_pct, row.other_pct
            ));
        }
        out
    }
}

/// Agreement between predictions and gold labels at each consensus level.
/// Gold posts without a prediction are skipped; an empty join is an error.
pub fn agreement_rates(
    gold: &[GoldPost],
    predicted: &[PostAnnotation],
    ks: &[usize],
) -> Result<AgreementReport> {
    let by_id: HashMap<&str, &PostAnnotation> = predicted
        .iter()
        .filter(|a| !a.labels.is_empty())
        .map(|a| (a.post_id.as_str(), a))
        .collect();
    let joined: Vec<(&GoldPost, &PostAnnotation)> = gold
        .iter()
        .filter_map(|g| by_id.get(g.post_id.as_str()).map(|a| (g, *a)))
        .collect();
    if joined.is_empty() {
        return Err(CareError::Validation(
            "no overlapping posts between gold and predictions".into(),
        ));
    }

    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut any = 0usize;
        let mut all = 0usize;
        let mut other = 0usize;
        for (g, a) in &joined {
            let confirmed = g.consensus(k);
            let predicted_set = a.label_set();
            if predicted_set.intersection(confirmed) != ClassSet::EMPTY {
                any += 1;
            }
            if predicted_set.is_subset(confirmed) {
                all += 1;
            }
            if confirmed.iter().any(|c| !predicted_set.contains(c)) {
                other += 1;
            }
        }
        let pct = |n: usize| 100.0 * n as f64 / joined.len() as f64;
        rows.push(AgreementRow {
            k,
            any_pct: pct(any),
            all_pct: pct(all),
            other_pct: pct(other),
        });
    }
    Ok(AgreementReport {
        posts_evaluated: joined.len(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Fleiss' kappa

/// Standard Fleiss' kappa over the two-category table present/absent for
/// one class. Every post must have the same number of raters (at least 2).
/// Returns the degenerate-kappa error when expected agreement is 1.
pub fn fleiss_kappa(gold: &[GoldPost], class: AffectClass) -> Result<f64> {
    if gold.is_empty() {
        return Err(CareError::Validation("no gold posts for kappa".into()));
    }
    let n = gold[0].annotators.len();
    if n < 2 {
        return Err(CareError::Validation(
            "fleiss' kappa needs at least 2 raters per post".into(),
        ));
    }
    if gold.iter().any(|g| g.annotators.len() != n) {
        return Err(CareError::Validation(
            "fleiss' kappa needs an equal rater count on every post; subset to equal-n first"
                .into(),
        ));
    }

    let items = gold.len() as f64;
    let raters = n as f64;
    let mut present_total = 0.0;
    let mut p_bar = 0.0;
    for g in gold {
        let x = g.votes_for(class) as f64;
        present_total += x;
        p_bar += (x * x + (raters - x) * (raters - x) - raters) / (raters * (raters - 1.0));
    }
    p_bar /= items;
    let p_present = present_total / (items * raters);
    let p_e = p_present * p_present + (1.0 - p_present) * (1.0 - p_present);
    if (1.0 - p_e).abs() < 1e-12 {
        return Err(CareError::DegenerateKappa {
            context: class.name().to_string(),
        });
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Kappa per class plus the average over classes where it is defined.
/// Degenerate classes report `None`.
pub fn kappa_by_class(gold: &[GoldPost]) -> Result<Vec<(AffectClass, Option<f64>)>> {
    let mut rows = Vec::new();
    for class in AffectClass::ALL {
        match fleiss_kappa(gold, class) {
            Ok(v) => rows.push((class, Some(v))),
            Err(CareError::DegenerateKappa { .. }) => rows.push((class, None)),
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Threshold sweep

/// Comment-level labels of one post, the pre-aggregation unit the sweep
/// re-thresholds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostCommentLabels {
    pub post_id: String,
    /// Character count of the post text, for the minimum-length filter.
    pub text_chars: usize,
    pub comments: Vec<(String, ClassSet)>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PRPoint {
    pub class: AffectClass,
    pub threshold: u32,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// `tp / (tp + fp)`; `None` when nothing was predicted.
    pub precision: Option<f64>,
    /// `tp / (tp + fn)`; `None` when the class has no gold positives.
    pub recall: Option<f64>,
}

/// Precision/recall of each class at every threshold in `t_values`,
/// against gold labels confirmed by at least `k` annotators. The evaluated
/// universe is the set of gold posts present in `corpus`. A threshold of 0
/// behaves as 1: a label always needs a supporting comment.
pub fn threshold_sweep(
    gold: &[GoldPost],
    corpus: &[PostCommentLabels],
    t_values: &[u32],
    k: usize,
    min_post_chars: usize,
) -> Result<Vec<PRPoint>> {
    let by_id: HashMap<&str, &PostCommentLabels> =
        corpus.iter().map(|p| (p.post_id.as_str(), p)).collect();
    let universe: Vec<(&GoldPost, &PostCommentLabels)> = gold
        .iter()
        .filter_map(|g| by_id.get(g.post_id.as_str()).map(|p| (g, *p)))
        .collect();
    if universe.is_empty() {
        return Err(CareError::Validation(
            "no overlapping posts between gold and corpus".into(),
        ));
    }

    let mut points = Vec::with_capacity(t_values.len() * AffectClass::ALL.len());
    for &t in t_values {
        let cfg = AggregationConfig {
            default_threshold: t.max(1),
            min_post_chars,
            ..AggregationConfig::default()
        };
        let mut tp = [0u64; 7];
        let mut fp = [0u64; 7];
        let mut fn_ = [0u64; 7];
        for (g, p) in &universe {
            let predicted = if p.text_chars >= min_post_chars {
                aggregate_post(&p.post_id, &p.comments, &cfg).label_set()
            } else {
                ClassSet::empty()
            };
            let confirmed = g.consensus(k);
            for class in AffectClass::ALL {
                let i = class.index();
                match (predicted.contains(class), confirmed.contains(class)) {
                    (true, true) => tp[i] += 1,
                    (true, false) => fp[i] += 1,
                    (false, true) => fn_[i] += 1,
                    (false, false) => {}
                }
            }
        }
        for class in AffectClass::ALL {
            let i = class.index();
            let precision = (tp[i] + fp[i] > 0).then(|| tp[i] as f64 / (tp[i] + fp[i]) as f64);
            let recall = (tp[i] + fn_[i] > 0).then(|| tp[i] as f64 / (tp[i] + fn_[i]) as f64);
            points.push(PRPoint {
                class,
                threshold: t,
                tp: tp[i],
                fp: fp[i],
                fn_: fn_[i],
                precision,
                recall,
            });
        }
    }
    Ok(points)
}

/// Plot-ready CSV: `t,class,precision,recall` with empty cells for
/// undefined values.
pub fn sweep_csv(points: &[PRPoint]) -> String {
    let mut out = String::from("t,class,precision,recall\n");
    for p in points {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.threshold,
            p.class,
            fmt(p.precision),
            fmt(p.recall)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Per-match false-positive analysis

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MatchFpRow {
    pub pattern: String,
    pub indicator: String,
    pub classes: ClassSet,
    /// Distinct gold posts supported by this (pattern, indicator) pair.
    pub count: u64,
    pub false_positives: u64,
    pub fp_rate: f64,
}

/// Per (pattern, indicator) pair: how many gold posts it supported and how
/// often the gold consensus lacked every class the indicator maps to.
/// Pairs supported by fewer than `min_support` posts are suppressed.
pub fn match_fp_rates(
    records: &[(String, MatchRecord)],
    gold: &[GoldPost],
    k: usize,
    min_support: u64,
) -> Vec<MatchFpRow> {
    let consensus: HashMap<&str, ClassSet> = gold
        .iter()
        .map(|g| (g.post_id.as_str(), g.consensus(k)))
        .collect();

    struct PairStats<'a> {
        classes: ClassSet,
        posts: HashSet<&'a str>,
    }
    let mut pairs: BTreeMap<(String, String), PairStats<'_>> = BTreeMap::new();
    for (post_id, record) in records {
        if !consensus.contains_key(post_id.as_str()) {
            continue;
        }
        let key = (record.pattern_name.clone(), record.indicator_key());
        let entry = pairs.entry(key).or_insert_with(|| PairStats {
            classes: record.classes,
            posts: HashSet::new(),
        });
        entry.classes = entry.classes.union(record.classes);
        entry.posts.insert(post_id.as_str());
    }

    let mut rows: Vec<MatchFpRow> = pairs
        .into_iter()
        .map(|((pattern, indicator), stats)| {
            let count = stats.posts.len() as u64;
            let false_positives = stats
                .posts
                .iter()
                .filter(|p| consensus[**p].intersection(stats.classes) == ClassSet::EMPTY)
                .count() as u64;
            MatchFpRow {
                pattern,
                indicator,
                classes: stats.classes,
                count,
                false_positives,
                fp_rate: false_positives as f64 / count as f64,
            }
        })
        .filter(|row| row.count >= min_support)
        .collect();
    rows.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.pattern.cmp(&b.pattern))
            .then_with(|| a.indicator.cmp(&b.indicator))
    });
    rows
}

pub fn match_fp_tsv(rows: &[MatchFpRow]) -> String {
    let mut out = String::from("pattern\tindicator\tclasses\tcount\tfp_rate\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.4}\n",
            r.pattern,
            r.indicator,
            r.classes.names().join(","),
            r.count,
            r.fp_rate
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Label intersection

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IntersectionRow {
    pub class: AffectClass,
    /// Items carrying this label on the annotated side.
    pub annotated: u64,
    /// Of those, items whose predicted set also contains it.
    pub intersecting: u64,
    pub pct: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IntersectionReport {
    pub items_joined: usize,
    pub rows: Vec<IntersectionRow>,
    /// Unweighted mean over classes that occur on the annotated side.
    pub average_pct: f64,
}

impl IntersectionReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("class\tannotated\tintersecting\tpct\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.1}\n",
                r.class, r.annotated, r.intersecting, r.pct
            ));
        }
        out.push_str(&format!("average\t\t\t{:.1}\n", self.average_pct));
        out
    }
}

/// For each class: how often an annotated label also shows up in the
/// predicted label set for the same item.
pub fn label_intersection_rate(
    annotated: &[(String, ClassSet)],
    predicted: &[(String, ClassSet)],
) -> Result<IntersectionReport> {
    let by_id: HashMap<&str, ClassSet> = predicted
        .iter()
        .map(|(id, set)| (id.as_str(), *set))
        .collect();
    let mut annotated_counts = [0u64; 7];
    let mut intersecting = [0u64; 7];
    let mut joined = 0usize;
    for (id, labels) in annotated {
        let Some(&pred) = by_id.get(id.as_str()) else {
            continue;
        };
        joined += 1;
        for class in labels.iter() {
            annotated_counts[class.index()] += 1;
            if pred.contains(class) {
                intersecting[class.index()] += 1;
            }
        }
    }
    if joined == 0 {
        return Err(CareError::Validation(
            "no overlapping items between annotated and predicted labels".into(),
        ));
    }
    let mut rows = Vec::new();
    for class in AffectClass::ALL {
        let i = class.index();
        if annotated_counts[i] == 0 {
            continue;
        }
        rows.push(IntersectionRow {
            class,
            annotated: annotated_counts[i],
            intersecting: intersecting[i],
            pct: 100.0 * intersecting[i] as f64 / annotated_counts[i] as f64,
        });
    }
    let average_pct = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.pct).sum::<f64>() / rows.len() as f64
    };
    Ok(IntersectionReport {
        items_joined: joined,
        rows,
        average_pct,
    })
}

// ---------------------------------------------------------------------------
// Prevalence

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PrevalenceReport {
    pub per_class: BTreeMap<AffectClass, u64>,
    /// Posts by number of labels carried (1, 2, 3, ...).
    pub label_histogram: BTreeMap<usize, u64>,
}

impl PrevalenceReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("class\tposts\n");
        for (class, n) in &self.per_class {
            out.push_str(&format!("{class}\t{n}\n"));
        }
        out.push_str("labels_per_post\tposts\n");
        for (n_labels, n) in &self.label_histogram {
            out.push_str(&format!("{n_labels}\t{n}\n"));
        }
        out
    }
}

pub fn class_prevalence(annotations: &[PostAnnotation]) -> PrevalenceReport {
    let mut per_class: BTreeMap<AffectClass, u64> =
        AffectClass::ALL.into_iter().map(|c| (c, 0)).collect();
    let mut label_histogram = BTreeMap::new();
    for ann in annotations {
        for &label in &ann.labels {
            *per_class.get_mut(&label).expect("all classes present") += 1;
        }
        if !ann.labels.is_empty() {
            *label_histogram.entry(ann.labels.len()).or_insert(0) += 1;
        }
    }
    PrevalenceReport {
        per_class,
        label_histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold(post_id: &str, sets: &[&[AffectClass]]) -> GoldPost {
        GoldPost {
            post_id: post_id.to_string(),
            annotators: sets.iter().map(|s| ClassSet::of(s)).collect(),
        }
    }

    fn annotation(post_id: &str, labels: &[AffectClass]) -> PostAnnotation {
        PostAnnotation {
            post_id: post_id.to_string(),
            labels: labels.to_vec(),
            support: labels.iter().map(|&c| (c, 5)).collect(),
        }
    }

    use AffectClass::{Amused, Excited, Saddened};

    #[test]
    fn perfect_agreement_scores_100_at_k3() {
        let g = vec![gold("p", &[&[Amused], &[Amused], &[Amused]])];
        let a = vec![annotation("p", &[Amused])];
        let report = agreement_rates(&g, &a, &[1, 2, 3]).unwrap();
        for row in &report.rows {
            assert_eq!(row.any_pct, 100.0);
            assert_eq!(row.all_pct, 100.0);
            assert_eq!(row.other_pct, 0.0);
        }
    }

    #[test]
    fn half_confirmed_reports_50_at_k2() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[]]),
            gold("p2", &[&[Amused], &[], &[]]),
        ];
        let a = vec![annotation("p1", &[Amused]), annotation("p2", &[Amused])];
        let report = agreement_rates(&g, &a, &[2]).unwrap();
        assert_eq!(report.rows[0].any_pct, 50.0);
        assert_eq!(report.rows[0].all_pct, 50.0);
    }

    #[test]
    fn partially_confirmed_prediction_splits_any_and_all() {
        let g = vec![gold("p", &[&[Amused], &[Amused, Saddened], &[Saddened]])];
        let a = vec![annotation("p", &[Amused, Excited])];
        let report = agreement_rates(&g, &a, &[2]).unwrap();
        assert_eq!(report.rows[0].any_pct, 100.0);
        assert_eq!(report.rows[0].all_pct, 0.0);
        // saddened has 2 votes and is outside the prediction.
        assert_eq!(report.rows[0].other_pct, 100.0);
    }

    #[test]
    fn agreement_requires_overlap() {
        let g = vec![gold("p1", &[&[Amused]])];
        let a = vec![annotation("p2", &[Amused])];
        assert!(agreement_rates(&g, &a, &[1]).is_err());
    }

    #[test]
    fn agreement_is_non_increasing_in_k() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[]]),
            gold("p2", &[&[Amused], &[Saddened], &[Amused]]),
            gold("p3", &[&[Saddened], &[], &[]]),
        ];
        let a = vec![
            annotation("p1", &[Amused]),
            annotation("p2", &[Amused]),
            annotation("p3", &[Amused]),
        ];
        let report = agreement_rates(&g, &a, &[1, 2, 3]).unwrap();
        for w in report.rows.windows(2) {
            assert!(w[1].any_pct <= w[0].any_pct);
            assert!(w[1].all_pct <= w[0].all_pct);
            assert!(w[1].other_pct <= w[0].other_pct);
        }
    }

    #[test]
    fn kappa_is_one_for_perfect_bimodal_agreement() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[Amused]]),
            gold("p2", &[&[], &[], &[]]),
        ];
        let v = fleiss_kappa(&g, Amused).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn kappa_matches_hand_computation() {
        // 3 raters, 4 posts, present votes 2, 1, 3, 0 -> kappa = 1/3.
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[]]),
            gold("p2", &[&[Amused], &[], &[]]),
            gold("p3", &[&[Amused], &[Amused], &[Amused]]),
            gold("p4", &[&[], &[], &[]]),
        ];
        let v = fleiss_kappa(&g, Amused).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn kappa_flags_degenerate_tables() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[Amused]]),
            gold("p2", &[&[Amused], &[Amused], &[Amused]]),
        ];
        assert!(matches!(
            fleiss_kappa(&g, Amused),
            Err(CareError::DegenerateKappa { .. })
        ));
    }

    #[test]
    fn kappa_rejects_unequal_rater_counts() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[Amused]]),
            gold("p2", &[&[Amused], &[Amused]]),
        ];
        assert!(fleiss_kappa(&g, Amused).is_err());
    }

    fn sweep_corpus() -> (Vec<GoldPost>, Vec<PostCommentLabels>) {
        // Gold says amused on p1 and p2; p1 has 2 supporting comments,
        // p2 has 1. At t=2: precision 1.0, recall 0.5 for amused.
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[]]),
            gold("p2", &[&[Amused], &[Amused], &[]]),
        ];
        let corpus = vec![
            PostCommentLabels {
                post_id: "p1".into(),
                text_chars: 40,
                comments: vec![
                    ("c1".into(), ClassSet::of(&[Amused])),
                    ("c2".into(), ClassSet::of(&[Amused])),
                ],
            },
            PostCommentLabels {
                post_id: "p2".into(),
                text_chars: 40,
                comments: vec![("c3".into(), ClassSet::of(&[Amused]))],
            },
        ];
        (g, corpus)
    }

    #[test]
    fn sweep_reproduces_engineered_point() {
        let (g, corpus) = sweep_corpus();
        let points = threshold_sweep(&g, &corpus, &[2], 2, 10).unwrap();
        let amused = points.iter().find(|p| p.class == Amused).unwrap();
        assert_eq!(amused.precision, Some(1.0));
        assert_eq!(amused.recall, Some(0.5));
        assert_eq!((amused.tp, amused.fp, amused.fn_), (1, 0, 1));
    }

    #[test]
    fn sweep_recall_non_increasing_and_t0_equals_t1() {
        let (g, corpus) = sweep_corpus();
        let ts: Vec<u32> = (0..=9).collect();
        let points = threshold_sweep(&g, &corpus, &ts, 2, 10).unwrap();
        for class in AffectClass::ALL {
            let series: Vec<&PRPoint> = points.iter().filter(|p| p.class == class).collect();
            for w in series.windows(2) {
                let r0 = w[0].recall.unwrap_or(0.0);
                let r1 = w[1].recall.unwrap_or(0.0);
                assert!(r1 <= r0, "{class}: {r1} > {r0}");
            }
            assert_eq!(series[0].tp, series[1].tp);
            assert_eq!(series[0].fp, series[1].fp);
        }
    }

    #[test]
    fn sweep_reports_null_precision_without_predictions() {
        let (g, corpus) = sweep_corpus();
        let points = threshold_sweep(&g, &corpus, &[9], 2, 10).unwrap();
        let amused = points.iter().find(|p| p.class == Amused).unwrap();
        assert_eq!(amused.precision, None);
        assert_eq!(amused.recall, Some(0.0));
    }

    fn record(pattern: &str, indicator: &str, class: AffectClass) -> MatchRecord {
        MatchRecord {
            comment_id: "c".into(),
            pattern_name: pattern.into(),
            exaggerators: vec![],
            indicator: indicator.split(' ').map(str::to_string).collect(),
            classes: ClassSet::of(&[class]),
            sentence_index: 0,
        }
    }

    #[test]
    fn fp_rates_count_unconfirmed_posts() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[]]),
            gold("p2", &[&[Saddened], &[Saddened], &[]]),
        ];
        let records = vec![
            ("p1".to_string(), record("subjective-self", "funny", Amused)),
            ("p2".to_string(), record("subjective-self", "funny", Amused)),
        ];
        let rows = match_fp_rates(&records, &g, 2, 1);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 2);
        assert_eq!(rows[0].false_positives, 1);
        assert!((rows[0].fp_rate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fp_rates_suppress_low_support_pairs() {
        let g = vec![gold("p1", &[&[Amused], &[Amused], &[]])];
        let records = vec![("p1".to_string(), record("x", "funny", Amused))];
        assert!(match_fp_rates(&records, &g, 2, 10).is_empty());
        assert_eq!(match_fp_rates(&records, &g, 2, 1).len(), 1);
    }

    #[test]
    fn fully_confirmed_pair_has_zero_fp_rate() {
        let g = vec![gold("p1", &[&[Amused], &[Amused], &[]])];
        let records = vec![("p1".to_string(), record("x", "funny", Amused))];
        let rows = match_fp_rates(&records, &g, 2, 1);
        assert_eq!(rows[0].fp_rate, 0.0);
    }

    #[test]
    fn fp_pair_counts_sum_to_per_class_supported_posts() {
        let g = vec![
            gold("p1", &[&[Amused], &[Amused], &[]]),
            gold("p2", &[&[Saddened], &[Saddened], &[]]),
            gold("p3", &[&[Amused], &[], &[]]),
        ];
        let records = vec![
            ("p1".to_string(), record("a", "funny", Amused)),
            ("p1".to_string(), record("b", "hilarious", Amused)),
            ("p2".to_string(), record("a", "funny", Amused)),
            ("p2".to_string(), record("a", "sad", Saddened)),
            ("p3".to_string(), record("a", "funny", Amused)),
        ];
        // Before suppression, per class, pair counts sum to the number of
        // (pair, post) incidences mapping to that class.
        let rows = match_fp_rates(&records, &g, 2, 0);
        let sum_for = |class: AffectClass| -> u64 {
            rows.iter()
                .filter(|r| r.classes.contains(class))
                .map(|r| r.count)
                .sum()
        };
        // amused: (a,funny) on p1,p2,p3 + (b,hilarious) on p1 = 4.
        assert_eq!(sum_for(Amused), 4);
        assert_eq!(sum_for(Saddened), 1);
        // Suppression only removes rows, never re-weights the kept ones.
        let suppressed = match_fp_rates(&records, &g, 2, 3);
        assert_eq!(suppressed.len(), 1);
        assert_eq!(suppressed[0].count, 3);
    }

    #[test]
    fn empty_predictions_are_not_vacuously_confirmed() {
        let g = vec![gold("p1", &[&[Amused], &[Amused], &[Amused]])];
        let empty = vec![PostAnnotation {
            post_id: "p1".into(),
            labels: vec![],
            support: Default::default(),
        }];
        // An empty label set is "no prediction": the join is empty.
        assert!(agreement_rates(&g, &empty, &[1]).is_err());
    }

    #[test]
    fn intersection_identical_sets_are_100_pct() {
        let items = vec![
            ("a".to_string(), ClassSet::of(&[Amused])),
            ("b".to_string(), ClassSet::of(&[Saddened])),
        ];
        let report = label_intersection_rate(&items, &items).unwrap();
        for row in &report.rows {
            assert_eq!(row.pct, 100.0);
        }
        assert_eq!(report.average_pct, 100.0);
    }

    #[test]
    fn intersection_two_item_toy_is_50_pct() {
        let annotated = vec![
            ("a".to_string(), ClassSet::of(&[Amused])),
            ("b".to_string(), ClassSet::of(&[Amused])),
        ];
        let predicted = vec![
            ("a".to_string(), ClassSet::of(&[Amused])),
            ("b".to_string(), ClassSet::of(&[Saddened])),
        ];
        let report = label_intersection_rate(&annotated, &predicted).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].pct, 50.0);
    }

    #[test]
    fn intersection_disjoint_sets_are_0_pct() {
        let annotated = vec![("a".to_string(), ClassSet::of(&[Amused]))];
        let predicted = vec![("a".to_string(), ClassSet::of(&[Saddened]))];
        let report = label_intersection_rate(&annotated, &predicted).unwrap();
        assert_eq!(report.average_pct, 0.0);
    }

    #[test]
    fn intersection_requires_join() {
        let annotated = vec![("a".to_string(), ClassSet::of(&[Amused]))];
        let predicted = vec![("b".to_string(), ClassSet::of(&[Amused]))];
        assert!(label_intersection_rate(&annotated, &predicted).is_err());
    }

    #[test]
    fn prevalence_counts_and_histogram() {
        let anns = vec![
            annotation("p1", &[Amused]),
            annotation("p2", &[Amused, Saddened]),
        ];
        let report = class_prevalence(&anns);
        assert_eq!(report.per_class[&Amused], 2);
        assert_eq!(report.per_class[&Saddened], 1);
        assert_eq!(report.per_class[&Excited], 0);
        assert_eq!(report.label_histogram[&1], 1);
        assert_eq!(report.label_histogram[&2], 1);
    }

    #[test]
    fn prevalence_of_empty_input_is_all_zeros() {
        let report = class_prevalence(&[]);
        assert!(report.per_class.values().all(|&n| n == 0));
        assert!(report.label_histogram.is_empty());
    }
}
