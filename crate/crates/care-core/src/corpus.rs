//! Corpus file formats: JSONL posts/comments/gold/external labels and the
//! exclusion-pair TSV.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CareError, Result};
use crate::io_util::read_to_string;
use crate::taxonomy::{AffectClass, ClassSet};

/// `{"post_id": ..., "text": ...}`
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Post {
    pub post_id: String,
    pub text: String,
}

/// `{"comment_id": ..., "post_id": ..., "text": ...}`
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Comment {
    pub comment_id: String,
    pub post_id: String,
    pub text: String,
}

/// Per-comment labels from an external classifier, in that classifier's
/// own taxonomy. `{"comment_id": ..., "labels": [...]}` per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalCommentRow {
    pub comment_id: String,
    pub labels: Vec<String>,
}

/// comment_id -> external label names.
pub type ExternalCommentLabels = HashMap<String, Vec<String>>;

/// One human-annotated post: one label set per annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldPost {
    pub post_id: String,
    pub annotators: Vec<ClassSet>,
}

impl GoldPost {
    /// Labels confirmed by at least `k` annotators.
    pub fn consensus(&self, k: usize) -> ClassSet {
        AffectClass::ALL
            .into_iter()
            .filter(|&c| self.votes_for(c) >= k)
            .collect()
    }

    pub fn votes_for(&self, class: AffectClass) -> usize {
        self.annotators.iter().filter(|s| s.contains(class)).count()
    }
}

#[derive(Debug, Deserialize)]
struct GoldRow {
    post_id: String,
    annotators: Vec<Vec<String>>,
}

/// Reads one JSON value per line, reporting the line number on failure.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| CareError::io(&display, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CareError::io(&display, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: T = serde_json::from_str(&line)
            .map_err(|e| CareError::parse(&display, idx + 1, e.to_string()))?;
        out.push(value);
    }
    Ok(out)
}

pub fn read_posts(path: impl AsRef<Path>) -> Result<Vec<Post>> {
    read_jsonl(path)
}

pub fn read_comments(path: impl AsRef<Path>) -> Result<Vec<Comment>> {
    read_jsonl(path)
}

pub fn read_external_labels(path: impl AsRef<Path>) -> Result<ExternalCommentLabels> {
    let rows: Vec<ExternalCommentRow> = read_jsonl(path)?;
    let mut map: ExternalCommentLabels = HashMap::new();
    for row in rows {
        map.entry(row.comment_id).or_default().extend(row.labels);
    }
    Ok(map)
}

/// Marker annotators may use instead of a class label; parsed as an empty
/// label set.
const NONE_OF_THE_ABOVE: &[&str] = &["none of the above", "none-of-the-above", "none"];

/// Loads gold annotations. Unknown label names are an error except for the
/// explicit none-of-the-above marker.
pub fn read_gold(path: impl AsRef<Path>) -> Result<Vec<GoldPost>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let rows: Vec<GoldRow> = read_jsonl(path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (idx, row) in rows.into_iter().enumerate() {
        let mut annotators = Vec::with_capacity(row.annotators.len());
        for labels in &row.annotators {
            let mut set = ClassSet::empty();
            for name in labels {
                let lowered = name.trim().to_lowercase();
                if NONE_OF_THE_ABOVE.contains(&lowered.as_str()) {
                    continue;
                }
                let class: AffectClass = lowered
                    .parse()
                    .map_err(|e: CareError| CareError::parse(&display, idx + 1, e.to_string()))?;
                set.insert(class);
            }
            annotators.push(set);
        }
        if annotators.is_empty() {
            return Err(CareError::parse(
                &display,
                idx + 1,
                "gold post has no annotators",
            ));
        }
        out.push(GoldPost {
            post_id: row.post_id,
            annotators,
        });
    }
    Ok(out)
}

/// Loads `pattern_name<TAB>indicator` exclusion pairs.
pub fn read_exclusions(path: impl AsRef<Path>) -> Result<BTreeSet<(String, String)>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let source = read_to_string(path)?;
    let mut out = BTreeSet::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(pattern), Some(indicator), None) => {
                out.insert((
                    pattern.trim().to_string(),
                    indicator
                        .split_whitespace()
                        .collect::<Vec<_>>()
                        .join(" ")
                        .to_lowercase(),
                ));
            }
            _ => {
                return Err(CareError::parse(
                    &display,
                    idx + 1,
                    "expected `pattern_name<TAB>indicator`",
                ))
            }
        }
    }
    Ok(out)
}

/// Serializes values as JSONL, one compact object per line.
pub fn to_jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<String> {
    let mut out = String::new();
    for item in items {
        let line = serde_json::to_string(&item)
            .map_err(|e| CareError::Validation(format!("serialization failed: {e}")))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn jsonl_round_trip() {
        let f = write_tmp(
            "{\"post_id\":\"p1\",\"text\":\"hello\"}\n\n{\"post_id\":\"p2\",\"text\":\"world\"}\n",
        );
        let posts = read_posts(f.path()).unwrap();
        assert_eq!(posts.len(), 2);
        assert_eq!(posts[1].post_id, "p2");
    }

    #[test]
    fn malformed_json_reports_line() {
        let f = write_tmp("{\"post_id\":\"p1\",\"text\":\"ok\"}\nnot json\n");
        let err = read_posts(f.path()).unwrap_err();
        assert!(matches!(err, CareError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn gold_accepts_none_of_the_above_as_empty() {
        let f = write_tmp(
            "{\"post_id\":\"p\",\"annotators\":[[\"amused\"],[\"None of the above\"],[]]}\n",
        );
        let gold = read_gold(f.path()).unwrap();
        assert_eq!(gold[0].annotators.len(), 3);
        assert_eq!(gold[0].votes_for(AffectClass::Amused), 1);
        assert!(gold[0].annotators[1].is_empty());
    }

    #[test]
    fn gold_rejects_unknown_labels() {
        let f = write_tmp("{\"post_id\":\"p\",\"annotators\":[[\"joyful\"]]}\n");
        assert!(read_gold(f.path()).is_err());
    }

    #[test]
    fn consensus_counts_votes() {
        let gold = GoldPost {
            post_id: "p".into(),
            annotators: vec![
                ClassSet::of(&[AffectClass::Amused, AffectClass::Excited]),
                ClassSet::of(&[AffectClass::Amused]),
                ClassSet::of(&[AffectClass::Saddened]),
            ],
        };
        assert_eq!(gold.consensus(2), ClassSet::of(&[AffectClass::Amused]));
        assert_eq!(
            gold.consensus(1),
            ClassSet::of(&[
                AffectClass::Amused,
                AffectClass::Excited,
                AffectClass::Saddened
            ])
        );
        assert!(gold.consensus(3).is_empty());
    }

    #[test]
    fn exclusions_normalize_indicator_whitespace() {
        let f = write_tmp("subjective-self\tFunny\nleading-exaggerators\tsorry  for your\n");
        let pairs = read_exclusions(f.path()).unwrap();
        assert!(pairs.contains(&("subjective-self".into(), "funny".into())));
        assert!(pairs.contains(&("leading-exaggerators".into(), "sorry for your".into())));
    }
}
