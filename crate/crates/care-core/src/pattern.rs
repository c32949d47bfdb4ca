//! The pattern DSL: parsing, compiled pattern representation, and the
//! shipped seed patterns.
//!
//! Grammar, one pattern per line (`#` starts a comment):
//!
//! ```text
//! name: {alt|alt ...} {alt|...}? E* I+
//! ```
//!
//! `{...}` is a literal alternation whose alternatives may span several
//! tokens ("some people"). A trailing `?` or `*` makes the group optional.
//! `E*`/`E+` is the exaggerator run (zero- or one-or-more intensifier
//! tokens). `I+` is the indicator slot — one to three tokens resolved
//! through the lexicon — and must be the final slot.

use std::path::Path;

use crate::error::{CareError, Result};
use crate::io_util::{read_to_string, write_atomic};

/// One slot of a compiled pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// A set of literal token-sequence alternatives, longest tried first.
    Literal {
        alternatives: Vec<Vec<String>>,
        optional: bool,
    },
    /// A run of exaggerator tokens; `required` distinguishes `E+` from `E*`.
    Exaggerators { required: bool },
    /// The terminal indicator slot (`I+`).
    Indicator,
}

/// A compiled pattern: named, ordered slots, indicator last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarePattern {
    pub name: String,
    pub slots: Vec<Slot>,
}

impl CarePattern {
    /// Renders the pattern back into its DSL line.
    pub fn to_dsl(&self) -> String {
        let mut parts = vec![format!("{}:", self.name)];
        for slot in &self.slots {
            match slot {
                Slot::Literal {
                    alternatives,
                    optional,
                } => {
                    let alts: Vec<String> = alternatives.iter().map(|a| a.join(" ")).collect();
                    let suffix = if *optional { "?" } else { "" };
                    parts.push(format!("{{{}}}{suffix}", alts.join("|")));
                }
                Slot::Exaggerators { required } => {
                    parts.push(if *required { "E+" } else { "E*" }.to_string())
                }
                Slot::Indicator => parts.push("I+".to_string()),
            }
        }
        parts.join(" ")
    }
}

/// Parses a DSL document. Line numbers in errors refer to `source`.
pub fn parse_patterns(source: &str) -> Result<Vec<CarePattern>> {
    parse_patterns_named(source, "<patterns>")
}

/// Like [`parse_patterns`] with a display name for error messages.
pub fn parse_patterns_named(source: &str, file: &str) -> Result<Vec<CarePattern>> {
    let mut patterns: Vec<CarePattern> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let pattern = parse_line(line).map_err(|e| e.with_line(file, line_no))?;
        if patterns.iter().any(|p| p.name == pattern.name) {
            return Err(CareError::parse(
                file,
                line_no,
                format!("duplicate pattern name `{}`", pattern.name),
            ));
        }
        patterns.push(pattern);
    }
    Ok(patterns)
}

pub fn load_patterns(path: impl AsRef<Path>) -> Result<Vec<CarePattern>> {
    let path = path.as_ref();
    let source = read_to_string(path)?;
    parse_patterns_named(&source, &path.display().to_string())
}

pub fn save_patterns(patterns: &[CarePattern], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for p in patterns {
        out.push_str(&p.to_dsl());
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// The six seed patterns shipped with the crate.
pub fn seed_patterns() -> Vec<CarePattern> {
    parse_patterns_named(SEED_PATTERN_SOURCE, "<seed patterns.care>").expect("seed patterns parse")
}

pub const SEED_PATTERN_SOURCE: &str = include_str!("../data/seed/patterns.care");

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

/// Internal parse error carrying a column, upgraded to a [`CareError`]
/// once the line number is known.
struct LineError {
    col: usize,
    msg: String,
}

impl LineError {
    fn new(col: usize, msg: impl Into<String>) -> Self {
        Self {
            col,
            msg: msg.into(),
        }
    }

    fn with_line(self, file: &str, line: usize) -> CareError {
        CareError::parse(file, line, format!("col {}: {}", self.col + 1, self.msg))
    }
}

fn parse_line(line: &str) -> std::result::Result<CarePattern, LineError> {
    let colon = line
        .find(':')
        .ok_or_else(|| LineError::new(0, "missing `name:` prefix"))?;
    let name = line[..colon].trim();
    if name.is_empty() {
        return Err(LineError::new(0, "empty pattern name"));
    }
    if !name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(LineError::new(
            0,
            format!("pattern name `{name}` may only contain [A-Za-z0-9_-]"),
        ));
    }

    let body_start = colon + 1;
    let slots = parse_slots(&line[body_start..], body_start)?;

    let indicator_positions: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Slot::Indicator))
        .map(|(i, _)| i)
        .collect();
    match indicator_positions.as_slice() {
        [] => return Err(LineError::new(line.len(), "missing indicator slot `I+`")),
        [last] if *last == slots.len() - 1 => {}
        [_] => {
            return Err(LineError::new(
                line.len(),
                "indicator slot `I+` must be the final slot",
            ))
        }
        _ => {
            return Err(LineError::new(
                line.len(),
                "pattern may contain only one indicator slot",
            ))
        }
    }
    if slots.len() < 2 {
        return Err(LineError::new(
            body_start,
            "pattern needs at least one slot before `I+`",
        ));
    }

    Ok(CarePattern {
        name: name.to_string(),
        slots,
    })
}

fn parse_slots(body: &str, offset: usize) -> std::result::Result<Vec<Slot>, LineError> {
    let mut slots = Vec::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = offset + i;
        if c == '{' {
            let close = body[i..]
                .find('}')
                .map(|p| i + p)
                .ok_or_else(|| LineError::new(col, "unbalanced `{`"))?;
            let inner = &body[i + 1..close];
            let mut alternatives = Vec::new();
            for alt in inner.split('|') {
                let tokens: Vec<String> =
                    alt.split_whitespace().map(|t| t.to_lowercase()).collect();
                if tokens.is_empty() {
                    return Err(LineError::new(col, "empty alternative in `{...}`"));
                }
                alternatives.push(tokens);
            }
            // Longest alternatives first, so "what a" wins over "what".
            alternatives.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            alternatives.dedup();
            let mut optional = false;
            i = close + 1;
            if i < bytes.len() && (bytes[i] == b'?' || bytes[i] == b'*') {
                optional = true;
                i += 1;
            }
            slots.push(Slot::Literal {
                alternatives,
                optional,
            });
        } else if c == '}' {
            return Err(LineError::new(col, "unbalanced `}`"));
        } else {
            let end = body[i..]
                .find(char::is_whitespace)
                .map(|p| i + p)
                .unwrap_or(bytes.len());
            let word = &body[i..end];
            match word {
                "E*" => slots.push(Slot::Exaggerators { required: false }),
                "E+" => slots.push(Slot::Exaggerators { required: true }),
                "I+" => slots.push(Slot::Indicator),
                other => {
                    return Err(LineError::new(
                        col,
                        format!(
                            "unexpected token `{other}` (expected `{{...}}`, `E*`, `E+`, or `I+`)"
                        ),
                    ))
                }
            }
            i = end;
        }
    }
    Ok(slots)
}
