//! The affective-response taxonomy: seven classes, their valence, and
//! mappings to external emotion taxonomies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CareError, Result};
use crate::io_util::read_to_string;

/// One of the seven affective-response classes.
///
/// Declaration order is the canonical order used everywhere output must be
/// deterministic (labels in annotations, report rows, candidate ties).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffectClass {
    Adoring,
    Amused,
    Approving,
    Excited,
    Angered,
    Saddened,
    Scared,
}

/// Coarse polarity of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valence {
    Positive,
    Negative,
}

impl Valence {
    pub fn name(self) -> &'static str {
        match self {
            Valence::Positive => "positive",
            Valence::Negative => "negative",
        }
    }
}

impl AffectClass {
    /// All seven classes in canonical order.
    pub const ALL: [AffectClass; 7] = [
        AffectClass::Adoring,
        AffectClass::Amused,
        AffectClass::Approving,
        AffectClass::Excited,
        AffectClass::Angered,
        AffectClass::Saddened,
        AffectClass::Scared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AffectClass::Adoring => "adoring",
            AffectClass::Amused => "amused",
            AffectClass::Approving => "approving",
            AffectClass::Excited => "excited",
            AffectClass::Angered => "angered",
            AffectClass::Saddened => "saddened",
            AffectClass::Scared => "scared",
        }
    }

    pub fn definition(self) -> &'static str {
        match self {
            AffectClass::Adoring => "finding someone or something cute, adorable, or attractive",
            AffectClass::Amused => "finding something funny, entertaining, or interesting",
            AffectClass::Approving => "expressing support, praise, admiration, or pride",
            AffectClass::Excited => {
                "expressing joy, zeal, eagerness, or looking forward to something"
            }
            AffectClass::Angered => "expressing anger, revulsion, or annoyance",
            AffectClass::Saddened => "expressing sadness, sympathy, or disappointment",
            AffectClass::Scared => "expressing worry, concern, stress, anxiety, or fear",
        }
    }

    pub fn valence(self) -> Valence {
        match self {
            AffectClass::Adoring
            | AffectClass::Amused
            | AffectClass::Approving
            | AffectClass::Excited => Valence::Positive,
            AffectClass::Angered | AffectClass::Saddened | AffectClass::Scared => Valence::Negative,
        }
    }

    /// Position in [`AffectClass::ALL`]; used for array-indexed per-class state.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for AffectClass {
    type Err = CareError;

    fn from_str(s: &str) -> Result<Self> {
        let lowered = s.trim().to_ascii_lowercase();
        AffectClass::ALL
            .iter()
            .copied()
            .find(|c| c.name() == lowered)
            .ok_or_else(|| CareError::Validation(format!("unknown affect class `{s}`")))
    }
}

impl fmt::Display for AffectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of affect classes backed by a 7-bit mask. Copy, cheap to hash, and
/// iterates in canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ClassSet(u8);

impl ClassSet {
    pub const EMPTY: ClassSet = ClassSet(0);

    pub fn empty() -> Self {
        Self::EMPTY
    }

    pub fn of(classes: &[AffectClass]) -> Self {
        let mut s = Self::EMPTY;
        for &c in classes {
            s.insert(c);
        }
        s
    }

    pub fn insert(&mut self, class: AffectClass) {
        self.0 |= 1 << class.index();
    }

    pub fn with(mut self, class: AffectClass) -> Self {
        self.insert(class);
        self
    }

    pub fn contains(self, class: AffectClass) -> bool {
        self.0 & (1 << class.index()) != 0
    }

    pub fn union(self, other: ClassSet) -> ClassSet {
        ClassSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ClassSet) -> ClassSet {
        ClassSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ClassSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Classes in canonical order.
    pub fn iter(self) -> impl Iterator<Item = AffectClass> {
        AffectClass::ALL
            .into_iter()
            .filter(move |c| self.contains(*c))
    }

    /// Lowercase class names in canonical order.
    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(|c| c.name()).collect()
    }
}

impl FromIterator<AffectClass> for ClassSet {
    fn from_iter<T: IntoIterator<Item = AffectClass>>(iter: T) -> Self {
        let mut s = Self::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for ClassSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ClassSet {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        Ok(Vec::<AffectClass>::deserialize(deserializer)?
            .into_iter()
            .collect())
    }
}

/// Mapping between the seven classes and an external taxonomy's label names
/// (e.g. a 28-emotion taxonomy). Each external name belongs to exactly one
/// class; a class may have no external names at all.
#[derive(Debug, Clone, Default)]
pub struct ClassMapping {
    by_class: BTreeMap<AffectClass, BTreeSet<String>>,
    by_external: HashMap<String, AffectClass>,
}

impl ClassMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `external` under `class`. Re-adding the same pair is a
    /// no-op; attaching a name to a second class is an error.
    pub fn insert(&mut self, class: AffectClass, external: &str) -> Result<()> {
        let name = external.trim().to_lowercase();
        if name.is_empty() {
            return Err(CareError::Validation(
                "empty external label name in class mapping".into(),
            ));
        }
        match self.by_external.get(&name) {
            Some(&existing) if existing != class => {
                return Err(CareError::Validation(format!(
                    "external label `{name}` mapped to both {existing} and {class}"
                )))
            }
            _ => {}
        }
        self.by_external.insert(name.clone(), class);
        self.by_class.entry(class).or_default().insert(name);
        Ok(())
    }

    /// Resolves an external label name to its class, case-insensitively.
    pub fn map_external(&self, external: &str) -> Option<AffectClass> {
        self.by_external
            .get(&external.trim().to_lowercase())
            .copied()
    }

    pub fn externals(&self, class: AffectClass) -> impl Iterator<Item = &str> {
        self.by_class
            .get(&class)
            .into_iter()
            .flat_map(|set| set.iter().map(String::as_str))
    }

    pub fn is_empty(&self) -> bool {
        self.by_external.is_empty()
    }

    pub fn len(&self) -> usize {
        self.by_external.len()
    }

    /// Parses `care_class<TAB>external_name` rows.
    pub fn parse(source: &str, file: &str) -> Result<Self> {
        let mut mapping = Self::new();
        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (class, external) = match (parts.next(), parts.next(), parts.next()) {
                (Some(c), Some(e), None) => (c, e),
                _ => {
                    return Err(CareError::parse(
                        file,
                        line_no,
                        "expected `care_class<TAB>external_name`",
                    ))
                }
            };
            let class: AffectClass = class
                .parse()
                .map_err(|e: CareError| CareError::parse(file, line_no, e.to_string()))?;
            mapping
                .insert(class, external)
                .map_err(|e| CareError::parse(file, line_no, e.to_string()))?;
        }
        Ok(mapping)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = read_to_string(path)?;
        Self::parse(&source, &path.display().to_string())
    }

    /// The mapping shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(
            include_str!("../data/seed/class_mapping.tsv"),
            "<builtin class_mapping.tsv>",
        )
        .expect("builtin class mapping parses")
    }
}
