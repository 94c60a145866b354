//! The five-grade linguistic frame of discernment and subset algebra over it.
//!
//! Subsets are stored as a bitmask over the grade order (bit 0 = `VL`).
//! Ordering and iteration are deterministic: subsets compare first by
//! cardinality, then lexicographically by their members in grade order, so
//! singletons come first (VL, L, M, H, VH), then pairs, and the full frame last.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of grades in the frame.
pub const FRAME_SIZE: usize = 5;

/// Number of subsets of the frame, including the empty set.
pub const SUBSET_COUNT: usize = 1 << FRAME_SIZE;

/// A linguistic grade, ordered from `VeryLow` to `VeryHigh`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    VeryLow,
    Low,
    Medium,
    High,
    VeryHigh,
}

impl Label {
    pub const ALL: [Label; FRAME_SIZE] = [
        Label::VeryLow,
        Label::Low,
        Label::Medium,
        Label::High,
        Label::VeryHigh,
    ];

    /// Position in grade order, `0..5`.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Label> {
        Self::ALL.get(idx).copied()
    }

    pub fn code(self) -> &'static str {
        match self {
            Label::VeryLow => "VL",
            Label::Low => "L",
            Label::Medium => "M",
            Label::High => "H",
            Label::VeryHigh => "VH",
        }
    }

    /// Score in `[0, 10]` at which this grade has membership 1.
    pub fn peak_score(self) -> f64 {
        2.5 * self.index() as f64
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown grade label {0:?} (expected one of VL, L, M, H, VH)")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "VL" => Ok(Label::VeryLow),
            "L" => Ok(Label::Low),
            "M" => Ok(Label::Medium),
            "H" => Ok(Label::High),
            "VH" => Ok(Label::VeryHigh),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The frame of discernment θ = {VL, L, M, H, VH}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Frame;

impl Frame {
    pub fn labels(&self) -> [Label; FRAME_SIZE] {
        Label::ALL
    }

    pub fn theta(&self) -> Subset {
        Subset::THETA
    }

    /// Every subset of the frame, including the empty set, in bitmask order.
    pub fn all_subsets(&self) -> impl Iterator<Item = Subset> {
        (0..SUBSET_COUNT as u8).map(Subset)
    }

    /// Checks that `codes` lists the five grades exactly once, in grade order.
    pub fn matches_codes<S: AsRef<str>>(&self, codes: &[S]) -> bool {
        codes.len() == FRAME_SIZE
            && codes
                .iter()
                .zip(Label::ALL)
                .all(|(c, l)| c.as_ref() == l.code())
    }
}

/// A subset of the frame.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u8);

impl Subset {
    pub const EMPTY: Subset = Subset(0);
    pub const THETA: Subset = Subset((1 << FRAME_SIZE) - 1);

    pub fn from_bits(bits: u8) -> Option<Subset> {
        (bits & !Self::THETA.0 == 0).then_some(Subset(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn singleton(label: Label) -> Subset {
        Subset(1 << label.index())
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_theta(self) -> bool {
        self == Self::THETA
    }

    pub fn contains(self, label: Label) -> bool {
        self.0 & (1 << label.index()) != 0
    }

    pub fn intersect(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in grade order.
    pub fn labels(self) -> impl Iterator<Item = Label> {
        Label::ALL.into_iter().filter(move |l| self.contains(*l))
    }

    pub fn codes(self) -> Vec<&'static str> {
        self.labels().map(Label::code).collect()
    }
}

/// Set intersection of two subsets.
pub fn intersect(a: Subset, b: Subset) -> Subset {
    a.intersect(b)
}

/// Number of grades in a subset.
pub fn cardinality(a: Subset) -> usize {
    a.cardinality()
}

impl FromIterator<Label> for Subset {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        iter.into_iter()
            .fold(Subset::EMPTY, |acc, l| acc.union(Subset::singleton(l)))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cardinality()
            .cmp(&other.cardinality())
            .then_with(|| self.labels().cmp(other.labels()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.codes().join(","))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_theta() {
            f.write_str("theta")
        } else {
            f.write_str(&self.codes().join(","))
        }
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.labels())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let labels = Vec::<Label>::deserialize(deserializer)?;
        let set: Subset = labels.iter().copied().collect();
        if set.cardinality() != labels.len() {
            return Err(serde::de::Error::custom("subset lists a grade more than once"));
        }
        Ok(set)
    }
}
