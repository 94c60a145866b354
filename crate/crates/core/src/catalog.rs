//! The fourteen evaluated tool families and their published ratings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::frame::Label;

/// Indicator identifier `B1`..`B14`. Orders numerically, so `B2 < B10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndicatorId(u16);

impl IndicatorId {
    pub fn new(number: u16) -> Option<IndicatorId> {
        (number >= 1).then_some(IndicatorId(number))
    }

    pub fn number(self) -> u16 {
        self.0
    }
}

impl fmt::Display for IndicatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed indicator id {0:?} (expected B1, B2, ...)")]
pub struct BadIndicatorId(pub String);

impl FromStr for IndicatorId {
    type Err = BadIndicatorId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix('B')
            .ok_or_else(|| BadIndicatorId(s.to_string()))?;
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(BadIndicatorId(s.to_string()));
        }
        digits
            .parse::<u16>()
            .ok()
            .and_then(IndicatorId::new)
            .ok_or_else(|| BadIndicatorId(s.to_string()))
    }
}

impl Serialize for IndicatorId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IndicatorId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indicator {
    pub id: IndicatorId,
    pub description: String,
}

const ENTRIES: [(&str, Label); 14] = [
    ("Align Sequences", Label::Medium),
    ("Feature selection", Label::VeryHigh),
    ("Find Genes", Label::High),
    ("Find t RNA", Label::Medium),
    ("Find Transcriptional elements", Label::Medium),
    ("Online primer design sites", Label::VeryHigh),
    ("ORF identification", Label::High),
    ("Pattern/Motif recognition", Label::High),
    ("PCR oligonucleotide resources", Label::High),
    ("PCR primer selection", Label::VeryLow),
    ("PCR primers software", Label::VeryLow),
    ("Restriction, Detect repeats & unusual Patterns", Label::Low),
    ("Transmembrane domain Identification", Label::VeryLow),
    ("Other Tools", Label::High),
];

/// The bundled indicator catalog, `B1`..`B14` in order.
pub fn catalog() -> Vec<Indicator> {
    ENTRIES
        .iter()
        .zip(1u16..)
        .map(|((description, _), n)| Indicator {
            id: IndicatorId(n),
            description: description.to_string(),
        })
        .collect()
}

/// Published single-grade rating of each catalog indicator.
pub fn published_ratings() -> Vec<(IndicatorId, Label)> {
    ENTRIES
        .iter()
        .zip(1u16..)
        .map(|((_, label), n)| (IndicatorId(n), *label))
        .collect()
}

pub fn describe(id: IndicatorId) -> Option<&'static str> {
    ENTRIES.get(usize::from(id.0).checked_sub(1)?).map(|(d, _)| *d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_fourteen_unique_ids() {
        let cat = catalog();
        assert_eq!(cat.len(), 14);
        for (i, ind) in cat.iter().enumerate() {
            assert_eq!(ind.id.to_string(), format!("B{}", i + 1));
        }
        assert_eq!(cat[7].description, "Pattern/Motif recognition");
        assert_eq!(cat[5].description, "Online primer design sites");
        assert_eq!(cat[13].description, "Other Tools");
    }

    #[test]
    fn catalog_round_trips_through_json() {
        let cat = catalog();
        let text = serde_json::to_string(&cat).unwrap();
        let back: Vec<Indicator> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cat);
    }

    #[test]
    fn id_parsing() {
        assert_eq!("B14".parse::<IndicatorId>().unwrap().number(), 14);
        for bad in ["", "B", "B0", "B01", "b1", "B-1", "C3", "B1x"] {
            assert!(bad.parse::<IndicatorId>().is_err(), "{bad}");
        }
        assert!("B2".parse::<IndicatorId>().unwrap() < "B10".parse().unwrap());
    }

    #[test]
    fn ratings_match_catalog_order() {
        let r = published_ratings();
        assert_eq!(r[1].1, Label::VeryHigh);
        assert_eq!(r[11].1, Label::Low);
        assert_eq!(describe(IndicatorId(12)), Some("Restriction, Detect repeats & unusual Patterns"));
        assert_eq!(describe(IndicatorId(15)), None);
    }
}
