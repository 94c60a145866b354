//! Basic probability assignments (mass functions) over the grade frame.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::frame::{Frame, Label, Subset};

/// Allowed deviation of the total mass from 1.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// Masses below this are dropped after arithmetic.
pub const MASS_PRUNE_THRESHOLD: f64 = 1e-12;

// Sums closer to 1 than this are left alone, which keeps validation
// idempotent once a Bpa has been renormalized.
const RENORMALIZE_EPSILON: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BpaError {
    #[error("mass {mass} on {subset:?} is outside [0, 1]")]
    MassOutOfRange { subset: Subset, mass: f64 },
    #[error("masses sum to {sum}, expected 1 within {MASS_SUM_TOLERANCE:e}")]
    MassSumInvalid { sum: f64 },
    #[error("empty set carries nonzero mass {mass}")]
    NonzeroEmptySet { mass: f64 },
    #[error("frame {found:?} does not match [\"VL\",\"L\",\"M\",\"H\",\"VH\"]")]
    FrameMismatch { found: Vec<String> },
    #[error("subset {0:?} listed more than once")]
    DuplicateSubset(Subset),
    #[error("invalid BPA document: {0}")]
    Json(String),
}

/// A validated mass function. Only focal elements (positive mass) are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Bpa {
    masses: BTreeMap<Subset, f64>,
}

impl Bpa {
    /// m(θ) = 1.
    pub fn vacuous() -> Bpa {
        Bpa {
            masses: BTreeMap::from([(Subset::THETA, 1.0)]),
        }
    }

    /// Total certainty on one subset.
    pub fn certain(subset: Subset) -> Result<Bpa, BpaError> {
        validate_bpa(BTreeMap::from([(subset, 1.0)]))
    }

    /// Builds a Bpa from `(subset, mass)` pairs. Repeated subsets accumulate.
    pub fn from_pairs<I>(pairs: I) -> Result<Bpa, BpaError>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut masses = BTreeMap::new();
        for (s, m) in pairs {
            *masses.entry(s).or_insert(0.0) += m;
        }
        validate_bpa(masses)
    }

    pub fn mass(&self, subset: Subset) -> f64 {
        self.masses.get(&subset).copied().unwrap_or(0.0)
    }

    /// Focal elements and their masses in subset order.
    pub fn focal(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.masses.iter().map(|(s, m)| (*s, *m))
    }

    pub fn focal_count(&self) -> usize {
        self.masses.len()
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.masses.len() == 1 && self.mass(Subset::THETA) == 1.0
    }

    /// True when every focal element is a singleton.
    pub fn is_bayesian(&self) -> bool {
        self.masses.keys().all(|s| s.cardinality() == 1)
    }

    pub fn masses(&self) -> &BTreeMap<Subset, f64> {
        &self.masses
    }

    /// Runs validation again on an already valid Bpa.
    pub fn revalidate(&self) -> Result<Bpa, BpaError> {
        validate_bpa(self.masses.clone())
    }

    pub fn to_document(&self) -> BpaDocument {
        BpaDocument {
            name: None,
            frame: Label::ALL.iter().map(|l| l.code().to_string()).collect(),
            masses: self
                .focal()
                .map(|(subset, mass)| MassEntry { subset, mass })
                .collect(),
        }
    }
}

impl Serialize for Bpa {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

/// Checks the mass-function invariants and returns the validated Bpa.
///
/// Zero entries are dropped. A total within [`MASS_SUM_TOLERANCE`] of 1 is
/// renormalized proportionally.
pub fn validate_bpa(masses: BTreeMap<Subset, f64>) -> Result<Bpa, BpaError> {
    let mut sum = 0.0;
    for (&subset, &mass) in &masses {
        if !(0.0..=1.0).contains(&mass) {
            return Err(BpaError::MassOutOfRange { subset, mass });
        }
        if subset.is_empty() && mass != 0.0 {
            return Err(BpaError::NonzeroEmptySet { mass });
        }
        sum += mass;
    }
    if (sum - 1.0).abs() > MASS_SUM_TOLERANCE {
        return Err(BpaError::MassSumInvalid { sum });
    }
    let renormalize = (sum - 1.0).abs() > RENORMALIZE_EPSILON;
    let masses = masses
        .into_iter()
        .filter(|(_, m)| *m > 0.0)
        .map(|(s, m)| (s, if renormalize { m / sum } else { m }))
        .collect();
    Ok(Bpa { masses })
}

/// Drops masses below [`MASS_PRUNE_THRESHOLD`] and the empty set.
pub(crate) fn prune(masses: &mut BTreeMap<Subset, f64>) {
    masses.retain(|s, m| !s.is_empty() && *m >= MASS_PRUNE_THRESHOLD);
}

/// One `{"subset": [...], "mass": ...}` entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassEntry {
    pub subset: Subset,
    pub mass: f64,
}

/// JSON form of a Bpa: `{"frame": [...], "masses": [...]}` with an optional name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BpaDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub frame: Vec<String>,
    pub masses: Vec<MassEntry>,
}

impl BpaDocument {
    pub fn to_bpa(&self) -> Result<Bpa, BpaError> {
        if !Frame.matches_codes(&self.frame) {
            return Err(BpaError::FrameMismatch {
                found: self.frame.clone(),
            });
        }
        let mut masses = BTreeMap::new();
        for entry in &self.masses {
            if masses.insert(entry.subset, entry.mass).is_some() {
                return Err(BpaError::DuplicateSubset(entry.subset));
            }
        }
        validate_bpa(masses)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(BpaDocument),
    Many(Vec<BpaDocument>),
}

/// A Bpa read from a fixture file, with its name (or positional index).
#[derive(Debug, Clone, PartialEq)]
pub struct NamedBpa {
    pub name: String,
    pub bpa: Bpa,
}

/// Parses a BPA fixture: a single document or a JSON array of documents.
pub fn parse_bpa_documents(text: &str) -> Result<Vec<NamedBpa>, BpaError> {
    let docs = match serde_json::from_str::<OneOrMany>(text)
        .map_err(|e| BpaError::Json(e.to_string()))?
    {
        OneOrMany::One(d) => vec![d],
        OneOrMany::Many(ds) => ds,
    };
    docs.iter()
        .enumerate()
        .map(|(i, d)| {
            Ok(NamedBpa {
                name: d.name.clone().unwrap_or_else(|| format!("bpa-{}", i + 1)),
                bpa: d.to_bpa()?,
            })
        })
        .collect()
}
