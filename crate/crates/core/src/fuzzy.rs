//! Piecewise-linear grade memberships over scores in `[0, 10]` and their
//! conversion into discounted mass functions.
//!
//! The five triangular memberships peak at 0, 2.5, 5, 7.5 and 10 with slope
//! ±0.4, so at most two adjacent grades are active at any score and the
//! memberships always sum to 1.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bpa::{prune, validate_bpa, Bpa, BpaError};
use crate::frame::{Label, Subset, FRAME_SIZE};

pub const SCORE_MIN: f64 = 0.0;
pub const SCORE_MAX: f64 = 10.0;

const SLOPE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FuzzyError {
    #[error("score {0} is outside [0, 10]")]
    ScoreOutOfRange(f64),
    #[error("discount factor {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error(transparent)]
    Bpa(#[from] BpaError),
}

/// An expert score in `[0, 10]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Score(f64);

impl Score {
    pub fn new(value: f64) -> Result<Score, FuzzyError> {
        if (SCORE_MIN..=SCORE_MAX).contains(&value) {
            Ok(Score(value))
        } else {
            Err(FuzzyError::ScoreOutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Score {
    type Error = FuzzyError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Score::new(v)
    }
}

impl From<Score> for f64 {
    fn from(s: Score) -> f64 {
        s.0
    }
}

/// Evidence reliability α; `1 − α` is the share moved to ignorance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DiscountFactor(f64);

impl DiscountFactor {
    pub const NONE: DiscountFactor = DiscountFactor(1.0);

    pub fn new(alpha: f64) -> Result<DiscountFactor, FuzzyError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(DiscountFactor(alpha))
        } else {
            Err(FuzzyError::AlphaOutOfRange(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for DiscountFactor {
    fn default() -> Self {
        Self::NONE
    }
}

impl TryFrom<f64> for DiscountFactor {
    type Error = FuzzyError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        DiscountFactor::new(v)
    }
}

impl From<DiscountFactor> for f64 {
    fn from(a: DiscountFactor) -> f64 {
        a.0
    }
}

/// Where the discounted remainder `1 − α` goes in [`to_bpa`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapMode {
    /// Onto the union of the active adjacent grades (θ when only one is active).
    #[default]
    Adjacent,
    /// Always onto θ.
    Theta,
}

impl fmt::Display for OverlapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverlapMode::Adjacent => "adjacent",
            OverlapMode::Theta => "theta",
        })
    }
}

impl FromStr for OverlapMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adjacent" => Ok(OverlapMode::Adjacent),
            "theta" => Ok(OverlapMode::Theta),
            other => Err(format!("unknown overlap mode {other:?}")),
        }
    }
}

/// Membership grade of one score in each of the five labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipVector([f64; FRAME_SIZE]);

impl MembershipVector {
    pub fn get(&self, label: Label) -> f64 {
        self.0[label.index()]
    }

    pub fn values(&self) -> [f64; FRAME_SIZE] {
        self.0
    }

    /// Labels with nonzero membership, in grade order.
    pub fn active(&self) -> impl Iterator<Item = (Label, f64)> + '_ {
        Label::ALL
            .into_iter()
            .map(|l| (l, self.get(l)))
            .filter(|(_, mu)| *mu > 0.0)
    }
}

/// Evaluates the five triangular memberships at `x`.
pub fn membership(x: Score) -> MembershipVector {
    let x = x.value();
    // segment s covers [2.5 s, 2.5 (s + 1)]: grade s falls, grade s + 1 rises
    let segment = ((x / 2.5).floor() as usize).min(FRAME_SIZE - 2);
    let offset = segment as f64;
    let rising = (SLOPE * x - offset).clamp(0.0, 1.0);
    let falling = (-SLOPE * x + offset + 1.0).clamp(0.0, 1.0);
    let mut mu = [0.0; FRAME_SIZE];
    mu[segment] = falling;
    mu[segment + 1] = rising;
    MembershipVector(mu)
}

/// The grade with the largest membership; exact ties go to the lower grade.
pub fn rating_label(v: &MembershipVector) -> Label {
    let mut best = Label::VeryLow;
    for label in Label::ALL {
        if v.get(label) > v.get(best) {
            best = label;
        }
    }
    best
}

/// Builds a mass function from memberships, reliability α and overlap mode.
///
/// Each active grade keeps `α·μ` as singleton mass. The remainder goes to the
/// pair of active grades (or θ if only one grade is active) in
/// [`OverlapMode::Adjacent`], and to θ in [`OverlapMode::Theta`].
pub fn to_bpa(
    v: &MembershipVector,
    alpha: DiscountFactor,
    mode: OverlapMode,
) -> Result<Bpa, FuzzyError> {
    let a = alpha.value();
    let mut masses = BTreeMap::new();
    let mut assigned = 0.0;
    let mut active = Subset::EMPTY;
    for (label, mu) in v.active() {
        let m = a * mu;
        assigned += m;
        active = active.union(Subset::singleton(label));
        masses.insert(Subset::singleton(label), m);
    }
    let target = match mode {
        OverlapMode::Adjacent if active.cardinality() >= 2 => active,
        _ => Subset::THETA,
    };
    *masses.entry(target).or_insert(0.0) += 1.0 - assigned;
    masses.retain(|_, m| *m > 0.0);
    Ok(validate_bpa(masses)?)
}

/// Classical discounting: scale every non-θ mass by α and move `1 − α` to θ.
pub fn discount(b: &Bpa, alpha: DiscountFactor) -> Bpa {
    let a = alpha.value();
    let mut masses: BTreeMap<Subset, f64> = b
        .focal()
        .filter(|(s, _)| !s.is_theta())
        .map(|(s, m)| (s, a * m))
        .collect();
    masses.insert(Subset::THETA, 1.0 - a + a * b.mass(Subset::THETA));
    prune(&mut masses);
    validate_bpa(masses).expect("discounting preserves total mass")
}
