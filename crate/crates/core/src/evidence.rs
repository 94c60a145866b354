//! Evidence fusion over the grade frame: conflict, Dempster's rule,
//! Murphy's averaging rule, the pignistic transform, and indicator ranking.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::bpa::{prune, validate_bpa, Bpa, BpaError, MassEntry};
use crate::catalog::IndicatorId;
use crate::frame::{Frame, Label, Subset, FRAME_SIZE, SUBSET_COUNT};

/// Conflict this close to 1 makes Dempster's rule undefined.
pub const TOTAL_CONFLICT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvidenceError {
    #[error("total conflict (k = {k}); Dempster's rule is undefined")]
    TotalConflict { k: f64 },
    #[error("no bodies of evidence given")]
    EmptyInput,
    #[error("value for {indicator} is not finite")]
    NonFiniteValue { indicator: IndicatorId },
    #[error(transparent)]
    Bpa(#[from] BpaError),
}

/// A fused mass function and the conflict met while fusing.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationResult {
    pub bpa: Bpa,
    pub conflict_k: f64,
}

impl Serialize for CombinationResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Export {
            conflict_k: f64,
            masses: Vec<MassEntry>,
            betp: BTreeMap<&'static str, f64>,
        }
        let betp = pignistic(&self.bpa);
        Export {
            conflict_k: self.conflict_k,
            masses: self.bpa.to_document().masses,
            betp: Label::ALL.iter().map(|l| (l.code(), betp[l.index()])).collect(),
        }
        .serialize(serializer)
    }
}

/// Mass of all focal pairs whose intersection is empty.
pub fn conflict(m1: &Bpa, m2: &Bpa) -> f64 {
    let mut k = 0.0;
    for (b, mb) in m1.focal() {
        for (c, mc) in m2.focal() {
            if b.intersect(c).is_empty() {
                k += mb * mc;
            }
        }
    }
    k
}

/// Dempster's rule of combination.
pub fn dempster_combine(m1: &Bpa, m2: &Bpa) -> Result<CombinationResult, EvidenceError> {
    let mut joint: BTreeMap<Subset, f64> = BTreeMap::new();
    let mut k = 0.0;
    for (b, mb) in m1.focal() {
        for (c, mc) in m2.focal() {
            let a = b.intersect(c);
            if a.is_empty() {
                k += mb * mc;
            } else {
                *joint.entry(a).or_insert(0.0) += mb * mc;
            }
        }
    }
    normalize_joint(joint, k)
}

fn normalize_joint(mut joint: BTreeMap<Subset, f64>, k: f64) -> Result<CombinationResult, EvidenceError> {
    let norm = 1.0 - k;
    if norm <= TOTAL_CONFLICT_TOLERANCE {
        return Err(EvidenceError::TotalConflict { k });
    }
    for m in joint.values_mut() {
        *m = (*m / norm).min(1.0);
    }
    prune(&mut joint);
    Ok(CombinationResult {
        bpa: validate_bpa(joint)?,
        conflict_k: k,
    })
}

/// Dempster's rule by exhaustive enumeration of all subset pairs.
///
/// Test oracle for [`dempster_combine`]: it uses dense mass vectors and takes
/// no sparsity shortcuts.
pub fn brute_force_combine(m1: &Bpa, m2: &Bpa) -> Result<CombinationResult, EvidenceError> {
    let dense = |b: &Bpa| -> [f64; SUBSET_COUNT] {
        let mut v = [0.0; SUBSET_COUNT];
        for s in Frame.all_subsets() {
            v[usize::from(s.bits())] = b.mass(s);
        }
        v
    };
    let (d1, d2) = (dense(m1), dense(m2));
    let mut joint = [0.0; SUBSET_COUNT];
    for b in 0..SUBSET_COUNT {
        for c in 0..SUBSET_COUNT {
            joint[b & c] += d1[b] * d2[c];
        }
    }
    let k = joint[0];
    let joint = Frame
        .all_subsets()
        .skip(1)
        .map(|s| (s, joint[usize::from(s.bits())]))
        .filter(|(_, m)| *m > 0.0)
        .collect();
    normalize_joint(joint, k)
}

/// Focal-set-wise arithmetic mean.
///
/// For each subset the contributions are summed in sorted order, so the
/// result does not depend on the order of `bpas` at all.
pub fn average_bpas(bpas: &[Bpa]) -> Result<Bpa, EvidenceError> {
    if bpas.is_empty() {
        return Err(EvidenceError::EmptyInput);
    }
    if bpas.len() == 1 {
        return Ok(bpas[0].clone());
    }
    let mut contributions: BTreeMap<Subset, Vec<f64>> = BTreeMap::new();
    for b in bpas {
        for (s, m) in b.focal() {
            contributions.entry(s).or_default().push(m);
        }
    }
    let n = bpas.len() as f64;
    let mut masses: BTreeMap<Subset, f64> = contributions
        .into_iter()
        .map(|(s, mut ms)| {
            ms.sort_by(f64::total_cmp);
            (s, ms.iter().sum::<f64>() / n)
        })
        .collect();
    prune(&mut masses);
    Ok(validate_bpa(masses)?)
}

/// Murphy's rule: average the `n` inputs, then combine the average with
/// itself `n − 1` times.
///
/// `conflict_k` is the conflict of the average with itself, or 0 for a
/// single input.
pub fn murphy_combine(bpas: &[Bpa]) -> Result<CombinationResult, EvidenceError> {
    let avg = average_bpas(bpas)?;
    if bpas.len() == 1 {
        return Ok(CombinationResult {
            bpa: avg,
            conflict_k: 0.0,
        });
    }
    let conflict_k = conflict(&avg, &avg);
    let mut acc = avg.clone();
    for _ in 1..bpas.len() {
        acc = dempster_combine(&acc, &avg)?.bpa;
    }
    Ok(CombinationResult { bpa: acc, conflict_k })
}

/// Pignistic probability of each grade, `BetP(ℓ) = Σ_{A ∋ ℓ} m(A) / |A|`.
pub fn pignistic(b: &Bpa) -> [f64; FRAME_SIZE] {
    let mut p = [0.0; FRAME_SIZE];
    for (s, m) in b.focal() {
        let share = m / s.cardinality() as f64;
        for l in s.labels() {
            p[l.index()] += share;
        }
    }
    p
}

/// The grade with the largest probability; ties go to the lower grade.
pub fn most_probable(p: &[f64; FRAME_SIZE]) -> Label {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    Label::ALL[best]
}

/// Expected score under the pignistic distribution, grades at their peak scores.
pub fn expected_score(b: &Bpa) -> f64 {
    pignistic(b)
        .iter()
        .zip(Label::ALL)
        .map(|(p, l)| p * l.peak_score())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry {
    pub indicator: IndicatorId,
    pub value: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport {
    pub method: String,
    pub entries: Vec<RankEntry>,
    pub top: IndicatorId,
    pub bottom: IndicatorId,
}

/// Orders indicators by descending value; ties keep indicator id order.
pub fn rank(values: &BTreeMap<IndicatorId, f64>, method: &str) -> Result<RankingReport, EvidenceError> {
    if let Some((id, _)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(EvidenceError::NonFiniteValue { indicator: *id });
    }
    let mut ordered: Vec<(IndicatorId, f64)> = values.iter().map(|(k, v)| (*k, *v)).collect();
    // stable sort keeps id order among equal values
    ordered.sort_by(|a, b| b.1.total_cmp(&a.1));
    let entries: Vec<RankEntry> = ordered
        .into_iter()
        .enumerate()
        .map(|(i, (indicator, value))| RankEntry {
            indicator,
            value,
            rank: i + 1,
        })
        .collect();
    let (top, bottom) = match (entries.first(), entries.last()) {
        (Some(t), Some(b)) => (t.indicator, b.indicator),
        _ => return Err(EvidenceError::EmptyInput),
    };
    Ok(RankingReport {
        method: method.to_string(),
        entries,
        top,
        bottom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use Label::*;

    fn single(l: Label) -> Subset {
        Subset::singleton(l)
    }

    fn simple(l: Label, m: f64) -> Bpa {
        Bpa::from_pairs([(single(l), m), (Subset::THETA, 1.0 - m)]).unwrap()
    }

    fn id(n: u16) -> IndicatorId {
        IndicatorId::new(n).unwrap()
    }

    #[test]
    fn conflict_examples() {
        assert_eq!(conflict(&simple(High, 0.6), &Bpa::vacuous()), 0.0);
        let vl = Bpa::certain(single(VeryLow)).unwrap();
        let vh = Bpa::certain(single(VeryHigh)).unwrap();
        assert_eq!(conflict(&vl, &vh), 1.0);
        assert_abs_diff_eq!(conflict(&simple(High, 0.6), &simple(Medium, 0.5)), 0.3, epsilon = 1e-15);
        assert_eq!(
            conflict(&simple(High, 0.6), &simple(Medium, 0.5)),
            conflict(&simple(Medium, 0.5), &simple(High, 0.6))
        );
    }

    #[test]
    fn dempster_examples() {
        let b = simple(High, 0.6);
        assert_eq!(dempster_combine(&b, &Bpa::vacuous()).unwrap().bpa, b);
        assert_eq!(dempster_combine(&Bpa::vacuous(), &b).unwrap().bpa, b);

        let r = dempster_combine(&b, &b).unwrap();
        assert_abs_diff_eq!(r.bpa.mass(single(High)), 0.84, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bpa.mass(Subset::THETA), 0.16, epsilon = 1e-12);
        assert_eq!(r.conflict_k, 0.0);

        let m1 = Bpa::from_pairs([(single(VeryLow), 0.99), (single(Low), 0.01)]).unwrap();
        let m2 = Bpa::from_pairs([(single(Low), 0.01), (single(VeryHigh), 0.99)]).unwrap();
        let r = dempster_combine(&m1, &m2).unwrap();
        assert_abs_diff_eq!(r.conflict_k, 0.9999, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bpa.mass(single(Low)), 1.0, epsilon = 1e-9);
        assert_eq!(r.bpa.focal_count(), 1);
    }

    #[test]
    fn total_conflict_is_an_error() {
        let vl = Bpa::certain(single(VeryLow)).unwrap();
        let vh = Bpa::certain(single(VeryHigh)).unwrap();
        assert!(matches!(dempster_combine(&vl, &vh), Err(EvidenceError::TotalConflict { .. })));
        assert!(matches!(brute_force_combine(&vl, &vh), Err(EvidenceError::TotalConflict { .. })));
    }

    #[test]
    fn brute_force_agrees_on_examples() {
        let m1 = Bpa::from_pairs([(single(VeryLow), 0.99), (single(Low), 0.01)]).unwrap();
        let m2 = Bpa::from_pairs([(single(Low), 0.01), (single(VeryHigh), 0.99)]).unwrap();
        let cases = [
            (simple(High, 0.6), Bpa::vacuous()),
            (simple(High, 0.6), simple(High, 0.6)),
            (m1, m2),
        ];
        for (a, b) in &cases {
            let fast = dempster_combine(a, b).unwrap();
            let slow = brute_force_combine(a, b).unwrap();
            assert_abs_diff_eq!(fast.conflict_k, slow.conflict_k, epsilon = 1e-12);
            for s in Frame.all_subsets() {
                assert_abs_diff_eq!(fast.bpa.mass(s), slow.bpa.mass(s), epsilon = 1e-12);
            }
        }
        let b = simple(Medium, 0.3);
        assert_eq!(brute_force_combine(&b, &Bpa::vacuous()).unwrap().bpa, b);
    }

    #[test]
    fn average_examples() {
        let b = simple(High, 0.6);
        assert_eq!(average_bpas(std::slice::from_ref(&b)).unwrap(), b);
        let avg = average_bpas(&[Bpa::certain(single(High)).unwrap(), Bpa::vacuous()]).unwrap();
        assert_eq!(avg.mass(single(High)), 0.5);
        assert_eq!(avg.mass(Subset::THETA), 0.5);
        assert_eq!(average_bpas(&[]), Err(EvidenceError::EmptyInput));
    }

    #[test]
    fn murphy_examples() {
        let b = simple(VeryLow, 0.25);
        assert_eq!(murphy_combine(std::slice::from_ref(&b)).unwrap().bpa, b);
        let r = murphy_combine(&[simple(High, 0.6), simple(High, 0.6)]).unwrap();
        assert_abs_diff_eq!(r.bpa.mass(single(High)), 0.84, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bpa.mass(Subset::THETA), 0.16, epsilon = 1e-12);
        assert_eq!(murphy_combine(&[]), Err(EvidenceError::EmptyInput));
    }

    #[test]
    fn murphy_is_order_free() {
        let xs = [
            simple(High, 0.6),
            simple(Medium, 0.35),
            Bpa::from_pairs([([Medium, High].into_iter().collect(), 0.7), (Subset::THETA, 0.3)]).unwrap(),
            simple(Low, 0.1),
        ];
        let forward = murphy_combine(&xs).unwrap();
        let mut rev = xs.to_vec();
        rev.reverse();
        let backward = murphy_combine(&rev).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn pignistic_examples() {
        let mh = Bpa::certain([Medium, High].into_iter().collect()).unwrap();
        assert_eq!(pignistic(&mh), [0.0, 0.0, 0.5, 0.5, 0.0]);
        assert_eq!(pignistic(&Bpa::vacuous()), [0.2; 5]);
        let b = Bpa::from_pairs([(single(High), 0.84), (Subset::THETA, 0.16)]).unwrap();
        let p = pignistic(&b);
        assert_abs_diff_eq!(p[High.index()], 0.872, epsilon = 1e-12);
        for l in [VeryLow, Low, Medium, VeryHigh] {
            assert_abs_diff_eq!(p[l.index()], 0.032, epsilon = 1e-12);
        }
        let bayes = Bpa::from_pairs([(single(Low), 0.3), (single(High), 0.7)]).unwrap();
        assert!(bayes.is_bayesian());
        assert_eq!(pignistic(&bayes), [0.0, 0.3, 0.0, 0.7, 0.0]);
        assert_eq!(expected_score(&Bpa::certain(single(Medium)).unwrap()), 5.0);
        assert_eq!(most_probable(&[0.1, 0.3, 0.3, 0.2, 0.1]), Low);
        assert_eq!(most_probable(&pignistic(&b)), High);
    }

    #[test]
    fn rank_examples() {
        let values: BTreeMap<_, _> = [(id(1), 0.2), (id(2), 0.5), (id(10), 0.1), (id(3), 0.5)].into();
        let r = rank(&values, "test").unwrap();
        let order: Vec<u16> = r.entries.iter().map(|e| e.indicator.number()).collect();
        assert_eq!(order, [2, 3, 1, 10]);
        assert_eq!((r.top, r.bottom), (id(2), id(10)));
        assert_eq!(r.entries.iter().map(|e| e.rank).collect::<Vec<_>>(), [1, 2, 3, 4]);

        let flat: BTreeMap<_, _> = (1..=14).map(|n| (id(n), 0.3)).collect();
        let r = rank(&flat, "flat").unwrap();
        assert_eq!(r.top, id(1));
        assert_eq!(r.bottom, id(14));

        assert_eq!(rank(&BTreeMap::new(), "x"), Err(EvidenceError::EmptyInput));
        let nan: BTreeMap<_, _> = [(id(1), f64::NAN)].into();
        assert!(matches!(rank(&nan, "x"), Err(EvidenceError::NonFiniteValue { .. })));
    }

    #[test]
    fn combination_export_shape() {
        let r = dempster_combine(&simple(High, 0.6), &simple(High, 0.6)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["conflict_k"], 0.0);
        assert_eq!(v["masses"][0]["subset"], serde_json::json!(["H"]));
        assert!(v["betp"]["VH"].as_f64().unwrap() > 0.0);
    }
}
