//! Pairwise-comparison matrices: geometric-mean aggregation across experts
//! and the consistency (compatibility) gate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Tolerance for the reciprocal and unit-diagonal checks.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-9;

/// Matrices with a consistency ratio at or above this are rejected.
pub const CR_THRESHOLD: f64 = 0.1;

pub const POWER_ITERATION_TOLERANCE: f64 = 1e-12;
pub const POWER_ITERATION_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AhpError {
    #[error("no matrices to aggregate")]
    EmptyInput,
    #[error("matrix order {found} does not match expected order {expected}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("invalid pairwise matrix at ({row},{col}): {reason}")]
    InvalidMatrix {
        row: usize,
        col: usize,
        reason: String,
    },
    #[error("power iteration did not converge in {iterations} iterations (last estimate {last_estimate})")]
    NoConvergence {
        iterations: usize,
        last_estimate: f64,
    },
    #[error("no random index for matrix order {order}")]
    MissingRI { order: usize },
}

/// A positive reciprocal matrix of judgments, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl PairwiseMatrix {
    /// Validates rows as a positive reciprocal matrix of order ≥ 2.
    ///
    /// Error locations are 1-based `(row, col)`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<PairwiseMatrix, AhpError> {
        let order = rows.len();
        if order < 2 {
            return Err(AhpError::InvalidMatrix {
                row: 1,
                col: 1,
                reason: format!("order {order} is below 2"),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(AhpError::InvalidMatrix {
                    row: i + 1,
                    col: row.len(),
                    reason: format!("row has {} entries, expected {order}", row.len()),
                });
            }
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        let m = PairwiseMatrix { order, entries };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<(), AhpError> {
        let n = self.order;
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if !(a.is_finite() && a > 0.0) {
                    return Err(AhpError::InvalidMatrix {
                        row: i + 1,
                        col: j + 1,
                        reason: format!("entry {a} is not a positive finite number"),
                    });
                }
            }
        }
        for i in 0..n {
            if (self.get(i, i) - 1.0).abs() > RECIPROCITY_TOLERANCE {
                return Err(AhpError::InvalidMatrix {
                    row: i + 1,
                    col: i + 1,
                    reason: format!("diagonal entry {} is not 1", self.get(i, i)),
                });
            }
            for j in i + 1..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if (a * b - 1.0).abs() > RECIPROCITY_TOLERANCE {
                    return Err(AhpError::InvalidMatrix {
                        row: i + 1,
                        col: j + 1,
                        reason: format!(
                            "entries ({},{})={a} and ({},{})={b} are not reciprocal",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// The consistent matrix `a_ij = w_i / w_j`.
    pub fn from_weights(weights: &[f64]) -> Result<PairwiseMatrix, AhpError> {
        let rows = weights
            .iter()
            .map(|wi| weights.iter().map(|wj| wi / wj).collect())
            .collect();
        Self::from_rows(rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Zero-based entry access.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.order)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Entrywise geometric mean of expert matrices.
///
/// Upper-triangle entries are averaged in log space; each lower entry is set
/// to the reciprocal of its mirror, so the result is reciprocal by construction.
pub fn aggregate_geometric(matrices: &[PairwiseMatrix]) -> Result<PairwiseMatrix, AhpError> {
    let first = matrices.first().ok_or(AhpError::EmptyInput)?;
    let n = first.order;
    for m in matrices {
        if m.order != n {
            return Err(AhpError::OrderMismatch {
                expected: n,
                found: m.order,
            });
        }
        m.check()?;
    }
    if matrices.len() == 1 {
        return Ok(first.clone());
    }
    let k = matrices.len() as f64;
    let mut entries = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let log_sum: f64 = matrices.iter().map(|m| m.get(i, j).ln()).sum();
            let g = (log_sum / k).exp();
            entries[i * n + j] = g;
            entries[j * n + i] = 1.0 / g;
        }
    }
    let out = PairwiseMatrix { order: n, entries };
    out.check()?;
    Ok(out)
}

/// Dominant eigenvalue by power iteration from the uniform vector.
pub fn principal_eigenvalue(m: &PairwiseMatrix) -> Result<f64, AhpError> {
    let n = m.order;
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut estimate = f64::NAN;
    for _ in 0..POWER_ITERATION_CAP {
        for (yi, row) in y.iter_mut().zip(m.rows()) {
            *yi = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        // x sums to 1, so the growth of the total is the eigenvalue estimate
        let lambda: f64 = y.iter().sum();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / lambda;
        }
        if (lambda - estimate).abs() <= POWER_ITERATION_TOLERANCE {
            return Ok(lambda);
        }
        estimate = lambda;
    }
    Err(AhpError::NoConvergence {
        iterations: POWER_ITERATION_CAP,
        last_estimate: estimate,
    })
}

/// How the consistency index is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DenominatorMode {
    /// `CI = (λmax − n) / n`
    #[default]
    Paper,
    /// `CI = (λmax − n) / (n − 1)`, the usual Saaty form.
    Standard,
}

impl fmt::Display for DenominatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DenominatorMode::Paper => "paper",
            DenominatorMode::Standard => "standard",
        })
    }
}

/// Random consistency indices by matrix order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiTable(BTreeMap<usize, f64>);

impl Default for RiTable {
    /// Saaty's random indices for orders 1..=15.
    fn default() -> Self {
        RiTable(BTreeMap::from([
            (1, 0.0),
            (2, 0.0),
            (3, 0.58),
            (4, 0.90),
            (5, 1.12),
            (6, 1.24),
            (7, 1.32),
            (8, 1.41),
            (9, 1.45),
            (10, 1.49),
            (11, 1.51),
            (12, 1.48),
            (13, 1.56),
            (14, 1.57),
            (15, 1.59),
        ]))
    }
}

impl RiTable {
    pub fn new(entries: BTreeMap<usize, f64>) -> RiTable {
        RiTable(entries)
    }

    pub fn get(&self, order: usize) -> Option<f64> {
        self.0.get(&order).copied()
    }

    pub fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub order: usize,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub acceptable: bool,
    pub mode: DenominatorMode,
}

pub fn consistency(
    m: &PairwiseMatrix,
    ri_table: &RiTable,
    mode: DenominatorMode,
) -> Result<ConsistencyReport, AhpError> {
    let n = m.order();
    let lambda_max = principal_eigenvalue(m)?;
    let denom = match mode {
        DenominatorMode::Paper => n as f64,
        DenominatorMode::Standard => (n - 1) as f64,
    };
    let ci = (lambda_max - n as f64) / denom;
    let (ri, cr) = if n <= 2 {
        (0.0, 0.0)
    } else {
        let ri = ri_table
            .get(n)
            .filter(|ri| *ri > 0.0)
            .ok_or(AhpError::MissingRI { order: n })?;
        (ri, ci / ri)
    };
    Ok(ConsistencyReport {
        order: n,
        lambda_max,
        ci,
        ri,
        cr,
        acceptable: cr < CR_THRESHOLD,
        mode,
    })
}
