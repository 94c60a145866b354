//! Shannon-entropy objective weighting of criteria.
//!
//! The chain is: column-normalize the decision matrix into proportions,
//! take each column's normalized entropy `E_j`, turn it into a divergence
//! `d_j = 1 − E_j`, normalize divergences into weights `W_j`, and finally
//! blend with prior weights `λ_j` into adjusted weights `W'_j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ahp::PairwiseMatrix;
use crate::catalog::IndicatorId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EntropyError {
    #[error("column {column} sums to zero")]
    ZeroColumn { column: IndicatorId },
    #[error("entry ({row},{col}) = {value} is negative or not finite")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("decision matrix has {rows} rows; at least 2 are required")]
    DegenerateRows { rows: usize },
    #[error("matrix shape {rows}x{cols} does not match {ids} column ids")]
    ShapeMismatch { rows: usize, cols: usize, ids: usize },
    #[error("every divergence is zero; weights are undefined")]
    AllZeroDivergence,
    #[error("prior weights sum to zero against the entropy weights")]
    DegeneratePriors,
    #[error("prior for {indicator} is {value}; priors must be finite and non-negative")]
    InvalidPrior { indicator: String, value: f64 },
    #[error("{weights} weights but {priors} priors")]
    LengthMismatch { weights: usize, priors: usize },
    #[error("no prior given for {0}")]
    MissingPrior(IndicatorId),
    #[error("malformed entropy table: {0}")]
    Parse(String),
}

/// Criterion data: `rows` alternatives (or criteria) by one column per indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix {
    rows: usize,
    ids: Vec<IndicatorId>,
    data: Vec<f64>,
}

impl DecisionMatrix {
    pub fn new(rows: Vec<Vec<f64>>, ids: Vec<IndicatorId>) -> Result<DecisionMatrix, EntropyError> {
        let m = rows.len();
        let n = ids.len();
        if rows.iter().any(|r| r.len() != n) || n == 0 {
            return Err(EntropyError::ShapeMismatch {
                rows: m,
                cols: rows.first().map_or(0, Vec::len),
                ids: n,
            });
        }
        if m < 2 {
            return Err(EntropyError::DegenerateRows { rows: m });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(pos) = data.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(EntropyError::InvalidEntry {
                row: pos / n + 1,
                col: pos % n + 1,
                value: data[pos],
            });
        }
        let dm = DecisionMatrix { rows: m, ids, data };
        for j in 0..n {
            if dm.column(j).sum::<f64>() == 0.0 {
                return Err(EntropyError::ZeroColumn { column: dm.ids[j] });
            }
        }
        Ok(dm)
    }

    /// The aggregated pairwise matrix read as a decision matrix.
    pub fn from_pairwise(m: &PairwiseMatrix, ids: Vec<IndicatorId>) -> Result<DecisionMatrix, EntropyError> {
        Self::new(m.to_rows(), ids)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[IndicatorId] {
        &self.ids
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols() + col]
    }

    fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.get(i, col))
    }
}

/// Column-stochastic matrix of proportions `P_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ProbabilityMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }
}

/// `P_ij = a_ij / Σ_i a_ij`.
pub fn column_normalize(d: &DecisionMatrix) -> Result<ProbabilityMatrix, EntropyError> {
    let (m, n) = (d.rows(), d.cols());
    let mut data = vec![0.0; m * n];
    for j in 0..n {
        let total: f64 = d.column(j).sum();
        if total == 0.0 {
            return Err(EntropyError::ZeroColumn { column: d.ids[j] });
        }
        for i in 0..m {
            data[i * n + j] = d.get(i, j) / total;
        }
    }
    Ok(ProbabilityMatrix { rows: m, cols: n, data })
}

/// Normalized Shannon entropy of each column, `E_j = −Σ P ln P / ln m`.
///
/// `0 · ln 0` is taken as 0 and a column of identical proportions has
/// entropy exactly 1.
pub fn entropy_values(p: &ProbabilityMatrix) -> Result<Vec<f64>, EntropyError> {
    let m = p.rows();
    if m < 2 {
        return Err(EntropyError::DegenerateRows { rows: m });
    }
    let k = 1.0 / (m as f64).ln();
    Ok((0..p.cols())
        .map(|j| {
            let col = p.column(j);
            if col.iter().all(|v| *v == col[0]) {
                return 1.0;
            }
            let h: f64 = col
                .iter()
                .filter(|v| **v > 0.0)
                .map(|v| v * v.ln())
                .sum();
            (-k * h).clamp(0.0, 1.0)
        })
        .collect())
}

/// `d_j = 1 − E_j`.
pub fn divergence(entropies: &[f64]) -> Vec<f64> {
    entropies.iter().map(|e| 1.0 - e).collect()
}

/// `W_j = d_j / Σ d_j`.
pub fn entropy_weights(divergences: &[f64]) -> Result<Vec<f64>, EntropyError> {
    let total: f64 = divergences.iter().sum();
    if !(total > 0.0) {
        return Err(EntropyError::AllZeroDivergence);
    }
    Ok(divergences.iter().map(|d| d / total).collect())
}

/// `W'_j = λ_j W_j / Σ λ_j W_j`.
pub fn adjust_weights(weights: &[f64], priors: &[f64]) -> Result<Vec<f64>, EntropyError> {
    if weights.len() != priors.len() {
        return Err(EntropyError::LengthMismatch {
            weights: weights.len(),
            priors: priors.len(),
        });
    }
    if let Some((j, v)) = priors.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(EntropyError::InvalidPrior {
            indicator: format!("#{}", j + 1),
            value: *v,
        });
    }
    let products: Vec<f64> = weights.iter().zip(priors).map(|(w, l)| w * l).collect();
    let total: f64 = products.iter().sum();
    if !(total > 0.0) {
        return Err(EntropyError::DegeneratePriors);
    }
    Ok(products.iter().map(|p| p / total).collect())
}

/// Expert prior weight per indicator.
pub type Priors = BTreeMap<IndicatorId, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub indicator: IndicatorId,
    #[serde(rename = "E")]
    pub entropy: f64,
    #[serde(rename = "d")]
    pub divergence: f64,
    #[serde(rename = "W")]
    pub weight: f64,
    pub lambda: Option<f64>,
    #[serde(rename = "W_adj")]
    pub adjusted: Option<f64>,
}

/// The per-indicator `E, d, W, λ, W'` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTable {
    pub rows: Vec<EntropyRow>,
}

impl EntropyTable {
    /// Runs the whole weighting chain. Priors, when given, must cover every column.
    pub fn compute(d: &DecisionMatrix, priors: Option<&Priors>) -> Result<EntropyTable, EntropyError> {
        let p = column_normalize(d)?;
        let e = entropy_values(&p)?;
        let dv = divergence(&e);
        let w = entropy_weights(&dv)?;
        let (lambda, adjusted) = match priors {
            Some(priors) => {
                let lambda = d
                    .ids()
                    .iter()
                    .map(|id| {
                        let value = *priors.get(id).ok_or(EntropyError::MissingPrior(*id))?;
                        if !(value.is_finite() && value >= 0.0) {
                            return Err(EntropyError::InvalidPrior {
                                indicator: id.to_string(),
                                value,
                            });
                        }
                        Ok(value)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let adj = adjust_weights(&w, &lambda)?;
                (lambda.into_iter().map(Some).collect(), adj.into_iter().map(Some).collect())
            }
            None => (vec![None; w.len()], vec![None; w.len()]),
        };
        let rows = d
            .ids()
            .iter()
            .enumerate()
            .map(|(j, id)| EntropyRow {
                indicator: *id,
                entropy: e[j],
                divergence: dv[j],
                weight: w[j],
                lambda: lambda[j],
                adjusted: adjusted[j],
            })
            .collect();
        Ok(EntropyTable { rows })
    }

    pub fn weights(&self) -> BTreeMap<IndicatorId, f64> {
        self.rows.iter().map(|r| (r.indicator, r.weight)).collect()
    }

    /// Adjusted weights, if priors were applied.
    pub fn adjusted_weights(&self) -> Option<BTreeMap<IndicatorId, f64>> {
        self.rows
            .iter()
            .map(|r| r.adjusted.map(|a| (r.indicator, a)))
            .collect()
    }

    /// CSV with header `indicator,E,d,W,lambda,W_adj`, values at full precision.
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            wtr.serialize(row).expect("in-memory csv write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<EntropyTable, EntropyError> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| EntropyError::Parse(e.to_string()))?;
        if headers != vec!["indicator", "E", "d", "W", "lambda", "W_adj"] {
            return Err(EntropyError::Parse(format!(
                "expected header indicator,E,d,W,lambda,W_adj, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let rows = rdr
            .deserialize()
            .collect::<Result<Vec<EntropyRow>, _>>()
            .map_err(|e| EntropyError::Parse(e.to_string()))?;
        Ok(EntropyTable { rows })
    }
}
