//! Parsers for the pipeline's input files.
//!
//! Every parser works on in-memory text so it can be driven directly by tests
//! and fuzzers; the `read_*` helpers add file access on top.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::ahp::{AhpError, PairwiseMatrix, RiTable};
use crate::bpa::{parse_bpa_documents, BpaError, NamedBpa};
use crate::catalog::IndicatorId;
use crate::entropy::Priors;
use crate::fuzzy::Score;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("CSV error{}: {message}", fmt_line(*line))]
    Csv { line: Option<u64>, message: String },
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("line {line}: score {value} is outside [0, 10]")]
    ScoreOutOfRange { line: u64, value: f64 },
    #[error("line {line}: {message}")]
    InvalidValue { line: u64, message: String },
    #[error("line {line}: unknown indicator {id:?}")]
    UnknownIndicator { line: u64, id: String },
    #[error("line {line}: indicator {id} listed more than once")]
    DuplicateIndicator { line: u64, id: IndicatorId },
    #[error("no entry for indicator {0}")]
    MissingIndicator(IndicatorId),
    #[error("input is empty: {0}")]
    EmptyInput(&'static str),
    #[error("expert {expert:?}: matrix order {found} does not match {expected} indicators")]
    OrderMismatch {
        expert: String,
        expected: usize,
        found: usize,
    },
    #[error("expert {expert:?}: {source}")]
    InvalidMatrix { expert: String, source: AhpError },
    #[error(transparent)]
    Bpa(#[from] BpaError),
}

fn fmt_line(line: Option<u64>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

impl From<serde_json::Error> for IngestError {
    fn from(e: serde_json::Error) -> Self {
        IngestError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        IngestError::Csv {
            line: e.position().map(|p| p.line()),
            message: e.to_string(),
        }
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn expect_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), IngestError> {
    let found = rdr.headers()?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(IngestError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn parse_indicator(raw: &str, line: u64, known: &[IndicatorId]) -> Result<IndicatorId, IngestError> {
    raw.parse::<IndicatorId>()
        .ok()
        .filter(|id| known.contains(id))
        .ok_or_else(|| IngestError::UnknownIndicator {
            line,
            id: raw.to_string(),
        })
}

fn parse_number(raw: &str, line: u64, what: &str) -> Result<f64, IngestError> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| IngestError::InvalidValue {
            line,
            message: format!("{what} {raw:?} is not a finite number"),
        })
}

/// One row of the scores file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub line: u64,
    pub expert_id: String,
    pub indicator: IndicatorId,
    pub score: Score,
}

/// Parses `expert_id,indicator,score` rows. Indicators must be in `known`.
pub fn parse_scores(text: &str, known: &[IndicatorId]) -> Result<Vec<ScoreRow>, IngestError> {
    let mut rdr = csv_reader(text);
    expect_header(&mut rdr, &["expert_id", "indicator", "score"])?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let indicator = parse_indicator(&record[1], line, known)?;
        let value = parse_number(&record[2], line, "score")?;
        let score = Score::new(value).map_err(|_| IngestError::ScoreOutOfRange { line, value })?;
        rows.push(ScoreRow {
            line,
            expert_id: record[0].to_string(),
            indicator,
            score,
        });
    }
    Ok(rows)
}

/// Arithmetic mean score per indicator; every id in `required` must appear.
pub fn mean_scores(
    rows: &[ScoreRow],
    required: &[IndicatorId],
) -> Result<BTreeMap<IndicatorId, Score>, IngestError> {
    let mut groups: BTreeMap<IndicatorId, Vec<f64>> = BTreeMap::new();
    for row in rows {
        groups.entry(row.indicator).or_default().push(row.score.value());
    }
    required
        .iter()
        .map(|id| {
            let values = groups.get(id).ok_or(IngestError::MissingIndicator(*id))?;
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            // the mean of in-range values is in range up to rounding
            let score = Score::new(mean.clamp(0.0, 10.0)).expect("clamped");
            Ok((*id, score))
        })
        .collect()
}

/// Reads a scores file and averages per indicator.
pub fn ingest_scores(
    path: &Path,
    indicators: &[IndicatorId],
) -> Result<BTreeMap<IndicatorId, Score>, IngestError> {
    let text = read_text(path)?;
    mean_scores(&parse_scores(&text, indicators)?, indicators)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    indicators: Vec<String>,
    experts: Vec<ExpertEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpertEntry {
    id: String,
    matrix: Vec<Vec<f64>>,
}

/// Validated expert matrices over a list of indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    pub indicators: Vec<IndicatorId>,
    pub experts: Vec<(String, PairwiseMatrix)>,
}

impl MatrixSet {
    pub fn matrices(&self) -> Vec<PairwiseMatrix> {
        self.experts.iter().map(|(_, m)| m.clone()).collect()
    }
}

/// Parses `{"indicators": [...], "experts": [{"id", "matrix"}]}`.
pub fn parse_matrices(text: &str) -> Result<MatrixSet, IngestError> {
    let file: MatrixFile = serde_json::from_str(text)?;
    let mut indicators = Vec::with_capacity(file.indicators.len());
    for (i, raw) in file.indicators.iter().enumerate() {
        let id = raw.parse::<IndicatorId>().map_err(|_| IngestError::UnknownIndicator {
            line: i as u64 + 1,
            id: raw.clone(),
        })?;
        if indicators.contains(&id) {
            return Err(IngestError::DuplicateIndicator {
                line: i as u64 + 1,
                id,
            });
        }
        indicators.push(id);
    }
    if indicators.is_empty() {
        return Err(IngestError::EmptyInput("indicators"));
    }
    if file.experts.is_empty() {
        return Err(IngestError::EmptyInput("experts"));
    }
    let n = indicators.len();
    let mut experts = Vec::with_capacity(file.experts.len());
    for e in file.experts {
        let found = e.matrix.len();
        if found != n {
            return Err(IngestError::OrderMismatch {
                expert: e.id,
                expected: n,
                found,
            });
        }
        match PairwiseMatrix::from_rows(e.matrix) {
            Ok(m) => experts.push((e.id, m)),
            Err(source) => return Err(IngestError::InvalidMatrix { expert: e.id, source }),
        }
    }
    Ok(MatrixSet { indicators, experts })
}

pub fn ingest_matrices(path: &Path) -> Result<MatrixSet, IngestError> {
    parse_matrices(&read_text(path)?)
}

/// Parses `indicator,lambda` rows. Indicators must be in `known`.
pub fn parse_priors(text: &str, known: &[IndicatorId]) -> Result<Priors, IngestError> {
    let mut rdr = csv_reader(text);
    expect_header(&mut rdr, &["indicator", "lambda"])?;
    let mut priors = Priors::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let id = parse_indicator(&record[0], line, known)?;
        let value = parse_number(&record[1], line, "lambda")?;
        if value < 0.0 {
            return Err(IngestError::InvalidValue {
                line,
                message: format!("lambda {value} is negative"),
            });
        }
        if priors.insert(id, value).is_some() {
            return Err(IngestError::DuplicateIndicator { line, id });
        }
    }
    Ok(priors)
}

/// Parses a JSON object mapping matrix order to random index, e.g. `{"3": 0.58}`.
pub fn parse_ri_table(text: &str) -> Result<RiTable, IngestError> {
    let raw: BTreeMap<String, f64> = serde_json::from_str(text)?;
    let mut entries = BTreeMap::new();
    for (i, (key, value)) in raw.into_iter().enumerate() {
        let line = i as u64 + 1;
        let order = key
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| IngestError::InvalidValue {
                line,
                message: format!("order {key:?} is not a positive integer"),
            })?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(IngestError::InvalidValue {
                line,
                message: format!("random index {value} for order {order} is invalid"),
            });
        }
        entries.insert(order, value);
    }
    if entries.is_empty() {
        return Err(IngestError::EmptyInput("random index table"));
    }
    Ok(RiTable::new(entries))
}

/// Parses BPA fixtures (one document or an array of them).
pub fn parse_bpa_fixtures(text: &str) -> Result<Vec<NamedBpa>, IngestError> {
    let bpas = parse_bpa_documents(text)?;
    if bpas.is_empty() {
        return Err(IngestError::EmptyInput("BPA fixtures"));
    }
    Ok(bpas)
}

/// Reads a file as UTF-8. I/O failures are reported separately from parse errors.
pub fn read_text(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|e| IngestError::Csv {
        line: None,
        message: format!("{}: {e}", path.display()),
    })
}
