//! Three-stage orchestration: catalog, consistency-gated entropy weighting,
//! and fuzzy-evidential fusion, collected into a [`RunManifest`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ahp::{self, AhpError, ConsistencyReport, DenominatorMode, RiTable};
use crate::bpa::Bpa;
use crate::catalog::{catalog, Indicator, IndicatorId};
use crate::entropy::{DecisionMatrix, EntropyError, EntropyTable};
use crate::evidence::{self, CombinationResult, EvidenceError, RankingReport};
use crate::frame::Label;
use crate::fuzzy::{self, DiscountFactor, FuzzyError, MembershipVector, OverlapMode, Score};
use crate::ingest::{self, IngestError};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How expert scores for one indicator are combined before fuzzification.
pub const SCORE_AGGREGATION: &str = "arithmetic-mean";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Catalog,
    Weighting,
    Fusion,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Catalog => "stage 1 (catalog)",
            Stage::Weighting => "stage 2 (weighting)",
            Stage::Fusion => "stage 3 (fusion)",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ErrorKind {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Ahp(#[from] AhpError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
    #[error("aggregated matrix is inconsistent: CR = {cr:.4} (must be below 0.1; use --force to continue)")]
    InconsistentMatrix { cr: f64 },
    #[error("{0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

/// An error annotated with the stage and input file it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub stage: Stage,
    pub file: Option<String>,
    pub kind: ErrorKind,
}

impl PipelineError {
    pub fn new(stage: Stage, file: Option<&str>, kind: impl Into<ErrorKind>) -> PipelineError {
        PipelineError {
            stage,
            file: file.map(str::to_string),
            kind: kind.into(),
        }
    }

    /// Process exit code: 1 validation, 2 consistency gate, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::InconsistentMatrix { .. } => 2,
            ErrorKind::Io(_) => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.stage)?;
        if let Some(file) = &self.file {
            write!(f, ": {file}")?;
        }
        write!(f, ": {}", self.kind)
    }
}

impl std::error::Error for PipelineError {}

/// Output rendering for [`crate::report::emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub scores: PathBuf,
    pub matrices: PathBuf,
    pub priors: PathBuf,
    pub bpa_fixtures: Option<PathBuf>,
    pub alpha: DiscountFactor,
    pub overlap_mode: OverlapMode,
    pub ci_denominator: DenominatorMode,
    pub ri_table: Option<PathBuf>,
    pub window: usize,
    pub stride: usize,
    pub force: bool,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub chart: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn new(scores: PathBuf, matrices: PathBuf, priors: PathBuf) -> PipelineConfig {
        PipelineConfig {
            scores,
            matrices,
            priors,
            bpa_fixtures: None,
            alpha: DiscountFactor::NONE,
            overlap_mode: OverlapMode::Adjacent,
            ci_denominator: DenominatorMode::Paper,
            ri_table: None,
            window: 4,
            stride: 2,
            force: false,
            out_dir: PathBuf::from("."),
            format: OutputFormat::Text,
            chart: None,
        }
    }

    pub fn settings(&self) -> Settings {
        Settings {
            alpha: self.alpha,
            overlap_mode: self.overlap_mode,
            ci_denominator: self.ci_denominator,
            window: self.window,
            stride: self.stride,
            force: self.force,
        }
    }
}

/// The numeric knobs of a run, independent of where inputs live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub alpha: DiscountFactor,
    pub overlap_mode: OverlapMode,
    pub ci_denominator: DenominatorMode,
    pub window: usize,
    pub stride: usize,
    pub force: bool,
}

impl Default for Settings {
    fn default() -> Self {
        PipelineConfig::new(PathBuf::new(), PathBuf::new(), PathBuf::new()).settings()
    }
}

/// One input document and a name to report it under.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Source {
        Source {
            name: name.into(),
            text: text.into(),
        }
    }

    fn read(path: &Path) -> Result<Source, PipelineError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::new(Stage::Config, Some(&name), ErrorKind::Io(e.to_string())))?;
        Ok(Source { name, text })
    }

    fn digest(&self, role: &str) -> InputDigest {
        InputDigest {
            role: role.to_string(),
            name: self.name.clone(),
            sha256: hex::encode(Sha256::digest(self.text.as_bytes())),
        }
    }
}

/// All inputs of a run, already loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub scores: Source,
    pub matrices: Source,
    pub priors: Source,
    pub bpa_fixtures: Option<Source>,
    pub ri_table: Option<Source>,
}

impl Inputs {
    /// The bundled published-evaluation fixture set.
    pub fn bundled() -> Inputs {
        use crate::fixtures::*;
        Inputs {
            scores: Source::new("bundled:scores.csv", SCORES_CSV),
            matrices: Source::new("bundled:matrices.json", MATRICES_JSON),
            priors: Source::new("bundled:priors.csv", PRIORS_CSV),
            bpa_fixtures: Some(Source::new("bundled:window_bpas.json", WINDOW_BPAS_JSON)),
            ri_table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub settings: Settings,
    pub ri_table: RiTable,
    pub score_aggregation: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpertConsistency {
    pub expert: String,
    pub report: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencySection {
    pub experts: Vec<ExpertConsistency>,
    pub aggregated: ConsistencyReport,
    pub aggregated_matrix: Vec<Vec<f64>>,
    /// `passed`, or `forced` when the gate failed under `--force`.
    pub gate: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rating {
    pub indicator: IndicatorId,
    pub score: Score,
    pub memberships: MembershipVector,
    pub label: Label,
    pub bpa: Bpa,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowFusion {
    pub label: String,
    pub members: Vec<IndicatorId>,
    pub result: CombinationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionSummary {
    pub windows: Vec<WindowFusion>,
    pub average: Bpa,
    pub betp: BTreeMap<Label, f64>,
    pub verdict: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFusion {
    pub label: String,
    pub bpa: Bpa,
}

/// Published window fusions averaged as-is.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureFusion {
    pub source: String,
    pub windows: Vec<NamedFusion>,
    pub average: Bpa,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rankings {
    pub by_weight: RankingReport,
    pub by_adjusted_weight: RankingReport,
    pub by_belief: RankingReport,
}

/// Everything a run computed, traceable to its input digests and settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: ToolInfo,
    pub inputs: Vec<InputDigest>,
    pub config: ConfigEcho,
    pub catalog: Vec<Indicator>,
    pub consistency: ConsistencySection,
    pub entropy: EntropyTable,
    pub ratings: Vec<Rating>,
    pub fusion: FusionSummary,
    pub fixture_fusion: Option<FixtureFusion>,
    pub rankings: Rankings,
    pub warnings: Vec<String>,
    /// Wall-clock milliseconds per stage; the only non-deterministic field.
    pub timings: BTreeMap<&'static str, f64>,
}

/// Index ranges of the sliding windows over `count` indicators.
///
/// Windows start every `stride` positions; when the last regular window stops
/// short of the end, one more window aligned to the end is added.
pub fn windows(count: usize, window: usize, stride: usize) -> Result<Vec<Range<usize>>, String> {
    if window == 0 || stride == 0 {
        return Err(format!("window ({window}) and stride ({stride}) must be at least 1"));
    }
    if window > count {
        return Err(format!("window {window} exceeds the {count} indicators"));
    }
    let mut out: Vec<Range<usize>> = (0..=count - window)
        .step_by(stride)
        .map(|start| start..start + window)
        .collect();
    if out.last().is_some_and(|r| r.end < count) {
        out.push(count - window..count);
    }
    Ok(out)
}

/// Table-style label for a window, e.g. `B1, B2, B3, B4`.
pub fn window_label(members: &[IndicatorId]) -> String {
    members.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Reads the configured files and runs the pipeline.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let inputs = Inputs {
        scores: Source::read(&config.scores)?,
        matrices: Source::read(&config.matrices)?,
        priors: Source::read(&config.priors)?,
        bpa_fixtures: config.bpa_fixtures.as_deref().map(Source::read).transpose()?,
        ri_table: config.ri_table.as_deref().map(Source::read).transpose()?,
    };
    run_inputs(&inputs, &config.settings())
}

/// Runs all three stages over already loaded inputs.
pub fn run_inputs(inputs: &Inputs, settings: &Settings) -> Result<RunManifest, PipelineError> {
    let mut timings = BTreeMap::new();
    let mut warnings = Vec::new();

    let clock = Instant::now();
    let catalog = catalog();
    let ids: Vec<IndicatorId> = catalog.iter().map(|i| i.id).collect();
    let window_ranges = windows(ids.len(), settings.window, settings.stride)
        .map_err(|e| PipelineError::new(Stage::Config, None, ErrorKind::Config(e)))?;
    let mut digests = vec![
        inputs.scores.digest("scores"),
        inputs.matrices.digest("matrices"),
        inputs.priors.digest("priors"),
    ];
    digests.extend(inputs.bpa_fixtures.as_ref().map(|s| s.digest("bpa_fixtures")));
    digests.extend(inputs.ri_table.as_ref().map(|s| s.digest("ri_table")));
    timings.insert("catalog", clock.elapsed().as_secs_f64() * 1e3);

    let clock = Instant::now();
    let ri_table = match &inputs.ri_table {
        Some(src) => ingest::parse_ri_table(&src.text)
            .map_err(|e| PipelineError::new(Stage::Weighting, Some(&src.name), e))?,
        None => RiTable::default(),
    };
    let (consistency, entropy) = weighting_stage(inputs, settings, &ids, &ri_table, &mut warnings)?;
    timings.insert("weighting", clock.elapsed().as_secs_f64() * 1e3);

    let clock = Instant::now();
    let err = |name: &str| {
        let name = name.to_string();
        move |e: ErrorKind| PipelineError::new(Stage::Fusion, Some(&name), e)
    };
    let scores = ingest::parse_scores(&inputs.scores.text, &ids)
        .and_then(|rows| ingest::mean_scores(&rows, &ids))
        .map_err(|e| err(&inputs.scores.name)(e.into()))?;
    let ratings = scores
        .iter()
        .map(|(id, score)| {
            let memberships = fuzzy::membership(*score);
            let bpa = fuzzy::to_bpa(&memberships, settings.alpha, settings.overlap_mode)?;
            Ok(Rating {
                indicator: *id,
                score: *score,
                memberships,
                label: fuzzy::rating_label(&memberships),
                bpa,
            })
        })
        .collect::<Result<Vec<_>, FuzzyError>>()
        .map_err(|e| err(&inputs.scores.name)(e.into()))?;

    let window_fusions = window_ranges
        .iter()
        .map(|range| {
            let members: Vec<IndicatorId> = ratings[range.clone()].iter().map(|r| r.indicator).collect();
            let bpas: Vec<Bpa> = ratings[range.clone()].iter().map(|r| r.bpa.clone()).collect();
            Ok(WindowFusion {
                label: window_label(&members),
                members,
                result: evidence::murphy_combine(&bpas)?,
            })
        })
        .collect::<Result<Vec<_>, EvidenceError>>()
        .map_err(|e| err(&inputs.scores.name)(e.into()))?;
    let window_bpas: Vec<Bpa> = window_fusions.iter().map(|w| w.result.bpa.clone()).collect();
    let average = evidence::average_bpas(&window_bpas).map_err(|e| err(&inputs.scores.name)(e.into()))?;
    let betp_values = evidence::pignistic(&average);
    let verdict = evidence::most_probable(&betp_values);
    let fusion = FusionSummary {
        windows: window_fusions,
        betp: Label::ALL.iter().map(|l| (*l, betp_values[l.index()])).collect(),
        average,
        verdict,
    };

    let fixture_fusion = match &inputs.bpa_fixtures {
        Some(src) => {
            let named = ingest::parse_bpa_fixtures(&src.text).map_err(|e| err(&src.name)(e.into()))?;
            let bpas: Vec<Bpa> = named.iter().map(|n| n.bpa.clone()).collect();
            let average = evidence::average_bpas(&bpas).map_err(|e| err(&src.name)(e.into()))?;
            Some(FixtureFusion {
                source: src.name.clone(),
                windows: named
                    .into_iter()
                    .map(|n| NamedFusion { label: n.name, bpa: n.bpa })
                    .collect(),
                average,
            })
        }
        None => None,
    };

    let rank_err = |e: EvidenceError| PipelineError::new(Stage::Fusion, None, e);
    let adjusted = entropy
        .adjusted_weights()
        .expect("priors are always applied in the pipeline");
    let belief: BTreeMap<IndicatorId, f64> = ratings
        .iter()
        .map(|r| (r.indicator, evidence::expected_score(&r.bpa)))
        .collect();
    let rankings = Rankings {
        by_weight: evidence::rank(&entropy.weights(), "entropy weight W").map_err(rank_err)?,
        by_adjusted_weight: evidence::rank(&adjusted, "adjusted weight W'").map_err(rank_err)?,
        by_belief: evidence::rank(&belief, "expected score under the pignistic transform of each indicator's mass function")
            .map_err(rank_err)?,
    };
    timings.insert("fusion", clock.elapsed().as_secs_f64() * 1e3);

    Ok(RunManifest {
        tool: ToolInfo {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        },
        inputs: digests,
        config: ConfigEcho {
            settings: *settings,
            ri_table,
            score_aggregation: SCORE_AGGREGATION,
        },
        catalog,
        consistency,
        entropy,
        ratings,
        fusion,
        fixture_fusion,
        rankings,
        warnings,
        timings,
    })
}

fn weighting_stage(
    inputs: &Inputs,
    settings: &Settings,
    ids: &[IndicatorId],
    ri_table: &RiTable,
    warnings: &mut Vec<String>,
) -> Result<(ConsistencySection, EntropyTable), PipelineError> {
    let name = inputs.matrices.name.as_str();
    let err = |e: ErrorKind| PipelineError::new(Stage::Weighting, Some(name), e);
    let set = ingest::parse_matrices(&inputs.matrices.text).map_err(|e| err(e.into()))?;
    if set.indicators != ids {
        return Err(err(ErrorKind::Config(format!(
            "matrix indicators {} do not match the catalog B1..B{}",
            window_label(&set.indicators),
            ids.len()
        ))));
    }
    let experts = set
        .experts
        .iter()
        .map(|(expert, m)| {
            Ok(ExpertConsistency {
                expert: expert.clone(),
                report: ahp::consistency(m, ri_table, settings.ci_denominator)?,
            })
        })
        .collect::<Result<Vec<_>, AhpError>>()
        .map_err(|e| err(e.into()))?;
    let aggregated_matrix = ahp::aggregate_geometric(&set.matrices()).map_err(|e| err(e.into()))?;
    let aggregated = ahp::consistency(&aggregated_matrix, ri_table, settings.ci_denominator)
        .map_err(|e| err(e.into()))?;
    let gate = if aggregated.acceptable {
        "passed"
    } else if settings.force {
        warnings.push(format!(
            "consistency gate failed (CR = {:.4}); continuing because of --force",
            aggregated.cr
        ));
        "forced"
    } else {
        return Err(err(ErrorKind::InconsistentMatrix { cr: aggregated.cr }));
    };

    let priors_name = inputs.priors.name.as_str();
    let priors = ingest::parse_priors(&inputs.priors.text, ids)
        .map_err(|e| PipelineError::new(Stage::Weighting, Some(priors_name), e))?;
    let decision = DecisionMatrix::from_pairwise(&aggregated_matrix, ids.to_vec()).map_err(|e| err(e.into()))?;
    let entropy = EntropyTable::compute(&decision, Some(&priors))
        .map_err(|e| PipelineError::new(Stage::Weighting, Some(priors_name), e))?;
    Ok((
        ConsistencySection {
            experts,
            aggregated,
            aggregated_matrix: aggregated_matrix.to_rows(),
            gate,
        },
        entropy,
    ))
}
