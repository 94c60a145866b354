//! Text, CSV and JSON renderings of a [`RunManifest`].
//!
//! All renderings are built in memory first; each file is then written to a
//! temporary sibling and renamed into place, so a failed run leaves no
//! half-written output behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bpa::Bpa;
use crate::entropy::EntropyTable;
use crate::evidence::RankingReport;
use crate::frame::{Label, Subset};
use crate::pipeline::{OutputFormat, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Column headings of the window-fusion table, in order.
pub const FUSION_COLUMNS: [&str; 11] = [
    "VL", "L", "M", "H", "VH", "VL,L", "L,M", "M,H", "H,VH", "theta", "other",
];

fn fusion_subsets() -> [Subset; 10] {
    use Label::*;
    let pair = |a, b| [a, b].into_iter().collect::<Subset>();
    [
        Subset::singleton(VeryLow),
        Subset::singleton(Low),
        Subset::singleton(Medium),
        Subset::singleton(High),
        Subset::singleton(VeryHigh),
        pair(VeryLow, Low),
        pair(Low, Medium),
        pair(Medium, High),
        pair(High, VeryHigh),
        Subset::THETA,
    ]
}

/// The eleven fusion-table cells of a mass function; `other` collects focal
/// sets that have no column of their own.
pub fn fusion_cells(b: &Bpa) -> [f64; 11] {
    let subsets = fusion_subsets();
    let mut cells = [0.0; 11];
    for (i, s) in subsets.iter().enumerate() {
        cells[i] = b.mass(*s);
    }
    cells[10] = b
        .focal()
        .filter(|(s, _)| !subsets.contains(s))
        .fold(0.0, |acc, (_, m)| acc + m);
    cells
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionRow {
    pub window: String,
    pub cells: Vec<f64>,
}

/// Window rows followed by an `Average` row.
pub fn fusion_rows(m: &RunManifest) -> Vec<FusionRow> {
    m.fusion
        .windows
        .iter()
        .map(|w| (w.label.clone(), &w.result.bpa))
        .chain(std::iter::once(("Average".to_string(), &m.fusion.average)))
        .map(|(window, bpa)| FusionRow {
            window,
            cells: fusion_cells(bpa).to_vec(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingRow {
    pub indicator: String,
    pub score: f64,
    pub label: Label,
}

fn rating_rows(m: &RunManifest) -> Vec<RatingRow> {
    m.ratings
        .iter()
        .map(|r| RatingRow {
            indicator: r.indicator.to_string(),
            score: r.score.value(),
            label: r.label,
        })
        .collect()
}

fn rankings(m: &RunManifest) -> [&RankingReport; 3] {
    [
        &m.rankings.by_weight,
        &m.rankings.by_adjusted_weight,
        &m.rankings.by_belief,
    ]
}

/// Schema of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonReport<'a> {
    pub entropy: &'a EntropyTable,
    pub ratings: Vec<RatingRow>,
    pub fusion: JsonFusion,
    pub rankings: [&'a RankingReport; 3],
    pub verdict: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonFusion {
    pub columns: [&'static str; 11],
    pub rows: Vec<FusionRow>,
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8")
}

fn fusion_csv(m: &RunManifest) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("window").chain(FUSION_COLUMNS);
    w.write_record(header).expect("in-memory csv write");
    for row in fusion_rows(m) {
        let record = std::iter::once(row.window).chain(row.cells.iter().map(f64::to_string));
        w.write_record(record).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn ranking_csv(m: &RunManifest) -> String {
    #[derive(Serialize)]
    struct Row<'a> {
        method: &'a str,
        rank: usize,
        indicator: String,
        value: f64,
    }
    csv_string(rankings(m).into_iter().flat_map(|r| {
        r.entries.iter().map(move |e| Row {
            method: &r.method,
            rank: e.rank,
            indicator: e.indicator.to_string(),
            value: e.value,
        })
    }))
}

fn opt3(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

/// Plain-text rendering of all tables, values rounded to three decimals.
pub fn render_text(m: &RunManifest) -> String {
    let mut s = String::new();
    let c = &m.consistency.aggregated;
    let _ = writeln!(s, "Consistency ({} mode)", c.mode);
    let _ = writeln!(
        s,
        "  lambda_max = {:.4}  CI = {:.4}  RI = {:.2}  CR = {:.4}  gate: {}",
        c.lambda_max, c.ci, c.ri, c.cr, m.consistency.gate
    );
    for w in &m.warnings {
        let _ = writeln!(s, "  warning: {w}");
    }

    let _ = writeln!(s, "\nEntropy weights");
    let _ = writeln!(s, "{:<10} {:>8} {:>8} {:>8} {:>8} {:>8}", "Indicator", "E", "d", "W", "lambda", "W'");
    for r in &m.entropy.rows {
        let _ = writeln!(
            s,
            "{:<10} {:>8.3} {:>8.3} {:>8.3} {:>8} {:>8}",
            r.indicator.to_string(),
            r.entropy,
            r.divergence,
            r.weight,
            opt3(r.lambda),
            opt3(r.adjusted)
        );
    }

    let _ = writeln!(s, "\nIndicator ratings");
    let _ = writeln!(s, "{:<10} {:<48} {:>6} {:>6}", "Indicator", "Description", "Score", "Rating");
    for (r, ind) in m.ratings.iter().zip(&m.catalog) {
        let _ = writeln!(
            s,
            "{:<10} {:<48} {:>6.2} {:>6}",
            r.indicator.to_string(),
            ind.description,
            r.score.value(),
            r.label.code()
        );
    }

    let _ = writeln!(s, "\nEvidence combination (alpha = {}, {} overlap)", m.config.settings.alpha.value(), m.config.settings.overlap_mode);
    let _ = write!(s, "{:<20}", "Window");
    for col in FUSION_COLUMNS {
        let _ = write!(s, " {col:>6}");
    }
    let _ = writeln!(s);
    for row in fusion_rows(m) {
        let _ = write!(s, "{:<20}", row.window);
        for v in &row.cells {
            let _ = write!(s, " {v:>6.3}");
        }
        let _ = writeln!(s);
    }
    let betp: Vec<String> = m.fusion.betp.iter().map(|(l, p)| format!("{l}={p:.3}")).collect();
    let _ = writeln!(s, "BetP: {}  verdict: {}", betp.join(" "), m.fusion.verdict);

    if let Some(fx) = &m.fixture_fusion {
        let _ = writeln!(s, "\nFixture windows ({})", fx.source);
        for (label, bpa) in fx
            .windows
            .iter()
            .map(|w| (w.label.as_str(), &w.bpa))
            .chain(std::iter::once(("Average", &fx.average)))
        {
            let _ = write!(s, "{label:<20}");
            for v in fusion_cells(bpa) {
                let _ = write!(s, " {v:>6.3}");
            }
            let _ = writeln!(s);
        }
    }

    for r in rankings(m) {
        let _ = writeln!(s, "\nRanking by {} (top {}, bottom {})", r.method, r.top, r.bottom);
        for e in &r.entries {
            let _ = writeln!(s, "  {:>2}. {:<4} {:.4}", e.rank, e.indicator.to_string(), e.value);
        }
    }
    s
}

/// Renders every output file as `(file name, contents)` without touching disk.
pub fn render(m: &RunManifest, format: OutputFormat) -> Vec<(&'static str, String)> {
    let manifest = serde_json::to_string_pretty(m).expect("manifest serializes");
    let mut files = vec![("manifest.json", manifest + "\n")];
    match format {
        OutputFormat::Text => files.push(("report.txt", render_text(m))),
        OutputFormat::Csv => {
            files.push(("entropy.csv", m.entropy.to_csv()));
            files.push(("ratings.csv", csv_string(rating_rows(m))));
            files.push(("fusion.csv", fusion_csv(m)));
            files.push(("ranking.csv", ranking_csv(m)));
        }
        OutputFormat::Json => {
            let report = JsonReport {
                entropy: &m.entropy,
                ratings: rating_rows(m),
                fusion: JsonFusion {
                    columns: FUSION_COLUMNS,
                    rows: fusion_rows(m),
                },
                rankings: rankings(m),
                verdict: m.fusion.verdict,
            };
            files.push(("report.json", serde_json::to_string_pretty(&report).expect("serializes") + "\n"));
        }
    }
    files
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    let io = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes the manifest and the renderings for `format` into `out_dir`.
pub fn emit_report(m: &RunManifest, format: OutputFormat, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let files = render(m, format);
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = out_dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
