use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use evirank::ahp::{self, DenominatorMode, RiTable};
use evirank::entropy::{DecisionMatrix, EntropyTable};
use evirank::evidence;
use evirank::frame::Label;
use evirank::fuzzy::{DiscountFactor, OverlapMode};
use evirank::ingest;
use evirank::pipeline::{run_pipeline, OutputFormat, PipelineConfig, PipelineError, Stage};
use evirank::{chart, report, selftest};

#[derive(Parser)]
#[command(name = "evirank", version, about = "Rank evaluation indicators with entropy weights and fused fuzzy evidence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write reports
    Evaluate(EvaluateArgs),
    /// Check pairwise-matrix consistency only
    Consistency(ConsistencyArgs),
    /// Compute entropy weights only
    Weights(WeightsArgs),
    /// Fuse mass functions read from a BPA fixture file
    Fuse(FuseArgs),
    /// Run the built-in fixture and property checks
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Overlap {
    Adjacent,
    Theta,
}

#[derive(Clone, Copy, ValueEnum)]
enum Denominator {
    Paper,
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct MatrixArgs {
    /// Expert pairwise matrices (JSON)
    #[arg(long)]
    matrices: PathBuf,
    #[arg(long, value_enum, default_value = "paper")]
    ci_denominator: Denominator,
    /// Random index table overriding the built-in one (JSON object, order -> RI)
    #[arg(long)]
    ri_table: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Expert scores (CSV: expert_id,indicator,score)
    #[arg(long)]
    scores: PathBuf,
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Prior weights (CSV: indicator,lambda)
    #[arg(long)]
    priors: PathBuf,
    /// Extra mass functions to average and report alongside the run
    #[arg(long)]
    bpa_fixtures: Option<PathBuf>,
    /// Reliability of each rating, in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "adjacent")]
    overlap_mode: Overlap,
    #[arg(long, default_value_t = 4)]
    window: usize,
    #[arg(long, default_value_t = 2)]
    stride: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write an SVG bar chart of the entropy table here
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Continue past a failed consistency gate
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct WeightsArgs {
    /// Expert pairwise matrices (JSON); their geometric mean is the decision matrix
    #[arg(long)]
    matrices: PathBuf,
    /// Prior weights (CSV: indicator,lambda)
    #[arg(long)]
    priors: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct FuseArgs {
    /// One BPA document or an array of them (JSON)
    #[arg(long)]
    bpa_fixtures: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn invalid(stage: &str, file: &Path, e: impl Display) -> Failure {
    Failure {
        code: 1,
        message: format!("{stage}: {}: {e}", file.display()),
    }
}

fn read(stage: &str, path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 3,
        message: format!("{stage}: {}: I/O error: {e}", path.display()),
    })
}

fn denominator(d: Denominator) -> DenominatorMode {
    match d {
        Denominator::Paper => DenominatorMode::Paper,
        Denominator::Standard => DenominatorMode::Standard,
    }
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let alpha = DiscountFactor::new(args.alpha).map_err(|e| Failure {
        code: 1,
        message: format!("config: --alpha: {e}"),
    })?;
    let mut config = PipelineConfig::new(args.scores, args.matrix.matrices, args.priors);
    config.bpa_fixtures = args.bpa_fixtures;
    config.alpha = alpha;
    config.overlap_mode = match args.overlap_mode {
        Overlap::Adjacent => OverlapMode::Adjacent,
        Overlap::Theta => OverlapMode::Theta,
    };
    config.ci_denominator = denominator(args.matrix.ci_denominator);
    config.ri_table = args.matrix.ri_table;
    config.window = args.window;
    config.stride = args.stride;
    config.force = args.force;
    config.out_dir = args.out_dir;
    config.format = match args.format {
        Format::Text => OutputFormat::Text,
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    config.chart = args.chart;

    let manifest = run_pipeline(&config)?;
    let report_error = |e: report::ReportError| Failure {
        code: 3,
        message: format!("{}: {e}", Stage::Report),
    };
    let written = report::emit_report(&manifest, config.format, &config.out_dir).map_err(report_error)?;
    if let Some(path) = &config.chart {
        chart::emit_chart(&manifest, path).map_err(report_error)?;
    }

    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "consistency: CR = {:.4} ({})",
        manifest.consistency.aggregated.cr, manifest.consistency.gate
    );
    println!(
        "top by W: {}  bottom by W': {}  top by belief: {}",
        manifest.rankings.by_weight.top, manifest.rankings.by_adjusted_weight.bottom, manifest.rankings.by_belief.top
    );
    println!("overall grade: {}", manifest.fusion.verdict);
    for path in written.iter().chain(config.chart.iter()) {
        println!("wrote {}", path.display());
    }
    println!("done in {:.3}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn load_ri(path: Option<&Path>) -> Result<RiTable, Failure> {
    match path {
        Some(p) => ingest::parse_ri_table(&read("consistency", p)?).map_err(|e| invalid("consistency", p, e)),
        None => Ok(RiTable::default()),
    }
}

fn consistency(args: ConsistencyArgs) -> Result<(), Failure> {
    let path = &args.matrix.matrices;
    let set = ingest::parse_matrices(&read("consistency", path)?).map_err(|e| invalid("consistency", path, e))?;
    let ri = load_ri(args.matrix.ri_table.as_deref())?;
    let mode = denominator(args.matrix.ci_denominator);
    let mut rows = Vec::new();
    for (expert, m) in &set.experts {
        rows.push((expert.clone(), ahp::consistency(m, &ri, mode).map_err(|e| invalid("consistency", path, e))?));
    }
    let aggregated = ahp::aggregate_geometric(&set.matrices()).map_err(|e| invalid("consistency", path, e))?;
    let agg = ahp::consistency(&aggregated, &ri, mode).map_err(|e| invalid("consistency", path, e))?;
    rows.push(("aggregated".to_string(), agg.clone()));

    match args.format {
        Format::Json => {
            let body: Vec<_> = rows.iter().map(|(name, r)| json!({ "matrix": name, "report": r })).collect();
            println!("{}", serde_json::to_string_pretty(&body).expect("serializes"));
        }
        Format::Csv => {
            println!("matrix,order,lambda_max,ci,ri,cr,acceptable");
            for (name, r) in &rows {
                println!("{name},{},{},{},{},{},{}", r.order, r.lambda_max, r.ci, r.ri, r.cr, r.acceptable);
            }
        }
        Format::Text => {
            println!("{:<14} {:>5} {:>10} {:>8} {:>6} {:>8}  ok", "matrix", "n", "lambda_max", "CI", "RI", "CR");
            for (name, r) in &rows {
                println!(
                    "{name:<14} {:>5} {:>10.4} {:>8.4} {:>6.2} {:>8.4}  {}",
                    r.order,
                    r.lambda_max,
                    r.ci,
                    r.ri,
                    r.cr,
                    if r.acceptable { "yes" } else { "no" }
                );
            }
        }
    }
    if agg.acceptable {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            message: format!("consistency: {}: aggregated CR = {:.4} is not below 0.1", path.display(), agg.cr),
        })
    }
}

fn weights(args: WeightsArgs) -> Result<(), Failure> {
    let path = &args.matrices;
    let set = ingest::parse_matrices(&read("weights", path)?).map_err(|e| invalid("weights", path, e))?;
    let priors = match &args.priors {
        Some(p) => Some(ingest::parse_priors(&read("weights", p)?, &set.indicators).map_err(|e| invalid("weights", p, e))?),
        None => None,
    };
    let aggregated = ahp::aggregate_geometric(&set.matrices()).map_err(|e| invalid("weights", path, e))?;
    let decision = DecisionMatrix::from_pairwise(&aggregated, set.indicators.clone()).map_err(|e| invalid("weights", path, e))?;
    let table = EntropyTable::compute(&decision, priors.as_ref()).map_err(|e| {
        invalid("weights", args.priors.as_deref().unwrap_or(path), e)
    })?;
    match args.format {
        Format::Csv => print!("{}", table.to_csv()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&table).expect("serializes")),
        Format::Text => {
            println!("{:<10} {:>8} {:>8} {:>8} {:>8} {:>8}", "indicator", "E", "d", "W", "lambda", "W'");
            let opt = |v: Option<f64>| v.map_or_else(|| "-".into(), |v| format!("{v:.4}"));
            for r in &table.rows {
                println!(
                    "{:<10} {:>8.4} {:>8.4} {:>8.4} {:>8} {:>8}",
                    r.indicator.to_string(),
                    r.entropy,
                    r.divergence,
                    r.weight,
                    opt(r.lambda),
                    opt(r.adjusted)
                );
            }
        }
    }
    Ok(())
}

fn fuse(args: FuseArgs) -> Result<(), Failure> {
    let path = &args.bpa_fixtures;
    let named = ingest::parse_bpa_fixtures(&read("fuse", path)?).map_err(|e| invalid("fuse", path, e))?;
    let bpas: Vec<_> = named.iter().map(|n| n.bpa.clone()).collect();
    let average = evidence::average_bpas(&bpas).map_err(|e| invalid("fuse", path, e))?;
    let murphy = evidence::murphy_combine(&bpas).map_err(|e| invalid("fuse", path, e))?;
    let betp = evidence::pignistic(&murphy.bpa);
    let verdict = evidence::most_probable(&betp);
    match args.format {
        Format::Json => {
            let body = json!({
                "inputs": named.iter().map(|n| json!({ "name": n.name, "bpa": n.bpa })).collect::<Vec<_>>(),
                "average": average,
                "murphy": murphy,
                "verdict": verdict,
            });
            println!("{}", serde_json::to_string_pretty(&body).expect("serializes"));
        }
        Format::Csv => {
            println!("row,{}", report::FUSION_COLUMNS.map(|c| format!("\"{c}\"")).join(","));
            let rows = named
                .iter()
                .map(|n| (n.name.clone(), &n.bpa))
                .chain([("Average".to_string(), &average), ("Murphy".to_string(), &murphy.bpa)]);
            for (name, b) in rows {
                let cells: Vec<String> = report::fusion_cells(b).iter().map(f64::to_string).collect();
                println!("\"{name}\",{}", cells.join(","));
            }
        }
        Format::Text => {
            print!("{:<20}", "row");
            for c in report::FUSION_COLUMNS {
                print!(" {c:>6}");
            }
            println!();
            let rows = named
                .iter()
                .map(|n| (n.name.as_str(), &n.bpa))
                .chain([("Average", &average), ("Murphy", &murphy.bpa)]);
            for (name, b) in rows {
                print!("{name:<20}");
                for v in report::fusion_cells(b) {
                    print!(" {v:>6.3}");
                }
                println!();
            }
            let probs: Vec<String> = Label::ALL.iter().map(|l| format!("{l}={:.3}", betp[l.index()])).collect();
            println!("conflict k = {:.4}", murphy.conflict_k);
            println!("BetP: {}  verdict: {verdict}", probs.join(" "));
        }
    }
    Ok(())
}

fn run_selftest(args: SelftestArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let results = selftest::run_all(args.seed);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!(
        "{} passed, {failed} failed in {:.2}s (seed {})",
        results.len() - failed,
        started.elapsed().as_secs_f64(),
        args.seed
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("selftest: {failed} check(s) failed"),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Consistency(a) => consistency(a),
        Command::Weights(a) => weights(a),
        Command::Fuse(a) => fuse(a),
        Command::Selftest(a) => run_selftest(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
