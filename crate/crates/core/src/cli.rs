//! Command-line front end.
//!
//! Exit status: 0 on success (an undefined estimate, printed as `nd`, is a
//! success), 1 on numerical failure, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{self, RatioTest, RectSpec};
use crate::dataset::Dataset;
use crate::error::Error;
use crate::gap::{estimate_clusters, GapConfig, SdDivisor, Variant};
use crate::linkage::{average_linkage, cut_tree};
use crate::metric::{pairwise_matrix, Metric};
use crate::report::{GapReport, TraceDocument};
use crate::sim::{run_experiment, summarize, ExperimentSpec, Family};
use crate::stream::Stream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gapstat", version, about = "Estimate the number of clusters with the Gap statistic")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the number of clusters of a CSV dataset.
    Run(RunArgs),
    /// Run a simulation family and tabulate the selected k.
    Simulate(SimulateArgs),
    /// Evaluate closed-form diagnostics.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Cut the average-linkage dendrogram of a CSV dataset into k clusters.
    Cluster(ClusterArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "log-pooled")]
    pub variant: String,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    #[arg(long, default_value_t = 50)]
    pub b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "squared-euclidean")]
    pub metric: String,
    /// Use the B - 1 divisor for the reference standard deviation.
    #[arg(long)]
    pub sample_sd: bool,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// overlap, unequal or degenerate.
    #[arg(long)]
    pub family: String,
    /// Mean offset (overlap), row 1-5 (unequal) or dimension (degenerate).
    #[arg(long, allow_negative_numbers = true)]
    pub param: f64,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value = "log-pooled,direct-pooled", value_delimiter = ',')]
    pub variants: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    #[arg(long, default_value_t = 50)]
    pub b: usize,
    #[arg(long, default_value = "squared-euclidean")]
    pub metric: String,
    /// Directory receiving `frequencies.csv` and `traces.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Expected distance of two uniform points in an a x b rectangle.
    RectDistance {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
    /// Largest cluster-size ratio for which two clusters are still found.
    PredictM {
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, allow_negative_numbers = true)]
        davg: f64,
        /// log or direct.
        #[arg(long, default_value = "log")]
        variant: String,
        /// Ratio to test in addition to the scan.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Relative spread of pairwise distances of uniform points.
    Concentration {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(long, default_value = "squared-euclidean")]
    pub metric: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure categories mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateDispersion { .. } | Error::NonPositiveDispersion { .. } => {
                Failure::Numerical(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {}: {e}", path.display()))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be >= 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &mut buf)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => dispatch(&cli.command, &mut buf),
    };
    let _ = stdout.write_all(&buf);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(stderr, "numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn dispatch(command: &Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Run(a) => cmd_run(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Cluster(a) => cmd_cluster(a, out),
    }
}

fn emit(out: &mut impl Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn cmd_run(a: &RunArgs, out: &mut impl Write) -> Result<(), Failure> {
    let variant: Variant = a.variant.parse()?;
    let metric: Metric = a.metric.parse()?;
    let data = Dataset::load_csv_auto(&a.input)?;
    let config = GapConfig {
        k_max: a.kmax,
        b: a.b,
        variant,
        seed: a.seed,
        metric,
        sd_divisor: if a.sample_sd {
            SdDivisor::Sample
        } else {
            SdDivisor::Population
        },
    };
    config.validate(data.n())?;
    let estimate = estimate_clusters(&data, &config)?;
    if let Some(path) = &a.out {
        let report = GapReport::from(&estimate);
        let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
        fs::write(path, text + "\n").map_err(|e| io_failure(path, e))?;
    }
    emit(out, &format!("{}\n", estimate.selection.selected_k))
}

fn cmd_simulate(a: &SimulateArgs, out: &mut impl Write) -> Result<(), Failure> {
    let family = Family::parse(&a.family, a.param)?;
    let variants = a
        .variants
        .iter()
        .map(|v| v.trim().parse::<Variant>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = ExperimentSpec::new(family, a.reps, variants, a.seed);
    spec.gap.k_max = a.kmax;
    spec.gap.b = a.b;
    spec.gap.metric = a.metric.parse()?;
    let report = run_experiment(&spec)?;
    let csv = summarize(std::slice::from_ref(&report))?.to_csv();
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        let csv_path = dir.join("frequencies.csv");
        fs::write(&csv_path, &csv).map_err(|e| io_failure(&csv_path, e))?;
        let json_path = dir.join("traces.json");
        let doc = TraceDocument::from(report);
        let text = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
        fs::write(&json_path, text + "\n").map_err(|e| io_failure(&json_path, e))?;
    }
    emit(out, &csv)
}

fn cmd_analyze(a: &AnalyzeCommand, out: &mut impl Write) -> Result<(), Failure> {
    let value = match *a {
        AnalyzeCommand::RectDistance { a, b } => {
            let e = analysis::expected_rect_distance(RectSpec { a, b })?;
            json!({ "a": a, "b": b, "expected_distance": e })
        }
        AnalyzeCommand::PredictM {
            sigma,
            delta,
            davg,
            ref variant,
            m,
        } => {
            let test: RatioTest = variant.parse()?;
            let scn = analysis::UnequalSizeScenario {
                sigma,
                delta,
                n_total: 2,
                m,
                d_avg: davg,
            };
            let f = analysis::feasible_ratio(&scn, test)?;
            json!({
                "sigma": sigma,
                "delta": delta,
                "davg": davg,
                "variant": variant,
                "e_d1": f.e_d1,
                "e_d2": f.e_d2,
                "m": m,
                "holds": f.holds,
                "max_m": f.max_m,
            })
        }
        AnalyzeCommand::Concentration { p, n, seed } => {
            let r = analysis::distance_concentration(p, n, &mut Stream::new(seed))?;
            json!({ "p": p, "n": n, "seed": seed, "spread_ratio": r })
        }
    };
    emit(out, &format!("{value}\n"))
}

fn cmd_cluster(a: &ClusterArgs, out: &mut impl Write) -> Result<(), Failure> {
    let metric: Metric = a.metric.parse()?;
    let data = Dataset::load_csv_auto(&a.input)?;
    if a.k < 1 || a.k as usize > data.n() {
        return Err(Failure::Usage(format!("--k must be in 1..={}, got {}", data.n(), a.k)));
    }
    let tree = average_linkage(&pairwise_matrix(&data, metric));
    let part = cut_tree(&tree, a.k as usize)?;
    let mut csv = String::from("row,label\n");
    for (i, l) in part.labels().iter().enumerate() {
        csv.push_str(&format!("{i},{l}\n"));
    }
    match &a.out {
        Some(path) => fs::write(path, &csv).map_err(|e| io_failure(path, e)),
        None => emit(out, &csv),
    }
}
