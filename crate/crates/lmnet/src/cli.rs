//! Command-line interface.
//!
//! Exit codes: 0 fail to reject (or success), 3 reject, 1 usage, 2 data or
//! model error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lmnet_core::nettest::{self, CnRule, DenseNull, DenseSpec, SparseSpec, TestReport};
use lmnet_core::variational::{self, SharpRate, VariationalModel};
use lmnet_core::{
    count_motif, hom_count, sample_er, sample_ergm, subcritical_check, ErModel, ErgmModel, Motif, RngStream,
    SamplerConfig,
};
use serde::Serialize;

use crate::config::{seed_from_env, Config};
use crate::error::{Error, Result};
use crate::study::{mc_study, parse_terms};
use crate::{io, report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_REJECT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lmnet", version, about = "Maximum-entropy Lagrange-multiplier tests for random graph samples")]
pub struct Cli {
    /// TOML config file (seed, alpha, threads, burn_in, thin, [study]).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw graphs from G(m, p) or an ERGM and write them as JSONL.
    Sample(SampleArgs),
    /// Count motif copies in each graph of a sample file.
    Count(CountArgs),
    /// Goodness-of-fit test at a fixed vertex count.
    GofFixed(GofFixedArgs),
    /// Sparse Erdős–Rényi goodness-of-fit test.
    GofSparse(SparseArgs),
    /// Dense subcritical-ERGM goodness-of-fit test.
    GofDense(DenseArgs),
    /// Sparse two-sample test.
    TwoSampleSparse(TwoSparseArgs),
    /// Dense two-sample test.
    TwoSampleDense(TwoDenseArgs),
    /// Constant-graphon variational quantities.
    Variational(VariationalArgs),
    /// Fixed points of the mean-field equation and the subcritical check.
    Subcritical(TermsArgs),
    /// Monte Carlo level or power study from the [study] config table.
    McStudy(StudyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Er,
    Ergm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct TermsArgs {
    /// ERGM motifs; the first must be `edge`.
    #[arg(long, value_delimiter = ',', default_value = "edge,triangle")]
    pub motifs: Vec<String>,
    /// ERGM coefficients, one per motif.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long)]
    pub m: usize,
    /// Edge probability (ER only).
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub terms: TermsArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Sample an ERGM even when it is not subcritical.
    #[arg(long)]
    pub allow_supercritical: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub motif: String,
    /// Report homomorphism counts instead of copies.
    #[arg(long)]
    pub hom: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofFixedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub motif: String,
    #[arg(long, allow_hyphen_values = true)]
    pub h0: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SparseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub motif: String,
    #[arg(long)]
    pub c0: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TwoSparseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    #[arg(long)]
    pub motif: String,
    #[arg(long)]
    pub c0: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DenseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub motif: String,
    /// Erdős–Rényi null edge probability; otherwise the ERGM null of --betas.
    #[arg(long)]
    pub p0: Option<f64>,
    #[command(flatten)]
    pub terms: TermsArgs,
    /// Fixed c_n (threshold -1/c_n); default m²/log(m²).
    #[arg(long)]
    pub cn: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TwoDenseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    #[arg(long)]
    pub motif: String,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VariationalArgs {
    #[command(flatten)]
    pub terms: TermsArgs,
    /// Tilted motif H.
    #[arg(long)]
    pub motif: String,
    #[arg(long)]
    pub p0: f64,
    /// Also evaluate u*(λ) and 𝔤(λ) at this λ.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON result file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-replication CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::io(path)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Error::io("<stdout>"))?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n").map_err(Error::io("<stdout>"))?;
            }
            Ok(())
        }
    }
}

fn emit_report(report: &TestReport, output: &OutputArgs) -> Result<i32> {
    let text = match output.format {
        Format::Json => report::to_json(report),
        Format::Csv => report::to_csv(report),
    };
    emit(&text, output.out.as_deref())?;
    Ok(if report.decision.is_reject() { EXIT_REJECT } else { EXIT_OK })
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn read(path: &Path) -> Result<Vec<lmnet_core::Graph>> {
    let graphs = io::read_samples(path)?;
    if graphs.is_empty() {
        return Err(Error::Core(lmnet_core::Error::EmptySample));
    }
    Ok(graphs)
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let alpha = |flag: Option<f64>| flag.or(config.alpha).unwrap_or(0.05);
    match cli.command {
        Command::Sample(a) => {
            let seed = seed_from_env(a.seed, config.seed)?.unwrap_or(0);
            let graphs = match a.model {
                ModelKind::Er => {
                    let p = a.p.ok_or_else(|| Error::Usage("--p is required for --model er".into()))?;
                    let model = ErModel::new(a.m, p)?;
                    let mut rng = RngStream::new(seed, a.stream);
                    (0..a.n).map(|_| sample_er(&model, &mut rng)).collect()
                }
                ModelKind::Ergm => {
                    let model = ErgmModel::new(a.m, parse_terms(&a.terms.motifs, &a.terms.betas)?)?;
                    let cfg = SamplerConfig {
                        seed,
                        burn_in: a.burn_in.or(config.burn_in).unwrap_or(SamplerConfig::default().burn_in),
                        thin: a.thin.or(config.thin).unwrap_or(SamplerConfig::default().thin),
                        stream: a.stream,
                    };
                    sample_ergm(&model, &cfg, a.n, a.allow_supercritical)?
                }
            };
            match &a.out {
                Some(path) => io::write_samples(path, &graphs)?,
                None => io::write_samples_to(std::io::stdout().lock(), &graphs).map_err(Error::io("<stdout>"))?,
            }
            Ok(EXIT_OK)
        }
        Command::Count(a) => {
            let motif = Motif::by_name(&a.motif)?;
            let graphs = io::read_samples(&a.input)?;
            let mut text = String::from("index,count\n");
            for (k, g) in graphs.iter().enumerate() {
                let c = if a.hom { hom_count(g, &motif)? } else { count_motif(g, &motif)? };
                text.push_str(&format!("{k},{c}\n"));
            }
            emit(&text, a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::GofFixed(a) => {
            let motif = Motif::by_name(&a.motif)?;
            let r = nettest::gof_fixed(&read(&a.input)?, &motif, a.h0, alpha(a.alpha))?;
            emit_report(&r, &a.output)
        }
        Command::GofSparse(a) => {
            let spec = SparseSpec::new(a.c0, Motif::by_name(&a.motif)?, alpha(a.alpha))?;
            let r = nettest::gof_sparse(&read(&a.input)?, &spec)?;
            emit_report(&r, &a.output)
        }
        Command::TwoSampleSparse(a) => {
            let spec = SparseSpec::new(a.c0, Motif::by_name(&a.motif)?, alpha(a.alpha))?;
            let r = nettest::two_sample_sparse(&read(&a.input)?, &read(&a.input2)?, &spec)?;
            emit_report(&r, &a.output)
        }
        Command::GofDense(a) => {
            let null = match (a.p0, a.terms.betas.is_empty()) {
                (Some(p0), true) => DenseNull::Er { p0 },
                (None, false) => DenseNull::Ergm { terms: parse_terms(&a.terms.motifs, &a.terms.betas)? },
                _ => return Err(Error::Usage("give exactly one of --p0 or --betas for the null model".into())),
            };
            let cn = a.cn.map(CnRule::Fixed).unwrap_or(CnRule::Default);
            let spec = DenseSpec::new(null, Motif::by_name(&a.motif)?, cn, 0.5, 1.0)?;
            let r = nettest::gof_dense(&read(&a.input)?, &spec)?;
            emit_report(&r, &a.output)
        }
        Command::TwoSampleDense(a) => {
            let null = DenseNull::Er { p0: 1.0 - a.epsilon.clamp(1e-9, 1.0 - 1e-9) };
            let spec = DenseSpec::new(null, Motif::by_name(&a.motif)?, CnRule::Default, a.epsilon, a.c)?;
            let r = nettest::two_sample_dense(&read(&a.input)?, &read(&a.input2)?, &spec)?;
            emit_report(&r, &a.output)
        }
        Command::Variational(a) => {
            let terms = parse_terms(&a.terms.motifs, &a.terms.betas)?;
            let model = VariationalModel::new(terms, Motif::by_name(&a.motif)?, a.p0)?;
            let lc = variational::lambda_circ(&model)?;
            let sharp = if lc < 0.0 { Some(variational::sharp_rate_constant(&model, lc)?) } else { None };
            let at = a.lambda.map(|l| {
                let r = variational::maximize_u(l, &model);
                VariationalAt { lambda: l, u_star: r.u_star, value: r.value, multiplicity_flag: r.multiplicity_flag, g: variational::g_of_lambda(l, &model) }
            });
            let out = VariationalOut { lambda_circ: lc, u_star_at_lambda_circ: variational::maximize_u(lc, &model).u_star, sharp_rate: sharp, at };
            emit(&json(&out), a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Subcritical(a) => {
            let report = subcritical_check(&parse_terms(&a.motifs, &a.betas)?)?;
            emit(&json(&report), None)?;
            Ok(EXIT_OK)
        }
        Command::McStudy(a) => {
            let mut study = config.study.clone().ok_or_else(|| Error::Usage("mc-study needs a [study] table in --config".into()))?;
            if let Some(seed) = seed_from_env(a.seed, config.seed)? {
                study.seed = seed;
            }
            let threads = a.threads.or(config.threads);
            let result = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Usage(format!("thread pool: {e}")))?
                    .install(|| mc_study(&study))?,
                None => mc_study(&study)?,
            };
            if let Some(path) = &a.csv {
                std::fs::write(path, result.to_csv()).map_err(Error::io(path))?;
            }
            emit(&result.to_json(), a.out.as_deref())?;
            eprintln!(
                "rejection rate {}/{} = {:.4} in {:.2?}",
                result.rejections, result.replications, result.rejection_rate, result.runtime
            );
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct VariationalAt {
    lambda: f64,
    u_star: f64,
    value: f64,
    multiplicity_flag: bool,
    g: f64,
}

#[derive(Serialize)]
struct VariationalOut {
    lambda_circ: f64,
    u_star_at_lambda_circ: f64,
    sharp_rate: Option<SharpRate>,
    at: Option<VariationalAt>,
}

/// Parses `args`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Core(lmnet_core::Error::NotSubcritical(report)) = &e {
                eprintln!("{}", json(report.as_ref()));
            }
            e.exit_code()
        }
    }
}
