//! `netband` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 diagnostic
//! failure (a transform check that did not pass).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netband_core::environment::{generate_graph, generate_model, NoiseSpec};
use netband_core::harness::{ExperimentConfig, PolicySpec, SweepAxis, SweepValue};
use netband_core::policies::{CvSettings, HyperparameterMode};
use netband_core::seed::{derive_rep_seed, derive_stream_seed, Stream};

use crate::model_file::ModelFile;
use crate::transform_check::{check_file, check_model, check_size};
use crate::{plot, records, runner};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0:#}")]
    Runtime(anyhow::Error),
    #[error("{0}")]
    Diagnostic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Diagnostic(_) => 3,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "netband", version, about = "Bandits under sparse network interference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run repetitions of one or more policies and write per-round regret.
    Simulate(SimulateArgs),
    /// Run one aggregate per value of a swept parameter.
    Sweep(SweepArgs),
    /// Draw an SVG chart from a simulate or sweep CSV.
    Plot(PlotArgs),
    /// Verify that each unit reward's spectrum lives on its neighborhood.
    TransformCheck(TransformArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Theoretical,
    Cv,
    Fixed,
}

/// Flags shared by `simulate` and `sweep`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Exploration-length rule for ETC policies.
    #[arg(long, value_enum, default_value_t = ModeArg::Cv)]
    pub mode: ModeArg,
    /// Repetitions per configuration.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Base seed; each repetition derives its own.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Horizon T [default: 10 * 2^N].
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Failure level for theoretical mode and for elimination.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Exploration rounds in fixed mode [required with --mode fixed].
    #[arg(long)]
    pub explore: Option<usize>,
    /// Lasso penalty in fixed mode.
    #[arg(long, default_value_t = 0.05)]
    pub lambda: f64,
    /// Share of units whose neighborhood etc-partial knows.
    #[arg(long, default_value_t = 0.5)]
    pub known_fraction: f64,
    /// Highest interaction order etc-unknown and etc-partial fit [default: N].
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Record every k-th round [default: max(1, T / 1000)].
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Gaussian noise standard deviation; 0 means noiseless.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    /// Reuse repetition 0's graph and model for every repetition.
    #[arg(long)]
    pub fixed_environment: bool,
    /// Give every repetition the same seed.
    #[arg(long)]
    pub shared_seed: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Comma-separated policies: etc-known, etc-unknown, etc-partial,
    /// global-etc, elimination, ucb.
    #[arg(long)]
    pub policy: String,
    /// Number of units N.
    #[arg(long)]
    pub n: usize,
    /// Actions per unit A.
    #[arg(long)]
    pub arms: u32,
    /// Neighborhood size bound s.
    #[arg(long)]
    pub sparsity: usize,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output CSV.
    #[arg(long, default_value = "regret.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Swept parameter: n, t, s or policy.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated values of the swept parameter.
    #[arg(long)]
    pub values: String,
    /// Policy for non-policy axes.
    #[arg(long, default_value = "etc-known")]
    pub policy: String,
    #[arg(long, default_value_t = 9)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub arms: u32,
    #[arg(long, default_value_t = 4)]
    pub sparsity: usize,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output CSV.
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV written by simulate or sweep.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output SVG.
    #[arg(long, default_value = "regret.svg")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Number of units N (N log2 A <= 7).
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub arms: u32,
    #[arg(long, default_value_t = 2)]
    pub sparsity: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Check this model file instead of generating one.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Save the generated model as JSON.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
}

fn parse_policy(tag: &str, run: &RunArgs) -> Result<PolicySpec, CliError> {
    let spec = match PolicySpec::from_tag(tag.trim()).map_err(usage)? {
        PolicySpec::EtcUnknown { .. } => PolicySpec::EtcUnknown { max_degree: run.max_degree },
        PolicySpec::EtcPartial { .. } => {
            if !(0.0..=1.0).contains(&run.known_fraction) {
                return Err(usage("--known-fraction must lie in [0, 1]"));
            }
            PolicySpec::EtcPartial { known_fraction: run.known_fraction, max_degree: run.max_degree }
        }
        PolicySpec::Elimination { .. } => PolicySpec::Elimination { delta: run.delta },
        other => other,
    };
    Ok(spec)
}

fn base_config(
    units: usize,
    arms: u32,
    sparsity: usize,
    policy: PolicySpec,
    run: &RunArgs,
) -> Result<ExperimentConfig, CliError> {
    if !(run.delta > 0.0 && run.delta < 1.0) {
        return Err(usage("--delta must lie in (0, 1)"));
    }
    let mut config = ExperimentConfig::new(units, arms, sparsity, policy);
    config.mode = match run.mode {
        ModeArg::Theoretical => HyperparameterMode::Theoretical { delta: run.delta },
        ModeArg::Cv => HyperparameterMode::CrossValidated(CvSettings::default()),
        ModeArg::Fixed => {
            let explore = run.explore.ok_or_else(|| usage("--mode fixed needs --explore"))?;
            if !(run.lambda >= 0.0) {
                return Err(usage("--lambda must be nonnegative"));
            }
            HyperparameterMode::Fixed { explore, lambda: run.lambda }
        }
    };
    config.reps = run.reps;
    config.base_seed = run.seed;
    config.horizon = run.horizon;
    config.record_every = run.record_every;
    config.noise =
        if run.noise == 0.0 { NoiseSpec::noiseless() } else { NoiseSpec::gaussian(run.noise).map_err(usage)? };
    config.fixed_environment = run.fixed_environment;
    config.shared_seed = run.shared_seed;
    Ok(config)
}

/// Writes through a sibling temporary file so a failed write
/// never leaves a truncated output behind.
fn write_file(path: &Path, write: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let tmp = path.with_extension("partial");
    let result = (|| -> anyhow::Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        write(&mut file)?;
        file.flush()?;
        drop(file);
        std::fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.with_context(|| format!("cannot write {}", path.display()))
}

fn simulate(args: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let policies = args.policy.split(',').map(|tag| parse_policy(tag, &args.run)).collect::<Result<Vec<_>, _>>()?;
    let configs = policies
        .into_iter()
        .map(|p| {
            let c = base_config(args.n, args.arms, args.sparsity, p, &args.run)?;
            c.validate().map_err(usage)?;
            Ok(c)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let pool = runner::thread_pool()?;
    let mut traces = Vec::new();
    for config in &configs {
        let (batch, agg) = pool.install(|| runner::run_repeated(config))?;
        writeln!(
            out,
            "{}: final cumulative regret {} ± {} over {} reps (T = {})",
            config.policy.tag(),
            records::format_sig(agg.final_mean()),
            records::format_sig(agg.final_std()),
            config.reps,
            config.horizon()
        )
        .map_err(anyhow::Error::from)?;
        traces.extend(batch);
    }
    write_file(&args.out, |w| records::write_traces(w, &traces))?;
    Ok(())
}

fn sweep(args: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let axis = SweepAxis::parse(&args.axis).map_err(usage)?;
    let values = SweepValue::parse_list(axis, &args.values).map_err(usage)?;
    // Policy values get the same parameters as --policy would.
    let values = values
        .into_iter()
        .map(|v| match v {
            SweepValue::Policy(p) => parse_policy(p.tag(), &args.run).map(SweepValue::Policy),
            other => Ok(other),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let policy = parse_policy(&args.policy, &args.run)?;
    let base = base_config(args.n, args.arms, args.sparsity, policy, &args.run)?;

    let pool = runner::thread_pool()?;
    let result = pool.install(|| runner::sweep(&base, axis, &values));
    for point in &result.points {
        let line = match &point.outcome {
            Ok((mean, std)) => format!(
                "{}={} {}: final cumulative regret {} ± {}",
                axis.name(),
                point.value.label(),
                point.policy,
                records::format_sig(*mean),
                records::format_sig(*std)
            ),
            Err(e) => format!("{}={} {}: FAILED: {e}", axis.name(), point.value.label(), point.policy),
        };
        writeln!(out, "{line}").map_err(anyhow::Error::from)?;
    }
    write_file(&args.out, |w| records::write_sweep(w, &result))?;
    match result.failures() {
        0 => Ok(()),
        n => Err(CliError::Runtime(anyhow!("{n} of {} sweep points failed", result.points.len()))),
    }
}

fn plot(args: PlotArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    let records =
        records::read_records(std::io::BufReader::new(file)).with_context(|| format!("{}", args.input.display()))?;
    let chart = plot::chart_from_records(&records).with_context(|| format!("{}", args.input.display()))?;
    let svg = plot::render_svg(&chart)?;
    write_file(&args.out, |w| Ok(w.write_all(svg.as_bytes())?))?;
    Ok(())
}

fn transform_check(args: TransformArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let reports = match &args.model {
        Some(path) => {
            let file = ModelFile::load(path)?;
            check_size(file.units, file.arms).map_err(usage)?;
            check_file(&file)?
        }
        None => {
            check_size(args.n, args.arms).map_err(usage)?;
            if args.sparsity == 0 {
                return Err(usage("--sparsity must be >= 1"));
            }
            let seed = derive_rep_seed(args.seed, 0);
            let graph = generate_graph(args.n, args.sparsity, derive_stream_seed(seed, Stream::Graph))
                .map_err(anyhow::Error::from)?;
            let model = generate_model(graph, args.arms, derive_stream_seed(seed, Stream::Model))
                .map_err(anyhow::Error::from)?;
            if let Some(path) = &args.save_model {
                ModelFile::from_model(&model).save(path)?;
            }
            check_model(&model)?
        }
    };
    let mut failed = 0;
    for r in &reports {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        failed += usize::from(!r.passed());
        writeln!(
            out,
            "unit {}: {verdict} (max off-support {:.3e}, max reconstruction error {:.3e})",
            r.unit, r.max_off_support, r.max_reconstruction_error
        )
        .map_err(anyhow::Error::from)?;
    }
    if failed > 0 {
        return Err(CliError::Diagnostic(format!("{failed} of {} units failed the transform check", reports.len())));
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Plot(a) => plot(a),
        Command::TransformCheck(a) => transform_check(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = writeln!(err, "run `netband help` for usage");
            }
            e.exit_code()
        }
    }
}
