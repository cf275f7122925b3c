//! `purify-sim`: CSV data generator for the purification protocol curves.
//!
//! Four subcommands cover the quantities of interest: the ideal fidelity
//! map, cascaded rounds under channel loss, the detector bandwidth to
//! efficiency mapping, and worst-case output fidelity under temporal
//! mode-mismatch. Output is plot-ready CSV on stdout or `--out`; runs are
//! deterministic given flags and seed. Exit codes: 0 success, 2
//! configuration error, 3 numeric degeneracy.

mod config;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use purify_core::{
    bandwidth_to_efficiency, cascade, fig4_curve, purify_fidelity, AcceptancePolicy,
    CascadeConfig, Error as CoreError, LossPlacement, PairEnsemble, SearchConfig, SearchMode,
    SectorDistribution, WavePacketConvention,
};

use config::{pick, pick_opt, FileConfig};
use format::fmt_sig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Degenerate(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Degenerate(m) | CliError::Io(m) => m,
        }
    }
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

#[derive(Parser)]
#[command(name = "purify-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Output fidelity against input fidelity for the ideal protocol.
    IdealCurve(IdealCurveArgs),
    /// Cascaded purification rounds under channel loss.
    Cascade(CascadeArgs),
    /// Worst-case output fidelity under temporal mode-mismatch.
    ModeMismatch(ModeMismatchArgs),
    /// Detector spectral bandwidth mapped to effective loss.
    Bandwidth(BandwidthArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file providing defaults for any flag (same names, underscores).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct IdealCurveArgs {
    #[arg(long)]
    f_min: Option<f64>,
    #[arg(long)]
    f_max: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CascadeArgs {
    #[arg(long)]
    rounds: Option<u32>,
    #[arg(long)]
    eta: Option<f64>,
    /// Apply the lossy channel "before" or "after" each merge.
    #[arg(long)]
    loss_placement: Option<String>,
    /// Fidelity of the initial all-two-photon pairs.
    #[arg(long)]
    f0: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ModeMismatchArgs {
    #[arg(long)]
    f_min: Option<f64>,
    #[arg(long)]
    f_max: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    /// Comma-separated mismatch bounds, e.g. 0.2,0.4,0.6,0.8.
    #[arg(long, value_delimiter = ',')]
    tau_bounds: Option<Vec<f64>>,
    /// Monte-Carlo sample count per grid cell.
    #[arg(long, conflicts_with = "grid")]
    samples: Option<u64>,
    /// Use a k x k lattice instead of Monte-Carlo sampling.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Heralding policy: "strict" or "feedforward".
    #[arg(long)]
    policy: Option<String>,
    /// Wave-packet amplitude width; defaults to the calibrated convention.
    #[arg(long)]
    sigma: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BandwidthArgs {
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::IdealCurve(args) => run_ideal_curve(args),
        Command::Cascade(args) => run_cascade(args),
        Command::ModeMismatch(args) => run_mode_mismatch(args),
        Command::Bandwidth(args) => run_bandwidth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn write_output(out: Option<&PathBuf>, csv: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn fidelity_grid(f_min: f64, f_max: f64, steps: u64) -> Result<Vec<f64>, CliError> {
    if !(f_min.is_finite() && f_max.is_finite() && 0.0 <= f_min && f_min < f_max && f_max <= 1.0) {
        return Err(config_error(format!(
            "fidelity range must satisfy 0 <= f_min < f_max <= 1, got [{f_min}, {f_max}]"
        )));
    }
    if steps < 2 {
        return Err(config_error(format!("steps must be at least 2, got {steps}")));
    }
    Ok(linspace(f_min, f_max, steps))
}

fn linspace(lo: f64, hi: f64, steps: u64) -> Vec<f64> {
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn run_ideal_curve(args: IdealCurveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let f_min = pick(args.f_min, file.f_min, 0.5);
    let f_max = pick(args.f_max, file.f_max, 1.0);
    let steps = pick(args.steps, file.steps, 51);
    let out = pick_opt(args.common.out, file.out);

    let mut csv = String::from("f,f_prime\n");
    for f in fidelity_grid(f_min, f_max, steps)? {
        let f_prime = purify_fidelity(f).map_err(|e| config_error(e.to_string()))?;
        csv.push_str(&format!("{},{}\n", fmt_sig(f), fmt_sig(f_prime)));
    }
    write_output(out.as_ref(), &csv)
}

fn parse_loss_placement(value: &str) -> Result<LossPlacement, CliError> {
    match value {
        "before" => Ok(LossPlacement::BeforeRound),
        "after" => Ok(LossPlacement::AfterRound),
        other => Err(config_error(format!(
            "loss_placement must be \"before\" or \"after\", got \"{other}\""
        ))),
    }
}

fn parse_policy(value: &str) -> Result<AcceptancePolicy, CliError> {
    match value {
        "strict" => Ok(AcceptancePolicy::Strict),
        "feedforward" => Ok(AcceptancePolicy::FeedForward),
        other => Err(config_error(format!(
            "policy must be \"strict\" or \"feedforward\", got \"{other}\""
        ))),
    }
}

fn run_cascade(args: CascadeArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let rounds = pick(args.rounds, file.rounds, 3);
    let eta = pick(args.eta, file.eta, 0.01);
    let placement = pick(args.loss_placement, file.loss_placement, "before".to_string());
    let f0 = pick(args.f0, file.f0, 1.0);
    let out = pick_opt(args.common.out, file.out);

    let config = CascadeConfig {
        rounds,
        eta,
        loss_placement: parse_loss_placement(&placement)?,
        initial: PairEnsemble { sectors: SectorDistribution::all_two_photon(), fidelity: f0 },
    };
    let trace = cascade(&config).map_err(|e| config_error(e.to_string()))?;

    let mut csv = String::from("round,p0,p1,p2,f,p2_norm,effective_fidelity\n");
    for (i, record) in trace.rounds.iter().enumerate() {
        let p2_norm = record.p2_norm.ok_or_else(|| {
            CliError::Degenerate(CoreError::MassVanished.to_string())
        })?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            fmt_sig(record.sectors.p0),
            fmt_sig(record.sectors.p1),
            fmt_sig(record.sectors.p2),
            fmt_sig(record.fidelity),
            fmt_sig(p2_norm),
            fmt_sig(record.fidelity * p2_norm),
        ));
    }
    write_output(out.as_ref(), &csv)
}

fn run_mode_mismatch(args: ModeMismatchArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let f_min = pick(args.f_min, file.f_min, 0.5);
    let f_max = pick(args.f_max, file.f_max, 1.0);
    let steps = pick(args.steps, file.steps, 51);
    let tau_bounds = pick(args.tau_bounds, file.tau_bounds, vec![0.2, 0.4, 0.6, 0.8]);
    let samples = pick_opt(args.samples, file.samples);
    let grid = pick_opt(args.grid, file.grid);
    let seed = pick(args.seed, file.seed, 0);
    let policy = parse_policy(&pick(args.policy, file.policy, "strict".to_string()))?;
    let out = pick_opt(args.common.out, file.out);

    let conv = match pick_opt(args.sigma, file.sigma) {
        Some(sigma) => WavePacketConvention::new(sigma).map_err(|e| config_error(e.to_string()))?,
        None => WavePacketConvention::default(),
    };
    let (mode, samples) = match (grid, samples) {
        (Some(_), Some(_)) => {
            return Err(config_error("samples and grid are mutually exclusive"));
        }
        (Some(k), None) => (SearchMode::Grid(k), 0),
        (None, s) => (SearchMode::MonteCarlo, s.unwrap_or(1000)),
    };
    for &bound in &tau_bounds {
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(config_error(format!("tau bounds must be non-negative, got {bound}")));
        }
    }

    let f_grid = fidelity_grid(f_min, f_max, steps)?;
    let search = SearchConfig { tau_bound: 0.0, samples, seed, mode };
    let rows = fig4_curve(&f_grid, &tau_bounds, &search, policy, &conv)
        .map_err(|e| config_error(e.to_string()))?;

    let mut csv = String::from("tau_bound,f,min_f_prime,argmin_tau1,argmin_tau2\n");
    for row in rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig(row.tau_bound),
            fmt_sig(row.f),
            fmt_sig(row.min_f_prime),
            fmt_sig(row.argmin.0),
            fmt_sig(row.argmin.1),
        ));
    }
    write_output(out.as_ref(), &csv)
}

fn run_bandwidth(args: BandwidthArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let omega_min = pick(args.omega_min, file.omega_min, 0.1);
    let omega_max = pick(args.omega_max, file.omega_max, 5.0);
    let steps = pick(args.steps, file.steps, 51);
    let out = pick_opt(args.common.out, file.out);

    if !(omega_min.is_finite() && omega_max.is_finite() && 0.0 < omega_min && omega_min < omega_max)
    {
        return Err(config_error(format!(
            "bandwidth range must satisfy 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )));
    }
    if steps < 2 {
        return Err(config_error(format!("steps must be at least 2, got {steps}")));
    }

    let mut csv = String::from("omega,eta\n");
    for omega in linspace(omega_min, omega_max, steps) {
        let eta = bandwidth_to_efficiency(omega).map_err(|e| config_error(e.to_string()))?;
        csv.push_str(&format!("{},{}\n", fmt_sig(omega), fmt_sig(eta)));
    }
    write_output(out.as_ref(), &csv)
}
