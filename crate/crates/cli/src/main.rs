//! `bilocal`: command-line front end for the swapping-network library.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bilocal", version, about = "Bilocality and CHSH tests of a two-source swapping network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bilocality,
    Chsh,
}

/// Model parameters shared by the evaluation commands.
#[derive(Args, Clone, Debug)]
pub struct ModelArgs {
    /// Swapped visibility V = v_A v_C; each source gets weight √V.
    #[arg(long = "v", default_value_t = 1.0)]
    pub v: f64,
    /// BSM indistinguishability p.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Coloured-noise fraction λ of both sources.
    #[arg(long, default_value_t = 0.0)]
    pub lam: f64,
}

#[derive(Args, Clone, Debug)]
pub struct EvalArgs {
    /// Probability table JSON; when given, model flags are ignored.
    #[arg(long, conflicts_with_all = ["v", "p", "lam"])]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Bootstrap resamples for tables that carry sigmas.
    #[arg(long, default_value_t = 2000)]
    pub n_boot: usize,
    /// Bootstrap seed (BILOCAL_SEED overrides).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the bilocality parameter 𝓑₁₃ from a table or the model.
    B13(EvalArgs),
    /// Evaluate the conditional CHSH value S from a table or the model.
    Chsh(EvalArgs),
    /// Closed-form 𝓑₁₃ and S bands versus p, as CSV.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Swapped visibility V.
        #[arg(long = "v", default_value_t = 0.93)]
        v: f64,
        #[arg(long, default_value_t = 0.0)]
        lam_low: f64,
        #[arg(long, default_value_t = 1.0)]
        lam_high: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo emulation of the experiment; writes a counts JSON file.
    Simulate {
        #[arg(long = "v", default_value_t = 0.93)]
        v: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        lam: f64,
        /// Trials per setting pair.
        #[arg(long, default_value_t = 8000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Bilocality)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyse a counts file with bootstrap error bars.
    Analyze {
        #[arg(long)]
        counts: PathBuf,
        #[arg(long, default_value_t = 2000)]
        n_boot: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Space-like separation audit; uses the bundled geometry by default.
    Spacetime {
        #[arg(long)]
        geometry: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// HOM visibility bounds from μ, or a dip fit from CSV data.
    Hom {
        #[arg(long, required_unless_present = "data", conflicts_with = "data")]
        mu: Option<f64>,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// How a successful run ended.
pub enum Verdict {
    Ok,
    NotViolated,
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    use commands::*;
    match cli.command {
        Command::B13(args) => cmd_b13(&args),
        Command::Chsh(args) => cmd_chsh(&args),
        Command::Sweep { p_min, p_max, steps, v, lam_low, lam_high, out } => {
            cmd_sweep(p_min, p_max, steps, v, lam_low, lam_high, out.as_deref())
        }
        Command::Simulate { v, p, lam, n, seed, mode, out } => {
            cmd_simulate(&ModelArgs { v, p, lam }, n, seed, mode, out.as_deref())
        }
        Command::Analyze { counts, n_boot, seed, format } => cmd_analyze(&counts, n_boot, seed, format),
        Command::Spacetime { geometry, format } => cmd_spacetime(geometry.as_deref(), format),
        Command::Hom { mu, data, format } => cmd_hom(mu, data.as_deref(), format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::NotViolated) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
