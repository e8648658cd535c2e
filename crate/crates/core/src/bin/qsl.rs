use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsl_core::channels::{ADParams, ChannelParams, DephasingParams, SGADParams};
use qsl_core::qsl::{DerivativeMode, DEFAULT_FD_STEP, DEFAULT_QUAD_STEPS};
use qsl_core::states::InitialStateParams;
use qsl_core::sweep::{
    inset_preset, linspace, parse_values, preset, run_inset_sweep, run_sweep, write_rows, OutputFormat, SweepConfig,
    FIGURE_MUS,
};
use qsl_core::validate::validate;
use qsl_core::{QslError, Result};

/// Quantum speed limit sweeps for two qubits under correlated channels.
#[derive(Parser)]
#[command(name = "qsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// τ_QSL over a (μ, τ, τ_D) grid; defaults to τ = 1 and τ_D = 0.01:5:100.
    Sweep(SweepArgs),
    /// τ_QSL against the initial time τ at τ_D = 1; defaults to τ = 0:5:100.
    Inset(SweepArgs),
    /// Run the invariant and oracle suite; exit 2 on any failure.
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Dephasing,
    Ad,
    Sgad,
}

#[derive(Clone, Copy, ValueEnum)]
enum Deriv {
    Analytic,
    Fd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// Figure panel: fig1a, fig1b, fig2a, fig2b, fig3a or fig3b.
    #[arg(long, conflicts_with_all = ["channel", "nu", "lambda", "gamma0", "n", "m", "omega"])]
    preset: Option<String>,
    #[arg(long, value_enum)]
    channel: Option<Family>,
    /// Dephasing memory time ν.
    #[arg(long)]
    nu: Option<f64>,
    /// AD spectral width λ.
    #[arg(long)]
    lambda: Option<f64>,
    /// AD coupling γ₀.
    #[arg(long, default_value_t = 1.0)]
    gamma0: f64,
    /// SGAD thermal photon number.
    #[arg(long)]
    n: Option<f64>,
    /// SGAD squeezing.
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    /// SGAD rate Ω.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Correlation strengths, as `a,b,c` or `start:stop:count`.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long = "tau-d")]
    tau_d: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    alpha: f64,
    #[arg(long = "quad-steps", default_value_t = DEFAULT_QUAD_STEPS)]
    quad_steps: usize,
    #[arg(long, value_enum, default_value = "analytic")]
    deriv: Deriv,
    #[arg(long = "fd-step", default_value_t = DEFAULT_FD_STEP)]
    fd_step: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn missing(flag: &str, family: &str) -> QslError {
    QslError::Config(format!("--{flag} is required for --channel {family}"))
}

fn channel_params(a: &SweepArgs) -> Result<ChannelParams> {
    match a.channel {
        None => Err(QslError::Config("either --preset or --channel is required".into())),
        Some(Family::Dephasing) => Ok(ChannelParams::Dephasing(DephasingParams::new(
            a.nu.ok_or_else(|| missing("nu", "dephasing"))?,
        )?)),
        Some(Family::Ad) => Ok(ChannelParams::AmplitudeDamping(ADParams::new(
            a.lambda.ok_or_else(|| missing("lambda", "ad"))?,
            a.gamma0,
        )?)),
        Some(Family::Sgad) => Ok(ChannelParams::Sgad(SGADParams::new(
            a.n.ok_or_else(|| missing("n", "sgad"))?,
            a.m,
            a.omega,
        )?)),
    }
}

fn build_config(a: &SweepArgs, inset: bool) -> Result<SweepConfig> {
    let mut config = match &a.preset {
        Some(name) if inset => inset_preset(name)?,
        Some(name) => preset(name)?,
        None if inset => SweepConfig::new(channel_params(a)?, FIGURE_MUS.to_vec(), linspace(0.0, 5.0, 100), vec![1.0]),
        None => SweepConfig::new(channel_params(a)?, FIGURE_MUS.to_vec(), vec![1.0], linspace(0.01, 5.0, 100)),
    };
    if let Some(s) = &a.mu {
        config.mu = parse_values(s)?;
    }
    if let Some(s) = &a.tau {
        config.tau = parse_values(s)?;
    }
    if let Some(s) = &a.tau_d {
        if inset {
            return Err(QslError::Config("inset fixes tau_d = 1; use sweep to vary it".into()));
        }
        config.tau_d = parse_values(s)?;
    }
    config.initial = InitialStateParams::new(a.r, a.alpha)?;
    config.quad_steps = a.quad_steps;
    config.deriv = match a.deriv {
        Deriv::Analytic => DerivativeMode::Analytic,
        Deriv::Fd => DerivativeMode::Fd { h: a.fd_step },
    };
    config.validate()?;
    Ok(config)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| QslError::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_grid(a: &SweepArgs, inset: bool) -> Result<()> {
    let config = build_config(a, inset)?;
    log::info!("evaluating {} grid points", config.grid().len());
    let rows = if inset { run_inset_sweep(&config)? } else { run_sweep(&config)? };
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} grid points failed; see the error column");
    }
    let format = match a.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let mut out = open_output(&a.out)?;
    write_rows(&rows, &config, format, &mut out)?;
    out.flush().map_err(|e| QslError::Config(format!("write failed: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(a) => run_grid(a, false).map(|_| true),
        Command::Inset(a) => run_grid(a, true).map(|_| true),
        Command::Validate { out } => (|| {
            let report = validate();
            for c in report.failures() {
                log::error!("{} failed: worst {:e} vs tolerance {:e}", c.name, c.worst, c.tolerance);
            }
            let mut w = open_output(out)?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| QslError::Config(e.to_string()))?;
            writeln!(w).and_then(|_| w.flush()).map_err(|e| QslError::Config(e.to_string()))?;
            Ok(report.passed)
        })(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
