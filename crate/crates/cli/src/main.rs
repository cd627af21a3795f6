//! `wkw`: command-line front end for the viscous cell problem, Evans'
//! states, their Wigner tables and the limit checks.

mod commands;
mod config;
mod fail;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use fail::Failure;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "wkw", version, about = "Weak KAM cell problems, Evans states and torus Wigner tables")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; they override `--config`.
#[derive(Debug, Args, Clone, Default)]
struct Common {
    /// JSON run configuration (unknown keys are rejected).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Momentum parameter P [default: 1.6].
    #[arg(long = "P", global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Semiclassical parameter h [default: 0.05].
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Decreasing list of h for sweeps [default: 0.16,0.08,0.04,0.02].
    #[arg(long, global = true, value_delimiter = ',')]
    h_list: Option<Vec<f64>>,
    /// Grid size M (power of two) [default: smallest power of two ≥ max(512, 8/h)].
    #[arg(long, global = true, value_name = "M")]
    grid: Option<usize>,
    /// Expansion order N [default: 2].
    #[arg(long, global = true, value_name = "N")]
    order: Option<usize>,
    /// Built-in potential: pendulum, two-harmonic or zero [default: pendulum].
    #[arg(long, global = true)]
    potential: Option<String>,
    /// Amplitude κ of the potential [default: 1].
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for independent work items [default: all cores].
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    /// What to print on stdout when no output directory is given.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write SVG diagnostics (needs --out).
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical value, effective Hamiltonian and the momentum profile.
    Classical,
    /// Asymptotic series coefficients; CSV of v_j on the grid.
    Expand,
    /// Solve the cell pair at one h.
    Cell,
    /// Wigner table of the Evans state at one h.
    Wigner,
    /// I_f(h) against the Mather limit over --h-list.
    Sweep,
    /// Stationary phase against direct lattice integrals at one h.
    Phase {
        /// Only the lattice point nearest to this phase-space momentum.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Built-in oracle checks; exit code 4 on failure.
    Selftest {
        /// Only the exactly solvable V ≡ 0 checks.
        #[arg(long)]
        quick: bool,
    },
}

fn potential_from_flags(name: &str, kappa: Option<f64>) -> Result<config::PotentialSpec, Failure> {
    let kappa = kappa.unwrap_or(1.0);
    match name {
        "pendulum" => Ok(config::PotentialSpec::Pendulum { kappa }),
        "two-harmonic" => Ok(config::PotentialSpec::TwoHarmonic { kappa, beta: None }),
        "zero" => Ok(config::PotentialSpec::Zero),
        other => Err(Failure::validation(format!("unknown potential {other:?}"))),
    }
}

fn resolve(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &c.potential {
        cfg.potential = potential_from_flags(name, c.kappa)?;
    } else if let Some(k) = c.kappa {
        cfg.potential = match cfg.potential {
            config::PotentialSpec::Pendulum { .. } => config::PotentialSpec::Pendulum { kappa: k },
            config::PotentialSpec::TwoHarmonic { beta, .. } => config::PotentialSpec::TwoHarmonic { kappa: k, beta },
            config::PotentialSpec::Zero => return Err(Failure::validation("--kappa does not apply to the zero potential")),
        };
    }
    cfg.p = c.p.or(cfg.p);
    cfg.h = c.h.or(cfg.h);
    cfg.h_list = c.h_list.clone().or(cfg.h_list);
    cfg.grid = c.grid.or(cfg.grid);
    cfg.order = c.order.or(cfg.order);
    cfg.out = c.out.clone().or(cfg.out);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = resolve(&cli.common)?;
    if let Some(k) = cli.common.jobs {
        if k == 0 {
            return Err(Failure::validation("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::validation(format!("thread pool: {e}")))?;
    }
    let sink = output::Sink {
        dir: cfg.out.clone(),
        format: cli.common.format,
        plot: cli.common.plot,
        provenance: serde_json::json!({
            "config_hash": cfg.hash(),
            "code_version": env!("CARGO_PKG_VERSION"),
        }),
    };
    log::debug!("effective config: {cfg:?}");
    match cli.command {
        Command::Classical => commands::classical(&cfg, &sink),
        Command::Expand => commands::expand(&cfg, &sink),
        Command::Cell => commands::cell(&cfg, &sink),
        Command::Wigner => commands::wigner(&cfg, &sink),
        Command::Sweep => commands::sweep(&cfg, &sink),
        Command::Phase { s } => commands::phase(&cfg, &sink, s),
        Command::Selftest { quick } => commands::selftest(&sink, quick),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WKW_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let f = Failure::validation(e.to_string().trim().to_string());
                eprintln!("{}", f.to_json());
                return ExitCode::from(fail::EXIT_VALIDATION as u8);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code as u8)
        }
    }
}
