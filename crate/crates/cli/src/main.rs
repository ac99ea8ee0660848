use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use topochain_cli::config::{parse_config, Command, Experiment, ExperimentConfig};
use topochain_cli::presets::{default_config, figure, figure_ids, FIGURES};
use topochain_cli::run::{run_to_dir, RunManifest, RunOptions};

const DEFAULT_OUT: &str = "topochain-out";

/// Simulations of edge-state storage and transfer in qubit chains.
#[derive(Parser)]
#[command(name = "topochain", version, about)]
struct Cli {
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for disorder draws; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, value_name = "N", env = "TOPOCHAIN_THREADS")]
    threads: Option<usize>,
    /// Write complex amplitudes next to the populations.
    #[arg(long, global = true)]
    amplitudes: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Static, swept or instantaneous chain spectra.
    Spectrum,
    /// Adiabatic pumping along a schedule.
    Pump,
    /// Single-site quench on a static, optionally disordered chain.
    Quench,
    /// Two-level paths or full-versus-reduced comparisons.
    Lz,
    /// Bell-state transfer on the trimer chain.
    Trimer,
    /// Effective couplings under frequency modulation.
    Couplings,
    /// Flux-qubit levels and coupling elements versus f_eps.
    Fluxqubit(FluxArgs),
    /// Run whatever command the config names.
    Run,
    /// Run the bundled configs for one figure.
    Reproduce {
        /// One of the ids listed by `presets`.
        figure_id: String,
    },
    /// List figure ids, or print the configs for one of them.
    Presets {
        figure_id: Option<String>,
    },
}

#[derive(Args)]
struct FluxArgs {
    #[arg(long, allow_hyphen_values = true)]
    f_alpha: Option<f64>,
    /// Lower and upper f_eps, e.g. `-1,1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LO,HI")]
    f_eps_range: Option<Vec<f64>>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    sweep_points: Option<usize>,
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn config_for(cli: &Cli, command: Command) -> Result<ExperimentConfig> {
    let Some(path) = &cli.config else { return Ok(default_config(command)) };
    let cfg = load_config(path)?;
    if cfg.command() != command {
        bail!("{} holds a {} config, not {}", path.display(), cfg.command().name(), command.name());
    }
    Ok(cfg)
}

fn apply_flux_args(mut cfg: ExperimentConfig, args: &FluxArgs) -> Result<ExperimentConfig> {
    let Experiment::FluxQubit(fq) = &mut cfg.experiment else { unreachable!("fluxqubit config") };
    if let Some(x) = args.f_alpha {
        fq.f_alpha = x;
    }
    if let Some(r) = &args.f_eps_range {
        let &[lo, hi] = r.as_slice() else { bail!("--f-eps-range takes two values, got {}", r.len()) };
        fq.f_eps_range = [lo, hi];
    }
    if let Some(n) = args.levels {
        fq.levels = n;
    }
    if let Some(n) = args.sweep_points {
        fq.sweep_points = n;
    }
    // Re-validate the overridden config.
    Ok(parse_config(&cfg.to_json())?)
}

// A closed stdout (e.g. piped into `head`) must not fail a finished run.
fn report(dir: &Path, m: &RunManifest) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{} -> {} ({:.2} s)", m.command, dir.display(), m.wall_time_s);
    for o in &m.outputs {
        let _ = writeln!(out, "  {}  {} bytes  sha256 {}", o.file, o.bytes, o.sha256);
    }
}

fn run_one(cfg: &ExperimentConfig, dir: &Path, opts: RunOptions) -> Result<()> {
    let m = run_to_dir(cfg, dir, opts).with_context(|| format!("{} run failed", cfg.command().name()))?;
    report(dir, &m);
    Ok(())
}

fn main_inner(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let opts = RunOptions { seed: cli.seed, amplitudes: cli.amplitudes };
    let command = match &cli.command {
        Cmd::Spectrum => Some(Command::Spectrum),
        Cmd::Pump => Some(Command::Pump),
        Cmd::Quench => Some(Command::Quench),
        Cmd::Lz => Some(Command::Lz),
        Cmd::Trimer => Some(Command::Trimer),
        Cmd::Couplings => Some(Command::Couplings),
        Cmd::Fluxqubit(_) => Some(Command::FluxQubit),
        _ => None,
    };
    let out_for = |cfg: &ExperimentConfig| {
        cli.out
            .clone()
            .or_else(|| cfg.output.clone().map(PathBuf::from))
            .unwrap_or_else(|| Path::new(DEFAULT_OUT).join(cfg.command().name()))
    };
    match (&cli.command, command) {
        (cmd, Some(command)) => {
            let mut cfg = config_for(&cli, command)?;
            if let Cmd::Fluxqubit(args) = cmd {
                cfg = apply_flux_args(cfg, args)?;
            }
            run_one(&cfg, &out_for(&cfg), opts)
        }
        (Cmd::Run, None) => {
            let Some(path) = &cli.config else { bail!("run needs --config PATH") };
            let cfg = load_config(path)?;
            run_one(&cfg, &out_for(&cfg), opts)
        }
        (Cmd::Reproduce { figure_id }, None) => {
            let Some(configs) = figure(figure_id) else {
                bail!("unknown figure id \"{figure_id}\"; available: {}", figure_ids().join(", "))
            };
            let root = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)).join(figure_id);
            for (name, cfg) in &configs {
                run_one(cfg, &root.join(name), opts)?;
            }
            Ok(())
        }
        (Cmd::Presets { figure_id: None }, None) => {
            for f in FIGURES {
                println!("{:<13} {}", f.id, f.description);
            }
            Ok(())
        }
        (Cmd::Presets { figure_id: Some(id) }, None) => {
            let Some(configs) = figure(id) else {
                bail!("unknown figure id \"{id}\"; available: {}", figure_ids().join(", "))
            };
            let map: serde_json::Map<String, serde_json::Value> =
                configs.iter().map(|(name, cfg)| ((*name).to_owned(), cfg.to_value())).collect();
            println!("{}", serde_json::to_string_pretty(&map)?);
            Ok(())
        }
        _ => unreachable!("every subcommand is handled"),
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
