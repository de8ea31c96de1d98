//! Command-line front end: runs detuning × intensity sweeps, dumps the
//! derived-quantities report and single-point propagation traces.

// `!(x > 0)`-style guards double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rydeit_cli::config::{load_preset, parse_config, RunConfig};
use rydeit_cli::output;
use rydeit_core::{
    derived_quantities, propagate, realization_rng, run_sweep, DetuningPoint, FieldState,
    PropagationMode, SuperatomGrid,
};
use std::f64::consts::TAU;
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rydeit",
    about = "Steady-state probe propagation through a Rydberg-blockaded EIT medium",
    version
)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Built-in parameter preset (pritchard2010)
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,

    /// Override the master seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the integration mode
    #[arg(long, global = true, value_parser = ["stochastic", "continuous"])]
    mode: Option<String>,

    /// Override the realizations per sweep point
    #[arg(long, global = true)]
    realizations: Option<usize>,

    /// Override the output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Keep (on) or pin to one (off) the two-photon correlation feedback
    #[arg(long = "g2-feedback", global = true, value_parser = ["on", "off"])]
    g2_feedback: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full sweep and write spectrum.csv
    Spectrum,
    /// Report the derived scalar quantities (writes derived.txt)
    Derived {
        /// Additionally write derived.json
        #[arg(long)]
        json: bool,
    },
    /// Propagate a single (intensity, detuning) point and write trace.csv
    Propagate {
        /// Input probe Rabi frequency over 2π in MHz (default: first sweep value)
        #[arg(long, value_name = "MHZ")]
        omega_p: Option<f64>,
        /// Probe detuning over 2π in MHz (default: two-photon resonance)
        #[arg(long, value_name = "MHZ")]
        delta_p: Option<f64>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            parse_config(&text)?
        }
        (None, Some(name)) => load_preset(name)?,
        (None, None) => bail!("pass one of --config <path> or --preset <name>"),
        (Some(_), Some(_)) => bail!("--config and --preset are mutually exclusive"),
    };
    if let Some(seed) = cli.seed {
        cfg.propagation.seed = seed;
    }
    if let Some(mode) = &cli.mode {
        cfg.propagation.mode = match mode.as_str() {
            "stochastic" => PropagationMode::Stochastic,
            _ => PropagationMode::Continuous,
        };
    }
    if let Some(n) = cli.realizations {
        if n == 0 {
            bail!("--realizations must be >= 1");
        }
        cfg.sweep.n_realizations = n;
    }
    if let Some(dir) = &cli.out {
        cfg.out_dir = dir.clone();
    }
    if let Some(flag) = &cli.g2_feedback {
        cfg.propagation.g2_feedback = flag == "on";
    }
    Ok(cfg)
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<()> {
    let result = run_sweep(&cfg.sweep, &cfg.system, &cfg.medium, &cfg.propagation)?;
    let failures = result.points.iter().filter(|p| p.result.is_err()).count();
    for point in result.points.iter().filter(|p| p.result.is_err()) {
        eprintln!(
            "warning: point (omega_p = {:.4} MHz, delta_p = {:.4} MHz) failed: {}",
            point.omega_p_in / (TAU * 1e6),
            point.delta_p / (TAU * 1e6),
            point.result.as_ref().unwrap_err()
        );
    }
    let path = cfg.out_dir.join("spectrum.csv");
    output::write_atomic(&path, &output::spectrum_csv(&result))
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "wrote {} ({} points, {} failed)",
        path.display(),
        result.points.len(),
        failures
    );
    Ok(())
}

fn cmd_derived(cfg: &RunConfig, json: bool) -> Result<()> {
    let report = derived_quantities(&cfg.system, &cfg.medium)?;
    println!("{report}");
    let path = cfg.out_dir.join("derived.txt");
    output::write_atomic(&path, &format!("{report}\n"))
        .with_context(|| format!("writing {}", path.display()))?;
    if json {
        let path = cfg.out_dir.join("derived.json");
        let body = serde_json::to_string_pretty(&report)?;
        output::write_atomic(&path, &body)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_propagate(
    cfg: &RunConfig,
    omega_p_mhz: Option<f64>,
    delta_p_mhz: Option<f64>,
) -> Result<()> {
    let omega_p = match omega_p_mhz {
        Some(mhz) => TAU * mhz * 1e6,
        None => cfg.sweep.omega_p_inputs[0],
    };
    if !(omega_p > 0.0) {
        bail!("--omega-p must be > 0");
    }
    let delta_p = match delta_p_mhz {
        Some(mhz) => TAU * mhz * 1e6,
        None => -cfg.system.delta_c,
    };
    let grid = SuperatomGrid::build(&cfg.medium, &cfg.system)?;
    if grid.degenerate {
        eprintln!("warning: medium shorter than one blockade diameter; single-cell grid");
    }
    let d = DetuningPoint::for_probe(&cfg.system, delta_p);
    let input = FieldState::input(omega_p * omega_p, cfg.sweep.g2_input);
    let mut rng = realization_rng(cfg.propagation.seed, 0, 0, 0);
    let (exit, trace) = propagate(&input, &grid, &cfg.system, &d, &cfg.propagation, &mut rng)?;
    let path = cfg.out_dir.join("trace.csv");
    output::write_atomic(&path, &output::trace_csv(&trace))
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "omega_p/2pi = {} MHz, delta_p/2pi = {} MHz, {} cells",
        omega_p / (TAU * 1e6),
        delta_p / (TAU * 1e6),
        trace.cells.len()
    );
    println!(
        "transmission = {:.6}, g2(L) = {:.6}",
        exit.i_p / input.i_p,
        exit.g2
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Derived { json } => cmd_derived(&cfg, *json),
        Command::Propagate { omega_p, delta_p } => cmd_propagate(&cfg, *omega_p, *delta_p),
    }
}
