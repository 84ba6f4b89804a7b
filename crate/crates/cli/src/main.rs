//! Command-line front end: simulation runs, per-mode analysis, decay and
//! boundedness experiments, inequality verification, and report assembly.
//!
//! Exit status: 0 when every enabled assertion passes, 2 when any is
//! flagged, 1 on errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{BootstrapArgs, BoundedArgs, ModesArgs, Settings, SimulateArgs};
use config::Config;

#[derive(Parser)]
#[command(
    name = "jmgt",
    version,
    about = "Pseudospectral simulation and verification suite for a third-order nonlinear acoustics model"
)]
struct Cli {
    /// Key-value configuration file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV artifacts and manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Also emit SVG line plots next to the CSV files.
    #[arg(long, global = true)]
    svg: bool,

    /// Random seed override (also `run.seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the evolution system and write the energy-ladder CSV.
    Simulate {
        #[arg(long, default_value = "exact-linear")]
        scheme: String,
        /// Enable the quadratic nonlinearity (needs the imex2 scheme).
        #[arg(long)]
        nonlinear: bool,
        /// Highest derivative order tracked by the energy ladder.
        #[arg(long, default_value_t = 3)]
        k_max: u32,
        /// Track the negative-order functionals at `decay.gamma`.
        #[arg(long)]
        track_gamma: bool,
        /// Also evaluate the estimate integrals at this order.
        #[arg(long)]
        i_terms: Option<u32>,
        /// Serialize the final (u, v, w) fields.
        #[arg(long)]
        save_fields: bool,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        dim: Option<u64>,
    },
    /// Dispersion, stability sweep, decay envelope, Lyapunov certification.
    Modes {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        xi_min: f64,
        #[arg(long, default_value_t = 1e3)]
        xi_max: f64,
        #[arg(long, default_value_t = 200)]
        xi_points: usize,
        /// Steps per axis of the (tau, beta) stability sweep.
        #[arg(long, default_value_t = 50)]
        sweep_steps: usize,
        #[arg(long, default_value_t = 2.0)]
        sweep_max: f64,
        #[arg(long, default_value_t = 10)]
        lyapunov_points: usize,
    },
    /// Radial-quadrature linear decay run with algebraic/exponential fits.
    Decay {
        #[arg(long)]
        gamma: Option<f64>,
        /// gaussian[:sigma] | band[:lo,hi] | powerlaw-lowfreq[:a] | flat-lowfreq
        #[arg(long, default_value = "powerlaw-lowfreq")]
        profile: String,
        #[arg(long)]
        dim: Option<u64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        cutoff_radius: Option<f64>,
    },
    /// Small-data boundedness run, optionally with a boosted companion.
    Bounded {
        /// Regularity index (smallness tracked at its threshold order).
        #[arg(long, default_value_t = 3)]
        s: u32,
        /// Integrate the linearized system instead.
        #[arg(long)]
        linear: bool,
        /// Add the companion run with boosted high-order norms.
        #[arg(long)]
        companion: bool,
        /// High-order norm boost factor of the companion.
        #[arg(long, default_value_t = 100.0)]
        boost: f64,
        /// Axis mode index carrying the boost.
        #[arg(long, default_value_t = 10)]
        boost_mode: i64,
        #[arg(long, default_value_t = 0.5)]
        band_lo: f64,
        #[arg(long, default_value_t = 1.5)]
        band_hi: f64,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        dim: Option<u64>,
    },
    /// Estimate-integral ratios across an amplitude sweep.
    Bootstrap {
        #[arg(long, default_value_t = 3)]
        s: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Comma-separated amplitude sweep.
        #[arg(long, default_value = "1e-4,1e-3,1e-2")]
        amplitudes: String,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        dim: Option<u64>,
    },
    /// Run the pre-registered interpolation-inequality suites.
    Inequalities {
        /// Restrict to one suite by name.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Threshold order and interpolation-exponent table.
    Thresholds {
        #[arg(long, default_value_t = 3)]
        s: u32,
    },
    /// Aggregate prior summaries in the output directory.
    Report,
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.set("run.seed", seed);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    std::fs::create_dir_all(&cli.out)?;
    let mut cfg = load_config(&cli)?;
    let out = cli.out.clone();
    let svg = cli.svg;

    match &cli.cmd {
        Command::Thresholds { s } => commands::cmd_thresholds(*s, &out, &cfg),
        Command::Modes {
            tau,
            beta,
            alpha,
            xi_min,
            xi_max,
            xi_points,
            sweep_steps,
            sweep_max,
            lyapunov_points,
        } => {
            override_f64(&mut cfg, "params.tau", *tau);
            override_f64(&mut cfg, "params.beta", *beta);
            override_f64(&mut cfg, "params.alpha", *alpha);
            let st = Settings::from_config(&cfg)?;
            let args = ModesArgs {
                xi_min: *xi_min,
                xi_max: *xi_max,
                xi_points: *xi_points,
                sweep_steps: *sweep_steps,
                sweep_max: *sweep_max,
                lyapunov_points: *lyapunov_points,
            };
            commands::cmd_modes(&st, &args, &out, &cfg)
        }
        Command::Decay {
            gamma,
            profile,
            dim,
            tau,
            beta,
            cutoff_radius,
        } => {
            override_f64(&mut cfg, "decay.gamma", *gamma);
            override_f64(&mut cfg, "params.tau", *tau);
            override_f64(&mut cfg, "params.beta", *beta);
            override_f64(&mut cfg, "cutoff.radius", *cutoff_radius);
            override_u64(&mut cfg, "grid.dim", *dim);
            let st = Settings::from_config(&cfg)?;
            commands::cmd_decay(&st, profile, svg, &out, &cfg)
        }
        Command::Simulate {
            scheme,
            nonlinear,
            k_max,
            track_gamma,
            i_terms,
            save_fields,
            tau,
            beta,
            dt,
            t_end,
            amplitude,
            n,
            dim,
        } => {
            override_f64(&mut cfg, "params.tau", *tau);
            override_f64(&mut cfg, "params.beta", *beta);
            override_f64(&mut cfg, "run.dt", *dt);
            override_f64(&mut cfg, "run.t_end", *t_end);
            override_f64(&mut cfg, "run.amplitude", *amplitude);
            override_u64(&mut cfg, "grid.n", *n);
            override_u64(&mut cfg, "grid.dim", *dim);
            let st = Settings::from_config(&cfg)?;
            let args = SimulateArgs {
                scheme: scheme.clone(),
                nonlinear: *nonlinear,
                k_max: *k_max,
                track_gamma: *track_gamma,
                i_term_order: *i_terms,
                save_fields: *save_fields,
            };
            commands::cmd_simulate(&st, &args, svg, &out, &cfg)
        }
        Command::Bounded {
            s,
            linear,
            companion,
            boost,
            boost_mode,
            band_lo,
            band_hi,
            amplitude,
            t_end,
            n,
            dim,
        } => {
            override_f64(&mut cfg, "run.amplitude", *amplitude);
            override_f64(&mut cfg, "run.t_end", *t_end);
            override_u64(&mut cfg, "grid.n", *n);
            override_u64(&mut cfg, "grid.dim", *dim);
            let st = Settings::from_config(&cfg)?;
            let args = BoundedArgs {
                s: *s,
                nonlinear: !linear,
                companion: *companion,
                boost: *boost,
                boost_mode: *boost_mode,
                band: (*band_lo, *band_hi),
            };
            commands::cmd_bounded(&st, &args, &out, &cfg)
        }
        Command::Bootstrap {
            s,
            k,
            amplitudes,
            t_end,
            n,
            dim,
        } => {
            override_f64(&mut cfg, "run.t_end", *t_end);
            override_u64(&mut cfg, "grid.n", *n);
            override_u64(&mut cfg, "grid.dim", *dim);
            let st = Settings::from_config(&cfg)?;
            let amps: Vec<f64> = amplitudes
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|e| anyhow::anyhow!("amplitude {a:?}: {e}")))
                .collect::<Result<_>>()?;
            let args = BootstrapArgs {
                s: *s,
                k: *k,
                amplitudes: amps,
            };
            commands::cmd_bootstrap(&st, &args, &out, &cfg)
        }
        Command::Inequalities { suite } => commands::cmd_inequalities(suite.as_deref(), &out, &cfg),
        Command::Report => commands::cmd_report(&out),
    }
}

fn override_f64(cfg: &mut Config, key: &str, v: Option<f64>) {
    if let Some(v) = v {
        cfg.set(key, v);
    }
}

fn override_u64(cfg: &mut Config, key: &str, v: Option<u64>) {
    if let Some(v) = v {
        cfg.set(key, v);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
