//! Command-line runner: each sweep subcommand evaluates one parameter grid
//! and writes CSV (stdout unless `--out` is given), `verify` runs the
//! acceptance suite, and `show-config` prints the resolved configuration.
//!
//! Sweep axes are pinned grids. Giving the matching flag (or config key)
//! explicitly collapses that axis to the single given value; all other
//! parameters are ambient and come from the resolved configuration.

use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use qi_sim::acceptance::run_acceptance;
use qi_sim::emit::{format_float, write_csv, Record};
use qi_sim::experiments::{
    eta_grid, gamma_grid, p_grid, run_convergence, run_eta_sweep, run_gamma_sweep,
    run_norm_ratio, run_p_sweep, ConvergenceRow, EpsVsEtaRow, EpsVsPRow, GammaRow, RatioRow,
    DIM_GRID, ETA_ANCHORS, GAMMA_SWEEP_ETA, P_ANCHORS, TEXT_VARIANT,
};
use qi_sim::{Overrides, Result, SimConfig};

#[derive(Parser, Debug)]
#[command(
    name = "qi-sim",
    version,
    about = "Detection-error exponents for quantum illumination under photon loss"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Target reflectivity in [0, 1].
    #[arg(long)]
    eta: Option<f64>,

    /// Single-pass photon survival probability in [0, 1].
    #[arg(long)]
    p: Option<f64>,

    /// Mean photon number of the thermal background.
    #[arg(long = "thermal-n")]
    thermal_n: Option<f64>,

    /// Mean photon number of the retained probe mode.
    #[arg(long)]
    nt: Option<f64>,

    /// Fock-space truncation dimension per mode (at least 2).
    #[arg(long)]
    dim: Option<usize>,

    /// Interference weight of the control superposition, in [-1, 1].
    #[arg(long)]
    gamma: Option<f64>,

    /// Width tolerance of the s-minimization search, in (0, 1).
    #[arg(long = "tol-s")]
    tol_s: Option<f64>,

    /// Worker threads for grid evaluation; output is identical for any count.
    #[arg(long)]
    jobs: Option<usize>,

    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> Overrides {
        Overrides {
            eta: self.eta,
            p: self.p,
            thermal_n: self.thermal_n,
            nt: self.nt,
            dim: self.dim,
            gamma: self.gamma,
            tol_s: self.tol_s,
            jobs: self.jobs,
        }
    }

    /// Resolved config plus the set of explicitly given keys (flags over
    /// config file); the latter decides which sweep axes stay pinned.
    fn resolve(&self) -> Result<(SimConfig, Overrides)> {
        let file = Overrides::from_path(self.config.as_deref())?;
        let merged = self.flags().or(&file);
        let cfg = SimConfig::from_overrides(&merged)?;
        Ok((cfg, merged))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exponents of all three protocols across truncation dimensions.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Run at the alternative documented setting eta=0.01, p=0.9.
        #[arg(long)]
        textparams: bool,
    },
    /// Spectral norms of the two interference blocks over the (p, eta) grid.
    NormRatio {
        #[command(flatten)]
        common: Common,
    },
    /// Exponents versus survival probability at the pinned reflectivities.
    EpsVsP {
        #[command(flatten)]
        common: Common,
    },
    /// Exponents versus reflectivity at the pinned survival probabilities.
    EpsVsEta {
        #[command(flatten)]
        common: Common,
    },
    /// Causal-order exponent versus interference weight at fixed eta.
    GammaSweep {
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite and print one line per criterion.
    Verify,
    /// Print the fully resolved configuration.
    ShowConfig {
        #[command(flatten)]
        common: Common,
    },
}

/// Collapses a pinned sweep axis when the parameter was given explicitly.
fn axis(explicit: Option<f64>, pinned: Vec<f64>) -> Vec<f64> {
    match explicit {
        Some(v) => vec![v],
        None => pinned,
    }
}

/// Formats an ambient value, marking it as an assumption when it was not
/// set explicitly.
fn noted(value: f64, explicit: bool) -> String {
    if explicit {
        format_float(value)
    } else {
        format!("{} (assumed)", format_float(value))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convergence { common, textparams } => {
            let (cfg, set) = common.resolve()?;
            let dims = match set.dim {
                Some(d) => vec![d],
                None => DIM_GRID.to_vec(),
            };
            let rows = run_convergence(&cfg, &dims, textparams)?;
            let (eta, p) = if textparams { TEXT_VARIANT } else { (cfg.eta, cfg.p) };
            let meta = [
                ("sweep", "convergence".to_string()),
                ("eta", format_float(eta)),
                ("p", format_float(p)),
                ("thermal_n", format_float(cfg.thermal_n)),
                ("nt", format_float(cfg.nt)),
                ("gamma", format_float(cfg.gamma)),
                ("tol_s", format_float(cfg.tol_s)),
            ];
            write_csv(&meta, &rows, common.out.as_deref())
        }
        Command::NormRatio { common } => {
            let (cfg, set) = common.resolve()?;
            let rows =
                run_norm_ratio(&cfg, &axis(set.p, p_grid()), &axis(set.eta, ETA_ANCHORS.to_vec()))?;
            let meta = [
                ("sweep", "norm-ratio".to_string()),
                ("dim", cfg.dim.to_string()),
                ("thermal_n", noted(cfg.thermal_n, set.thermal_n.is_some())),
                ("nt", noted(cfg.nt, set.nt.is_some())),
            ];
            write_csv(&meta, &rows, common.out.as_deref())
        }
        Command::EpsVsP { common } => {
            let (cfg, set) = common.resolve()?;
            let rows =
                run_p_sweep(&cfg, &axis(set.p, p_grid()), &axis(set.eta, ETA_ANCHORS.to_vec()))?;
            let meta = [
                ("sweep", "eps-vs-p".to_string()),
                ("dim", cfg.dim.to_string()),
                ("thermal_n", noted(cfg.thermal_n, set.thermal_n.is_some())),
                ("nt", noted(cfg.nt, set.nt.is_some())),
                ("gamma", format_float(cfg.gamma)),
                ("tol_s", format_float(cfg.tol_s)),
            ];
            write_csv(&meta, &rows, common.out.as_deref())
        }
        Command::EpsVsEta { common } => {
            let (cfg, set) = common.resolve()?;
            let rows =
                run_eta_sweep(&cfg, &axis(set.eta, eta_grid()), &axis(set.p, P_ANCHORS.to_vec()))?;
            let meta = [
                ("sweep", "eps-vs-eta".to_string()),
                ("dim", cfg.dim.to_string()),
                ("thermal_n", noted(cfg.thermal_n, set.thermal_n.is_some())),
                ("nt", noted(cfg.nt, set.nt.is_some())),
                ("gamma", format_float(cfg.gamma)),
                ("tol_s", format_float(cfg.tol_s)),
            ];
            write_csv(&meta, &rows, common.out.as_deref())
        }
        Command::GammaSweep { common } => {
            let (cfg, set) = common.resolve()?;
            let eta = set.eta.unwrap_or(GAMMA_SWEEP_ETA);
            let rows = run_gamma_sweep(&cfg, eta, &axis(set.gamma, gamma_grid()))?;
            let meta = [
                ("sweep", "gamma-sweep".to_string()),
                ("eta", format_float(eta)),
                ("p", format_float(cfg.p)),
                ("dim", cfg.dim.to_string()),
                ("thermal_n", noted(cfg.thermal_n, set.thermal_n.is_some())),
                ("nt", noted(cfg.nt, set.nt.is_some())),
                ("tol_s", format_float(cfg.tol_s)),
            ];
            write_csv(&meta, &rows, common.out.as_deref())
        }
        Command::Verify => {
            let reports = run_acceptance();
            let failed = reports.iter().filter(|r| !r.pass).count();
            for r in &reports {
                let status = if r.pass { "PASS" } else { "FAIL" };
                println!("criterion {:02} {status} {}: {}", r.index, r.name, r.detail);
            }
            if failed > 0 {
                eprintln!("{failed} of {} criteria failed", reports.len());
                std::process::exit(1);
            }
            println!("all {} criteria passed", reports.len());
            Ok(())
        }
        Command::ShowConfig { common } => {
            let (cfg, _) = common.resolve()?;
            println!("{cfg}");
            Ok(())
        }
    }
}

/// Documents each sweep's CSV columns in its help text, sourced from the
/// same header constants the emitter writes.
fn with_column_docs(mut cmd: clap::Command) -> clap::Command {
    let docs: [(&str, &[&str]); 5] = [
        ("convergence", ConvergenceRow::HEADER),
        ("norm-ratio", RatioRow::HEADER),
        ("eps-vs-p", EpsVsPRow::HEADER),
        ("eps-vs-eta", EpsVsEtaRow::HEADER),
        ("gamma-sweep", GammaRow::HEADER),
    ];
    for (name, header) in docs {
        cmd = cmd
            .mut_subcommand(name, |sc| sc.after_help(format!("CSV columns: {}", header.join(", "))));
    }
    cmd
}

fn main() {
    let matches = match with_column_docs(Cli::command()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
