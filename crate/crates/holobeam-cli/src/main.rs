//! Command-line front end: single trials, experiment sweeps, bound tables,
//! profile dumps, and SVG charts of sweep results.
//!
//! Exit codes: 0 success, 1 usage error, 2 config/input validation error,
//! 3 runtime error.

mod svg;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

use holobeam::bounds::{holobeam_error_bound, BoundInputs};
use holobeam::config::{load_config, Beta2Init, ExperimentConfig, Policy};
use holobeam::grid::{
    discrete_optimum, min_neighbor_gap, restricted_mean_profile, Axis, PhaseGrid,
};
use holobeam::harness::{
    representative_user, run_experiment, run_experiment_sequential, run_trial, write_results,
};

#[derive(Parser)]
#[command(
    name = "holobeam",
    version,
    about = "Beam alignment simulator for metasurface transceivers"
)]
struct Cli {
    /// Override the config file's base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Experiment config file (TOML); defaults reproduce the reference
    /// 30 GHz setup when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path for subcommands that write a file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded trial and print its outcome.
    Run {
        /// Policy to run.
        #[arg(long, value_enum, default_value_t = PolicyArg::Holobeam)]
        policy: PolicyArg,
        /// Pilot budget for the trial.
        #[arg(long, default_value_t = 200)]
        n: u64,
    },
    /// Run the full sweep from the config file and write a results CSV.
    Sweep {
        /// Force the single-threaded runner (output is identical).
        #[arg(long)]
        sequential: bool,
    },
    /// Evaluate the error-probability bound over one or more budgets.
    Bound {
        /// Budgets to evaluate, e.g. `--n 1e6 --n 1e9` (scientific
        /// notation accepted). Defaults to the decades 1e3..1e9.
        #[arg(long = "n", value_parser = parse_budget)]
        budgets: Vec<f64>,
    },
    /// Dump the restricted mean-RSS profile of one axis as CSV.
    Profile {
        /// Swept axis: 1 or 2.
        #[arg(long, default_value_t = 2)]
        axis: u8,
        /// Value the other axis is frozen at.
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        frozen: f64,
    },
    /// Render a results CSV as an SVG line chart.
    Plot {
        /// Results CSV produced by `sweep`.
        csv: PathBuf,
        /// Column to plot.
        #[arg(long, value_enum, default_value_t = Metric::Error)]
        metric: Metric,
        /// Logarithmic y axis.
        #[arg(long)]
        log_y: bool,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum PolicyArg {
    Holobeam,
    SeqHalving,
    Uniform,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Policy {
        match p {
            PolicyArg::Holobeam => Policy::Holobeam,
            PolicyArg::SeqHalving => Policy::SeqHalving,
            PolicyArg::Uniform => Policy::Uniform,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
pub enum Metric {
    Error,
    Rate,
}

fn parse_budget(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("budget must be a finite value >= 1, got {s}"))
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version also land here, with success status
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(classify(&err));
        }
    }
}

fn classify(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<holobeam::Error>() {
        Some(
            holobeam::Error::InvalidConfig(_)
            | holobeam::Error::Parse(_)
            | holobeam::Error::InvalidArgument(_),
        ) => 2,
        _ => 3,
    }
}

fn effective_config(cli_config: &Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match cli_config {
        Some(path) => {
            load_config(path).with_context(|| format!("loading config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.base_seed = seed;
    }
    Ok(cfg)
}

fn write_or_print(out: &Option<PathBuf>, contents: &str, label: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, contents).map_err(holobeam::Error::Io)?;
            eprintln!("wrote {label} to {}", path.display());
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = effective_config(&cli.config, cli.seed)?;
    match cli.command {
        Command::Run { policy, n } => cmd_run(&cfg, policy.into(), n),
        Command::Sweep { sequential } => cmd_sweep(&cfg, sequential, &cli.out),
        Command::Bound { budgets } => cmd_bound(&cfg, &budgets, &cli.out),
        Command::Profile { axis, frozen } => cmd_profile(&cfg, axis, frozen, &cli.out),
        Command::Plot { csv, metric, log_y } => cmd_plot(&csv, metric, log_y, &cli.out),
    }
}

fn cmd_run(cfg: &ExperimentConfig, policy: Policy, n: u64) -> Result<()> {
    cfg.validate()?;
    let power = cfg.pilot_powers_dbm[0];
    let distance = cfg.distances_m[0];
    let outcome = run_trial(cfg, policy, n, power, distance, 0)?;
    let hmt = cfg.cell_hmt(power, distance);
    let grid1 = PhaseGrid::build(hmt.kx())?;
    let grid2 = PhaseGrid::build(hmt.ky())?;
    println!("policy: {policy}");
    println!("seed: {}", cfg.base_seed);
    println!(
        "user: alpha1={:.6} alpha2={:.6}",
        outcome.user.alpha1, outcome.user.alpha2
    );
    println!("grids: K1={} K2={}", grid1.len(), grid2.len());
    println!(
        "optimum: k1*={} k2*={} (beta1={:.6} beta2={:.6})",
        outcome.k1_star,
        outcome.k2_star,
        grid1.value(outcome.k1_star),
        grid2.value(outcome.k2_star)
    );
    println!(
        "selected: k1={} k2={} (beta1={:.6} beta2={:.6})",
        outcome.selected.k1,
        outcome.selected.k2,
        grid1.value(outcome.selected.k1),
        grid2.value(outcome.selected.k2)
    );
    println!("correct: {}", outcome.correct);
    println!("pilots_used: {}", outcome.selected.pilots_used);
    println!("rate: {:.6} bit/s/Hz", outcome.rate);
    Ok(())
}

fn cmd_sweep(cfg: &ExperimentConfig, sequential: bool, out: &Option<PathBuf>) -> Result<()> {
    let path = out
        .clone()
        .ok_or_else(|| holobeam::Error::InvalidArgument("sweep requires --out".into()))?;
    let result = if sequential {
        run_experiment_sequential(cfg)?
    } else {
        run_experiment(cfg)?
    };
    for (key, error) in result.invalid_cells() {
        eprintln!(
            "cell invalid: {} n={} P={}dBm d={}m: {error}",
            key.policy, key.n, key.power_dbm, key.distance_m
        );
    }
    write_results(&result, &path)?;
    let valid = result
        .cells
        .iter()
        .filter(|(_, o)| matches!(o, holobeam::harness::CellOutcome::Valid(_)))
        .count();
    eprintln!(
        "wrote {valid} cells to {} ({} invalid)",
        path.display(),
        result.cells.len() - valid
    );
    Ok(())
}

fn cmd_bound(cfg: &ExperimentConfig, budgets: &[f64], out: &Option<PathBuf>) -> Result<()> {
    cfg.validate()?;
    let budgets: Vec<f64> = if budgets.is_empty() {
        (3..=9).map(|e| 10f64.powi(e)).collect()
    } else {
        let mut b = budgets.to_vec();
        b.sort_by(f64::total_cmp);
        b
    };
    let power = cfg.pilot_powers_dbm[0];
    let distance = cfg.distances_m[0];
    let hmt = cfg.cell_hmt(power, distance);
    let user = representative_user(cfg)?;
    let grid1 = PhaseGrid::build(hmt.kx())?;
    let grid2 = PhaseGrid::build(hmt.ky())?;
    let opt = discrete_optimum(&hmt, &user, &grid1, &grid2)?;
    let init = match cfg.beta2_init {
        Beta2Init::Midpoint => grid2.midpoint_index(),
        Beta2Init::Index(i) => i,
    };

    // gaps taken at the frozen values the two phases actually see
    let profile1 = restricted_mean_profile(&hmt, &user, &grid1, Axis::Beta1, grid2.value(init));
    let profile2 = restricted_mean_profile(&hmt, &user, &grid2, Axis::Beta2, grid1.value(opt.k1));
    let gap1 = min_neighbor_gap(&profile1)?;
    let gap2 = min_neighbor_gap(&profile2)?;
    if gap1.degenerate || gap2.degenerate {
        return Err(holobeam::Error::InvalidArgument(
            "degenerate profile gap at this location; the bound needs a positive gap".into(),
        )
        .into());
    }

    let mut text = String::new();
    text.push_str(&format!(
        "# user ({:.6}, {:.6}); K1={} K2={}; delta1={:.6e} W delta2={:.6e} W; G={:.6e} W sigma2={:.6e} W\n",
        user.alpha1,
        user.alpha2,
        grid1.len(),
        grid2.len(),
        gap1.gap,
        gap2.gap,
        hmt.g(),
        hmt.noise_power
    ));
    text.push_str("n,bound,axis1_elim,axis1_final,axis2_elim,axis2_final,underflow\n");
    for &n in &budgets {
        let inputs = BoundInputs {
            n,
            k1: grid1.len(),
            k2: grid2.len(),
            delta1: gap1.gap,
            delta2: gap2.gap,
            sigma2: hmt.noise_power,
            g: hmt.g(),
        };
        let bound = holobeam_error_bound(&inputs)?;
        text.push_str(&format!(
            "{n:e},{:e},{:e},{:e},{:e},{:e},{}\n",
            bound.value,
            4.0 * bound.axis1.elimination,
            4.0 * bound.axis1.final_batch,
            4.0 * bound.axis2.elimination,
            4.0 * bound.axis2.final_batch,
            bound.underflow
        ));
    }
    write_or_print(out, &text, "bound table")
}

fn cmd_profile(cfg: &ExperimentConfig, axis: u8, frozen: f64, out: &Option<PathBuf>) -> Result<()> {
    cfg.validate()?;
    let axis = match axis {
        1 => Axis::Beta1,
        2 => Axis::Beta2,
        other => {
            return Err(holobeam::Error::InvalidArgument(format!(
                "axis must be 1 or 2, got {other}"
            ))
            .into())
        }
    };
    let hmt = cfg.cell_hmt(cfg.pilot_powers_dbm[0], cfg.distances_m[0]);
    let user = representative_user(cfg)?;
    let grid = match axis {
        Axis::Beta1 => PhaseGrid::build(hmt.kx())?,
        Axis::Beta2 => PhaseGrid::build(hmt.ky())?,
    };
    let profile = restricted_mean_profile(&hmt, &user, &grid, axis, frozen);
    let mut text = String::from("index,beta,mean_rss_w\n");
    for (k, mu) in profile.iter().enumerate() {
        text.push_str(&format!("{k},{:e},{:e}\n", grid.value(k), mu));
    }
    write_or_print(out, &text, "profile")
}

fn cmd_plot(csv: &Path, metric: Metric, log_y: bool, out: &Option<PathBuf>) -> Result<()> {
    let result = holobeam::harness::read_results(csv)?;
    let rendered = svg::render_chart(&result, metric, log_y);
    write_or_print(out, &rendered, "chart")
}
