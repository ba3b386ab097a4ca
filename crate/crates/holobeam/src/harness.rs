//! Reproducible Monte Carlo experiment runner.
//!
//! A sweep is a grid of cells (policy, distance, power, budget). Every
//! trial derives its own RNG stream from an avalanche hash of the base
//! seed, the cell parameters, and the trial index, so results are
//! independent of cell enumeration order, trial count, and worker count.
//! Trials within a cell run in parallel when the `parallel` feature is on;
//! aggregation always reduces in trial-index order, so both paths produce
//! bit-identical results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use std::io::Write;
use std::path::Path;

use crate::bandit::{
    beta_i_holobeam, sequential_halving, two_phase, uniform_explore, PolicyOutput,
};
use crate::channel::{achievable_rate, RssEnvironment, UserLocation};
use crate::config::{Beta2Init, ExperimentConfig, Policy, UserModel};
use crate::error::{Error, Result};
use crate::grid::{discrete_optimum, PhaseGrid};

// ---------------------------------------------------------------------------
// Seed mixing
// ---------------------------------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Per-trial seed: an avalanche hash of the base seed, the cell, and the
/// trial index. Adding trials or cells never perturbs existing ones.
pub fn trial_seed(base_seed: u64, policy: Policy, n: u64, power_dbm: f64, distance_m: f64, trial: u64) -> u64 {
    mix(&[
        base_seed,
        policy as u64,
        n,
        power_dbm.to_bits(),
        distance_m.to_bits(),
        trial,
    ])
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

/// Result of one seeded trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub user: UserLocation,
    pub selected: PolicyOutput,
    pub k1_star: usize,
    pub k2_star: usize,
    pub correct: bool,
    /// Rate of the selected pair with `T_D = T - n`.
    pub rate: f64,
}

fn resolve_beta2_init(init: Beta2Init, grid2: &PhaseGrid) -> Result<usize> {
    match init {
        Beta2Init::Midpoint => Ok(grid2.midpoint_index()),
        Beta2Init::Index(i) => {
            if i < grid2.len() {
                Ok(i)
            } else {
                Err(Error::InvalidConfig(format!(
                    "beta2_init index {i} out of range for grid of {}",
                    grid2.len()
                )))
            }
        }
    }
}

/// A deterministic representative location for single-shot analysis (the
/// bound table, profile dumps): the fixed user when the config has one,
/// otherwise one draw from the base seed.
pub fn representative_user(cfg: &ExperimentConfig) -> Result<UserLocation> {
    match cfg.user_model {
        UserModel::Fixed { alpha1, alpha2 } => UserLocation::new(alpha1, alpha2),
        UserModel::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
            UserLocation::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
        }
    }
}

/// Runs one policy trial: draw the user, compute the discrete optimum,
/// run the policy, and score correctness and the achieved rate.
pub fn run_trial(
    cfg: &ExperimentConfig,
    policy: Policy,
    n: u64,
    power_dbm: f64,
    distance_m: f64,
    trial: u64,
) -> Result<TrialOutcome> {
    let seed = trial_seed(cfg.base_seed, policy, n, power_dbm, distance_m, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let user = match cfg.user_model {
        UserModel::Fixed { alpha1, alpha2 } => UserLocation::new(alpha1, alpha2)?,
        UserModel::Uniform => UserLocation::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        )?,
    };
    let hmt = cfg.cell_hmt(power_dbm, distance_m);
    let grid1 = PhaseGrid::build(hmt.kx())?;
    let grid2 = PhaseGrid::build(hmt.ky())?;
    let opt = discrete_optimum(&hmt, &user, &grid1, &grid2)?;
    let init = resolve_beta2_init(cfg.beta2_init, &grid2)?;

    let mut env = RssEnvironment::new(hmt.clone(), user, rng.random::<u64>())?;
    let selected = match policy {
        Policy::Holobeam => two_phase(&mut env, &grid1, &grid2, n, init, |v, b| {
            beta_i_holobeam(v, b)
        })?,
        Policy::SeqHalving => two_phase(&mut env, &grid1, &grid2, n, init, |v, b| {
            sequential_halving(v, b)
        })?,
        Policy::Uniform => two_phase(&mut env, &grid1, &grid2, n, init, |v, b| {
            uniform_explore(v, b)
        })?,
    };

    let rate = achievable_rate(
        &hmt,
        grid1.value(selected.k1),
        grid2.value(selected.k2),
        &user,
        n,
        cfg.total_slots,
    )?;
    Ok(TrialOutcome {
        user,
        selected,
        k1_star: opt.k1,
        k2_star: opt.k2,
        correct: selected.k1 == opt.k1 && selected.k2 == opt.k2,
        rate,
    })
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Identifies one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub policy: Policy,
    pub n: u64,
    pub power_dbm: f64,
    pub distance_m: f64,
}

/// Aggregated statistics of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub trials: u64,
    pub error_rate: f64,
    /// Normal-approximation 95% half-width `1.96 sqrt(p (1 - p) / trials)`.
    pub error_ci95: f64,
    pub mean_rate: f64,
    pub rate_ci95: f64,
    pub mean_pilots: f64,
    /// Rate under perfect alignment with the full block for data.
    pub oracle_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Valid(CellStats),
    /// A trial failed; the cell is excluded from output instead of
    /// aborting the sweep.
    Invalid { error: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub cells: Vec<(CellKey, CellOutcome)>,
}

impl ExperimentResult {
    pub fn get(&self, policy: Policy, n: u64, power_dbm: f64, distance_m: f64) -> Option<&CellStats> {
        self.cells.iter().find_map(|(k, o)| {
            if k.policy == policy && k.n == n && k.power_dbm == power_dbm && k.distance_m == distance_m
            {
                match o {
                    CellOutcome::Valid(s) => Some(s),
                    CellOutcome::Invalid { .. } => None,
                }
            } else {
                None
            }
        })
    }

    pub fn invalid_cells(&self) -> impl Iterator<Item = (&CellKey, &str)> {
        self.cells.iter().filter_map(|(k, o)| match o {
            CellOutcome::Invalid { error } => Some((k, error.as_str())),
            CellOutcome::Valid(_) => None,
        })
    }
}

fn aggregate(cfg: &ExperimentConfig, key: &CellKey, outcomes: &[TrialOutcome]) -> CellStats {
    let trials = outcomes.len() as u64;
    let failures = outcomes.iter().filter(|o| !o.correct).count() as f64;
    let p = failures / trials as f64;
    let mean_rate = outcomes.iter().map(|o| o.rate).sum::<f64>() / trials as f64;
    let rate_var = if trials > 1 {
        outcomes
            .iter()
            .map(|o| (o.rate - mean_rate).powi(2))
            .sum::<f64>()
            / (trials as f64 - 1.0)
    } else {
        0.0
    };
    let mean_pilots = outcomes
        .iter()
        .map(|o| o.selected.pilots_used as f64)
        .sum::<f64>()
        / trials as f64;

    let hmt = cfg.cell_hmt(key.power_dbm, key.distance_m);
    let aligned = UserLocation::new(0.0, 0.0).expect("origin is in range");
    let oracle_rate = achievable_rate(&hmt, 0.0, 0.0, &aligned, 0, cfg.total_slots)
        .expect("zero pilots always fit");

    CellStats {
        trials,
        error_rate: p,
        error_ci95: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        mean_rate,
        rate_ci95: 1.96 * (rate_var / trials as f64).sqrt(),
        mean_pilots,
        oracle_rate,
    }
}

// ---------------------------------------------------------------------------
// Sweep runner
// ---------------------------------------------------------------------------

fn cell_keys(cfg: &ExperimentConfig) -> Vec<CellKey> {
    let mut policies = cfg.policies.clone();
    policies.sort_by_key(|p| p.name());
    policies.dedup();
    let mut distances = cfg.distances_m.clone();
    distances.sort_by(f64::total_cmp);
    let mut powers = cfg.pilot_powers_dbm.clone();
    powers.sort_by(f64::total_cmp);
    let mut budgets = cfg.budgets.clone();
    budgets.sort_unstable();

    let mut keys = Vec::new();
    for &policy in &policies {
        for &distance_m in &distances {
            for &power_dbm in &powers {
                for &n in &budgets {
                    keys.push(CellKey {
                        policy,
                        n,
                        power_dbm,
                        distance_m,
                    });
                }
            }
        }
    }
    keys
}

fn run_cell(cfg: &ExperimentConfig, key: &CellKey, parallel: bool) -> CellOutcome {
    let trial = |t: u64| run_trial(cfg, key.policy, key.n, key.power_dbm, key.distance_m, t);
    let outcomes: std::result::Result<Vec<TrialOutcome>, Error> = if parallel {
        #[cfg(feature = "parallel")]
        {
            (0..cfg.trials).into_par_iter().map(trial).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..cfg.trials).map(trial).collect()
        }
    } else {
        (0..cfg.trials).map(trial).collect()
    };
    match outcomes {
        Ok(outcomes) => CellOutcome::Valid(aggregate(cfg, key, &outcomes)),
        Err(e) => CellOutcome::Invalid {
            error: e.to_string(),
        },
    }
}

fn run_experiment_impl(cfg: &ExperimentConfig, parallel: bool) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cells = cell_keys(cfg)
        .into_iter()
        .map(|key| {
            let outcome = run_cell(cfg, &key, parallel);
            (key, outcome)
        })
        .collect();
    Ok(ExperimentResult { cells })
}

/// Runs the full sweep, using all cores when built with the `parallel`
/// feature (the default).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_impl(cfg, cfg!(feature = "parallel"))
}

/// Single-threaded sweep; output is bit-identical to [`run_experiment`].
pub fn run_experiment_sequential(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_impl(cfg, false)
}

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str =
    "policy,n,power_dbm,distance_m,trials,error_rate,error_ci95,mean_rate,rate_ci95,mean_pilots,oracle_rate";

/// 9 significant digits, always in scientific notation.
fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders the valid cells as CSV, sorted by (policy, distance, power, n).
pub fn render_csv(result: &ExperimentResult) -> String {
    let mut rows: Vec<(&CellKey, &CellStats)> = result
        .cells
        .iter()
        .filter_map(|(k, o)| match o {
            CellOutcome::Valid(s) => Some((k, s)),
            CellOutcome::Invalid { .. } => None,
        })
        .collect();
    rows.sort_by(|(a, _), (b, _)| {
        a.policy
            .name()
            .cmp(b.policy.name())
            .then(a.distance_m.total_cmp(&b.distance_m))
            .then(a.power_dbm.total_cmp(&b.power_dbm))
            .then(a.n.cmp(&b.n))
    });
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (k, s) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            k.policy.name(),
            k.n,
            fmt9(k.power_dbm),
            fmt9(k.distance_m),
            s.trials,
            fmt9(s.error_rate),
            fmt9(s.error_ci95),
            fmt9(s.mean_rate),
            fmt9(s.rate_ci95),
            fmt9(s.mean_pilots),
            fmt9(s.oracle_rate),
        ));
    }
    out
}

/// Writes the CSV representation of `result` to `path`.
pub fn write_results(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_csv(result).as_bytes())?;
    Ok(())
}

/// Parses a results CSV produced by [`write_results`].
pub fn read_results(path: &Path) -> Result<ExperimentResult> {
    parse_csv(&std::fs::read_to_string(path)?)
}

pub fn parse_csv(text: &str) -> Result<ExperimentResult> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "unexpected results header: {other:?}"
            )))
        }
    }
    let mut cells = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Parse(format!(
                "row {}: expected 11 fields, got {}",
                i + 2,
                fields.len()
            )));
        }
        let f = |j: usize| -> Result<f64> {
            fields[j]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: field {}: {e}", i + 2, j + 1)))
        };
        let key = CellKey {
            policy: fields[0].parse()?,
            n: fields[1]
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("row {}: n: {e}", i + 2)))?,
            power_dbm: f(2)?,
            distance_m: f(3)?,
        };
        let stats = CellStats {
            trials: fields[4]
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("row {}: trials: {e}", i + 2)))?,
            error_rate: f(5)?,
            error_ci95: f(6)?,
            mean_rate: f(7)?,
            rate_ci95: f(8)?,
            mean_pilots: f(9)?,
            oracle_rate: f(10)?,
        };
        cells.push((key, CellOutcome::Valid(stats)));
    }
    Ok(ExperimentResult { cells })
}
