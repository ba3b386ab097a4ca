//! Fixed-budget best-arm identification over the phase-shift grids.
//!
//! The main policy runs in two phases, one per axis. Within a phase the
//! batched elimination policy probes the two extremes and two interior
//! points of the active interval, drops the third of the interval on the
//! far side of the loser, and finishes with a head-to-head batch over the
//! last three survivors. Sequential halving and a uniform round-robin are
//! provided as baselines; all three run against the same abstract
//! arm-sampling interface.

use crate::channel::RssEnvironment;
use crate::error::{Error, Result};
use crate::grid::{Axis, PhaseGrid};

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

/// A bandit over a fixed set of arms. Rewards from a fixed arm are i.i.d.
/// across pulls and each pull advances the pilot counter by exactly one.
pub trait ArmEnvironment {
    fn arm_count(&self) -> usize;
    /// Draws one reward from arm `k` (0-based).
    fn pull(&mut self, k: usize) -> f64;
    /// Pilots consumed so far.
    fn pulls_used(&self) -> u64;
}

/// A sampler addressed by both phase-shift parameters at once.
pub trait TwoAxisEnvironment {
    fn sample(&mut self, beta1: f64, beta2: f64) -> f64;
    fn pulls_used(&self) -> u64;
}

impl TwoAxisEnvironment for RssEnvironment {
    fn sample(&mut self, beta1: f64, beta2: f64) -> f64 {
        self.sample_rss(beta1, beta2)
            .expect("pilot budget exhausted mid-policy")
            .value()
    }

    fn pulls_used(&self) -> u64 {
        self.pilots_used()
    }
}

/// One-axis view of a two-axis sampler: the other parameter is frozen, and
/// arm `k` maps to the `k`-th grid value of the swept axis.
pub struct FrozenAxisEnv<'a, E: ?Sized> {
    env: &'a mut E,
    grid: &'a PhaseGrid,
    axis: Axis,
    frozen: f64,
}

impl<'a, E: TwoAxisEnvironment + ?Sized> FrozenAxisEnv<'a, E> {
    pub fn new(env: &'a mut E, grid: &'a PhaseGrid, axis: Axis, frozen: f64) -> Self {
        Self {
            env,
            grid,
            axis,
            frozen,
        }
    }
}

impl<E: TwoAxisEnvironment + ?Sized> ArmEnvironment for FrozenAxisEnv<'_, E> {
    fn arm_count(&self) -> usize {
        self.grid.len()
    }

    fn pull(&mut self, k: usize) -> f64 {
        let beta = self.grid.value(k);
        match self.axis {
            Axis::Beta1 => self.env.sample(beta, self.frozen),
            Axis::Beta2 => self.env.sample(self.frozen, beta),
        }
    }

    fn pulls_used(&self) -> u64 {
        self.env.pulls_used()
    }
}

// ---------------------------------------------------------------------------
// Batch schedule
// ---------------------------------------------------------------------------

/// Number of elimination batches needed to shrink `K` arms to 3 at a rate
/// of one third per batch: `ceil(log2(K/3) / log2(3/2))`, and 0 for `K = 3`.
pub fn num_batches(k: usize) -> Result<usize> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "elimination needs at least 3 arms, got {k}"
        )));
    }
    let l = ((k as f64 / 3.0).log2() / 1.5f64.log2()).ceil();
    Ok(l.max(0.0) as usize)
}

/// Pilot counts for the `L` elimination batches plus the final batch.
///
/// The ideal fractions of the phase budget are `2^(L-2)/3^(L-1)` for the
/// first two batches and `2^(L-l+1)/3^(L-l+2)` for batch `l >= 3`; they sum
/// to exactly 1. Integer sizes floor each elimination batch and fold the
/// accumulated remainder into the final batch, so the sizes sum to exactly
/// `n_half`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSchedule {
    /// Number of elimination batches `L`.
    pub batch_count: usize,
    /// `L + 1` pilot counts; the last entry is the final batch.
    pub sizes: Vec<u64>,
}

impl BatchSchedule {
    /// Builds the schedule, requiring enough pilots for one per sampled arm
    /// and batch (`n_half >= 4 (L + 1)`).
    pub fn new(n_half: u64, batch_count: usize) -> Result<Self> {
        if n_half < 4 * (batch_count as u64 + 1) {
            return Err(Error::InsufficientBudget(format!(
                "{n_half} pilots cannot cover {} batches of 4 arms",
                batch_count + 1
            )));
        }
        Ok(Self {
            batch_count,
            sizes: schedule_sizes(n_half, batch_count)?,
        })
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }
}

/// Integer batch sizes without the minimum-budget check. Exact integer
/// arithmetic: `floor(n_half * 2^a / 3^b)` per elimination batch, remainder
/// to the final batch.
pub(crate) fn schedule_sizes(n_half: u64, batch_count: usize) -> Result<Vec<u64>> {
    let l = batch_count;
    if l == 0 {
        return Ok(vec![n_half]);
    }
    if l > 75 {
        return Err(Error::InvalidArgument(format!(
            "batch count {l} out of supported range"
        )));
    }
    let mut sizes = Vec::with_capacity(l + 1);
    let mut used: u64 = 0;
    for batch in 1..=l {
        // fraction 2^a / 3^b of the phase budget
        let (a, b) = if batch <= 2 {
            // 2^(L-2) / 3^(L-1); for L = 1 this reads 1/2
            if l >= 2 {
                (l as u32 - 2, l as u32 - 1)
            } else {
                (0, 0) // handled below: 1/2 via explicit halving
            }
        } else {
            (l as u32 - batch as u32 + 1, l as u32 - batch as u32 + 2)
        };
        let size = if l == 1 {
            n_half / 2
        } else {
            let num = (n_half as u128) << a;
            (num / 3u128.pow(b)) as u64
        };
        sizes.push(size);
        used += size;
    }
    sizes.push(n_half - used);
    Ok(sizes)
}

// ---------------------------------------------------------------------------
// Quartet selection and elimination
// ---------------------------------------------------------------------------

/// The four probe points of an elimination batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuartetMember {
    A,
    B,
    C,
    D,
}

/// 0-based positions of (A, B, C, D) within an active interval of size `j`:
/// the two extremes plus the `ceil(j/3)`-th and `floor(2j/3)`-th points.
/// Positions may coincide for small `j`.
pub fn quartet_positions(j: usize) -> Result<[usize; 4]> {
    if j < 3 {
        return Err(Error::InvalidArgument(format!(
            "quartet needs an interval of at least 3 values, got {j}"
        )));
    }
    let b = j.div_ceil(3) - 1;
    let c = 2 * j / 3 - 1;
    Ok([0, b, c, j - 1])
}

/// Survivor sub-interval (inclusive, relative positions) after the batch
/// winner is known: a win at A or B trims everything above C, a win at C or
/// D trims everything below B. Points strictly between B and C always
/// survive.
pub fn eliminate(j: usize, best: QuartetMember) -> Result<(usize, usize)> {
    let [_, b, c, d] = quartet_positions(j)?;
    Ok(match best {
        QuartetMember::A | QuartetMember::B => (0, c),
        QuartetMember::C | QuartetMember::D => (b, d),
    })
}

/// Picks the quartet member with the highest empirical mean. Ties break
/// toward the member closest to B, then toward the lower position; arms
/// that received no pilots never win.
fn pick_winner(positions: &[usize], means: &[f64], pos_b: usize) -> usize {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by_key(|&i| (positions[i].abs_diff(pos_b), positions[i]));
    let mut best = order[0];
    for &i in &order[1..] {
        if means[i] > means[best] {
            best = i;
        }
    }
    positions[best]
}

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

/// Selected grid indices and the exact pilot count a policy consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyOutput {
    pub k1: usize,
    pub k2: usize,
    pub pilots_used: u64,
}

fn empirical_mean<E: ArmEnvironment + ?Sized>(env: &mut E, arm: usize, pulls: u64) -> f64 {
    if pulls == 0 {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for _ in 0..pulls {
        sum += env.pull(arm);
    }
    sum / pulls as f64
}

/// Round-robins `budget` pilots over `arms` and returns the arm with the
/// highest empirical mean (lower index on ties).
fn round_robin_best<E: ArmEnvironment + ?Sized>(
    env: &mut E,
    arms: &[usize],
    budget: u64,
) -> usize {
    let mut sums = vec![0.0f64; arms.len()];
    let mut counts = vec![0u64; arms.len()];
    for t in 0..budget {
        let i = (t % arms.len() as u64) as usize;
        sums[i] += env.pull(arms[i]);
        counts[i] += 1;
    }
    let mut best = 0;
    let mut best_mean = f64::NEG_INFINITY;
    for i in 0..arms.len() {
        if counts[i] == 0 {
            continue;
        }
        let mean = sums[i] / counts[i] as f64;
        if mean > best_mean {
            best_mean = mean;
            best = i;
        }
    }
    arms[best]
}

/// Single-axis batched elimination: `L` quartet batches followed by a final
/// batch over the few survivors. Empirical means are computed fresh in
/// every batch. Consumes at most `n_half` pilots.
///
/// The elimination loop runs while at least five values remain; with four,
/// B and C would coincide and a peak at the unprobed third position could
/// be trimmed without ever being sampled, so intervals of four or fewer go
/// straight to the final head-to-head batch (donating any unused batch
/// pilots to it, as with an early exit). Rounding can also leave five
/// survivors when the batches run out; the final batch splits its budget
/// evenly over however many remain.
///
/// Fewer than three arms fall back to a round-robin over the whole budget.
/// Batches too small to give every probe a pilot still run: sampled probes
/// beat unsampled ones and full ties resolve toward B, keeping the
/// procedure deterministic at any budget.
pub fn beta_i_holobeam<E: ArmEnvironment + ?Sized>(env: &mut E, n_half: u64) -> Result<usize> {
    let k = env.arm_count();
    if k == 0 {
        return Err(Error::InvalidArgument("environment has no arms".into()));
    }
    if k < 3 {
        let arms: Vec<usize> = (0..k).collect();
        if n_half < k as u64 {
            return Err(Error::InsufficientBudget(format!(
                "{n_half} pilots for {k} arms"
            )));
        }
        return Ok(round_robin_best(env, &arms, n_half));
    }
    if n_half < 3 {
        return Err(Error::InsufficientBudget(format!(
            "{n_half} pilots cannot cover the final batch"
        )));
    }

    let batches = num_batches(k)?;
    let sizes = schedule_sizes(n_half, batches)?;
    let (mut lo, mut hi) = (0usize, k - 1);
    let mut final_budget = *sizes.last().unwrap();

    for &batch_size in &sizes[..sizes.len() - 1] {
        let j = hi - lo + 1;
        if j <= 4 {
            // active set already small enough: donate the batch pilots
            final_budget += batch_size;
            continue;
        }
        let [a, b, c, d] = quartet_positions(j)?;
        let positions = [a, b, c, d];
        let per = batch_size / 4;
        // leftover pilots go to the probe at B
        let mut alloc = [per; 4];
        alloc[1] += batch_size % 4;

        let means: Vec<f64> = positions
            .iter()
            .zip(&alloc)
            .map(|(&pos, &pulls)| empirical_mean(env, lo + pos, pulls))
            .collect();

        let winner_pos = pick_winner(&positions, &means, b);
        let best = if winner_pos == a {
            QuartetMember::A
        } else if winner_pos == b {
            QuartetMember::B
        } else if winner_pos == c {
            QuartetMember::C
        } else {
            QuartetMember::D
        };
        let (new_lo, new_hi) = eliminate(j, best)?;
        hi = lo + new_hi;
        lo += new_lo;
    }

    // final batch over every survivor (three to five of them)
    let candidates: Vec<usize> = (lo..=hi).collect();
    let m = candidates.len() as u64;
    let per = final_budget / m;
    let mut alloc = vec![per; candidates.len()];
    alloc[(candidates.len() - 1) / 2] += final_budget % m;

    let mut best = candidates[0];
    let mut best_mean = f64::NEG_INFINITY;
    for (i, &arm) in candidates.iter().enumerate() {
        let mean = empirical_mean(env, arm, alloc[i]);
        if mean > best_mean {
            best_mean = mean;
            best = arm;
        }
    }
    Ok(best)
}

/// Runs a single-axis selection policy in two phases: phase 1 sweeps the
/// beta1 grid with beta2 frozen at `grid2.value(beta2_init)`, phase 2
/// sweeps the beta2 grid with beta1 frozen at the phase-1 pick. The budget
/// splits as `floor(n/2)` and `n - floor(n/2)`.
pub fn two_phase<E, F>(
    env: &mut E,
    grid1: &PhaseGrid,
    grid2: &PhaseGrid,
    n: u64,
    beta2_init: usize,
    mut select: F,
) -> Result<PolicyOutput>
where
    E: TwoAxisEnvironment + ?Sized,
    F: FnMut(&mut FrozenAxisEnv<'_, E>, u64) -> Result<usize>,
{
    if beta2_init >= grid2.len() {
        return Err(Error::InvalidArgument(format!(
            "beta2 init index {beta2_init} out of range for grid of {}",
            grid2.len()
        )));
    }
    let start = env.pulls_used();
    let phase1_budget = n / 2;
    let phase2_budget = n - phase1_budget;

    let k1 = {
        let mut view = FrozenAxisEnv::new(env, grid1, Axis::Beta1, grid2.value(beta2_init));
        select(&mut view, phase1_budget)?
    };
    let k2 = {
        let mut view = FrozenAxisEnv::new(env, grid2, Axis::Beta2, grid1.value(k1));
        select(&mut view, phase2_budget)?
    };
    Ok(PolicyOutput {
        k1,
        k2,
        pilots_used: env.pulls_used() - start,
    })
}

/// Two-phase batched elimination over both grids.
pub fn holobeam<E: TwoAxisEnvironment + ?Sized>(
    env: &mut E,
    grid1: &PhaseGrid,
    grid2: &PhaseGrid,
    n: u64,
    beta2_init: usize,
) -> Result<PolicyOutput> {
    two_phase(env, grid1, grid2, n, beta2_init, |view, budget| {
        beta_i_holobeam(view, budget)
    })
}

/// Fixed-budget sequential halving: `ceil(log2 K)` rounds, uniform pulls
/// per surviving arm, top half kept by empirical mean with lower-index
/// tie-break.
pub fn sequential_halving<E: ArmEnvironment + ?Sized>(env: &mut E, n_half: u64) -> Result<usize> {
    let k = env.arm_count();
    if k == 0 {
        return Err(Error::InvalidArgument("environment has no arms".into()));
    }
    if n_half == 0 {
        return Err(Error::InsufficientBudget("no pilots".into()));
    }
    if k == 1 {
        return Ok(0);
    }
    let rounds = (usize::BITS - (k - 1).leading_zeros()) as u64; // ceil(log2 k)
    let mut active: Vec<usize> = (0..k).collect();
    for _ in 0..rounds {
        if active.len() == 1 {
            break;
        }
        let per = n_half / (active.len() as u64 * rounds);
        let mut scored: Vec<(usize, f64)> = active
            .iter()
            .map(|&arm| (arm, empirical_mean(env, arm, per)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(active.len().div_ceil(2));
        active = scored.into_iter().map(|(arm, _)| arm).collect();
        active.sort_unstable();
    }
    Ok(active[0])
}

/// Uniform round-robin baseline: cycles pilots over all arms and returns
/// the empirical argmax (lower index on ties; arms left unsampled by a
/// small budget never win).
pub fn uniform_explore<E: ArmEnvironment + ?Sized>(env: &mut E, n_half: u64) -> Result<usize> {
    let k = env.arm_count();
    if k == 0 {
        return Err(Error::InvalidArgument("environment has no arms".into()));
    }
    if n_half == 0 {
        return Err(Error::InsufficientBudget("no pilots".into()));
    }
    let arms: Vec<usize> = (0..k).collect();
    Ok(round_robin_best(env, &arms, n_half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{HmtConfig, UserLocation};
    use crate::grid::discrete_optimum;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Deterministic environment: pulling arm k always returns means[k].
    struct FixedMeans {
        means: Vec<f64>,
        pulls: u64,
    }

    impl FixedMeans {
        fn new(means: Vec<f64>) -> Self {
            Self { means, pulls: 0 }
        }
    }

    impl ArmEnvironment for FixedMeans {
        fn arm_count(&self) -> usize {
            self.means.len()
        }
        fn pull(&mut self, k: usize) -> f64 {
            self.pulls += 1;
            self.means[k]
        }
        fn pulls_used(&self) -> u64 {
            self.pulls
        }
    }

    /// Gaussian arms around fixed means, for budget-accounting fuzz.
    struct NoisyMeans {
        means: Vec<f64>,
        sigma: f64,
        rng: ChaCha8Rng,
        pulls: u64,
    }

    impl ArmEnvironment for NoisyMeans {
        fn arm_count(&self) -> usize {
            self.means.len()
        }
        fn pull(&mut self, k: usize) -> f64 {
            self.pulls += 1;
            self.means[k] + self.sigma * self.rng.random::<f64>()
        }
        fn pulls_used(&self) -> u64 {
            self.pulls
        }
    }

    #[test]
    fn num_batches_examples() {
        assert_eq!(num_batches(3).unwrap(), 0);
        assert_eq!(num_batches(48).unwrap(), 7);
        assert_eq!(num_batches(201).unwrap(), 11);
        assert!(num_batches(2).is_err());
    }

    #[test]
    fn schedule_hand_cases() {
        let s = BatchSchedule::new(18, 2).unwrap();
        assert_eq!(s.sizes, vec![6, 6, 6]);
        let s = BatchSchedule::new(18, 3).unwrap();
        assert_eq!(s.sizes, vec![4, 4, 4, 6]);
        let s = BatchSchedule::new(40, 0).unwrap();
        assert_eq!(s.sizes, vec![40]);
    }

    #[test]
    fn schedule_minimum_budget() {
        assert!(BatchSchedule::new(15, 3).is_err());
        assert!(BatchSchedule::new(16, 3).is_ok());
    }

    #[test]
    fn schedule_sums_exactly() {
        for n_half in [48u64, 100, 250, 2500, 99_999] {
            for l in [0usize, 1, 2, 4, 7, 11] {
                let sizes = schedule_sizes(n_half, l).unwrap();
                assert_eq!(sizes.len(), l + 1);
                assert_eq!(sizes.iter().sum::<u64>(), n_half);
            }
        }
    }

    #[test]
    fn quartet_examples() {
        assert_eq!(quartet_positions(9).unwrap(), [0, 2, 5, 8]);
        assert_eq!(quartet_positions(3).unwrap(), [0, 0, 1, 2]);
        assert_eq!(quartet_positions(4).unwrap(), [0, 1, 1, 3]);
        assert_eq!(quartet_positions(201).unwrap(), [0, 66, 133, 200]);
        assert!(quartet_positions(2).is_err());
    }

    #[test]
    fn eliminate_cases() {
        assert_eq!(eliminate(9, QuartetMember::A).unwrap(), (0, 5));
        assert_eq!(eliminate(9, QuartetMember::B).unwrap(), (0, 5));
        assert_eq!(eliminate(9, QuartetMember::C).unwrap(), (2, 8));
        assert_eq!(eliminate(9, QuartetMember::D).unwrap(), (2, 8));
    }

    #[test]
    fn winner_tiebreak_prefers_b_then_lower() {
        // all equal: B wins
        assert_eq!(pick_winner(&[0, 2, 5, 8], &[1.0, 1.0, 1.0, 1.0], 2), 2);
        // A and D tie above B and C: A is closer to B
        assert_eq!(pick_winner(&[0, 2, 5, 8], &[2.0, 1.0, 1.0, 2.0], 2), 0);
        // unsampled arms never win
        assert_eq!(
            pick_winner(
                &[0, 2, 5, 8],
                &[f64::NEG_INFINITY, f64::NEG_INFINITY, 3.0, f64::NEG_INFINITY],
                2
            ),
            5
        );
    }

    #[test]
    fn three_arms_one_final_batch() {
        let mut env = FixedMeans::new(vec![1.0, 5.0, 2.0]);
        let pick = beta_i_holobeam(&mut env, 30).unwrap();
        assert_eq!(pick, 1);
        assert!(env.pulls_used() <= 30);
    }

    #[test]
    fn degenerate_two_arms_round_robin() {
        let mut env = FixedMeans::new(vec![1.0, 2.0]);
        assert_eq!(beta_i_holobeam(&mut env, 10).unwrap(), 1);
        assert_eq!(env.pulls_used(), 10);
    }

    #[test]
    fn noiseless_unimodal_profile_recovers_argmax() {
        // strictly unimodal means over 201 arms; budget large enough that
        // every batch samples every probe
        for peak in [0usize, 37, 100, 150, 200] {
            let means: Vec<f64> = (0..201)
                .map(|k| -((k as f64 - peak as f64).abs() + 2.0).ln())
                .collect();
            let mut env = FixedMeans::new(means);
            let pick = beta_i_holobeam(&mut env, 500).unwrap();
            assert_eq!(pick, peak, "peak at {peak}");
        }
    }

    #[test]
    fn budget_accounting_exact() {
        for (k, n_half) in [(201usize, 500u64), (48, 100), (12, 48), (3, 9), (21, 25)] {
            let means: Vec<f64> = (0..k).map(|i| i as f64).collect();
            let mut env = FixedMeans::new(means);
            beta_i_holobeam(&mut env, n_half).unwrap();
            assert!(env.pulls_used() <= n_half, "K={k} n={n_half}");
        }
    }

    #[test]
    fn insufficient_budget_errors() {
        let mut env = FixedMeans::new(vec![0.0; 10]);
        assert!(matches!(
            beta_i_holobeam(&mut env, 2),
            Err(Error::InsufficientBudget(_))
        ));
        assert!(matches!(
            sequential_halving(&mut env, 0),
            Err(Error::InsufficientBudget(_))
        ));
        assert!(matches!(
            uniform_explore(&mut env, 0),
            Err(Error::InsufficientBudget(_))
        ));
    }

    #[test]
    fn sequential_halving_noiseless() {
        let mut env = FixedMeans::new(vec![1.0, 2.0]);
        assert_eq!(sequential_halving(&mut env, 8).unwrap(), 1);

        let mut env = FixedMeans::new(vec![3.0, 9.0, 1.0, 7.0, 2.0, 8.0, 4.0, 6.0]);
        assert_eq!(sequential_halving(&mut env, 64).unwrap(), 1);
        assert!(env.pulls_used() <= 64);
    }

    #[test]
    fn uniform_explore_noiseless() {
        let mut env = FixedMeans::new(vec![0.1, 0.9, 0.5]);
        assert_eq!(uniform_explore(&mut env, 9).unwrap(), 1);
        assert_eq!(env.pulls_used(), 9);
        // budget below the arm count still returns a sampled arm
        let mut env = FixedMeans::new(vec![0.1, 0.9, 0.5]);
        assert_eq!(uniform_explore(&mut env, 2).unwrap(), 1);
    }

    #[test]
    fn holobeam_noiseless_recovers_discrete_optimum() {
        let mut cfg = HmtConfig::default();
        cfg.noise_power = 1e-300;
        let grid = PhaseGrid::build(cfg.kx()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..10 {
            let user = UserLocation::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .unwrap();
            let opt = discrete_optimum(&cfg, &user, &grid, &grid).unwrap();
            let mut env = RssEnvironment::new(cfg.clone(), user, 1000 + trial).unwrap();
            let out = holobeam(&mut env, &grid, &grid, 2000, grid.midpoint_index()).unwrap();
            assert_eq!((out.k1, out.k2), (opt.k1, opt.k2), "trial {trial}");
            assert!(out.pilots_used <= 2000);
        }
    }

    #[test]
    fn holobeam_deterministic_per_seed() {
        let cfg = HmtConfig::default();
        let user = UserLocation::new(0.123, -0.456).unwrap();
        let grid = PhaseGrid::build(cfg.kx()).unwrap();
        let run = |seed| {
            let mut env = RssEnvironment::new(cfg.clone(), user, seed).unwrap();
            holobeam(&mut env, &grid, &grid, 400, grid.midpoint_index()).unwrap()
        };
        assert_eq!(run(5), run(5));
        // pilots are fully spent and identical
        assert_eq!(run(5).pilots_used, run(5).pilots_used);
    }

    #[test]
    fn no_signal_limit_rarely_correct() {
        // noise 10^6 times the peak signal: selection is noise-driven
        let mut cfg = HmtConfig::default();
        cfg.noise_power = cfg.g() * 1e6;
        cfg.aperture_width = 0.1;
        cfg.aperture_length = 0.1;
        let grid = PhaseGrid::build(cfg.kx()).unwrap();
        let mut errors = 0;
        for trial in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + trial);
            let user = UserLocation::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .unwrap();
            let opt = discrete_optimum(&cfg, &user, &grid, &grid).unwrap();
            let mut env = RssEnvironment::new(cfg.clone(), user, 333 + trial).unwrap();
            let out = holobeam(&mut env, &grid, &grid, 200, grid.midpoint_index()).unwrap();
            if (out.k1, out.k2) != (opt.k1, opt.k2) {
                errors += 1;
            }
        }
        assert!(errors >= 180, "expected near-total failure, got {errors}/200");
    }

    proptest! {
        #[test]
        fn schedule_ideal_fraction_sums(n_half in 12u64..100_000, l in 1usize..20) {
            let sizes = schedule_sizes(n_half, l).unwrap();
            prop_assert_eq!(sizes.iter().sum::<u64>(), n_half);
            // elimination batches are floors, so the final batch absorbs
            // at most L fractional pilots beyond its ideal share (a half
            // for L = 1, a third otherwise)
            let final_ideal = if l == 1 { n_half as f64 / 2.0 } else { n_half as f64 / 3.0 };
            prop_assert!((*sizes.last().unwrap() as f64) >= final_ideal.floor());
            prop_assert!((*sizes.last().unwrap() as f64) <= final_ideal + l as f64 + 1.0);
        }

        #[test]
        fn elimination_drops_about_a_third(j in 6usize..600) {
            for best in [QuartetMember::A, QuartetMember::B, QuartetMember::C, QuartetMember::D] {
                let (lo, hi) = eliminate(j, best).unwrap();
                let survivors = hi - lo + 1;
                let removed = j - survivors;
                prop_assert!(removed >= j / 3 - 1, "j={j} removed={removed}");
                prop_assert!(removed <= j.div_ceil(3), "j={j} removed={removed}");
                // values strictly between B and C always survive
                let [_, b, c, _] = quartet_positions(j).unwrap();
                prop_assert!(lo <= b + 1 && hi >= c.saturating_sub(1));
            }
        }

        #[test]
        fn policies_never_exceed_budget(seed in 0u64..500, k in 3usize..60, n_half in 3u64..400) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let means: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            let mk = |s| NoisyMeans { means: means.clone(), sigma: 0.5, rng: ChaCha8Rng::seed_from_u64(s), pulls: 0 };

            let mut env = mk(seed);
            beta_i_holobeam(&mut env, n_half).unwrap();
            prop_assert!(env.pulls_used() <= n_half);

            let mut env = mk(seed + 1);
            sequential_halving(&mut env, n_half).unwrap();
            prop_assert!(env.pulls_used() <= n_half);

            let mut env = mk(seed + 2);
            uniform_explore(&mut env, n_half).unwrap();
            prop_assert!(env.pulls_used() <= n_half);
        }
    }
}
