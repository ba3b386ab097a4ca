//! Shared oracles for the integration suites: distribution functions,
//! Kolmogorov-Smirnov distances, a single-peak checker, and an independent
//! transcription of the batched elimination policy. Everything here is
//! deliberately written from the definitions, not by calling the library
//! paths it is used to check.

use holobeam::bandit::ArmEnvironment;
use statrs::function::gamma::{gamma_lr, ln_gamma};

/// CDF of the non-central chi-squared law with `nu` degrees of freedom and
/// non-centrality `q`, via the Poisson mixture of central chi-squared CDFs
/// (weights kept in log space).
pub fn noncentral_chi2_cdf(nu: f64, q: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if q <= 0.0 {
        return gamma_lr(nu / 2.0, x / 2.0);
    }
    let half_q = q / 2.0;
    let j_max = (half_q + 14.0 * half_q.sqrt() + 60.0).ceil() as i64;
    let mut acc = 0.0;
    for j in 0..=j_max {
        let jf = j as f64;
        let ln_w = -half_q + jf * half_q.ln() - ln_gamma(jf + 1.0);
        if ln_w < -45.0 {
            // negligible weight; past the mode we are done
            if jf > half_q {
                break;
            }
            continue;
        }
        acc += ln_w.exp() * gamma_lr(nu / 2.0 + jf, x / 2.0);
    }
    acc.min(1.0)
}

/// One-sample Kolmogorov-Smirnov distance against an analytic CDF.
pub fn ks_distance_one_sample<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_distance_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Strict single-peak test: one global maximum (or an exact-tie plateau of
/// two adjacent points), strictly increasing before it and strictly
/// decreasing after it.
pub fn is_single_peaked(values: &[f64]) -> bool {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let peaks: Vec<usize> = (0..values.len()).filter(|&i| values[i] == max).collect();
    let (first, last) = match peaks.as_slice() {
        [one] => (*one, *one),
        [a, b] if *b == *a + 1 => (*a, *b),
        _ => return false,
    };
    values[..=first].windows(2).all(|w| w[0] < w[1])
        && values[last..].windows(2).all(|w| w[0] > w[1])
}

/// Independent transcription of the per-axis elimination policy, used to
/// cross-check selection-error rates. Same conventions, separate code: the
/// active set is an explicit index list, batch fractions are computed in
/// floating point, and pulls are tallied per arm.
pub fn algo2_reference<E: ArmEnvironment + ?Sized>(env: &mut E, budget: u64) -> usize {
    let k = env.arm_count();
    assert!(k >= 3, "reference covers the elimination path only");

    let batches = if k == 3 {
        0
    } else {
        ((k as f64 / 3.0).log2() / 1.5f64.log2()).ceil() as usize
    };
    // ideal fractions 2^(L-2)/3^(L-1) twice, then 2^(L-l+1)/3^(L-l+2)
    let mut sizes: Vec<u64> = Vec::new();
    let mut spent = 0u64;
    for batch in 1..=batches {
        let frac = if batch <= 2 {
            2f64.powi(batches as i32 - 2) / 3f64.powi(batches as i32 - 1)
        } else {
            2f64.powi(batches as i32 - batch as i32 + 1)
                / 3f64.powi(batches as i32 - batch as i32 + 2)
        };
        let size = (frac * budget as f64).floor() as u64;
        sizes.push(size);
        spent += size;
    }
    let mut final_budget = budget - spent;

    let mut active: Vec<usize> = (0..k).collect();
    for &size in &sizes {
        let j = active.len();
        if j <= 4 {
            final_budget += size;
            continue;
        }
        let b_pos = j.div_ceil(3) - 1;
        let c_pos = 2 * j / 3 - 1;
        let probes = [0, b_pos, c_pos, j - 1];
        let mut pulls = [size / 4; 4];
        pulls[1] += size % 4;
        let mut means = [f64::NEG_INFINITY; 4];
        for (slot, (&pos, &count)) in probes.iter().zip(&pulls).enumerate() {
            if count == 0 {
                continue;
            }
            let mut sum = 0.0;
            for _ in 0..count {
                sum += env.pull(active[pos]);
            }
            means[slot] = sum / count as f64;
        }
        // winner: highest mean, ties toward B then the lower position
        let priority = {
            let mut order = [0usize, 1, 2, 3];
            order.sort_by_key(|&s| (probes[s].abs_diff(b_pos), probes[s]));
            order
        };
        let mut winner = priority[0];
        for &s in &priority[1..] {
            if means[s] > means[winner] {
                winner = s;
            }
        }
        if winner <= 1 {
            active.truncate(c_pos + 1);
        } else {
            active.drain(..b_pos);
        }
    }

    let m = active.len() as u64;
    let mut pulls = vec![final_budget / m; active.len()];
    pulls[(active.len() - 1) / 2] += final_budget % m;
    let mut best = active[0];
    let mut best_mean = f64::NEG_INFINITY;
    for (i, &arm) in active.iter().enumerate() {
        if pulls[i] == 0 {
            continue;
        }
        let mut sum = 0.0;
        for _ in 0..pulls[i] {
            sum += env.pull(arm);
        }
        let mean = sum / pulls[i] as f64;
        if mean > best_mean {
            best_mean = mean;
            best = arm;
        }
    }
    best
}
