//! Discretization of the phase-shift parameter range and the quantities
//! derived from it: the discrete optimum, neighbour gaps, and the
//! quantization loss relative to the continuous optimum.
//!
//! A grid with step `1/K_axis` places one sample in every side lobe of the
//! per-axis gain factor and two in the central lobe, which is what makes
//! the restricted mean-RSS profile unimodal and the elimination policy in
//! [`crate::bandit`] sound.

use crate::channel::{mean_rss, sinc, HmtConfig, UserLocation};
use crate::error::{Error, Result};

/// Which phase-shift parameter a restricted profile sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Beta1,
    Beta2,
}

// ---------------------------------------------------------------------------
// PhaseGrid
// ---------------------------------------------------------------------------

/// Uniform grid `value(k) = -1 + k * step` for `k = 0..count`.
///
/// The step is `1/K_axis` and the count `ceil(2 K_axis) + 1`, so the top
/// value may exceed +1 by less than one step when `2 K_axis` is not an
/// integer. Values are intentionally not clamped: the uniform step is what
/// the unimodality argument needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl PhaseGrid {
    /// Builds the grid for an aperture of `k_axis` wavelengths.
    pub fn build(k_axis: f64) -> Result<Self> {
        if !(k_axis.is_finite() && k_axis > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "axis ratio must be positive and finite, got {k_axis}"
            )));
        }
        let step = 1.0 / k_axis;
        let count = (2.0 * k_axis).ceil() as usize + 1;
        Ok(Self {
            start: -1.0,
            step,
            count,
        })
    }

    /// Grid value at 0-based index `k`.
    pub fn value(&self, k: usize) -> f64 {
        debug_assert!(k < self.count);
        self.start + k as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.value(k))
    }

    /// Index of the grid value closest to zero.
    pub fn midpoint_index(&self) -> usize {
        let k = (-self.start / self.step).round() as usize;
        k.min(self.count - 1)
    }

    /// Index of the grid value closest to `x`, ties toward the lower index.
    pub fn nearest_index(&self, x: f64) -> usize {
        let raw = (x - self.start) / self.step;
        let lo = raw.floor().clamp(0.0, (self.count - 1) as f64) as usize;
        let hi = (lo + 1).min(self.count - 1);
        if (x - self.value(lo)).abs() <= (x - self.value(hi)).abs() {
            lo
        } else {
            hi
        }
    }
}

// ---------------------------------------------------------------------------
// Discrete optimum and profiles
// ---------------------------------------------------------------------------

/// Best grid pair for a user, with the per-axis offsets from the continuous
/// optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOptimum {
    /// 0-based index into the beta1 grid.
    pub k1: usize,
    /// 0-based index into the beta2 grid.
    pub k2: usize,
    /// Mean RSS at the discrete optimum, in watts.
    pub mean_at_opt: f64,
    /// `|value(k1) - alpha1|`.
    pub eps1: f64,
    /// `|value(k2) - alpha2|`.
    pub eps2: f64,
}

fn axis_factor_sq(k_axis: f64, alpha: f64, beta: f64) -> f64 {
    let s = sinc(k_axis * std::f64::consts::PI * (alpha - beta).abs());
    s * s
}

fn axis_argmax(k_axis: f64, alpha: f64, grid: &PhaseGrid) -> usize {
    let mut best = 0;
    let mut best_val = axis_factor_sq(k_axis, alpha, grid.value(0));
    for k in 1..grid.len() {
        let v = axis_factor_sq(k_axis, alpha, grid.value(k));
        if v > best_val {
            best = k;
            best_val = v;
        }
    }
    best
}

/// Argmax of the mean RSS over the product grid. The mean is separable, so
/// this reduces to one argmax per axis; ties break toward the lower index.
pub fn discrete_optimum(
    cfg: &HmtConfig,
    user: &UserLocation,
    grid1: &PhaseGrid,
    grid2: &PhaseGrid,
) -> Result<DiscreteOptimum> {
    cfg.validate()?;
    let k1 = axis_argmax(cfg.kx(), user.alpha1, grid1);
    let k2 = axis_argmax(cfg.ky(), user.alpha2, grid2);
    Ok(DiscreteOptimum {
        k1,
        k2,
        mean_at_opt: mean_rss(cfg, user, grid1.value(k1), grid2.value(k2)),
        eps1: (grid1.value(k1) - user.alpha1).abs(),
        eps2: (grid2.value(k2) - user.alpha2).abs(),
    })
}

/// Mean RSS along one grid with the other axis frozen, in grid order.
pub fn restricted_mean_profile(
    cfg: &HmtConfig,
    user: &UserLocation,
    grid: &PhaseGrid,
    axis: Axis,
    frozen_other: f64,
) -> Vec<f64> {
    grid.values()
        .map(|beta| match axis {
            Axis::Beta1 => mean_rss(cfg, user, beta, frozen_other),
            Axis::Beta2 => mean_rss(cfg, user, frozen_other, beta),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Gaps and quantization loss
// ---------------------------------------------------------------------------

/// Minimum neighbour gap of a profile. `degenerate` flags an exactly-zero
/// gap (constant profile), which the error bound excludes but the simulator
/// must tolerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborGap {
    pub gap: f64,
    pub degenerate: bool,
}

/// Minimum over interior neighbour pairs of `|mu(k) - mu(k-1)|`; the pair
/// ending at the last grid point is excluded.
pub fn min_neighbor_gap(profile: &[f64]) -> Result<NeighborGap> {
    if profile.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "profile needs at least 3 points, got {}",
            profile.len()
        )));
    }
    let gap = (1..=profile.len() - 2)
        .map(|k| (profile[k] - profile[k - 1]).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(NeighborGap {
        gap,
        degenerate: gap == 0.0,
    })
}

/// Mean-RSS loss of the discrete optimum relative to perfect alignment:
/// `G (1 - |sinc(Kx pi eps1) sinc(Ky pi eps2)|^2)`, in watts.
pub fn quantization_loss(cfg: &HmtConfig, _user: &UserLocation, opt: &DiscreteOptimum) -> f64 {
    let s1 = sinc(cfg.kx() * std::f64::consts::PI * opt.eps1);
    let s2 = sinc(cfg.ky() * std::f64::consts::PI * opt.eps2);
    cfg.g() * (1.0 - (s1 * s2).powi(2))
}

/// Worst-case quantization loss `G (1 - (2/pi)^4)` from the half-step
/// offsets `eps_i = 1/(2 K_i)`.
pub fn quantization_loss_bound(cfg: &HmtConfig) -> f64 {
    cfg.g() * (1.0 - (2.0 / std::f64::consts::PI).powi(4))
}
