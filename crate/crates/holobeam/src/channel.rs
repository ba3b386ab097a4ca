//! Far-field channel between a holographic metasurface transceiver (HMT)
//! and a single user, plus the received-signal-strength (RSS) sampler.
//!
//! The channel magnitude is separable in the two phase-shift parameters:
//! a fixed aperture prefactor times one sinc factor per axis. Everything
//! downstream (grids, bandit policies, bounds) is driven by the three
//! operations here: deterministic gain, mean RSS, and noisy RSS samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// sin(x)/x with a series fallback near zero so the peak does not suffer
/// catastrophic cancellation.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

// ---------------------------------------------------------------------------
// Configuration and domain types
// ---------------------------------------------------------------------------

/// Physical parameters of the HMT link. All quantities are SI (meters,
/// watts); dBm conversion happens at config ingestion, not here.
#[derive(Debug, Clone, PartialEq)]
pub struct HmtConfig {
    /// Aperture width in meters.
    pub aperture_width: f64,
    /// Aperture length in meters.
    pub aperture_length: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Spacing between neighbouring phase-shift elements in meters.
    pub element_pitch: f64,
    /// Radiation factor of each element (dimensionless).
    pub radiation_factor: f64,
    /// HMT-user distance in meters.
    pub distance: f64,
    /// Pilot transmit power in watts.
    pub pilot_power: f64,
    /// Complex noise power at the receiver in watts.
    pub noise_power: f64,
    /// Transmit power used for data-rate computation, in watts.
    pub data_power: f64,
}

impl Default for HmtConfig {
    /// 30 GHz link: 1 m x 1 m aperture, quarter-wavelength pitch,
    /// 800 m range, 20 dBm pilots, -115 dBm noise.
    fn default() -> Self {
        let pilot = 0.1;
        Self {
            aperture_width: 1.0,
            aperture_length: 1.0,
            wavelength: 0.01,
            element_pitch: 0.0025,
            radiation_factor: 0.4,
            distance: 800.0,
            pilot_power: pilot,
            noise_power: 10f64.powf(-11.5) * 1e-3,
            data_power: pilot,
        }
    }
}

impl HmtConfig {
    /// Checks positivity of every field and the sub-wavelength pitch
    /// requirement.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("aperture_width", self.aperture_width),
            ("aperture_length", self.aperture_length),
            ("wavelength", self.wavelength),
            ("element_pitch", self.element_pitch),
            ("radiation_factor", self.radiation_factor),
            ("distance", self.distance),
            ("pilot_power", self.pilot_power),
            ("noise_power", self.noise_power),
            ("data_power", self.data_power),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.element_pitch > self.wavelength {
            return Err(Error::InvalidConfig(format!(
                "element_pitch {} exceeds wavelength {}",
                self.element_pitch, self.wavelength
            )));
        }
        Ok(())
    }

    /// Aperture width in wavelengths.
    pub fn kx(&self) -> f64 {
        self.aperture_width / self.wavelength
    }

    /// Aperture length in wavelengths.
    pub fn ky(&self) -> f64 {
        self.aperture_length / self.wavelength
    }

    /// Gain amplitude at perfect alignment: sqrt(F) * lambda * Lx * Ly / (4 pi d0).
    pub fn peak_gain(&self) -> f64 {
        self.radiation_factor.sqrt() * self.wavelength * self.aperture_width
            * self.aperture_length
            / (4.0 * std::f64::consts::PI * self.distance)
    }

    /// Peak received pilot power `G = P * peak_gain^2` in watts.
    pub fn g(&self) -> f64 {
        let h = self.peak_gain();
        self.pilot_power * h * h
    }
}

/// Direction parameters of the (unknown) user location.
///
/// `alpha1 = sin(theta) cos(phi)` and `alpha2 = sin(theta) sin(phi)`, so
/// both lie in [-1, 1]; the channel depends on the location only through
/// this pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLocation {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl UserLocation {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1.is_finite() && alpha2.is_finite() && alpha1.abs() <= 1.0 && alpha2.abs() <= 1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "direction parameters must lie in [-1, 1], got ({alpha1}, {alpha2})"
            )));
        }
        Ok(Self { alpha1, alpha2 })
    }
}

/// One noisy RSS observation (a squared magnitude, hence non-negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RssSample(f64);

impl RssSample {
    pub fn value(self) -> f64 {
        self.0
    }
}

// ---------------------------------------------------------------------------
// Channel operations
// ---------------------------------------------------------------------------

/// Magnitude of the far-field channel at phase-shift parameters
/// `(beta1, beta2)`:
///
/// ```text
/// |H| = (sqrt(F) lambda / (4 pi d0)) Lx Ly
///       * |sinc(Kx pi (alpha1 - beta1)) sinc(Ky pi (alpha2 - beta2))|
/// ```
///
/// Pure and deterministic; `beta` values outside [-1, 1] are allowed.
pub fn far_field_gain_magnitude(
    cfg: &HmtConfig,
    user: &UserLocation,
    beta1: f64,
    beta2: f64,
) -> f64 {
    let s1 = sinc(cfg.kx() * std::f64::consts::PI * (user.alpha1 - beta1));
    let s2 = sinc(cfg.ky() * std::f64::consts::PI * (user.alpha2 - beta2));
    cfg.peak_gain() * (s1 * s2).abs()
}

/// Mean RSS `P |H|^2 + sigma^2` in watts.
pub fn mean_rss(cfg: &HmtConfig, user: &UserLocation, beta1: f64, beta2: f64) -> f64 {
    let h = far_field_gain_magnitude(cfg, user, beta1, beta2);
    cfg.pilot_power * h * h + cfg.noise_power
}

/// Achievable data rate in bit/s/Hz when `n_pilots` of the `total_slots`
/// block were spent on estimation:
///
/// ```text
/// R = (T_D / T) log2(1 + P_tx |H|^2 / sigma^2),  T_D = T - n_pilots
/// ```
pub fn achievable_rate(
    cfg: &HmtConfig,
    beta1: f64,
    beta2: f64,
    user: &UserLocation,
    n_pilots: u64,
    total_slots: u64,
) -> Result<f64> {
    if n_pilots > total_slots {
        return Err(Error::InvalidBudget {
            n_pilots,
            total_slots,
        });
    }
    let h = far_field_gain_magnitude(cfg, user, beta1, beta2);
    let snr = cfg.data_power * h * h / cfg.noise_power;
    let data_fraction = (total_slots - n_pilots) as f64 / total_slots as f64;
    Ok(data_fraction * (1.0 + snr).log2())
}

// ---------------------------------------------------------------------------
// Noisy sampler
// ---------------------------------------------------------------------------

/// Stateful RSS sampler: one seeded RNG stream plus pilot accounting.
///
/// Each sample observes `|sqrt(P) H + zeta|^2` where `zeta` is complex AWGN
/// with total variance `sigma^2` (independent real/imaginary components of
/// variance `sigma^2 / 2`). Consequently `(2 / sigma^2) r` follows a
/// non-central chi-squared law with 2 degrees of freedom and non-centrality
/// `q = 2 P |H|^2 / sigma^2`.
///
/// Single-owner mutable state: move it between threads, do not share it.
#[derive(Debug, Clone)]
pub struct RssEnvironment {
    cfg: HmtConfig,
    user: UserLocation,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    pilots_used: u64,
    budget: Option<u64>,
}

impl RssEnvironment {
    /// Builds a sampler with its own RNG stream. Fails if the config is
    /// invalid.
    pub fn new(cfg: HmtConfig, user: UserLocation, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let noise = Normal::new(0.0, (cfg.noise_power / 2.0).sqrt())
            .map_err(|e| Error::InvalidConfig(format!("noise distribution: {e}")))?;
        Ok(Self {
            cfg,
            user,
            rng: ChaCha8Rng::seed_from_u64(seed),
            noise,
            pilots_used: 0,
            budget: None,
        })
    }

    /// Enables hard budget tracking: sampling past `budget` pilots errors.
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn config(&self) -> &HmtConfig {
        &self.cfg
    }

    pub fn user(&self) -> &UserLocation {
        &self.user
    }

    /// Pilots consumed so far.
    pub fn pilots_used(&self) -> u64 {
        self.pilots_used
    }

    /// Draws one noisy RSS observation at `(beta1, beta2)` and advances the
    /// pilot counter.
    pub fn sample_rss(&mut self, beta1: f64, beta2: f64) -> Result<RssSample> {
        if let Some(budget) = self.budget {
            if self.pilots_used >= budget {
                return Err(Error::BudgetExhausted {
                    used: self.pilots_used,
                    budget,
                });
            }
        }
        let h = far_field_gain_magnitude(&self.cfg, &self.user, beta1, beta2);
        let signal = self.cfg.pilot_power.sqrt() * h;
        let re = signal + self.noise.sample(&mut self.rng);
        let im = self.noise.sample(&mut self.rng);
        self.pilots_used += 1;
        Ok(RssSample(re * re + im * im))
    }
}
