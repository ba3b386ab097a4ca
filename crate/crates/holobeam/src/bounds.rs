//! Analytic error-probability bound for the two-phase elimination policy
//! and the non-central chi-squared machinery behind it.
//!
//! The bound can be astronomically loose at realistic link budgets (the
//! exponents scale with the squared minimum neighbour gap), so every
//! exponential is evaluated in log space and quantities below 1e-300 are
//! reported as zero with an underflow flag rather than silently denormal.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Everything the error bound depends on. Gaps and powers are in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Total pilot budget. Real-valued so analysis sweeps can exceed u64.
    pub n: f64,
    /// Grid sizes per axis.
    pub k1: usize,
    pub k2: usize,
    /// Minimum neighbour gaps of the per-axis mean-RSS profiles.
    pub delta1: f64,
    pub delta2: f64,
    /// Noise power.
    pub sigma2: f64,
    /// Peak received pilot power.
    pub g: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n", self.n),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("sigma2", self.sigma2),
            ("g", self.g),
        ] {
            if !(v.is_finite() && v > 0.0) {
                if (name == "delta1" || name == "delta2") && v == 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "degenerate gap: {name} is zero, the bound requires a positive gap"
                    )));
                }
                return Err(Error::InvalidArgument(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        if self.k1 == 0 || self.k2 == 0 {
            return Err(Error::InvalidArgument("grid sizes must be positive".into()));
        }
        if self.n <= (self.k1 + self.k2) as f64 {
            return Err(Error::InvalidArgument(format!(
                "bound requires n > K1 + K2 = {}, got n = {}",
                self.k1 + self.k2,
                self.n
            )));
        }
        Ok(())
    }
}

/// One axis' contribution to the bound, before the overall factor of 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisTerms {
    /// Real-valued batch count `log2(K/3) / log2(3/2)`.
    pub batches_real: f64,
    /// `(L - 1) exp(-n D^2 / denom)`.
    pub elimination: f64,
    /// `2 exp(-n K D^2 / denom)`.
    pub final_batch: f64,
}

/// Evaluated error bound with its per-axis breakdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    /// May exceed 1, in which case it is vacuous.
    pub value: f64,
    pub axis1: AxisTerms,
    pub axis2: AxisTerms,
    /// Set when any nonzero term fell below 1e-300 and was reported as 0.
    pub underflow: bool,
}

const LN_FLOOR: f64 = -690.77; // ln(1e-300)

fn scaled_exp(coef: f64, exponent: f64, underflow: &mut bool) -> f64 {
    if coef == 0.0 {
        return 0.0;
    }
    let ln = coef.abs().ln() - exponent;
    if ln < LN_FLOOR {
        *underflow = true;
        return 0.0;
    }
    coef.signum() * ln.exp()
}

/// Upper bound on the probability that the two-phase policy misses the
/// discrete optimum on either axis:
///
/// ```text
/// 4 sum_i [ (L_i - 1) exp(-n D_i^2 / c) + 2 exp(-n K_i D_i^2 / c) ]
/// c = 1296 sigma^4 (1 + 3 G / sigma^2)^4
/// ```
///
/// with the real-valued `L_i` (the runtime schedule ceils it; the printed
/// bound does not).
pub fn holobeam_error_bound(b: &BoundInputs) -> Result<ErrorBound> {
    b.validate()?;
    let ln_denom =
        1296f64.ln() + 2.0 * b.sigma2.ln() + 4.0 * (1.0 + 3.0 * b.g / b.sigma2).ln();
    let mut underflow = false;
    let mut axis = |k: usize, delta: f64| -> AxisTerms {
        let batches_real = (k as f64 / 3.0).log2() / 1.5f64.log2();
        let ln_e = b.n.ln() + 2.0 * delta.ln() - ln_denom;
        let e = ln_e.exp();
        let ln_e_final = ln_e + (k as f64).ln();
        let e_final = ln_e_final.exp();
        AxisTerms {
            batches_real,
            elimination: scaled_exp(batches_real - 1.0, e, &mut underflow),
            final_batch: scaled_exp(2.0, e_final, &mut underflow),
        }
    };
    let axis1 = axis(b.k1, b.delta1);
    let axis2 = axis(b.k2, b.delta2);
    let value = 4.0
        * (axis1.elimination + axis1.final_batch + axis2.elimination + axis2.final_batch);
    Ok(ErrorBound {
        value,
        axis1,
        axis2,
        underflow,
    })
}

/// Tail bound on one non-central chi-squared variable exceeding another
/// with a larger non-centrality: for independent `X ~ chi2_nu(q1)` and
/// `Y ~ chi2_nu(q2)` with `q1 < q2`,
///
/// ```text
/// Pr(X > Y) <= 2 exp( -nu (nu+q1)^2 (q2-q1)^2
///                     / (4 (nu+2 q2)^2 (2 nu + q1 + q2)^2) )
/// ```
pub fn chi2_dominance_bound(nu: f64, q1: f64, q2: f64) -> Result<f64> {
    if !(nu > 0.0 && q1 > 0.0 && q2 > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "nu, q1, q2 must be positive, got ({nu}, {q1}, {q2})"
        )));
    }
    if q1 >= q2 {
        return Err(Error::InvalidArgument(format!(
            "bound requires q1 < q2, got q1 = {q1}, q2 = {q2}"
        )));
    }
    let num = nu * (nu + q1).powi(2) * (q2 - q1).powi(2);
    let den = 4.0 * (nu + 2.0 * q2).powi(2) * (2.0 * nu + q1 + q2).powi(2);
    Ok(2.0 * (-num / den).exp())
}

/// One draw of a non-central chi-squared variable with even degrees of
/// freedom, built as `nu/2` squared magnitudes of complex unit Gaussians
/// with the mean offset `sqrt(q)` carried on one real component. Mean
/// `nu + q`, variance `2 (nu + 2 q)`.
pub fn noncentral_chi2_sample<R: Rng + ?Sized>(rng: &mut R, nu: u32, q: f64) -> Result<f64> {
    if nu < 2 || nu % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "degrees of freedom must be even and >= 2, got {nu}"
        )));
    }
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "non-centrality must be non-negative, got {q}"
        )));
    }
    let offset = q.sqrt();
    let mut sum = 0.0;
    for i in 0..nu / 2 {
        let mut re: f64 = StandardNormal.sample(rng);
        if i == 0 {
            re += offset;
        }
        let im: f64 = StandardNormal.sample(rng);
        sum += re * re + im * im;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moderate_inputs() -> BoundInputs {
        BoundInputs {
            n: 1e4,
            k1: 48,
            k2: 12,
            delta1: 0.2,
            delta2: 0.3,
            sigma2: 1.0,
            g: 5.0,
        }
    }

    #[test]
    fn bound_validation() {
        let mut b = moderate_inputs();
        assert!(holobeam_error_bound(&b).is_ok());
        b.n = 40.0; // <= K1 + K2
        assert!(holobeam_error_bound(&b).is_err());
        let mut b = moderate_inputs();
        b.delta1 = 0.0;
        let err = holobeam_error_bound(&b).unwrap_err();
        assert!(err.to_string().contains("degenerate gap"));
    }

    #[test]
    fn bound_vacuous_limit_small_gap() {
        // exponentials go to 1, leaving 4 * sum_i (L_i - 1 + 2)
        let b = BoundInputs {
            n: 500.0,
            k1: 201,
            k2: 201,
            delta1: 1e-30,
            delta2: 1e-30,
            sigma2: 1.0,
            g: 1.0,
        };
        let out = holobeam_error_bound(&b).unwrap();
        let l_real = (201f64 / 3.0).log2() / 1.5f64.log2();
        assert_relative_eq!(out.value, 8.0 * (l_real + 1.0), max_relative = 1e-9);
        assert!(out.value > 1.0);
    }

    #[test]
    fn bound_decreasing_in_n_and_gap_increasing_in_g() {
        let b = moderate_inputs();
        let eval = |b: &BoundInputs| holobeam_error_bound(b).unwrap().value;
        for scale in [2.0, 10.0, 100.0] {
            let mut up = b;
            up.n *= scale;
            assert!(eval(&up) < eval(&b), "n scale {scale}");
            let mut wider = b;
            wider.delta1 *= scale;
            assert!(eval(&wider) < eval(&b), "delta scale {scale}");
            let mut louder = b;
            louder.g *= scale;
            assert!(eval(&louder) > eval(&b), "g scale {scale}");
        }
        // n -> infinity drives the bound to zero
        let mut far = b;
        far.n = 1e12;
        assert!(eval(&far) < 1e-12);
    }

    #[test]
    fn bound_underflow_reported() {
        let mut b = moderate_inputs();
        b.n = 1e300;
        let out = holobeam_error_bound(&b).unwrap();
        assert_eq!(out.value, 0.0);
        assert!(out.underflow);
    }

    #[test]
    fn chi2_bound_hand_value() {
        // nu=2, q1=1, q2=3: 2 exp(-2*9*4 / (4*64*64)) = 2 exp(-72/16384)
        let v = chi2_dominance_bound(2.0, 1.0, 3.0).unwrap();
        assert_relative_eq!(v, 2.0 * (-72.0 / 16384.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(v, 1.991230, max_relative = 1e-6);
    }

    #[test]
    fn chi2_bound_vacuous_and_invalid() {
        let v = chi2_dominance_bound(4.0, 2.0, 2.0 + 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        assert!(chi2_dominance_bound(4.0, 3.0, 2.0).is_err());
        assert!(chi2_dominance_bound(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn sampler_central_case_is_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| noncentral_chi2_sample(&mut rng, 2, 0.0).unwrap())
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(mean, 2.0, max_relative = 0.02);
    }

    #[test]
    fn sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (nu, q) = (8u32, 6.5);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let x = noncentral_chi2_sample(&mut rng, nu, q).unwrap();
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert_relative_eq!(mean, nu as f64 + q, max_relative = 0.02);
        assert_relative_eq!(var, 2.0 * (nu as f64 + 2.0 * q), max_relative = 0.03);
    }

    #[test]
    fn sampler_invalid_args() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(noncentral_chi2_sample(&mut rng, 3, 1.0).is_err());
        assert!(noncentral_chi2_sample(&mut rng, 0, 1.0).is_err());
        assert!(noncentral_chi2_sample(&mut rng, 2, -1.0).is_err());
    }
}
