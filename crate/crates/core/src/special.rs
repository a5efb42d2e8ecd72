//! Normal distribution helpers and log-space combinatorics.

use std::f64::consts::FRAC_1_SQRT_2;

use statrs::function::{erf, gamma};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF.
#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// `ln Phi(z)`, accurate in the far lower tail where `Phi` underflows.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z > -30.0 {
        norm_cdf(z).ln()
    } else {
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - LN_SQRT_2PI - (-z).ln() + series.ln()
    }
}

/// Standard normal quantile.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
    // One Newton step against the accurate CDF.
    let d = norm_pdf(x);
    if d > 0.0 {
        x - (norm_cdf(x) - p) / d
    } else {
        x
    }
}

#[inline]
pub fn ln_factorial(k: u64) -> f64 {
    gamma::ln_gamma(k as f64 + 1.0)
}

#[inline]
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn log1p_exp(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else if x < -35.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cdf_reference_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert_abs_diff_eq!(norm_cdf(-1.0), 0.158_655_253_931_457_05, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(1.959_963_984_540_054), 0.975, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(-8.0), 6.220_960_574_271_785e-16, epsilon = 1e-28);
    }

    #[test]
    fn quantile_inverts_cdf() {
        assert_abs_diff_eq!(norm_quantile(0.975), 1.959_963_984_540_054, epsilon = 1e-12);
        for p in [1e-10, 0.01, 0.3, 0.5, 0.6, 0.99] {
            assert_abs_diff_eq!(norm_cdf(norm_quantile(p)), p, epsilon = 1e-14 + 1e-12 * p);
        }
    }

    #[test]
    fn log_cdf_tail_is_continuous() {
        let a = norm_cdf(-29.999_999).ln();
        let b = ln_norm_cdf(-30.000_001);
        assert!((a - b).abs() < 1e-4);
        assert!(ln_norm_cdf(-100.0).is_finite());
    }

    #[test]
    fn combinatorics() {
        assert_abs_diff_eq!(ln_choose(10, 3), 120f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(log_sum_exp(&[0.0, 0.0]), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(expit(-800.0), 0.0);
        assert_abs_diff_eq!(log1p_exp(1000.0), 1000.0);
    }
}
