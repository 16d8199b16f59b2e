//! Exact kernels of the ohmic nondemolition bath.
//!
//! The bath modes are integrated out analytically; what remains are scalar
//! functions of the elapsed time `t`:
//!
//! ```text
//! s(t)      = 2η φ'² [ t·atan(ω_c t) − ln(1 + ω_c² t²) / (2ω_c) ]
//! drift(t)  = η φ' atan(ω_c t)                       (times φ = p)
//! A¹_mn(t)  = η ħ (m² − n²) atan(ω_c t)
//! A²_mn(t)  = η ħ (m − n)² [ ½ ln(1 + ω_c² t²) + Σ_{k≥1} ln(1 + (ω_c t / (1 + kβω_c))²) ]
//! ```
//!
//! The classical coarse-graining Gaussian has variance s(t)/β.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::BathParams;

/// exp(−A²) is set to exactly zero above this exponent.
pub const DECAY_CLAMP: f64 = 700.0;
/// Hard cap on explicitly summed product terms.
pub const MAX_PRODUCT_TERMS: u64 = 100_000_000;

/// s(t), the variance scale of the classical bath smearing.
pub fn s_variance(t: f64, bath: &BathParams) -> f64 {
    if bath.eta == 0.0 || t <= 0.0 {
        return 0.0;
    }
    let x = bath.omega_c * t;
    let bracket = if x < 0.1 {
        // t·atan(x) − ln(1+x²)/(2ω_c) = (1/ω_c) Σ (−1)^{k+1} x^{2k} / ((2k−1)2k)
        let x2 = x * x;
        let mut term = x2;
        let mut sum = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            let c = term / ((2.0 * kf - 1.0) * 2.0 * kf);
            sum += if k % 2 == 1 { c } else { -c };
            if c < 1e-18 * sum.abs() {
                break;
            }
            term *= x2;
        }
        sum / bath.omega_c
    } else {
        t * x.atan() - (x * x).ln_1p() / (2.0 * bath.omega_c)
    };
    2.0 * bath.eta * bath.phi_prime * bath.phi_prime * bracket
}

/// η φ' atan(ω_c t); the q-drift is this times φ(p) = p.
pub fn drift_factor(t: f64, bath: &BathParams) -> f64 {
    bath.eta * bath.phi_prime * (bath.omega_c * t).atan()
}

pub fn dephasing_a1(m: i64, n: i64, t: f64, hbar: f64, bath: &BathParams) -> f64 {
    let d2 = (m * m - n * n) as f64;
    bath.eta * hbar * d2 * (bath.omega_c * t).atan()
}

pub fn dephasing_a2(
    m: i64,
    n: i64,
    t: f64,
    hbar: f64,
    bath: &BathParams,
    product_tol: f64,
) -> Result<f64> {
    let d = (m - n) as f64;
    Ok(a2_coefficient(t, hbar, bath, product_tol)? * d * d)
}

/// Coefficient of (m − n)² in A².
pub fn a2_coefficient(t: f64, hbar: f64, bath: &BathParams, product_tol: f64) -> Result<f64> {
    if bath.eta == 0.0 || t <= 0.0 {
        return Ok(0.0);
    }
    let x = bath.omega_c * t;
    let product = log_thermal_product(t, bath, product_tol)?;
    Ok(bath.eta * hbar * (0.5 * (x * x).ln_1p() + product.value))
}

/// `ln Π_{k≥1} (1 + (ω_c t / (1 + kβω_c))²)` and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProduct {
    pub value: f64,
    /// Terms summed explicitly.
    pub terms: u64,
    /// Analytic remainder added for k > `terms`.
    pub tail: f64,
    /// Upper bound (t/β)²/k* on the neglected remainder.
    pub tail_bound: f64,
}

/// Sums log-factors until one falls below `tol` relative to the running sum,
/// then adds the remainder as the midpoint integral
/// `∫_{k*+½}^∞ ln(1 + x²/(1+ck)²) dk = [2x·atan(x/U) − U ln(1 + x²/U²)] / c`
/// with x = ω_c t, c = βω_c, U = 1 + c(k* + ½).
pub fn log_thermal_product(t: f64, bath: &BathParams, tol: f64) -> Result<LogProduct> {
    let x = bath.omega_c * t;
    let c = bath.beta * bath.omega_c;
    if x == 0.0 {
        return Ok(LogProduct {
            value: 0.0,
            terms: 0,
            tail: 0.0,
            tail_bound: 0.0,
        });
    }
    let mut sum = 0.0;
    let mut k: u64 = 0;
    loop {
        k += 1;
        if k > MAX_PRODUCT_TERMS {
            return Err(Error::ProductNonConvergence {
                max_terms: MAX_PRODUCT_TERMS,
            });
        }
        let r = x / (1.0 + k as f64 * c);
        let term = (r * r).ln_1p();
        sum += term;
        if term < tol * sum {
            break;
        }
    }
    let u = 1.0 + c * (k as f64 + 0.5);
    let tail = (2.0 * x * (x / u).atan() - u * (x * x / (u * u)).ln_1p()) / c;
    let tb = t / bath.beta;
    Ok(LogProduct {
        value: sum + tail,
        terms: k,
        tail,
        tail_bound: tb * tb / k as f64,
    })
}

/// Explicit partial sum `Σ_{k=1}^{n_terms}` of the same log-factors.
pub fn log_thermal_partial(t: f64, bath: &BathParams, n_terms: u64) -> f64 {
    let x = bath.omega_c * t;
    let c = bath.beta * bath.omega_c;
    (1..=n_terms)
        .map(|k| {
            let r = x / (1.0 + k as f64 * c);
            (r * r).ln_1p()
        })
        .sum()
}

/// exp(−A²), clamped to zero once A² exceeds [`DECAY_CLAMP`].
#[inline]
pub fn decay_factor(a2: f64) -> f64 {
    if a2 > DECAY_CLAMP {
        0.0
    } else {
        (-a2).exp()
    }
}

/// All bath kernels at one elapsed time. A run evaluates these once and reuses
/// them every kick, since each period uses t = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathKernels {
    pub t: f64,
    pub s_of_t: f64,
    pub drift_of_t: f64,
    pub a1_coeff: f64,
    pub a2_coeff: f64,
}

impl BathKernels {
    pub fn evaluate(t: f64, hbar: f64, bath: &BathParams, product_tol: f64) -> Result<Self> {
        if bath.eta == 0.0 {
            return Ok(Self {
                t,
                s_of_t: 0.0,
                drift_of_t: 0.0,
                a1_coeff: 0.0,
                a2_coeff: 0.0,
            });
        }
        Ok(Self {
            t,
            s_of_t: s_variance(t, bath),
            drift_of_t: drift_factor(t, bath),
            a1_coeff: bath.eta * hbar * (bath.omega_c * t).atan(),
            a2_coeff: a2_coefficient(t, hbar, bath, product_tol)?,
        })
    }

    /// Variance of the wrapped Gaussian that smears q: s(t)/β.
    pub fn smear_variance(&self, bath: &BathParams) -> f64 {
        self.s_of_t / bath.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference_bath() -> BathParams {
        BathParams::for_hbar(0.46)
    }

    #[test]
    fn s_vanishes_at_origin() {
        assert_eq!(s_variance(0.0, &reference_bath()), 0.0);
    }

    #[test]
    fn s_series_and_closed_form_agree_at_the_switch() {
        let bath = reference_bath();
        let t = 0.1 / bath.omega_c;
        let closed =
            2.0 * (t * (bath.omega_c * t).atan() - (1.0 + 0.01f64).ln() / (2.0 * bath.omega_c));
        // s ∝ t² here, so the 1e-12 step moves it by 2e-12 relative
        assert!((s_variance(t * (1.0 - 1e-12), &bath) - closed).abs() < 5e-12 * closed.abs());
    }

    #[test]
    fn s_is_strictly_increasing() {
        let bath = reference_bath();
        let mut prev = 0.0;
        for i in 1..2000 {
            let s = s_variance(i as f64 * 1e-3, &bath);
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn a1_is_antisymmetric_and_zero_on_diagonal() {
        let bath = reference_bath();
        for (m, n) in [(1, 0), (5, -3), (-7, 2)] {
            let a = dephasing_a1(m, n, 1.0, 0.46, &bath);
            assert_eq!(a, -dephasing_a1(n, m, 1.0, 0.46, &bath));
        }
        assert_eq!(dephasing_a1(4, 4, 2.0, 0.46, &bath), 0.0);
        assert_eq!(dephasing_a1(3, -3, 2.0, 0.46, &bath), 0.0);
    }

    #[test]
    fn a1_long_time_limit() {
        let bath = reference_bath();
        let a = dephasing_a1(1, 0, 1e12, 0.46, &bath);
        assert!((a - 0.46 * PI / 2.0).abs() < 1e-10);
        assert!((a - 0.7226).abs() < 1e-4);
    }

    #[test]
    fn a2_zero_on_diagonal_and_at_start() {
        let bath = reference_bath();
        assert_eq!(dephasing_a2(3, 3, 1.0, 0.46, &bath, 1e-12).unwrap(), 0.0);
        assert_eq!(dephasing_a2(3, -1, 0.0, 0.46, &bath, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn a2_depends_only_on_index_difference() {
        let bath = reference_bath();
        let base = dephasing_a2(2, 0, 1.0, 0.46, &bath, 1e-12).unwrap();
        for (m, n) in [(7, 5), (-4, -2), (0, 2), (-1, 1)] {
            assert_eq!(dephasing_a2(m, n, 1.0, 0.46, &bath, 1e-12).unwrap(), base);
        }
    }

    #[test]
    fn a2_grows_with_time() {
        let bath = reference_bath();
        let mut prev = 0.0;
        for i in 1..60 {
            let a = a2_coefficient(i as f64 * 0.05, 0.46, &bath, 1e-12).unwrap();
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn disabled_bath_is_identity() {
        let bath = reference_bath().with_eta(0.0);
        let k = BathKernels::evaluate(1.0, 0.46, &bath, 1e-12).unwrap();
        assert_eq!(k.s_of_t, 0.0);
        assert_eq!(k.a1_coeff, 0.0);
        assert_eq!(k.a2_coeff, 0.0);
        assert_eq!(decay_factor(k.a2_coeff), 1.0);
    }

    #[test]
    fn tail_bound_covers_tail() {
        let p = log_thermal_product(1.0, &reference_bath(), 1e-8).unwrap();
        assert!(p.tail > 0.0 && p.tail <= p.tail_bound);
    }

    #[test]
    fn clamp_gives_exact_zero() {
        assert_eq!(decay_factor(700.5), 0.0);
        assert!(decay_factor(699.0) > 0.0);
    }
}
