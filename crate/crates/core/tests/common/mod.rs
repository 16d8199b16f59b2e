#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rotorbath::params::{validate, BathParams, NumericsParams, RotorParams, RunParams};
use rotorbath::ValidatedConfig;

pub const HBAR: f64 = 0.46;

/// Reference setup: packet at (q, p) = (0, πħ), ω_c = 5/ħ, β = 0.1.
pub fn config(kick: f64, eta: f64, kicks: usize) -> ValidatedConfig {
    let rotor = RotorParams { kick, hbar: HBAR };
    let run = RunParams::centered(kicks, HBAR);
    let num = NumericsParams::auto(&rotor, kicks, run.p_center);
    validate(rotor, BathParams::for_hbar(HBAR).with_eta(eta), num, run).unwrap()
}

/// Same run with the numerics edited.
pub fn with_numerics(
    cfg: &ValidatedConfig,
    edit: impl FnOnce(&mut NumericsParams),
) -> ValidatedConfig {
    let (r, b, mut n, run) = cfg.clone().into_parts();
    edit(&mut n);
    validate(r, b, n, run).unwrap()
}

/// J_n(x) from 200 terms of Σ_k (−1)^k (x/2)^{2k+n} / (k!(k+n)!).
/// Accurate to ~1e-13 for |x| ≤ 10.
pub fn bessel_series(n: usize, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = h.powi(n as i32) / (1..=n).map(|v| v as f64).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -h * h / (k as f64 * (k + n) as f64);
        sum += term;
    }
    sum
}

/// ⟨l|U|m⟩ = i^{l−m} J_{l−m}(κ) using the series above.
pub fn kick_entry(d: i64, kappa: f64) -> Complex64 {
    let j = bessel_series(d.unsigned_abs() as usize, kappa);
    let j = if d < 0 && d % 2 != 0 { -j } else { j };
    Complex64::from_polar(1.0, PI / 2.0 * d as f64) * j
}

/// Dense row-major U ρ U† by explicit triple loops.
pub fn dense_conjugate(u: &[Complex64], rho: &[Complex64], n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut t = vec![zero; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                t[i * n + j] += u[i * n + k] * rho[k * n + j];
            }
        }
    }
    let mut out = vec![zero; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i * n + j] += t[i * n + k] * u[j * n + k].conj();
            }
        }
    }
    out
}

/// ln Π_{k≥1}(1 + (x/(1+kc))²), extrapolated from 10⁶- and 2·10⁶-term
/// partial sums: the remainder falls as 1/N, so 2P(2N) − P(N) cancels it.
pub fn log_product_oracle(x: f64, c: f64) -> f64 {
    let partial = |n: u64| -> f64 {
        (1..=n)
            .map(|k| {
                let r = x / (1.0 + k as f64 * c);
                (r * r).ln_1p()
            })
            .sum()
    };
    let n = 1_000_000;
    2.0 * partial(2 * n) - partial(n)
}
