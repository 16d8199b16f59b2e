//! Standard-map diagnostics against analytic expectations.

mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use common::bessel_series;
use rotorbath::standard_map::{
    diffusion_coefficient, diffusion_ensemble, jacobian, lyapunov, MapState,
};

/// Quasilinear rate with the leading kick-to-kick correlations:
/// D ≈ (K²/2)(1 − 2J₂(K) + 2J₂(K)²).
fn correlated_rate(kick: f64) -> f64 {
    let j2 = bessel_series(2, kick);
    kick * kick / 2.0 * (1.0 - 2.0 * j2 + 2.0 * j2 * j2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn map_is_area_preserving(kick in 0.0f64..30.0, q in 0.0f64..TAU, p in -50.0f64..50.0) {
        let next = MapState::new(q, p).step(kick);
        let j = jacobian(kick, next.q);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        prop_assert!((det - 1.0).abs() < 1e-12, "det = {}", det);
    }

    #[test]
    fn angle_is_wrapped_and_momentum_is_exact(kick in 0.0f64..30.0, q in -20.0f64..20.0, p in -50.0f64..50.0) {
        let s = MapState::new(q, p);
        let next = s.step(kick);
        prop_assert!((0.0..TAU).contains(&next.q));
        prop_assert!((next.p - (s.p + kick * next.q.sin())).abs() < 1e-12 * (1.0 + next.p.abs()));
    }
}

#[test]
fn lyapunov_follows_log_half_k_at_strong_kicks() {
    let mut last = 0.0;
    for (i, kick) in [8.0f64, 12.0, 20.0].into_iter().enumerate() {
        let lam = lyapunov(kick, 20_000, 100 + i as u64).unwrap();
        let target = (kick / 2.0).ln();
        assert!(
            (lam / target - 1.0).abs() < 0.1,
            "K={kick}: {lam} vs {target}"
        );
        assert!(lam > last);
        last = lam;
    }
}

#[test]
fn regular_regime_does_not_diffuse() {
    let d = diffusion_coefficient(0.5, 2000, 300, 7).unwrap();
    assert!(d.abs() < 1e-3, "D(0.5) = {d}");
}

#[test]
fn diffusion_follows_the_correlated_rate() {
    for (kick, seed) in [(10.0f64, 21u64), (20.0, 22)] {
        let d = diffusion_coefficient(kick, 4000, 300, seed).unwrap();
        let want = correlated_rate(kick);
        assert!(
            (d / want - 1.0).abs() < 0.1,
            "K={kick}: D = {d}, correlated {want}"
        );
    }
    // the correlations pull D(10) below and D(20) above the quasilinear K²/2
    assert!(correlated_rate(10.0) < 50.0 && correlated_rate(20.0) > 200.0);
}

#[test]
fn mean_square_spread_starts_at_zero_and_grows() {
    let est = diffusion_ensemble(6.0, 1000, 100, 3).unwrap();
    assert_eq!(est.mean_square[0], 0.0);
    assert!(est.mean_square[100] > est.mean_square[10]);
    assert!(est.coefficient > 0.0);
}

#[test]
fn invalid_sizes_are_rejected() {
    assert!(lyapunov(10.0, 10, 0).is_err());
    assert!(diffusion_coefficient(10.0, 10, 500, 0).is_err());
    assert!(diffusion_coefficient(10.0, 5000, 5, 0).is_err());
}

#[test]
fn period_two_orbit_at_pi() {
    // (q, p) = (0, π) maps to (π, π) and back under any K
    let s = MapState::new(0.0, PI).step(4.0);
    assert!((s.q - PI).abs() < 1e-12 && (s.p - PI).abs() < 1e-12);
    let back = s.step(4.0);
    assert!(back.q.abs() < 1e-12 || (back.q - TAU).abs() < 1e-12);
}
