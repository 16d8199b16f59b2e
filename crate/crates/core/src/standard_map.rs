//! The bare standard map and its chaos diagnostics.
//!
//! ```text
//! q' = q + p   (mod 2π)
//! p' = p + K sin q'
//! ```
//!
//! The tangent map at the image point is `J = [[1, 1], [K cos q', 1 + K cos q']]`,
//! with det J = 1.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::least_squares;
use crate::error::{Error, Result};

/// Tangent vectors are rescaled to unit length every this many steps.
pub const RENORMALIZE_EVERY: usize = 10;
/// Minimum number of chaotic-sea orbits averaged by [`lyapunov`].
pub const LYAPUNOV_ORBITS: usize = 32;
/// Orbits whose exponent over this many steps falls below
/// [`SCREEN_THRESHOLD`] are treated as island orbits and redrawn.
pub const SCREEN_STEPS: usize = 100;
pub const SCREEN_THRESHOLD: f64 = 0.1;
const MAX_DRAWS_PER_ORBIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapState {
    pub q: f64,
    pub p: f64,
}

impl MapState {
    pub fn new(q: f64, p: f64) -> Self {
        Self {
            q: q.rem_euclid(TAU),
            p,
        }
    }

    /// One kick period.
    #[inline]
    pub fn step(self, kick: f64) -> MapState {
        let q = (self.q + self.p).rem_euclid(TAU);
        MapState {
            q,
            p: self.p + kick * q.sin(),
        }
    }

    /// Advances the state and a tangent vector `(dq, dp)` together.
    #[inline]
    pub fn step_tangent(self, kick: f64, tangent: [f64; 2]) -> (MapState, [f64; 2]) {
        let next = self.step(kick);
        (next, apply_jacobian(kick, next.q, tangent))
    }
}

/// Tangent map evaluated at the updated angle `q_next`.
pub fn jacobian(kick: f64, q_next: f64) -> [[f64; 2]; 2] {
    let c = kick * q_next.cos();
    [[1.0, 1.0], [c, 1.0 + c]]
}

#[inline]
fn apply_jacobian(kick: f64, q_next: f64, [dq, dp]: [f64; 2]) -> [f64; 2] {
    let dq2 = dq + dp;
    [dq2, dp + kick * q_next.cos() * dq2]
}

/// Finite-time largest Lyapunov exponent of one orbit.
pub fn orbit_lyapunov(start: MapState, kick: f64, n_steps: usize) -> f64 {
    let mut state = start;
    let mut v = [1.0, 0.0];
    let mut log_growth = 0.0;
    for i in 1..=n_steps {
        (state, v) = state.step_tangent(kick, v);
        if i % RENORMALIZE_EVERY == 0 || i == n_steps {
            let norm = v[0].hypot(v[1]);
            log_growth += norm.ln();
            v = [v[0] / norm, v[1] / norm];
        }
    }
    log_growth / n_steps as f64
}

fn orbit_rng(seed: u64, orbit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(orbit as u64);
    rng
}

/// Draws an initial point uniform in [0, 2π)², redrawing island orbits.
/// Below the chaos threshold every draw may be regular; the last draw is then
/// kept.
fn chaotic_start(kick: f64, rng: &mut ChaCha8Rng) -> MapState {
    let mut last = MapState::new(0.0, 0.0);
    for _ in 0..MAX_DRAWS_PER_ORBIT {
        last = MapState::new(rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
        if orbit_lyapunov(last, kick, SCREEN_STEPS) >= SCREEN_THRESHOLD {
            break;
        }
    }
    last
}

#[derive(Debug, Clone)]
pub struct LyapunovEstimate {
    pub mean: f64,
    pub per_orbit: Vec<f64>,
}

/// Largest Lyapunov exponent averaged over [`LYAPUNOV_ORBITS`] chaotic-sea
/// orbits. Each orbit owns a seeded stream, so the result does not depend on
/// the worker count.
pub fn lyapunov_ensemble(kick: f64, n_steps: usize, seed: u64) -> Result<LyapunovEstimate> {
    if n_steps < 1000 {
        return Err(Error::InvalidArgument(format!(
            "lyapunov needs at least 1000 steps (got {n_steps})"
        )));
    }
    let per_orbit: Vec<f64> = (0..LYAPUNOV_ORBITS)
        .into_par_iter()
        .map(|i| {
            let mut rng = orbit_rng(seed, i);
            let start = chaotic_start(kick, &mut rng);
            orbit_lyapunov(start, kick, n_steps)
        })
        .collect();
    let mean = per_orbit.iter().sum::<f64>() / per_orbit.len() as f64;
    Ok(LyapunovEstimate { mean, per_orbit })
}

pub fn lyapunov(kick: f64, n_steps: usize, seed: u64) -> Result<f64> {
    Ok(lyapunov_ensemble(kick, n_steps, seed)?.mean)
}

#[derive(Debug, Clone)]
pub struct DiffusionEstimate {
    /// Fitted slope of ⟨(p_n − p_0)²⟩ against n.
    pub coefficient: f64,
    pub intercept: f64,
    /// ⟨(p_n − p_0)²⟩ for n = 0..=n_steps.
    pub mean_square: Vec<f64>,
}

/// Momentum diffusion coefficient from an ensemble of chaotic-sea orbits.
pub fn diffusion_ensemble(
    kick: f64,
    ensemble: usize,
    n_steps: usize,
    seed: u64,
) -> Result<DiffusionEstimate> {
    if ensemble < 1000 || n_steps < 100 {
        return Err(Error::InvalidArgument(format!(
            "diffusion needs ensemble >= 1000 and n_steps >= 100 (got {ensemble}, {n_steps})"
        )));
    }
    let trajectories: Vec<Vec<f64>> = (0..ensemble)
        .into_par_iter()
        .map(|i| {
            let mut rng = orbit_rng(seed, i);
            let start = chaotic_start(kick, &mut rng);
            let mut s = start;
            let mut sq = Vec::with_capacity(n_steps + 1);
            sq.push(0.0);
            for _ in 0..n_steps {
                s = s.step(kick);
                let dp = s.p - start.p;
                sq.push(dp * dp);
            }
            sq
        })
        .collect();

    let mut mean_square = vec![0.0; n_steps + 1];
    for t in &trajectories {
        for (m, v) in mean_square.iter_mut().zip(t) {
            *m += v;
        }
    }
    for m in &mut mean_square {
        *m /= ensemble as f64;
    }
    let n: Vec<f64> = (0..=n_steps).map(|i| i as f64).collect();
    let fit = least_squares(&n, &mean_square)?;
    Ok(DiffusionEstimate {
        coefficient: fit.slope,
        intercept: fit.intercept,
        mean_square,
    })
}

pub fn diffusion_coefficient(kick: f64, ensemble: usize, n_steps: usize, seed: u64) -> Result<f64> {
    Ok(diffusion_ensemble(kick, ensemble, n_steps, seed)?.coefficient)
}
