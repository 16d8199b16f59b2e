//! Coarse-grained Liouville evolution of the Husimi distribution on the
//! cylinder q ∈ [0, 2π), p ∈ ℝ.
//!
//! Between kicks each p-row streams and is smeared by the bath,
//!
//! ```text
//! f(q, p) ← ∫ dr f(q − p t − η p atan(ω_c t) + r, p) · exp(−β r² / 2s(t)) / √(2π s(t)/β)
//! ```
//!
//! and the kick maps f⁺(q, p) = f⁻(q, p − K sin q). The coarse-grained
//! entropy is S_H = −∫ f ln f dq dp / (2πħ).

pub mod grid;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub use grid::{GridSpec, PhaseSpaceGrid, GRID_MAGIC};

use crate::analysis::{EntropySeries, Picture, SeriesLabel};
use crate::bath::{drift_factor, s_variance};
use crate::error::{Error, Result};
use crate::params::{BathParams, ValidatedConfig};
use crate::quantum::{make_wavepacket, WavePacket};

/// Cells with f below this contribute nothing to S_H.
pub const ENTROPY_CUTOFF: f64 = 1e-30;
/// Tolerated relative mass change across a kick.
pub const MASS_DRIFT_TOL: f64 = 1e-6;
/// Tolerated fraction of mass pushed past the p boundary by a kick.
pub const OVERFLOW_TOL: f64 = 1e-8;
/// Smearing kernel support, in standard deviations.
pub const KERNEL_SIGMAS: f64 = 8.0;
/// Negative Husimi samples beyond this fraction of the maximum are an error.
const HUSIMI_NEGATIVE_TOL: f64 = 1e-10;

/// Grid extent and resolution for a validated configuration.
pub fn grid_spec(cfg: &ValidatedConfig) -> GridSpec {
    GridSpec {
        nq: cfg.numerics().nq,
        np: cfg.numerics().np_grid,
        p_center: cfg.run().p_center,
        p_extent: cfg.numerics().p_extent,
    }
}

/// Husimi distribution of `psi` in the coherent states of width ħ/√2:
///
/// ```text
/// f(q, p) = |Σ_n a_n exp[−(p/ħ − n)²/2] e^{inq}|² / √π
/// ```
///
/// Expanding the square gives the double sum
/// Σ_{mn} a_m* a_n exp[−p²/ħ² + (m+n)p/ħ − (m²+n²)/2] e^{i(n−m)q} / √π,
/// which reduces to the cos((m−n)q) form for real coefficients. The result is
/// renormalized to unit mass on the grid.
pub fn husimi_init(psi: &WavePacket, spec: &GridSpec, hbar: f64) -> Result<PhaseSpaceGrid> {
    let mut grid = PhaseSpaceGrid::zeros(spec, hbar);
    let nq = grid.nq;
    let terms: Vec<(i64, Complex64)> = psi.support().filter(|(_, a)| a.norm() > 1e-300).collect();
    let phases: Vec<Vec<Complex64>> = terms
        .iter()
        .map(|&(n, _)| {
            (0..nq)
                .map(|i| Complex64::from_polar(1.0, n as f64 * grid.q(i)))
                .collect()
        })
        .collect();
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    let (p_min, dp) = (grid.p_min, grid.dp());

    grid.values
        .par_chunks_mut(nq)
        .enumerate()
        .for_each(|(j, row)| {
            let x = (p_min + j as f64 * dp) / hbar;
            let mut acc = vec![Complex64::new(0.0, 0.0); nq];
            for ((n, a), ph) in terms.iter().zip(&phases) {
                let d = x - *n as f64;
                if d.abs() > 40.0 {
                    continue;
                }
                let c = a * (-0.5 * d * d).exp();
                for (s, e) in acc.iter_mut().zip(ph) {
                    *s += c * e;
                }
            }
            for (v, s) in row.iter_mut().zip(&acc) {
                *v = s.norm_sqr() * inv_sqrt_pi;
            }
        });

    let max = grid.max_value();
    if let Some(&worst) = grid
        .values
        .iter()
        .find(|&&v| v < -HUSIMI_NEGATIVE_TOL * max)
    {
        return Err(Error::HusimiNegative { value: worst });
    }
    let mass = grid.mass();
    if !(mass > 0.0) {
        return Err(Error::GridOverflow { mass: 1.0 });
    }
    grid.scale(1.0 / mass);
    Ok(grid)
}

/// Circular Gaussian of variance `variance` on `nq` periodic points, summed
/// over 2π images and truncated at [`KERNEL_SIGMAS`]·σ, normalized to unit
/// sum. Index k is the offset kΔq (mod 2π).
pub fn wrapped_gaussian(nq: usize, variance: f64) -> Vec<f64> {
    let mut kernel = vec![0.0; nq];
    if variance <= 0.0 {
        kernel[0] = 1.0;
        return kernel;
    }
    let sigma = variance.sqrt();
    let reach = KERNEL_SIGMAS * sigma;
    let dq = 2.0 * PI / nq as f64;
    let images = (reach / (2.0 * PI)).ceil() as i64 + 1;
    for (k, g) in kernel.iter_mut().enumerate() {
        let base = if k <= nq / 2 {
            k as f64 * dq
        } else {
            (k as f64 - nq as f64) * dq
        };
        for m in -images..=images {
            let d = base + 2.0 * PI * m as f64;
            if d.abs() <= reach {
                *g += (-d * d / (2.0 * variance)).exp();
            }
        }
    }
    let total: f64 = kernel.iter().sum();
    for g in &mut kernel {
        *g /= total;
    }
    kernel
}

/// One bath period for every p-row: shear by p·(t + η φ' atan ω_c t), then
/// circular convolution with the wrapped Gaussian of variance s(t)/β.
pub struct BathSmear {
    nq: usize,
    /// q-shift per unit momentum.
    shear: f64,
    variance: f64,
    /// Real spectrum of the kernel, scaled by 1/nq.
    spectrum: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl BathSmear {
    pub fn new(nq: usize, t: f64, bath: &BathParams) -> Self {
        let variance = if bath.is_disabled() {
            0.0
        } else {
            s_variance(t, bath) / bath.beta
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(nq);
        let inverse = planner.plan_fft_inverse(nq);
        let mut k: Vec<Complex64> = wrapped_gaussian(nq, variance)
            .into_iter()
            .map(|g| Complex64::new(g, 0.0))
            .collect();
        forward.process(&mut k);
        let spectrum = k.iter().map(|c| c.re / nq as f64).collect();
        Self {
            nq,
            shear: t + drift_factor(t, bath),
            variance,
            spectrum,
            forward,
            inverse,
        }
    }

    /// Variance s(t)/β of the smearing kernel, in rad².
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn apply(&self, f: &mut PhaseSpaceGrid) {
        assert_eq!(f.nq, self.nq);
        let nq = self.nq;
        let (p_min, dp, dq) = (f.p_min, f.dp(), f.dq());
        let smear = self.variance > 0.0;
        f.values.par_chunks_mut(nq).enumerate().for_each_init(
            || (vec![0.0; nq], vec![Complex64::new(0.0, 0.0); nq]),
            |(old, buf), (j, row)| {
                let p = p_min + j as f64 * dp;
                old.copy_from_slice(row);
                shift_periodic(old, row, p * self.shear / dq);
                if !smear {
                    return;
                }
                for (b, &v) in buf.iter_mut().zip(row.iter()) {
                    *b = Complex64::new(v, 0.0);
                }
                self.forward.process(buf);
                for (b, s) in buf.iter_mut().zip(&self.spectrum) {
                    *b *= *s;
                }
                self.inverse.process(buf);
                for (v, b) in row.iter_mut().zip(buf.iter()) {
                    *v = b.re.max(0.0);
                }
            },
        );
    }
}

/// out[i] = src(i − s) on a periodic lattice, linearly interpolated.
fn shift_periodic(src: &[f64], out: &mut [f64], s: f64) {
    let n = src.len();
    let k = s.floor();
    let alpha = s - k;
    let k = (k as i64).rem_euclid(n as i64) as usize;
    for (i, o) in out.iter_mut().enumerate() {
        // i − s lies between i − k − 1 and i − k
        let hi = (i + n - k) % n;
        let lo = (hi + n - 1) % n;
        *o = (1.0 - alpha) * src[hi] + alpha * src[lo];
    }
}

/// One bath period of length `t` applied to f.
pub fn bath_drift_smear(f: &mut PhaseSpaceGrid, t: f64, bath: &BathParams) {
    BathSmear::new(f.nq, t, bath).apply(f);
}

/// f⁺(q, p) = f⁻(q, p − K sin q), each q-column resampled by linear
/// interpolation and renormalized to its previous mass.
pub fn kick_shift(f: &mut PhaseSpaceGrid, kick: f64) -> Result<()> {
    if kick == 0.0 {
        return Ok(());
    }
    let (nq, np) = (f.nq, f.np);
    let dp = f.dp();
    let shifts: Vec<f64> = (0..nq)
        .map(|i| {
            let s = kick * f.q(i).sin();
            if s.abs() < 1e-12 * kick.abs() {
                0.0
            } else {
                s / dp
            }
        })
        .collect();
    let before = f.mass();
    let old = std::mem::take(&mut f.values);
    let mut out = vec![0.0; nq * np];
    out.par_chunks_mut(nq).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            let u = j as f64 - shifts[i];
            let j0 = u.floor();
            let alpha = u - j0;
            let j0 = j0 as i64;
            let sample = |jj: i64| {
                if jj < 0 || jj >= np as i64 {
                    0.0
                } else {
                    old[jj as usize * nq + i]
                }
            };
            *v = if alpha == 0.0 {
                sample(j0)
            } else {
                (1.0 - alpha) * sample(j0) + alpha * sample(j0 + 1)
            };
        }
    });
    f.values = out;
    let after = f.mass();
    let lost = (before - after) / before;
    if lost > OVERFLOW_TOL {
        return Err(Error::GridOverflow { mass: lost });
    }
    if lost.abs() > MASS_DRIFT_TOL {
        return Err(Error::MassDrift { drift: lost.abs() });
    }
    f.scale(before / after);
    Ok(())
}

/// S_H = −Σ f ln f ΔqΔp/(2πħ).
pub fn classical_entropy(f: &PhaseSpaceGrid) -> f64 {
    let sum: f64 = f
        .values
        .iter()
        .filter(|&&v| v >= ENTROPY_CUTOFF)
        .map(|&v| -v * v.ln())
        .sum();
    sum * f.cell()
}

/// Angle and momentum distributions; ∫ g₁ dq = ∫ g₂ dp = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub q: Vec<f64>,
    /// g₁(q) = ∫ f dp/(2πħ); uniform is 1/2π.
    pub g1: Vec<f64>,
    pub p: Vec<f64>,
    /// g₂(p) = ∫ f dq/(2πħ).
    pub g2: Vec<f64>,
}

pub fn marginals(f: &PhaseSpaceGrid) -> Marginals {
    let norm = 2.0 * PI * f.hbar;
    let mut g1 = vec![0.0; f.nq];
    let mut g2 = vec![0.0; f.np];
    for (j, g) in g2.iter_mut().enumerate() {
        let row = f.row(j);
        *g = row.iter().sum::<f64>() * f.dq() / norm;
        for (a, v) in g1.iter_mut().zip(row) {
            *a += v;
        }
    }
    for a in &mut g1 {
        *a *= f.dp() / norm;
    }
    Marginals {
        q: (0..f.nq).map(|i| f.q(i)).collect(),
        g1,
        p: (0..f.np).map(|j| f.p(j)).collect(),
        g2,
    }
}

/// ⟨p²/2⟩ over the grid.
pub fn classical_energy(f: &PhaseSpaceGrid) -> f64 {
    let mut sum = 0.0;
    for j in 0..f.np {
        let p = f.p(j);
        sum += f.row(j).iter().sum::<f64>() * p * p / 2.0;
    }
    sum * f.cell()
}

/// Records of a classical run; index n is the distribution after kick n.
#[derive(Debug, Clone)]
pub struct ClassicalRun {
    pub series: EntropySeries,
    pub mass: Vec<f64>,
    pub boundary_mass: Vec<f64>,
    pub final_grid: PhaseSpaceGrid,
}

/// Starts from the Husimi distribution of the quantum packet and applies
/// `kicks` periods of bath smearing and kick.
pub fn run_classical(cfg: &ValidatedConfig) -> Result<ClassicalRun> {
    run_classical_with(cfg, |_, _| {})
}

/// [`run_classical`] with a callback invoked on the grid after every kick.
pub fn run_classical_with<F>(cfg: &ValidatedConfig, mut observe: F) -> Result<ClassicalRun>
where
    F: FnMut(usize, &PhaseSpaceGrid),
{
    let rotor = cfg.rotor();
    let bath = cfg.bath();
    let run = cfg.run();
    let spec = grid_spec(cfg);
    let psi = make_wavepacket(rotor.hbar, run.p_center, run.q_center, cfg.numerics().l_max)?;
    let mut f = husimi_init(&psi, &spec, rotor.hbar)?;
    let smear = BathSmear::new(spec.nq, 1.0, bath);

    let mut series = EntropySeries::new(SeriesLabel {
        picture: Picture::Classical,
        kick: rotor.kick,
        hbar: rotor.hbar,
        eta: bath.eta,
    });
    series.push(0, classical_entropy(&f), classical_energy(&f));
    let mut mass = vec![f.mass()];
    let mut boundary_mass = vec![f.boundary_mass()];
    observe(0, &f);

    for n in 1..=run.kicks {
        smear.apply(&mut f);
        kick_shift(&mut f, rotor.kick).map_err(|e| e.at_kick(n))?;
        series.push(n, classical_entropy(&f), classical_energy(&f));
        mass.push(f.mass());
        boundary_mass.push(f.boundary_mass());
        observe(n, &f);
    }

    Ok(ClassicalRun {
        series,
        mass,
        boundary_mass,
        final_grid: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HBAR: f64 = 0.46;

    fn spec(nq: usize, np: usize, extent: f64) -> GridSpec {
        GridSpec {
            nq,
            np,
            p_center: PI * HBAR,
            p_extent: extent,
        }
    }

    fn reference_grid() -> PhaseSpaceGrid {
        let psi = make_wavepacket(HBAR, PI * HBAR, 0.0, 40).unwrap();
        husimi_init(&psi, &spec(256, 321, 20.0 * HBAR), HBAR).unwrap()
    }

    #[test]
    fn single_mode_is_q_uniform_gaussian() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 41];
        coeffs[20] = Complex64::new(1.0, 0.0);
        let psi = WavePacket {
            a_param: 1.0,
            b_param: Complex64::new(0.0, 0.0),
            l_max: 20,
            coeffs,
        };
        let s = GridSpec {
            nq: 64,
            np: 401,
            p_center: 0.0,
            p_extent: 10.0 * HBAR,
        };
        let f = husimi_init(&psi, &s, HBAR).unwrap();
        // renormalization constant is 1 up to grid error
        for j in [150, 200, 260] {
            let p = f.p(j);
            let exact = (-(p * p) / (HBAR * HBAR)).exp() / PI.sqrt();
            for i in 0..64 {
                assert!(
                    (f.at(i, j) - exact).abs() < 1e-9 * exact.max(1e-3),
                    "{i} {j}"
                );
            }
        }
    }

    #[test]
    fn reference_packet_has_unit_entropy() {
        let f = reference_grid();
        assert!((f.mass() - 1.0).abs() < 1e-12);
        let s = classical_entropy(&f);
        assert!((s - 1.0).abs() < 0.02, "{s}");
        assert!(f.boundary_mass() < 1e-10);
    }

    #[test]
    fn husimi_is_periodic_in_q() {
        // f(q + 2π) = f(q): the grid point after the last wraps to index 0
        let psi = make_wavepacket(HBAR, PI * HBAR, 2.0, 40).unwrap();
        let f = husimi_init(&psi, &spec(64, 81, 10.0 * HBAR), HBAR).unwrap();
        let g = husimi_init(&psi, &spec(128, 81, 10.0 * HBAR), HBAR).unwrap();
        for j in 0..81 {
            for i in 0..64 {
                assert!((f.at(i, j) * f.mass().recip() - g.at(2 * i, j) / g.mass()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_density_entropy() {
        let mut f = PhaseSpaceGrid::zeros(&spec(32, 101, 2.0), HBAR);
        // Ω = 2π × (p_max − p_min + Δp) for the rectangle rule
        for v in &mut f.values {
            *v = 1.0;
        }
        let m = f.mass();
        f.scale(1.0 / m);
        let omega = 2.0 * PI * (f.p_max - f.p_min + f.dp());
        let expect = (omega / (2.0 * PI * HBAR)).ln();
        assert!((classical_entropy(&f) - expect).abs() < 1e-12);
    }

    #[test]
    fn decoupled_bath_step_is_pure_shear() {
        let bath = BathParams::for_hbar(HBAR).with_eta(0.0);
        let mut f = reference_grid();
        let before = f.clone();
        bath_drift_smear(&mut f, 1.0, &bath);
        // rows whose p is a multiple of Δq shift by whole cells
        let dq = f.dq();
        for j in 0..f.np {
            let s = f.p(j) / dq;
            if (s - s.round()).abs() < 1e-9 {
                let k = (s.round() as i64).rem_euclid(f.nq as i64) as usize;
                for i in 0..f.nq {
                    let src = (i + f.nq - k) % f.nq;
                    assert!((f.at(i, j) - before.at(src, j)).abs() < 1e-14);
                }
            }
        }
        // p = 0 row is untouched
        let zero = (-f.p_min / f.dp()).round() as usize;
        if f.p(zero).abs() < 1e-12 {
            assert_eq!(f.row(zero), before.row(zero));
        }
    }

    #[test]
    fn bath_step_keeps_p_marginal() {
        let bath = BathParams::for_hbar(HBAR);
        let mut f = reference_grid();
        let g2 = marginals(&f).g2;
        bath_drift_smear(&mut f, 1.0, &bath);
        let after = marginals(&f).g2;
        for (a, b) in g2.iter().zip(&after) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn delta_row_becomes_gaussian() {
        // narrow enough that the 8σ kernel does not wrap
        let bath = BathParams::for_hbar(HBAR).with_eta(0.001);
        let smear = BathSmear::new(512, 1.0, &bath);
        let var = smear.variance();
        assert!(var > 0.01 && 8.0 * var.sqrt() < PI, "{var}");
        let mut f = PhaseSpaceGrid::zeros(
            &GridSpec {
                nq: 512,
                np: 3,
                p_center: 0.0,
                p_extent: 1.0,
            },
            HBAR,
        );
        f.values[512 + 256] = 1.0; // p = 0, q = π
        smear.apply(&mut f);
        let row = f.row(1);
        let dq = f.dq();
        let mean: f64 = row.iter().enumerate().map(|(i, v)| v * i as f64 * dq).sum();
        let second: f64 = row
            .iter()
            .enumerate()
            .map(|(i, v)| v * (i as f64 * dq - PI).powi(2))
            .sum();
        assert!((mean - PI).abs() < 1e-10);
        assert!((second - var).abs() / var < 1e-6);
        let peak = row[256];
        let gauss = (-(dq * dq) / (2.0 * var)).exp();
        assert!((row[257] / peak - gauss).abs() < 1e-6);
    }

    #[test]
    fn strong_bath_flattens_angle_distribution() {
        let bath = BathParams::for_hbar(HBAR);
        let mut f = reference_grid();
        bath_drift_smear(&mut f, 1.0, &bath);
        let g1 = marginals(&f).g1;
        let uniform = 1.0 / (2.0 * PI);
        let worst = g1.iter().map(|g| (g - uniform).abs()).fold(0.0, f64::max);
        assert!(worst < 0.05 * uniform, "{worst}");
    }

    #[test]
    fn smearing_never_lowers_entropy() {
        let bath = BathParams::for_hbar(HBAR).with_eta(0.03);
        let mut f = reference_grid();
        let mut prev = classical_entropy(&f);
        for _ in 0..5 {
            bath_drift_smear(&mut f, 1.0, &bath);
            let s = classical_entropy(&f);
            assert!(s >= prev - 1e-8);
            prev = s;
        }
    }

    #[test]
    fn zero_kick_is_identity() {
        let mut f = reference_grid();
        let before = f.clone();
        kick_shift(&mut f, 0.0).unwrap();
        assert_eq!(f, before);
    }

    #[test]
    fn kick_leaves_sin_zero_columns() {
        let mut f = reference_grid();
        let before = f.clone();
        kick_shift(&mut f, 1.3).unwrap();
        for j in 0..f.np {
            assert!((f.at(0, j) - before.at(0, j)).abs() < 1e-14);
            assert!((f.at(128, j) - before.at(128, j)).abs() < 1e-14);
        }
    }

    #[test]
    fn kick_conserves_mass_and_angle_marginal() {
        let mut f = reference_grid();
        let g1 = marginals(&f).g1;
        kick_shift(&mut f, 1.3).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-12);
        let after = marginals(&f).g1;
        for (a, b) in g1.iter().zip(&after) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn kick_past_the_edge_overflows() {
        let mut f = reference_grid();
        let err = kick_shift(&mut f, 30.0).unwrap_err();
        assert!(matches!(err, Error::GridOverflow { .. }));
    }

    #[test]
    fn initial_energy_from_husimi_moments() {
        let f = reference_grid();
        let g2 = marginals(&f).g2;
        let dp = f.dp();
        let mean: f64 = g2.iter().zip(&f.p_axis()).map(|(g, p)| g * p * dp).sum();
        let var: f64 = g2
            .iter()
            .zip(&f.p_axis())
            .map(|(g, p)| g * (p - mean).powi(2) * dp)
            .sum();
        let e = classical_energy(&f);
        assert!((e - (mean * mean + var) / 2.0).abs() < 1e-12);
        // Husimi width adds ħ²/2 to the packet's ħ²/4
        assert!(
            (var - 0.75 * HBAR * HBAR).abs() < 0.01 * HBAR * HBAR,
            "{var}"
        );
    }
}
