//! Exact reduced-density-matrix propagation of the kicked rotor.
//!
//! One kick period is the bath-dressed free evolution over t = 1,
//!
//! ```text
//! ρ_mn ← exp[−iħ(m² − n²)t/2] · exp[−iA¹_mn − A²_mn] · ρ_mn
//! ```
//!
//! followed by the instantaneous kick ρ ← U ρ U†. No dephasing acts during
//! the kick itself.

pub mod density;
pub mod entropy;
pub mod kick;
pub mod wavepacket;

use num_complex::Complex64;

pub use density::{pure_density, quantum_energy, DensityMatrix};
pub use entropy::{entropy_report, spectrum, von_neumann_entropy, EntropyReport};
pub use kick::{bessel_j_orders, kick_matrix, kick_step, kick_step_measured, KickMatrix};
pub use wavepacket::{calibrated_width, make_wavepacket, WavePacket};

use crate::analysis::{EntropySeries, Picture, SeriesLabel};
use crate::bath::{decay_factor, BathKernels};
use crate::error::Result;
use crate::params::{BathParams, ValidatedConfig};

/// Populations below this fraction of the trace are dropped after each kick.
/// The coherences removed with them are at most its square root.
pub const SUPPORT_FLOOR: f64 = 1e-30;

/// Per-index factors of one bath period: the phase
/// exp[−i(ħt/2 + ηħ atan ω_c t) l²] and the decay exp(−A²) by index distance.
#[derive(Debug, Clone)]
pub struct Dephaser {
    phase: Vec<Complex64>,
    decay: Vec<f64>,
}

impl Dephaser {
    pub fn new(kernels: &BathKernels, hbar: f64, l_max: usize) -> Self {
        let rate = hbar * kernels.t / 2.0 + kernels.a1_coeff;
        let phase = (-(l_max as i64)..=l_max as i64)
            .map(|l| Complex64::from_polar(1.0, -rate * (l * l) as f64))
            .collect();
        let dim = 2 * l_max + 1;
        let decay = (0..dim)
            .map(|d| decay_factor(kernels.a2_coeff * (d * d) as f64))
            .collect();
        Self { phase, decay }
    }

    /// Smallest index distance whose coherences are zeroed outright.
    pub fn cutoff_distance(&self) -> Option<usize> {
        self.decay.iter().position(|&f| f == 0.0)
    }

    /// Multiplies every coherence by its dephasing factor. Diagonal entries
    /// are left untouched bit for bit.
    pub fn apply(&self, rho: &mut DensityMatrix) {
        let n = rho.dim();
        assert_eq!(n, self.phase.len());
        let band = rho.bandwidth();
        let data = rho.as_mut_slice();
        // Upper and lower entries get conjugate factors, so an exactly
        // Hermitian input stays exactly Hermitian.
        for i in 0..n {
            let pi = self.phase[i];
            for j in i + 1..(i + band + 1).min(n) {
                let f = self.decay[j - i];
                if f == 0.0 {
                    data[i * n + j] = Complex64::new(0.0, 0.0);
                    data[j * n + i] = Complex64::new(0.0, 0.0);
                } else {
                    let z = pi * self.phase[j].conj() * f;
                    data[i * n + j] *= z;
                    data[j * n + i] *= z.conj();
                }
            }
        }
    }
}

/// One bath period of length `t` applied to ρ.
pub fn bath_step(
    rho: &mut DensityMatrix,
    t: f64,
    hbar: f64,
    bath: &BathParams,
    product_tol: f64,
) -> Result<()> {
    let kernels = BathKernels::evaluate(t, hbar, bath, product_tol)?;
    Dephaser::new(&kernels, hbar, rho.l_max()).apply(rho);
    Ok(())
}

/// Records of a quantum run; index n is the state just after kick n.
#[derive(Debug, Clone)]
pub struct QuantumRun {
    pub series: EntropySeries,
    pub trace: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    /// Hermiticity defect of U ρ U† before re-symmetrization.
    pub hermiticity: Vec<f64>,
    pub final_state: DensityMatrix,
}

/// Starts from the pure packet and applies `kicks` periods of bath evolution
/// and kick, recording S, ⟨E⟩, Tr ρ and the smallest eigenvalue after each.
///
/// The entropy of kick n is evaluated just before U is applied: U is unitary
/// on the retained basis, and the dephased matrix is banded, which keeps the
/// eigensolve cheap.
pub fn run_quantum(cfg: &ValidatedConfig) -> Result<QuantumRun> {
    run_quantum_with(cfg, |_, _| {})
}

/// [`run_quantum`] with a callback invoked on the state after every kick.
pub fn run_quantum_with<F>(cfg: &ValidatedConfig, mut observe: F) -> Result<QuantumRun>
where
    F: FnMut(usize, &DensityMatrix),
{
    let rotor = cfg.rotor();
    let bath = cfg.bath();
    let num = cfg.numerics();
    let run = cfg.run();
    let hbar = rotor.hbar;

    let psi = make_wavepacket(hbar, run.p_center, run.q_center, num.l_max)?;
    let mut rho = pure_density(&psi);
    let kernels = BathKernels::evaluate(1.0, hbar, bath, num.product_tol)?;
    let dephaser = Dephaser::new(&kernels, hbar, num.l_max);
    let u = kick_matrix(rotor.kick, hbar, num.l_max, num.band_tol);

    let mut series = EntropySeries::new(SeriesLabel {
        picture: Picture::Quantum,
        kick: rotor.kick,
        hbar,
        eta: bath.eta,
    });
    let initial = entropy_report(&rho, num.eig_floor).map_err(|e| e.at_kick(0))?;
    series.push(0, initial.entropy, quantum_energy(&rho, hbar));
    let mut trace = vec![rho.trace()];
    let mut min_eigenvalue = vec![initial.min_eigenvalue];
    let mut hermiticity = vec![rho.hermiticity_error()];
    observe(0, &rho);

    for n in 1..=run.kicks {
        dephaser.apply(&mut rho);
        let report = entropy_report(&rho, num.eig_floor).map_err(|e| e.at_kick(n))?;
        let defect = kick_step_measured(&mut rho, &u).map_err(|e| e.at_kick(n))?;
        rho.truncate_support(SUPPORT_FLOOR);

        series.push(n, report.entropy, quantum_energy(&rho, hbar));
        trace.push(rho.trace());
        min_eigenvalue.push(report.min_eigenvalue);
        hermiticity.push(defect);
        observe(n, &rho);
    }

    Ok(QuantumRun {
        series,
        trace,
        min_eigenvalue,
        hermiticity,
        final_state: rho,
    })
}
