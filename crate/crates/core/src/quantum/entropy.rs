use num_complex::Complex64;

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{band_eigenvalues, dense_eigenvalues};

/// Eigenvalues below this are a positivity violation, not rounding noise.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Spectrum summary of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    /// −Σ λ ln λ in nats.
    pub entropy: f64,
    pub min_eigenvalue: f64,
}

/// Eigenvalues of ρ over its occupied support; the zero block outside it is
/// omitted. Banded matrices go through the band solver.
pub fn spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let Some((lo, hi)) = rho.support() else {
        return Ok(Vec::new());
    };
    let n = hi - lo + 1;
    let band = rho.bandwidth().min(n - 1);
    if band == 0 {
        return Ok((lo..=hi).map(|i| rho.at(i, i).re).collect());
    }
    if 4 * band <= n {
        let ldab = band + 1;
        let mut ab = vec![Complex64::new(0.0, 0.0); n * ldab];
        for j in 0..n {
            for i in j.saturating_sub(band)..=j {
                ab[band + i - j + j * ldab] = rho.at(lo + i, lo + j);
            }
        }
        band_eigenvalues(n, band, &mut ab)
    } else {
        let mut a = Vec::with_capacity(n * n);
        for i in lo..=hi {
            a.extend_from_slice(&rho.row(i)[lo..=hi]);
        }
        dense_eigenvalues(n, &mut a)
    }
}

/// Von Neumann entropy and smallest eigenvalue. Eigenvalues below
/// `eig_floor` contribute nothing (x ln x → 0).
pub fn entropy_report(rho: &DensityMatrix, eig_floor: f64) -> Result<EntropyReport> {
    let eig = spectrum(rho)?;
    let mut min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if eig.len() < rho.dim() {
        min_eigenvalue = min_eigenvalue.min(0.0);
    }
    if min_eigenvalue < -POSITIVITY_TOL {
        return Err(Error::PositivityViolation {
            eigenvalue: min_eigenvalue,
        });
    }
    let entropy = eig
        .iter()
        .filter(|&&l| l > eig_floor)
        .map(|&l| -l * l.ln())
        .sum();
    Ok(EntropyReport {
        entropy,
        min_eigenvalue,
    })
}

/// S = −Tr ρ ln ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix, eig_floor: f64) -> Result<f64> {
    Ok(entropy_report(rho, eig_floor)?.entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::pure_density;
    use crate::quantum::wavepacket::make_wavepacket;
    use std::f64::consts::PI;

    fn diag(l_max: usize, values: &[f64]) -> DensityMatrix {
        let mut rho = DensityMatrix::zeros(l_max);
        for (i, &v) in values.iter().enumerate() {
            rho.set(i, i, Complex64::new(v, 0.0));
        }
        rho
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        let psi = make_wavepacket(0.46, PI * 0.46, 0.4, 25).unwrap();
        let s = von_neumann_entropy(&pure_density(&psi), 1e-14).unwrap();
        assert!(s.abs() < 1e-10, "{s}");
    }

    #[test]
    fn maximally_mixed() {
        let n = 9;
        let rho = diag(4, &vec![1.0 / n as f64; n]);
        let s = von_neumann_entropy(&rho, 1e-14).unwrap();
        assert!((s - (n as f64).ln()).abs() < 1e-13);
    }

    #[test]
    fn two_level_mixture() {
        let rho = diag(1, &[0.25, 0.75, 0.0]);
        let s = von_neumann_entropy(&rho, 1e-14).unwrap();
        let expected = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
        assert!((s - expected).abs() < 1e-14);
        assert!((s - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn rotated_mixture_keeps_its_entropy() {
        // diag(0.25, 0.75) conjugated by a complex rotation
        let (c, s) = (0.6, 0.8);
        let ph = Complex64::from_polar(1.0, 0.3);
        let mut rho = DensityMatrix::zeros(1);
        let p = [0.25, 0.75];
        let v = [
            [Complex64::new(c, 0.0), -ph.conj() * s],
            [ph * s, Complex64::new(c, 0.0)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, pk) in p.iter().enumerate() {
                    acc += v[i][k] * pk * v[j][k].conj();
                }
                rho.set(i, j, acc);
            }
        }
        let s_val = von_neumann_entropy(&rho, 1e-14).unwrap();
        assert!((s_val - 0.562335144618).abs() < 1e-10);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let rho = diag(1, &[1.2, -0.2, 0.0]);
        assert!(matches!(
            von_neumann_entropy(&rho, 1e-14),
            Err(Error::PositivityViolation { .. })
        ));
    }

    #[test]
    fn band_and_dense_paths_agree() {
        let l_max = 20;
        let psi = make_wavepacket(0.46, 0.0, 0.0, l_max).unwrap();
        let mut rho = pure_density(&psi);
        // damp coherences like a bath would, leaving bandwidth 3
        let n = rho.dim();
        for i in 0..n {
            for j in 0..n {
                let d = i.abs_diff(j);
                let f = if d > 3 {
                    0.0
                } else {
                    (-0.7 * (d * d) as f64).exp()
                };
                rho.set(i, j, rho.at(i, j) * f);
            }
        }
        let banded = spectrum(&rho).unwrap();
        let (lo, hi) = rho.support().unwrap();
        let m = hi - lo + 1;
        let mut dense = Vec::new();
        for i in lo..=hi {
            dense.extend_from_slice(&rho.row(i)[lo..=hi]);
        }
        let full = dense_eigenvalues(m, &mut dense).unwrap();
        for (a, b) in banded.iter().zip(&full) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
