use num_complex::Complex64;

use super::wavepacket::WavePacket;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reduced density matrix in the truncated momentum basis
/// `l ∈ [−l_max, l_max]`, stored dense and row-major; row 0 is l = −l_max.
///
/// The bath zeroes coherences beyond a finite index distance, so most
/// operations work on the occupied [`support`](Self::support) and
/// [`bandwidth`](Self::bandwidth) only.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    l_max: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(l_max: usize) -> Self {
        let dim = 2 * l_max + 1;
        Self {
            l_max,
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    /// Builds from row-major entries.
    pub fn from_entries(l_max: usize, data: Vec<Complex64>) -> Self {
        let dim = 2 * l_max + 1;
        assert_eq!(data.len(), dim * dim);
        Self { l_max, dim, data }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub(crate) fn replace_data(&mut self, data: Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.dim * self.dim);
        self.data = data;
    }

    /// Row/column index of momentum `l`.
    #[inline]
    pub fn index_of(&self, l: i64) -> usize {
        (l + self.l_max as i64) as usize
    }

    #[inline]
    pub fn momentum_of(&self, idx: usize) -> i64 {
        idx as i64 - self.l_max as i64
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// ⟨m|ρ|n⟩ by momentum index.
    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        self.at(self.index_of(m), self.index_of(n))
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.at(i, i).re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.at(i, i).re).collect()
    }

    /// max |ρ_ij − conj(ρ_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Smallest index range containing every nonzero entry.
    pub fn support(&self) -> Option<(usize, usize)> {
        let nonzero_row = |i: usize| self.row(i).iter().any(|v| *v != ZERO);
        let lo = (0..self.dim).find(|&i| nonzero_row(i))?;
        let hi = (0..self.dim).rev().find(|&i| nonzero_row(i))?;
        Some((lo, hi))
    }

    /// Largest |i − j| over nonzero entries.
    pub fn bandwidth(&self) -> usize {
        let mut band = 0;
        for i in 0..self.dim {
            let row = self.row(i);
            // only distances beyond the current band can raise it
            if let Some(j) = row[..i.saturating_sub(band)]
                .iter()
                .position(|v| *v != ZERO)
            {
                band = band.max(i - j);
            }
            let start = (i + band + 1).min(self.dim);
            if let Some(j) = row[start..].iter().rposition(|v| *v != ZERO) {
                band = band.max(start + j - i);
            }
        }
        band
    }

    /// Replaces ρ by (ρ + ρ†)/2.
    pub fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = Complex64::new(d.re, 0.0);
            for j in i + 1..n {
                let a = self.data[i * n + j];
                let b = self.data[j * n + i];
                if a == ZERO && b == ZERO {
                    continue;
                }
                let avg = (a + b.conj()) * 0.5;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    /// Zeroes every row and column outside the contiguous range whose
    /// populations reach `floor`·Tr ρ. Dropped coherences are bounded by
    /// sqrt(floor) through positivity.
    pub fn truncate_support(&mut self, floor: f64) {
        let threshold = floor * self.trace();
        let pops = self.populations();
        let Some(lo) = pops.iter().position(|&p| p >= threshold) else {
            return;
        };
        let hi = pops.iter().rposition(|&p| p >= threshold).unwrap_or(lo);
        let n = self.dim;
        for i in 0..n {
            if i < lo || i > hi {
                self.data[i * n..(i + 1) * n].fill(ZERO);
            } else {
                self.data[i * n..i * n + lo].fill(ZERO);
                self.data[i * n + hi + 1..(i + 1) * n].fill(ZERO);
            }
        }
    }
}

/// ρ = |ψ⟩⟨ψ|, i.e. ρ_mn = a_m a_n*.
pub fn pure_density(psi: &WavePacket) -> DensityMatrix {
    let l_max = psi.l_max;
    let dim = psi.dim();
    let mut data = vec![ZERO; dim * dim];
    for (i, &am) in psi.coeffs.iter().enumerate() {
        if am == ZERO {
            continue;
        }
        for (j, &an) in psi.coeffs.iter().enumerate() {
            data[i * dim + j] = am * an.conj();
        }
    }
    DensityMatrix::from_entries(l_max, data)
}

/// ⟨E⟩ = Σ_m ρ_mm (ħm)²/2.
pub fn quantum_energy(rho: &DensityMatrix, hbar: f64) -> f64 {
    (0..rho.dim())
        .map(|i| {
            let p = hbar * rho.momentum_of(i) as f64;
            rho.at(i, i).re * p * p / 2.0
        })
        .sum()
}
