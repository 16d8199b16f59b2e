//! The kick operator ⟨l|U_k|m⟩ = i^{l−m} J_{l−m}(K/ħ) and its action
//! ρ → U ρ U†.

use num_complex::Complex64;
use rayon::prelude::*;

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::params::BAND_MARGIN;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerated trace change across one kick before the basis is declared too
/// small.
pub const LEAK_TOL: f64 = 1e-6;

/// J_0(x) … J_{n_max}(x) by Miller's backward recurrence, normalized with
/// J_0 + 2 Σ_{k≥1} J_{2k} = 1.
pub fn bessel_j_orders(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    let ax = x.abs();
    if ax < 1e-150 {
        // J_0 = 1, J_1 = x/2, higher orders underflow
        out[0] = 1.0;
        if n_max >= 1 {
            out[1] = x / 2.0;
        }
        return out;
    }
    let top = (n_max as f64).max(ax);
    let mut start = (top + 30.0 + (50.0 * top).sqrt()).ceil() as usize;
    start += start % 2;

    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let mut buf = vec![0.0; start + 1];
    buf[start] = cur;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        buf[k - 1] = cur;
        if cur.abs() > 1e250 {
            for v in buf[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            next *= 1e-250;
            cur *= 1e-250;
        }
    }
    for (k, v) in buf.iter().enumerate() {
        if k == 0 {
            norm += v;
        } else if k % 2 == 0 {
            norm += 2.0 * v;
        }
    }
    for (k, o) in out.iter_mut().enumerate() {
        let v = buf[k] / norm;
        // J_n(−x) = (−1)^n J_n(x)
        *o = if x < 0.0 && k % 2 == 1 { -v } else { v };
    }
    out
}

/// Banded Toeplitz kick matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KickMatrix {
    pub dim: usize,
    pub kappa: f64,
    /// Entries with |l − m| > band_width are exactly zero.
    pub band_width: usize,
    /// `taps[d + band_width] = i^d J_d(K/ħ)` for d ∈ [−W, W].
    pub taps: Vec<Complex64>,
}

impl KickMatrix {
    #[inline]
    pub fn tap(&self, d: i64) -> Complex64 {
        if d.unsigned_abs() as usize > self.band_width {
            ZERO
        } else {
            self.taps[(d + self.band_width as i64) as usize]
        }
    }

    /// ⟨l|U|m⟩ by row/column index.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.tap(row as i64 - col as i64)
    }

    pub fn is_identity(&self) -> bool {
        self.band_width == 0 && self.taps[0] == Complex64::new(1.0, 0.0)
    }

    /// Dense row-major copy, for tests and small systems.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.entry(i, j);
            }
        }
        out
    }
}

/// i^d for integer d.
fn i_pow(d: i64) -> Complex64 {
    match d.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Builds U_k for basis half-width `l_max`. The band covers at least
/// K/ħ + 40 orders and extends until |J_ν| drops below `band_tol`.
pub fn kick_matrix(kick: f64, hbar: f64, l_max: usize, band_tol: f64) -> KickMatrix {
    let dim = 2 * l_max + 1;
    let kappa = kick / hbar;
    if kappa == 0.0 {
        return KickMatrix {
            dim,
            kappa,
            band_width: 0,
            taps: vec![Complex64::new(1.0, 0.0)],
        };
    }
    let min_band = kappa.abs().ceil() as usize + BAND_MARGIN;
    let orders = bessel_j_orders(kappa, min_band + 60);
    let last_significant = orders
        .iter()
        .rposition(|j| j.abs() >= band_tol)
        .unwrap_or(0);
    let band_width = min_band.max(last_significant).min(dim - 1);

    let taps = (-(band_width as i64)..=band_width as i64)
        .map(|d| {
            let j = orders[d.unsigned_abs() as usize];
            // J_{−n} = (−1)^n J_n
            let j = if d < 0 && d % 2 != 0 { -j } else { j };
            i_pow(d) * j
        })
        .collect();
    KickMatrix {
        dim,
        kappa,
        band_width,
        taps,
    }
}

/// ρ ← U ρ U†, followed by re-symmetrization. Only the occupied support and
/// band of ρ are touched. Fails if more than [`LEAK_TOL`] of the trace leaves
/// the basis.
pub fn kick_step(rho: &mut DensityMatrix, u: &KickMatrix) -> Result<()> {
    kick_step_measured(rho, u).map(|_| ())
}

/// [`kick_step`], returning max |ρ'_ij − conj(ρ'_ji)| of U ρ U† as computed,
/// before re-symmetrization.
pub fn kick_step_measured(rho: &mut DensityMatrix, u: &KickMatrix) -> Result<f64> {
    let n = rho.dim();
    if u.dim != n {
        return Err(Error::DimensionMismatch {
            rho: n,
            kick: u.dim,
        });
    }
    if u.is_identity() {
        return Ok(0.0);
    }
    let Some((lo, hi)) = rho.support() else {
        return Ok(0.0);
    };
    let trace_before = rho.trace();
    let w = u.band_width;
    let b = rho.bandwidth();

    // T = U ρ, with row l holding columns j ∈ [l − w − b, l + w + b].
    let tw = w + b;
    let t_width = 2 * tw + 1;
    let row_lo = lo.saturating_sub(w);
    let row_hi = (hi + w).min(n - 1);
    let rows = row_hi - row_lo + 1;
    let mut t = vec![ZERO; rows * t_width];
    t.par_chunks_mut(t_width).enumerate().for_each(|(r, trow)| {
        let l = row_lo + r;
        let m_lo = lo.max(l.saturating_sub(w));
        let m_hi = hi.min(l + w);
        for m in m_lo..=m_hi {
            let ulm = u.tap(l as i64 - m as i64);
            let j_lo = lo.max(m.saturating_sub(b));
            let j_hi = hi.min(m + b);
            let rho_row = rho.row(m);
            for j in j_lo..=j_hi {
                let v = rho_row[j];
                if v != ZERO {
                    trow[j + tw - l] += ulm * v;
                }
            }
        }
    });

    // ρ' = T U†, band 2w + b around the diagonal.
    let mut out = vec![ZERO; n * n];
    out.par_chunks_mut(n)
        .enumerate()
        .skip(row_lo)
        .take(rows)
        .for_each(|(l, orow)| {
            let trow = &t[(l - row_lo) * t_width..(l - row_lo + 1) * t_width];
            let k_lo = row_lo.max(l.saturating_sub(2 * w + b));
            let k_hi = row_hi.min(l + 2 * w + b);
            for (k, slot) in orow.iter_mut().enumerate().take(k_hi + 1).skip(k_lo) {
                let j_lo = lo.max(k.saturating_sub(w)).max(l.saturating_sub(tw));
                let j_hi = hi.min(k + w).min(l + tw);
                let mut acc = ZERO;
                for j in j_lo..=j_hi {
                    acc += trow[j + tw - l] * u.tap(k as i64 - j as i64).conj();
                }
                *slot = acc;
            }
        });
    let reach = 2 * w + b;
    let defect = (row_lo..=row_hi)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in i..=row_hi.min(i + reach) {
                worst = worst.max((out[i * n + j] - out[j * n + i].conj()).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    rho.replace_data(out);
    rho.symmetrize();

    let drift = (rho.trace() - trace_before).abs();
    if drift > LEAK_TOL {
        return Err(Error::BasisLeak { drift });
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::pure_density;
    use crate::quantum::wavepacket::make_wavepacket;
    use std::f64::consts::PI;

    /// Σ_k (−1)^k (x/2)^{2k+n} / (k! (k+n)!), 200 terms.
    fn bessel_series(n: usize, x: f64) -> f64 {
        let h = x / 2.0;
        let mut term = h.powi(n as i32) / (1..=n).map(|v| v as f64).product::<f64>();
        let mut sum = term;
        for k in 1..200 {
            term *= -h * h / (k as f64 * (k + n) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn miller_matches_power_series() {
        let x = 3.5 / 0.46;
        let j = bessel_j_orders(x, 10);
        for (n, v) in j.iter().enumerate() {
            assert!((v - bessel_series(n, x)).abs() < 1e-10, "J_{n}");
        }
    }

    #[test]
    fn bessel_at_zero() {
        let j = bessel_j_orders(0.0, 5);
        assert_eq!(j, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_kick_is_identity() {
        let u = kick_matrix(0.0, 0.46, 10, 1e-16);
        assert!(u.is_identity());
        let psi = make_wavepacket(0.46, PI * 0.46, 0.0, 10).unwrap();
        let mut rho = pure_density(&psi);
        let before = rho.clone();
        kick_step(&mut rho, &u).unwrap();
        assert_eq!(rho, before);
    }

    #[test]
    fn kick_matrix_is_toeplitz_and_banded() {
        let u = kick_matrix(3.5, 0.46, 80, 1e-16);
        assert!(u.band_width >= (3.5f64 / 0.46).ceil() as usize + 40);
        assert_eq!(u.entry(50, 47), u.entry(20, 17));
        assert_eq!(u.entry(0, u.band_width + 1), ZERO);
    }

    #[test]
    fn interior_columns_have_unit_norm() {
        let u = kick_matrix(3.5, 0.46, 80, 1e-16);
        let n = u.dim;
        for col in [u.band_width, n / 2, n - 1 - u.band_width] {
            let s: f64 = (0..n).map(|r| u.entry(r, col).norm_sqr()).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let u = kick_matrix(3.5, 0.46, 50, 1e-16);
        let mut rho = DensityMatrix::zeros(40);
        assert!(matches!(
            kick_step(&mut rho, &u),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn small_basis_leaks() {
        let psi = make_wavepacket(0.46, PI * 0.46, 0.0, 12).unwrap();
        let mut rho = pure_density(&psi);
        let u = kick_matrix(3.5, 0.46, 12, 1e-16);
        assert!(matches!(
            kick_step(&mut rho, &u),
            Err(Error::BasisLeak { .. })
        ));
    }
}
