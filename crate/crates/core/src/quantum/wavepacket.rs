use num_complex::Complex64;

use crate::error::{Error, Result};

/// Edge amplitude above which the basis is considered too small.
pub const EDGE_AMPLITUDE_TOL: f64 = 1e-14;
/// Lattice momentum variance, in units of ħ², targeted by [`make_wavepacket`].
pub const TARGET_VARIANCE: f64 = 0.25;

/// Initial pure state `a_l = N exp(−a l² + b l)` in the momentum basis
/// `l ∈ [−l_max, l_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub a_param: f64,
    pub b_param: Complex64,
    pub l_max: usize,
    /// `coeffs[l + l_max] = a_l`, normalized.
    pub coeffs: Vec<Complex64>,
}

impl WavePacket {
    /// Packet with an explicit width parameter `a`, centred at momentum
    /// `p_center` and angle `q_center`: b = 2a·p_center/ħ − i·q_center.
    pub fn with_width(
        a: f64,
        hbar: f64,
        p_center: f64,
        q_center: f64,
        l_max: usize,
    ) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "packet width parameter must be positive (got {a})"
            )));
        }
        let l0 = p_center / hbar;
        let b = Complex64::new(2.0 * a * l0, -q_center);
        // −a l² + b l = −a (l − l0)² + a l0² − i q_c l; the constant drops out
        // under normalization.
        let mut coeffs: Vec<Complex64> = (-(l_max as i64)..=l_max as i64)
            .map(|l| {
                let lf = l as f64;
                let mag = (-a * (lf - l0) * (lf - l0)).exp();
                Complex64::from_polar(mag, -q_center * lf)
            })
            .collect();
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::BasisTruncation {
                l_max,
                edge_amplitude: f64::INFINITY,
            });
        }
        for c in &mut coeffs {
            *c /= norm;
        }
        let edge = coeffs[0].norm().max(coeffs[coeffs.len() - 1].norm());
        if edge >= EDGE_AMPLITUDE_TOL {
            return Err(Error::BasisTruncation {
                l_max,
                edge_amplitude: edge,
            });
        }
        Ok(Self {
            a_param: a,
            b_param: b,
            l_max,
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Amplitude at momentum index `l`.
    pub fn amplitude(&self, l: i64) -> Complex64 {
        let idx = l + self.l_max as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Indices `l` with their amplitudes, skipping exact zeros.
    pub fn support(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.l_max as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(move |(i, &c)| (i as i64 - off, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨l⟩ and ⟨l²⟩ − ⟨l⟩².
    pub fn index_moments(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (l, c) in self.support() {
            let w = c.norm_sqr();
            m1 += w * l as f64;
            m2 += w * (l * l) as f64;
        }
        (m1, m2 - m1 * m1)
    }

    /// Δp = ħ·sqrt(var l).
    pub fn momentum_spread(&self, hbar: f64) -> f64 {
        hbar * self.index_moments().1.sqrt()
    }
}

/// Lattice variance of |a_l|² ∝ exp(−2a(l − l0)²).
fn lattice_variance(a: f64, l0: f64) -> f64 {
    let centre = l0.round() as i64;
    let half = ((40.0 / a).sqrt().ceil() as i64).max(4);
    let (mut w0, mut w1, mut w2) = (0.0, 0.0, 0.0);
    for l in centre - half..=centre + half {
        let x = l as f64 - l0;
        let w = (-2.0 * a * x * x).exp();
        w0 += w;
        w1 += w * x;
        w2 += w * x * x;
    }
    let mean = w1 / w0;
    w2 / w0 - mean * mean
}

/// Width parameter `a` for which the lattice momentum variance equals
/// (ħ/2)², so Δp = ħ/2 exactly on the integer lattice. The continuum value
/// is a = 1; sampling at integers shifts it slightly depending on the
/// fractional part of l0.
pub fn calibrated_width(l0: f64) -> f64 {
    let f = |ln_a: f64| lattice_variance(ln_a.exp(), l0) - TARGET_VARIANCE;
    let (mut lo, mut hi) = ((0.05f64).ln(), (20.0f64).ln());
    if f(hi) > 0.0 {
        // half-integer l0: the variance never drops below 1/4
        return hi.exp();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Initial packet centred at (q_center, p_center) with Δp = ħ/2.
pub fn make_wavepacket(
    hbar: f64,
    p_center: f64,
    q_center: f64,
    l_max: usize,
) -> Result<WavePacket> {
    let a = calibrated_width(p_center / hbar);
    WavePacket::with_width(a, hbar, p_center, q_center, l_max)
}
