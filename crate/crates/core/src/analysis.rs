//! Growth-law fits and quantum/classical comparisons.
//!
//! Asymptotically the entropy grows as `S(n) = A + B ln n`. For a bath that
//! uniformizes q and a diffusive momentum spread Δp = (K/√2)√n, the
//! phase-space entropy gives B = 1/2 and
//!
//! ```text
//! A = 1/2 + ln(√π/ħ) + ln K
//! ```
//!
//! so A − ln(K/2) is K-independent: A is linear in the large-K Lyapunov
//! exponent.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fits need at least this many points.
pub const MIN_FIT_POINTS: usize = 10;
/// First kick of the default asymptotic window.
pub const DEFAULT_WINDOW_START: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Quantum,
    Classical,
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Picture::Quantum => "quantum",
            Picture::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesLabel {
    pub picture: Picture,
    pub kick: f64,
    pub hbar: f64,
    pub eta: f64,
}

impl fmt::Display for SeriesLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} K={} hbar={} eta={}",
            self.picture, self.kick, self.hbar, self.eta
        )
    }
}

/// Per-kick entropy (nats) and energy records of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySeries {
    pub kicks: Vec<usize>,
    pub entropy: Vec<f64>,
    pub energy: Vec<f64>,
    pub label: SeriesLabel,
}

impl EntropySeries {
    pub fn new(label: SeriesLabel) -> Self {
        Self {
            kicks: Vec::new(),
            entropy: Vec::new(),
            energy: Vec::new(),
            label,
        }
    }

    pub fn push(&mut self, kick: usize, entropy: f64, energy: f64) {
        debug_assert!(self.kicks.last().is_none_or(|&k| k < kick));
        self.kicks.push(kick);
        self.entropy.push(entropy);
        self.energy.push(energy);
    }

    pub fn len(&self) -> usize {
        self.kicks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kicks.is_empty()
    }

    pub fn last_kick(&self) -> usize {
        self.kicks.last().copied().unwrap_or(0)
    }

    fn window_indices(&self, window: FitWindow) -> Vec<usize> {
        self.kicks
            .iter()
            .enumerate()
            .filter(|(_, &k)| k >= window.n_min.max(1) && k <= window.n_max)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Inclusive kick range used for a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub n_min: usize,
    pub n_max: usize,
}

impl FitWindow {
    pub fn new(n_min: usize, n_max: usize) -> Self {
        Self { n_min, n_max }
    }

    /// `[10, last kick]`.
    pub fn asymptotic(series: &EntropySeries) -> Self {
        Self::new(DEFAULT_WINDOW_START, series.last_kick())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residual_rms: f64,
}

/// Ordinary least squares of y against x.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::MismatchedSeries(format!(
            "x has {} points, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::WindowTooSmall {
            points: x.len(),
            required: 2,
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        residual_rms: (ss_res / n).sqrt(),
    })
}

/// Fitted `S = A + B ln n` over a kick window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub window: FitWindow,
    pub residual_rms: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_growth(series: &EntropySeries, window: FitWindow) -> Result<GrowthFit> {
    let idx = series.window_indices(window);
    if idx.len() < MIN_FIT_POINTS {
        return Err(Error::WindowTooSmall {
            points: idx.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let x: Vec<f64> = idx.iter().map(|&i| (series.kicks[i] as f64).ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| series.entropy[i]).collect();
    let line = least_squares(&x, &y)?;
    Ok(GrowthFit {
        a: line.intercept,
        b: line.slope,
        window,
        residual_rms: line.residual_rms,
        r_squared: line.r_squared,
        points: idx.len(),
    })
}

/// Slope of ⟨E⟩ against n over a window.
pub fn energy_slope(series: &EntropySeries, window: FitWindow) -> Result<LineFit> {
    let idx = series.window_indices(window);
    let x: Vec<f64> = idx.iter().map(|&i| series.kicks[i] as f64).collect();
    let y: Vec<f64> = idx.iter().map(|&i| series.energy[i]).collect();
    least_squares(&x, &y)
}

/// Asymptotic intercept `1/2 + ln(√π/ħ) + ln K` of the diffusive growth law.
pub fn predict_a(kick: f64, hbar: f64) -> f64 {
    0.5 + (PI.sqrt() / hbar).ln() + kick.ln()
}

/// Regression of fitted A against ln K; `(K, fit)` pairs at ≥ 4 distinct K.
pub fn regress_a_vs_ln_k(fits: &[(f64, GrowthFit)]) -> Result<LineFit> {
    if fits.len() < 4 {
        return Err(Error::WindowTooSmall {
            points: fits.len(),
            required: 4,
        });
    }
    let x: Vec<f64> = fits.iter().map(|(k, _)| k.ln()).collect();
    let y: Vec<f64> = fits.iter().map(|(_, f)| f.a).collect();
    least_squares(&x, &y)
}

/// Largest |S_quantum(n) − S_classical(n)| over the window. Both series must
/// share the same kick grid.
pub fn convergence_metric(
    quantum: &EntropySeries,
    classical: &EntropySeries,
    window: FitWindow,
) -> Result<f64> {
    if quantum.kicks != classical.kicks {
        return Err(Error::MismatchedSeries(format!(
            "kick grids differ ({} vs {} records)",
            quantum.len(),
            classical.len()
        )));
    }
    let idx = quantum.window_indices(window);
    if idx.is_empty() {
        return Err(Error::WindowTooSmall {
            points: 0,
            required: 1,
        });
    }
    Ok(idx
        .iter()
        .map(|&i| (quantum.entropy[i] - classical.entropy[i]).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn label() -> SeriesLabel {
        SeriesLabel {
            picture: Picture::Classical,
            kick: 3.5,
            hbar: 0.46,
            eta: 1.0,
        }
    }

    fn synthetic(a: f64, b: f64, n_max: usize) -> EntropySeries {
        let mut s = EntropySeries::new(label());
        for n in 0..=n_max {
            let v = if n == 0 { 0.0 } else { a + b * (n as f64).ln() };
            s.push(n, v, 0.0);
        }
        s
    }

    #[test]
    fn exact_log_law_is_recovered() {
        let s = synthetic(2.0, 0.5, 100);
        let fit = fit_growth(&s, FitWindow::asymptotic(&s)).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-12);
        assert!((fit.b - 0.5).abs() < 1e-12);
        assert_eq!(fit.points, 91);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn short_window_is_rejected() {
        let s = synthetic(2.0, 0.5, 18);
        let err = fit_growth(&s, FitWindow::asymptotic(&s)).unwrap_err();
        assert!(matches!(err, Error::WindowTooSmall { points: 9, .. }));
    }

    #[test]
    fn predicted_intercept_at_reference_values() {
        let a = predict_a(3.5, 0.46);
        let expected = 0.5 + (PI.sqrt() / 0.46).ln() + 3.5f64.ln();
        assert!((a - expected).abs() < 1e-15);
        assert!((a - 3.10166).abs() < 1e-5);
        assert!((predict_a(7.0, 0.46) - a - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn intercept_minus_lyapunov_is_constant() {
        let d: Vec<f64> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&k: &f64| predict_a(k, 0.46) - (k / 2.0).ln())
            .collect();
        for w in d.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn regression_of_exact_intercepts() {
        let fits: Vec<(f64, GrowthFit)> = [3.5, 5.0, 7.0, 10.0]
            .iter()
            .map(|&k| {
                let s = synthetic(1.3 + f64::ln(k), 0.5, 60);
                (k, fit_growth(&s, FitWindow::asymptotic(&s)).unwrap())
            })
            .collect();
        let line = regress_a_vs_ln_k(&fits).unwrap();
        assert!((line.slope - 1.0).abs() < 1e-10);
        assert!((line.r_squared - 1.0).abs() < 1e-12);
        assert!(regress_a_vs_ln_k(&fits[..3]).is_err());
    }

    #[test]
    fn identical_series_have_zero_gap() {
        let s = synthetic(2.0, 0.5, 50);
        let w = FitWindow::new(10, 50);
        assert_eq!(convergence_metric(&s, &s, w).unwrap(), 0.0);
        let t = synthetic(2.0, 0.5, 40);
        assert!(convergence_metric(&s, &t, w).is_err());
    }

    proptest! {
        #[test]
        fn recovers_any_log_law(a in -5.0f64..5.0, b in -2.0f64..2.0, n_max in 20usize..400) {
            let s = synthetic(a, b, n_max);
            let fit = fit_growth(&s, FitWindow::asymptotic(&s)).unwrap();
            prop_assert!((fit.a - a).abs() < 1e-10);
            prop_assert!((fit.b - b).abs() < 1e-10);
        }

        #[test]
        fn subsampling_keeps_the_fit(a in 0.0f64..4.0, b in 0.2f64..0.8, wiggle in 0.0f64..0.02) {
            let mut s = synthetic(a, b, 200);
            for (i, v) in s.entropy.iter_mut().enumerate() {
                *v += wiggle * ((i as f64) * 1.7).sin();
            }
            let full = fit_growth(&s, FitWindow::asymptotic(&s)).unwrap();
            let mut half = EntropySeries::new(label());
            for i in (0..s.len()).step_by(2) {
                half.push(s.kicks[i], s.entropy[i], 0.0);
            }
            let sub = fit_growth(&half, FitWindow::asymptotic(&half)).unwrap();
            let tol = 1e-9 + 4.0 * full.residual_rms;
            prop_assert!((full.b - sub.b).abs() <= tol, "{} vs {}", full.b, sub.b);
        }
    }
}
