//! Growth-law fitting on synthetic series.

use proptest::prelude::*;

use rotorbath::analysis::{
    convergence_metric, fit_growth, predict_a, regress_a_vs_ln_k, EntropySeries, FitWindow,
    Picture, SeriesLabel,
};
use rotorbath::Error;

fn series(kicks: impl IntoIterator<Item = usize>, law: impl Fn(f64) -> f64) -> EntropySeries {
    let mut s = EntropySeries::new(SeriesLabel {
        picture: Picture::Quantum,
        kick: 3.5,
        hbar: 0.46,
        eta: 1.0,
    });
    for n in kicks {
        s.push(n, law(n as f64), 0.0);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn exact_law_is_recovered(a in -5.0f64..5.0, b in 0.0f64..3.0, n_max in 20usize..400) {
        let s = series(0..=n_max, |n| if n == 0.0 { 0.0 } else { a + b * n.ln() });
        let fit = fit_growth(&s, FitWindow::asymptotic(&s)).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-9 && (fit.b - b).abs() < 1e-9);
        prop_assert_eq!(fit.points, n_max - 9);
        prop_assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn subsampled_series_give_the_same_fit(a in -5.0f64..5.0, b in 0.0f64..3.0, stride in 2usize..5) {
        let law = |n: f64| a + b * n.ln();
        let full = series(1..=200, law);
        let sparse = series((1..=200).step_by(stride), law);
        let w = FitWindow::new(10, 200);
        let (f, g) = (fit_growth(&full, w).unwrap(), fit_growth(&sparse, w).unwrap());
        prop_assert!((f.a - g.a).abs() < 1e-9 && (f.b - g.b).abs() < 1e-9);
    }

    #[test]
    fn predicted_intercept_shifts_with_ln_k(k1 in 0.1f64..50.0, k2 in 0.1f64..50.0, hbar in 0.01f64..2.0) {
        let d = predict_a(k2, hbar) - predict_a(k1, hbar);
        prop_assert!((d - (k2 / k1).ln()).abs() < 1e-12);
    }

    #[test]
    fn gap_is_symmetric_and_vanishes_on_identical_series(shift in -1.0f64..1.0) {
        let p = series(0..=50, |n| (1.0 + n).ln());
        let q = series(0..=50, |n| (1.0 + n).ln() + shift);
        let w = FitWindow::new(10, 50);
        let g = convergence_metric(&p, &q, w).unwrap();
        prop_assert!((g - shift.abs()).abs() < 1e-12);
        prop_assert_eq!(g, convergence_metric(&q, &p, w).unwrap());
        prop_assert_eq!(convergence_metric(&p, &p, w).unwrap(), 0.0);
    }
}

#[test]
fn intercepts_following_the_prediction_regress_with_unit_slope() {
    let fits: Vec<_> = [3.5, 5.0, 7.0, 10.0]
        .into_iter()
        .map(|k| {
            let a = predict_a(k, 0.46);
            let s = series(1..=100, |n| a + 0.5 * n.ln());
            (k, fit_growth(&s, FitWindow::new(10, 100)).unwrap())
        })
        .collect();
    let line = regress_a_vs_ln_k(&fits).unwrap();
    assert!((line.slope - 1.0).abs() < 1e-9);
    assert!((line.intercept - predict_a(1.0, 0.46)).abs() < 1e-9);
    assert!(regress_a_vs_ln_k(&fits[..3]).is_err());
}

#[test]
fn short_or_misaligned_series_are_rejected() {
    let s = series(0..=15, |n| n);
    assert!(matches!(
        fit_growth(&s, FitWindow::asymptotic(&s)),
        Err(Error::WindowTooSmall { points: 6, .. })
    ));
    let t = series(0..=16, |n| n);
    assert!(matches!(
        convergence_metric(&s, &t, FitWindow::new(10, 15)),
        Err(Error::MismatchedSeries(_))
    ));
}
