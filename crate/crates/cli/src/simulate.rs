//! One run: quantum and/or classical evolution, entropy table and fits.

use std::path::Path;

use clap::ValueEnum;
use rotorbath::analysis::{convergence_metric, energy_slope, fit_growth, predict_a, GrowthFit};
use rotorbath::{run_classical, run_quantum, EntropySeries, FitWindow, RawConfig, ValidatedConfig};
use serde::Serialize;

use crate::failure::CliResult;
use crate::output::{csv_bytes, ensure_dir, float, json_bytes, opt_float, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Quantum,
    Classical,
    Both,
}

impl Mode {
    fn quantum(self) -> bool {
        matches!(self, Mode::Quantum | Mode::Both)
    }

    fn classical(self) -> bool {
        matches!(self, Mode::Classical | Mode::Both)
    }
}

pub const ENTROPY_HEADER: [&str; 5] = [
    "kick",
    "S_quantum",
    "S_classical",
    "E_quantum",
    "E_classical",
];

#[derive(Debug, Clone, Serialize)]
pub struct PictureFit {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub residual: f64,
    pub r_squared: f64,
    pub points: usize,
    pub energy_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum FitEntry {
    Fit(PictureFit),
    Unavailable { error: String },
}

impl FitEntry {
    pub fn fit(&self) -> Option<&PictureFit> {
        match self {
            FitEntry::Fit(f) => Some(f),
            FitEntry::Unavailable { .. } => None,
        }
    }

    pub fn growth(&self, window: FitWindow) -> Option<GrowthFit> {
        self.fit().map(|f| GrowthFit {
            a: f.a,
            b: f.b,
            window,
            residual_rms: f.residual,
            r_squared: f.r_squared,
            points: f.points,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub window: FitWindow,
    #[serde(rename = "predict_A")]
    pub predict_a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum: Option<FitEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<FitEntry>,
    /// Largest |S − S_H| over the window, when both pictures ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

fn fit_entry(series: &EntropySeries, window: FitWindow) -> FitEntry {
    let fit = fit_growth(series, window).and_then(|g| {
        let e = energy_slope(series, window)?;
        Ok(PictureFit {
            a: g.a,
            b: g.b,
            residual: g.residual_rms,
            r_squared: g.r_squared,
            points: g.points,
            energy_slope: e.slope,
        })
    });
    match fit {
        Ok(f) => FitEntry::Fit(f),
        Err(e) => FitEntry::Unavailable {
            error: e.to_string(),
        },
    }
}

/// Series produced by one run.
pub struct Evolved {
    pub quantum: Option<EntropySeries>,
    pub classical: Option<EntropySeries>,
}

pub fn evolve(cfg: &ValidatedConfig, mode: Mode) -> CliResult<Evolved> {
    let (q, c) = rayon::join(
        || mode.quantum().then(|| run_quantum(cfg)).transpose(),
        || mode.classical().then(|| run_classical(cfg)).transpose(),
    );
    Ok(Evolved {
        quantum: q?.map(|r| r.series),
        classical: c?.map(|r| r.series),
    })
}

pub fn fit_report(cfg: &ValidatedConfig, ev: &Evolved) -> FitReport {
    let window = FitWindow::new(rotorbath::analysis::DEFAULT_WINDOW_START, cfg.kicks());
    let gap = match (&ev.quantum, &ev.classical) {
        (Some(q), Some(c)) => convergence_metric(q, c, window).ok(),
        _ => None,
    };
    FitReport {
        window,
        predict_a: predict_a(cfg.rotor().kick, cfg.rotor().hbar),
        quantum: ev.quantum.as_ref().map(|s| fit_entry(s, window)),
        classical: ev.classical.as_ref().map(|s| fit_entry(s, window)),
        gap,
    }
}

pub fn entropy_table(kicks: usize, ev: &Evolved) -> CliResult<Vec<u8>> {
    let pick = |s: &Option<EntropySeries>, n: usize, energy: bool| {
        opt_float(
            s.as_ref()
                .map(|s| if energy { s.energy[n] } else { s.entropy[n] }),
        )
    };
    csv_bytes(
        &ENTROPY_HEADER,
        (0..=kicks).map(|n| {
            vec![
                n.to_string(),
                pick(&ev.quantum, n, false),
                pick(&ev.classical, n, false),
                pick(&ev.quantum, n, true),
                pick(&ev.classical, n, true),
            ]
        }),
    )
}

/// Runs one configuration and writes `entropy.csv`, `fit.json` and
/// `manifest.json` into `dir`.
pub fn write_run(
    dir: &Path,
    subcommand: &str,
    cfg: &ValidatedConfig,
    mode: Mode,
    seed: Option<u64>,
) -> CliResult<FitReport> {
    ensure_dir(dir)?;
    let mut manifest = RunManifest::start(subcommand, dir, seed);
    manifest.config = Some(RawConfig::from_validated(cfg, seed));
    let ev = evolve(cfg, mode)?;
    let report = fit_report(cfg, &ev);
    manifest.emit("entropy.csv", &entropy_table(cfg.kicks(), &ev)?)?;
    manifest.emit("fit.json", &json_bytes(&report)?)?;
    manifest.finish()?;
    Ok(report)
}

/// One-line summary for the terminal.
pub fn describe(report: &FitReport) -> String {
    let mut parts = vec![format!("predict_A = {}", float(report.predict_a))];
    for (name, entry) in [
        ("quantum", &report.quantum),
        ("classical", &report.classical),
    ] {
        match entry {
            Some(FitEntry::Fit(f)) => parts.push(format!("{name}: A = {:.4}, B = {:.4}", f.a, f.b)),
            Some(FitEntry::Unavailable { error }) => {
                parts.push(format!("{name}: no fit ({error})"))
            }
            None => {}
        }
    }
    parts.join("; ")
}
