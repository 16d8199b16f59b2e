//! Parameter sweeps: one isolated run per value, then a summary table.

use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use rotorbath::analysis::{predict_a, regress_a_vs_ln_k, LineFit};
use rotorbath::RawConfig;
use serde::Serialize;

use crate::failure::{CliResult, Failure};
use crate::output::{csv_bytes, ensure_dir, float, json_bytes, RunManifest};
use crate::simulate::{write_run, FitEntry, FitReport, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "K", alias = "k")]
    Kick,
    #[value(name = "eta")]
    Eta,
    #[value(name = "hbar")]
    Hbar,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Kick => "K",
            SweepParam::Eta => "eta",
            SweepParam::Hbar => "hbar",
        })
    }
}

impl SweepParam {
    fn set(self, raw: &RawConfig, value: f64) -> RawConfig {
        let mut out = raw.clone();
        match self {
            SweepParam::Kick => out.kick = Some(value),
            SweepParam::Eta => out.eta = Some(value),
            SweepParam::Hbar => out.hbar = Some(value),
        }
        out
    }
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "value",
    "dir",
    "A_quantum",
    "B_quantum",
    "r2_quantum",
    "A_classical",
    "B_classical",
    "r2_classical",
    "status",
];

#[derive(Debug, Serialize)]
struct Regression {
    expected_slope: f64,
    expected_intercept: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantum: Option<RegressionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classical: Option<RegressionEntry>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum RegressionEntry {
    Fit(LineFit),
    Unavailable { error: String },
}

fn regression(
    pairs: impl Iterator<Item = (f64, Option<rotorbath::GrowthFit>)>,
) -> Option<RegressionEntry> {
    let fits: Option<Vec<_>> = pairs.map(|(k, f)| f.map(|f| (k, f))).collect();
    let fits = fits?;
    Some(match regress_a_vs_ln_k(&fits) {
        Ok(l) => RegressionEntry::Fit(l),
        Err(e) => RegressionEntry::Unavailable {
            error: e.to_string(),
        },
    })
}

pub fn subdir_name(param: SweepParam, value: f64) -> String {
    format!("{param}_{value}")
}

/// Runs every value and writes `sweep_summary.csv`, plus `regression.json`
/// when sweeping K. Fails after writing the summary if any value failed.
pub fn run(
    out: &Path,
    base: &RawConfig,
    param: SweepParam,
    values: &[f64],
    mode: Mode,
    seed: Option<u64>,
) -> CliResult<()> {
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Failure::config(format!(
            "a sweep needs at least two distinct values of {param}"
        )));
    }
    ensure_dir(out)?;
    let mut manifest = RunManifest::start("sweep", out, seed);
    manifest.config = Some(base.clone());

    let results: Vec<(f64, String, CliResult<FitReport>)> = values
        .par_iter()
        .map(|&v| {
            let name = subdir_name(param, v);
            let res = param
                .set(base, v)
                .resolve()
                .map_err(Failure::from)
                .and_then(|cfg| write_run(&out.join(&name), "sweep", &cfg, mode, seed))
                .map_err(|e| e.context(format!("{param} = {v}")));
            (v, name, res)
        })
        .collect();

    let fit_cols = |e: &Option<FitEntry>| -> [String; 3] {
        match e.as_ref().and_then(FitEntry::fit) {
            Some(f) => [float(f.a), float(f.b), float(f.r_squared)],
            None => Default::default(),
        }
    };
    let rows = results.iter().map(|(v, name, res)| {
        let mut row = vec![float(*v), name.clone()];
        match res {
            Ok(r) => {
                row.extend(fit_cols(&r.quantum));
                row.extend(fit_cols(&r.classical));
                row.push("ok".into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(format!("error: {e}"));
            }
        }
        row
    });
    manifest.emit("sweep_summary.csv", &csv_bytes(&SUMMARY_HEADER, rows)?)?;

    if param == SweepParam::Kick {
        let hbar = base.hbar.unwrap_or(rotorbath::params::DEFAULT_HBAR);
        let ok: Vec<(f64, &FitReport)> = results
            .iter()
            .filter_map(|(v, _, r)| r.as_ref().ok().map(|r| (*v, r)))
            .collect();
        let pick = |quantum: bool| {
            regression(ok.iter().map(|(k, r)| {
                let entry = if quantum { &r.quantum } else { &r.classical };
                (*k, entry.as_ref().and_then(|e| e.growth(r.window)))
            }))
        };
        let reg = Regression {
            expected_slope: 1.0,
            expected_intercept: predict_a(1.0, hbar),
            quantum: pick(true),
            classical: pick(false),
        };
        manifest.emit("regression.json", &json_bytes(&reg)?)?;
    }
    manifest.finish()?;

    let mut failures: Vec<Failure> = results
        .into_iter()
        .filter_map(|(_, _, r)| r.err())
        .collect();
    match failures.len() {
        0 => Ok(()),
        n => {
            failures.sort_by_key(|f| std::cmp::Reverse(f.kind));
            let worst = failures.swap_remove(0);
            Err(worst.context(format!("{n} of {} sweep values failed", values.len())))
        }
    }
}

/// Parses a sweep summary back into `(value, dir)` pairs.
pub fn read_summary(path: &Path) -> CliResult<Vec<(f64, String)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Failure::io(path, e))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Failure::io(path, e))?;
        let v: f64 = rec[0]
            .parse()
            .map_err(|e| Failure::io(path, anyhow::anyhow!("bad value {:?}: {e}", &rec[0])))?;
        out.push((v, rec[1].to_string()));
    }
    Ok(out)
}
