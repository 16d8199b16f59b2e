//! Classical diagnostics: Lyapunov exponent, diffusion rate and marginal
//! snapshots g₁(q), g₂(p).

use std::f64::consts::PI;
use std::str::FromStr;

use clap::ValueEnum;
use rotorbath::classical::{grid_spec, husimi_init, kick_shift, marginals, BathSmear};
use rotorbath::quantum::make_wavepacket;
use rotorbath::standard_map::{diffusion_ensemble, lyapunov_ensemble};
use rotorbath::ValidatedConfig;
use serde::Serialize;

use crate::failure::{CliResult, Failure};
use crate::output::{csv_bytes, float, json_bytes, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Diagnostic {
    Lyapunov,
    Diffusion,
    Marginals,
}

/// Snapshot time: `n` is just after kick n, `n-` just before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instant {
    pub kick: usize,
    pub before: bool,
}

impl Ord for Instant {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.kick, !self.before).cmp(&(other.kick, !other.before))
    }
}

impl PartialOrd for Instant {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Instant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, before) = match s.strip_suffix('-') {
            Some(n) => (n, true),
            None => (s, false),
        };
        let kick: usize = num
            .parse()
            .map_err(|_| format!("`{s}` is not a kick index like 3 or 3-"))?;
        if before && kick == 0 {
            return Err("0- precedes the initial state".into());
        }
        Ok(Instant { kick, before })
    }
}

impl std::fmt::Display for Instant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.kick, if self.before { "-" } else { "" })
    }
}

pub struct Settings {
    pub steps: usize,
    pub ensemble: usize,
    pub seed: u64,
    pub times: Vec<Instant>,
}

#[derive(Serialize)]
struct LyapunovReport {
    #[serde(rename = "K")]
    kick: f64,
    steps: usize,
    seed: u64,
    lambda: f64,
    ln_half_k: f64,
    per_orbit: Vec<f64>,
}

#[derive(Serialize)]
struct DiffusionReport {
    #[serde(rename = "K")]
    kick: f64,
    ensemble: usize,
    steps: usize,
    seed: u64,
    #[serde(rename = "D")]
    coefficient: f64,
    intercept: f64,
    quasilinear: f64,
}

#[derive(Serialize)]
struct MarginalSummary {
    time: String,
    /// max_q |g₁ − 1/2π| · 2π
    g1_uniform_deviation: f64,
    mass: f64,
}

pub fn run(
    manifest: &mut RunManifest,
    cfg: &ValidatedConfig,
    what: Diagnostic,
    s: &Settings,
) -> CliResult<String> {
    let kick = cfg.rotor().kick;
    match what {
        Diagnostic::Lyapunov => {
            let est = lyapunov_ensemble(kick, s.steps, s.seed)?;
            let report = LyapunovReport {
                kick,
                steps: s.steps,
                seed: s.seed,
                lambda: est.mean,
                ln_half_k: (kick / 2.0).ln(),
                per_orbit: est.per_orbit,
            };
            manifest.emit("lyapunov.json", &json_bytes(&report)?)?;
            Ok(format!(
                "lambda = {:.6} (ln(K/2) = {:.6})",
                report.lambda, report.ln_half_k
            ))
        }
        Diagnostic::Diffusion => {
            let est = diffusion_ensemble(kick, s.ensemble, s.steps, s.seed)?;
            let report = DiffusionReport {
                kick,
                ensemble: s.ensemble,
                steps: s.steps,
                seed: s.seed,
                coefficient: est.coefficient,
                intercept: est.intercept,
                quasilinear: kick * kick / 2.0,
            };
            manifest.emit("diffusion.json", &json_bytes(&report)?)?;
            let rows = est
                .mean_square
                .iter()
                .enumerate()
                .map(|(n, m)| vec![n.to_string(), float(*m)]);
            manifest.emit(
                "diffusion.csv",
                &csv_bytes(&["step", "mean_square_dp"], rows)?,
            )?;
            Ok(format!(
                "D = {:.4} (K^2/2 = {:.4})",
                report.coefficient, report.quasilinear
            ))
        }
        Diagnostic::Marginals => marginal_snapshots(manifest, cfg, &s.times),
    }
}

fn marginal_snapshots(
    manifest: &mut RunManifest,
    cfg: &ValidatedConfig,
    times: &[Instant],
) -> CliResult<String> {
    if times.is_empty() {
        return Err(Failure::config("marginals need at least one --times entry"));
    }
    let mut wanted = times.to_vec();
    wanted.sort();
    wanted.dedup();
    let last = wanted.last().map(|t| t.kick).unwrap_or(0);

    let rotor = cfg.rotor();
    let run = cfg.run();
    let spec = grid_spec(cfg);
    let psi = make_wavepacket(rotor.hbar, run.p_center, run.q_center, cfg.numerics().l_max)?;
    let mut f = husimi_init(&psi, &spec, rotor.hbar)?;
    let smear = BathSmear::new(spec.nq, 1.0, cfg.bath());

    let mut q_rows = Vec::new();
    let mut p_rows = Vec::new();
    let mut summary = Vec::new();
    let mut record = |t: Instant, f: &rotorbath::PhaseSpaceGrid| {
        if !wanted.contains(&t) {
            return;
        }
        let m = marginals(f);
        let label = t.to_string();
        let uniform = 1.0 / (2.0 * PI);
        let dev = m.g1.iter().map(|g| (g - uniform).abs()).fold(0.0, f64::max) / uniform;
        for (q, g) in m.q.iter().zip(&m.g1) {
            q_rows.push(vec![label.clone(), float(*q), float(*g)]);
        }
        for (p, g) in m.p.iter().zip(&m.g2) {
            p_rows.push(vec![label.clone(), float(*p), float(*g)]);
        }
        summary.push(MarginalSummary {
            time: label,
            g1_uniform_deviation: dev,
            mass: f.mass(),
        });
    };

    record(
        Instant {
            kick: 0,
            before: false,
        },
        &f,
    );
    for n in 1..=last {
        smear.apply(&mut f);
        record(
            Instant {
                kick: n,
                before: true,
            },
            &f,
        );
        kick_shift(&mut f, rotor.kick)
            .map_err(|e| Failure::from(e).context(format!("kick {n}")))?;
        record(
            Instant {
                kick: n,
                before: false,
            },
            &f,
        );
    }

    manifest.emit("marginals_q.csv", &csv_bytes(&["time", "q", "g1"], q_rows)?)?;
    manifest.emit("marginals_p.csv", &csv_bytes(&["time", "p", "g2"], p_rows)?)?;
    manifest.emit("marginals.json", &json_bytes(&summary)?)?;
    Ok(summary
        .iter()
        .map(|s| {
            format!(
                "t = {}: max |g1 - 1/2pi| 2pi = {:.3e}",
                s.time, s.g1_uniform_deviation
            )
        })
        .collect::<Vec<_>>()
        .join("\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instants_parse() {
        assert_eq!(
            "3".parse::<Instant>().unwrap(),
            Instant {
                kick: 3,
                before: false
            }
        );
        assert_eq!(
            "1-".parse::<Instant>().unwrap(),
            Instant {
                kick: 1,
                before: true
            }
        );
        assert!("0-".parse::<Instant>().is_err());
        assert!("x".parse::<Instant>().is_err());
        assert!(
            Instant {
                kick: 1,
                before: true
            } < Instant {
                kick: 1,
                before: false
            }
        );
    }
}
