//! SVG line charts and a standalone matplotlib script for run and sweep
//! directories.

use std::path::Path;

use plotters::prelude::*;

use crate::failure::{CliResult, Failure};
use crate::output::write_atomic;
use crate::sweep::read_summary;

const SIZE: (u32, u32) = (800, 600);
const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// Columns of one `entropy.csv`; missing pictures are empty.
#[derive(Debug, Default)]
pub struct EntropyTable {
    pub kick: Vec<f64>,
    pub s_quantum: Vec<Option<f64>>,
    pub s_classical: Vec<Option<f64>>,
    pub e_quantum: Vec<Option<f64>>,
    pub e_classical: Vec<Option<f64>>,
}

pub fn read_entropy(path: &Path) -> CliResult<EntropyTable> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Failure::io(path, e))?;
    let mut t = EntropyTable::default();
    let bad = |e: String| Failure::io(path, anyhow::anyhow!(e));
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Failure::io(path, e))?;
        if rec.len() != 5 {
            return Err(bad(format!("expected 5 columns, found {}", rec.len())));
        }
        let cell = |i: usize| -> CliResult<Option<f64>> {
            let s = &rec[i];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| bad(format!("{s:?}: {e}")))
            }
        };
        t.kick
            .push(cell(0)?.ok_or_else(|| bad("empty kick".into()))?);
        t.s_quantum.push(cell(1)?);
        t.s_classical.push(cell(2)?);
        t.e_quantum.push(cell(3)?);
        t.e_classical.push(cell(4)?);
    }
    if t.kick.is_empty() {
        return Err(bad("no rows".into()));
    }
    Ok(t)
}

/// Points with x ≥ `x_min` and a value present.
fn points(x: &[f64], y: &[Option<f64>], x_min: f64) -> Vec<(f64, f64)> {
    x.iter()
        .zip(y)
        .filter_map(|(&x, y)| y.filter(|_| x >= x_min).map(|y| (x, y)))
        .collect()
}

struct Curve {
    label: String,
    color: RGBColor,
    points: Vec<(f64, f64)>,
}

fn bounds(curves: &[Curve]) -> Option<((f64, f64), (f64, f64))> {
    let pts = curves
        .iter()
        .flat_map(|c| &c.points)
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let mut b: Option<((f64, f64), (f64, f64))> = None;
    for &(x, y) in pts {
        b = Some(match b {
            None => ((x, x), (y, y)),
            Some(((x0, x1), (y0, y1))) => ((x0.min(x), x1.max(x)), (y0.min(y), y1.max(y))),
        });
    }
    b.map(|((x0, x1), (y0, y1))| {
        let pad = 0.05 * (y1 - y0).max(1e-9);
        let x1 = if x1 > x0 { x1 } else { x0 + 1.0 };
        ((x0, x1), (y0 - pad, y1 + pad))
    })
}

fn draw(
    path: &Path,
    title: &str,
    x_desc: &str,
    y_desc: &str,
    log_x: bool,
    curves: &[Curve],
) -> CliResult<bool> {
    let Some(((x0, x1), (y0, y1))) = bounds(curves) else {
        return Ok(false);
    };
    let mut svg = String::new();
    let fail = |e: &dyn std::fmt::Display| Failure::io(path, anyhow::anyhow!("rendering: {e}"));
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(|e| fail(&e))?;
        let mut builder = ChartBuilder::on(&root);
        builder
            .caption(title, ("sans-serif", 24))
            .margin(16)
            .x_label_area_size(48)
            .y_label_area_size(64);
        macro_rules! render {
            ($chart:expr) => {{
                let mut chart = $chart.map_err(|e| fail(&e))?;
                chart
                    .configure_mesh()
                    .x_desc(x_desc)
                    .y_desc(y_desc)
                    .draw()
                    .map_err(|e| fail(&e))?;
                for c in curves {
                    let color = c.color;
                    chart
                        .draw_series(LineSeries::new(
                            c.points.iter().copied(),
                            color.stroke_width(2),
                        ))
                        .map_err(|e| fail(&e))?
                        .label(c.label.as_str())
                        .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
                }
                chart
                    .configure_series_labels()
                    .background_style(WHITE.mix(0.8))
                    .border_style(BLACK)
                    .position(SeriesLabelPosition::UpperLeft)
                    .draw()
                    .map_err(|e| fail(&e))?;
            }};
        }
        if log_x {
            render!(builder.build_cartesian_2d((x0..x1).log_scale(), y0..y1));
        } else {
            render!(builder.build_cartesian_2d(x0..x1, y0..y1));
        }
        root.present().map_err(|e| fail(&e))?;
    }
    write_atomic(path, svg.as_bytes())?;
    Ok(true)
}

fn picture_curves(t: &EntropyTable, energy: bool, x_min: f64) -> Vec<Curve> {
    let (q, c) = if energy {
        (&t.e_quantum, &t.e_classical)
    } else {
        (&t.s_quantum, &t.s_classical)
    };
    [("quantum", q), ("classical", c)]
        .into_iter()
        .enumerate()
        .map(|(i, (name, col))| Curve {
            label: name.to_string(),
            color: PALETTE[i],
            points: points(&t.kick, col, x_min),
        })
        .filter(|c| !c.points.is_empty())
        .collect()
}

fn plot_run(dir: &Path) -> CliResult<Vec<String>> {
    let t = read_entropy(&dir.join("entropy.csv"))?;
    let mut written = Vec::new();
    if draw(
        &dir.join("entropy.svg"),
        "Entropy growth",
        "kick n (log scale)",
        "entropy (nats)",
        true,
        &picture_curves(&t, false, 1.0),
    )? {
        written.push("entropy.svg".into());
    }
    if draw(
        &dir.join("energy.svg"),
        "Mean energy",
        "kick n",
        "<E>",
        false,
        &picture_curves(&t, true, 0.0),
    )? {
        written.push("energy.svg".into());
    }
    Ok(written)
}

fn plot_sweep(dir: &Path) -> CliResult<Vec<String>> {
    let rows = read_summary(&dir.join("sweep_summary.csv"))?;
    let param = rows
        .first()
        .and_then(|(_, d)| d.split('_').next())
        .unwrap_or("value")
        .to_string();
    let mut written = Vec::new();
    let mut tables = Vec::new();
    for (v, sub) in &rows {
        let path = dir.join(sub).join("entropy.csv");
        if path.exists() {
            tables.push((*v, read_entropy(&path)?));
        }
    }
    if tables.is_empty() {
        return Err(Failure::io(
            dir,
            anyhow::anyhow!("no run outputs under the sweep directory"),
        ));
    }

    for (picture, pick) in [("quantum", 0usize), ("classical", 1)] {
        let curves: Vec<Curve> = tables
            .iter()
            .enumerate()
            .map(|(i, (v, t))| Curve {
                label: format!("{param} = {v}"),
                color: PALETTE[i % PALETTE.len()],
                points: points(
                    &t.kick,
                    if pick == 0 {
                        &t.s_quantum
                    } else {
                        &t.s_classical
                    },
                    1.0,
                ),
            })
            .filter(|c| !c.points.is_empty())
            .collect();
        let name = format!("entropy_{picture}.svg");
        if draw(
            &dir.join(&name),
            &format!("{picture} entropy by {param}"),
            "kick n (log scale)",
            "entropy (nats)",
            true,
            &curves,
        )? {
            written.push(name);
        }
    }

    let summary = read_fits(&dir.join("sweep_summary.csv"))?;
    let fit_curves = |col: usize, x: &dyn Fn(f64) -> f64| -> Vec<Curve> {
        [("quantum", col), ("classical", col + 3)]
            .into_iter()
            .enumerate()
            .map(|(i, (name, c))| Curve {
                label: name.to_string(),
                color: PALETTE[i],
                points: summary
                    .iter()
                    .filter_map(|(v, cols)| cols[c].map(|y| (x(*v), y)))
                    .collect(),
            })
            .filter(|c| !c.points.is_empty())
            .collect()
    };
    if param == "K"
        && draw(
            &dir.join("A_vs_lnK.svg"),
            "Intercept A against ln K",
            "ln K",
            "A",
            false,
            &fit_curves(0, &f64::ln),
        )?
    {
        written.push("A_vs_lnK.svg".into());
    }
    let name = format!("B_vs_{param}.svg");
    if draw(
        &dir.join(&name),
        &format!("Slope B against {param}"),
        &param,
        "B",
        false,
        &fit_curves(1, &|v| v),
    )? {
        written.push(name);
    }
    Ok(written)
}

/// `(value, [A_q, B_q, r2_q, A_c, B_c, r2_c])` per summary row.
fn read_fits(path: &Path) -> CliResult<Vec<(f64, [Option<f64>; 6])>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Failure::io(path, e))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Failure::io(path, e))?;
        let v: f64 = rec[0]
            .parse()
            .map_err(|e| Failure::io(path, anyhow::anyhow!("{e}")))?;
        let mut cols = [None; 6];
        for (i, c) in cols.iter_mut().enumerate() {
            *c = rec.get(i + 2).and_then(|s| s.parse().ok());
        }
        out.push((v, cols));
    }
    Ok(out)
}

const SCRIPT: &str = r#"#!/usr/bin/env python3
"""Regenerate the rotorbath figures from the CSV outputs in this directory."""
import csv
import math
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def column(rows, key, x_min=0.0):
    pts = [(float(r["kick"]), float(r[key])) for r in rows if r[key] != "" and float(r["kick"]) >= x_min]
    return [p[0] for p in pts], [p[1] for p in pts]


def run_figures(rows, out, label=""):
    fig, ax = plt.subplots()
    for key, name in (("S_quantum", "quantum"), ("S_classical", "classical")):
        x, y = column(rows, key, 1.0)
        if x:
            ax.plot(x, y, label=label + name)
    ax.set_xscale("log")
    ax.set_xlabel("kick n")
    ax.set_ylabel("entropy (nats)")
    ax.legend()
    fig.savefig(os.path.join(out, "entropy.png"), dpi=150)

    fig, ax = plt.subplots()
    for key, name in (("E_quantum", "quantum"), ("E_classical", "classical")):
        x, y = column(rows, key)
        if x:
            ax.plot(x, y, label=label + name)
    ax.set_xlabel("kick n")
    ax.set_ylabel("<E>")
    ax.legend()
    fig.savefig(os.path.join(out, "energy.png"), dpi=150)


def sweep_figures(summary):
    param = summary[0]["dir"].split("_")[0]
    for key, name in (("S_quantum", "quantum"), ("S_classical", "classical")):
        fig, ax = plt.subplots()
        for row in summary:
            path = os.path.join(HERE, row["dir"], "entropy.csv")
            if not os.path.exists(path):
                continue
            x, y = column(read(path), key, 1.0)
            if x:
                ax.plot(x, y, label="%s = %g" % (param, float(row["value"])))
        ax.set_xscale("log")
        ax.set_xlabel("kick n")
        ax.set_ylabel("entropy (nats)")
        ax.legend()
        fig.savefig(os.path.join(HERE, "entropy_%s.png" % name), dpi=150)

    ok = [r for r in summary if r["status"] == "ok"]
    for col, ylabel in (("A", "A"), ("B", "B")):
        fig, ax = plt.subplots()
        for pic in ("quantum", "classical"):
            pts = [(float(r["value"]), float(r["%s_%s" % (col, pic)])) for r in ok if r["%s_%s" % (col, pic)] != ""]
            if not pts:
                continue
            xs = [math.log(p[0]) if (col == "A" and param == "K") else p[0] for p in pts]
            ax.plot(xs, [p[1] for p in pts], "o-", label=pic)
        ax.set_xlabel("ln K" if (col == "A" and param == "K") else param)
        ax.set_ylabel(ylabel)
        ax.legend()
        fig.savefig(os.path.join(HERE, "%s_vs_%s.png" % (col, "lnK" if (col == "A" and param == "K") else param)), dpi=150)


def main():
    summary = os.path.join(HERE, "sweep_summary.csv")
    entropy = os.path.join(HERE, "entropy.csv")
    if os.path.exists(summary):
        sweep_figures(read(summary))
    elif os.path.exists(entropy):
        run_figures(read(entropy), HERE)
    else:
        sys.exit("no entropy.csv or sweep_summary.csv next to this script")


if __name__ == "__main__":
    main()
"#;

/// Writes charts and `plot.py` into `dir`; returns the files written.
pub fn run(dir: &Path) -> CliResult<Vec<String>> {
    if !dir.is_dir() {
        return Err(Failure::io(dir, anyhow::anyhow!("not a directory")));
    }
    let mut written = if dir.join("sweep_summary.csv").exists() {
        plot_sweep(dir)?
    } else if dir.join("entropy.csv").exists() {
        plot_run(dir)?
    } else {
        return Err(Failure::io(
            dir,
            anyhow::anyhow!("missing input files: neither entropy.csv nor sweep_summary.csv"),
        ));
    };
    write_atomic(&dir.join("plot.py"), SCRIPT.as_bytes())?;
    written.push("plot.py".into());
    Ok(written)
}
