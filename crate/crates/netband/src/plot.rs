//! Static SVG line charts of mean cumulative regret with ±1 std bands.
//!
//! Output depends only on the CSV contents: series keep first-appearance
//! order and every coordinate is printed with fixed precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use netband_core::harness::mean_std;

use crate::records::Records;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub x_label: String,
    pub y_label: String,
    /// Tick labels for a categorical x axis (policy sweeps).
    pub categories: Option<Vec<String>>,
    pub series: Vec<Series>,
}

fn position<T: PartialEq>(keys: &mut Vec<T>, key: T) -> usize {
    keys.iter().position(|k| *k == key).unwrap_or_else(|| {
        keys.push(key);
        keys.len() - 1
    })
}

/// Groups rows into series: one per policy and problem size for traces,
/// one per policy for sweeps.
pub fn chart_from_records(records: &Records) -> Result<Chart> {
    if records.is_empty() {
        bail!("the CSV has no data rows");
    }
    match records {
        Records::Traces(rows) => {
            let mut keys = Vec::new();
            let mut groups: Vec<BTreeMap<usize, Vec<f64>>> = Vec::new();
            for row in rows {
                let i = position(&mut keys, (row.policy.clone(), row.units, row.arms, row.sparsity, row.horizon));
                if i == groups.len() {
                    groups.push(BTreeMap::new());
                }
                groups[i].entry(row.t).or_default().push(row.cum_regret);
            }
            let policies_unique = {
                let mut p: Vec<&String> = keys.iter().map(|k| &k.0).collect();
                p.dedup();
                p.len() == keys.len()
            };
            let series = keys
                .iter()
                .zip(groups)
                .map(|((policy, n, a, s, t), points)| {
                    let label =
                        if policies_unique { policy.clone() } else { format!("{policy} N={n} A={a} s={s} T={t}") };
                    let mut series = Series { label, x: Vec::new(), mean: Vec::new(), std: Vec::new() };
                    for (t, values) in points {
                        let (m, sd) = mean_std(&values);
                        series.x.push(t as f64);
                        series.mean.push(m);
                        series.std.push(sd);
                    }
                    series
                })
                .collect();
            Ok(Chart { x_label: "round t".into(), y_label: "cumulative regret".into(), categories: None, series })
        }
        Records::Sweep(rows) => {
            let numeric = rows.iter().all(|r| r.axis_value.parse::<f64>().is_ok());
            let mut categories = Vec::new();
            let mut keys = Vec::new();
            let mut series: Vec<Series> = Vec::new();
            for row in rows {
                let x = if numeric {
                    row.axis_value.parse::<f64>().expect("checked numeric")
                } else {
                    position(&mut categories, row.axis_value.clone()) as f64
                };
                let i = position(&mut keys, row.policy.clone());
                if i == series.len() {
                    series.push(Series { label: row.policy.clone(), x: Vec::new(), mean: Vec::new(), std: Vec::new() });
                }
                series[i].x.push(x);
                series[i].mean.push(row.mean_final_regret);
                series[i].std.push(row.std_final_regret);
            }
            Ok(Chart {
                x_label: if numeric { "axis value".into() } else { "policy".into() },
                y_label: "final cumulative regret".into(),
                categories: (!numeric).then_some(categories),
                series,
            })
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn render_svg(chart: &Chart) -> Result<String> {
    let points = chart.series.iter().flat_map(|s| s.x.iter().zip(s.mean.iter().zip(&s.std)));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    let mut any = false;
    for (&x, (&m, &sd)) in points {
        if !(x.is_finite() && m.is_finite() && sd.is_finite()) {
            bail!("non-finite value in plot data");
        }
        any = true;
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(m - sd);
        y1 = y1.max(m + sd);
    }
    if !any {
        bail!("nothing to plot");
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;

    // Axes and ticks.
    let (bx, by) = (LEFT, TOP + plot_h);
    writeln!(svg, r#"<line x1="{bx:.2}" y1="{by:.2}" x2="{:.2}" y2="{by:.2}" stroke="black"/>"#, LEFT + plot_w)?;
    writeln!(svg, r#"<line x1="{bx:.2}" y1="{TOP:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="black"/>"#)?;
    let x_ticks: Vec<(f64, String)> = match &chart.categories {
        Some(names) => names.iter().enumerate().map(|(i, n)| (i as f64, n.clone())).collect(),
        None => (0..=TICKS)
            .map(|k| {
                let v = x0 + (x1 - x0) * k as f64 / TICKS as f64;
                (v, tick_label(v))
            })
            .collect(),
    };
    for (v, label) in &x_ticks {
        let x = sx(*v);
        writeln!(svg, r#"<line x1="{x:.2}" y1="{by:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, by + 5.0)?;
        writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, by + 20.0, escape(label))?;
    }
    for k in 0..=TICKS {
        let v = y0 + (y1 - y0) * k as f64 / TICKS as f64;
        let y = sy(v);
        writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{bx:.2}" y2="{y:.2}" stroke="black"/>"#, bx - 5.0)?;
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, bx - 8.0, y + 4.0, tick_label(v))?;
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&chart.x_label)
    )?;
    let (lx, ly) = (20.0, TOP + plot_h / 2.0);
    writeln!(
        svg,
        r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
        escape(&chart.y_label)
    )?;

    // Bands first so every line stays visible on top of them.
    for (i, s) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper = s.x.iter().zip(s.mean.iter().zip(&s.std)).map(|(&x, (&m, &sd))| (sx(x), sy(m + sd)));
        let lower = s.x.iter().zip(s.mean.iter().zip(&s.std)).rev().map(|(&x, (&m, &sd))| (sx(x), sy(m - sd)));
        let pts: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(svg, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, pts.join(" "))?;
    }
    for (i, s) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s.x.iter().zip(&s.mean).map(|(&x, &m)| format!("{:.2},{:.2}", sx(x), sy(m))).collect();
        writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "))?;
    }

    // Legend.
    let lx = LEFT + plot_w + 15.0;
    for (i, s) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = TOP + 10.0 + 20.0 * i as f64;
        writeln!(svg, r#"<rect x="{lx:.2}" y="{:.2}" width="14" height="10" fill="{color}"/>"#, y - 9.0)?;
        writeln!(svg, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, lx + 20.0, escape(&s.label))?;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::read_records;

    const SWEEP: &str = "axis_value,policy,mean_final_regret,std_final_regret\n\
        etc-known,etc-known,300,20\netc-unknown,etc-unknown,1500,100\nucb,ucb,2500,10\n";

    fn chart(text: &str) -> Result<Chart> {
        chart_from_records(&read_records(text.as_bytes())?)
    }

    #[test]
    fn one_series_per_policy() {
        let svg = render_svg(&chart(SWEEP).unwrap()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert!(!svg.contains("href"));
    }

    #[test]
    fn trace_reps_are_averaged() {
        let text = "run_id,policy,N,A,s,T,rep,seed,t,inst_regret,cum_regret,phase\n\
            0,ucb,3,2,1,2,0,1,1,0.5,0.5,explore\n0,ucb,3,2,1,2,0,1,2,0.5,1,explore\n\
            1,ucb,3,2,1,2,1,2,1,0.3,0.3,explore\n1,ucb,3,2,1,2,1,2,2,0.3,0.6,explore\n";
        let c = chart(text).unwrap();
        assert_eq!(c.series.len(), 1);
        assert_eq!(c.series[0].x, [1.0, 2.0]);
        assert!((c.series[0].mean[1] - 0.8).abs() < 1e-12);
        let svg = render_svg(&c).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(render_svg(&c).unwrap(), svg);
    }

    #[test]
    fn empty_data_is_an_error() {
        assert!(chart("axis_value,policy,mean_final_regret,std_final_regret\n").is_err());
    }
}
