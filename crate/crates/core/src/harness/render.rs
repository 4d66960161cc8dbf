//! Report output: a CSV table, the JSON document, and SVG charts of bound
//! versus empirical norm.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::run::{ReportRow, RunReport};
use crate::error::{Error, Result};
use crate::maxent::PExponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg];
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(Error::invalid(format!("unknown format `{other}` (csv, json, svg)"))),
        }
    }
}

pub const CSV_HEADER: &str = "scenario,k,p,route,entropy_bits,bound,empirical,slack,verdict";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line per (scenario, p, k). `k` is `pooled` for rows pooling all
/// steady-state steps; `verdict` is empty when no diagnostics ran.
pub fn to_csv(report: &RunReport) -> Result<String> {
    check_nonempty(report)?;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let r = &row.report;
        let verdict = match &r.diagnostics {
            Some(d) if d.verdict => "pass",
            Some(_) => "fail",
            None => "",
        };
        let k = row.k.map_or_else(|| "pooled".to_string(), |k| k.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.scenario,
            k,
            r.p,
            r.entropy_source,
            r.entropy_used,
            r.bound_value,
            opt(r.empirical_lp),
            opt(r.slack),
            verdict
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}

pub fn to_json(report: &RunReport) -> Result<String> {
    check_nonempty(report)?;
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<RunReport> {
    Ok(serde_json::from_str(text)?)
}

fn check_nonempty(report: &RunReport) -> Result<()> {
    if report.rows.is_empty() {
        Err(Error::invalid("report has no rows"))
    } else {
        Ok(())
    }
}

/// One chart: rows of a single scenario, plotted against `p` (pooled rows)
/// or against `k` for a fixed `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub file_stem: String,
    pub title: String,
    pub x_label: String,
    /// Tick label and plotted position of each point.
    pub points: Vec<ChartPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub label: String,
    pub x: f64,
    pub bound: f64,
    pub empirical: Option<f64>,
}

fn p_label(p: PExponent) -> String {
    match p {
        PExponent::Infinity => "∞".to_string(),
        PExponent::Finite(v) => v.to_string(),
    }
}

/// Groups a report into charts, in the order scenarios first appear.
pub fn charts(report: &RunReport) -> Result<Vec<Chart>> {
    check_nonempty(report)?;
    let mut names: Vec<&str> = Vec::new();
    for row in &report.rows {
        if !names.contains(&row.scenario.as_str()) {
            names.push(&row.scenario);
        }
    }
    let mut out = Vec::new();
    for name in names {
        let rows: Vec<&ReportRow> = report.rows_for(name).collect();
        let (pooled, per_step): (Vec<&ReportRow>, Vec<&ReportRow>) = rows.iter().partition(|r| r.k.is_none());
        if !pooled.is_empty() {
            let mut ps: Vec<&ReportRow> = pooled;
            ps.sort_by(|a, b| a.report.p.as_f64().total_cmp(&b.report.p.as_f64()));
            out.push(Chart {
                file_stem: name.to_string(),
                title: format!("{name}: bound and empirical norm across p"),
                x_label: "p (norm exponent)".to_string(),
                // evenly spaced so that p = ∞ gets a position
                points: ps
                    .iter()
                    .enumerate()
                    .map(|(i, r)| ChartPoint {
                        label: p_label(r.report.p),
                        x: i as f64,
                        bound: r.report.bound_value,
                        empirical: r.report.empirical_lp,
                    })
                    .collect(),
            });
        }
        let mut exps: Vec<PExponent> = Vec::new();
        for r in &per_step {
            if !exps.contains(&r.report.p) {
                exps.push(r.report.p);
            }
        }
        for p in exps {
            let mut pts: Vec<&ReportRow> = per_step.iter().copied().filter(|r| r.report.p == p).collect();
            pts.sort_by_key(|r| r.k);
            out.push(Chart {
                file_stem: format!("{name}-p{p}"),
                title: format!("{name}: bound and empirical L_{} norm across steps", p_label(p)),
                x_label: "k (time step)".to_string(),
                points: pts
                    .iter()
                    .map(|r| {
                        let k = r.k.expect("per-step row");
                        ChartPoint { label: k.to_string(), x: k as f64, bound: r.report.bound_value, empirical: r.report.empirical_lp }
                    })
                    .collect(),
            });
        }
    }
    Ok(out)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Smallest of 1, 2 or 5 times a power of ten that is at least `raw`.
fn nice_step(raw: f64) -> f64 {
    if !(raw > 0.0 && raw.is_finite()) {
        return 1.0;
    }
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * base).find(|&s| s >= raw * (1.0 - 1e-12)).unwrap_or(10.0 * base)
}

pub fn chart_svg(chart: &Chart) -> String {
    let xs: Vec<f64> = chart.points.iter().map(|p| p.x).collect();
    let (xmin, xmax) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (xmin, xmax) = if xmax > xmin { (xmin, xmax) } else { (xmin - 1.0, xmax + 1.0) };
    let top = chart
        .points
        .iter()
        .flat_map(|p| [Some(p.bound), p.empirical])
        .flatten()
        .fold(0.0_f64, f64::max);
    let step = nice_step(top / 5.0);
    let ymax = (top / step).ceil().max(1.0) * step;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / ymax * plot_h;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"##);
    let _ = writeln!(w, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(w, r##"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"##, WIDTH / 2.0, escape(&chart.title));
    // axes
    let _ = writeln!(w, r##"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"##, TOP + plot_h, LEFT + plot_w, TOP + plot_h);
    let _ = writeln!(w, r##"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"##, TOP + plot_h);
    for i in 0..=(ymax / step).round() as usize {
        let v = step * i as f64;
        let y = sy(v);
        let _ = writeln!(w, r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##, LEFT - 4.0, LEFT - 6.0, y + 4.0, fmt_tick(v));
    }
    // thin out tick labels on long step sweeps
    let every = chart.points.len().div_ceil(12).max(1);
    for p in chart.points.iter().step_by(every) {
        let x = sx(p.x);
        let _ = writeln!(w, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##, TOP + plot_h, TOP + plot_h + 4.0, TOP + plot_h + 18.0, escape(&p.label));
    }
    let _ = writeln!(w, r##"<text x="{}" y="{}" text-anchor="middle">{}</text>"##, LEFT + plot_w / 2.0, HEIGHT - 12.0, escape(&chart.x_label));
    let _ = writeln!(w, r##"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">L_p norm (units of the data)</text>"##, TOP + plot_h / 2.0);

    let bound: Vec<String> = chart.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.bound))).collect();
    let _ = writeln!(w, r##"<polyline class="bound" fill="none" stroke="#d62728" stroke-width="2" stroke-dasharray="6 4" points="{}"/>"##, bound.join(" "));
    let emp: Vec<String> = chart
        .points
        .iter()
        .filter_map(|p| p.empirical.map(|e| format!("{:.2},{:.2}", sx(p.x), sy(e))))
        .collect();
    if !emp.is_empty() {
        let _ = writeln!(w, r##"<polyline class="empirical" fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##, emp.join(" "));
    }
    if chart.points.len() <= 50 {
        for p in &chart.points {
            let _ = writeln!(w, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#d62728"/>"##, sx(p.x), sy(p.bound));
            if let Some(e) = p.empirical {
                let _ = writeln!(w, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"/>"##, sx(p.x), sy(e));
            }
        }
    }
    let lx = LEFT + 16.0;
    let _ = writeln!(w, r##"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="#d62728" stroke-width="2" stroke-dasharray="6 4"/><text x="{}" y="{}">lower bound</text>"##, TOP + 8.0, lx + 24.0, TOP + 8.0, lx + 30.0, TOP + 12.0);
    let _ = writeln!(w, r##"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="#1f77b4" stroke-width="2"/><text x="{}" y="{}">empirical</text>"##, TOP + 26.0, lx + 24.0, TOP + 26.0, lx + 30.0, TOP + 30.0);
    s.push_str("</svg>\n");
    s
}

/// Writes the requested formats into `dir`: `report.csv`, `report.json` and
/// one SVG per chart. Returns the paths written.
pub fn render_report(report: &RunReport, formats: &[ReportFormat], dir: &Path) -> Result<Vec<PathBuf>> {
    check_nonempty(report)?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            ReportFormat::Csv => {
                let path = dir.join("report.csv");
                fs::write(&path, to_csv(report)?)?;
                written.push(path);
            }
            ReportFormat::Json => {
                let path = dir.join("report.json");
                fs::write(&path, to_json(report)?)?;
                written.push(path);
            }
            ReportFormat::Svg => {
                for chart in charts(report)? {
                    let path = dir.join(format!("{}.svg", chart.file_stem));
                    fs::write(&path, chart_svg(&chart))?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;
    use crate::harness::run::run_experiment;

    fn small_report() -> RunReport {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
name = "t"
realizations = 2000
steps = 3
p = [1, 2, "inf"]

[[scenario]]
kind = "prediction"
name = "iid"
process = { kind = "iid", density = { p = 2, mu = 1.0 } }
predictor = { kind = "zero" }
evaluate = [1, 2, 3]
diagnostics = false

[[scenario]]
kind = "side-information"
name = "channel"
signal_sigma = 1.0
noise_sigma = 2.0
diagnostics = false
"#,
        )
        .unwrap();
        run_experiment(&cfg).unwrap()
    }

    #[test]
    fn csv_has_one_row_per_scenario_p_k() {
        let report = small_report();
        let csv = to_csv(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len() - 1, 3 * 3 + 3);
        assert!(lines.iter().any(|l| l.starts_with("channel,pooled,inf,closed-form,")));
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
    }

    #[test]
    fn empty_report_is_an_error() {
        let mut report = small_report();
        report.rows.clear();
        assert!(to_csv(&report).is_err());
        assert!(to_json(&report).is_err());
        assert!(charts(&report).is_err());
        let dir = tempfile::tempdir().unwrap();
        assert!(render_report(&report, &ReportFormat::ALL, dir.path()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let report = small_report();
        assert_eq!(from_json(&to_json(&report).unwrap()).unwrap(), report);
    }

    #[test]
    fn charts_by_axis() {
        let report = small_report();
        let charts = charts(&report).unwrap();
        let stems: Vec<&str> = charts.iter().map(|c| c.file_stem.as_str()).collect();
        assert_eq!(stems, ["iid-p1", "iid-p2", "iid-pinf", "channel"]);
        assert_eq!(charts[3].points.iter().map(|p| p.label.as_str()).collect::<Vec<_>>(), ["1", "2", "∞"]);
        let svg = chart_svg(&charts[0]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("k (time step)") && svg.contains("L_p norm"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let written = render_report(&small_report(), &ReportFormat::ALL, dir.path()).unwrap();
        assert_eq!(written.len(), 2 + 4);
        assert!(written.iter().all(|p| p.exists()));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(nice_step(0.9), 1.0);
        assert_eq!(nice_step(1.0), 1.0);
        assert_eq!(nice_step(1.3), 2.0);
        assert_eq!(nice_step(0.03), 0.05);
        assert!((nice_step(260.0) - 500.0).abs() < 1e-9);
        assert_eq!(nice_step(0.0), 1.0);
    }
}
