//! Artifact emission: CSV tables and standalone SVG figures.
//!
//! Output is fully deterministic — fixed-precision formatting, no
//! timestamps, no external renderer — so identical runs produce
//! byte-identical files. Values carry 12 significant digits, enough to
//! reconstruct the f64 within 1e-11 relative error on re-parse.

use std::fmt::Write as _;
use std::path::Path;

use crate::evolve::TrajectoryRecord;
use crate::experiment::{DynamicsResult, Source, SweepResult, YieldCurve};
use crate::spin::DIM;

pub type Result<T, E = ReportError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("IoFailure: {0}")]
    Io(#[from] std::io::Error),
}

fn fmt_val(v: f64) -> String {
    format!("{v:.11e}")
}

// ---------------------------------------------------------------- CSV

/// Header + rows for one angle curve: `theta_rad, yields, source`.
pub fn curve_csv(curve: &YieldCurve) -> String {
    let mut out = String::from("theta_rad,singlet_yield,triplet_yield,source\n");
    push_curve_rows(&mut out, curve);
    out
}

/// Both sweep curves in one table, quantum rows first.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("theta_rad,singlet_yield,triplet_yield,source\n");
    push_curve_rows(&mut out, &result.quantum);
    push_curve_rows(&mut out, &result.oracle);
    out
}

fn push_curve_rows(out: &mut String, curve: &YieldCurve) {
    for i in 0..curve.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_val(curve.theta[i]),
            fmt_val(curve.singlet[i]),
            fmt_val(curve.triplet[i]),
            curve.source
        );
    }
}

/// Header + rows for one time series:
/// `time_s, pop_0…pop_9, yields, source`.
pub fn trajectory_csv(record: &TrajectoryRecord, source: Source) -> String {
    let mut out = trajectory_header();
    push_trajectory_rows(&mut out, record, source);
    out
}

/// Both dynamics series in one table, quantum rows first.
pub fn dynamics_csv(result: &DynamicsResult) -> String {
    let mut out = trajectory_header();
    push_trajectory_rows(&mut out, &result.quantum, Source::Quantum);
    push_trajectory_rows(&mut out, &result.oracle, Source::Oracle);
    out
}

fn trajectory_header() -> String {
    let mut out = String::from("time_s");
    for k in 0..DIM {
        let _ = write!(out, ",pop_{k}");
    }
    out.push_str(",singlet_yield,triplet_yield,source\n");
    out
}

fn push_trajectory_rows(out: &mut String, record: &TrajectoryRecord, source: Source) {
    for i in 0..record.times.len() {
        let _ = write!(out, "{}", fmt_val(record.times[i]));
        for k in 0..DIM {
            let _ = write!(out, ",{}", fmt_val(record.diagonals[i][k]));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt_val(record.singlet_yield[i]),
            fmt_val(record.triplet_yield[i]),
            source
        );
    }
}

pub fn emit_curve_csv(curve: &YieldCurve, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, curve_csv(curve))?)
}

pub fn emit_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, sweep_csv(result))?)
}

pub fn emit_trajectory_csv(record: &TrajectoryRecord, source: Source, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, trajectory_csv(record, source))?)
}

pub fn emit_dynamics_csv(result: &DynamicsResult, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, dynamics_csv(result))?)
}

// ---------------------------------------------------------------- SVG

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 58.0;
const SINGLET_COLOR: &str = "#1f77b4";
const TRIPLET_COLOR: &str = "#d62728";

/// Affine map from data coordinates to pixel coordinates.
/// Yields live in [0, 1], so only the x-range varies per figure.
struct Frame {
    x_min: f64,
    x_max: f64,
}

impl Frame {
    fn for_values(xs: &[f64]) -> Frame {
        let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Frame { x_min, x_max }
    }

    fn x(&self, v: f64) -> f64 {
        let span = self.x_max - self.x_min;
        let frac = if span > 0.0 {
            (v - self.x_min) / span
        } else {
            0.5 // degenerate single-point range: centre it
        };
        MARGIN_LEFT + frac * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - v * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() < 1e-2 || v.abs() >= 1e4 {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn push_axes(out: &mut String, frame: &Frame, x_label: &str, title: &str) {
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(0.0);
    let y1 = frame.y(1.0);
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black" stroke-width="1"/>"#
    );
    for k in 0..=4 {
        let v = frame.x_min + (frame.x_max - frame.x_min) * k as f64 / 4.0;
        let px = frame.x(v);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            tick_label(v)
        );
    }
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let py = frame.y(v);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black" stroke-width="1"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 9.0,
            py + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.2})">yield</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    // Legend: line = oracle, circle = quantum, colour = channel.
    let lx = WIDTH - MARGIN_RIGHT - 150.0;
    let _ = writeln!(
        out,
        r#"<line x1="{lx:.2}" y1="40" x2="{:.2}" y2="40" stroke="{SINGLET_COLOR}" stroke-width="2"/>"#,
        lx + 24.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="44" font-size="12">singlet (line: oracle)</text>"#,
        lx + 30.0
    );
    let _ = writeln!(
        out,
        r#"<line x1="{lx:.2}" y1="58" x2="{:.2}" y2="58" stroke="{TRIPLET_COLOR}" stroke-width="2"/>"#,
        lx + 24.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="62" font-size="12">triplet (dots: quantum)</text>"#,
        lx + 30.0
    );
}

fn push_polyline(out: &mut String, frame: &Frame, xs: &[f64], ys: &[f64], color: &str) {
    let mut points = String::new();
    for (x, y) in xs.iter().zip(ys) {
        let _ = write!(points, "{:.2},{:.2} ", frame.x(*x), frame.y(*y));
    }
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
        points.trim_end()
    );
}

fn push_markers(out: &mut String, frame: &Frame, xs: &[f64], ys: &[f64], color: &str) {
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}" fill-opacity="0.8"/>"#,
            frame.x(*x),
            frame.y(*y)
        );
    }
}

fn svg_figure(
    xs: &[f64],
    quantum: (&[f64], &[f64]),
    oracle: (&[f64], &[f64]),
    x_label: &str,
    title: &str,
) -> String {
    let frame = Frame::for_values(xs);
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    push_axes(&mut out, &frame, x_label, title);
    push_polyline(&mut out, &frame, xs, oracle.0, SINGLET_COLOR);
    push_polyline(&mut out, &frame, xs, oracle.1, TRIPLET_COLOR);
    push_markers(&mut out, &frame, xs, quantum.0, SINGLET_COLOR);
    push_markers(&mut out, &frame, xs, quantum.1, TRIPLET_COLOR);
    out.push_str("</svg>\n");
    out
}

/// Yield-vs-angle figure: oracle lines under quantum markers.
pub fn sweep_svg(result: &SweepResult) -> String {
    svg_figure(
        &result.quantum.theta,
        (&result.quantum.singlet, &result.quantum.triplet),
        (&result.oracle.singlet, &result.oracle.triplet),
        "field angle θ (rad)",
        "singlet / triplet yield vs field angle",
    )
}

/// Yield-vs-time figure: oracle lines under quantum markers.
pub fn dynamics_svg(result: &DynamicsResult) -> String {
    svg_figure(
        &result.quantum.times,
        (&result.quantum.singlet_yield, &result.quantum.triplet_yield),
        (&result.oracle.singlet_yield, &result.oracle.triplet_yield),
        "time (s)",
        "yield accumulation over time",
    )
}

pub fn emit_sweep_plot(result: &SweepResult, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, sweep_svg(result))?)
}

pub fn emit_dynamics_plot(result: &DynamicsResult, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, dynamics_svg(result))?)
}
