//! Hand-written SVG 1.1 line plots.

use std::fmt::Write as _;

use crate::error::{CliError, CliResult};
use crate::table::Table;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Data range widened by 5% on each side; a flat range is widened by 5%
/// of its magnitude, or by 0.05 around zero.
pub fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 {
        0.05 * span
    } else if lo != 0.0 {
        0.05 * lo.abs()
    } else {
        0.05
    };
    (lo - pad, hi + pad)
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values
        .filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((a, b)) => Some((a.min(v), b.max(v))),
        })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Multiples of a 1-2-5 step inside `[lo, hi]`, about `TICKS` of them.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let raw = (hi - lo) / TICKS as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    if v.abs() < 1e-9 * step {
        return "0".into();
    }
    let mag = v.abs().max(step);
    if !(1e-3..1e5).contains(&mag) {
        format!("{v:.2e}")
    } else {
        let digits = (-step.log10().floor()).clamp(0.0, 6.0) as usize;
        format!("{v:.digits$}")
    }
}

/// Lines of `columns` against the first column of `table`.
pub fn render(table: &Table, columns: &[String]) -> CliResult<String> {
    if table.rows.is_empty() {
        return Err(CliError::usage("nothing to plot: the CSV has no data rows"));
    }
    if columns.is_empty() {
        return Err(CliError::usage("no columns selected"));
    }
    let x_name = &table.header[0];
    let xs = table.column(x_name).expect("first column exists");
    let mut series = Vec::new();
    for name in columns {
        let ys = table.column(name).ok_or_else(|| {
            CliError::usage(format!("unknown column `{name}` (available: {})", table.header.join(", ")))
        })?;
        series.push((name.as_str(), ys));
    }
    let (x_lo, x_hi) = padded_range_or_unit(finite_range(xs.iter().copied()));
    let (y_lo, y_hi) = padded_range_or_unit(finite_range(series.iter().flat_map(|(_, ys)| ys.iter().copied())));

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );

    let (x_ticks, x_step) = ticks(x_lo, x_hi);
    for xv in x_ticks {
        let x = px(xv);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd" stroke-width="0.5"/>"##,
            TOP,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            escape(&tick_label(xv, x_step))
        );
    }
    let (y_ticks, y_step) = ticks(y_lo, y_hi);
    for yv in y_ticks {
        let y = py(yv);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="0.5"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            escape(&tick_label(yv, y_step))
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(x_name)
    );
    let y_label = if series.len() == 1 { series[0].0 } else { "value" };
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (i, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (&x, &y) in xs.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { 'L' } else { 'M' }, px(x), py(y));
                pen_down = true;
            } else {
                // sentinels break the line
                pen_down = false;
            }
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn padded_range_or_unit(r: Option<(f64, f64)>) -> (f64, f64) {
    match r {
        Some((lo, hi)) => padded_range(lo, hi),
        None => (0.0, 1.0),
    }
}
