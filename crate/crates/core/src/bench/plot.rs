//! Grouped bar chart of a summary as standalone SVG.
//!
//! One group per instance size, one bar per optimizer inside each group.
//! Every bar is a `<rect class="bar">`; a cell missing from the summary is
//! drawn with zero height so the bar count is always optimizers × sizes.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::report::{format_float, SummaryRow};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    RMinus1,
    WallTime,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::RMinus1 => "r_minus_1",
            Metric::WallTime => "wall_time",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Metric::RMinus1 => "mean R - 1",
            Metric::WallTime => "mean wall time (s)",
        }
    }

    fn value(self, row: &SummaryRow) -> f64 {
        match self {
            Metric::RMinus1 => row.mean_r_minus_1,
            Metric::WallTime => row.mean_wall_time_s,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r_minus_1" => Ok(Metric::RMinus1),
            "wall_time" => Ok(Metric::WallTime),
            _ => Err(Error::arg(format!("unknown metric {s:?}, want r_minus_1 or wall_time"))),
        }
    }
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(rows: &[SummaryRow], metric: Metric) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::arg("nothing to plot: summary is empty"));
    }
    let mut optimizers: Vec<&str> = Vec::new();
    for r in rows {
        if !optimizers.contains(&r.optimizer.as_str()) {
            optimizers.push(&r.optimizer);
        }
    }
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();

    let lookup = |opt: &str, n: usize| -> Option<f64> {
        rows.iter()
            .find(|r| r.optimizer == opt && r.n == n)
            .map(|r| metric.value(r))
            .filter(|v| v.is_finite())
    };
    let max = rows
        .iter()
        .map(|r| metric.value(r))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let y_max = if max > 0.0 { max * 1.1 } else { 1.0 };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let group_w = plot_w / sizes.len() as f64;
    let bar_w = group_w * 0.8 / optimizers.len() as f64;
    let y = |v: f64| TOP + plot_h * (1.0 - v.max(0.0) / y_max);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{} by instance size</text>"#,
        LEFT + plot_w / 2.0,
        metric.label()
    );

    for t in 0..=4 {
        let v = y_max * t as f64 / 4.0;
        let yy = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            yy + 4.0,
            format_float(format!("{v:.3e}").parse().unwrap_or(v))
        );
    }

    for (g, &n) in sizes.iter().enumerate() {
        let gx = LEFT + g as f64 * group_w + group_w * 0.1;
        for (k, opt) in optimizers.iter().enumerate() {
            let v = lookup(opt, n).unwrap_or(0.0);
            let x = gx + k as f64 * bar_w;
            let top = y(v);
            let _ = writeln!(
                svg,
                r#"<rect class="bar" x="{x:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{} n={n}: {}</title></rect>"#,
                bar_w * 0.9,
                TOP + plot_h - top,
                PALETTE[k % PALETTE.len()],
                escape(opt),
                lookup(opt, n).map_or("n/a".to_string(), format_float)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n = {n}</text>"#,
            LEFT + (g as f64 + 0.5) * group_w,
            TOP + plot_h + 20.0
        );
    }

    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w
    );

    for (k, opt) in optimizers.iter().enumerate() {
        let ly = TOP + 10.0 + k as f64 * 20.0;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            svg,
            r#"<rect class="legend" x="{lx}" y="{ly}" width="12" height="12" fill="{}"/>"#,
            PALETTE[k % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 18.0,
            ly + 10.0,
            escape(opt)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(rows: &[SummaryRow], metric: Metric, out: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(rows, metric)?;
    std::fs::write(out, svg)?;
    Ok(())
}
