//! SVG figures from a results tree.
//!
//! Box plots show final test MSE and generalization gap per cell, with
//! whiskers at the most extreme runs within 1.5·IQR of the box and no
//! outlier points. Series plots show error diversity and median tree size
//! per generation: the median over runs, smoothed by a trailing moving
//! average of 20, with a marker every 200 generations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dsgp_core::metrics::moving_average;

use crate::aggregate::{scan, CellResults};
use crate::error::Result;
use crate::results::write_atomic;
use crate::stats::{median, quartiles};

pub const SMOOTHING_WINDOW: usize = 20;
pub const MARKER_EVERY: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Box,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub whisker_low: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_high: f64,
}

impl BoxStats {
    /// `None` for an empty sample.
    pub fn new(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let (q1, q3) = quartiles(values);
        let reach = 1.5 * (q3 - q1);
        let inside = values
            .iter()
            .copied()
            .filter(|v| *v >= q1 - reach && *v <= q3 + reach);
        let (lo, hi) = inside.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        Some(Self {
            whisker_low: lo.min(q1),
            q1,
            median: median(values),
            q3,
            whisker_high: hi.max(q3),
        })
    }
}

/// Generations that carry a marker: `0, every, 2·every, ...` below `len`.
pub fn marker_generations(len: usize, every: usize) -> Vec<usize> {
    (0..len).step_by(every.max(1)).collect()
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Value range padded so a flat series still gets a visible band.
fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

struct Frame {
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn y(&self, v: f64) -> f64 {
        let h = HEIGHT - TOP - BOTTOM;
        TOP + h * (1.0 - (v - self.y_lo) / (self.y_hi - self.y_lo))
    }

    fn open(&self, svg: &mut String, title: &str, y_label: &str) {
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            (WIDTH - RIGHT + LEFT) / 2.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (HEIGHT - BOTTOM + TOP) / 2.0,
            escape(y_label)
        );
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        for i in 0..=4 {
            let v = self.y_lo + (self.y_hi - self.y_lo) * i as f64 / 4.0;
            let y = self.y(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
                x0 - 6.0,
                y + 4.0,
                tick_label(v)
            );
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{x0:.1}" y="{TOP:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
            x1 - x0,
            HEIGHT - TOP - BOTTOM
        );
    }
}

/// One box per group, labeled underneath.
pub fn box_svg(title: &str, y_label: &str, groups: &[(String, Vec<f64>)]) -> String {
    let stats: Vec<(String, BoxStats)> = groups
        .iter()
        .filter_map(|(name, v)| BoxStats::new(v).map(|s| (name.clone(), s)))
        .collect();
    let lo = stats
        .iter()
        .map(|(_, s)| s.whisker_low)
        .fold(f64::INFINITY, f64::min);
    let hi = stats
        .iter()
        .map(|(_, s)| s.whisker_high)
        .fold(f64::NEG_INFINITY, f64::max);
    let (y_lo, y_hi) = padded_range(lo, hi);
    let frame = Frame { y_lo, y_hi };
    let mut svg = String::new();
    frame.open(&mut svg, title, y_label);

    let slot = (WIDTH - RIGHT - LEFT) / stats.len().max(1) as f64;
    let half = (slot * 0.3).min(40.0);
    for (i, (name, s)) in stats.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let color = PALETTE[i % PALETTE.len()];
        let (yl, y1, ym, y3, yh) = (
            frame.y(s.whisker_low),
            frame.y(s.q1),
            frame.y(s.median),
            frame.y(s.q3),
            frame.y(s.whisker_high),
        );
        let _ = writeln!(
            svg,
            r#"<g class="box" data-median="{}"><line x1="{cx:.1}" y1="{yh:.1}" x2="{cx:.1}" y2="{y3:.1}" stroke="black"/><line x1="{cx:.1}" y1="{y1:.1}" x2="{cx:.1}" y2="{yl:.1}" stroke="black"/><line x1="{:.1}" y1="{yh:.1}" x2="{:.1}" y2="{yh:.1}" stroke="black"/><line x1="{:.1}" y1="{yl:.1}" x2="{:.1}" y2="{yl:.1}" stroke="black"/><rect x="{:.1}" y="{y3:.1}" width="{:.1}" height="{:.1}" fill="{color}" fill-opacity="0.35" stroke="{color}"/><line class="median" x1="{:.1}" y1="{ym:.1}" x2="{:.1}" y2="{ym:.1}" stroke="black" stroke-width="2"/></g>"#,
            s.median,
            cx - half / 2.0,
            cx + half / 2.0,
            cx - half / 2.0,
            cx + half / 2.0,
            cx - half,
            2.0 * half,
            (y1 - y3).max(0.5),
            cx - half,
            cx + half,
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate({cx:.1} {:.1}) rotate(20)" text-anchor="start">{}</text>"#,
            HEIGHT - BOTTOM + 14.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// One line per series against generation, with markers.
pub fn series_svg(title: &str, y_label: &str, lines: &[(String, Vec<f64>)]) -> String {
    let values = lines.iter().flat_map(|(_, v)| v.iter().copied());
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let (y_lo, y_hi) = padded_range(lo, hi);
    let frame = Frame { y_lo, y_hi };
    let mut svg = String::new();
    frame.open(&mut svg, title, y_label);

    let len = lines.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let span = (len.max(2) - 1) as f64;
    let x = |g: usize| LEFT + (WIDTH - RIGHT - LEFT) * g as f64 / span;
    for g in marker_generations(len, MARKER_EVERY) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{g}</text>"#,
            x(g),
            HEIGHT - BOTTOM + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">generation</text>"#,
        (WIDTH - RIGHT + LEFT) / 2.0,
        HEIGHT - BOTTOM + 36.0
    );
    for (i, (name, v)) in lines.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = v
            .iter()
            .enumerate()
            .map(|(g, val)| format!("{:.1},{:.1}", x(g), frame.y(*val)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        for g in marker_generations(v.len(), MARKER_EVERY) {
            let _ = writeln!(
                svg,
                r#"<circle class="marker" data-gen="{g}" cx="{:.1}" cy="{:.1}" r="3.5" fill="{color}"/>"#,
                x(g),
                frame.y(v[g])
            );
        }
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Per-generation median over runs, truncated to the shortest run, then
/// smoothed.
pub fn smoothed_median_series(runs: &[Vec<f64>]) -> Vec<f64> {
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    let medians: Vec<f64> = (0..len)
        .map(|g| median(&runs.iter().map(|r| r[g]).collect::<Vec<_>>()))
        .collect();
    moving_average(&medians, SMOOTHING_WINDOW)
}

fn group_by_problem(cells: Vec<CellResults>) -> Vec<Vec<CellResults>> {
    let mut groups: Vec<Vec<CellResults>> = Vec::new();
    for c in cells {
        match groups.last_mut() {
            Some(g) if g[0].problem == c.problem && g[0].noise == c.noise => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    groups
}

/// Writes the figures for every problem and noise level under `root`
/// (optionally only `problem`) into `out`, returning the files written.
/// An empty selection writes nothing.
pub fn plot(
    root: &Path,
    out: &Path,
    kind: PlotKind,
    problem: Option<&str>,
) -> Result<Vec<PathBuf>> {
    let cells: Vec<CellResults> = scan(root)?
        .into_iter()
        .filter(|c| !c.runs.is_empty() && problem.is_none_or(|p| p == c.problem))
        .collect();
    let mut written = Vec::new();
    for group in group_by_problem(cells) {
        let tag = format!("{}-{}", group[0].problem, group[0].noise);
        let title = format!("{} (noise {})", group[0].problem, group[0].noise);
        let figures: Vec<(String, String)> = match kind {
            PlotKind::Box => {
                let of = |f: fn(&CellResults) -> Vec<f64>| {
                    group
                        .iter()
                        .map(|c| (c.method.clone(), f(c)))
                        .collect::<Vec<_>>()
                };
                vec![
                    (
                        format!("box-{tag}-test_mse.svg"),
                        box_svg(&title, "test MSE of best", &of(CellResults::final_test_mse)),
                    ),
                    (
                        format!("box-{tag}-gap.svg"),
                        box_svg(&title, "generalization gap", &of(CellResults::final_gap)),
                    ),
                ]
            }
            PlotKind::Series => {
                let mut diversity = Vec::new();
                let mut size = Vec::new();
                for c in &group {
                    let runs = c.series()?;
                    let pick = |f: fn(&dsgp_core::metrics::GenerationRecord) -> f64| {
                        runs.iter()
                            .map(|r| r.iter().map(f).collect())
                            .collect::<Vec<Vec<f64>>>()
                    };
                    diversity.push((
                        c.method.clone(),
                        smoothed_median_series(&pick(|r| r.error_diversity)),
                    ));
                    size.push((
                        c.method.clone(),
                        smoothed_median_series(&pick(|r| r.median_tree_size)),
                    ));
                }
                vec![
                    (
                        format!("series-{tag}-diversity.svg"),
                        series_svg(&title, "error diversity", &diversity),
                    ),
                    (
                        format!("series-{tag}-size.svg"),
                        series_svg(&title, "median tree size", &size),
                    ),
                ]
            }
        };
        for (file, svg) in figures {
            let path = out.join(file);
            write_atomic(&path, svg.as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}
