//! Minimal self-contained SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    /// Closed outline with a faint fill.
    Region,
}

#[derive(Debug, Clone)]
pub struct Series {
    /// Empty labels are left out of the legend.
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub color: usize,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style, color: usize) -> Self {
        Self { label: label.into(), points, style, color }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Ticks at 1, 2 or 5 times a power of ten, about five per axis.
fn linear_ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    (ticks, decimals)
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

impl Plot {
    pub fn render(&self) -> String {
        let usable = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite() && (!self.log_y || p.1 > 0.0);
        let pts = || self.series.iter().flat_map(|s| s.points.iter()).filter(usable);
        let (mut x0, mut x1) = bounds(pts().map(|p| p.0)).unwrap_or((0.0, 1.0));
        if x1 <= x0 {
            (x0, x1) = (x0 - 1.0, x1 + 1.0);
        }
        let (ylo, yhi) = bounds(pts().map(|p| if self.log_y { p.1.log10() } else { p.1 })).unwrap_or((0.0, 1.0));
        let (y0, y1) = if self.log_y {
            let (a, b) = (ylo.floor(), yhi.ceil());
            if b > a { (a, b) } else { (a - 1.0, b + 1.0) }
        } else if yhi > ylo {
            let pad = 0.05 * (yhi - ylo);
            (ylo - pad, yhi + pad)
        } else {
            (ylo - 1.0, yhi + 1.0)
        };
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| {
            let v = if self.log_y { y.log10() } else { y };
            TOP + (1.0 - (v - y0) / (y1 - y0)) * ph
        };

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(&self.title));

        // axes and ticks
        let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        let (xt, xd) = linear_ticks(x0, x1);
        for t in xt {
            let x = sx(t);
            let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="#e0e0e0"/>"##, TOP + ph);
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{t:.xd$}</text>"#, TOP + ph + 18.0);
        }
        if self.log_y {
            let mut k = y0 as i32;
            while k as f64 <= y1 {
                let y = sy(10f64.powi(k));
                let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#e0e0e0"/>"##, LEFT + pw);
                let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{k}</text>"#, LEFT - 6.0, y + 4.0);
                k += 1;
            }
        } else {
            let (yt, yd) = linear_ticks(y0, y1);
            for t in yt {
                let y = sy(t);
                let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#e0e0e0"/>"##, LEFT + pw);
                let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{t:.yd$}</text>"#, LEFT - 6.0, y + 4.0);
            }
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 16.0, escape(&self.x_label));
        let _ = writeln!(
            out,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        // data
        for s in &self.series {
            let color = PALETTE[s.color % PALETTE.len()];
            let coords: Vec<String> =
                s.points.iter().filter(usable).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            if coords.is_empty() {
                continue;
            }
            let coords = coords.join(" ");
            let _ = match s.style {
                Style::Solid => writeln!(out, r#"<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>"#),
                Style::Dashed => writeln!(
                    out,
                    r#"<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>"#
                ),
                Style::Region => writeln!(
                    out,
                    r#"<polygon points="{coords}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="1.5"/>"#
                ),
            };
        }

        // legend
        let mut ly = TOP + 10.0;
        let lx = LEFT + pw + 14.0;
        for s in self.series.iter().filter(|s| !s.label.is_empty()) {
            let color = PALETTE[s.color % PALETTE.len()];
            let dash = if s.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                out,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>"#,
                lx + 24.0
            );
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&s.label));
            ly += 18.0;
        }
        out.push_str("</svg>\n");
        out
    }
}
