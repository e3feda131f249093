//! Self-contained SVG plots with inline styles.

use crate::models::Polyline;
use serde_json::Value;
use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace("--", "- -")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }
}

fn open(s: &mut String, title: &str, meta: &Value) {
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, "<!-- {} -->", escape(&serde_json::to_string(meta).unwrap_or_default()));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" style="fill:#ffffff"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" style="font:15px sans-serif;text-anchor:middle">{}</text>"#, W / 2.0, escape(title));
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" style="fill:none;stroke:#000000;stroke-width:1"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let (x, y) = (f.px(xv), f.py(yv));
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" style="font:11px sans-serif;text-anchor:middle">{}</text>"#, H - PAD + 16.0, tick(xv));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" style="font:11px sans-serif;text-anchor:end">{}</text>"#, PAD - 6.0, y + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" style="font:13px sans-serif;text-anchor:middle">{}</text>"#, W / 2.0, H - 16.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" style="font:13px sans-serif;text-anchor:middle">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// One polyline per series.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Vec<(f64, f64)>], meta: &Value) -> String {
    let pts = series.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let f = Frame { x: if x1 > x0 { (x0, x1) } else { padded(x0, x1) }, y: padded(y0, y1) };
    let mut s = String::new();
    open(&mut s, title, meta);
    axes(&mut s, &f, xlabel, ylabel);
    for (i, line) in series.iter().enumerate() {
        let path: Vec<String> = line.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" style="fill:none;stroke:{};stroke-width:1.5"/>"#, path.join(" "), PALETTE[i % PALETTE.len()]);
    }
    s.push_str("</svg>\n");
    s
}

fn color(t: f64) -> String {
    // dark blue → white → dark red
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let u = t / 0.5;
        (30.0 + 225.0 * u, 60.0 + 195.0 * u, 140.0 + 115.0 * u)
    } else {
        let u = (t - 0.5) / 0.5;
        (255.0 - 80.0 * u, 255.0 - 225.0 * u, 255.0 - 225.0 * u)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Cell map of `grid[i][j]` at `(x_i, ξ_j)` with the zero set drawn on top; at most 100×100 cells are drawn.
#[allow(clippy::too_many_arguments)]
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, xr: (f64, f64), yr: (f64, f64), grid: &[Vec<f64>], curves: &[Polyline], meta: &Value) -> String {
    let f = Frame { x: xr, y: yr };
    let n = grid.len();
    let stride = n.div_ceil(100).max(1);
    let vals: Vec<f64> = grid.iter().flatten().cloned().filter(|v| v.is_finite() && *v > -300.0).collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min).max(-6.0);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = String::new();
    open(&mut s, title, meta);
    let cw = (W - 2.0 * PAD) / n as f64 * stride as f64;
    let ch = (H - 2.0 * PAD) / n as f64 * stride as f64;
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            let x = xr.0 + (xr.1 - xr.0) * i as f64 / n as f64;
            let y = yr.0 + (yr.1 - yr.0) * (j + stride) as f64 / n as f64;
            let t = if hi > lo { (grid[i][j] - lo) / (hi - lo) } else { 0.5 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" style="fill:{};stroke:none"/>"#,
                f.px(x),
                f.py(y),
                cw + 0.3,
                ch + 0.3,
                color(t)
            );
        }
    }
    for c in curves {
        // break segments that wrap around the torus
        let mut run: Vec<String> = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        let flush = |run: &mut Vec<String>, s: &mut String| {
            if run.len() > 1 {
                let _ = writeln!(s, r#"<polyline points="{}" style="fill:none;stroke:#000000;stroke-width:1.5"/>"#, run.join(" "));
            }
            run.clear();
        };
        for &(x, y) in &c.points {
            if let Some((px, py)) = prev {
                if (x - px).abs() > 0.25 * (xr.1 - xr.0) || (y - py).abs() > 0.25 * (yr.1 - yr.0) {
                    flush(&mut run, &mut s);
                }
            }
            run.push(format!("{:.2},{:.2}", f.px(x), f.py(y)));
            prev = Some((x, y));
        }
        flush(&mut run, &mut s);
    }
    axes(&mut s, &f, xlabel, ylabel);
    s.push_str("</svg>\n");
    s
}
