//! Minimal deterministic SVG plots: line charts and heatmaps on linear axes.

use std::fmt::Write;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series<'a>>,
    /// Shaded x-intervals, drawn behind the curves.
    pub bands: Vec<(f64, f64)>,
    pub band_label: &'a str,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Tick positions at 1/2/5 × 10ⁿ spacing, about `target` of them.
pub fn ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, usize) {
    let span = hi - lo;
    if span <= 0.0 || !span.is_finite() {
        return (vec![lo], 0);
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (f.px(f.x.0), f.px(f.x.1));
    let (y0, y1) = (f.py(f.y.0), f.py(f.y.1));
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    let (xt, xd) = ticks(f.x.0, f.x.1, 8);
    for t in xt {
        let x = f.px(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.xd$}</text>"#,
            y0 + 5.0,
            y0 + 19.0
        );
    }
    let (yt, yd) = ticks(f.y.0, f.y.1, 6);
    for t in yt {
        let y = f.py(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t:.yd$}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn line_plot(plot: &LinePlot) -> String {
    let f = Frame { x: plot.x_range, y: plot.y_range };
    let mut out = String::new();
    header(&mut out, plot.title);

    let (top, bottom) = (f.py(f.y.1), f.py(f.y.0));
    for &(a, b) in &plot.bands {
        let (xa, xb) = (f.px(a), f.px(b));
        let _ = writeln!(
            out,
            r##"<rect x="{xa:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="#d62728" fill-opacity="0.18"/>"##,
            (xb - xa).max(1.0),
            bottom - top
        );
        let _ = writeln!(
            out,
            r##"<path d="M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} Z" fill="#d62728"/>"##,
            (xa + xb) / 2.0,
            top + 12.0,
            (xa + xb) / 2.0 - 5.0,
            top + 2.0,
            (xa + xb) / 2.0 + 5.0,
            top + 2.0
        );
    }

    for s in &plot.series {
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let _ = write!(pts, "{:.2},{:.2} ", f.px(x), f.py(y.clamp(f.y.0, f.y.1)));
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.3"{dash} points="{}"/>"#,
            s.color,
            pts.trim_end()
        );
    }
    axes(&mut out, &f, plot.x_label, plot.y_label);

    // Legend.
    let lx = WIDTH - RIGHT + 15.0;
    let mut ly = TOP + 10.0;
    for s in &plot.series {
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 25.0,
            s.color,
            lx + 30.0,
            ly + 4.0,
            escape(s.name)
        );
        ly += 20.0;
    }
    if !plot.bands.is_empty() {
        let _ = writeln!(
            out,
            r##"<rect x="{lx:.2}" y="{:.2}" width="25" height="10" fill="#d62728" fill-opacity="0.18"/><text x="{:.2}" y="{:.2}">{}</text>"##,
            ly - 5.0,
            lx + 30.0,
            ly + 4.0,
            escape(plot.band_label)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    /// Row-major over `ys`, then `xs`.
    pub values: &'a [f64],
    pub value_range: (f64, f64),
}

/// Piecewise-linear map from `[0, 1]` to a dark-to-bright palette.
fn palette(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.0, [13.0, 8.0, 135.0]),
        (0.25, [126.0, 3.0, 168.0]),
        (0.5, [204.0, 71.0, 120.0]),
        (0.75, [248.0, 149.0, 64.0]),
        (1.0, [240.0, 249.0, 33.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    for w in STOPS.windows(2) {
        let ((t0, c0), (t1, c1)) = (w[0], w[1]);
        if t <= t1 {
            let s = (t - t0) / (t1 - t0);
            let mix = |k: usize| (c0[k] + s * (c1[k] - c0[k])).round() as u8;
            return (mix(0), mix(1), mix(2));
        }
    }
    (240, 249, 33)
}

pub fn heatmap(h: &Heatmap) -> String {
    let nx = h.xs.len();
    let ny = h.ys.len();
    let cell = |v: &[f64], i: usize| {
        let lo = if i == 0 { v[0] - (v[1] - v[0]) / 2.0 } else { (v[i - 1] + v[i]) / 2.0 };
        let hi = if i + 1 == v.len() { v[i] + (v[i] - v[i - 1]) / 2.0 } else { (v[i] + v[i + 1]) / 2.0 };
        (lo, hi)
    };
    let f = Frame {
        x: (cell(h.xs, 0).0, cell(h.xs, nx - 1).1),
        y: (cell(h.ys, 0).0, cell(h.ys, ny - 1).1),
    };
    let mut out = String::new();
    header(&mut out, h.title);
    let (vlo, vhi) = h.value_range;
    for j in 0..ny {
        let (ya, yb) = cell(h.ys, j);
        for i in 0..nx {
            let (xa, xb) = cell(h.xs, i);
            let t = (h.values[j * nx + i] - vlo) / (vhi - vlo);
            let (r, g, b) = palette(t);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})" shape-rendering="crispEdges"/>"#,
                f.px(xa),
                f.py(yb),
                f.px(xb) - f.px(xa) + 0.3,
                f.py(ya) - f.py(yb) + 0.3
            );
        }
    }
    axes(&mut out, &f, h.x_label, h.y_label);

    // Colour bar.
    let bx = WIDTH - RIGHT + 30.0;
    let (top, bottom) = (TOP, HEIGHT - BOTTOM);
    let steps = 50;
    for s in 0..steps {
        let t = s as f64 / (steps - 1) as f64;
        let (r, g, b) = palette(t);
        let y = bottom - (s + 1) as f64 * (bottom - top) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{bx:.2}" y="{y:.2}" width="20" height="{:.2}" fill="rgb({r},{g},{b})" shape-rendering="crispEdges"/>"#,
            (bottom - top) / steps as f64 + 0.3
        );
    }
    let (vt, vd) = ticks(vlo, vhi, 5);
    for v in vt {
        let y = bottom - (v - vlo) / (vhi - vlo) * (bottom - top);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{v:.vd$}</text>"#,
            bx + 26.0,
            y + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
