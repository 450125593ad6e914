//! Minimal SVG rendering: line plots and a heatmap with an overlaid contour.
//! Output is plain text, deterministic for identical input.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn map(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Series {
        Series {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Series {
        self.dashed = true;
        self
    }
}

pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
    /// Points above this are left out of the drawing.
    pub y_max: Option<f64>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    xs: Scale,
    ys: Scale,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (self.xs.map(x) - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }
    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (self.ys.map(y) - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * hi.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        esc(title)
    );
}

/// Tick positions in mapped coordinates: whole decades on log axes (thinned
/// to at most 8), five even steps otherwise.
fn ticks(lo: f64, hi: f64, scale: Scale) -> Vec<f64> {
    if scale == Scale::Log {
        let (a, b) = (lo.ceil() as i64, hi.floor() as i64);
        if b > a {
            let step = ((b - a) / 7).max(1);
            return (a..=b).step_by(step as usize).map(|e| e as f64).collect();
        }
    }
    (0..=4).map(|i| lo + (hi - lo) * f64::from(i) / 4.0).collect()
}

fn tick_label(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Log if (v - v.round()).abs() < 1e-9 => format!("1e{}", v.round() as i64),
        Scale::Log => format!("{:.2e}", 10f64.powf(v)),
        Scale::Linear => {
            if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
                format!("{v:.1e}")
            } else {
                format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
            }
        }
    }
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for fx in ticks(f.x0, f.x1, f.xs) {
        let x = l + (fx - f.x0) / (f.x1 - f.x0) * (r - l);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/>"#, b + 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            b + 18.0,
            tick_label(fx, f.xs)
        );
    }
    for fy in ticks(f.y0, f.y1, f.ys) {
        let y = b - (fy - f.y0) / (f.y1 - f.y0) * (b - t);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/>"#, l - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 8.0,
            y + 4.0,
            tick_label(fy, f.ys)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        H - 12.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        esc(y_label)
    );
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    let mut d = String::new();
    for (x, y) in pts {
        if x.is_finite() && y.is_finite() && (f.xs == Scale::Linear || *x > 0.0) && (f.ys == Scale::Linear || *y > 0.0)
        {
            let _ = write!(d, "{:.2},{:.2} ", f.px(*x), f.py(*y));
        }
    }
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
        d.trim_end()
    );
}

impl LinePlot {
    pub fn render(&self) -> String {
        let usable = |v: f64, s: Scale| v.is_finite() && (s == Scale::Linear || v > 0.0);
        let cap = self.y_max.unwrap_or(f64::INFINITY);
        let clipped: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| s.points.iter().copied().filter(|p| p.1 <= cap).collect())
            .collect();
        let all = || clipped.iter().flatten();
        let (x0, x1) = bounds(all().filter(|p| usable(p.0, self.x_scale)).map(|p| self.x_scale.map(p.0)));
        let (y0, y1) = bounds(all().filter(|p| usable(p.1, self.y_scale)).map(|p| self.y_scale.map(p.1)));
        let pad = 0.04 * (y1 - y0);
        let f = Frame {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
            xs: self.x_scale,
            ys: self.y_scale,
        };
        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, &f, &self.x_label, &self.y_label);
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            polyline(&mut out, &f, &clipped[i], color, s.dashed);
            let y = TOP + 14.0 + 18.0 * i as f64;
            let x = W - RIGHT + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
                x + 22.0
            );
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 28.0, y + 4.0, esc(&s.label));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Colour-coded grid `z[row][col]` over `x` (columns) and `y` (rows), with
/// an optional contour polyline drawn on top.
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    /// Values are coloured on a log10 scale, diverging around `center`.
    pub center: f64,
    pub contour: Vec<(f64, f64)>,
    pub contour_label: String,
}

fn diverging(t: f64) -> String {
    // t in [-1, 1]: blue below the centre, red above
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let s = -t;
        (255.0 * (1.0 - s), 255.0 * (1.0 - 0.6 * s), 255.0)
    } else {
        (255.0, 255.0 * (1.0 - 0.7 * t), 255.0 * (1.0 - t))
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

impl Heatmap {
    pub fn render(&self) -> String {
        let (x0, x1) = bounds(self.x.iter().map(|v| self.x_scale.map(*v)));
        let (y0, y1) = bounds(self.y.iter().copied());
        let dy = if self.y.len() > 1 { (y1 - y0) / (self.y.len() - 1) as f64 } else { 1.0 };
        let dx = if self.x.len() > 1 { (x1 - x0) / (self.x.len() - 1) as f64 } else { 1.0 };
        let f = Frame {
            x0: x0 - dx / 2.0,
            x1: x1 + dx / 2.0,
            y0: y0 - dy / 2.0,
            y1: y1 + dy / 2.0,
            xs: self.x_scale,
            ys: Scale::Linear,
        };
        let logs: Vec<f64> = self
            .z
            .iter()
            .flatten()
            .filter(|v| **v > 0.0)
            .map(|v| (v / self.center).log10())
            .collect();
        // each side of the centre gets its own colour range
        let above = logs.iter().fold(1e-12f64, |a, v| a.max(*v));
        let below = logs.iter().fold(1e-12f64, |a, v| a.max(-*v));
        let mut out = String::new();
        header(&mut out, &self.title);
        let cell_w = (W - LEFT - RIGHT) / self.x.len() as f64;
        let cell_h = (H - TOP - BOTTOM) / self.y.len() as f64;
        for (j, row) in self.z.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                let color = if *v > 0.0 {
                    let l = (v / self.center).log10();
                    diverging(if l >= 0.0 { l / above } else { l / below })
                } else {
                    "#808080".to_string()
                };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                    f.px(self.x[i]) - cell_w / 2.0,
                    f.py(self.y[j]) - cell_h / 2.0,
                    cell_w + 0.3,
                    cell_h + 0.3
                );
            }
        }
        axes(&mut out, &f, &self.x_label, &self.y_label);
        if !self.contour.is_empty() {
            polyline(&mut out, &f, &self.contour, "black", false);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}">{}</text>"#,
                W - RIGHT + 10.0,
                TOP + 14.0,
                esc(&self.contour_label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_well_formed() {
        let p = LinePlot {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_scale: Scale::Log,
            y_scale: Scale::Linear,
            y_max: None,
            series: vec![Series::new("s", vec![(0.1, 1.0), (1.0, 2.0), (0.0, 3.0)])],
        };
        let svg = p.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        // the x = 0 point cannot sit on a log axis
        assert_eq!(svg.matches("polyline").count(), 1);
        assert_eq!(p.render(), svg);
    }
}
