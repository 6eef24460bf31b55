//! Static SVG 1.1 line and scatter plots.

use std::fmt::Write;

use velavg::transport_dispersion::DecayFit;

use crate::error::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Markers,
    Line,
    Dashed,
    /// Line through markers.
    LineMarkers,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    /// File-name fragment.
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Lines of annotation printed under the title.
    pub notes: Vec<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Axis mapping in (possibly logarithmic) data coordinates.
struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Axis> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if !v.is_finite() || (log && v <= 0.0) {
                continue;
            }
            let t = if log { v.log10() } else { v };
            lo = lo.min(t);
            hi = hi.max(t);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo < 1e-12 {
            let pad = if log { 0.5 } else { lo.abs().max(1.0) * 0.1 };
            lo -= pad;
            hi += pad;
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Some(Axis { log, lo, hi })
    }

    fn unit(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let t = if self.log { v.log10() } else { v };
        Some((t - self.lo) / (self.hi - self.lo))
    }

    /// Tick positions in data coordinates.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 6 + 1).max(1);
            return (a..=b).step_by(step as usize).map(|e| 10f64.powi(e)).collect();
        }
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let mut t = (self.lo / step).ceil() * step;
        let mut out = Vec::new();
        while t <= self.hi + 1e-9 * step {
            out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
            t += step;
        }
        out
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.log10().round() as i32)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl Plot {
    /// Log-log samples of a decay fit, the fitted line and the theoretical slope.
    pub fn decay_fit(name: impl Into<String>, title: impl Into<String>, fit: &DecayFit) -> Plot {
        let logs: Vec<(f64, f64)> = fit.samples.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
        let m = logs.len().max(1) as f64;
        let (cx, cy) = (logs.iter().map(|p| p.0).sum::<f64>() / m, logs.iter().map(|p| p.1).sum::<f64>() / m);
        let line = |slope: f64| -> Vec<(f64, f64)> {
            [fit.t_min, fit.t_max].iter().map(|&t| (t, (cy + slope * (t.ln() - cx)).exp())).collect()
        };
        Plot {
            name: name.into(),
            title: title.into(),
            x_label: "t".into(),
            y_label: "norm of f(x - tv, v)".into(),
            log_x: true,
            log_y: true,
            series: vec![
                Series { label: "samples".into(), points: fit.samples.clone(), style: Style::Markers },
                Series { label: format!("fit, slope {:.4}", fit.exponent), points: line(fit.exponent), style: Style::Line },
                Series {
                    label: format!("theory, slope {:.4}", fit.theoretical),
                    points: line(fit.theoretical),
                    style: Style::Dashed,
                },
            ],
            notes: vec![format!(
                "fitted slope {:.6} ± {:.1e}; theoretical slope {:.6}; deviation {:.3}%",
                fit.exponent,
                fit.stderr,
                fit.theoretical,
                100.0 * fit.deviation()
            )],
        }
    }

    /// SVG 1.1 document.
    pub fn render(&self) -> Result<String, CliError> {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let ax = Axis::fit(pts().map(|p| p.0), self.log_x)
            .ok_or_else(|| CliError::io(format!("plot '{}' has no drawable x values", self.name)))?;
        let ay = Axis::fit(pts().map(|p| p.1), self.log_y)
            .ok_or_else(|| CliError::io(format!("plot '{}' has no drawable y values", self.name)))?;
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let sx = |u: f64| LEFT + u * pw;
        let sy = |u: f64| TOP + (1.0 - u) * ph;

        let mut s = String::new();
        let w = &mut s;
        let fmt_err = |_| CliError::io("plot formatting failed");
        writeln!(w, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#).map_err(fmt_err)?;
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        )
        .map_err(fmt_err)?;
        writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).map_err(fmt_err)?;
        writeln!(w, r#"<text x="{LEFT}" y="20" font-size="14">{}</text>"#, escape(&self.title)).map_err(fmt_err)?;
        for (i, note) in self.notes.iter().enumerate() {
            writeln!(w, r#"<text x="{LEFT}" y="{}" fill="dimgray">{}</text>"#, 36 + 13 * i, escape(note)).map_err(fmt_err)?;
        }
        writeln!(
            w,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        )
        .map_err(fmt_err)?;
        for t in ax.ticks() {
            if let Some(u) = ax.unit(t) {
                let x = sx(u);
                writeln!(
                    w,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    TOP + ph,
                    TOP + ph + 5.0,
                    TOP + ph + 18.0,
                    tick_label(t, ax.log)
                )
                .map_err(fmt_err)?;
            }
        }
        for t in ay.ticks() {
            if let Some(u) = ay.unit(t) {
                let y = sy(u);
                writeln!(
                    w,
                    r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                    LEFT - 5.0,
                    LEFT - 8.0,
                    y + 4.0,
                    tick_label(t, ay.log)
                )
                .map_err(fmt_err)?;
            }
        }
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        )
        .map_err(fmt_err)?;
        writeln!(
            w,
            r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        )
        .map_err(fmt_err)?;

        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let coords: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter_map(|&(x, y)| Some((sx(ax.unit(x)?), sy(ay.unit(y)?))))
                .collect();
            if matches!(series.style, Style::Line | Style::Dashed | Style::LineMarkers) && coords.len() > 1 {
                let path: Vec<String> = coords.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let dash = if series.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                writeln!(
                    w,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                    path.join(" ")
                )
                .map_err(fmt_err)?;
            }
            if matches!(series.style, Style::Markers | Style::LineMarkers) {
                for (x, y) in &coords {
                    writeln!(w, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#).map_err(fmt_err)?;
                }
            }
            let ly = TOP + 12.0 + 16.0 * i as f64;
            let lx = WIDTH - RIGHT + 12.0;
            writeln!(
                w,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0,
                lx + 24.0,
                escape(&series.label)
            )
            .map_err(fmt_err)?;
        }
        writeln!(w, "</svg>").map_err(fmt_err)?;
        Ok(s)
    }
}
