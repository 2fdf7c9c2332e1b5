//! Scatter plots of zeros against the arc, as plain SVG.

use crate::output::{CliError, Output, Stage};
use arcpade::geometry::{joukowski_c64, read_curve_csv};
use num_complex::Complex64;
use std::fmt::Write;
use std::fs;
use std::path::Path;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 3] = ["#1f4e9c", "#c2571a", "#2b8a3e"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Marker {
    Circle,
    Diamond,
    Cross,
}

const MARKERS: [Marker; 3] = [Marker::Circle, Marker::Diamond, Marker::Cross];

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(Stage::Plot, format!("{}: {e}", path.display())))
}

/// The first two columns of a CSV with a header line.
fn read_points(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = read(path)?;
    let bad = |line: usize| CliError::new(Stage::Plot, format!("{}: malformed line {line}", path.display()));
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let mut cols = l.split(',');
            let mut next = || cols.next().and_then(|c| c.trim().parse::<f64>().ok()).ok_or_else(|| bad(i + 1));
            Ok(Complex64::new(next()?, next()?))
        })
        .collect()
}

/// Maps the plane to the canvas with equal scales on both axes.
struct Frame {
    center: Complex64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Complex64]) -> Self {
        let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let span = Complex64::new((hi.re - lo.re).max(1e-9), (hi.im - lo.im).max(1e-9));
        let scale = ((WIDTH - 2.0 * MARGIN) / span.re).min((HEIGHT - 2.0 * MARGIN) / span.im);
        Self {
            center: (lo + hi) / 2.0,
            scale,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let d = (z - self.center) * self.scale;
        (WIDTH / 2.0 + d.re, HEIGHT / 2.0 - d.im)
    }
}

fn marker(out: &mut String, m: Marker, (x, y): (f64, f64), color: &str) {
    let r = 4.0;
    match m {
        Marker::Circle => writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{color}"/>"#),
        Marker::Diamond => writeln!(
            out,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            x,
            y - r - 1.0,
            x + r + 1.0,
            y,
            x,
            y + r + 1.0,
            x - r - 1.0,
            y
        ),
        Marker::Cross => writeln!(
            out,
            r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        ),
    }
    .expect("writing to a string");
}

/// Renders the arc, the zeros of each degree and the scheme points.
pub fn render(arc: &[Complex64], zeros: &[(usize, Vec<Complex64>)], scheme: &[Complex64]) -> String {
    let all: Vec<Complex64> = arc
        .iter()
        .chain(zeros.iter().flat_map(|(_, z)| z))
        .chain(scheme)
        .copied()
        .collect();
    let frame = Frame::fit(&all);
    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .expect("writing to a string");
    let path: Vec<String> = arc
        .iter()
        .map(|z| {
            let (x, y) = frame.map(*z);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(out, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1"/>"#, path.join(" ")).expect("writing to a string");
    for (k, (n, pts)) in zeros.iter().enumerate() {
        let (m, color) = (MARKERS[k % MARKERS.len()], COLORS[k % COLORS.len()]);
        for z in pts {
            marker(&mut out, m, frame.map(*z), color);
        }
        let (lx, ly) = (MARGIN / 2.0 + 8.0, MARGIN / 2.0 + 16.0 * k as f64);
        marker(&mut out, m, (lx, ly), color);
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">n = {n}</text>"#, lx + 10.0, ly + 4.0)
            .expect("writing to a string");
    }
    for (i, e) in scheme.iter().enumerate() {
        let (x, y) = frame.map(*e);
        writeln!(out, r##"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="#888888"/>"##, x - 3.0, y - 3.0).expect("writing to a string");
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">e{}</text>"#, x + 6.0, y - 6.0, i + 1)
            .expect("writing to a string");
    }
    out.push_str("</svg>\n");
    out
}

/// Reads `curve.csv`, `zeros_n{n}.csv` and, if present, `scheme_points.csv`
/// from the output directory and writes `zeros.svg` next to them.
pub fn plot(degrees: &[usize], out: &Output) -> Result<(), CliError> {
    let (_, nodes) = read_curve_csv(&read(&out.path("curve.csv"))?).map_err(|e| CliError::new(Stage::Plot, e))?;
    let arc: Vec<Complex64> = nodes
        .iter()
        .filter(|(theta, _)| *theta <= std::f64::consts::PI + 1e-12)
        .map(|(_, tau)| joukowski_c64(*tau))
        .collect();
    let mut zeros = Vec::new();
    for &n in degrees {
        zeros.push((n, read_points(&out.path(&format!("zeros_n{n}.csv")))?));
    }
    let scheme_path = out.path("scheme_points.csv");
    let scheme = if scheme_path.exists() { read_points(&scheme_path)? } else { Vec::new() };
    out.write(Stage::Plot, "zeros.svg", &render(&arc, &zeros, &scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc() -> Vec<Complex64> {
        (0..=16).map(|k| Complex64::new(-1.0 + k as f64 / 8.0, 0.0)).collect()
    }

    #[test]
    fn canvas_and_markers() {
        let zeros = vec![
            (8, vec![Complex64::new(0.0, 0.1)]),
            (24, vec![Complex64::new(0.5, 0.1)]),
            (30, vec![Complex64::new(-0.5, 0.1)]),
        ];
        let svg = render(&arc(), &zeros, &[Complex64::new(0.0, -1.0)]);
        assert!(svg.contains(r#"width="800" height="600""#));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("<path"));
        assert!(svg.contains(">e1<"));
        assert_eq!(svg, render(&arc(), &zeros, &[Complex64::new(0.0, -1.0)]));
    }

    #[test]
    fn empty_zero_lists_draw_only_the_curve() {
        let svg = render(&arc(), &[(8, Vec::new())], &[]);
        assert!(svg.contains("<polyline"));
        assert_eq!(svg.matches("<circle").count(), 1, "legend marker only");
    }

    #[test]
    fn frame_keeps_points_on_the_canvas() {
        let pts = [Complex64::new(-1.0, -2.0), Complex64::new(3.0, 0.5)];
        let f = Frame::fit(&pts);
        for p in pts {
            let (x, y) = f.map(p);
            assert!((MARGIN - 1e-9..=WIDTH - MARGIN + 1e-9).contains(&x));
            assert!((MARGIN - 1e-9..=HEIGHT - MARGIN + 1e-9).contains(&y));
        }
    }
}
