//! Minimal SVG output for trajectory plots: separatrices bold, generic
//! leaves thin, saddle connections highlighted.

use crate::qdiff::strips::StripDecomposition;
use crate::qdiff::trace::{TraceParams, Tracer};
use crate::qdiff::{PolePoint, RationalQD};
use num_complex::Complex64;
use std::fmt::Write;

pub struct SvgPlot {
    pub width: f64,
    pub height: f64,
    window: (f64, f64, f64, f64),
    body: String,
}

impl SvgPlot {
    pub fn new(window: (f64, f64, f64, f64), width: f64) -> SvgPlot {
        let (x0, x1, y0, y1) = window;
        let height = width * (y1 - y0) / (x1 - x0);
        SvgPlot { width, height, window, body: String::new() }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let (x0, x1, y0, y1) = self.window;
        let px = (z.re - x0) / (x1 - x0) * self.width;
        // svg y axis points down
        let py = (y1 - z.im) / (y1 - y0) * self.height;
        (px, py)
    }

    pub fn polyline(&mut self, points: &[Complex64], stroke: &str, width: f64) {
        if points.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (k, &z) in points.iter().enumerate() {
            let (x, y) = self.map(z);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
        }
        let _ = writeln!(
            self.body,
            r##"<path d="{}" fill="none" stroke="{stroke}" stroke-width="{width:.2}"/>"##,
            d.trim_end()
        );
    }

    pub fn dot(&mut self, z: Complex64, r: f64, fill: &str) {
        let (x, y) = self.map(z);
        let _ = writeln!(self.body, r##"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"##);
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
             viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

/// Renders a strip decomposition: thin generic leaves seeded on a coarse
/// grid, bold separatrices, highlighted saddle connections,零 marks.
pub fn render_decomposition(
    phi: &RationalQD,
    dec: &StripDecomposition,
    window: (f64, f64, f64, f64),
    generic_seeds: usize,
) -> String {
    let mut plot = SvgPlot::new(window, 640.0);
    // a handful of generic leaves for context
    let params = TraceParams {
        max_flat_length: 120.0,
        r_escape: 3.0 * window.1.max(window.3).max(4.0),
        ..TraceParams::default()
    };
    let tracer = Tracer::new(phi, &dec.crit, params);
    let (x0, x1, y0, y1) = window;
    for k in 0..generic_seeds {
        let fy = (k as f64 + 0.5) / generic_seeds as f64;
        for fx in [0.3, 0.7] {
            let start = Complex64::new(x0 + fx * (x1 - x0), y0 + fy * (y1 - y0));
            if dec.crit.nearest_finite(start) < 0.05 {
                continue;
            }
            for branch in [true, false] {
                if let Ok(tr) = tracer.trace_trajectory(start, branch) {
                    plot.polyline(&tr.leg.points, "#9db4c8", 0.7);
                }
            }
        }
    }
    for sep in &dec.separatrices {
        plot.polyline(&sep.points, "#1c3144", 1.8);
    }
    for strip in &dec.strips {
        plot.polyline(&strip.saddle_polyline, "#c3423f", 2.4);
    }
    for &z in &dec.crit.zeros {
        plot.dot(z, 3.5, "#1c3144");
    }
    for pole in &dec.crit.poles {
        if let PolePoint::Finite(z) = pole.location {
            plot.dot(z, 3.5, "#c3423f");
        }
    }
    plot.finish()
}
