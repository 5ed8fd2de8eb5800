//! SVG rendering of complexes, traced paths and unfoldings. Coordinates are
//! decimal approximations with 12 significant digits; output is a pure
//! function of the input.

use std::fmt::Write;

use crate::analysis::Surface;
use crate::developing::{GeodesicPath, Unfolding};
use crate::geometry::{to_f64, Point2};
use crate::saddle::SaddleConnection;

const STYLE: &str = "polygon{fill:#eef3f8;stroke:#8a9bb0;vector-effect:non-scaling-stroke}\
.open{stroke:#1c2733;stroke-width:2;vector-effect:non-scaling-stroke}\
.path{stroke:#c0392b;stroke-width:1.5;fill:none;vector-effect:non-scaling-stroke}\
.conn{stroke:#27ae60;stroke-width:1.5;fill:none;vector-effect:non-scaling-stroke}";

/// Formats `v` with 12 significant digits and no trailing zeros.
pub fn decimal(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn xy(p: &Point2) -> (f64, f64) {
    (to_f64(&p.x), to_f64(&p.y))
}

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Canvas {
    fn new() -> Self {
        Canvas {
            body: String::new(),
            min: (f64::INFINITY, f64::INFINITY),
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn extend(&mut self, (x, y): (f64, f64)) {
        self.min = (self.min.0.min(x), self.min.1.min(y));
        self.max = (self.max.0.max(x), self.max.1.max(y));
    }

    fn points(&mut self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&p| {
                self.extend(p);
                format!("{},{}", decimal(p.0), decimal(p.1))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn polygon(&mut self, pts: &[(f64, f64)]) {
        let list = self.points(pts);
        writeln!(self.body, r#"<polygon points="{list}"/>"#).unwrap();
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), class: &str) {
        self.extend(a);
        self.extend(b);
        writeln!(
            self.body,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            decimal(a.0),
            decimal(a.1),
            decimal(b.0),
            decimal(b.1)
        )
        .unwrap();
    }

    fn dot(&mut self, c: (f64, f64), r: f64, fill: &str) {
        self.extend(c);
        writeln!(
            self.body,
            r##"<circle cx="{}" cy="{}" r="{}" fill="{fill}"/>"##,
            decimal(c.0),
            decimal(c.1),
            decimal(r)
        )
        .unwrap();
    }

    fn finish(self) -> String {
        let (min, max) = if self.min.0.is_finite() {
            (self.min, self.max)
        } else {
            ((0.0, 0.0), (1.0, 1.0))
        };
        let pad = 0.05 * (max.0 - min.0).max(max.1 - min.1).max(1e-9);
        let (x0, y0) = (min.0 - pad, min.1 - pad);
        let (w, h) = (max.0 - min.0 + 2.0 * pad, max.1 - min.1 + 2.0 * pad);
        // Flip so y grows upward.
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"600\" height=\"{}\">\n\
             <style>{STYLE}</style>\n<g transform=\"matrix(1 0 0 -1 0 {})\">\n{}</g>\n</svg>\n",
            decimal(x0),
            decimal(y0),
            decimal(w),
            decimal(h),
            decimal((600.0 * h / w).round()),
            decimal(2.0 * y0 + h),
            self.body
        )
    }
}

fn dot_radius(c: &Canvas) -> f64 {
    let span = (c.max.0 - c.min.0).max(c.max.1 - c.min.1);
    if span.is_finite() && span > 0.0 {
        span / 150.0
    } else {
        0.01
    }
}

fn draw_polygons(canvas: &mut Canvas, surface: &Surface, offsets: &[(usize, (f64, f64))]) {
    let complex = surface.complex();
    for &(p, (dx, dy)) in offsets {
        let poly = complex.polygon(p);
        let pts: Vec<(f64, f64)> = poly
            .vertices
            .iter()
            .map(|v| {
                let (x, y) = xy(v);
                (x + dx, y + dy)
            })
            .collect();
        canvas.polygon(&pts);
        for e in 0..poly.len() {
            if surface.partner(crate::surface::EdgeRef::new(p, e)).is_none() {
                canvas.line(pts[e], pts[(e + 1) % pts.len()], "open");
            }
        }
    }
}

fn draw_singular_corners(canvas: &mut Canvas, surface: &Surface) {
    let r = dot_radius(canvas);
    for (p, poly) in surface.complex().polygons.iter().enumerate() {
        for (v, pt) in poly.vertices.iter().enumerate() {
            if surface.is_singular_corner(crate::surface::CornerRef::new(p, v)) {
                canvas.dot(xy(pt), r, "#1c2733");
            }
        }
    }
}

fn own_offsets(surface: &Surface) -> Vec<(usize, (f64, f64))> {
    (0..surface.complex().polygons.len()).map(|p| (p, (0.0, 0.0))).collect()
}

/// Polygons in their own coordinates; unglued edges bold, singular corners dotted.
pub fn surface_svg(surface: &Surface) -> String {
    let mut canvas = Canvas::new();
    draw_polygons(&mut canvas, surface, &own_offsets(surface));
    draw_singular_corners(&mut canvas, surface);
    canvas.finish()
}

/// The complex with every leg of `path` drawn inside its polygon.
pub fn path_svg(surface: &Surface, path: &GeodesicPath) -> String {
    let mut canvas = Canvas::new();
    draw_polygons(&mut canvas, surface, &own_offsets(surface));
    draw_singular_corners(&mut canvas, surface);
    for leg in &path.legs {
        canvas.line(xy(&leg.entry), xy(&leg.exit), "path");
    }
    let r = dot_radius(&canvas);
    canvas.dot(xy(&path.start.position), r, "#c0392b");
    canvas.finish()
}

/// Developed charts as outlined polygons, singularity images as dots and the
/// given connections drawn in the developing plane.
pub fn unfolding_svg(surface: &Surface, unfolding: &Unfolding, connections: &[SaddleConnection]) -> String {
    let mut canvas = Canvas::new();
    let offsets: Vec<(usize, (f64, f64))> = unfolding
        .charts
        .iter()
        .map(|c| (c.polygon, (to_f64(&c.translation.x), to_f64(&c.translation.y))))
        .collect();
    draw_polygons(&mut canvas, surface, &offsets);
    for sc in connections {
        for (a, b) in sc.path.developed_legs() {
            canvas.line(xy(&a), xy(&b), "conn");
        }
    }
    let r = dot_radius(&canvas);
    for img in &unfolding.singularity_images {
        canvas.dot(xy(&img.position), r, "#1c2733");
    }
    canvas.dot(xy(&unfolding.center), r, "#c0392b");
    canvas.finish()
}
