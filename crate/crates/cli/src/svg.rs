//! SVG figures for instances, piercings and colorings.
//!
//! Everything stays exact until a coordinate is written out; floats appear
//! only in the formatted attribute values.

use std::fmt::Write as _;

use rectpierce::pierce::build_p_grid;
use rectpierce::{Coloring, Instance, PiercingResult, Point, Scalar};

const DEFAULT_PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Width and height of the square canvas, in pixels.
    pub canvas: f64,
    /// Fill colors by color index; indices past the end wrap around.
    pub palette: Vec<String>,
    pub point_radius: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            canvas: 600.0,
            palette: DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect(),
            point_radius: 3.0,
        }
    }
}

impl RenderStyle {
    pub fn color(&self, index: usize) -> &str {
        if self.palette.is_empty() {
            return "none";
        }
        &self.palette[index % self.palette.len()]
    }
}

/// What to draw on top of the rectangle outlines.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overlay<'a> {
    /// Transversal points become filled dots.
    pub piercing: Option<&'a PiercingResult>,
    /// Rectangles are filled with their palette color.
    pub coloring: Option<&'a Coloring>,
    /// Draws the subdivision points of this rectangle's long edges.
    pub p_grid: Option<usize>,
}

struct Frame {
    x0: Scalar,
    y0: Scalar,
    scale: f64,
    margin: f64,
    canvas: f64,
}

impl Frame {
    fn new(i: &Instance, canvas: f64) -> Frame {
        let margin = (canvas * 0.05).max(1.0);
        let rects = i.rects();
        if rects.is_empty() {
            return Frame { x0: Scalar::from(0), y0: Scalar::from(0), scale: 1.0, margin, canvas };
        }
        let x0 = rects.iter().map(|r| r.x_lo()).min().expect("nonempty").clone();
        let y0 = rects.iter().map(|r| r.y_lo()).min().expect("nonempty").clone();
        let x1 = rects.iter().map(|r| r.x_hi()).max().expect("nonempty");
        let y1 = rects.iter().map(|r| r.y_hi()).max().expect("nonempty");
        let (w, h) = (x1 - &x0, y1 - &y0);
        let extent = Scalar::max_of(&w, &h);
        let scale = (canvas - 2.0 * margin) / extent.to_f64();
        Frame { x0, y0, scale, margin, canvas }
    }

    fn x(&self, x: &Scalar) -> f64 {
        self.margin + (x - &self.x0).to_f64() * self.scale
    }

    /// SVG grows downwards, so y is flipped.
    fn y(&self, y: &Scalar) -> f64 {
        self.canvas - self.margin - (y - &self.y0).to_f64() * self.scale
    }

    fn len(&self, d: &Scalar) -> f64 {
        d.to_f64() * self.scale
    }
}

fn circle(out: &mut String, f: &Frame, p: &Point, r: f64, class: &str, fill: &str) {
    let _ = writeln!(
        out,
        r#"  <circle class="{class}" cx="{:.3}" cy="{:.3}" r="{r:.3}" fill="{fill}"/>"#,
        f.x(&p.x),
        f.y(&p.y)
    );
}

/// Renders `i` as a standalone SVG 1.1 document.
///
/// Each rectangle is one `<rect>` element (filled when a coloring is given),
/// each transversal point one `<circle class="point">`, and each P-grid point
/// one `<circle class="pgrid">`.
pub fn render_svg(i: &Instance, overlay: Overlay<'_>, style: &RenderStyle) -> String {
    let f = Frame::new(i, style.canvas);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        style.canvas
    );
    for r in i.rects() {
        let paint = match overlay.coloring.and_then(|c| c.colors.get(r.id())) {
            Some(&c) => format!(r#"data-color="{c}" fill="{}" fill-opacity="0.45""#, style.color(c)),
            None => r#"fill="none""#.to_string(),
        };
        let _ = writeln!(
            out,
            r#"  <rect data-id="{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {paint} stroke="black" stroke-width="1"/>"#,
            r.id(),
            f.x(r.x_lo()),
            f.y(r.y_hi()),
            f.len(&r.width()),
            f.len(&r.height()),
        );
    }
    if let Some(rect) = overlay.p_grid.and_then(|id| i.rect(id)) {
        let grid = build_p_grid(rect);
        let half = grid.len() / 2;
        for edge in grid.chunks(half.max(1)) {
            let (a, b) = (&edge[0], &edge[edge.len() - 1]);
            let _ = writeln!(
                out,
                r##"  <line class="pgrid" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#d62728" stroke-width="2"/>"##,
                f.x(&a.x),
                f.y(&a.y),
                f.x(&b.x),
                f.y(&b.y)
            );
        }
        for p in &grid {
            circle(&mut out, &f, p, style.point_radius * 0.8, "pgrid", "#d62728");
        }
    }
    if let Some(res) = overlay.piercing {
        for p in &res.transversal {
            circle(&mut out, &f, p, style.point_radius, "point", "black");
        }
    }
    out.push_str("</svg>\n");
    out
}
