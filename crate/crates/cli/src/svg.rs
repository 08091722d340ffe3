//! Single-figure SVG view of a traced boundary: the finite parts of the curve
//! as polylines, diverged stretches as vertical rays running off the frame,
//! and the start point `psi(0)` as a dot.

use std::f64::consts::PI;
use std::fmt::Write as _;

use skodom::conformal::BoundaryCurve;

pub const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

struct View {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl View {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, y0, x1, y1) = (-1.0, -1.0, 1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        Self {
            cx: 0.5 * (x0 + x1),
            cy: 0.5 * (y0 + y1),
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            0.5 * SIZE + (x - self.cx) * self.scale,
            0.5 * SIZE - (y - self.cy) * self.scale,
        )
    }
}

pub fn render(curve: &BoundaryCurve) -> String {
    let s = &curve.samples;
    let view = View::fit(curve.finite_samples().map(|p| (p.x, p.y)).chain([curve.start]));
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    )
    .unwrap();
    out.push_str(concat!(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">",
        "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"black\"/></marker></defs>\n",
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    ));

    let mut k = 0;
    while k < s.len() {
        if s[k].diverged {
            k += 1;
            continue;
        }
        let start = k;
        while k < s.len() && !s[k].diverged {
            k += 1;
        }
        if k - start >= 2 {
            let pts: Vec<String> = s[start..k]
                .iter()
                .map(|p| {
                    let (u, v) = view.map((p.x, p.y));
                    format!("{u:.3},{v:.3}")
                })
                .collect();
            writeln!(
                out,
                r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
    }

    // rays: each diverged run heads down (positive angles) or up (negative)
    // from the finite samples on either side of it
    let mut k = 0;
    while k < s.len() {
        if !s[k].diverged {
            k += 1;
            continue;
        }
        let start = k;
        while k < s.len() && s[k].diverged {
            k += 1;
        }
        let run = &s[start..k];
        let through_axis = run.iter().any(|p| p.theta == 0.0 || p.theta.abs() == PI)
            || (run.iter().any(|p| p.theta > 0.0) && run.iter().any(|p| p.theta < 0.0));
        if through_axis {
            continue;
        }
        let edge_y = if run[0].theta > 0.0 { SIZE } else { 0.0 };
        for idx in [start.checked_sub(1), (k < s.len()).then_some(k)].into_iter().flatten() {
            let (u, v) = view.map((s[idx].x, s[idx].y));
            writeln!(
                out,
                r#"<line x1="{u:.3}" y1="{v:.3}" x2="{u:.3}" y2="{edge_y:.3}" stroke="black" stroke-width="1.5" marker-end="url(#arrow)"/>"#
            )
            .unwrap();
        }
    }

    let (u, v) = view.map(curve.start);
    writeln!(out, r#"<circle cx="{u:.3}" cy="{v:.3}" r="4" fill="crimson"/>"#).unwrap();
    out.push_str("</svg>\n");
    out
}

/// Vertices of every polyline in an SVG produced by [`render`], scaled to the
/// unit square.
pub fn curve_points(svg: &str) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for chunk in svg.split("points=\"").skip(1) {
        let body = chunk.split('"').next().unwrap_or("");
        for pair in body.split_whitespace() {
            if let Some((a, b)) = pair.split_once(',') {
                if let (Ok(u), Ok(v)) = (a.parse::<f64>(), b.parse::<f64>()) {
                    pts.push((u / SIZE, v / SIZE));
                }
            }
        }
    }
    pts
}

/// Symmetric nearest-vertex distance between two sampled curves.
pub fn curve_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let one_way = |p: &[(f64, f64)], q: &[(f64, f64)]| {
        p.iter()
            .map(|&(x, y)| {
                q.iter()
                    .map(|&(u, v)| (x - u).hypot(y - v))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
