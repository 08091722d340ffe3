//! Polygonal stand-in for the domain: the traced boundary with its infinite
//! rays cut at `±y_max`, plus the point queries needed by the simulator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conformal::{BoundaryCurve, RayTipSet};
use crate::distributions::Distribution;
use crate::error::{Error, Result};

pub type Point = (f64, f64);

/// Points this close to an edge count as outside.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Largest number of index cells along one axis.
const MAX_CELLS_PER_AXIS: usize = 2048;

/// `max(10, 8 sd + largest finite ray tip)`.
pub fn default_y_max(dist: &Distribution, tips: Option<&RayTipSet>) -> f64 {
    let tip = tips
        .map(|t| {
            t.tips
                .iter()
                .map(|t| t.tip_y)
                .filter(|y| y.is_finite())
                .fold(0.0_f64, f64::max)
        })
        .unwrap_or(0.0);
    (8.0 * dist.moments().variance.sqrt() + tip).max(10.0)
}

/// Counter-clockwise polygon with a uniform-grid index over its edges.
#[derive(Debug, Clone)]
pub struct RegionPolygon {
    vertices: Vec<Point>,
    /// `caps[i]` marks edge `i -> i+1` as a horizontal truncation cap.
    caps: Vec<bool>,
    y_max: f64,
    index: GridIndex,
    pub grid_size: Option<usize>,
    pub abel_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
    y_max: f64,
}

/// Where a segment first meets the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingPoint {
    /// Fraction of the segment travelled before the crossing.
    pub t: f64,
    pub point: Point,
    pub edge: usize,
    pub cap: bool,
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    cx.hypot(cy)
}

impl RegionPolygon {
    /// Builds a polygon from a closed vertex ring (last vertex not repeated).
    /// Orientation is normalized to counter-clockwise; edges with both ends at
    /// `|y| = y_max` are marked as caps.
    pub fn from_vertices(vertices: Vec<Point>, y_max: f64) -> Result<Self> {
        let mut v: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if !(p.0.is_finite() && p.1.is_finite()) {
                return Err(Error::InvalidPolygon(format!("non-finite vertex ({}, {})", p.0, p.1)));
            }
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 distinct vertices, got {}",
                v.len()
            )));
        }
        let area = signed_area(&v);
        if area.is_nan() || area == 0.0 {
            return Err(Error::InvalidPolygon("polygon has zero area".into()));
        }
        if area < 0.0 {
            v.reverse();
        }
        let n = v.len();
        let caps = (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a.1 == b.1 && a.1.abs() == y_max
            })
            .collect();
        let index = GridIndex::build(&v);
        Ok(Self {
            vertices: v,
            caps,
            y_max,
            index,
            grid_size: None,
            abel_radius: None,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    pub fn is_cap(&self, edge: usize) -> bool {
        self.caps[edge]
    }

    /// Shoelace area (positive after orientation normalization).
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn to_json(&self) -> String {
        let file = PolygonFile {
            vertices: self.vertices.iter().map(|&(x, y)| [x, y]).collect(),
            y_max: self.y_max,
        };
        serde_json::to_string(&file).expect("polygon serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: PolygonFile = serde_json::from_str(s)?;
        Self::from_vertices(file.vertices.into_iter().map(|[x, y]| (x, y)).collect(), file.y_max)
    }

    fn winding_number(&self, p: Point) -> i32 {
        let n = self.vertices.len();
        let mut w = 0;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let side = (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
            if a.1 <= p.1 {
                if b.1 > p.1 && side > 0.0 {
                    w += 1;
                }
            } else if b.1 <= p.1 && side < 0.0 {
                w -= 1;
            }
        }
        w
    }

    /// Strict interior membership; points within [`BOUNDARY_TOLERANCE`] of an
    /// edge are outside.
    pub fn contains(&self, p: Point) -> bool {
        self.winding_number(p) != 0 && self.distance_capped(p, BOUNDARY_TOLERANCE) >= BOUNDARY_TOLERANCE
    }

    /// `min(distance to the nearest edge, cap)`, looking only at edges within `cap`.
    pub fn distance_capped(&self, p: Point, cap: f64) -> f64 {
        let mut best = cap;
        self.index
            .for_each_in_box(p.0 - cap, p.1 - cap, p.0 + cap, p.1 + cap, |e| {
                let (a, b) = self.edge(e);
                best = best.min(segment_distance(p, a, b));
            });
        best
    }

    /// Exact distance from an interior point to the boundary.
    pub fn boundary_distance(&self, p: Point) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::PointOutside(p.0, p.1));
        }
        let mut r = self.index.h;
        loop {
            let d = self.distance_capped(p, r);
            if d < r || r > self.index.extent() {
                return Ok(d);
            }
            r *= 2.0;
        }
    }

    /// First boundary crossing along the segment `p -> q`, if any.
    pub fn first_crossing(&self, p: Point, q: Point) -> Option<CrossingPoint> {
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let mut best: Option<CrossingPoint> = None;
        self.index
            .for_each_in_box(p.0.min(q.0), p.1.min(q.1), p.0.max(q.0), p.1.max(q.1), |e| {
                let (a, b) = self.edge(e);
                let (ex, ey) = (b.0 - a.0, b.1 - a.1);
                let den = dx * ey - dy * ex;
                if den == 0.0 {
                    return;
                }
                let (wx, wy) = (a.0 - p.0, a.1 - p.1);
                let t = (wx * ey - wy * ex) / den;
                let u = (wx * dy - wy * dx) / den;
                if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) && best.is_none_or(|c| t < c.t) {
                    best = Some(CrossingPoint {
                        t,
                        point: (a.0 + u * ex, a.1 + u * ey),
                        edge: e,
                        cap: self.caps[e],
                    });
                }
            });
        best
    }
}

/// Cuts the traced curve into a polygon.
///
/// Samples that diverged or reach `|y| >= y_max` are dropped; each such run
/// is bridged by vertical segments from its neighbours to `∓y_max` joined by
/// a horizontal cap (`-y_max` for runs at positive angles, whose rays point
/// down). A run containing `theta = 0` or `theta = ±pi` (unbounded `x`) is
/// bridged by a straight edge.
pub fn polygonize(curve: &BoundaryCurve, y_max: f64) -> Result<RegionPolygon> {
    if !(y_max > 0.0 && y_max.is_finite()) {
        return Err(Error::Domain(format!("y_max must be positive and finite, got {y_max}")));
    }
    // the sample at +pi repeats the one at -pi
    let samples = &curve.samples[..curve.samples.len() - 1];
    let n = samples.len();
    let keep = |k: usize| !samples[k].diverged && samples[k].y.abs() < y_max;
    let Some(first_kept) = (0..n).find(|&k| keep(k)) else {
        return Err(Error::InvalidPolygon("every boundary sample diverged".into()));
    };

    let mut vertices = Vec::with_capacity(n + 16);
    let mut k = first_kept;
    loop {
        let a = samples[k];
        vertices.push((a.x, a.y));
        let mut j = (k + 1) % n;
        if !keep(j) {
            let (mut pos, mut neg) = (false, false);
            while !keep(j) {
                let t = samples[j].theta;
                if t == 0.0 || t.abs() == PI {
                    pos = true;
                    neg = true;
                }
                pos |= t > 0.0;
                neg |= t < 0.0;
                j = (j + 1) % n;
            }
            if pos != neg {
                let y = if pos { -y_max } else { y_max };
                vertices.push((a.x, y));
                vertices.push((samples[j].x, y));
            }
        }
        if j == first_kept {
            break;
        }
        k = j;
    }
    let mut poly = RegionPolygon::from_vertices(vertices, y_max)?;
    poly.grid_size = Some(curve.grid_size);
    poly.abel_radius = Some(curve.abel_radius);
    if !poly.contains(curve.start) {
        return Err(Error::StartOutside(curve.start.0, curve.start.1));
    }
    Ok(poly)
}

/// Uniform grid of cells, each listing the edges whose bounding box meets it.
#[derive(Debug, Clone)]
struct GridIndex {
    x0: f64,
    y0: f64,
    h: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    fn build(v: &[Point]) -> Self {
        let n = v.len();
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in v {
            x0 = x0.min(p.0);
            y0 = y0.min(p.1);
            x1 = x1.max(p.0);
            y1 = y1.max(p.1);
        }
        let (w, hgt) = (x1 - x0, y1 - y0);
        let mut lengths: Vec<f64> = (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                (b.0 - a.0).hypot(b.1 - a.1)
            })
            .collect();
        lengths.sort_by(f64::total_cmp);
        let median = lengths[n / 2];
        let mut h = (w.hypot(hgt) / 1024.0).max(2.0 * median);
        if w.max(hgt) / h > (MAX_CELLS_PER_AXIS - 1) as f64 {
            h = w.max(hgt) / (MAX_CELLS_PER_AXIS - 1) as f64;
        }
        let nx = ((w / h).floor() as usize + 1).min(MAX_CELLS_PER_AXIS);
        let ny = ((hgt / h).floor() as usize + 1).min(MAX_CELLS_PER_AXIS);
        let mut index = Self {
            x0,
            y0,
            h,
            nx,
            ny,
            starts: Vec::new(),
            items: Vec::new(),
        };
        let ranges: Vec<_> = (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                index.cell_range(a.0.min(b.0), a.1.min(b.1), a.0.max(b.0), a.1.max(b.1))
            })
            .collect();
        let mut counts = vec![0u32; nx * ny + 1];
        for r in ranges.iter().flatten() {
            for iy in r.2..=r.3 {
                for ix in r.0..=r.1 {
                    counts[iy * nx + ix + 1] += 1;
                }
            }
        }
        for c in 1..counts.len() {
            counts[c] += counts[c - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; counts[nx * ny] as usize];
        for (e, r) in ranges.iter().enumerate() {
            if let Some(r) = r {
                for iy in r.2..=r.3 {
                    for ix in r.0..=r.1 {
                        let slot = &mut fill[iy * nx + ix];
                        items[*slot as usize] = e as u32;
                        *slot += 1;
                    }
                }
            }
        }
        index.starts = counts;
        index.items = items;
        index
    }

    fn extent(&self) -> f64 {
        (self.nx as f64 * self.h).hypot(self.ny as f64 * self.h)
    }

    /// Inclusive cell ranges `(ix0, ix1, iy0, iy1)` covering a box, or `None`
    /// if the box misses the grid.
    fn cell_range(&self, xa: f64, ya: f64, xb: f64, yb: f64) -> Option<(usize, usize, usize, usize)> {
        let fx0 = ((xa - self.x0) / self.h).floor();
        let fx1 = ((xb - self.x0) / self.h).floor();
        let fy0 = ((ya - self.y0) / self.h).floor();
        let fy1 = ((yb - self.y0) / self.h).floor();
        if fx1 < 0.0 || fy1 < 0.0 || fx0 >= self.nx as f64 || fy0 >= self.ny as f64 || fx0.is_nan() || fy0.is_nan() {
            return None;
        }
        let clamp = |f: f64, n: usize| (f.max(0.0) as usize).min(n - 1);
        Some((
            clamp(fx0, self.nx),
            clamp(fx1, self.nx),
            clamp(fy0, self.ny),
            clamp(fy1, self.ny),
        ))
    }

    fn for_each_in_box(&self, xa: f64, ya: f64, xb: f64, yb: f64, mut f: impl FnMut(usize)) {
        if let Some((ix0, ix1, iy0, iy1)) = self.cell_range(xa, ya, xb, yb) {
            for iy in iy0..=iy1 {
                for ix in ix0..=ix1 {
                    let c = iy * self.nx + ix;
                    for &e in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
                        f(e as usize);
                    }
                }
            }
        }
    }
}
