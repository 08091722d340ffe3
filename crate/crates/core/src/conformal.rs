//! The map `psi`, its boundary curve, and the closed forms available for step
//! profiles (atomic laws).
//!
//! On the unit circle `Re psi(e^{i theta}) = phi(theta)` and the imaginary part
//! is the conjugate series `sum a_n sin(n theta)`. For discontinuous `phi` that
//! series diverges at the jumps, so the trace evaluates it at an Abel radius
//! `r < 1` and flags samples where it runs away.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::fourier::{start_point, FourierSeries, DEFAULT_QUANTILE_CLIP};
use crate::geometry::Point;

/// Two consecutive trace values with at most this mass strictly between
/// them straddle a gap of the support.
const GAP_MASS: f64 = 1e-12;

/// A jump of `phi` carrying at least this share of the increment between two
/// consecutive samples makes them straddle a gap (Cantor-type laws, where
/// every increment of the quantile is a sum of jumps).
const JUMP_DOMINANCE: f64 = 0.9;

/// Jumps narrower than this share of the traced `x` range are left as chords.
const MIN_GAP_FRACTION: f64 = 1e-2;

/// Level offset used to read the right limit of the quantile at a jump.
const RIGHT_LIMIT_OFFSET: f64 = 1e-12;

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn horner_derivative(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (n, &a)| acc * z + n as f64 * a)
}

fn check_inside(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|z| = {} is not inside the unit disc", z.norm())))
    }
}

/// `psi(z) = sum_{n<=N} a_n z^n` for `|z| < 1`.
pub fn psi_eval(series: &FourierSeries, z: Complex64) -> Result<Complex64> {
    check_inside(z)?;
    Ok(horner(&series.coeffs, z))
}

/// `psi'(z) = sum_{n<=N} n a_n z^(n-1)` for `|z| < 1`.
pub fn psi_derivative(series: &FourierSeries, z: Complex64) -> Result<Complex64> {
    check_inside(z)?;
    Ok(horner_derivative(&series.coeffs, z))
}

/// `psi'` using only `a_1..a_m`; callers pick `m` from `|z|` so the dropped
/// terms are negligible.
pub fn psi_derivative_partial(series: &FourierSeries, z: Complex64, m: usize) -> Complex64 {
    let end = (m + 1).min(series.coeffs.len());
    horner_derivative(&series.coeffs[..end], z)
}

/// Conjugate series `sum_{n>=1} a_n r^n sin(n theta)`, i.e. `Im psi(r e^{i theta})`.
pub fn conjugate_series(series: &FourierSeries, theta: f64, r: f64) -> f64 {
    horner(&series.coeffs, Complex64::from_polar(r, theta)).im
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Defaults to `1 - 1/N`.
    pub abel_radius: Option<f64>,
    /// Defaults to `1e3 (1 + sd)`.
    pub divergence_cap: Option<f64>,
    pub quantile_clip: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            abel_radius: None,
            divergence_cap: None,
            quantile_clip: DEFAULT_QUANTILE_CLIP,
        }
    }
}

impl TraceOptions {
    fn radius(&self, series: &FourierSeries) -> f64 {
        self.abel_radius.unwrap_or(1.0 - 1.0 / series.order() as f64)
    }

    fn cap(&self, dist: &Distribution) -> f64 {
        self.divergence_cap
            .unwrap_or_else(|| 1e3 * (1.0 + dist.moments().variance.sqrt()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub diverged: bool,
}

/// Sampled `theta -> psi(e^{i theta})` on a uniform grid over `[-pi, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub samples: Vec<BoundarySample>,
    pub abel_radius: f64,
    pub grid_size: usize,
    pub divergence_cap: f64,
    /// Quantile-level clip applied at unbounded ends, if any was needed.
    pub quantile_clip: Option<f64>,
    /// `psi(0)`.
    pub start: (f64, f64),
}

impl BoundaryCurve {
    pub fn finite_samples(&self) -> impl Iterator<Item = &BoundarySample> {
        self.samples.iter().filter(|s| !s.diverged)
    }
}

/// One boundary sample: `x = phi(theta)` (clipped where `G` is unbounded),
/// `y` the Abel-summed conjugate series.
pub fn boundary_point(series: &FourierSeries, dist: &Distribution, theta: f64, opts: &TraceOptions) -> BoundarySample {
    let raw = dist.phi(theta);
    let x = if raw.is_finite() {
        raw
    } else {
        dist.phi_clipped(theta, opts.quantile_clip)
    };
    let y = conjugate_series(series, theta, opts.radius(series));
    BoundarySample {
        theta,
        x,
        y,
        diverged: !raw.is_finite() || !y.is_finite() || y.abs() > opts.cap(dist),
    }
}

fn grid_half(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 3 || grid_size.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "grid size must be odd and at least 3, got {grid_size}"
        )));
    }
    let m = (grid_size - 1) / 2;
    let h = PI / m as f64;
    Ok((0..=m).map(|j| if j == m { PI } else { j as f64 * h }).collect())
}

/// Mirrors samples computed on `[0, pi]` onto `[-pi, 0)` so that
/// `x(-theta) = x(theta)` and `y(-theta) = -y(theta)` hold exactly.
fn reflect(half: Vec<BoundarySample>) -> Vec<BoundarySample> {
    let mut out: Vec<BoundarySample> = half[1..]
        .iter()
        .rev()
        .map(|s| BoundarySample {
            theta: -s.theta,
            y: -s.y,
            ..*s
        })
        .collect();
    out.extend(half);
    out
}

/// Traces the boundary with default options.
pub fn trace(series: &FourierSeries, dist: &Distribution, grid_size: usize) -> Result<BoundaryCurve> {
    trace_with(series, dist, grid_size, &TraceOptions::default())
}

/// Traces the boundary on `grid_size` (odd) equally spaced angles in `[-pi, pi]`.
///
/// Besides runaway conjugate values, both samples on either side of a jump
/// of `phi` across a gap of the support are flagged as diverged: the boundary
/// there consists of two vertical rays, not of the chord joining them.
pub fn trace_with(
    series: &FourierSeries,
    dist: &Distribution,
    grid_size: usize,
    opts: &TraceOptions,
) -> Result<BoundaryCurve> {
    let thetas = grid_half(grid_size)?;
    let mut half: Vec<BoundarySample> = thetas
        .par_iter()
        .map(|&t| boundary_point(series, dist, t, opts))
        .collect();
    let depth = (usize::BITS - grid_size.leading_zeros() + 1).min(30);
    let jumps: Vec<(f64, f64)> = dist
        .jump_angles(depth)
        .into_iter()
        .map(|t| {
            let y = t / PI;
            (t, dist.quantile_limit(y + RIGHT_LIMIT_OFFSET) - dist.quantile_limit(y))
        })
        .collect();
    let (lo, hi) = half
        .iter()
        .filter(|s| s.x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.x), hi.max(s.x))
        });
    let min_gap = MIN_GAP_FRACTION * (hi - lo);
    let mut j = 0;
    for k in 0..half.len() - 1 {
        let (a, b) = (half[k].x, half[k + 1].x);
        let (ta, tb) = (half[k].theta, half[k + 1].theta);
        while j < jumps.len() && jumps[j].0 < ta {
            j += 1;
        }
        let mut largest = 0.0_f64;
        let mut i = j;
        while i < jumps.len() && jumps[i].0 < tb {
            largest = largest.max(jumps[i].1);
            i += 1;
        }
        if b > a && (dist.mass_open(a, b) <= GAP_MASS || (largest >= JUMP_DOMINANCE * (b - a) && largest >= min_gap)) {
            half[k].diverged = true;
            half[k + 1].diverged = true;
        }
    }
    Ok(BoundaryCurve {
        samples: reflect(half),
        abel_radius: opts.radius(series),
        grid_size,
        divergence_cap: opts.cap(dist),
        quantile_clip: (!dist.is_bounded()).then_some(opts.quantile_clip),
        start: start_point(series),
    })
}

/// Traces `psi(r e^{i theta})` directly from the series, both coordinates.
/// Used for synthetic maps (no underlying law); `r = 1` is allowed.
pub fn trace_series(series: &FourierSeries, grid_size: usize, r: f64) -> Result<BoundaryCurve> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1], got {r}")));
    }
    let thetas = grid_half(grid_size)?;
    let half = thetas
        .par_iter()
        .map(|&t| {
            let w = horner(&series.coeffs, Complex64::from_polar(r, t));
            BoundarySample {
                theta: t,
                x: w.re,
                y: w.im,
                diverged: false,
            }
        })
        .collect();
    Ok(BoundaryCurve {
        samples: reflect(half),
        abel_radius: r,
        grid_size,
        divergence_cap: f64::INFINITY,
        quantile_clip: None,
        start: start_point(series),
    })
}

/// `(1/pi) log|sin(theta0/2 - x/2) / sin(theta0/2 + x/2)|`: the conjugate
/// function of the periodic step `1{|theta| >= theta0}`. Infinite at `x = ±theta0`.
pub fn hilbert_step(theta0: f64, x: f64) -> f64 {
    let num = (0.5 * (theta0 - x)).sin();
    let den = (0.5 * (theta0 + x)).sin();
    (num / den).abs().ln() / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub theta: f64,
    pub alpha: f64,
}

/// `phi(theta) = base + sum_i alpha_i 1{|theta| >= theta_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub base: f64,
    pub steps: Vec<Step>,
}

impl StepProfile {
    pub fn new(base: f64, steps: Vec<Step>) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if !(s.theta > 0.0 && s.theta < PI) {
                return Err(Error::Domain(format!("step angle {} outside (0, pi)", s.theta)));
            }
            if !(s.alpha > 0.0 && s.alpha.is_finite()) {
                return Err(Error::Domain(format!("step height {} must be positive", s.alpha)));
            }
            if i > 0 && s.theta <= steps[i - 1].theta {
                return Err(Error::Domain("step angles must be strictly increasing".into()));
            }
        }
        Ok(Self { base, steps })
    }

    /// Profile of an atomic law: base at the smallest atom, one step per gap.
    pub fn from_distribution(dist: &Distribution) -> Result<Self> {
        let atoms = dist
            .support_atoms()
            .ok_or_else(|| Error::Domain("tips require atomic distribution".into()))?;
        let mut acc = 0.0;
        let steps = atoms
            .windows(2)
            .map(|w| {
                acc += w[0].p;
                Step {
                    theta: PI * acc,
                    alpha: w[1].x - w[0].x,
                }
            })
            .collect();
        Ok(Self {
            base: atoms[0].x,
            steps,
        })
    }

    /// Value of the profile on each of the `steps.len() + 1` constancy intervals.
    pub fn levels(&self) -> Vec<f64> {
        let mut out = vec![self.base];
        let mut x = self.base;
        for s in &self.steps {
            x += s.alpha;
            out.push(x);
        }
        out
    }
}

/// `sum_j alpha_j hilbert_step(theta_j, x)`.
pub fn hilbert_profile(profile: &StepProfile, x: f64) -> f64 {
    profile.steps.iter().map(|s| s.alpha * hilbert_step(s.theta, x)).sum()
}

/// `sum_i alpha_i (cot((theta_i - x)/2) + cot((theta_i + x)/2))`, written as
/// `sum_i 2 alpha_i sin(theta_i) / (cos x - cos theta_i)`. Its zeros are the
/// critical points of [`hilbert_profile`].
pub fn cot_sum(profile: &StepProfile, x: f64) -> f64 {
    let cx = x.cos();
    profile
        .steps
        .iter()
        .map(|s| 2.0 * s.alpha * s.theta.sin() / (cx - s.theta.cos()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayTip {
    pub atom_x: f64,
    pub critical_angle: Option<f64>,
    /// `f64::INFINITY` when the rays over this atom never end.
    pub tip_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTipSet {
    pub tips: Vec<RayTip>,
}

pub const TIP_SCAN_POINTS: usize = 10_000;
pub const TIP_POLE_MARGIN: f64 = 1e-9;
pub const TIP_TOLERANCE: f64 = 1e-12;
pub const TIP_MAX_ITERATIONS: usize = 200;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (f_lo0, f_hi0) = (f(lo), f(hi));
    let mut f_lo = f_lo0;
    for _ in 0..TIP_MAX_ITERATIONS {
        if hi - lo <= TIP_TOLERANCE {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= TIP_TOLERANCE {
        return Ok(0.5 * (lo + hi));
    }
    Err(Error::Bisection {
        lo,
        hi,
        f_lo: f_lo0,
        f_hi: f_hi0,
        iterations: TIP_MAX_ITERATIONS,
    })
}

/// Ray tips of an atomic domain.
///
/// On the angle interval where `phi` equals atom `x_i` the boundary runs along
/// the vertical line `x = x_i`; the conjugate part tends to `-inf` at interior
/// step angles, so the boundary over an interior atom is a ray from `-inf` up
/// to the largest value of `y`, attained at a zero of [`cot_sum`], and back. When
/// no zero exists the line is never left and the tip is at infinity.
pub fn ray_tips(profile: &StepProfile) -> Result<RayTipSet> {
    if profile.steps.is_empty() {
        return Err(Error::Domain("ray tips need at least one step".into()));
    }
    let mut edges = vec![0.0];
    edges.extend(profile.steps.iter().map(|s| s.theta));
    edges.push(PI);
    let levels = profile.levels();
    let mut tips = Vec::with_capacity(levels.len());
    for (i, w) in edges.windows(2).enumerate() {
        let lo = w[0] + TIP_POLE_MARGIN;
        let hi = w[1] - TIP_POLE_MARGIN;
        let mut best: Option<(f64, f64)> = None;
        if hi > lo {
            let h = (hi - lo) / (TIP_SCAN_POINTS - 1) as f64;
            let mut prev_x = lo;
            let mut prev_f = cot_sum(profile, lo);
            for k in 1..TIP_SCAN_POINTS {
                let x = if k == TIP_SCAN_POINTS - 1 {
                    hi
                } else {
                    lo + k as f64 * h
                };
                let f = cot_sum(profile, x);
                if prev_f != 0.0 && f != 0.0 && (prev_f < 0.0) != (f < 0.0) {
                    let root = bisect(|t| cot_sum(profile, t), prev_x, x)?;
                    let y = hilbert_profile(profile, root).abs();
                    if best.is_none_or(|(_, by)| y < by) {
                        best = Some((root, y));
                    }
                } else if f == 0.0 {
                    let y = hilbert_profile(profile, x).abs();
                    if best.is_none_or(|(_, by)| y < by) {
                        best = Some((x, y));
                    }
                }
                prev_x = x;
                prev_f = f;
            }
        }
        tips.push(RayTip {
            atom_x: levels[i],
            critical_angle: best.map(|b| b.0),
            tip_y: best.map_or(f64::INFINITY, |b| b.1),
        });
    }
    Ok(RayTipSet { tips })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Index of the first sample of each crossing segment.
    pub segments: (usize, usize),
    pub point: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub simple: bool,
    pub first_crossing: Option<Crossing>,
    /// Touching or collinear-overlapping segment pairs that do not cross.
    /// Slits along the vertical line over an atom are traced twice and show
    /// up here.
    pub contacts: usize,
    pub segments: usize,
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

enum Contact {
    None,
    Touch,
    Cross((f64, f64)),
}

fn classify(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> Contact {
    let scale = [p1, p2, q1, q2]
        .iter()
        .fold(0.0_f64, |m, p| m.max(p.0.abs()).max(p.1.abs()))
        .max(1.0);
    let eps = 1e-12 * scale * scale;
    let sgn = |v: f64| {
        if v > eps {
            1
        } else if v < -eps {
            -1
        } else {
            0
        }
    };
    let d1 = sgn(orient(q1, q2, p1));
    let d2 = sgn(orient(q1, q2, p2));
    let d3 = sgn(orient(p1, p2, q1));
    let d4 = sgn(orient(p1, p2, q2));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        let (a1, a2) = (orient(q1, q2, p1), orient(q1, q2, p2));
        let t = a1 / (a1 - a2);
        return Contact::Cross((p1.0 + t * (p2.0 - p1.0), p1.1 + t * (p2.1 - p1.1)));
    }
    let on = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        c.0 >= a.0.min(b.0) - 1e-12 * scale
            && c.0 <= a.0.max(b.0) + 1e-12 * scale
            && c.1 >= a.1.min(b.1) - 1e-12 * scale
            && c.1 <= a.1.max(b.1) + 1e-12 * scale
    };
    if (d1 == 0 && on(q1, q2, p1))
        || (d2 == 0 && on(q1, q2, p2))
        || (d3 == 0 && on(p1, p2, q1))
        || (d4 == 0 && on(p1, p2, q2))
    {
        return Contact::Touch;
    }
    Contact::None
}

/// Looks for self-intersections of the polyline through consecutive finite
/// samples. Segments sharing a sample are not compared. Only proper crossings
/// make the curve non-simple; touching pairs are counted as contacts.
pub fn simplicity_check(curve: &BoundaryCurve) -> SimplicityReport {
    let s = &curve.samples;
    let mut segs: Vec<(usize, Point, Point)> = Vec::new();
    for i in 0..s.len().saturating_sub(1) {
        let (a, b) = (&s[i], &s[i + 1]);
        if a.diverged || b.diverged || (a.x == b.x && a.y == b.y) {
            continue;
        }
        segs.push((i, (a.x, a.y), (b.x, b.y)));
    }
    let mut order: Vec<usize> = (0..segs.len()).collect();
    let min_x = |k: usize| segs[k].1 .0.min(segs[k].2 .0);
    let max_x = |k: usize| segs[k].1 .0.max(segs[k].2 .0);
    order.sort_by(|&a, &b| min_x(a).total_cmp(&min_x(b)).then(a.cmp(&b)));

    let mut active: Vec<usize> = Vec::new();
    let mut contacts = 0;
    let mut first: Option<Crossing> = None;
    for &k in &order {
        let x0 = min_x(k);
        active.retain(|&j| max_x(j) >= x0);
        let (ik, p1, p2) = segs[k];
        let (ky0, ky1) = (p1.1.min(p2.1), p1.1.max(p2.1));
        for &j in &active {
            let (ij, q1, q2) = segs[j];
            if ik.abs_diff(ij) <= 1 {
                continue;
            }
            if q1.1.max(q2.1) < ky0 || q1.1.min(q2.1) > ky1 {
                continue;
            }
            match classify(p1, p2, q1, q2) {
                Contact::None => {}
                Contact::Touch => contacts += 1,
                Contact::Cross(point) => {
                    let pair = (ik.min(ij), ik.max(ij));
                    if first.is_none_or(|c| pair < c.segments) {
                        first = Some(Crossing { segments: pair, point });
                    }
                }
            }
        }
        active.push(k);
    }
    SimplicityReport {
        simple: first.is_none(),
        first_crossing: first,
        contacts,
        segments: segs.len(),
    }
}
