//! Cosine series of the profile `phi`.
//!
//! Because `phi` is even, `phi(theta) ~ a_0 + sum_{n>=1} a_n cos(n theta)` with
//!
//! ```text
//! a_0 = (1 / 2pi) ∫ phi,      a_n = (1 / pi) ∫ phi(theta) cos(n theta) dtheta
//! ```
//!
//! over `(-pi, pi)`. The same numbers are the power-series coefficients of the
//! map `psi(z) = sum a_n z^n`, and `1/2 sum_{n>=1} a_n^2` is the expected exit
//! time of the embedded Brownian motion, which equals the variance of the law.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::{Distribution, DistributionKind};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 4096;
pub const CANTOR_ORDER: usize = 65536;

/// Quantile levels closer than this to an unbounded end of `(0, 1)` are clipped.
pub const DEFAULT_QUANTILE_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMethod {
    /// Exact sum over the jumps of a step profile (atomic laws).
    AnalyticStep,
    /// Closed form for the linear profile of a uniform law.
    AnalyticUniform,
    /// Adaptive Gauss–Kronrod panels.
    Quadrature,
    /// Scaling recursion of the Cantor quantile's Fourier transform.
    SelfSimilar,
    /// Coefficients supplied directly by the caller.
    Supplied,
}

impl CoefficientMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientMethod::AnalyticStep => "analytic_step",
            CoefficientMethod::AnalyticUniform => "analytic_uniform",
            CoefficientMethod::Quadrature => "quadrature",
            CoefficientMethod::SelfSimilar => "self_similar",
            CoefficientMethod::Supplied => "supplied",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            CoefficientMethod::AnalyticStep,
            CoefficientMethod::AnalyticUniform,
            CoefficientMethod::Quadrature,
            CoefficientMethod::SelfSimilar,
            CoefficientMethod::Supplied,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
    }
}

/// Truncated cosine series `a_0..a_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub coeffs: Vec<f64>,
    pub method: CoefficientMethod,
    /// Energy missing from the truncated series, `max(0, Var - 1/2 sum a_n^2)`.
    /// Zero for supplied coefficients.
    pub tail_estimate: f64,
}

impl FourierSeries {
    /// Wraps caller-provided coefficients (`coeffs[0]` is the constant term).
    pub fn from_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Domain("a series needs at least a_0 and a_1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        Ok(Self {
            coeffs,
            method: CoefficientMethod::Supplied,
            tail_estimate: 0.0,
        })
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Partial sum `sum_{n<=N} a_n cos(n theta)`.
    pub fn reconstruct(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * (n as f64 * theta).cos())
            .sum()
    }

    /// Copy truncated to order `n` (no-op if already shorter).
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(n + 1);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Target absolute error for `∫_0^pi phi`.
    pub tolerance: f64,
    pub quantile_clip: f64,
    /// Upper bound on the number of Gauss–Kronrod panels.
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            quantile_clip: DEFAULT_QUANTILE_CLIP,
            max_panels: 1 << 22,
        }
    }
}

/// Default truncation order for a law: slow-converging Cantor series get more terms.
pub fn default_order(dist: &Distribution) -> usize {
    match dist.kind() {
        DistributionKind::Cantor => CANTOR_ORDER,
        _ => DEFAULT_ORDER,
    }
}

/// Coefficients `a_0..a_N`, using a closed form whenever one exists.
pub fn cosine_coefficients(dist: &Distribution, n: usize) -> Result<FourierSeries> {
    if n < 1 {
        return Err(Error::Domain(format!("truncation order must be at least 1, got {n}")));
    }
    let (coeffs, method) = if let Some(profile) = StepProfileParts::from_distribution(dist) {
        (profile.coefficients(n), CoefficientMethod::AnalyticStep)
    } else {
        match dist.spec() {
            crate::distributions::DistributionSpec::Uniform { a, b } => {
                (uniform_coefficients(a, b, n), CoefficientMethod::AnalyticUniform)
            }
            crate::distributions::DistributionSpec::Cantor { center } => {
                (cantor_coefficients(center, n), CoefficientMethod::SelfSimilar)
            }
            _ => (
                quadrature_coefficients(dist, n, &QuadratureOptions::default())?,
                CoefficientMethod::Quadrature,
            ),
        }
    };
    Ok(finish(dist, coeffs, method))
}

/// Coefficients computed by adaptive quadrature regardless of the law.
pub fn cosine_coefficients_by_quadrature(
    dist: &Distribution,
    n: usize,
    opts: &QuadratureOptions,
) -> Result<FourierSeries> {
    if n < 1 {
        return Err(Error::Domain(format!("truncation order must be at least 1, got {n}")));
    }
    let coeffs = quadrature_coefficients(dist, n, opts)?;
    Ok(finish(dist, coeffs, CoefficientMethod::Quadrature))
}

fn finish(dist: &Distribution, coeffs: Vec<f64>, method: CoefficientMethod) -> FourierSeries {
    let mut series = FourierSeries {
        coeffs,
        method,
        tail_estimate: 0.0,
    };
    series.tail_estimate = parseval_gap(dist, &series).max(0.0);
    series
}

/// `1/2 sum_{n=1}^{N} a_n^2`.
pub fn expected_exit_time(series: &FourierSeries) -> f64 {
    0.5 * series.coeffs[1..].iter().map(|a| a * a).sum::<f64>()
}

/// `Var - 1/2 sum_{n=1}^{N} a_n^2`.
pub fn parseval_gap(dist: &Distribution, series: &FourierSeries) -> f64 {
    dist.moments().variance - expected_exit_time(series)
}

/// `psi(0) = (a_0, 0)`.
pub fn start_point(series: &FourierSeries) -> (f64, f64) {
    (series.coeffs[0], 0.0)
}

/// A step profile split into its constant base and `(angle, jump)` pairs.
pub(crate) struct StepProfileParts {
    pub base: f64,
    pub steps: Vec<(f64, f64)>,
}

impl StepProfileParts {
    pub fn from_distribution(dist: &Distribution) -> Option<Self> {
        let atoms = dist.support_atoms()?;
        let mut acc = 0.0;
        let mut steps = Vec::with_capacity(atoms.len().saturating_sub(1));
        for w in atoms.windows(2) {
            acc += w[0].p;
            steps.push((PI * acc, w[1].x - w[0].x));
        }
        Some(Self {
            base: atoms[0].x,
            steps,
        })
    }

    /// A jump `alpha` at `theta0` (the profile `alpha * 1{|theta| >= theta0}`)
    /// adds `alpha (pi - theta0) / pi` to `a_0` and `-2 alpha sin(n theta0) / (pi n)` to `a_n`.
    pub fn coefficients(&self, n_max: usize) -> Vec<f64> {
        let mut coeffs = vec![0.0; n_max + 1];
        coeffs[0] = self.base + self.steps.iter().map(|&(t, a)| a * (PI - t) / PI).sum::<f64>();
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            let nf = n as f64;
            *c = self.steps.iter().map(|&(t, a)| -2.0 * a * (nf * t).sin()).sum::<f64>() / (PI * nf);
        }
        coeffs
    }
}

fn uniform_coefficients(a: f64, b: f64, n_max: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; n_max + 1];
    coeffs[0] = 0.5 * (a + b);
    for n in (1..=n_max).step_by(2) {
        let nf = n as f64;
        coeffs[n] = -4.0 * (b - a) / (PI * PI * nf * nf);
    }
    coeffs
}

/// Levels of the scaling recursion; each contracts the remainder by at least 1/3.
const CANTOR_LEVELS: usize = 48;

/// With `G` the Cantor quantile on `[0, 1]`, `a_n = 2 Re J(n pi)` where
/// `J(w) = ∫_0^1 G(y) e^{iwy} dy`. Splitting `[0, 1]` at one half and using
/// `G(y) = G(2y) / 3` on the left, `G(y) = 2/3 + G(2y - 1) / 3` on the right gives
/// `J(w) = A(w) J(w/2) + B(w)`, unrolled here until the remainder is negligible.
fn cantor_coefficients(center: bool, n_max: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; n_max + 1];
    coeffs[0] = if center { 0.0 } else { 0.5 };
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = 2.0 * cantor_transform(n as f64 * PI).re;
    }
    coeffs
}

fn cantor_transform(w: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    let mut w = w;
    for _ in 0..CANTOR_LEVELS {
        let q = 0.25 * w;
        let sinc = if q == 0.0 { 1.0 } else { q.sin() / q };
        let b = Complex64::from_polar((2.0 / 3.0) * 0.5 * sinc, 3.0 * q);
        acc += prod * b;
        prod *= (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 0.5 * w)) / 6.0;
        w *= 0.5;
    }
    // J(0) = ∫ G = 1/2
    acc + prod * 0.5
}

// Gauss–Kronrod 15-point rule (QUADPACK qk15): abscissae, Kronrod weights, and
// the weights of the embedded 7-point Gauss rule on abscissae 1, 3, 5, 7.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One panel: 15 weighted nodes and the |Kronrod - Gauss| error estimate.
struct Panel {
    nodes: [(f64, f64); 15],
    error: f64,
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut nodes = [(0.0, 0.0); 15];
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    nodes[14] = (c, h * WGK[7] * fc);
    for j in 0..7 {
        let x1 = c - h * XGK[j];
        let x2 = c + h * XGK[j];
        let (f1, f2) = (f(x1), f(x2));
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
        nodes[2 * j] = (x1, h * WGK[j] * f1);
        nodes[2 * j + 1] = (x2, h * WGK[j] * f2);
    }
    Panel {
        nodes,
        error: (h * (kronrod - gauss)).abs(),
    }
}

/// Weighted nodes of an adaptive panel cover of `[0, pi]` for `f`.
///
/// The interval is first cut at `breaks`, each piece gets panels in proportion
/// to its width (at least `base_panels` across `[0, pi]`), and any panel whose
/// error estimate exceeds its share of `opts.tolerance` is bisected.
fn adaptive_nodes(
    f: &impl Fn(f64) -> f64,
    breaks: &[f64],
    base_panels: usize,
    opts: &QuadratureOptions,
) -> Result<Vec<(f64, f64)>> {
    let mut cuts = vec![0.0];
    cuts.extend(breaks.iter().copied().filter(|&t| t > 0.0 && t < PI));
    cuts.push(PI);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut nodes = Vec::new();
    let mut panels = 0usize;
    let mut achieved = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let count = ((base_panels as f64 * (hi - lo) / PI).ceil() as usize).max(1);
        for k in 0..count {
            let a = lo + (hi - lo) * k as f64 / count as f64;
            let b = if k + 1 == count {
                hi
            } else {
                lo + (hi - lo) * (k + 1) as f64 / count as f64
            };
            // depth-first, left to right, so nodes stay sorted
            let mut stack = vec![(a, b, 0u32)];
            while let Some((a, b, depth)) = stack.pop() {
                let panel = gk15(f, a, b);
                let share = opts.tolerance * (b - a) / PI;
                if panel.error > share && depth < 48 && panels < opts.max_panels {
                    let m = 0.5 * (a + b);
                    stack.push((m, b, depth + 1));
                    stack.push((a, m, depth + 1));
                    continue;
                }
                panels += 1;
                if panel.error > share {
                    achieved += panel.error;
                }
                nodes.extend_from_slice(&panel.nodes);
            }
        }
    }
    if achieved > opts.tolerance || panels >= opts.max_panels {
        return Err(Error::Quadrature {
            achieved,
            tolerance: opts.tolerance,
            panels,
        });
    }
    Ok(nodes)
}

/// Weighted sums `sum_j w_j cos(n t_j)` for `n = 0..=n_max`. Cosines come from
/// an angle-addition recurrence restarted from exact values every 64 orders.
fn cosine_moments(nodes: &[(f64, f64)], n_max: usize) -> Vec<f64> {
    const BLOCK: usize = 64;
    let mut acc = vec![0.0; n_max + 1];
    for &(t, w) in nodes {
        let (s1, c1) = t.sin_cos();
        let mut n0 = 0;
        while n0 <= n_max {
            let (mut s, mut c) = (n0 as f64 * t).sin_cos();
            let end = (n0 + BLOCK).min(n_max + 1);
            for slot in &mut acc[n0..end] {
                *slot += w * c;
                let next_c = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = next_c;
            }
            n0 = end;
        }
    }
    acc
}

fn quadrature_coefficients(dist: &Distribution, n_max: usize, opts: &QuadratureOptions) -> Result<Vec<f64>> {
    let eps = opts.quantile_clip;
    let f = |t: f64| dist.phi_clipped(t, eps);
    let mut breaks = dist.jump_angles(16);
    if !dist.lower_bound().is_finite() {
        breaks.push(PI * eps);
    }
    if !dist.upper_bound().is_finite() {
        breaks.push(PI * (1.0 - eps));
    }
    let nodes = adaptive_nodes(&f, &breaks, n_max.max(32), opts)?;
    let mut coeffs = cosine_moments(&nodes, n_max);
    coeffs[0] /= PI;
    for c in &mut coeffs[1..] {
        *c *= 2.0 / PI;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bernoulli_coefficients_are_arctan_series() {
        let s = cosine_coefficients(&fixtures::bernoulli(), 8).unwrap();
        assert_eq!(s.method, CoefficientMethod::AnalyticStep);
        let want = [
            0.0,
            -4.0 / PI,
            0.0,
            4.0 / (3.0 * PI),
            0.0,
            -4.0 / (5.0 * PI),
            0.0,
            4.0 / (7.0 * PI),
            0.0,
        ];
        for (got, want) in s.coeffs.iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn analytic_and_quadrature_paths_agree() {
        let opts = QuadratureOptions::default();
        for d in [
            fixtures::bernoulli(),
            fixtures::three_atom(),
            fixtures::uniform(),
            fixtures::geometric(),
        ] {
            let a = cosine_coefficients(&d, 64).unwrap();
            let q = cosine_coefficients_by_quadrature(&d, 64, &opts).unwrap();
            for n in 0..=64 {
                assert_abs_diff_eq!(a.coeffs[n], q.coeffs[n], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn centered_laws_have_zero_constant_term() {
        for d in [
            fixtures::bernoulli(),
            fixtures::three_atom(),
            fixtures::uniform(),
            fixtures::cantor(),
        ] {
            let s = cosine_coefficients(&d, 16).unwrap();
            assert_abs_diff_eq!(s.coeffs[0], 0.0, epsilon = 1e-14);
        }
        let g = cosine_coefficients(&fixtures::gaussian(), 16).unwrap();
        assert_abs_diff_eq!(g.coeffs[0], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn exit_time_limits() {
        let u = cosine_coefficients(&fixtures::uniform(), 1).unwrap();
        assert_abs_diff_eq!(
            parseval_gap(&fixtures::uniform(), &u),
            1.0 / 3.0 - 32.0 / PI.powi(4),
            epsilon = 1e-15
        );
        let u = cosine_coefficients(&fixtures::uniform(), DEFAULT_ORDER).unwrap();
        assert!(parseval_gap(&fixtures::uniform(), &u).abs() < 1e-8);
        let b = cosine_coefficients(&fixtures::bernoulli(), DEFAULT_ORDER).unwrap();
        let gap = parseval_gap(&fixtures::bernoulli(), &b);
        assert!(gap > 0.0 && gap < 1e-3, "{gap}");
        let zero = FourierSeries::from_coefficients(vec![0.7, 0.0, 0.0]).unwrap();
        assert_eq!(expected_exit_time(&zero), 0.0);
    }

    #[test]
    fn start_points() {
        let s = cosine_coefficients(&fixtures::geometric(), 8).unwrap();
        let (x, y) = start_point(&s);
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-14);
        assert_eq!(y, 0.0);
        let u = cosine_coefficients(&Distribution::uniform(0.0, 2.0).unwrap(), 8).unwrap();
        assert_eq!(start_point(&u), (1.0, 0.0));
    }

    #[test]
    fn gaussian_energy_matches_variance() {
        let d = Distribution::gaussian(0.0, 2.0).unwrap();
        let s = cosine_coefficients(&d, 1024).unwrap();
        assert_eq!(s.method, CoefficientMethod::Quadrature);
        let gap = parseval_gap(&d, &s);
        assert!(gap > 0.0 && gap < 1e-2 * 4.0, "{gap}");
        // odd symmetry of the centered quantile kills the even coefficients
        for n in (2..=64).step_by(2) {
            assert_abs_diff_eq!(s.coeffs[n], 0.0, epsilon = 1e-10);
        }
    }

    /// Integrates cos(n theta) exactly over 2^20 equal cells of [0, pi], each
    /// weighted by the Cantor quantile at the cell midpoint. On a cell of
    /// dyadic level width 2^-20 the quantile moves by at most 3^-20.
    fn cantor_cell_oracle(n: usize) -> f64 {
        let d = Distribution::cantor(true);
        let cells = 1usize << 20;
        let h = PI / cells as f64;
        let nf = n as f64;
        (0..cells)
            .map(|k| {
                let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
                d.phi(0.5 * (a + b)) * ((nf * b).sin() - (nf * a).sin()) / nf
            })
            .sum::<f64>()
            * 2.0
            / PI
    }

    #[test]
    fn cantor_recursion_matches_cell_oracle() {
        let s = cosine_coefficients(&fixtures::cantor(), 200).unwrap();
        assert_eq!(s.method, CoefficientMethod::SelfSimilar);
        for n in [1, 2, 3, 5, 8, 31, 200] {
            assert_abs_diff_eq!(s.coeffs[n], cantor_cell_oracle(n), epsilon = 2e-9);
        }
    }

    #[test]
    fn cantor_energy_converges_slowly_to_variance() {
        let d = fixtures::cantor();
        let small = cosine_coefficients(&d, 64).unwrap();
        let big = cosine_coefficients(&d, CANTOR_ORDER).unwrap();
        let (g_small, g_big) = (parseval_gap(&d, &small), parseval_gap(&d, &big));
        assert!(g_big >= -1e-12 && g_big < g_small, "{g_small} {g_big}");
        assert!(g_big / d.moments().variance < 1e-3, "{g_big}");
    }

    #[test]
    fn energy_is_monotone_in_order() {
        for d in [fixtures::uniform(), fixtures::bernoulli(), fixtures::three_atom()] {
            let s = cosine_coefficients(&d, 512).unwrap();
            let mut prev = 0.0;
            for n in 1..=512 {
                let e = expected_exit_time(&s.truncated(n));
                assert!(e >= prev);
                assert!(e <= d.moments().variance + 1e-12);
                prev = e;
            }
        }
    }

    #[test]
    fn coefficients_decay() {
        for d in [
            fixtures::uniform(),
            fixtures::bernoulli(),
            fixtures::gaussian(),
            fixtures::cantor(),
        ] {
            let s = cosine_coefficients(&d, 1024).unwrap();
            let peak = s.coeffs[1..].iter().fold(0.0_f64, |m, a| m.max(a.abs()));
            let tail = s.coeffs[513..].iter().fold(0.0_f64, |m, a| m.max(a.abs()));
            assert!(s.coeffs[1024].abs() < peak);
            assert!(tail < 0.01 * peak, "{:?}: {tail} vs {peak}", d.kind());
        }
    }

    #[test]
    fn reconstruction_error_shrinks_with_order() {
        for d in [fixtures::uniform(), fixtures::bernoulli()] {
            let l1 = |n: usize| {
                let s = cosine_coefficients(&d, n).unwrap();
                let m = 10_000;
                (0..m)
                    .map(|k| {
                        let t = -PI + 2.0 * PI * (k as f64 + 0.5) / m as f64;
                        (s.reconstruct(t) - d.phi(t)).abs()
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI
                    / m as f64
            };
            let errs: Vec<f64> = [16, 32, 64, 128].into_iter().map(l1).collect();
            for w in errs.windows(2) {
                assert!(w[1] < w[0], "{:?}: {errs:?}", d.kind());
            }
        }
    }

    #[test]
    fn quadrature_reports_failure_with_achieved_error() {
        let opts = QuadratureOptions {
            tolerance: 1e-30,
            max_panels: 200,
            ..Default::default()
        };
        match cosine_coefficients_by_quadrature(&fixtures::gaussian(), 8, &opts) {
            Err(Error::Quadrature { achieved, panels, .. }) => {
                assert!(achieved > 0.0);
                assert!(panels >= 200);
            }
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_zero_order() {
        assert!(cosine_coefficients(&fixtures::uniform(), 0).is_err());
    }
}
