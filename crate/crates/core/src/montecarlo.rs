//! Brownian verification of the embedding.
//!
//! Disc mode runs planar Brownian motion from the origin to the unit circle
//! and pushes it through `psi`: the exit abscissa is `phi(exit angle)` and the
//! exit time of the image process is the clock `zeta = ∫ |psi'(X_s)|^2 ds`.
//! Domain mode runs Brownian motion directly in the polygonal region from
//! `psi(0)`. Either way the exit abscissa should follow the target law and
//! the mean exit time should equal its variance.
//!
//! Every path draws from its own ChaCha stream `(seed, path index)`, so the
//! report does not depend on how paths are scheduled across threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::conformal::psi_derivative_partial;
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::geometry::{Point, RegionPolygon};

/// Disc-mode paths stop once `|X| >= 1 - EPS_STOP`.
pub const EPS_STOP: f64 = 1e-3;

/// Domain-mode steps never shrink below `dt * MIN_STEP_FRACTION`.
pub const MIN_STEP_FRACTION: f64 = 1e-4;

/// Relative size of the `psi'` terms dropped inside the disc.
const DERIVATIVE_TAIL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Brownian motion in the unit disc, time-changed through `psi`.
    DiscTimeChange,
    /// Brownian motion in the polygonal region.
    DirectDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub mode: SimMode,
}

impl SimConfig {
    fn validate(&self, mode: SimMode) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::Domain("at least one path is required".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if self.mode != mode {
            return Err(Error::Domain(format!(
                "configuration is for {:?}, not {mode:?}",
                self.mode
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitSample {
    pub path_index: usize,
    pub exit_x: f64,
    pub exit_time: f64,
    /// Exited through a truncation cap (domain mode only).
    pub cap_exit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomFrequency {
    pub x: f64,
    pub p: f64,
    pub count: usize,
    pub frequency: f64,
    /// `(count - n p) / sqrt(n p (1 - p))`.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chi2Result {
    pub n: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub atoms: Vec<AtomFrequency>,
    pub snap_radius: f64,
    pub max_snap_distance: f64,
}

impl Chi2Result {
    pub fn max_abs_z(&self) -> f64 {
        self.atoms.iter().map(|a| a.z_score.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimConfig,
    pub target_mean: f64,
    pub target_variance: f64,
    pub mean_exit_time: f64,
    pub exit_time_se: f64,
    pub mean_exit_x: f64,
    pub exit_x_se: f64,
    pub ks: Option<KsResult>,
    pub chi2: Option<Chi2Result>,
    /// Present in domain mode.
    pub cap_exit_fraction: Option<f64>,
    pub y_max: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<ExitSample>,
}

impl SimulationReport {
    /// Acceptance band for the mean exit time: `[0.95 Var - 3 SE, 1.05 Var + 3 SE]`.
    pub fn exit_time_band(&self) -> (f64, f64) {
        (
            0.95 * self.target_variance - 3.0 * self.exit_time_se,
            1.05 * self.target_variance + 3.0 * self.exit_time_se,
        )
    }

    pub fn exit_time_in_band(&self) -> bool {
        let (lo, hi) = self.exit_time_band();
        (lo..=hi).contains(&self.mean_exit_time)
    }

    /// Optional stopping: the mean exit abscissa matches the mean of the law.
    pub fn mean_exit_x_consistent(&self) -> bool {
        (self.mean_exit_x - self.target_mean).abs() <= 3.0 * self.exit_x_se + 1e-12
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn build_report(
    config: SimConfig,
    dist: &Distribution,
    samples: Vec<ExitSample>,
    y_max: Option<f64>,
) -> Result<SimulationReport> {
    let m = dist.moments();
    let (mean_exit_time, exit_time_se) = mean_se(samples.iter().map(|s| s.exit_time));
    let xs: Vec<f64> = samples.iter().filter(|s| !s.cap_exit).map(|s| s.exit_x).collect();
    let (mean_exit_x, exit_x_se) = mean_se(xs.iter().copied());
    let (ks, chi2) = if xs.len() < MIN_SAMPLES {
        (None, None)
    } else if dist.is_atomic() {
        (None, Some(chi2_test(&xs, dist)?))
    } else {
        (Some(ks_test(&xs, dist)?), None)
    };
    let cap_exit_fraction = y_max.map(|_| samples.iter().filter(|s| s.cap_exit).count() as f64 / samples.len() as f64);
    Ok(SimulationReport {
        config,
        target_mean: m.mean,
        target_variance: m.variance,
        mean_exit_time,
        exit_time_se,
        mean_exit_x,
        exit_x_se,
        ks,
        chi2,
        cap_exit_fraction,
        y_max,
        samples,
    })
}

/// Number of `psi'` terms needed at radius `rho` so that the dropped terms
/// `n |a_n| rho^(n-1)`, bounded by `peak rho^n`, sum to below the tail tolerance.
fn derivative_terms(rho: f64, peak: f64, order: usize) -> usize {
    if rho <= 0.0 || peak == 0.0 {
        return order.min(1);
    }
    let m = (DERIVATIVE_TAIL * (1.0 - rho) / peak).ln() / rho.ln();
    if m.is_finite() && m < order as f64 {
        (m.ceil() as usize).max(1)
    } else {
        order
    }
}

/// Brownian motion in the unit disc from the origin, mapped through `psi`.
pub fn simulate_disc(series: &FourierSeries, dist: &Distribution, cfg: &SimConfig) -> Result<SimulationReport> {
    cfg.validate(SimMode::DiscTimeChange)?;
    let order = series.order();
    let peak = series
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| n as f64 * a.abs())
        .fold(0.0, f64::max);
    let sd = cfg.dt.sqrt();
    let stop = 1.0 - EPS_STOP;
    let samples: Vec<ExitSample> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let (mut x, mut y) = (0.0_f64, 0.0_f64);
            let mut zeta = 0.0;
            loop {
                let rho = x.hypot(y);
                if rho >= stop {
                    break;
                }
                let m = derivative_terms(rho, peak, order);
                zeta += psi_derivative_partial(series, Complex64::new(x, y), m).norm_sqr() * cfg.dt;
                let (gx, gy) = gaussian_pair(&mut rng);
                x += sd * gx;
                y += sd * gy;
            }
            let theta = y.atan2(x);
            ExitSample {
                path_index: i,
                exit_x: dist.phi(theta),
                exit_time: zeta,
                cap_exit: false,
            }
        })
        .collect();
    build_report(*cfg, dist, samples, None)
}

/// Brownian motion in the polygon from `psi(0) = (mean, 0)`.
///
/// Steps shrink near the boundary to `(d / 4)^2` (never below
/// `dt * MIN_STEP_FRACTION`), where `d` is the distance to the nearest edge;
/// a step long enough to leave is checked against the edges and the exit is
/// placed at the crossing point.
pub fn simulate_domain(region: &RegionPolygon, dist: &Distribution, cfg: &SimConfig) -> Result<SimulationReport> {
    cfg.validate(SimMode::DirectDomain)?;
    let start: Point = (dist.moments().mean, 0.0);
    if !region.contains(start) {
        return Err(Error::StartOutside(start.0, start.1));
    }
    let sd = cfg.dt.sqrt();
    let near = 4.0 * sd;
    let probe = 8.0 * sd;
    let min_dt = cfg.dt * MIN_STEP_FRACTION;
    let samples: Vec<ExitSample> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let mut p = start;
            let mut time = 0.0;
            // last distance query: (where, result); the distance can only
            // shrink by as much as the path has moved since
            let mut anchor = p;
            let mut anchor_d = region.distance_capped(p, probe);
            loop {
                let mut d = anchor_d - (p.0 - anchor.0).hypot(p.1 - anchor.1);
                if d < near {
                    anchor = p;
                    anchor_d = region.distance_capped(p, probe);
                    d = anchor_d;
                }
                let h = cfg.dt.min(0.0625 * d * d).max(min_dt);
                let s = h.sqrt();
                let (gx, gy) = gaussian_pair(&mut rng);
                let q = (p.0 + s * gx, p.1 + s * gy);
                if s * gx.hypot(gy) >= d {
                    if let Some(c) = region.first_crossing(p, q) {
                        return ExitSample {
                            path_index: i,
                            exit_x: c.point.0,
                            exit_time: time + c.t * h,
                            cap_exit: c.cap,
                        };
                    }
                }
                p = q;
                time += h;
            }
        })
        .collect();
    build_report(*cfg, dist, samples, Some(region.y_max()))
}

/// Smallest sample accepted by the goodness-of-fit tests.
pub const MIN_SAMPLES: usize = 10;

/// Kolmogorov survival function `Q(l) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 l^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // theta-function form, fast for small lambda
        let s: f64 = (1..=20)
            .map(|k| {
                let j = (2 * k - 1) as f64;
                (-j * j * PI * PI / (8.0 * lambda * lambda)).exp()
            })
            .sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// One-sample Kolmogorov–Smirnov test against a continuous law, with the
/// asymptotic p-value at Stephens' effective `lambda = (sqrt n + 0.12 + 0.11/sqrt n) D`.
pub fn ks_test(samples: &[f64], dist: &Distribution) -> Result<KsResult> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Statistics(format!(
            "KS test needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if dist.is_atomic() {
        return Err(Error::Statistics(
            "KS test needs a continuous law; use the chi-square test for atomic laws".into(),
        ));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = dist.cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * statistic);
    Ok(KsResult {
        n: xs.len(),
        statistic,
        p_value,
    })
}

/// Chi-square test of atom frequencies. Samples are snapped to the nearest
/// atom; anything farther than half the smallest atom gap is an error. Bins
/// with expected count below five are pooled with their right neighbour.
pub fn chi2_test(samples: &[f64], dist: &Distribution) -> Result<Chi2Result> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Statistics(format!(
            "chi-square test needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let atoms = dist
        .support_atoms()
        .ok_or_else(|| Error::Statistics("chi-square test needs an atomic law; use the KS test".into()))?;
    let snap_radius = 0.5 * atoms.windows(2).map(|w| w[1].x - w[0].x).fold(f64::INFINITY, f64::min);
    let mut counts = vec![0usize; atoms.len()];
    let mut max_snap_distance: f64 = 0.0;
    for &x in samples {
        let k = atoms.partition_point(|a| a.x < x);
        let nearest = [k.checked_sub(1), (k < atoms.len()).then_some(k)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| (atoms[a].x - x).abs().total_cmp(&(atoms[b].x - x).abs()))
            .expect("at least one atom");
        let dist_to_atom = (atoms[nearest].x - x).abs();
        if dist_to_atom.is_nan() || dist_to_atom > snap_radius {
            return Err(Error::Statistics(format!(
                "exit at x = {x} is {dist_to_atom} from the nearest atom, beyond the snap radius {snap_radius}"
            )));
        }
        max_snap_distance = max_snap_distance.max(dist_to_atom);
        counts[nearest] += 1;
    }
    let n = samples.len() as f64;

    let mut bins: Vec<(f64, usize)> = Vec::new();
    let mut pending = (0.0, 0usize);
    for (a, &c) in atoms.iter().zip(&counts) {
        pending.0 += n * a.p;
        pending.1 += c;
        if pending.0 >= 5.0 {
            bins.push(pending);
            pending = (0.0, 0);
        }
    }
    if pending.0 > 0.0 || pending.1 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += pending.0;
                last.1 += pending.1;
            }
            None => bins.push(pending),
        }
    }
    let statistic: f64 = bins.iter().map(|&(e, o)| (o as f64 - e).powi(2) / e).sum();
    let dof = bins.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).map_err(|e| Error::Statistics(e.to_string()))?;
        (1.0 - chi.cdf(statistic)).clamp(0.0, 1.0)
    };
    let atoms = atoms
        .iter()
        .zip(&counts)
        .map(|(a, &c)| {
            let sd = (n * a.p * (1.0 - a.p)).sqrt();
            AtomFrequency {
                x: a.x,
                p: a.p,
                count: c,
                frequency: c as f64 / n,
                z_score: if sd > 0.0 { (c as f64 - n * a.p) / sd } else { 0.0 },
            }
        })
        .collect();
    Ok(Chi2Result {
        n: samples.len(),
        statistic,
        dof,
        p_value,
        atoms,
        snap_radius,
        max_snap_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::fourier::cosine_coefficients;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn disc_cfg(n: usize, seed: u64) -> SimConfig {
        SimConfig {
            n_paths: n,
            dt: 1e-3,
            seed,
            mode: SimMode::DiscTimeChange,
        }
    }

    #[test]
    fn kolmogorov_survival_known_values() {
        // tabulated: Q(1.36) ~ 0.0494, Q(1.63) ~ 0.0098, Q(0.5) ~ 0.9639
        assert_abs_diff_eq!(kolmogorov_survival(1.36), 0.0494, epsilon = 2e-4);
        assert_abs_diff_eq!(kolmogorov_survival(1.63), 0.0098, epsilon = 2e-4);
        assert_abs_diff_eq!(kolmogorov_survival(0.5), 0.9639, epsilon = 2e-4);
        // the two series agree where they meet
        let l = 1.18;
        let a = kolmogorov_survival(l - 1e-12);
        let b = kolmogorov_survival(l);
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }

    #[test]
    fn ks_examples() {
        let r = ks_test(&[0.0; 20], &fixtures::uniform()).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.5);
        assert!(ks_test(&[], &fixtures::uniform()).is_err());
        assert!(ks_test(&[0.0; 5], &fixtures::uniform()).is_err());
        assert!(matches!(
            ks_test(&[0.0; 20], &fixtures::bernoulli()),
            Err(Error::Statistics(_))
        ));
    }

    #[test]
    fn ks_accepts_inverse_transform_samples() {
        for d in [fixtures::uniform(), fixtures::gaussian(), fixtures::cantor()] {
            let mut rng = path_rng(5, 0);
            let xs: Vec<f64> = (0..10_000)
                .map(|_| d.quantile(rng.random::<f64>().max(1e-300)).unwrap())
                .collect();
            let r = ks_test(&xs, &d).unwrap();
            assert!(r.p_value > 0.001, "{:?}: {r:?}", d.kind());
        }
    }

    #[test]
    fn ks_rejects_wrong_law() {
        let mut rng = path_rng(9, 0);
        let xs: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let r = ks_test(&xs, &fixtures::uniform()).unwrap();
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn chi2_snaps_and_pools() {
        let d = fixtures::three_atom();
        let mut xs = vec![-1.0; 40];
        xs.extend(vec![0.0 + 1e-9; 40]);
        xs.extend(vec![2.0; 20]);
        let r = chi2_test(&xs, &d).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.0, epsilon = 1e-12);
        assert_eq!(r.dof, 2);
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.max_snap_distance, 1e-9, epsilon = 1e-15);
        assert_eq!(r.snap_radius, 0.5);
        // 0.6 is farther than 0.5 from every atom
        assert!(chi2_test(&[0.6; 10], &d).is_err());
        // geometric law: the far tail is pooled into the last bin
        let g = chi2_test(&[0.0; 100], &fixtures::geometric()).unwrap();
        assert!(g.dof < 10);
        assert!(chi2_test(&[0.0; 20], &fixtures::uniform()).is_err());
    }

    #[test]
    fn single_atom_law_has_trivial_chi2() {
        let d = Distribution::atoms(&[(0.25, 1.0)]).unwrap();
        let r = chi2_test(&[0.25; 12], &d).unwrap();
        assert_eq!((r.dof, r.p_value), (0, 1.0));
    }

    #[test]
    fn degenerate_map_exits_at_constant() {
        let d = Distribution::atoms(&[(0.25, 1.0)]).unwrap();
        let s = cosine_coefficients(&d, 8).unwrap();
        let rep = simulate_disc(&s, &d, &disc_cfg(50, 1)).unwrap();
        assert!(rep.samples.iter().all(|s| s.exit_x == 0.25 && s.exit_time == 0.0));
    }

    #[test]
    fn identical_seeds_give_identical_reports() {
        let d = fixtures::uniform();
        let s = cosine_coefficients(&d, 512).unwrap();
        let a = simulate_disc(&s, &d, &disc_cfg(200, 42)).unwrap();
        let b = simulate_disc(&s, &d, &disc_cfg(200, 42)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, b.samples);
        let c = simulate_disc(&s, &d, &disc_cfg(200, 43)).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn schedule_does_not_change_results() {
        let d = fixtures::bernoulli();
        let s = cosine_coefficients(&d, 512).unwrap();
        let cfg = disc_cfg(64, 7);
        let pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let a = pool(1).install(|| simulate_disc(&s, &d, &cfg).unwrap());
        let b = pool(3).install(|| simulate_disc(&s, &d, &cfg).unwrap());
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let d = fixtures::uniform();
        let s = cosine_coefficients(&d, 16).unwrap();
        let mut cfg = disc_cfg(10, 1);
        cfg.mode = SimMode::DirectDomain;
        assert!(simulate_disc(&s, &d, &cfg).is_err());
        cfg.mode = SimMode::DiscTimeChange;
        cfg.dt = 0.0;
        assert!(simulate_disc(&s, &d, &cfg).is_err());
    }

    #[test]
    fn truncated_derivative_is_accurate() {
        let d = fixtures::bernoulli();
        let s = cosine_coefficients(&d, 4096).unwrap();
        let peak = 4.0 / PI;
        for rho in [0.1, 0.5, 0.9, 0.99, 0.998] {
            let z = Complex64::from_polar(rho, 0.7);
            let m = derivative_terms(rho, peak, 4096);
            let full = psi_derivative_partial(&s, z, 4096);
            let part = psi_derivative_partial(&s, z, m);
            assert!((full - part).norm() <= 1e-8 * full.norm().max(1.0), "{rho}: m={m}");
        }
    }
}
