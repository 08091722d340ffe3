//! End-to-end check of one law: coefficients, energy identity, boundary
//! trace, curve simplicity, ray tips, and a seeded simulation.
//!
//! The report is a pure function of the inputs (no clocks, no paths that
//! depend on the working directory) so repeated runs are byte-identical.

use serde::Serialize;
use serde_json::{json, Value};
use skodom::conformal::{ray_tips, simplicity_check, trace, StepProfile};
use skodom::distributions::Distribution;
use skodom::fourier::{cosine_coefficients, default_order, expected_exit_time, parseval_gap};
use skodom::geometry::{default_y_max, polygonize};
use skodom::montecarlo::{simulate_disc, simulate_domain, SimConfig, SimMode};

/// Largest accepted `(Var - 1/2 sum a_n^2) / Var`.
pub const PARSEVAL_RELATIVE_TOLERANCE: f64 = 1e-3;
pub const SIGN_TOLERANCE: f64 = 1e-6;
pub const ATOM_TOLERANCE: f64 = 1e-9;
pub const P_VALUE_THRESHOLD: f64 = 0.01;
pub const CAP_EXIT_LIMIT: f64 = 1e-3;

pub const DEFAULT_GRID: usize = 2001;
pub const DEFAULT_PATHS: usize = 4000;
pub const DEFAULT_DISC_DT: f64 = 1e-4;
pub const DEFAULT_DOMAIN_DT: f64 = 1e-5;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOptions {
    pub n: Option<usize>,
    pub grid: usize,
    pub paths: usize,
    pub dt: Option<f64>,
    pub seed: u64,
    pub mode: SimMode,
    pub y_max: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n: None,
            grid: DEFAULT_GRID,
            paths: DEFAULT_PATHS,
            dt: None,
            seed: 1,
            mode: SimMode::DiscTimeChange,
            y_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: Value,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub distribution: Value,
    pub options: Value,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, passed: bool, value: Value, message: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        value,
        message: message.into(),
    }
}

fn failed(name: &'static str, err: impl std::fmt::Display) -> Check {
    check(name, false, Value::Null, err.to_string())
}

pub fn run(dist: &Distribution, opts: &VerifyOptions) -> VerifyReport {
    let n = opts.n.unwrap_or_else(|| default_order(dist));
    let dt = opts.dt.unwrap_or(match opts.mode {
        SimMode::DiscTimeChange => DEFAULT_DISC_DT,
        SimMode::DirectDomain => DEFAULT_DOMAIN_DT,
    });
    let moments = dist.moments();
    let mut checks = Vec::new();
    let resolved = json!({
        "n": n, "grid": opts.grid, "paths": opts.paths, "dt": dt,
        "seed": opts.seed, "mode": opts.mode, "y_max": opts.y_max,
    });
    let finish = |checks: Vec<Check>| VerifyReport {
        distribution: serde_json::to_value(dist.spec()).expect("spec serializes"),
        options: resolved.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    };

    let series = match cosine_coefficients(dist, n) {
        Ok(s) => s,
        Err(e) => {
            checks.push(failed("coefficients", e));
            return finish(checks);
        }
    };

    let gap = parseval_gap(dist, &series);
    let rel = if moments.variance > 0.0 {
        gap / moments.variance
    } else {
        gap.abs()
    };
    let ok = rel.abs() <= PARSEVAL_RELATIVE_TOLERANCE;
    checks.push(check(
        "parseval_gap",
        ok,
        json!({"gap": gap, "relative": rel, "energy": expected_exit_time(&series), "variance": moments.variance}),
        if ok {
            format!("relative gap {rel:.3e} within {PARSEVAL_RELATIVE_TOLERANCE:.0e}")
        } else {
            format!(
                "relative Parseval gap {rel:.3e} exceeds {PARSEVAL_RELATIVE_TOLERANCE:.0e} at N = {n}; increase --n"
            )
        },
    ));

    let a0 = series.coeffs[0];
    let ok = (a0 - moments.mean).abs() <= 1e-9 * (1.0 + moments.mean.abs());
    checks.push(check(
        "mean_coefficient",
        ok,
        json!({"a0": a0, "mean": moments.mean}),
        format!("a_0 = {a0:.12} vs mean {:.12}", moments.mean),
    ));

    let curve = match trace(&series, dist, opts.grid) {
        Ok(c) => c,
        Err(e) => {
            checks.push(failed("trace", e));
            return finish(checks);
        }
    };
    let m = curve.samples.len();
    let symmetric = (0..m).all(|k| {
        let (a, b) = (curve.samples[k], curve.samples[m - 1 - k]);
        a.x.to_bits() == b.x.to_bits() && a.y == -b.y && a.diverged == b.diverged
    });
    checks.push(check(
        "trace_symmetry",
        symmetric,
        Value::Null,
        "x(-theta) = x(theta), y(-theta) = -y(theta)",
    ));

    let max_y = curve
        .finite_samples()
        .filter(|p| p.theta > 0.0 && p.theta < std::f64::consts::PI)
        .map(|p| p.y)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(check(
        "trace_sign",
        max_y <= SIGN_TOLERANCE,
        json!({"max_y_upper_angles": max_y}),
        format!("largest y on (0, pi) is {max_y:.3e}"),
    ));

    let outside = curve
        .finite_samples()
        .filter(|p| dist.cdf(p.x + ATOM_TOLERANCE) - dist.cdf_left(p.x - ATOM_TOLERANCE) <= 0.0)
        .count();
    checks.push(check(
        "support_membership",
        outside == 0,
        json!({"samples_off_support": outside}),
        format!("{outside} trace samples fall in gaps of the support"),
    ));

    let simple = simplicity_check(&curve);
    checks.push(check(
        "simplicity",
        simple.simple,
        json!({"segments": simple.segments, "contacts": simple.contacts, "first_crossing": simple.first_crossing}),
        match simple.first_crossing {
            Some(c) => format!("segments at samples {} and {} cross", c.segments.0, c.segments.1),
            None => "no proper crossings".to_string(),
        },
    ));

    let mut tips_value = None;
    if let Some(atoms) = dist.support_atoms() {
        let off_atom = curve
            .finite_samples()
            .filter(|p| atoms.iter().all(|a| (a.x - p.x).abs() > ATOM_TOLERANCE))
            .count();
        checks.push(check(
            "atom_values",
            off_atom == 0,
            json!({"samples_off_atoms": off_atom}),
            format!("{off_atom} finite trace samples away from every atom"),
        ));
        match StepProfile::from_distribution(dist).and_then(|p| {
            if p.steps.is_empty() {
                Ok(None)
            } else {
                ray_tips(&p).map(|t| Some((p, t)))
            }
        }) {
            Ok(Some((profile, tips))) => {
                let ok = tips.tips.iter().all(|t| t.tip_y >= 0.0)
                    && tips.tips.iter().enumerate().all(|(i, t)| match t.critical_angle {
                        None => true,
                        Some(c) => {
                            let lo = if i == 0 { 0.0 } else { profile.steps[i - 1].theta };
                            let hi = profile.steps.get(i).map_or(std::f64::consts::PI, |s| s.theta);
                            c > lo && c < hi
                        }
                    });
                checks.push(check(
                    "ray_tips",
                    ok,
                    crate::format::tips_json(&tips),
                    "tips non-negative, critical angles between their step angles",
                ));
                tips_value = Some(tips);
            }
            Ok(None) => {}
            Err(e) => checks.push(failed("ray_tips", e)),
        }
    }

    let cfg = SimConfig {
        n_paths: opts.paths,
        dt,
        seed: opts.seed,
        mode: opts.mode,
    };
    let report = match opts.mode {
        SimMode::DiscTimeChange => simulate_disc(&series, dist, &cfg),
        SimMode::DirectDomain => {
            let y_max = opts.y_max.unwrap_or_else(|| default_y_max(dist, tips_value.as_ref()));
            polygonize(&curve, y_max).and_then(|poly| simulate_domain(&poly, dist, &cfg))
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            checks.push(failed("simulation", e));
            return finish(checks);
        }
    };

    if let Some(ks) = report.ks {
        checks.push(check(
            "exit_law",
            ks.p_value > P_VALUE_THRESHOLD,
            serde_json::to_value(ks).expect("serializes"),
            format!("KS statistic {:.4e}, p = {:.4}", ks.statistic, ks.p_value),
        ));
    } else if let Some(chi2) = &report.chi2 {
        let z = chi2.max_abs_z();
        checks.push(check(
            "exit_law",
            chi2.p_value > P_VALUE_THRESHOLD && z <= 3.0,
            serde_json::to_value(chi2).expect("serializes"),
            format!(
                "chi-square {:.4} on {} dof, p = {:.4}, max |z| = {z:.3}",
                chi2.statistic, chi2.dof, chi2.p_value
            ),
        ));
    } else {
        checks.push(check(
            "exit_law",
            false,
            Value::Null,
            "too few non-cap exits for a goodness-of-fit test",
        ));
    }

    let (lo, hi) = report.exit_time_band();
    checks.push(check(
        "exit_time",
        report.exit_time_in_band(),
        json!({"mean": report.mean_exit_time, "se": report.exit_time_se, "band": [lo, hi], "variance": moments.variance}),
        format!(
            "mean exit time {:.5} ± {:.5}, band [{lo:.5}, {hi:.5}]",
            report.mean_exit_time, report.exit_time_se
        ),
    ));

    checks.push(check(
        "optional_stopping",
        report.mean_exit_x_consistent(),
        json!({"mean_exit_x": report.mean_exit_x, "se": report.exit_x_se, "mean": moments.mean}),
        format!(
            "mean exit abscissa {:.5} ± {:.5} vs mean {:.5}",
            report.mean_exit_x, report.exit_x_se, moments.mean
        ),
    ));

    if let Some(frac) = report.cap_exit_fraction {
        checks.push(check(
            "cap_exits",
            frac < CAP_EXIT_LIMIT,
            json!({"fraction": frac, "y_max": report.y_max}),
            format!("{frac:.2e} of paths left through a truncation cap"),
        ));
    }

    finish(checks)
}
