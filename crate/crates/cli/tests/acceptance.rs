//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use skodom::conformal::{conjugate_series, ray_tips, trace, StepProfile};
use skodom::fourier::{cosine_coefficients, cosine_coefficients_by_quadrature, expected_exit_time, QuadratureOptions};
use skodom::geometry::{default_y_max, polygonize};
use skodom::montecarlo::{simulate_disc, simulate_domain, SimConfig, SimMode, SimulationReport};
use skodom::{fixtures, Distribution};

type Outcome = (bool, String);
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
}

/// `(1/pi) log|sin((t0 - x)/2) / sin((t0 + x)/2)|`, written out independently.
fn step_conjugate(t0: f64, x: f64) -> f64 {
    (((t0 - x) / 2.0).sin().abs().ln() - ((t0 + x) / 2.0).sin().abs().ln()) / PI
}

/// Jump angles and sizes of `phi` for an atomic law, straight from the atoms.
fn steps_of(atoms: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut cum = 0.0;
    atoms
        .windows(2)
        .map(|w| {
            cum += w[0].1;
            (PI * cum, w[1].0 - w[0].0)
        })
        .collect()
}

fn closed_form(steps: &[(f64, f64)], x: f64) -> f64 {
    steps.iter().map(|&(t0, a)| a * step_conjugate(t0, x)).sum()
}

fn uniform_coefficients() -> Outcome {
    let d = fixtures::uniform();
    let s = cosine_coefficients_by_quadrature(&d, 16, &QuadratureOptions::default()).expect("quadrature");
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        let want = if n % 2 == 1 {
            -8.0 / (PI * PI * (n * n) as f64)
        } else {
            0.0
        };
        worst = worst.max((s.coeffs[n] - want).abs());
    }
    (worst <= 1e-9, format!("max |a_n - exact| over n <= 10: {worst:.2e}"))
}

fn parseval_identity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, tol) in [
        ("uniform", fixtures::uniform(), 1e-6),
        ("bernoulli", fixtures::bernoulli(), 1e-3),
    ] {
        let var = d.moments().variance;
        let s = cosine_coefficients(&d, 4096).expect("coefficients");
        let gap = (expected_exit_time(&s) - var).abs();
        let mut prev = 0.0;
        let mut monotone = true;
        for n in 1..=4096 {
            let e = 0.5 * s.coeffs[n] * s.coeffs[n] + prev;
            monotone &= e >= prev;
            prev = e;
        }
        let mut by_order = Vec::new();
        for n in [8, 64, 512, 4096] {
            by_order.push(expected_exit_time(&cosine_coefficients(&d, n).expect("coefficients")));
        }
        monotone &= by_order.windows(2).all(|w| w[1] >= w[0]);
        ok &= gap <= tol && monotone;
        parts.push(format!(
            "{name}: |E T - Var| = {gap:.2e} (tol {tol:.0e}), monotone {monotone}"
        ));
    }
    (ok, parts.join("; "))
}

fn hilbert_agreement() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let r = 1.0 - 1e-6;
    for (name, d, atoms) in [
        ("bernoulli", fixtures::bernoulli(), vec![(-1.0, 0.5), (1.0, 0.5)]),
        (
            "three_atom",
            fixtures::three_atom(),
            vec![(-1.0, 0.4), (0.0, 0.4), (2.0, 0.2)],
        ),
    ] {
        let steps = steps_of(&atoms);
        let s = cosine_coefficients(&d, 1 << 17).expect("coefficients");
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for k in 1..2000 {
            let x = -PI + 2.0 * PI * k as f64 / 2000.0;
            if steps.iter().any(|&(t0, _)| (x.abs() - t0).abs() < 0.05) || x.abs() < 0.05 || PI - x.abs() < 0.05 {
                continue;
            }
            worst = worst.max((conjugate_series(&s, x, r) - closed_form(&steps, x)).abs());
            count += 1;
        }
        ok &= worst <= 5e-3;
        parts.push(format!("{name}: max diff {worst:.2e} over {count} angles"));
    }
    (ok, parts.join("; "))
}

fn ray_tip_solver() -> Outcome {
    let bern = StepProfile::from_distribution(&fixtures::bernoulli()).expect("profile");
    let tips = ray_tips(&bern).expect("tips");
    let strip = tips
        .tips
        .iter()
        .all(|t| t.critical_angle.is_none() && t.tip_y.is_infinite());

    let atoms = [(-1.0, 0.4), (0.0, 0.4), (2.0, 0.2)];
    let steps = steps_of(&atoms);
    let (lo, hi) = (steps[0].0, steps[1].0);
    // the middle ray sits above the lowest point of -y over the angles where phi = 0
    let m = 1_000_000;
    let h = (hi - lo) / m as f64;
    let f = |t: f64| -closed_form(&steps, t);
    let (mut best, mut best_k) = (f64::INFINITY, 0);
    for k in 1..m {
        let v = f(lo + k as f64 * h);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let t = lo + best_k as f64 * h;
    let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
    let shift = 0.5 * h * (fm - fp) / (fm - 2.0 * f0 + fp);
    let oracle_angle = t + shift;
    let oracle_y = f(oracle_angle);

    let three = ray_tips(&StepProfile::from_distribution(&fixtures::three_atom()).expect("profile")).expect("tips");
    let mid = &three.tips[1];
    let angle = mid.critical_angle.unwrap_or(f64::NAN);
    let (da, dy) = ((angle - oracle_angle).abs(), (mid.tip_y - oracle_y).abs());
    let others = three.tips[0].tip_y.is_infinite() && three.tips[2].tip_y.is_infinite();
    (
        strip && others && da <= 1e-6 && dy <= 1e-6,
        format!(
            "bernoulli strip {strip}; three-atom angle {angle:.9} vs {oracle_angle:.9} (diff {da:.1e}), \
             tip_y {:.9} vs {oracle_y:.9} (diff {dy:.1e})",
            mid.tip_y
        ),
    )
}

fn uniform_slope() -> Outcome {
    let d = fixtures::uniform();
    let s = cosine_coefficients(&d, 4096).expect("coefficients");
    let c = trace(&s, &d, 2001).expect("trace");
    let mut worst: f64 = 0.0;
    for w in c.samples.windows(3) {
        let t = w[1].theta;
        if t.abs() <= 0.1 || t.abs() >= PI - 0.1 {
            continue;
        }
        let slope = (w[2].y - w[0].y) / (w[2].theta - w[0].theta);
        let want = -(8.0 / (PI * PI)) * (PI / 4.0 - t.abs() / 2.0).tan().atanh();
        worst = worst.max((slope - want).abs());
    }
    (worst <= 1e-3, format!("max slope error {worst:.2e}"))
}

fn band_text(r: &SimulationReport) -> String {
    let (lo, hi) = r.exit_time_band();
    format!("mean time {:.4} in [{lo:.4}, {hi:.4}]", r.mean_exit_time)
}

fn law_check(r: &SimulationReport) -> (bool, String) {
    if let Some(ks) = r.ks {
        (ks.p_value > 0.01, format!("KS p = {:.3}", ks.p_value))
    } else if let Some(c) = &r.chi2 {
        let z = c.max_abs_z();
        (
            c.p_value > 0.01 && z <= 3.0,
            format!("chi2 p = {:.3}, max |z| = {z:.2}", c.p_value),
        )
    } else {
        (false, "no goodness-of-fit result".into())
    }
}

fn disc_mode() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d) in [("uniform", fixtures::uniform()), ("bernoulli", fixtures::bernoulli())] {
        let s = cosine_coefficients(&d, 4096).expect("coefficients");
        let cfg = SimConfig {
            n_paths: 10_000,
            dt: 1e-4,
            seed: 1,
            mode: SimMode::DiscTimeChange,
        };
        let r = simulate_disc(&s, &d, &cfg).expect("simulation");
        let (law_ok, law) = law_check(&r);
        ok &= law_ok && r.exit_time_in_band();
        parts.push(format!("{name}: {law}, {}", band_text(&r)));
    }
    (ok, parts.join("; "))
}

fn domain_run(d: &Distribution) -> SimulationReport {
    let s = cosine_coefficients(d, 4096).expect("coefficients");
    let c = trace(&s, d, 2001).expect("trace");
    let tips = StepProfile::from_distribution(d)
        .ok()
        .map(|p| ray_tips(&p).expect("tips"));
    let poly = polygonize(&c, default_y_max(d, tips.as_ref())).expect("polygon");
    let cfg = SimConfig {
        n_paths: 10_000,
        dt: 1e-5,
        seed: 1,
        mode: SimMode::DirectDomain,
    };
    simulate_domain(&poly, d, &cfg).expect("simulation")
}

fn domain_mode() -> Outcome {
    let u = domain_run(&fixtures::uniform());
    let (u_law_ok, u_law) = law_check(&u);
    let b = domain_run(&fixtures::bernoulli());
    let (b_law_ok, b_law) = law_check(&b);
    let caps = b.cap_exit_fraction.unwrap_or(1.0);
    (
        u_law_ok && u.exit_time_in_band() && b_law_ok && caps < 1e-3,
        format!(
            "uniform lens: {u_law}, {}; bernoulli rectangle: {b_law}, cap exits {caps:.1e}",
            band_text(&u)
        ),
    )
}

fn structural() -> Outcome {
    let d = fixtures::three_atom();
    let c = trace(&cosine_coefficients(&d, 4096).expect("coefficients"), &d, 2001).expect("trace");
    let off = c
        .finite_samples()
        .filter(|p| [-1.0, 0.0, 2.0].iter().all(|a: &f64| (p.x - a).abs() > 1e-9))
        .count();
    let d = fixtures::bernoulli();
    let c = trace(&cosine_coefficients(&d, 4096).expect("coefficients"), &d, 2001).expect("trace");
    let inside = c
        .samples
        .iter()
        .filter(|p| p.x > -1.0 + 1e-9 && p.x < 1.0 - 1e-9)
        .count();
    (
        off == 0 && inside == 0,
        format!("three-atom samples off atoms: {off}; bernoulli samples inside the gap: {inside}"),
    )
}

fn symmetry_and_sign() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d) in fixtures::all() {
        let s = cosine_coefficients(&d, skodom::fourier::default_order(&d)).expect("coefficients");
        let c = trace(&s, &d, 2001).expect("trace");
        let m = c.samples.len();
        let symmetric = (0..m).all(|k| {
            let (a, b) = (c.samples[k], c.samples[m - 1 - k]);
            a.x.to_bits() == b.x.to_bits() && a.y == -b.y
        });
        let max_y = c
            .samples
            .iter()
            .filter(|p| p.theta > 0.0 && p.theta < PI && p.y.is_finite())
            .map(|p| p.y)
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= symmetric && max_y <= 1e-6;
        parts.push(format!("{name}: symmetric {symmetric}, max y {max_y:.1e}"));
    }
    (ok, parts.join("; "))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_skodom"))
            .args(["verify", "--dist"])
            .arg(fixture_path("uniform"))
            .args(["--paths", "2000", "--seed", "7"])
            .output()
            .expect("runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    (
        same && a.status.success(),
        format!("{} report bytes, identical {same}, exit {}", a.stdout.len(), a.status),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "uniform coefficients",
            Some(Duration::from_secs(1)),
            uniform_coefficients,
        ),
        ("parseval identity", None, parseval_identity),
        (
            "closed-form hilbert agreement",
            Some(Duration::from_secs(5)),
            hilbert_agreement,
        ),
        ("ray-tip solver", None, ray_tip_solver),
        ("uniform boundary slope", None, uniform_slope),
        ("embedding law, disc mode", Some(Duration::from_secs(60)), disc_mode),
        (
            "embedding law, direct-domain mode",
            Some(Duration::from_secs(300)),
            domain_mode,
        ),
        ("structural properties", None, structural),
        ("symmetry and sign", None, symmetry_and_sign),
        ("determinism", None, determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (mut ok, mut detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            if elapsed > *limit {
                ok = false;
                detail.push_str(&format!("; over the {:.0} s budget", limit.as_secs_f64()));
            }
        }
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:>2} {name} ({:.2} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
