//! Text formats for coefficients, boundary traces, exit samples and tips.
//!
//! Floats in CSV files carry 17 significant digits so they read back to the
//! same double.

use std::fmt::Write as _;

use serde_json::{json, Value};
use skodom::conformal::{BoundaryCurve, RayTipSet};
use skodom::montecarlo::ExitSample;
use skodom::FourierSeries;

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn coefficients_csv(series: &FourierSeries) -> String {
    let mut out = format!(
        "# method={},N={},tail={}\nn,a_n\n",
        series.method.as_str(),
        series.order(),
        float(series.tail_estimate)
    );
    for (n, a) in series.coeffs.iter().enumerate() {
        writeln!(out, "{n},{}", float(*a)).unwrap();
    }
    out
}

pub fn boundary_csv(curve: &BoundaryCurve) -> String {
    let mut out = String::from("theta,x,y,diverged\n");
    for s in &curve.samples {
        writeln!(
            out,
            "{},{},{},{}",
            float(s.theta),
            float(s.x),
            float(s.y),
            u8::from(s.diverged)
        )
        .unwrap();
    }
    out
}

pub fn samples_csv(samples: &[ExitSample]) -> String {
    let mut out = String::from("path_index,exit_x,exit_time,cap_exit\n");
    for s in samples {
        writeln!(
            out,
            "{},{},{},{}",
            s.path_index,
            float(s.exit_x),
            float(s.exit_time),
            u8::from(s.cap_exit)
        )
        .unwrap();
    }
    out
}

/// JSON has no infinity, so unbounded tips are written as the string `"inf"`.
pub fn tips_json(tips: &RayTipSet) -> Value {
    Value::Array(
        tips.tips
            .iter()
            .map(|t| {
                json!({
                    "atom_x": t.atom_x,
                    "critical_angle": t.critical_angle,
                    "tip_y": if t.tip_y.is_finite() { json!(t.tip_y) } else { json!("inf") },
                })
            })
            .collect(),
    )
}
