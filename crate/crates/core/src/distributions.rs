//! Target laws on the real line.
//!
//! A [`Distribution`] exposes its CDF `F`, the generalized inverse
//! `G(y) = inf{x : F(x) >= y}`, its first two moments and the even profile
//! `phi(theta) = G(|theta| / pi)` whose cosine series drives the conformal map.
//!
//! Quantiles are extended reals: for laws with unbounded support `G` runs off
//! to `-inf` / `+inf` at the ends of `(0, 1)`, and those limits are returned
//! as IEEE infinities. Consumers that need finite values clip the level first
//! (see [`Distribution::clip_level`]).

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite value or one of the `±inf` sentinels.
pub type QuantileValue = f64;

/// Allowed deviation of the total atomic mass from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Ternary digits used to evaluate the Cantor quantile.
const CANTOR_DIGITS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: f64,
    pub p: f64,
}

/// Serialized description of a target law, as found in distribution files.
///
/// ```json
/// {"type":"atoms","atoms":[{"x":-1.0,"p":0.5},{"x":1.0,"p":0.5}]}
/// {"type":"uniform","a":-1.0,"b":1.0}
/// {"type":"gaussian","mean":0.0,"sd":1.0}
/// {"type":"cantor","center":true}
/// {"type":"empirical","samples":[0.3,-1.2,0.8]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Atoms { atoms: Vec<Atom> },
    Uniform { a: f64, b: f64 },
    Gaussian { mean: f64, sd: f64 },
    Cantor { center: bool },
    Empirical { samples: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Atoms,
    Uniform,
    Gaussian,
    Cantor,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// A validated target distribution. Immutable once built.
#[derive(Debug, Clone)]
pub struct Distribution {
    law: Law,
}

#[derive(Debug, Clone)]
enum Law {
    Atoms {
        xs: Vec<f64>,
        ps: Vec<f64>,
        /// `cum[i] = p_0 + ... + p_i`
        cum: Vec<f64>,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    Cantor {
        center: bool,
    },
    /// Sorted samples.
    Empirical {
        samples: Vec<f64>,
    },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDistribution(msg.into())
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

impl Distribution {
    pub fn from_spec(spec: DistributionSpec) -> Result<Self> {
        let law = match spec {
            DistributionSpec::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(invalid("atoms: at least one atom is required"));
                }
                let mut total = 0.0;
                for (i, a) in atoms.iter().enumerate() {
                    require_finite("atom x", a.x)?;
                    require_finite("atom p", a.p)?;
                    if a.p <= 0.0 {
                        return Err(invalid(format!("atom {i}: probability must be positive, got {}", a.p)));
                    }
                    if i > 0 && a.x <= atoms[i - 1].x {
                        return Err(invalid(format!(
                            "atoms must be strictly increasing in x (atom {i}: {} after {})",
                            a.x,
                            atoms[i - 1].x
                        )));
                    }
                    total += a.p;
                }
                if (total - 1.0).abs() > MASS_TOLERANCE {
                    return Err(invalid(format!("atom probabilities sum to {total}, expected 1")));
                }
                let xs: Vec<f64> = atoms.iter().map(|a| a.x).collect();
                let ps: Vec<f64> = atoms.iter().map(|a| a.p).collect();
                let cum = ps
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect();
                Law::Atoms { xs, ps, cum }
            }
            DistributionSpec::Uniform { a, b } => {
                require_finite("uniform a", a)?;
                require_finite("uniform b", b)?;
                if a >= b {
                    return Err(invalid(format!("uniform requires a < b, got a={a}, b={b}")));
                }
                Law::Uniform { a, b }
            }
            DistributionSpec::Gaussian { mean, sd } => {
                require_finite("gaussian mean", mean)?;
                require_finite("gaussian sd", sd)?;
                if sd <= 0.0 {
                    return Err(invalid(format!("gaussian sd must be positive, got {sd}")));
                }
                Law::Gaussian { mean, sd }
            }
            DistributionSpec::Cantor { center } => Law::Cantor { center },
            DistributionSpec::Empirical { mut samples } => {
                if samples.is_empty() {
                    return Err(invalid("empirical: at least one sample is required"));
                }
                for &s in &samples {
                    require_finite("empirical sample", s)?;
                }
                samples.sort_by(f64::total_cmp);
                Law::Empirical { samples }
            }
        };
        Ok(Self { law })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: DistributionSpec = serde_json::from_str(s)?;
        Self::from_spec(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::from_spec(DistributionSpec::Atoms {
            atoms: atoms.iter().map(|&(x, p)| Atom { x, p }).collect(),
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::from_spec(DistributionSpec::Uniform { a, b })
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        Self::from_spec(DistributionSpec::Gaussian { mean, sd })
    }

    pub fn cantor(center: bool) -> Self {
        Self {
            law: Law::Cantor { center },
        }
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        Self::from_spec(DistributionSpec::Empirical { samples })
    }

    pub fn spec(&self) -> DistributionSpec {
        match &self.law {
            Law::Atoms { xs, ps, .. } => DistributionSpec::Atoms {
                atoms: xs.iter().zip(ps).map(|(&x, &p)| Atom { x, p }).collect(),
            },
            &Law::Uniform { a, b } => DistributionSpec::Uniform { a, b },
            &Law::Gaussian { mean, sd } => DistributionSpec::Gaussian { mean, sd },
            &Law::Cantor { center } => DistributionSpec::Cantor { center },
            Law::Empirical { samples } => DistributionSpec::Empirical {
                samples: samples.clone(),
            },
        }
    }

    pub fn kind(&self) -> DistributionKind {
        match self.law {
            Law::Atoms { .. } => DistributionKind::Atoms,
            Law::Uniform { .. } => DistributionKind::Uniform,
            Law::Gaussian { .. } => DistributionKind::Gaussian,
            Law::Cantor { .. } => DistributionKind::Cantor,
            Law::Empirical { .. } => DistributionKind::Empirical,
        }
    }

    /// True for purely atomic laws (explicit atoms and empirical samples).
    pub fn is_atomic(&self) -> bool {
        matches!(self.law, Law::Atoms { .. } | Law::Empirical { .. })
    }

    /// Distinct support points with their masses, for atomic laws.
    pub fn support_atoms(&self) -> Option<Vec<Atom>> {
        match &self.law {
            Law::Atoms { xs, ps, .. } => Some(xs.iter().zip(ps).map(|(&x, &p)| Atom { x, p }).collect()),
            Law::Empirical { samples } => {
                let w = 1.0 / samples.len() as f64;
                let mut out: Vec<Atom> = Vec::new();
                for &s in samples {
                    match out.last_mut() {
                        Some(last) if last.x == s => last.p += w,
                        _ => out.push(Atom { x: s, p: w }),
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn moments(&self) -> Moments {
        match &self.law {
            Law::Atoms { xs, ps, .. } => {
                let mean: f64 = xs.iter().zip(ps).map(|(x, p)| x * p).sum();
                let variance = xs.iter().zip(ps).map(|(x, p)| p * (x - mean).powi(2)).sum();
                Moments { mean, variance }
            }
            &Law::Uniform { a, b } => Moments {
                mean: 0.5 * (a + b),
                variance: (b - a).powi(2) / 12.0,
            },
            &Law::Gaussian { mean, sd } => Moments {
                mean,
                variance: sd * sd,
            },
            &Law::Cantor { center } => Moments {
                mean: if center { 0.0 } else { 0.5 },
                variance: 0.125,
            },
            Law::Empirical { samples } => {
                let n = samples.len() as f64;
                let mean = samples.iter().sum::<f64>() / n;
                let variance = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
                Moments { mean, variance }
            }
        }
    }

    /// `F(x) = mu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.law {
            Law::Atoms { xs, cum, .. } => match xs.partition_point(|&v| v <= x) {
                0 => 0.0,
                k => cum[k - 1].min(1.0),
            },
            &Law::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            &Law::Gaussian { mean, sd } => 0.5 * erfc(-(x - mean) / (sd * SQRT_2)),
            &Law::Cantor { center } => cantor_cdf(if center { x + 0.5 } else { x }),
            Law::Empirical { samples } => samples.partition_point(|&v| v <= x) as f64 / samples.len() as f64,
        }
    }

    /// `F(x-) = mu((-inf, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.law {
            Law::Atoms { xs, cum, .. } => match xs.partition_point(|&v| v < x) {
                0 => 0.0,
                k => cum[k - 1].min(1.0),
            },
            Law::Empirical { samples } => samples.partition_point(|&v| v < x) as f64 / samples.len() as f64,
            _ => self.cdf(x),
        }
    }

    /// Mass of the open interval `(a, b)`; zero when `b <= a`.
    pub fn mass_open(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.cdf_left(b) - self.cdf(a)).max(0.0)
    }

    /// Generalized inverse `G(y) = inf{x : F(x) >= y}` for `y` in `(0, 1)`.
    pub fn quantile(&self, y: f64) -> Result<QuantileValue> {
        if !(y > 0.0 && y < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {y}")));
        }
        Ok(self.quantile_limit(y))
    }

    /// `G` on the closed interval `[0, 1]`, taking one-sided limits at the
    /// endpoints (`G(0+)`, `G(1-)`), which may be infinite.
    pub fn quantile_limit(&self, y: f64) -> QuantileValue {
        let y = y.clamp(0.0, 1.0);
        match &self.law {
            Law::Atoms { xs, cum, .. } => {
                let i = cum.partition_point(|&c| c < y);
                xs[i.min(xs.len() - 1)]
            }
            &Law::Uniform { a, b } => a + (b - a) * y,
            &Law::Gaussian { mean, sd } => {
                if y == 0.0 {
                    f64::NEG_INFINITY
                } else if y == 1.0 {
                    f64::INFINITY
                } else {
                    mean + sd * standard_normal_quantile(y)
                }
            }
            &Law::Cantor { center } => cantor_quantile(y) - if center { 0.5 } else { 0.0 },
            Law::Empirical { samples } => {
                let n = samples.len();
                let k = ((n as f64) * y).ceil() as usize;
                samples[k.clamp(1, n) - 1]
            }
        }
    }

    pub fn lower_bound(&self) -> f64 {
        self.quantile_limit(0.0)
    }

    pub fn upper_bound(&self) -> f64 {
        self.quantile_limit(1.0)
    }

    pub fn is_bounded(&self) -> bool {
        self.lower_bound().is_finite() && self.upper_bound().is_finite()
    }

    /// Pulls a level away from an end of `[0, 1]` where the quantile is
    /// unbounded, so that `G` stays finite. Bounded ends are left alone.
    pub fn clip_level(&self, y: f64, eps: f64) -> f64 {
        let mut y = y.clamp(0.0, 1.0);
        if y < eps && !self.lower_bound().is_finite() {
            y = eps;
        }
        if y > 1.0 - eps && !self.upper_bound().is_finite() {
            y = 1.0 - eps;
        }
        y
    }

    /// `phi(theta) = G(|theta| / pi)`, viewed as a `2 pi`-periodic even
    /// function. At `theta = 0` and `theta = ±pi` the one-sided limits of `G`
    /// are returned.
    pub fn phi(&self, theta: f64) -> QuantileValue {
        self.quantile_limit(phi_level(theta))
    }

    /// [`phi`](Self::phi) with the quantile level clipped by `eps` at
    /// unbounded ends.
    pub fn phi_clipped(&self, theta: f64, eps: f64) -> f64 {
        self.quantile_limit(self.clip_level(phi_level(theta), eps))
    }

    /// Angles in `(0, pi)` where `phi` jumps, in increasing order.
    ///
    /// Atomic laws jump at `pi * F(x_i)`. The Cantor quantile jumps on every
    /// dyadic level; the first `cantor_depth` dyadic generations are listed.
    pub fn jump_angles(&self, cantor_depth: u32) -> Vec<f64> {
        match &self.law {
            Law::Atoms { cum, .. } => cum[..cum.len() - 1].iter().map(|c| PI * c).collect(),
            Law::Empirical { .. } => {
                let atoms = self.support_atoms().unwrap_or_default();
                let mut acc = 0.0;
                atoms[..atoms.len() - 1]
                    .iter()
                    .map(|a| {
                        acc += a.p;
                        PI * acc
                    })
                    .collect()
            }
            Law::Cantor { .. } => {
                let m = 1u64 << cantor_depth.min(30);
                (1..m).map(|k| PI * k as f64 / m as f64).collect()
            }
            _ => Vec::new(),
        }
    }
}

fn phi_level(theta: f64) -> f64 {
    let mut t = theta;
    if t.abs() > PI {
        t -= 2.0 * PI * (t / (2.0 * PI)).round();
    }
    (t.abs() / PI).min(1.0)
}

/// Inverse of the Cantor function: binary digits of `y` become ternary digits
/// `0 / 2`. Levels on a dyadic boundary take the non-terminating expansion so
/// that the infimum convention of `G` holds.
fn cantor_quantile(y: f64) -> f64 {
    let mut t = y;
    let mut x = 0.0;
    let mut scale = 1.0 / 3.0;
    for _ in 0..CANTOR_DIGITS {
        if t > 0.5 {
            x += 2.0 * scale;
            t = 2.0 * t - 1.0;
        } else {
            t *= 2.0;
        }
        scale /= 3.0;
    }
    x
}

fn cantor_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let mut t = x;
    let mut acc = 0.0;
    let mut half = 0.5;
    for _ in 0..64 {
        t *= 3.0;
        if t >= 2.0 {
            acc += half;
            t -= 2.0;
        } else if t >= 1.0 {
            // inside a removed middle third: F is flat there
            return acc + half;
        }
        half *= 0.5;
    }
    acc
}

/// Standard normal quantile, Wichura's AS 241 (PPND16); relative accuracy
/// about 1e-16 over `(0, 1)`.
#[allow(clippy::excessive_precision)]
pub fn standard_normal_quantile(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}
