//! Reference laws used by the tests, the examples and the `fixtures/` files.

use crate::distributions::Distribution;

/// Uniform on `[-1, 1]`.
pub fn uniform() -> Distribution {
    Distribution::uniform(-1.0, 1.0).expect("valid fixture")
}

/// Fair `±1` coin.
pub fn bernoulli() -> Distribution {
    Distribution::atoms(&[(-1.0, 0.5), (1.0, 0.5)]).expect("valid fixture")
}

/// Centered three-atom law on `{-1, 0, 2}` with masses `0.4, 0.4, 0.2`.
pub fn three_atom() -> Distribution {
    Distribution::atoms(&[(-1.0, 0.4), (0.0, 0.4), (2.0, 0.2)]).expect("valid fixture")
}

/// Largest atom kept in [`geometric`].
pub const GEOMETRIC_LAST: u32 = 52;

/// `mu({k}) = 2^-(k+1)` for `k = 0..52`, the atom at 52 absorbing the
/// remaining tail mass `2^-53` so the total is exactly one. Mean `1 - 2^-52`.
pub fn geometric() -> Distribution {
    let mut atoms: Vec<(f64, f64)> = (0..GEOMETRIC_LAST)
        .map(|k| (k as f64, 0.5_f64.powi(k as i32 + 1)))
        .collect();
    atoms.push((GEOMETRIC_LAST as f64, 0.5_f64.powi(GEOMETRIC_LAST as i32)));
    Distribution::atoms(&atoms).expect("valid fixture")
}

/// Standard normal.
pub fn gaussian() -> Distribution {
    Distribution::gaussian(0.0, 1.0).expect("valid fixture")
}

/// Cantor law shifted to mean zero.
pub fn cantor() -> Distribution {
    Distribution::cantor(true)
}

/// Eight fixed samples, mean zero, one repeated value.
pub fn empirical() -> Distribution {
    Distribution::empirical(vec![-1.5, -0.75, -0.25, 0.0, 0.0, 0.5, 0.75, 1.25]).expect("valid fixture")
}

/// Every valid fixture with a short name.
pub fn all() -> Vec<(&'static str, Distribution)> {
    vec![
        ("uniform", uniform()),
        ("bernoulli", bernoulli()),
        ("three_atom", three_atom()),
        ("geometric", geometric()),
        ("gaussian", gaussian()),
        ("cantor", cantor()),
        ("empirical", empirical()),
    ]
}
