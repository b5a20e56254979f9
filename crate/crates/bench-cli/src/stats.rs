//! Medians, quartiles, and the Mann–Whitney U test.

use statrs::distribution::{ContinuousCDF, Normal};

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Median with the mean of the middle two for even lengths. NaN if empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    quantile_sorted(&sorted(values), 0.5)
}

/// First and third quartiles (linear interpolation between order statistics).
pub fn quartiles(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let v = sorted(values);
    (quantile_sorted(&v, 0.25), quantile_sorted(&v, 0.75))
}

pub fn iqr(values: &[f64]) -> f64 {
    let (q1, q3) = quartiles(values);
    q3 - q1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// Pairs with `a_i > b_j`, ties counting one half.
    pub u: f64,
    pub z: f64,
    pub p_two_sided: f64,
    /// p-value for the alternative "a tends to be smaller than b".
    pub p_less: f64,
    /// p-value for the alternative "a tends to be larger than b".
    pub p_greater: f64,
}

/// Mann–Whitney U test with the normal approximation, tie-corrected
/// variance, and continuity correction.
///
/// `u` counts pairs `(a_i, b_j)` with `a_i > b_j`, plus one half per tie.
/// When every value is tied the variance is zero and all p-values are 1.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> MannWhitney {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    if a.is_empty() || b.is_empty() {
        return MannWhitney {
            u: f64::NAN,
            z: f64::NAN,
            p_two_sided: f64::NAN,
            p_less: f64::NAN,
            p_greater: f64::NAN,
        };
    }
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            u += if x > y {
                1.0
            } else if x == y {
                0.5
            } else {
                0.0
            };
        }
    }

    let pooled = sorted(&[a, b].concat());
    let n = n1 + n2;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let j = pooled[i..].iter().take_while(|v| **v == pooled[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }

    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return MannWhitney {
            u,
            z: 0.0,
            p_two_sided: 1.0,
            p_less: 1.0,
            p_greater: 1.0,
        };
    }
    let sd = var.sqrt();
    let norm = Normal::standard();
    let z = (u - mean) / sd;
    let z_greater = (u - mean - 0.5) / sd;
    let z_less = (u - mean + 0.5) / sd;
    let z_two = ((u - mean).abs() - 0.5).max(0.0) / sd;
    MannWhitney {
        u,
        z,
        p_two_sided: (2.0 * norm.sf(z_two)).min(1.0),
        p_less: norm.cdf(z_less),
        p_greater: norm.sf(z_greater),
    }
}
