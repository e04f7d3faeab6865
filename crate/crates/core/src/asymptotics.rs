//! Quantization dimension and the scaled error sequence `n^{2/β} V_n`.
//!
//! Logarithms and powers are evaluated in `f64`. Exact identities such as
//! `4^{2/β} = 9` are handled symbolically, never through floating logs.

use num::bigint::{BigInt, BigUint};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimal::{quantization_error, quantization_error_big};
use crate::point::{format_rational, ln_rational, to_f64, Rational};

/// `β = log 4 / log 3`.
pub fn beta() -> f64 {
    4f64.ln() / 3f64.ln()
}

/// `β` as the ratio of logarithms of two integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogRatio {
    pub num: u64,
    pub den: u64,
}

pub fn beta_symbolic() -> LogRatio {
    LogRatio { num: 4, den: 3 }
}

impl LogRatio {
    pub fn value(&self) -> f64 {
        (self.num as f64).ln() / (self.den as f64).ln()
    }

    /// `num^{e/β}` for `β = log num / log den`, which is `den^e`.
    pub fn num_pow_over(&self, e: u32) -> BigUint {
        BigUint::from(self.den).pow(e)
    }
}

/// `2 ln n / (−ln V_n)`.
pub fn dimension_estimate(n: u64) -> f64 {
    assert!(n >= 2, "dimension estimate needs n ≥ 2");
    2.0 * (n as f64).ln() / -ln_rational(&quantization_error(n))
}

/// [`dimension_estimate`] at `n = 4^level`, through the closed form.
pub fn dimension_estimate_at_power(level: u32) -> f64 {
    assert!(level >= 1);
    let n = BigUint::from(1u32) << (2 * level as u64);
    let v = quantization_error_big(&n);
    2.0 * level as f64 * 4f64.ln() / -ln_rational(&v)
}

/// `n^{2/β} V_n`.
pub fn scaled_error(n: u64) -> f64 {
    (n as f64).powf(2.0 / beta()) * to_f64(&quantization_error(n))
}

/// `9^level · V_{4^level}`, exact; uses `(4^level)^{2/β} = 9^level`.
pub fn exact_scaled_at_power(level: u32) -> Rational {
    let n = BigUint::from(1u32) << (2 * level as u64);
    let nine = Rational::from_integer(BigInt::from(beta_symbolic().num_pow_over(2 * level)));
    nine * quantization_error_big(&n)
}

/// Limit profile on `[1, 2]`: `x^{2/β}(13 − 4x)/36`.
pub fn g(x: f64) -> f64 {
    x.powf(2.0 / beta()) * (13.0 - 4.0 * x) / 36.0
}

/// Limit profile on `[2, 4]`: `x^{2/β}(9 − 2x)/36`.
pub fn h(x: f64) -> f64 {
    x.powf(2.0 / beta()) * (9.0 - 2.0 * x) / 36.0
}

/// Reference profile `x^{2/β}(13 − x)/36`, reported next to `g` and `h`.
pub fn f_paper(x: f64) -> f64 {
    x.powf(2.0 / beta()) * (13.0 - x) / 36.0
}

/// `g` on `[1, 2)`, `h` on `[2, 4]`.
pub fn limit_profile(x: f64) -> f64 {
    if x < 2.0 {
        g(x)
    } else {
        h(x)
    }
}

/// Maximizes a smooth unimodal function on `[a, b]` by golden-section search.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > 1e-12 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSample {
    pub level: u32,
    pub n: u64,
    /// `n / 4^level`.
    pub x: f64,
    pub v_n: Rational,
    pub scaled: f64,
    pub limit: f64,
    pub f_paper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileReport {
    pub samples: Vec<ScaledSample>,
    pub inf_observed: f64,
    pub sup_observed: f64,
    /// Extremes over samples with `x < 2` only.
    pub inf_lower_half: f64,
    pub sup_lower_half: f64,
    pub dimension_estimates: Vec<(u64, f64)>,
}

pub const MAX_PROFILE_LEVEL: u32 = 15;

/// Samples `n = round(x·4^ℓ)` on the grid `x = 1 + 3i/grid_points`,
/// `i < grid_points`, for each level in `ℓ_min..=ℓ_max`.
pub fn scaled_profile(level_min: u32, level_max: u32, grid_points: usize) -> Result<ProfileReport> {
    if level_min < 1 || level_min > level_max || level_max > MAX_PROFILE_LEVEL {
        return Err(Error::InvalidConfig(format!(
            "levels must satisfy 1 ≤ {level_min} ≤ {level_max} ≤ {MAX_PROFILE_LEVEL}"
        )));
    }
    if grid_points == 0 {
        return Err(Error::InvalidConfig("grid must have at least one point".into()));
    }
    let jobs: Vec<(u32, usize)> = (level_min..=level_max)
        .flat_map(|l| (0..grid_points).map(move |i| (l, i)))
        .collect();
    let samples: Vec<ScaledSample> = jobs
        .par_iter()
        .map(|&(level, i)| {
            let p = 4f64.powi(level as i32);
            let grid_x = 1.0 + 3.0 * i as f64 / grid_points as f64;
            let n = ((grid_x * p).round() as u64).clamp(1 << (2 * level), (4 << (2 * level)) - 1);
            let x = n as f64 / p;
            let v_n = quantization_error(n);
            ScaledSample {
                level,
                n,
                x,
                scaled: (n as f64).powf(2.0 / beta()) * to_f64(&v_n),
                v_n,
                limit: limit_profile(x),
                f_paper: f_paper(x),
            }
        })
        .collect();
    let fold = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (inf_observed, sup_observed) = fold(&mut samples.iter().map(|s| s.scaled));
    let (inf_lower_half, sup_lower_half) = fold(&mut samples.iter().filter(|s| s.x < 2.0).map(|s| s.scaled));
    let dimension_estimates = (level_min..=level_max)
        .map(|l| (1u64 << (2 * l), dimension_estimate_at_power(l)))
        .collect();
    Ok(ProfileReport { samples, inf_observed, sup_observed, inf_lower_half, sup_lower_half, dimension_estimates })
}

pub const PROFILE_CSV_HEADER: &str = "ell,n,x,v_n_num,v_n_den,scaled,g_or_h,f_paper";

pub fn profile_csv(report: &ProfileReport) -> String {
    let mut out = String::from(PROFILE_CSV_HEADER);
    out.push('\n');
    for s in &report.samples {
        let v = format_rational(&s.v_n);
        let (num, den) = v.split_once('/').unwrap();
        out.push_str(&format!(
            "{},{},{:.12},{},{},{:.12},{:.12},{:.12}\n",
            s.level, s.n, s.x, num, den, s.scaled, s.limit, s.f_paper
        ));
    }
    out
}
