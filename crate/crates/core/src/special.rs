//! Scalar special functions: gamma (with reflection for negative
//! non-integer arguments), log-gamma with sign, error function, factorials
//! and Stirling numbers of the second kind.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const POLE_TOLERANCE: f64 = 1e-12;

/// Largest index held by the Stirling table.
pub const STIRLING_MAX: usize = 25;

/// `ln |Γ(x)|` together with the sign of `Γ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogGamma {
    pub log_abs: f64,
    pub sign: f64,
}

impl SignedLogGamma {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

fn check_pole(x: f64) -> Result<()> {
    if x <= 0.0 && (x - x.round()).abs() < POLE_TOLERANCE {
        return Err(Error::Pole(x));
    }
    Ok(())
}

/// `sin(πx)` with the argument reduced around the nearest integer, so that
/// values near the poles of Γ keep their relative accuracy.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

fn lanczos_sum(z: f64) -> f64 {
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    sum
}

// x >= 0.5
fn gamma_pos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so that t^(z+1/2) does not overflow before e^-t scales it
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z)
}

// x >= 0.5
fn ln_gamma_pos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Γ(x) for any real `x` that is not zero or a negative integer.
pub fn gamma(x: f64) -> Result<f64> {
    check_pole(x)?;
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * gamma_pos(1.0 - x)))
    } else {
        Ok(gamma_pos(x))
    }
}

/// Overflow-safe `(ln |Γ(x)|, sign Γ(x))`.
pub fn signed_log_gamma(x: f64) -> Result<SignedLogGamma> {
    check_pole(x)?;
    if x >= 0.5 {
        return Ok(SignedLogGamma { log_abs: ln_gamma_pos(x), sign: 1.0 });
    }
    let s = sin_pi(x);
    Ok(SignedLogGamma { log_abs: PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x), sign: s.signum() })
}

/// `m!` as a float (`inf` past 170).
pub fn factorial(m: usize) -> f64 {
    factorial_table().get(m).copied().unwrap_or(f64::INFINITY)
}

/// `ln(m!)`.
pub fn ln_factorial(m: usize) -> f64 {
    match factorial_table().get(m) {
        Some(f) => f.ln(),
        None => ln_gamma_pos(m as f64 + 1.0),
    }
}

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(171);
        let mut acc = 1.0_f64;
        out.push(acc);
        for m in 1..=170 {
            acc *= m as f64;
            out.push(acc);
        }
        out
    })
}

/// Error function.
///
/// Below |x| = 2 the positive-term series
/// `2x/√π · e^{-x²} · Σ (2x²)^k / (1·3···(2k+1))` is summed; above, `erfc`
/// comes from its continued fraction and `erf = 1 − erfc`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 2.0 { erf_series(ax) } else { 1.0 - erfc_continued_fraction(ax) };
    value.copysign(x)
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term <= f64::EPSILON * sum * 0.25 {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

// x >= 2; modified Lentz on x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))
fn erfc_continued_fraction(x: f64) -> f64 {
    if x > 27.0 {
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..2000 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

fn stirling_table() -> &'static [[u64; STIRLING_MAX + 1]; STIRLING_MAX + 1] {
    static TABLE: OnceLock<[[u64; STIRLING_MAX + 1]; STIRLING_MAX + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut s = [[0u64; STIRLING_MAX + 1]; STIRLING_MAX + 1];
        s[0][0] = 1;
        for k in 0..STIRLING_MAX {
            for j in 1..=k + 1 {
                s[k + 1][j] = j as u64 * s[k][j] + s[k][j - 1];
            }
        }
        s
    })
}

/// Stirling number of the second kind `S(k, j)` for `k, j <= 25`.
pub fn stirling2(k: usize, j: usize) -> Result<u64> {
    if k > STIRLING_MAX || j > STIRLING_MAX {
        return Err(Error::OutOfTable { k, j, max: STIRLING_MAX });
    }
    Ok(stirling_table()[k][j])
}
