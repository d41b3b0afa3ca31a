//! Coefficients `A_i(α, N)` and `B(α, p)` of the truncated expansions, and
//! the truncation-error bound.
//!
//! With `β = α + i` for integrals and `β = i − α` for derivatives, the
//! bracket of `A_i` is the partial sum `Σ_{m=0}^{M} (−1)^m C(β, m)` with
//! `M = N − n + i`. That partial sum telescopes to `(−1)^M C(β − 1, M)`, so
//!
//! ```text
//! A_i(α, N) = Γ(M + 1 − β) / (Γ(1 − β) · M! · Γ(β + 1))
//! ```
//!
//! which is evaluated in signed-log space. The alternating terms of the
//! literal sum cancel down to a bracket of size `M^{−β}`; the closed form
//! carries no such cancellation. [`a_coeff_by_summation`] keeps the literal
//! sum as a cross-check.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expansion::{lifted_derivative, LiftVariant};
use crate::function::FunctionSpec;
use crate::operator::{validate_alpha, validate_orders, Interval, Kind, Side};
use crate::special::{factorial, gamma, ln_factorial, signed_log_gamma, sin_pi};

/// Default sample count for the grid estimate of `L_n`.
pub const DEFAULT_LN_SAMPLES: usize = 1001;

fn beta(kind: Kind, alpha: f64, i: usize) -> f64 {
    match kind {
        Kind::Integral => alpha + i as f64,
        Kind::Derivative => i as f64 - alpha,
    }
}

// `k − β` with the integer parts combined first, so arguments near poles
// keep full relative precision.
fn minus_beta(kind: Kind, alpha: f64, i: usize, k: usize) -> f64 {
    let whole = k as f64 - i as f64;
    match kind {
        Kind::Integral => whole - alpha,
        Kind::Derivative => whole + alpha,
    }
}

fn side_sign(side: Side, i: usize) -> f64 {
    match side {
        Side::Right if i % 2 == 1 => -1.0,
        _ => 1.0,
    }
}

fn check(kind: Kind, alpha: f64, n: usize, big_n: usize) -> Result<()> {
    validate_alpha(kind, alpha)?;
    validate_orders(kind, n, big_n)
}

/// `A_i(α, N)` for expansion depth `n`. Right-side coefficients carry the
/// factor `(−1)^i`.
pub fn a_coeff(kind: Kind, side: Side, alpha: f64, i: usize, n: usize, big_n: usize) -> Result<f64> {
    check(kind, alpha, n, big_n)?;
    if i > n {
        return Err(Error::InvalidParameter(format!("coefficient index {i} exceeds depth {n}")));
    }
    let b = beta(kind, alpha, i);
    let m = big_n - n + i;
    let num = signed_log_gamma(minus_beta(kind, alpha, i, m + 1))?;
    let den = signed_log_gamma(minus_beta(kind, alpha, i, 1))?;
    let scale = signed_log_gamma(b + 1.0)?;
    let log_abs = num.log_abs - den.log_abs - ln_factorial(m) - scale.log_abs;
    Ok(side_sign(side, i) * num.sign * den.sign * scale.sign * log_abs.exp())
}

/// `A_i(α, N)` by the literal finite sum, accumulated smallest terms first
/// with compensated summation. Each term is a signed-log gamma ratio.
pub fn a_coeff_by_summation(kind: Kind, side: Side, alpha: f64, i: usize, n: usize, big_n: usize) -> Result<f64> {
    check(kind, alpha, n, big_n)?;
    if i > n {
        return Err(Error::InvalidParameter(format!("coefficient index {i} exceeds depth {n}")));
    }
    // integral: Γ(p−α−n) / (Γ(−α−i) (p−n+i)!); derivative: Γ(p+α−n) / (Γ(α−i) (p−n+i)!)
    let (shift, den) = match kind {
        Kind::Integral => (-alpha, signed_log_gamma(-alpha - i as f64)?),
        Kind::Derivative => (alpha, signed_log_gamma(alpha - i as f64)?),
    };
    let mut sum = 0.0;
    let mut comp = 0.0;
    for p in (n - i + 1..=big_n).rev() {
        let num = signed_log_gamma((p as f64 - n as f64) + shift)?;
        let log_abs = num.log_abs - den.log_abs - ln_factorial(p + i - n);
        let term = num.sign * den.sign * log_abs.exp();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    let bracket = 1.0 + sum;
    let scale = signed_log_gamma(beta(kind, alpha, i) + 1.0)?;
    Ok(side_sign(side, i) * bracket * scale.sign * (-scale.log_abs).exp())
}

/// `B(α, p)`, shared by both sides.
///
/// `Γ(α)Γ(1−α)` and `−Γ(−α)Γ(1+α)` both equal `π / sin(πα)`, so the
/// denominator is taken from the reflection formula directly.
pub fn b_coeff(kind: Kind, alpha: f64, p: usize, n: usize) -> Result<f64> {
    validate_alpha(kind, alpha)?;
    if p < n + 1 {
        return Err(Error::InvalidParameter(format!("B(alpha, p) needs p >= n+1, got p = {p}, n = {n}")));
    }
    let (shift, sign) = match kind {
        Kind::Integral => (-alpha, 1.0),
        Kind::Derivative => (alpha, -1.0),
    };
    let arg = (p - n) as f64 + shift;
    let s = sin_pi(alpha);
    if p - n <= 170 && arg < 171.0 {
        let direct = sign * gamma(arg)? * s / (PI * factorial(p - n));
        if direct.is_finite() && direct != 0.0 {
            return Ok(direct);
        }
    }
    let g = signed_log_gamma(arg)?;
    let log_abs = g.log_abs + s.abs().ln() - PI.ln() - ln_factorial(p - n);
    Ok(sign * g.sign * s.signum() * log_abs.exp())
}

/// All coefficients of one truncated expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub kind: Kind,
    pub side: Side,
    pub alpha: f64,
    pub n: usize,
    pub big_n: usize,
    /// `A_i(α, N)` for `i = 0..=n`.
    pub a_coeffs: Vec<f64>,
    /// `B(α, p)` for `p = n+1..=N`.
    pub b_coeffs: Vec<f64>,
}

impl CoefficientSet {
    pub fn new(kind: Kind, side: Side, alpha: f64, n: usize, big_n: usize) -> Result<Self> {
        check(kind, alpha, n, big_n)?;
        let a_coeffs = (0..=n).map(|i| a_coeff(kind, side, alpha, i, n, big_n)).collect::<Result<Vec<_>>>()?;
        let b_coeffs = (n + 1..=big_n).map(|p| b_coeff(kind, alpha, p, n)).collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, side, alpha, n, big_n, a_coeffs, b_coeffs })
    }

    /// `B(α, p)`; `p` must lie in `n+1..=N`.
    pub fn b(&self, p: usize) -> f64 {
        self.b_coeffs[p - self.n - 1]
    }
}

/// Upper bound on the truncation error at `t`:
///
/// ```text
/// L_n · e^{β²+β} / (Γ(β+1) · β · N^β) · ℓ^β · d
/// ```
///
/// with `β = α + n` (integral) or `n − α` (derivative), `ℓ = ln(t/a)` and
/// `d = t − a` on the left, `ℓ = ln(b/t)` and `d = b − t` on the right.
/// Computed in log space; `e^{β²+β}` alone overflows from `β ≈ 26`.
#[allow(clippy::too_many_arguments)]
pub fn truncation_bound(
    kind: Kind,
    side: Side,
    alpha: f64,
    n: usize,
    big_n: usize,
    t: f64,
    interval: Interval,
    l_n: f64,
) -> Result<f64> {
    check(kind, alpha, n, big_n)?;
    if !(l_n >= 0.0) {
        return Err(Error::InvalidParameter(format!("L_n must be non-negative, got {l_n}")));
    }
    let ell = interval.log_distance(side, t)?;
    let (lo, hi) = interval.span_to(side, t);
    let dist = hi - lo;
    if l_n == 0.0 || ell == 0.0 {
        return Ok(0.0);
    }
    let b = beta(kind, alpha, n);
    let log_bound = l_n.ln() + b * b + b - signed_log_gamma(b + 1.0)?.log_abs - b.ln() - b * (big_n as f64).ln()
        + b * ell.ln()
        + dist.ln();
    Ok(log_bound.exp())
}

/// Grid estimate of `max |x_{n,1}(τ)|` over `[lo, hi]` using `samples`
/// equally spaced points (endpoints included). Not a certified maximum.
pub fn max_lifted_derivative(x: &FunctionSpec, n: usize, lo: f64, hi: f64, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidParameter("L_n estimate needs at least 2 samples".into()));
    }
    if !(hi >= lo) {
        return Err(Error::Domain(format!("empty range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    let mut max = 0.0_f64;
    for k in 0..samples {
        let tau = if k + 1 == samples { hi } else { lo + k as f64 * step };
        let v = lifted_derivative(x, n, LiftVariant::One, tau)?;
        max = max.max(v.abs());
    }
    Ok(max)
}
