//! Truncated expansions of the left/right Hadamard fractional integrals and
//! derivatives in terms of integer-order derivatives and moment integrals.
//!
//! With `ℓ = ln(t/a)` (left) or `ℓ = ln(b/t)` (right), `σ = +1` for
//! integrals and `σ = −1` for derivatives:
//!
//! ```text
//! value = Σ_{i=0}^{n} A_i(α,N) ℓ^{σα+i} x_{i,0}(t) + Σ_{p=n+1}^{N} B(α,p) ℓ^{σα+n−p} V_p(t)
//! ```
//!
//! where `V_p` is replaced by `W_p` on the right. The right-derivative
//! finite sum is obtained from the left one through the reflection
//! `τ ↦ ab/τ`, which turns `x_{i,0}` into `(−1)^i x_{i,0}` and `V_p` into
//! `W_p`; it is not printed in closed form anywhere else.

use crate::coefficients::{max_lifted_derivative, truncation_bound, CoefficientSet, DEFAULT_LN_SAMPLES};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::operator::{validate_orders, Interval, Kind, OperatorSpec, Side};
use crate::quadrature::{GaussLegendre, QuadratureConfig};
use crate::special::stirling2;
use crate::table::SeriesTable;

/// Which of the two lifted sequences to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftVariant {
    /// `x_{0,0} = x`, `x_{k+1,0} = t·d/dt x_{k,0}`.
    Zero,
    /// `x_{0,1} = ẋ`, `x_{k+1,1} = d/dt (t·x_{k,1})`.
    One,
}

/// `x_{k,0}(t) = Σ_j S(k,j) t^j x^{(j)}(t)` or
/// `x_{k,1}(t) = Σ_j S(k+1,j+1) t^j x^{(j+1)}(t)`, with `S` the Stirling
/// numbers of the second kind.
pub fn lifted_derivative(x: &FunctionSpec, k: usize, variant: LiftVariant, t: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut t_pow = 1.0;
    for j in 0..=k {
        let (s, order) = match variant {
            LiftVariant::Zero => (stirling2(k, j)?, j),
            LiftVariant::One => (stirling2(k + 1, j + 1)?, j + 1),
        };
        if s != 0 {
            sum += s as f64 * t_pow * x.deriv(order, t)?;
        }
        t_pow *= t;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentBase {
    /// `V_p(t) = ∫_a^t (p−n) ln(τ/a)^{p−n−1} x(τ)/τ dτ`.
    LeftV,
    /// `W_p(t) = ∫_t^b (p−n) ln(b/τ)^{p−n−1} x(τ)/τ dτ`.
    RightW,
}

impl MomentBase {
    pub fn side(self) -> Side {
        match self {
            MomentBase::LeftV => Side::Left,
            MomentBase::RightW => Side::Right,
        }
    }

    pub fn for_side(side: Side) -> Self {
        match side {
            Side::Left => MomentBase::LeftV,
            Side::Right => MomentBase::RightW,
        }
    }
}

/// One moment value; zero at the anchor endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub p: usize,
    pub value: f64,
    pub base: MomentBase,
}

fn point_at(interval: Interval, side: Side, s: f64) -> f64 {
    match side {
        Side::Left => interval.a * s.exp(),
        Side::Right => interval.b * (-s).exp(),
    }
}

/// Accumulates `∫_{s0}^{s1} (p−n) (s/ℓ)^{p−n−1} x(τ(s)) ds / ℓ` for
/// `p = n+1..=n+out.len()` into `out`.
#[allow(clippy::too_many_arguments)]
fn accumulate_moments(
    x: &FunctionSpec,
    interval: Interval,
    side: Side,
    rule: &GaussLegendre,
    panels: usize,
    s0: f64,
    s1: f64,
    ell: f64,
    out: &mut [f64],
) {
    rule.for_each_node(s0, s1, panels, |s, w| {
        let xv = x.eval(point_at(interval, side, s)) * w / ell;
        let u = s / ell;
        let mut u_pow = 1.0;
        for (j, m) in out.iter_mut().enumerate() {
            *m += (j + 1) as f64 * u_pow * xv;
            u_pow *= u;
        }
    });
}

/// `V_p(t)` (or `W_p(t)`) by Gauss–Legendre quadrature in `s = ln(τ/a)`
/// (or `ln(b/τ)`), where the kernel is the polynomial `(p−n) s^{p−n−1}`.
pub fn moment(
    p: usize,
    n: usize,
    x: &FunctionSpec,
    interval: Interval,
    t: f64,
    base: MomentBase,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if p < n + 1 {
        return Err(Error::InvalidParameter(format!("moment index p = {p} must exceed n = {n}")));
    }
    let side = base.side();
    let ell = interval.log_distance(side, t)?;
    if ell == 0.0 {
        return Ok(0.0);
    }
    let rule = cfg.rule()?;
    let mut m = vec![0.0; p - n];
    accumulate_moments(x, interval, side, &rule, cfg.panels, 0.0, ell, ell, &mut m);
    Ok(m[p - n - 1] * ell.powi((p - n) as i32))
}

/// All moments `p = n+1..=N` at `t`.
pub fn moment_states(
    n: usize,
    big_n: usize,
    x: &FunctionSpec,
    interval: Interval,
    t: f64,
    base: MomentBase,
    cfg: &QuadratureConfig,
) -> Result<Vec<MomentState>> {
    let side = base.side();
    let ell = interval.log_distance(side, t)?;
    let count = big_n.saturating_sub(n);
    let mut m = vec![0.0; count];
    if ell > 0.0 {
        let rule = cfg.rule()?;
        accumulate_moments(x, interval, side, &rule, cfg.panels, 0.0, ell, ell, &mut m);
    }
    Ok(m.iter()
        .enumerate()
        .map(|(j, v)| MomentState { p: n + 1 + j, value: v * ell.powi(j as i32 + 1), base })
        .collect())
}

/// Expansion depth, truncation order and numerical settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConfig {
    /// Expansion depth `n`.
    pub n: usize,
    /// Truncation order `N >= n + 1`.
    pub big_n: usize,
    pub quad: QuadratureConfig,
    /// Grid size used to estimate `L_n`.
    pub ln_samples: usize,
}

impl ExpansionConfig {
    pub fn new(n: usize, big_n: usize) -> Self {
        Self { n, big_n, quad: QuadratureConfig::default(), ln_samples: DEFAULT_LN_SAMPLES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigEcho {
    pub kind: Kind,
    pub side: Side,
    pub alpha: f64,
    pub n: usize,
    pub big_n: usize,
}

/// Approximate operator value with its truncation-error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxResult {
    pub value: f64,
    pub bound: f64,
    /// The `L_n` estimate that produced `bound`.
    pub l_n: f64,
    pub config: ConfigEcho,
}

struct Prepared {
    coeffs: CoefficientSet,
    echo: ConfigEcho,
}

fn prepare(x: &FunctionSpec, spec: &OperatorSpec, cfg: &ExpansionConfig) -> Result<Prepared> {
    validate_orders(spec.kind, cfg.n, cfg.big_n)?;
    let needed = cfg.n + 1;
    if needed > x.max_order() {
        return Err(Error::DerivativeUnavailable { order: needed, max_order: x.max_order() });
    }
    let coeffs = CoefficientSet::new(spec.kind, spec.side, spec.alpha, cfg.n, cfg.big_n)?;
    let echo = ConfigEcho { kind: spec.kind, side: spec.side, alpha: spec.alpha, n: cfg.n, big_n: cfg.big_n };
    Ok(Prepared { coeffs, echo })
}

// `normalized[j]` holds `V_{n+1+j}(t) / ℓ^{j+1}`.
fn assemble(
    x: &FunctionSpec,
    spec: &OperatorSpec,
    prep: &Prepared,
    t: f64,
    ell: f64,
    normalized: &[f64],
) -> Result<f64> {
    let sigma_alpha = match spec.kind {
        Kind::Integral => spec.alpha,
        Kind::Derivative => -spec.alpha,
    };
    let mut value = 0.0;
    for (i, a) in prep.coeffs.a_coeffs.iter().enumerate() {
        value += a * ell.powf(sigma_alpha + i as f64) * lifted_derivative(x, i, LiftVariant::Zero, t)?;
    }
    let mut tail = 0.0;
    for (b, m) in prep.coeffs.b_coeffs.iter().zip(normalized) {
        tail += b * m;
    }
    Ok(value + ell.powf(sigma_alpha) * tail)
}

fn bound_at(x: &FunctionSpec, spec: &OperatorSpec, cfg: &ExpansionConfig, t: f64) -> Result<(f64, f64)> {
    let (lo, hi) = spec.interval.span_to(spec.side, t);
    let l_n = max_lifted_derivative(x, cfg.n, lo, hi, cfg.ln_samples)?;
    let bound = truncation_bound(spec.kind, spec.side, spec.alpha, cfg.n, cfg.big_n, t, spec.interval, l_n)?;
    Ok((l_n, bound))
}

fn anchor_value(spec: &OperatorSpec, t: f64) -> Result<()> {
    match spec.kind {
        Kind::Integral => Ok(()),
        Kind::Derivative => Err(Error::Domain(format!("derivative expansion diverges at the anchor t = {t}"))),
    }
}

/// Evaluates the truncated expansion of `spec` applied to `x` at `t`.
///
/// At the anchor itself integrals return `0` (continuity) and derivatives
/// raise a domain error.
pub fn approximate(x: &FunctionSpec, spec: &OperatorSpec, cfg: &ExpansionConfig, t: f64) -> Result<ApproxResult> {
    let prep = prepare(x, spec, cfg)?;
    let ell = spec.interval.log_distance(spec.side, t)?;
    if ell == 0.0 {
        anchor_value(spec, t)?;
        return Ok(ApproxResult { value: 0.0, bound: 0.0, l_n: 0.0, config: prep.echo });
    }
    let rule = cfg.quad.rule()?;
    let mut normalized = vec![0.0; cfg.big_n - cfg.n];
    accumulate_moments(x, spec.interval, spec.side, &rule, cfg.quad.panels, 0.0, ell, ell, &mut normalized);
    let value = assemble(x, spec, &prep, t, ell, &normalized)?;
    let (l_n, bound) = bound_at(x, spec, cfg, t)?;
    Ok(ApproxResult { value, bound, l_n, config: prep.echo })
}

/// [`approximate`] over a strictly increasing grid. Moments are advanced
/// from one grid point to the next instead of being recomputed from the
/// anchor, so each grid interval is integrated once.
///
/// Returns a table with columns `t`, `approx`, `bound`.
pub fn approximate_series(
    x: &FunctionSpec,
    spec: &OperatorSpec,
    cfg: &ExpansionConfig,
    grid: &[f64],
) -> Result<SeriesTable> {
    let prep = prepare(x, spec, cfg)?;
    if grid.is_empty() {
        return Err(Error::GridMismatch("empty grid".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::GridOrder(i + 1));
    }
    let ells = grid.iter().map(|&t| spec.interval.log_distance(spec.side, t)).collect::<Result<Vec<_>>>()?;
    // Visit points moving away from the anchor.
    let order: Vec<usize> = match spec.side {
        Side::Left => (0..grid.len()).collect(),
        Side::Right => (0..grid.len()).rev().collect(),
    };
    let ell_max = ells.iter().cloned().fold(0.0, f64::max);
    let rule = cfg.quad.rule()?;
    let count = cfg.big_n - cfg.n;
    let mut normalized = vec![0.0; count];
    let mut increment = vec![0.0; count];
    let mut ell_prev = 0.0;
    let mut approx = vec![0.0; grid.len()];
    let mut bound = vec![0.0; grid.len()];
    for &idx in &order {
        let t = grid[idx];
        let ell = ells[idx];
        if ell == 0.0 {
            anchor_value(spec, t)?;
            continue;
        }
        // rescale V_p/ℓ_prev^{p−n} to V_p/ℓ^{p−n}
        let ratio = ell_prev / ell;
        let mut r = ratio;
        for m in normalized.iter_mut() {
            *m *= r;
            r *= ratio;
        }
        increment.iter_mut().for_each(|v| *v = 0.0);
        let panels = ((cfg.quad.panels as f64 * (ell - ell_prev) / ell_max).ceil() as usize).max(1);
        accumulate_moments(x, spec.interval, spec.side, &rule, panels, ell_prev, ell, ell, &mut increment);
        for (m, d) in normalized.iter_mut().zip(&increment) {
            *m += d;
        }
        ell_prev = ell;
        approx[idx] = assemble(x, spec, &prep, t, ell, &normalized)?;
        bound[idx] = bound_at(x, spec, cfg, t)?.1;
    }
    let mut table = SeriesTable::new(grid.to_vec())?;
    table.push_column("approx", approx)?;
    table.push_column("bound", bound)?;
    table.set_meta("kind", spec.kind.to_string());
    table.set_meta("side", spec.side.to_string());
    table.set_meta("alpha", spec.alpha.to_string());
    table.set_meta("n", cfg.n.to_string());
    table.set_meta("N", cfg.big_n.to_string());
    table.set_meta("a", spec.interval.a.to_string());
    table.set_meta("b", spec.interval.b.to_string());
    table.set_meta("function", x.id().to_string());
    let mode = if x.is_analytic() {
        format!("grid-{} analytic derivatives", cfg.ln_samples)
    } else {
        format!("grid-{} finite-difference derivatives (bound is an estimate)", cfg.ln_samples)
    };
    table.set_meta("L_n", mode);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{a_coeff, b_coeff};

    fn spec(kind: Kind, side: Side, a: f64, b: f64) -> OperatorSpec {
        OperatorSpec::new(kind, side, 0.5, Interval::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn lifted_examples() {
        let f = FunctionSpec::pow(4);
        let t = 1.7;
        assert_eq!(lifted_derivative(&f, 0, LiftVariant::Zero, t).unwrap(), f.eval(t));
        let want = f.deriv(1, t).unwrap() + 3.0 * t * f.deriv(2, t).unwrap() + t * t * f.deriv(3, t).unwrap();
        assert!((lifted_derivative(&f, 2, LiftVariant::One, t).unwrap() - want).abs() < 1e-12);
        let p9 = FunctionSpec::pow(9);
        for k in 0..6 {
            let got = lifted_derivative(&p9, k, LiftVariant::Zero, t).unwrap();
            let want = 9f64.powi(k as i32) * t.powi(9);
            assert!(((got - want) / want).abs() < 1e-13, "k = {k}");
        }
        assert!(lifted_derivative(&p9, 25, LiftVariant::One, t).is_err());
    }

    #[test]
    fn moment_examples() {
        let iv = Interval::new(1.0, 10.0).unwrap();
        let cfg = QuadratureConfig::default();
        let one = FunctionSpec::one();
        let ln = FunctionSpec::ln();
        assert_eq!(moment(3, 2, &ln, iv, 1.0, MomentBase::LeftV, &cfg).unwrap(), 0.0);
        assert_eq!(moment(3, 2, &ln, iv, 10.0, MomentBase::RightW, &cfg).unwrap(), 0.0);
        for p in 3..8 {
            let got = moment(p, 2, &one, iv, 6.0, MomentBase::LeftV, &cfg).unwrap();
            let want = 6f64.ln().powi(p as i32 - 2);
            assert!(((got - want) / want).abs() < 1e-13, "p = {p}");
        }
        let got = moment(3, 2, &ln, iv, 6.0, MomentBase::LeftV, &cfg).unwrap();
        assert!((got - 6f64.ln().powi(2) / 2.0).abs() < 1e-13);
        let w = moment(4, 2, &one, iv, 2.5, MomentBase::RightW, &cfg).unwrap();
        assert!((w - 4f64.ln().powi(2)).abs() < 1e-13);
        assert!(moment(2, 2, &one, iv, 2.0, MomentBase::LeftV, &cfg).is_err());
        assert!(moment(3, 2, &one, iv, 11.0, MomentBase::LeftV, &cfg).is_err());
    }

    #[test]
    fn moment_states_match_single_moments() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let cfg = QuadratureConfig::default();
        let f = FunctionSpec::pow(4);
        let states = moment_states(2, 8, &f, iv, 1.6, MomentBase::RightW, &cfg).unwrap();
        assert_eq!(states.len(), 6);
        for s in &states {
            let single = moment(s.p, 2, &f, iv, 1.6, MomentBase::RightW, &cfg).unwrap();
            assert!((s.value - single).abs() <= 1e-14 * single.abs());
        }
    }

    #[test]
    fn two_term_integral_examples() {
        // ln t, n = 2: [A_0 + A_1 + Σ B (p−2)/(p−1)] · ln(t)^{3/2}
        let s = spec(Kind::Integral, Side::Left, 1.0, 10.0);
        for big_n in [3, 5, 12] {
            let cfg = ExpansionConfig::new(2, big_n);
            let mut bracket = a_coeff(Kind::Integral, Side::Left, 0.5, 0, 2, big_n).unwrap()
                + a_coeff(Kind::Integral, Side::Left, 0.5, 1, 2, big_n).unwrap();
            for p in 3..=big_n {
                bracket += b_coeff(Kind::Integral, 0.5, p, 2).unwrap() * (p as f64 - 2.0) / (p as f64 - 1.0);
            }
            let t = 4.0;
            let got = approximate(&FunctionSpec::ln(), &s, &cfg, t).unwrap();
            let want = bracket * t.ln().powf(1.5);
            assert!((got.value - want).abs() < 1e-13, "N = {big_n}");

            let mut bracket = a_coeff(Kind::Integral, Side::Left, 0.5, 0, 2, big_n).unwrap();
            for p in 3..=big_n {
                bracket += b_coeff(Kind::Integral, 0.5, p, 2).unwrap();
            }
            let got = approximate(&FunctionSpec::one(), &s, &cfg, t).unwrap();
            assert!((got.value - bracket * t.ln().sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_function_maps_to_zero() {
        let zero = FunctionSpec::zero();
        for kind in [Kind::Integral, Kind::Derivative] {
            for side in [Side::Left, Side::Right] {
                let r = approximate(&zero, &spec(kind, side, 1.0, 3.0), &ExpansionConfig::new(2, 6), 2.0).unwrap();
                assert_eq!(r.value, 0.0);
                assert_eq!(r.bound, 0.0);
            }
        }
    }

    #[test]
    fn anchor_behaviour() {
        let cfg = ExpansionConfig::new(2, 5);
        let f = FunctionSpec::pow(4);
        let r = approximate(&f, &spec(Kind::Integral, Side::Left, 1.0, 2.0), &cfg, 1.0).unwrap();
        assert_eq!((r.value, r.bound), (0.0, 0.0));
        let r = approximate(&f, &spec(Kind::Integral, Side::Right, 1.0, 2.0), &cfg, 2.0).unwrap();
        assert_eq!((r.value, r.bound), (0.0, 0.0));
        let e = approximate(&f, &spec(Kind::Derivative, Side::Left, 1.0, 2.0), &cfg, 1.0).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
        let e = approximate(&f, &spec(Kind::Derivative, Side::Left, 1.0, 2.0), &ExpansionConfig::new(0, 5), 1.5);
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
        let e = approximate(&f, &spec(Kind::Integral, Side::Left, 1.0, 2.0), &ExpansionConfig::new(2, 2), 1.5);
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn integral_accepts_depth_zero() {
        let cfg = ExpansionConfig::new(0, 4);
        let s = spec(Kind::Integral, Side::Left, 1.0, 4.0);
        let r = approximate(&FunctionSpec::one(), &s, &cfg, 3.0).unwrap();
        // x ≡ 1 has x_{0,1} = 0, so the expansion is exact
        let want = 3f64.ln().sqrt() / crate::special::gamma(1.5).unwrap();
        assert!((r.value - want).abs() < 1e-13);
    }

    #[test]
    fn series_single_point_matches_approximate() {
        let f = FunctionSpec::pow(4);
        let cfg = ExpansionConfig::new(2, 7);
        for side in [Side::Left, Side::Right] {
            for kind in [Kind::Integral, Kind::Derivative] {
                let s = spec(kind, side, 1.0, 2.0);
                let table = approximate_series(&f, &s, &cfg, &[1.4]).unwrap();
                let single = approximate(&f, &s, &cfg, 1.4).unwrap();
                let got = table.column("approx").unwrap()[0];
                assert!((got - single.value).abs() <= 1e-13 * single.value.abs(), "{kind} {side}");
                assert_eq!(table.column("bound").unwrap()[0], single.bound);
            }
        }
    }

    #[test]
    fn series_matches_pointwise_evaluation() {
        let f = FunctionSpec::pow(9);
        let cfg = ExpansionConfig::new(3, 12);
        let grid: Vec<f64> = (1..=40).map(|i| 1.0 + i as f64 / 40.0).collect();
        for side in [Side::Left, Side::Right] {
            let s = spec(Kind::Derivative, side, 1.0, 2.0);
            let grid: Vec<f64> = grid.iter().cloned().filter(|&t| t < 2.0 || side == Side::Left).collect();
            let table = approximate_series(&f, &s, &cfg, &grid).unwrap();
            for (t, v) in grid.iter().zip(table.column("approx").unwrap()) {
                let single = approximate(&f, &s, &cfg, *t).unwrap().value;
                assert!((v - single).abs() <= 1e-11 * single.abs().max(1.0), "{side} t = {t}: {v} vs {single}");
            }
        }
    }

    #[test]
    fn series_rejects_bad_grids() {
        let f = FunctionSpec::one();
        let cfg = ExpansionConfig::new(2, 3);
        let s = spec(Kind::Integral, Side::Left, 1.0, 10.0);
        assert!(matches!(approximate_series(&f, &s, &cfg, &[3.0, 2.0]), Err(Error::GridOrder(1))));
        assert!(approximate_series(&f, &s, &cfg, &[]).is_err());
        assert!(matches!(approximate_series(&f, &s, &cfg, &[2.0, 11.0]), Err(Error::Domain(_))));
        let d = spec(Kind::Derivative, Side::Left, 1.0, 10.0);
        assert!(matches!(approximate_series(&f, &d, &cfg, &[1.0, 2.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn series_metadata() {
        let f = FunctionSpec::ln().with_finite_differences(1e-5);
        let s = spec(Kind::Integral, Side::Left, 1.0, 10.0);
        let table = approximate_series(&f, &s, &ExpansionConfig::new(1, 3), &[2.0, 3.0]).unwrap();
        assert_eq!(table.meta("function"), Some("ln"));
        assert!(table.meta("L_n").unwrap().contains("estimate"));
        assert_eq!(table.names(), vec!["t", "approx", "bound"]);
    }
}
