//! Fractional differential equations `D^α x + c·x = g(t, x)`, `x(a) = x₀`,
//! with a left derivative of order `α ∈ (0, 1)`.
//!
//! The derivative is replaced by its depth-one expansion
//!
//! ```text
//! D^α x ≈ A_0 ℓ^{−α} x + A_1 ℓ^{1−α} t ẋ + Σ_{p=2}^{N} B_p ℓ^{1−α−p} V_p,   ℓ = ln(t/a)
//! ```
//!
//! whose moments obey `V̇_p = (p−1) ℓ^{p−2} x / t`, `V_p(a) = 0`. The result
//! is linear in `ẋ`, so the augmented state `(x, V_2, …, V_N)` satisfies an
//! explicit first-order system.

use std::fmt;
use std::sync::Arc;

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::ode::{self, OdeSystem};
use crate::operator::{validate_alpha, Kind, Side};
use crate::special::gamma;

/// Default offset `δ` of the start time `a(1+δ)`.
pub const DEFAULT_START_OFFSET: f64 = 1e-4;
/// Default number of RK4 steps.
pub const DEFAULT_STEPS: usize = 10_000;

pub type Rhs = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct FdeProblem {
    pub alpha: f64,
    pub a: f64,
    pub t_end: f64,
    pub linear_coeff: f64,
    /// `g(t, x)`.
    pub rhs: Rhs,
    pub initial_value: f64,
    /// Truncation order `N >= 2`.
    pub big_n: usize,
}

impl fmt::Debug for FdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdeProblem")
            .field("alpha", &self.alpha)
            .field("a", &self.a)
            .field("t_end", &self.t_end)
            .field("linear_coeff", &self.linear_coeff)
            .field("initial_value", &self.initial_value)
            .field("big_n", &self.big_n)
            .finish_non_exhaustive()
    }
}

impl FdeProblem {
    pub fn validate(&self) -> Result<()> {
        validate_alpha(Kind::Derivative, self.alpha)?;
        if self.big_n < 2 {
            return Err(Error::InvalidParameter("N must be at least n+1 (n = 1)".into()));
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be positive, got {}", self.a)));
        }
        if !(self.t_end > self.a) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!("t_end must exceed a = {}, got {}", self.a, self.t_end)));
        }
        Ok(())
    }

    /// `D^α x + x = x^{1−α}/Γ(2−α) + ln t`, `x(1) = 0`, solved by `x = ln t`.
    pub fn log_benchmark(alpha: f64, big_n: usize, t_end: f64) -> Result<Self> {
        validate_alpha(Kind::Derivative, alpha)?;
        let scale = gamma(2.0 - alpha)?;
        let problem = Self {
            alpha,
            a: 1.0,
            t_end,
            linear_coeff: 1.0,
            rhs: Arc::new(move |t: f64, x: f64| x.powf(1.0 - alpha) / scale + t.ln()),
            initial_value: 0.0,
            big_n,
        };
        problem.validate()?;
        Ok(problem)
    }
}

/// Time, unknown and moments `V_2..V_N` (`v[0]` is `V_2`).
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub t: f64,
    pub x: f64,
    pub v: Vec<f64>,
}

impl AugmentedState {
    /// `x = x₀` and all moments zero at `t`.
    pub fn initial(problem: &FdeProblem, t: f64) -> Self {
        Self { t, x: problem.initial_value, v: vec![0.0; problem.big_n - 1] }
    }

    /// `V_p` for `p >= 2`.
    pub fn moment(&self, p: usize) -> f64 {
        self.v[p - 2]
    }
}

/// The augmented explicit system; state layout `[x, V_2, …, V_N]`.
#[derive(Debug, Clone)]
pub struct ReplacedSystem {
    problem: FdeProblem,
    coeffs: CoefficientSet,
}

pub fn replace_operator(problem: &FdeProblem) -> Result<ReplacedSystem> {
    problem.validate()?;
    let coeffs = CoefficientSet::new(Kind::Derivative, Side::Left, problem.alpha, 1, problem.big_n)?;
    Ok(ReplacedSystem { problem: problem.clone(), coeffs })
}

impl ReplacedSystem {
    pub fn problem(&self) -> &FdeProblem {
        &self.problem
    }

    fn log_distance(&self, t: f64) -> Result<f64> {
        if !(t > self.problem.a) {
            return Err(Error::SingularDenominator(t));
        }
        Ok((t / self.problem.a).ln())
    }

    // Σ_p B_p ℓ^{1−α−p} V_p
    fn moment_term(&self, ell: f64, v: &[f64]) -> f64 {
        let alpha = self.problem.alpha;
        self.coeffs
            .b_coeffs
            .iter()
            .zip(v)
            .enumerate()
            .map(|(j, (b, vp))| {
                let p = j + 2;
                b * ell.powf(1.0 - alpha - p as f64) * vp
            })
            .sum()
    }

    /// `ẋ` from the implicit equation.
    pub fn x_rate(&self, t: f64, x: f64, v: &[f64]) -> Result<f64> {
        let ell = self.log_distance(t)?;
        let alpha = self.problem.alpha;
        let [a0, a1] = [self.coeffs.a_coeffs[0], self.coeffs.a_coeffs[1]];
        let forcing = (self.problem.rhs)(t, x) - self.problem.linear_coeff * x;
        let numerator = forcing - a0 * ell.powf(-alpha) * x - self.moment_term(ell, v);
        Ok(numerator / (a1 * ell.powf(1.0 - alpha) * t))
    }

    /// `V̇_p = (p−1) ℓ^{p−2} x / t`.
    pub fn moment_rate(&self, p: usize, t: f64, x: f64) -> Result<f64> {
        let ell = self.log_distance(t)?;
        Ok((p - 1) as f64 * ell.powi(p as i32 - 2) * x / t)
    }

    /// Left side minus right side of the replaced equation for a candidate
    /// trajectory value `x`, slope `ẋ` and moments `v` at `t`.
    pub fn residual(&self, t: f64, x: f64, x_dot: f64, v: &[f64]) -> Result<f64> {
        let ell = self.log_distance(t)?;
        let alpha = self.problem.alpha;
        let [a0, a1] = [self.coeffs.a_coeffs[0], self.coeffs.a_coeffs[1]];
        let operator = a0 * ell.powf(-alpha) * x + a1 * ell.powf(1.0 - alpha) * t * x_dot + self.moment_term(ell, v);
        Ok(operator + self.problem.linear_coeff * x - (self.problem.rhs)(t, x))
    }
}

impl OdeSystem for ReplacedSystem {
    fn dim(&self) -> usize {
        self.problem.big_n
    }

    fn derivative(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let x = y[0];
        dy[0] = self.x_rate(t, x, &y[1..])?;
        for p in 2..=self.problem.big_n {
            dy[p - 1] = self.moment_rate(p, t, x)?;
        }
        Ok(())
    }
}

/// Integrates the replaced system from `start` with fixed-step RK4.
pub fn integrate(
    system: &ReplacedSystem,
    start: &AugmentedState,
    t_end: f64,
    steps: usize,
) -> Result<Vec<AugmentedState>> {
    if start.v.len() + 1 != system.dim() {
        return Err(Error::InvalidParameter(format!(
            "start state carries {} moments, system needs {}",
            start.v.len(),
            system.dim() - 1
        )));
    }
    let mut y0 = Vec::with_capacity(system.dim());
    y0.push(start.x);
    y0.extend_from_slice(&start.v);
    let sol = ode::integrate(system, start.t, &y0, t_end, steps)?;
    Ok(sol.t.into_iter().zip(sol.y).map(|(t, y)| AugmentedState { t, x: y[0], v: y[1..].to_vec() }).collect())
}

/// Solves `problem` on `[a(1+δ), t_end]` starting from `x = x₀` and zero
/// moments; the offset `δ > 0` steps over the singular start.
pub fn solve_fde(problem: &FdeProblem, steps: usize, start_offset: f64) -> Result<Vec<AugmentedState>> {
    if !(start_offset > 0.0) || !start_offset.is_finite() {
        return Err(Error::InvalidParameter(format!("start offset must be positive, got {start_offset}")));
    }
    let system = replace_operator(problem)?;
    let t0 = problem.a * (1.0 + start_offset);
    if !(t0 < problem.t_end) {
        return Err(Error::InvalidParameter(format!("start time {t0} is not before t_end = {}", problem.t_end)));
    }
    integrate(&system, &AugmentedState::initial(problem, t0), problem.t_end, steps)
}
