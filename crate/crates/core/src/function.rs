//! Evaluatable scalar functions with access to integer-order derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Derivative order served by finite differences.
pub const FD_MAX_ORDER: usize = 6;
/// Derivative order served by the analytic builtins.
pub const ANALYTIC_MAX_ORDER: usize = 25;

/// The test functions with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Zero,
    One,
    Ln,
    Pow(u32),
}

impl Builtin {
    pub fn parse(id: &str) -> Option<Self> {
        match id {
            "zero" => Some(Self::Zero),
            "one" => Some(Self::One),
            "ln" => Some(Self::Ln),
            "pow4" => Some(Self::Pow(4)),
            "pow9" => Some(Self::Pow(9)),
            _ => None,
        }
    }

    pub fn id(&self) -> String {
        match self {
            Self::Zero => "zero".into(),
            Self::One => "one".into(),
            Self::Ln => "ln".into(),
            Self::Pow(m) => format!("pow{m}"),
        }
    }

    fn deriv(&self, k: usize, t: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::One => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Ln => {
                if k == 0 {
                    t.ln()
                } else {
                    // (-1)^{k-1} (k-1)! / t^k
                    let mut v = 1.0 / t;
                    for j in 1..k {
                        v *= -(j as f64) / t;
                    }
                    v
                }
            }
            Self::Pow(m) => {
                let m = m as usize;
                if k > m {
                    return 0.0;
                }
                let mut c = 1.0;
                for j in 0..k {
                    c *= (m - j) as f64;
                }
                c * t.powi((m - k) as i32)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivMode {
    Analytic,
    /// Central differences; `h` is the first-order step floor.
    CentralFd {
        h: f64,
    },
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Builtin(Builtin),
    Closure(Evaluator),
    Table(Arc<CubicSpline>),
}

/// A function `x(t)` with derivatives `x^{(k)}(t)` for `k <= max_order`.
///
/// Builtins differentiate analytically; closures and sampled tables use
/// central finite differences of `eval`. The first-order step is
/// `max(h, h·|t|)`; higher orders use the iterated central stencil with the
/// step `eps^{1/(k+2)}·max(1, |t|)`, which balances truncation against
/// rounding. Accuracy degrades with the order (roughly `1e-8` at `k = 2`,
/// `1e-6` at `k = 4`, relative to the scale of `x`).
#[derive(Clone)]
pub struct FunctionSpec {
    id: String,
    repr: Repr,
    max_order: usize,
    mode: DerivMode,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("id", &self.id)
            .field("max_order", &self.max_order)
            .field("mode", &self.mode)
            .finish()
    }
}

impl FunctionSpec {
    pub fn builtin(b: Builtin) -> Self {
        Self { id: b.id(), repr: Repr::Builtin(b), max_order: ANALYTIC_MAX_ORDER, mode: DerivMode::Analytic }
    }

    /// Looks up `zero`, `one`, `ln`, `pow4` or `pow9`.
    pub fn by_id(id: &str) -> Result<Self> {
        Builtin::parse(id)
            .map(Self::builtin)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown function id '{id}'")))
    }

    pub fn zero() -> Self {
        Self::builtin(Builtin::Zero)
    }

    pub fn one() -> Self {
        Self::builtin(Builtin::One)
    }

    pub fn ln() -> Self {
        Self::builtin(Builtin::Ln)
    }

    pub fn pow(m: u32) -> Self {
        Self::builtin(Builtin::Pow(m))
    }

    /// Arbitrary evaluator; derivatives by finite differences.
    pub fn from_fn<F>(id: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            repr: Repr::Closure(Arc::new(f)),
            max_order: FD_MAX_ORDER,
            mode: DerivMode::CentralFd { h: 1e-5 },
        }
    }

    /// Natural cubic spline through sampled `(t, x)` pairs; derivatives by
    /// finite differences of the spline.
    pub fn from_samples(id: impl Into<String>, t: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::new(t, x)?;
        Ok(Self {
            id: id.into(),
            repr: Repr::Table(Arc::new(spline)),
            max_order: FD_MAX_ORDER,
            mode: DerivMode::CentralFd { h: 1e-5 },
        })
    }

    /// Same evaluator, derivatives forced through finite differences.
    pub fn with_finite_differences(mut self, h: f64) -> Self {
        self.mode = DerivMode::CentralFd { h };
        self.max_order = FD_MAX_ORDER;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn mode(&self) -> DerivMode {
        self.mode
    }

    pub fn is_analytic(&self) -> bool {
        self.mode == DerivMode::Analytic
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Builtin(b) => b.deriv(0, t),
            Repr::Closure(f) => f(t),
            Repr::Table(s) => s.eval(t),
        }
    }

    pub fn deriv(&self, k: usize, t: f64) -> Result<f64> {
        if k > self.max_order {
            return Err(Error::DerivativeUnavailable { order: k, max_order: self.max_order });
        }
        if k == 0 {
            return Ok(self.eval(t));
        }
        match (self.mode, &self.repr) {
            (DerivMode::Analytic, Repr::Builtin(b)) => Ok(b.deriv(k, t)),
            (DerivMode::CentralFd { h }, _) => Ok(self.central_difference(k, t, h)),
            (DerivMode::Analytic, _) => unreachable!("only builtins are analytic"),
        }
    }

    fn central_difference(&self, k: usize, t: f64, h_floor: f64) -> f64 {
        let scale = t.abs().max(1.0);
        if k == 1 {
            let h = h_floor.max(h_floor * t.abs());
            return (self.eval(t + h) - self.eval(t - h)) / (2.0 * h);
        }
        let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * scale;
        // Σ_j (-1)^j C(k, j) x(t + (k/2 - j) h) / h^k
        let mut binom = 1.0;
        let mut sum = 0.0;
        for j in 0..=k {
            let offset = (0.5 * k as f64 - j as f64) * h;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom * self.eval(t + offset);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        sum / h.powi(k as i32)
    }
}

/// Natural cubic spline; evaluation outside the knots extends the end cubics.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    t: Vec<f64>,
    x: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(t: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if t.len() != x.len() {
            return Err(Error::GridMismatch(format!("{} abscissae vs {} values", t.len(), x.len())));
        }
        if t.len() < 2 {
            return Err(Error::Input("a sampled function needs at least two points".into()));
        }
        if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::GridOrder(i + 1));
        }
        if t.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::Input("sampled values must be finite".into()));
        }
        let n = t.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the second derivatives at interior knots.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 0..k {
                let h0 = t[i + 1] - t[i];
                let h1 = t[i + 2] - t[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((x[i + 2] - x[i + 1]) / h1 - (x[i + 1] - x[i]) / h0);
            }
            for i in 1..k {
                let lower = t[i + 1] - t[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { t, x, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    pub fn eval(&self, s: f64) -> f64 {
        let n = self.t.len();
        let i = match self.t.partition_point(|&v| v <= s) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - s) / h;
        let b = (s - self.t[i]) / h;
        a * self.x[i]
            + b * self.x[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}
