//! Which fractional operator is being evaluated.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Integral,
    Derivative,
}

/// Left operators are anchored at `a` and integrate over `[a, t]`; right
/// operators are anchored at `b` and integrate over `[t, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Integral => "integral",
            Kind::Derivative => "derivative",
        })
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integral" => Ok(Kind::Integral),
            "derivative" => Ok(Kind::Derivative),
            _ => Err(Error::InvalidParameter(format!("unknown kind '{s}'"))),
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(Error::InvalidParameter(format!("unknown side '{s}'"))),
        }
    }
}

/// `[a, b]` with `0 < a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= a {
            return Err(Error::InvalidParameter(format!("interval requires 0 < a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    pub fn anchor(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    /// `ln(t/a)` on the left, `ln(b/t)` on the right. Errors when `t` lies
    /// outside `[a, b]`.
    pub fn log_distance(&self, side: Side, t: f64) -> Result<f64> {
        if !(t >= self.a && t <= self.b) {
            return Err(Error::Domain(format!("t = {t} outside [{}, {}]", self.a, self.b)));
        }
        Ok(match side {
            Side::Left => (t / self.a).ln(),
            Side::Right => (self.b / t).ln(),
        })
    }

    /// The sub-interval between the anchor and `t`.
    pub fn span_to(&self, side: Side, t: f64) -> (f64, f64) {
        match side {
            Side::Left => (self.a, t),
            Side::Right => (t, self.b),
        }
    }
}

/// Checks the order `alpha` for the operator kind: integrals take any
/// non-integer `alpha > 0`, derivatives only `0 < alpha < 1`.
pub fn validate_alpha(kind: Kind, alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if alpha == alpha.round() {
        return Err(Error::InvalidParameter("alpha must be non-integer".into()));
    }
    if kind == Kind::Derivative && alpha >= 1.0 {
        return Err(Error::InvalidParameter(format!("derivative order must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Checks the expansion depth `n` and truncation order `big_n`.
pub fn validate_orders(kind: Kind, n: usize, big_n: usize) -> Result<()> {
    if kind == Kind::Derivative && n == 0 {
        return Err(Error::InvalidParameter("derivative expansions need n >= 1".into()));
    }
    if big_n < n + 1 {
        return Err(Error::InvalidParameter("N must be at least n+1".into()));
    }
    Ok(())
}

/// A fractional operator of order `alpha` on `interval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub kind: Kind,
    pub side: Side,
    pub alpha: f64,
    pub interval: Interval,
}

impl OperatorSpec {
    pub fn new(kind: Kind, side: Side, alpha: f64, interval: Interval) -> Result<Self> {
        validate_alpha(kind, alpha)?;
        Ok(Self { kind, side, alpha, interval })
    }
}
