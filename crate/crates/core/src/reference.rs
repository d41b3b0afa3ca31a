//! Ground truth for the expansions: direct quadrature of the defining
//! integrals, the closed forms for the catalog functions, and the L²
//! distance between sampled curves.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::function::{Builtin, FunctionSpec};
use crate::operator::{validate_alpha, Interval, Kind, Side};
use crate::quadrature::{GaussLegendre, QuadratureConfig, SingularityLift};
use crate::special::{erf, gamma};

/// `∫_0^ℓ ξ^{e−1} f(ξ) dξ` for `e > 0`.
///
/// The power substitution `ξ = ℓ v^q` with `q = 1/e` (for `e < 1`) turns
/// the kernel into the constant measure `ℓ^e/e dv`; for `e > 1` the fixed
/// `q = 4` makes the integrand at least `C^4` at `v = 0`.
fn weakly_singular_integral<F: FnMut(f64) -> f64>(
    e: f64,
    ell: f64,
    cfg: &QuadratureConfig,
    rule: &GaussLegendre,
    mut f: F,
) -> f64 {
    match cfg.singularity_lift {
        SingularityLift::None => rule.integrate(0.0, ell, cfg.panels, |xi| xi.powf(e - 1.0) * f(xi)),
        lift => {
            let mut lifted = |v: f64| -> f64 {
                if e < 1.0 {
                    ell.powf(e) / e * f(ell * v.powf(1.0 / e))
                } else {
                    let q = 4.0;
                    ell.powf(e) * q * v.powf(q * e - 1.0) * f(ell * v.powi(4))
                }
            };
            if lift == SingularityLift::PowerSubstitutionBothEnds {
                // v = 1 − (1 − w)², clustering nodes at v = 1
                rule.integrate(0.0, 1.0, cfg.panels, |w| {
                    let c = 1.0 - w;
                    lifted(1.0 - c * c) * 2.0 * c
                })
            } else {
                rule.integrate(0.0, 1.0, cfg.panels, lifted)
            }
        }
    }
}

fn check_point(interval: Interval, side: Side, t: f64) -> Result<f64> {
    let ell = interval.log_distance(side, t)?;
    if ell == 0.0 {
        return Err(Error::Domain(format!("t = {t} coincides with the {side} anchor")));
    }
    Ok(ell)
}

/// Left: `(1/Γ(α)) ∫_a^t ln(t/τ)^{α−1} x(τ)/τ dτ`;
/// right: `(1/Γ(α)) ∫_t^b ln(τ/t)^{α−1} x(τ)/τ dτ`.
///
/// After `ξ = |ln(t/τ)|` the kernel is `ξ^{α−1}` on `[0, ℓ]`.
pub fn hadamard_integral_quad(
    x: &FunctionSpec,
    alpha: f64,
    side: Side,
    interval: Interval,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    validate_alpha(Kind::Integral, alpha)?;
    let ell = check_point(interval, side, t)?;
    let rule = cfg.rule()?;
    let dir = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let integral = weakly_singular_integral(alpha, ell, cfg, &rule, |xi| x.eval(t * (dir * xi).exp()));
    Ok(integral / gamma(alpha)?)
}

/// Derivative of order `α ∈ (0, 1)` through the boundary-term form
///
/// ```text
/// left:  x(a) ℓ^{−α}/Γ(1−α) + (1/Γ(1−α)) ∫_a^t ln(t/τ)^{−α} ẋ(τ) dτ
/// right: x(b) ℓ^{−α}/Γ(1−α) − (1/Γ(1−α)) ∫_t^b ln(τ/t)^{−α} ẋ(τ) dτ
/// ```
///
/// which needs `x ∈ C¹` up to the anchor.
pub fn hadamard_derivative_quad(
    x: &FunctionSpec,
    alpha: f64,
    side: Side,
    interval: Interval,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    validate_alpha(Kind::Derivative, alpha)?;
    let ell = check_point(interval, side, t)?;
    let rule = cfg.rule()?;
    let (dir, sign) = match side {
        Side::Left => (-1.0, 1.0),
        Side::Right => (1.0, -1.0),
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integral = weakly_singular_integral(1.0 - alpha, ell, cfg, &rule, |xi| {
        let tau = t * (dir * xi).exp();
        match x.deriv(1, tau) {
            Ok(d) => tau * d,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    });
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let g = gamma(1.0 - alpha)?;
    let boundary = x.eval(interval.anchor(side)) * ell.powf(-alpha) / g;
    Ok(boundary + sign * integral / g)
}

/// Derivative straight from the definition, `(±t d/dt) I^{1−α} y(t)`, with
/// the complementary integral by quadrature and the outer derivative by a
/// fourth-order central difference. Unlike [`hadamard_derivative_quad`] it
/// never differentiates `y`, so it also applies when `y` is only continuous
/// at the anchor (for instance `y = I^α x`).
pub fn hadamard_derivative_by_definition(
    y: &FunctionSpec,
    alpha: f64,
    side: Side,
    interval: Interval,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    validate_alpha(Kind::Derivative, alpha)?;
    if !(t > interval.a && t < interval.b) {
        return Err(Error::Domain(format!("t = {t} must lie strictly inside [{}, {}]", interval.a, interval.b)));
    }
    let h = 1e-3 * (t - interval.a).min(interval.b - t).min(t);
    let f = |s: f64| hadamard_integral_quad(y, 1.0 - alpha, side, interval, s, cfg);
    let d = (-f(t + 2.0 * h)? + 8.0 * f(t + h)? - 8.0 * f(t - h)? + f(t - 2.0 * h)?) / (12.0 * h);
    Ok(match side {
        Side::Left => t * d,
        Side::Right => -t * d,
    })
}

/// Closed forms for `α = 1/2`, `a = 1`, left operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    ILn,
    IOne,
    IT4,
    IT9,
    DLn,
    DOne,
    DT4,
    DT9,
}

/// `√π/2`, printed to ten digits as 0.8862269255.
pub const HALF_SQRT_PI: f64 = 0.886_226_925_452_758;
/// `√π/3`, printed to ten digits as 0.5908179503.
pub const THIRD_SQRT_PI: f64 = 0.590_817_950_301_838_7;

impl ClosedForm {
    pub const ALL: [ClosedForm; 8] = [
        ClosedForm::ILn,
        ClosedForm::IOne,
        ClosedForm::IT4,
        ClosedForm::IT9,
        ClosedForm::DLn,
        ClosedForm::DOne,
        ClosedForm::DT4,
        ClosedForm::DT9,
    ];

    pub fn kind(self) -> Kind {
        match self {
            Self::ILn | Self::IOne | Self::IT4 | Self::IT9 => Kind::Integral,
            _ => Kind::Derivative,
        }
    }

    pub fn function(self) -> FunctionSpec {
        match self {
            Self::ILn | Self::DLn => FunctionSpec::ln(),
            Self::IOne | Self::DOne => FunctionSpec::one(),
            Self::IT4 | Self::DT4 => FunctionSpec::pow(4),
            Self::IT9 | Self::DT9 => FunctionSpec::pow(9),
        }
    }

    /// The closed form for `kind` applied to a builtin, when one exists for
    /// the given order, side and interval.
    pub fn lookup(kind: Kind, side: Side, alpha: f64, interval: Interval, x: &FunctionSpec) -> Option<Self> {
        if alpha != 0.5 || interval.a != 1.0 || side != Side::Left {
            return None;
        }
        let b = Builtin::parse(x.id())?;
        Some(match (kind, b) {
            (Kind::Integral, Builtin::Ln) => Self::ILn,
            (Kind::Integral, Builtin::One) => Self::IOne,
            (Kind::Integral, Builtin::Pow(4)) => Self::IT4,
            (Kind::Integral, Builtin::Pow(9)) => Self::IT9,
            (Kind::Derivative, Builtin::Ln) => Self::DLn,
            (Kind::Derivative, Builtin::One) => Self::DOne,
            (Kind::Derivative, Builtin::Pow(4)) => Self::DT4,
            (Kind::Derivative, Builtin::Pow(9)) => Self::DT9,
            _ => return None,
        })
    }
}

/// Exact operator value for a catalog entry at `t > 1`.
///
/// The power-function entries use
/// `∫_0^L ξ^{−1/2} e^{−kξ} dξ = √(π/k) erf(√(kL))`.
pub fn closed_form(id: ClosedForm, t: f64) -> Result<f64> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::Domain(format!("closed forms need t > 1, got {t}")));
    }
    let l = t.ln();
    let g05 = PI.sqrt();
    let singular = 1.0 / (g05 * l.sqrt());
    Ok(match id {
        ClosedForm::ILn => l.powf(1.5) / gamma(2.5)?,
        ClosedForm::IOne => l.sqrt() / gamma(1.5)?,
        ClosedForm::IT4 => HALF_SQRT_PI / g05 * t.powi(4) * erf(2.0 * l.sqrt()),
        ClosedForm::IT9 => THIRD_SQRT_PI / g05 * t.powi(9) * erf(3.0 * l.sqrt()),
        ClosedForm::DLn => l.sqrt() / gamma(1.5)?,
        ClosedForm::DOne => singular,
        ClosedForm::DT4 => singular + HALF_SQRT_PI / g05 * 4.0 * t.powi(4) * erf(2.0 * l.sqrt()),
        ClosedForm::DT9 => singular + THIRD_SQRT_PI / g05 * 9.0 * t.powi(9) * erf(3.0 * l.sqrt()),
    })
}

/// `√(∫ (f − g)² dt)` over the grid span, composite trapezoid rule.
pub fn dist_metric(grid: &[f64], f: &[f64], g: &[f64]) -> Result<f64> {
    if grid.len() != f.len() || grid.len() != g.len() {
        return Err(Error::GridMismatch(format!(
            "grid has {} points, series have {} and {}",
            grid.len(),
            f.len(),
            g.len()
        )));
    }
    if grid.len() < 2 {
        return Err(Error::GridMismatch("dist needs at least two points".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::GridOrder(i + 1));
    }
    let sq: Vec<f64> = f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).collect();
    let mut sum = 0.0;
    for i in 1..grid.len() {
        sum += 0.5 * (sq[i] + sq[i - 1]) * (grid[i] - grid[i - 1]);
    }
    Ok(sum.sqrt())
}
