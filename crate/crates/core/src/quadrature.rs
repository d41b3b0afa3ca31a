//! Composite Gauss–Legendre quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Upper limit on `panels * nodes_per_panel`.
pub const MAX_QUADRATURE_NODES: usize = 10_000_000;

/// How the reference operators treat the weakly singular kernel at the
/// evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityLift {
    /// Integrate the kernel as written.
    None,
    /// Substitute `u = ξ^β` so the `ξ^{β-1}` kernel becomes the constant measure.
    PowerSubstitution,
    /// Power substitution, plus quadratic node clustering at the anchor end.
    /// Needed when the integrand itself behaves like a root of `ln(τ/a)`,
    /// e.g. when it is the output of another fractional integral.
    PowerSubstitutionBothEnds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub singularity_lift: SingularityLift,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { panels: 64, nodes_per_panel: 8, singularity_lift: SingularityLift::PowerSubstitution }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.nodes_per_panel == 0 {
            return Err(Error::InvalidParameter("quadrature needs at least one panel and one node".into()));
        }
        let requested = self.panels.saturating_mul(self.nodes_per_panel);
        if requested > MAX_QUADRATURE_NODES {
            return Err(Error::ResourceGuard { requested, limit: MAX_QUADRATURE_NODES });
        }
        Ok(())
    }

    pub fn with_panels(self, panels: usize) -> Self {
        Self { panels, ..self }
    }

    pub fn rule(&self) -> Result<GaussLegendre> {
        self.validate()?;
        Ok(GaussLegendre::new(self.nodes_per_panel))
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_order`, found by Newton iteration from the
    /// Tricomi initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        let nf = order as f64;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Calls `visit(x, w)` for every node of the composite rule on `[lo, hi]`
    /// split into `panels` equal panels; `w` already includes the Jacobian.
    pub fn for_each_node<F: FnMut(f64, f64)>(&self, lo: f64, hi: f64, panels: usize, mut visit: F) {
        let width = (hi - lo) / panels as f64;
        let half = 0.5 * width;
        for k in 0..panels {
            let mid = lo + (k as f64 + 0.5) * width;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                visit(mid + half * x, half * w);
            }
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, panels: usize, mut f: F) -> f64 {
        let mut total = 0.0;
        let width = (hi - lo) / panels as f64;
        let half = 0.5 * width;
        for k in 0..panels {
            let mid = lo + (k as f64 + 0.5) * width;
            let mut panel = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel += w * f(mid + half * x);
            }
            total += half * panel;
        }
        total
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let p = if order == 0 { 1.0 } else { p1 };
    let d = if order == 0 { 0.0 } else { n * (x * p1 - p0) / (x * x - 1.0) };
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for order in 1..=20 {
            let rule = GaussLegendre::new(order);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "order {order}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for order in 1..=10 {
            let rule = GaussLegendre::new(order);
            for deg in 0..2 * order {
                let got = rule.integrate(0.0, 1.0, 1, |x| x.powi(deg as i32));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() < 1e-14, "order {order} degree {deg}");
            }
        }
    }

    #[test]
    fn composite_rule_on_smooth_function() {
        let rule = GaussLegendre::new(8);
        let got = rule.integrate(0.0, PI, 16, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
    }

    #[test]
    fn resource_guard() {
        let cfg = QuadratureConfig { panels: 10_000_000, nodes_per_panel: 2, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::ResourceGuard { .. })));
        let cfg = QuadratureConfig { panels: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter(_))));
    }
}
