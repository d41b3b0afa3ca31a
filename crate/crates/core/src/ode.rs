//! Fixed-step classical Runge–Kutta integration of first-order systems.

use crate::error::{Error, Result};

/// Right-hand side `ẏ = f(t, y)` of a first-order system.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn derivative(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// Solution samples: `y[j]` is the state at `t[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl Solution {
    /// Values of component `k` across all samples.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.y.iter().map(|s| s[k]).collect()
    }

    pub fn last(&self) -> &[f64] {
        self.y.last().expect("solutions hold at least the initial state")
    }
}

/// Integrates from `(t0, y0)` to `t_end` with `steps` RK4 steps; the sample
/// times are `t0 + j·h` with the last one pinned to `t_end`.
pub fn integrate<S: OdeSystem + ?Sized>(sys: &S, t0: f64, y0: &[f64], t_end: f64, steps: usize) -> Result<Solution> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("need t0 < t_end, got {t0} and {t_end}")));
    }
    let dim = sys.dim();
    if y0.len() != dim {
        return Err(Error::InvalidParameter(format!("initial state has {} entries, system has {dim}", y0.len())));
    }
    let h = (t_end - t0) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(y0.to_vec());

    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    for j in 0..steps {
        let t = t0 + j as f64 * h;
        sys.derivative(t, &y, &mut k1)?;
        for d in 0..dim {
            tmp[d] = y[d] + 0.5 * h * k1[d];
        }
        sys.derivative(t + 0.5 * h, &tmp, &mut k2)?;
        for d in 0..dim {
            tmp[d] = y[d] + 0.5 * h * k2[d];
        }
        sys.derivative(t + 0.5 * h, &tmp, &mut k3)?;
        for d in 0..dim {
            tmp[d] = y[d] + h * k3[d];
        }
        sys.derivative(t + h, &tmp, &mut k4)?;
        for d in 0..dim {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(t + h));
        }
        times.push(if j + 1 == steps { t_end } else { t0 + (j + 1) as f64 * h });
        states.push(y.clone());
    }
    Ok(Solution { t: times, y: states })
}
