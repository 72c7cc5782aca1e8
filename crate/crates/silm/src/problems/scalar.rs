//! Scalar split prototype `u' = iλu + μv`, as a 2-dimensional real system.
//!
//! The stiff slot carries the real rate μ, the explicit slot the rotation
//! iλ; the exact solution is `u(t) = e^{(μ+iλ)t} u₀`. This is the problem
//! behind the convergence-order checks: errors under Δt-halving must decay
//! at each scheme's declared order.

use crate::integrator::SplitProblem;

/// State layout: `[Re u, Im u]`, initial value 1 + 0i.
#[derive(Debug, Clone, Copy)]
pub struct DahlquistProblem {
    pub lambda: f64,
    pub mu: f64,
}

impl DahlquistProblem {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self { lambda, mu }
    }

    pub fn initial(&self) -> Vec<f64> {
        vec![1.0, 0.0]
    }

    /// `e^{(μ+iλ)t}` from the unit initial value.
    pub fn exact(&self, t: f64, out: &mut [f64]) {
        let r = (self.mu * t).exp();
        out[0] = r * (self.lambda * t).cos();
        out[1] = r * (self.lambda * t).sin();
    }

    /// Modulus of the error against the exact solution.
    pub fn error(&self, t: f64, u: &[f64]) -> f64 {
        let mut ex = [0.0; 2];
        self.exact(t, &mut ex);
        ((u[0] - ex[0]).powi(2) + (u[1] - ex[1]).powi(2)).sqrt()
    }
}

impl SplitProblem for DahlquistProblem {
    fn dim(&self) -> usize {
        2
    }

    fn eval_h(&self, _t: f64, u: &[f64], v: &[f64], out: &mut [f64]) {
        // iλu + μv in real coordinates.
        out[0] = -self.lambda * u[1] + self.mu * v[0];
        out[1] = self.lambda * u[0] + self.mu * v[1];
    }

    fn is_linear_in_v(&self) -> bool {
        true
    }

    fn eval_k(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = -self.lambda * u[1];
        out[1] = self.lambda * u[0];
    }

    fn apply_a(&self, _t: f64, _u: &[f64], w: &[f64], out: &mut [f64]) {
        out[0] = self.mu * w[0];
        out[1] = self.mu * w[1];
    }

    fn shifted_solve(&self, _t: f64, _u: &[f64], gamma: f64, rhs: &[f64], out: &mut [f64]) -> bool {
        let d = 1.0 - gamma * self.mu;
        out[0] = rhs[0] / d;
        out[1] = rhs[1] / d;
        true
    }

    fn diag_a(&self, _t: f64, _u: &[f64], out: &mut [f64]) -> bool {
        out.fill(self.mu);
        true
    }
}
