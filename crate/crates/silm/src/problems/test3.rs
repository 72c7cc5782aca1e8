//! Nonlinear convection-diffusion with a translating Gaussian solution.
//!
//! The model transports a density by the self-consistent drift
//! `E - μ∇log ω` while diffusing with coefficient μ:
//!
//! ```text
//! ∂t ω + (E - μ∇log ω)·∇ω = μΔω,   ω(0,x) = e^{-‖x‖²/2}
//! ```
//!
//! whose exact solution is the drifting, spreading Gaussian
//!
//! ```text
//! ω(t,x) = (4μt+1)^{-1/2} exp(-‖x - Et‖² / (8μt+2))
//! ```
//!
//! (substitution fixes the drift sign: the log-gradient term must oppose E
//! for this profile to satisfy the equation — the quadratic-in-‖x-Et‖ terms
//! then balance with h' = 8μ and the amplitude with g'/g = -4μ/h).
//!
//! The whole right-hand side is stiff, so everything is implicit in `v`:
//!
//! ```text
//! H(t,u,v) = -(E - μ∇log ũ)·∇v + μΔv,   ũ = max(u, u_floor)
//! ```
//!
//! with `K ≡ 0` and the floor guarding `log 0`. Although posed on the whole
//! plane, the solution is below `e^{-40}` on the boundary of `[-10,10)²` for
//! `t <= 1`, so a periodic closure of the truncated domain is used.
//! Fourth-order central differences for both the gradient and the Laplacian.

use super::stencil::{apply_stencil, laplacian_into, Axis, DerivKind};
use super::PeriodicGrid2D;
use crate::integrator::SplitProblem;
use crate::{Error, Result};

const STENCIL_ORDER: usize = 4;

/// See the module docs; build with [`test3_problem`].
#[derive(Debug, Clone)]
pub struct Test3Problem {
    grid: PeriodicGrid2D,
    pub drift: [f64; 2],
    pub mu: f64,
    pub u_floor: f64,
}

/// Requires a square grid covering `[-10,10)²`; E = (1,1), μ = 0.5.
pub fn test3_problem(grid: &PeriodicGrid2D) -> Result<Test3Problem> {
    if !grid.is_square() {
        return Err(Error::Grid("test3 needs a square grid with Δx = Δy".into()));
    }
    if grid.x0 != -10.0 || grid.y0 != -10.0 || (grid.lx - 20.0).abs() > 1e-12 {
        return Err(Error::Grid("test3 is posed on [-10,10)²".into()));
    }
    Ok(Test3Problem { grid: *grid, drift: [1.0, 1.0], mu: 0.5, u_floor: 1e-300 })
}

impl Test3Problem {
    pub fn grid(&self) -> &PeriodicGrid2D {
        &self.grid
    }

    /// Exact solution at time `t`.
    pub fn exact(&self, t: f64, out: &mut [f64]) {
        let amp = 1.0 / (4.0 * self.mu * t + 1.0).sqrt();
        let width = 8.0 * self.mu * t + 2.0;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let rx = self.grid.x(i) - self.drift[0] * t;
                let ry = self.grid.y(j) - self.drift[1] * t;
                out[j * self.grid.nx + i] = amp * (-(rx * rx + ry * ry) / width).exp();
            }
        }
    }

    pub fn initial(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.dim()];
        self.exact(0.0, &mut u);
        u
    }

    /// Analytic `∂t ω` of the exact solution.
    pub fn exact_time_derivative(&self, t: f64, out: &mut [f64]) {
        let width = 8.0 * self.mu * t + 2.0;
        let dwidth = 8.0 * self.mu;
        let mut w = vec![0.0; self.dim()];
        self.exact(t, &mut w);
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let rx = self.grid.x(i) - self.drift[0] * t;
                let ry = self.grid.y(j) - self.drift[1] * t;
                let rho2 = rx * rx + ry * ry;
                let r_dot_e = rx * self.drift[0] + ry * self.drift[1];
                let idx = j * self.grid.nx + i;
                out[idx] = w[idx]
                    * (-4.0 * self.mu / width + rho2 * dwidth / (width * width)
                        + 2.0 * r_dot_e / width);
            }
        }
    }
}

impl SplitProblem for Test3Problem {
    fn dim(&self) -> usize {
        self.grid.nodes()
    }

    fn eval_h(&self, t: f64, u: &[f64], v: &[f64], out: &mut [f64]) {
        self.apply_a(t, u, v, out)
    }

    fn is_linear_in_v(&self) -> bool {
        true
    }

    fn eval_k(&self, _t: f64, _u: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn apply_a(&self, _t: f64, u: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let mut logu = vec![0.0; n];
        for i in 0..n {
            logu[i] = u[i].max(self.u_floor).ln();
        }
        let mut gx = vec![0.0; n];
        let mut gy = vec![0.0; n];
        apply_stencil(&self.grid, Axis::X, DerivKind::First, STENCIL_ORDER, &logu, &mut gx)
            .expect("grid checked at construction");
        apply_stencil(&self.grid, Axis::Y, DerivKind::First, STENCIL_ORDER, &logu, &mut gy)
            .expect("grid checked at construction");
        let mut dxw = vec![0.0; n];
        let mut dyw = vec![0.0; n];
        apply_stencil(&self.grid, Axis::X, DerivKind::First, STENCIL_ORDER, w, &mut dxw)
            .expect("grid checked at construction");
        apply_stencil(&self.grid, Axis::Y, DerivKind::First, STENCIL_ORDER, w, &mut dyw)
            .expect("grid checked at construction");
        laplacian_into(&self.grid, STENCIL_ORDER, w, out).expect("grid checked at construction");
        for i in 0..n {
            let vel_x = self.drift[0] - self.mu * gx[i];
            let vel_y = self.drift[1] - self.mu * gy[i];
            out[i] = self.mu * out[i] - vel_x * dxw[i] - vel_y * dyw[i];
        }
    }

    fn diag_a(&self, _t: f64, _u: &[f64], out: &mut [f64]) -> bool {
        // The first-derivative stencil has zero center weight, so only the
        // Laplacian contributes to the diagonal.
        let lap = super::stencil::laplacian_diag(&self.grid, STENCIL_ORDER).expect("order supported");
        out.fill(self.mu * lap);
        true
    }
}
