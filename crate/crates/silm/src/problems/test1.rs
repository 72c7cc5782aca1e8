//! Reaction-diffusion system with a manufactured exact solution.
//!
//! On `[0,2π)²` with periodic boundaries, the two-component system
//!
//! ```text
//! ∂t ω₁ = Δω₁ - α(t)ω₁² + (9/2)ω₁ + ω₂ + f(t)
//! ∂t ω₂ = Δω₂ + (7/2)ω₂
//! ```
//!
//! with `α(t) = 2e^{t/2}` and `f(t) = -2e^{-t/2}` has the exact solution
//! `ω₁ = e^{-t/2}(1 + cos x)`, `ω₂ = e^{-t/2}cos 2x`. The split operator
//! places the quadratic term's first factor in the non-stiff slot:
//!
//! ```text
//! H(t,u,v) = ( Δv₁ - α(t)u₁v₁ + (9/2)v₁ + v₂ + f(t),  Δv₂ + (7/2)v₂ )
//! ```
//!
//! so `H` is linear in `v` with a block-triangular coupling. The diffusion
//! uses the sixth-order central stencil; substituting the exact solution
//! into the semi-discrete operator leaves only the `O(Δx⁶)` stencil error,
//! which is this module's master correctness gate (it also pins the 7/2
//! coefficient of the second equation: no other value keeps the residual at
//! stencil level).

use super::stencil::laplacian_into;
use super::PeriodicGrid2D;
use crate::integrator::SplitProblem;
use crate::{Error, Result};

const DIFFUSION_ORDER: usize = 6;

/// See the module docs; build with [`test1_problem`].
#[derive(Debug, Clone)]
pub struct Test1Problem {
    grid: PeriodicGrid2D,
}

/// Requires a square grid on `[0,2π)²`.
pub fn test1_problem(grid: &PeriodicGrid2D) -> Result<Test1Problem> {
    let two_pi = 2.0 * std::f64::consts::PI;
    if !grid.is_square() {
        return Err(Error::Grid("test1 needs a square grid with Δx = Δy".into()));
    }
    if grid.x0 != 0.0 || grid.y0 != 0.0 || (grid.lx - two_pi).abs() > 1e-12 {
        return Err(Error::Grid("test1 is posed on [0,2π)²".into()));
    }
    Ok(Test1Problem { grid: *grid })
}

impl Test1Problem {
    pub fn grid(&self) -> &PeriodicGrid2D {
        &self.grid
    }

    fn alpha(t: f64) -> f64 {
        2.0 * (0.5 * t).exp()
    }

    fn forcing(t: f64) -> f64 {
        -2.0 * (-0.5 * t).exp()
    }

    /// Exact solution at time `t` (both components).
    pub fn exact(&self, t: f64, out: &mut [f64]) {
        let n = self.grid.nodes();
        let decay = (-0.5 * t).exp();
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let x = self.grid.x(i);
                let idx = j * self.grid.nx + i;
                out[idx] = decay * (1.0 + x.cos());
                out[n + idx] = decay * (2.0 * x).cos();
            }
        }
    }

    pub fn initial(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.dim()];
        self.exact(0.0, &mut u);
        u
    }

    /// Analytic time derivative of the exact solution: `-ω/2`.
    pub fn exact_time_derivative(&self, t: f64, out: &mut [f64]) {
        self.exact(t, out);
        for v in out.iter_mut() {
            *v *= -0.5;
        }
    }
}

impl SplitProblem for Test1Problem {
    fn dim(&self) -> usize {
        2 * self.grid.nodes()
    }

    fn eval_h(&self, t: f64, u: &[f64], v: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let (v1, v2) = v.split_at(n);
        let u1 = &u[..n];
        let (o1, o2) = out.split_at_mut(n);
        laplacian_into(&self.grid, DIFFUSION_ORDER, v1, o1).expect("grid checked at construction");
        laplacian_into(&self.grid, DIFFUSION_ORDER, v2, o2).expect("grid checked at construction");
        let alpha = Self::alpha(t);
        let f = Self::forcing(t);
        for i in 0..n {
            o1[i] += -alpha * u1[i] * v1[i] + 4.5 * v1[i] + v2[i] + f;
            o2[i] += 3.5 * v2[i];
        }
    }

    fn is_linear_in_v(&self) -> bool {
        true
    }

    fn eval_k(&self, t: f64, _u: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let f = Self::forcing(t);
        out[..n].fill(f);
        out[n..].fill(0.0);
    }

    fn apply_a(&self, t: f64, u: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let (w1, w2) = w.split_at(n);
        let u1 = &u[..n];
        let (o1, o2) = out.split_at_mut(n);
        laplacian_into(&self.grid, DIFFUSION_ORDER, w1, o1).expect("grid checked at construction");
        laplacian_into(&self.grid, DIFFUSION_ORDER, w2, o2).expect("grid checked at construction");
        let alpha = Self::alpha(t);
        for i in 0..n {
            o1[i] += -alpha * u1[i] * w1[i] + 4.5 * w1[i] + w2[i];
            o2[i] += 3.5 * w2[i];
        }
    }

    fn diag_a(&self, t: f64, u: &[f64], out: &mut [f64]) -> bool {
        let n = self.grid.nodes();
        let lap = super::stencil::laplacian_diag(&self.grid, DIFFUSION_ORDER).expect("order supported");
        let alpha = Self::alpha(t);
        for i in 0..n {
            out[i] = lap - alpha * u[i] + 4.5;
            out[n + i] = lap + 3.5;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::linear_structure_mismatch;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> PeriodicGrid2D {
        PeriodicGrid2D::square(n, 0.0, 2.0 * std::f64::consts::PI).unwrap()
    }

    /// Max residual of the exact solution in the semi-discrete operator.
    fn residual(n: usize, t: f64) -> f64 {
        let g = grid(n);
        let p = test1_problem(&g).unwrap();
        let mut w = vec![0.0; p.dim()];
        p.exact(t, &mut w);
        let mut dwdt = vec![0.0; p.dim()];
        p.exact_time_derivative(t, &mut dwdt);
        let mut h = vec![0.0; p.dim()];
        p.eval_h(t, &w, &w, &mut h);
        dwdt.iter().zip(&h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_residual_is_stencil_order() {
        for t in [0.0, 1.0] {
            let r32 = residual(32, t);
            let r64 = residual(64, t);
            let slope = (r32 / r64).log2();
            assert!((slope - 6.0).abs() < 0.3, "t={t}: slope {slope:.2}");
            assert!(r64 < 1e-5, "t={t}: residual {r64:.3e}");
        }
    }

    #[test]
    fn omega2_initial_is_cos_2x_independent_of_y() {
        let g = grid(16);
        let p = test1_problem(&g).unwrap();
        let u0 = p.initial();
        let n = g.nodes();
        for j in 0..16 {
            for i in 0..16 {
                let want = (2.0 * g.x(i)).cos();
                assert!((u0[n + j * 16 + i] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn linear_structure_probe() {
        let g = grid(16);
        let p = test1_problem(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let probes: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
            .map(|_| {
                let u: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let v: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (u, v)
            })
            .collect();
        assert!(linear_structure_mismatch(&p, 0.7, &probes) < 1e-12);
    }

    #[test]
    fn rejects_wrong_domain() {
        let g = PeriodicGrid2D::square(16, 0.0, 1.0).unwrap();
        assert!(test1_problem(&g).is_err());
        let g = PeriodicGrid2D::new(16, 32, 0.0, 0.0, 2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI).unwrap();
        assert!(test1_problem(&g).is_err());
    }

    #[test]
    fn diagonal_matches_apply_a_on_basis_vectors() {
        let g = grid(8);
        let p = test1_problem(&g).unwrap();
        let u = p.initial();
        let mut diag = vec![0.0; p.dim()];
        assert!(p.diag_a(0.3, &u, &mut diag));
        let mut e = vec![0.0; p.dim()];
        let mut col = vec![0.0; p.dim()];
        for idx in [0usize, 5, 70, 64 + 3] {
            e.fill(0.0);
            e[idx] = 1.0;
            p.apply_a(0.3, &u, &e, &mut col);
            assert!((col[idx] - diag[idx]).abs() < 1e-11, "diag mismatch at {idx}");
        }
    }
}
