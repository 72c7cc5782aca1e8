//! Gray-Scott reaction-diffusion system.
//!
//! On `[-1,1)²` with periodic boundaries,
//!
//! ```text
//! ∂t ω₁ = σ₁Δω₁ - ω₁ω₂² + γ(1 - ω₁)
//! ∂t ω₂ = σ₂Δω₂ + ω₁ω₂² - (γ+κ)ω₂
//! ```
//!
//! The diffusion coefficients are tiny compared to the reaction rates, so
//! the split treats diffusion explicitly and the reaction implicitly, linear
//! in `v` (the quadratic term keeps its `ω₂²` factor in the non-stiff slot):
//!
//! ```text
//! H(t,u,v) = ( σ₁Δu₁ - v₁u₂² + γ(1-v₁),  σ₂Δu₂ + v₁u₂² - (γ+κ)v₂ )
//! ```
//!
//! `A(u)` is then a pointwise lower-triangular 2×2 block per node, so the
//! shifted solve has a closed form and no Krylov iteration is needed.
//! Starting from a symmetric concentration bump the model produces spot
//! multiplication. Fourth-order central differences for the diffusion.

use super::stencil::laplacian_into;
use super::PeriodicGrid2D;
use crate::integrator::SplitProblem;
use crate::{Error, Result};

const DIFFUSION_ORDER: usize = 4;

/// See the module docs; build with [`test2_problem`].
#[derive(Debug, Clone)]
pub struct Test2Problem {
    grid: PeriodicGrid2D,
    pub sigma1: f64,
    pub sigma2: f64,
    pub gamma: f64,
    pub kappa: f64,
}

/// Requires a square grid on `[-1,1)²`; model parameters σ₁ = 8e-5,
/// σ₂ = 4e-5, γ = 0.024, κ = 0.06.
pub fn test2_problem(grid: &PeriodicGrid2D) -> Result<Test2Problem> {
    if !grid.is_square() {
        return Err(Error::Grid("test2 needs a square grid with Δx = Δy".into()));
    }
    if grid.x0 != -1.0 || grid.y0 != -1.0 || (grid.lx - 2.0).abs() > 1e-12 {
        return Err(Error::Grid("test2 is posed on [-1,1)²".into()));
    }
    Ok(Test2Problem { grid: *grid, sigma1: 8e-5, sigma2: 4e-5, gamma: 0.024, kappa: 0.06 })
}

impl Test2Problem {
    pub fn grid(&self) -> &PeriodicGrid2D {
        &self.grid
    }

    /// ω₂(0) = (1/4)sin²(4πx)sin²(4πy) on [-1/4,1/4]², zero outside;
    /// ω₁(0) = 1 - 2ω₂(0).
    pub fn initial(&self) -> Vec<f64> {
        let n = self.grid.nodes();
        let mut u = vec![0.0; 2 * n];
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let (x, y) = (self.grid.x(i), self.grid.y(j));
                let idx = j * self.grid.nx + i;
                let w2 = if x.abs() <= 0.25 && y.abs() <= 0.25 {
                    let sx = (4.0 * std::f64::consts::PI * x).sin();
                    let sy = (4.0 * std::f64::consts::PI * y).sin();
                    0.25 * sx * sx * sy * sy
                } else {
                    0.0
                };
                u[idx] = 1.0 - 2.0 * w2;
                u[n + idx] = w2;
            }
        }
        u
    }
}

impl SplitProblem for Test2Problem {
    fn dim(&self) -> usize {
        2 * self.grid.nodes()
    }

    fn eval_h(&self, _t: f64, u: &[f64], v: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let (u1, u2) = u.split_at(n);
        let (v1, v2) = v.split_at(n);
        let (o1, o2) = out.split_at_mut(n);
        laplacian_into(&self.grid, DIFFUSION_ORDER, u1, o1).expect("grid checked at construction");
        laplacian_into(&self.grid, DIFFUSION_ORDER, u2, o2).expect("grid checked at construction");
        let gk = self.gamma + self.kappa;
        for i in 0..n {
            let react = v1[i] * u2[i] * u2[i];
            o1[i] = self.sigma1 * o1[i] - react + self.gamma * (1.0 - v1[i]);
            o2[i] = self.sigma2 * o2[i] + react - gk * v2[i];
        }
    }

    fn is_linear_in_v(&self) -> bool {
        true
    }

    fn eval_k(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let (u1, u2) = u.split_at(n);
        let (o1, o2) = out.split_at_mut(n);
        laplacian_into(&self.grid, DIFFUSION_ORDER, u1, o1).expect("grid checked at construction");
        laplacian_into(&self.grid, DIFFUSION_ORDER, u2, o2).expect("grid checked at construction");
        for i in 0..n {
            o1[i] = self.sigma1 * o1[i] + self.gamma;
            o2[i] *= self.sigma2;
        }
    }

    fn apply_a(&self, _t: f64, u: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.grid.nodes();
        let u2 = &u[n..];
        let (w1, w2) = w.split_at(n);
        let (o1, o2) = out.split_at_mut(n);
        let gk = self.gamma + self.kappa;
        for i in 0..n {
            let u2sq = u2[i] * u2[i];
            o1[i] = -(u2sq + self.gamma) * w1[i];
            o2[i] = u2sq * w1[i] - gk * w2[i];
        }
    }

    /// Pointwise forward substitution on the lower-triangular 2×2 blocks of
    /// `I - γA(u)`.
    fn shifted_solve(&self, _t: f64, u: &[f64], gamma_c: f64, rhs: &[f64], out: &mut [f64]) -> bool {
        let n = self.grid.nodes();
        let u2 = &u[n..];
        let gk = self.gamma + self.kappa;
        let d2 = 1.0 + gamma_c * gk;
        for i in 0..n {
            let u2sq = u2[i] * u2[i];
            let x1 = rhs[i] / (1.0 + gamma_c * (u2sq + self.gamma));
            out[i] = x1;
            out[n + i] = (rhs[n + i] + gamma_c * u2sq * x1) / d2;
        }
        true
    }

    fn diag_a(&self, _t: f64, u: &[f64], out: &mut [f64]) -> bool {
        let n = self.grid.nodes();
        let u2 = &u[n..];
        for i in 0..n {
            out[i] = -(u2[i] * u2[i] + self.gamma);
            out[n + i] = -(self.gamma + self.kappa);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{linear_structure_mismatch, step, History, IntegratorConfig};
    use crate::schemes::builtin;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> PeriodicGrid2D {
        PeriodicGrid2D::square(n, -1.0, 2.0).unwrap()
    }

    #[test]
    fn initial_data_matches_formula() {
        let g = grid(40);
        let p = test2_problem(&g).unwrap();
        let u0 = p.initial();
        let n = g.nodes();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = (g.x(i), g.y(j));
                let idx = j * g.nx + i;
                if x.abs() > 0.25 || y.abs() > 0.25 {
                    assert_eq!(u0[n + idx], 0.0, "outside the bump at ({x},{y})");
                    assert_eq!(u0[idx], 1.0);
                } else {
                    let want = 0.25
                        * (4.0 * std::f64::consts::PI * x).sin().powi(2)
                        * (4.0 * std::f64::consts::PI * y).sin().powi(2);
                    assert!((u0[n + idx] - want).abs() < 1e-15);
                    assert!((u0[idx] - (1.0 - 2.0 * want)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn a_reduces_to_reaction_diagonal_when_u2_vanishes() {
        let g = grid(16);
        let p = test2_problem(&g).unwrap();
        let n = g.nodes();
        let u = vec![1.0; n].into_iter().chain(vec![0.0; n]).collect::<Vec<_>>();
        let w: Vec<f64> = (0..2 * n).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut out = vec![0.0; 2 * n];
        p.apply_a(0.0, &u, &w, &mut out);
        for i in 0..n {
            assert!((out[i] + p.gamma * w[i]).abs() < 1e-15);
            assert!((out[n + i] + (p.gamma + p.kappa) * w[n + i]).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_structure_probe() {
        let g = grid(16);
        let p = test2_problem(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let probes: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
            .map(|_| {
                let u: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(0.0..1.0)).collect();
                let v: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (u, v)
            })
            .collect();
        assert!(linear_structure_mismatch(&p, 0.0, &probes) < 1e-12);
    }

    #[test]
    fn closed_form_solve_matches_direct_inversion() {
        let g = grid(16);
        let p = test2_problem(&g).unwrap();
        let n = g.nodes();
        let u = p.initial();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rhs: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gamma = 0.07;
        let mut x = vec![0.0; 2 * n];
        assert!(p.shifted_solve(0.0, &u, gamma, &rhs, &mut x));
        // Verify (I - γA)x = rhs through apply_a.
        let mut ax = vec![0.0; 2 * n];
        p.apply_a(0.0, &u, &x, &mut ax);
        for i in 0..2 * n {
            let lhs = x[i] - gamma * ax[i];
            assert!((lhs - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn one_backward_euler_step_matches_scripted_computation() {
        // FE-BE1 from the initial data, written out longhand: û = u⁰ and
        // u¹ solves the pointwise triangular system with rhs u⁰ + Δt·K(u⁰).
        let g = grid(20);
        let p = test2_problem(&g).unwrap();
        let n = g.nodes();
        let u0 = p.initial();
        let dt = 0.01;
        let c = builtin("FE-BE1").unwrap();
        let cfg = IntegratorConfig::new(dt);
        let mut h0 = vec![0.0; 2 * n];
        p.eval_h(0.0, &u0, &u0, &mut h0);
        let mut hist = History::from_slots(dt, vec![(0.0, u0.clone(), h0)]).unwrap();
        step(&c, &p, &mut hist, &cfg).unwrap();

        // Scripted direct computation.
        let mut lap1 = vec![0.0; n];
        let mut lap2 = vec![0.0; n];
        laplacian_into(&g, 4, &u0[..n], &mut lap1).unwrap();
        laplacian_into(&g, 4, &u0[n..], &mut lap2).unwrap();
        let gk = p.gamma + p.kappa;
        for i in 0..n {
            let u2sq = u0[n + i] * u0[n + i];
            let r1 = u0[i] + dt * (p.sigma1 * lap1[i] + p.gamma);
            let r2 = u0[n + i] + dt * (p.sigma2 * lap2[i]);
            let x1 = r1 / (1.0 + dt * (u2sq + p.gamma));
            let x2 = (r2 + dt * u2sq * x1) / (1.0 + dt * gk);
            assert!((hist.state(0)[i] - x1).abs() < 1e-14, "component 1 node {i}");
            assert!((hist.state(0)[n + i] - x2).abs() < 1e-14, "component 2 node {i}");
        }
    }

    #[test]
    fn rejects_wrong_domain() {
        let g = PeriodicGrid2D::square(16, 0.0, 2.0).unwrap();
        assert!(test2_problem(&g).is_err());
    }
}
