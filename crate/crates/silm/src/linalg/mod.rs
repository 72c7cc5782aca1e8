//! Matrix-free linear algebra for the implicit correction step.
//!
//! The implicit stage of a semi-implicit multistep scheme requires solving
//! `(I - γA)x = rhs` where only the action of `A` is available. Small systems
//! go through dense elimination; everything else uses restarted GMRES with an
//! optional diagonal preconditioner.

mod poly;
pub use poly::{poly_roots, ComplexPolynomial};

use crate::{Error, Result};

/// Dimension at or below which `solve_shifted` uses dense elimination.
pub const DENSE_DIM_LIMIT: usize = 64;

/// GMRES restart length.
pub const GMRES_RESTART: usize = 30;

/// Action of a square matrix on a vector.
pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, w: &[f64], out: &mut [f64]);
}

/// Wraps a closure as a [`LinearOp`].
pub struct FnOperator<F: Fn(&[f64], &mut [f64])> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOp for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, w: &[f64], out: &mut [f64]) {
        (self.f)(w, out)
    }
}

/// Outcome of a shifted solve.
#[derive(Debug, Clone)]
pub struct ShiftedSolve {
    pub x: Vec<f64>,
    /// Relative residual `‖rhs − (I − γA)x‖ / ‖rhs‖` actually achieved.
    pub residual: f64,
    pub iterations: usize,
}

/// Solver selection for [`solve_shifted_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftedMethod {
    /// Dense for `dim <= DENSE_DIM_LIMIT`, GMRES otherwise.
    Auto,
    Dense,
    Gmres,
}

/// Solves `(I - γA)x = rhs` to relative residual `tol`.
///
/// `precond`, when given, holds the diagonal of `I - γA` and is applied as a
/// right preconditioner, so the reported residual is the true one.
pub fn solve_shifted(
    a: &dyn LinearOp,
    gamma: f64,
    rhs: &[f64],
    tol: f64,
    maxiter: usize,
    precond: Option<&[f64]>,
) -> Result<ShiftedSolve> {
    solve_shifted_with(ShiftedMethod::Auto, a, gamma, rhs, tol, maxiter, precond)
}

pub fn solve_shifted_with(
    method: ShiftedMethod,
    a: &dyn LinearOp,
    gamma: f64,
    rhs: &[f64],
    tol: f64,
    maxiter: usize,
    precond: Option<&[f64]>,
) -> Result<ShiftedSolve> {
    let n = a.dim();
    assert_eq!(rhs.len(), n, "rhs dimension mismatch");
    if gamma == 0.0 {
        return Ok(ShiftedSolve { x: rhs.to_vec(), residual: 0.0, iterations: 0 });
    }
    let use_dense = match method {
        ShiftedMethod::Auto => n <= DENSE_DIM_LIMIT,
        ShiftedMethod::Dense => true,
        ShiftedMethod::Gmres => false,
    };
    if use_dense {
        dense_shifted(a, gamma, rhs)
    } else {
        gmres_shifted(a, gamma, rhs, tol, maxiter, precond)
    }
}

/// Assembles `I - γA` column by column and eliminates with partial pivoting.
fn dense_shifted(a: &dyn LinearOp, gamma: f64, rhs: &[f64]) -> Result<ShiftedSolve> {
    let n = a.dim();
    let mut m = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        a.apply(&e, &mut col);
        for i in 0..n {
            m[i * n + j] = -gamma * col[i];
        }
        m[j * n + j] += 1.0;
        e[j] = 0.0;
    }

    let mut x = rhs.to_vec();
    // LU with partial pivoting, in place.
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (pmax, _) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if m[pmax * n + k].abs() == 0.0 {
            return Err(Error::LinearSolve { residual: f64::INFINITY, iterations: 0 });
        }
        if pmax != k {
            for j in 0..n {
                m.swap(k * n + j, pmax * n + j);
            }
            piv.swap(k, pmax);
            x.swap(k, pmax);
        }
        let pivval = m[k * n + k];
        for i in (k + 1)..n {
            let factor = m[i * n + k] / pivval;
            m[i * n + k] = 0.0;
            if factor != 0.0 {
                for j in (k + 1)..n {
                    m[i * n + j] -= factor * m[k * n + j];
                }
                x[i] -= factor * x[k];
            }
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= m[i * n + j] * x[j];
        }
        x[i] = acc / m[i * n + i];
    }

    let mut ax = vec![0.0; n];
    a.apply(&x, &mut ax);
    let mut res2 = 0.0;
    let mut rhs2 = 0.0;
    for i in 0..n {
        let r = rhs[i] - (x[i] - gamma * ax[i]);
        res2 += r * r;
        rhs2 += rhs[i] * rhs[i];
    }
    let residual = if rhs2 > 0.0 { (res2 / rhs2).sqrt() } else { res2.sqrt() };
    Ok(ShiftedSolve { x, residual, iterations: 0 })
}

/// Restarted GMRES on `M x = rhs`, `M = I - γA`, zero initial guess.
fn gmres_shifted(
    a: &dyn LinearOp,
    gamma: f64,
    rhs: &[f64],
    tol: f64,
    maxiter: usize,
    precond: Option<&[f64]>,
) -> Result<ShiftedSolve> {
    let n = a.dim();
    let apply_m = |w: &[f64], out: &mut [f64]| {
        a.apply(w, out);
        for i in 0..n {
            out[i] = w[i] - gamma * out[i];
        }
    };
    // Right preconditioning: solve M D⁻¹ y = rhs, then x = D⁻¹ y; the GMRES
    // residual is then the true residual of the original system.
    let apply_md = |w: &[f64], out: &mut [f64], scratch: &mut [f64]| match precond {
        Some(d) => {
            for i in 0..n {
                scratch[i] = w[i] / d[i];
            }
            apply_m(scratch, out);
        }
        None => apply_m(w, out),
    };

    let rhs_norm = norm2(rhs);
    if rhs_norm == 0.0 {
        return Ok(ShiftedSolve { x: vec![0.0; n], residual: 0.0, iterations: 0 });
    }

    let m = GMRES_RESTART;
    let mut y_total = vec![0.0; n]; // accumulated solution in preconditioned variables
    let mut scratch = vec![0.0; n];
    let mut total_iters = 0usize;
    let mut best_res = f64::INFINITY;

    while total_iters < maxiter {
        // Residual of the current iterate.
        let mut r = vec![0.0; n];
        apply_md(&y_total, &mut r, &mut scratch);
        for i in 0..n {
            r[i] = rhs[i] - r[i];
        }
        let beta = norm2(&r);
        best_res = best_res.min(beta / rhs_norm);
        if beta / rhs_norm <= tol {
            break;
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for x in r.iter_mut() {
            *x /= beta;
        }
        basis.push(r);

        // Hessenberg in compact form plus Givens rotations.
        let mut h = vec![0.0; (m + 1) * m];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;

        let mut k_used = 0;
        for k in 0..m {
            if total_iters >= maxiter {
                break;
            }
            total_iters += 1;
            let mut w = vec![0.0; n];
            apply_md(&basis[k], &mut w, &mut scratch);
            // Modified Gram-Schmidt.
            for j in 0..=k {
                let hjk = dot(&w, &basis[j]);
                h[j * m + k] = hjk;
                for i in 0..n {
                    w[i] -= hjk * basis[j][i];
                }
            }
            let hk1k = norm2(&w);
            h[(k + 1) * m + k] = hk1k;
            if hk1k > 0.0 {
                for x in w.iter_mut() {
                    *x /= hk1k;
                }
            }
            basis.push(w);

            // Apply previous rotations to the new column.
            for j in 0..k {
                let t = cs[j] * h[j * m + k] + sn[j] * h[(j + 1) * m + k];
                h[(j + 1) * m + k] = -sn[j] * h[j * m + k] + cs[j] * h[(j + 1) * m + k];
                h[j * m + k] = t;
            }
            let denom = (h[k * m + k].powi(2) + h[(k + 1) * m + k].powi(2)).sqrt();
            if denom == 0.0 {
                k_used = k + 1;
                break;
            }
            cs[k] = h[k * m + k] / denom;
            sn[k] = h[(k + 1) * m + k] / denom;
            h[k * m + k] = denom;
            h[(k + 1) * m + k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;

            if g[k + 1].abs() / rhs_norm <= tol {
                break;
            }
        }

        if k_used == 0 {
            break;
        }
        // Back-substitute for the Krylov coefficients.
        let mut ycoef = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in (i + 1)..k_used {
                acc -= h[i * m + j] * ycoef[j];
            }
            ycoef[i] = acc / h[i * m + i];
        }
        for (j, &yc) in ycoef.iter().enumerate() {
            for i in 0..n {
                y_total[i] += yc * basis[j][i];
            }
        }
    }

    // Undo the right preconditioner and measure the true residual.
    let mut x = y_total;
    if let Some(d) = precond {
        for i in 0..n {
            x[i] /= d[i];
        }
    }
    let mut ax = vec![0.0; n];
    a.apply(&x, &mut ax);
    let mut res2 = 0.0;
    for i in 0..n {
        let r = rhs[i] - (x[i] - gamma * ax[i]);
        res2 += r * r;
    }
    let residual = res2.sqrt() / rhs_norm;
    if residual <= tol {
        Ok(ShiftedSolve { x, residual, iterations: total_iters })
    } else {
        Err(Error::LinearSolve { residual, iterations: total_iters })
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
