//! Complex polynomials and simultaneous root finding.
//!
//! Roots are computed with the Aberth-Ehrlich iteration, which refines all
//! roots at once and needs no eigensolver. Exact zero low-order coefficients
//! are factored out first so that zero roots (common in the characteristic
//! polynomials of Adams-type schemes) do not degrade the initial guesses.

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative threshold below which leading coefficients are stripped.
const STRIP_TOL: f64 = 1e-14;

/// A polynomial `c_0 + c_1 ζ + … + c_d ζ^d` with complex coefficients.
///
/// Construction strips leading coefficients smaller than
/// `1e-14 · max|c_k|`; a polynomial may therefore end up with degree 0
/// (no finite roots), which callers treat as degenerate rather than an error.
#[derive(Debug, Clone)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial from coefficients in ascending order of degree.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = STRIP_TOL * max_mag;
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= cut {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degenerate after stripping: no finite roots.
    pub fn is_degenerate(&self) -> bool {
        self.degree() == 0
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and first derivative at `z`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |c_k| |z|^k`, the scale used in the residual stopping rule.
    pub fn abs_eval(&self, zmag: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * zmag + c.norm();
        }
        acc
    }
}

/// Finds all `degree` roots of `p`.
///
/// Each returned root `r` satisfies `|p(r)| <= tol · Σ|c_k||r|^k`. A
/// degenerate (degree-0) polynomial yields an empty root list. Zero roots
/// coming from exactly-zero low-order coefficients are split off before the
/// Aberth-Ehrlich iteration runs on the remaining factor.
pub fn poly_roots(p: &ComplexPolynomial, tol: f64, maxiter: usize) -> Result<Vec<Complex64>> {
    if p.is_degenerate() {
        return Ok(Vec::new());
    }

    // Factor out exact zero roots.
    let mut coeffs: Vec<Complex64> = p.coeffs().to_vec();
    let mut roots = Vec::with_capacity(p.degree());
    while coeffs.len() > 1 && coeffs[0] == Complex64::new(0.0, 0.0) {
        roots.push(Complex64::new(0.0, 0.0));
        coeffs.remove(0);
    }
    if coeffs.len() == 1 {
        return Ok(roots);
    }

    let reduced = ComplexPolynomial { coeffs };
    let mut z = initial_guesses(&reduced);
    let d = reduced.degree();

    for _ in 0..maxiter {
        let mut converged = true;
        let mut max_step = 0.0f64;
        for k in 0..d {
            let (pk, dpk) = reduced.eval_with_derivative(z[k]);
            if pk.norm() > tol * reduced.abs_eval(z[k].norm()) {
                converged = false;
            } else {
                continue;
            }
            let newton = if dpk.norm() == 0.0 {
                // Flat spot: nudge off it instead of dividing by zero.
                let nudge = Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                z[k] += nudge;
                continue;
            } else {
                pk / dpk
            };
            let mut repulse = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    let diff = z[k] - z[j];
                    if diff.norm() > 0.0 {
                        repulse += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let w = if denom.norm() < 1e-300 { newton } else { newton / denom };
            z[k] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
        }
        if converged {
            roots.extend_from_slice(&z);
            return Ok(roots);
        }
        if max_step < 1e-16 {
            break;
        }
    }

    // Iteration budget exhausted or stagnated: accept only if every root
    // already meets the residual bound.
    let worst = z
        .iter()
        .map(|&zk| {
            let scale = reduced.abs_eval(zk.norm()).max(f64::MIN_POSITIVE);
            reduced.eval(zk).norm() / scale
        })
        .fold(0.0, f64::max);
    if worst <= tol {
        roots.extend_from_slice(&z);
        Ok(roots)
    } else {
        Err(Error::RootFinding(format!(
            "Aberth iteration did not converge: worst relative residual {worst:.3e} (tol {tol:.1e})"
        )))
    }
}

/// Initial guesses on a circle of radius `(|c_0/c_d|)^{1/d}`, scaled by 1.1,
/// with an irrational angle offset to avoid symmetric stagnation.
fn initial_guesses(p: &ComplexPolynomial) -> Vec<Complex64> {
    let d = p.degree();
    let c = p.coeffs();
    let cd = c[d].norm();
    let mut r = (c[0].norm() / cd).powf(1.0 / d as f64);
    // Cauchy bound fallback when the constant term is (near) zero.
    let cauchy = 1.0 + c[..d].iter().map(|ck| ck.norm()).fold(0.0, f64::max) / cd;
    if !r.is_finite() || r < 1e-6 * cauchy {
        r = 0.5 * cauchy;
    }
    r *= 1.1;
    let offset = 2.0 * std::f64::consts::PI * 0.137956;
    (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + offset;
            Complex64::from_polar(r, theta)
        })
        .collect()
}
