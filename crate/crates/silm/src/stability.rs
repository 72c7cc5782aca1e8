//! Stability analysis on the linear prototype `u' = iλu + μv`.
//!
//! Inserting the scheme into the prototype (with `z_R = μΔt`, `z_I = iλΔt`)
//! and eliminating the predictor gives the characteristic polynomial
//!
//! ```text
//! P(ζ) = ζ^s (1 - b_{-1} z_R) + ρ(ζ) - (z_R + z_I) σ(ζ)
//!        + b_{-1} z_I (ρ̃(ζ) - (z_R + z_I) σ̃(ζ))
//! ```
//!
//! with `ρ, σ, ρ̃, σ̃` the degree-(s-1) polynomials built from `a_j`, `b_j`,
//! `ã_j`, `b̃_j` respectively (σ̃ from the predictor weights b̃_j). A point
//! is stable when every root has modulus at most one and any root on the
//! unit circle is simple. [`growth_oracle`] iterates the underlying
//! recurrence directly and provides an independent check of the root
//! criterion.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{poly_roots, ComplexPolynomial};
use crate::schemes::SchemeCoefficients;
use crate::{Error, Result};

/// Thresholds of the root-based stability classification.
#[derive(Debug, Clone, Copy)]
pub struct StabilityTols {
    /// Slack on the unit-modulus test: stable needs `max|ζ| <= 1 + root_tol`.
    pub root_tol: f64,
    /// Roots with modulus within `mult_tol` of 1 must be simple.
    pub mult_tol: f64,
    /// Two roots closer than this count as a multiple root.
    pub sep_tol: f64,
    /// Residual tolerance handed to the root finder.
    pub poly_tol: f64,
    pub poly_maxiter: usize,
}

impl Default for StabilityTols {
    fn default() -> Self {
        Self { root_tol: 1e-9, mult_tol: 1e-8, sep_tol: 1e-6, poly_tol: 1e-12, poly_maxiter: 500 }
    }
}

/// Builds the characteristic polynomial at `(z_R, z_I)` with
/// `z_I = i·z_i_mag`. Degree s; the leading coefficient is `1 - b_{-1} z_R`.
pub fn char_poly(c: &SchemeCoefficients, z_r: f64, z_i_mag: f64) -> ComplexPolynomial {
    let s = c.s;
    let zi = Complex64::new(0.0, z_i_mag);
    let w = Complex64::new(z_r, z_i_mag); // z_R + z_I
    let bm = c.b_m1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); s + 1];
    coeffs[s] = Complex64::new(1.0 - bm * z_r, 0.0);
    for j in 0..s {
        let rho = Complex64::new(c.a[j], 0.0);
        let sigma = Complex64::new(c.b[j], 0.0);
        let rho_t = Complex64::new(c.tilde_a[j], 0.0);
        let sigma_t = Complex64::new(c.tilde_b[j], 0.0);
        coeffs[s - 1 - j] = rho - w * sigma + bm * zi * (rho_t - w * sigma_t);
    }
    ComplexPolynomial::new(coeffs)
}

/// Root-criterion verdict at one `(z_R, z_I)` node.
#[derive(Debug, Clone, Copy)]
pub struct StabilityPoint {
    pub z_r: f64,
    pub z_i_mag: f64,
    pub max_root_modulus: f64,
    pub stable: bool,
    /// Set when the root finder failed and the node was conservatively
    /// marked unstable.
    pub root_failure: bool,
}

/// Classifies one node: stable iff all roots lie in the closed unit disk and
/// every root with modulus near one is simple.
pub fn classify(
    c: &SchemeCoefficients,
    z_r: f64,
    z_i_mag: f64,
    tols: &StabilityTols,
) -> StabilityPoint {
    let p = char_poly(c, z_r, z_i_mag);
    if p.is_degenerate() {
        // No finite roots: vacuously stable.
        return StabilityPoint {
            z_r,
            z_i_mag,
            max_root_modulus: 0.0,
            stable: true,
            root_failure: false,
        };
    }
    let roots = match poly_roots(&p, tols.poly_tol, tols.poly_maxiter) {
        Ok(r) => r,
        Err(_) => {
            return StabilityPoint {
                z_r,
                z_i_mag,
                max_root_modulus: f64::INFINITY,
                stable: false,
                root_failure: true,
            }
        }
    };
    let max_mod = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut stable = max_mod <= 1.0 + tols.root_tol;
    if stable {
        for (i, ri) in roots.iter().enumerate() {
            if ri.norm() < 1.0 - tols.mult_tol {
                continue;
            }
            for rj in roots.iter().skip(i + 1) {
                if (ri - rj).norm() < tols.sep_tol {
                    stable = false;
                }
            }
        }
    }
    StabilityPoint { z_r, z_i_mag, max_root_modulus: max_mod, stable, root_failure: false }
}

/// Max-root-modulus samples over a `(z_R, z_I)` rectangle. Points are stored
/// row-major with `z_R` outermost.
#[derive(Debug, Clone)]
pub struct StabilityGrid {
    pub z_r: Vec<f64>,
    pub z_i: Vec<f64>,
    pub points: Vec<StabilityPoint>,
}

impl StabilityGrid {
    pub fn at(&self, ir: usize, ii: usize) -> &StabilityPoint {
        &self.points[ir * self.z_i.len() + ii]
    }
}

/// Scans `[zr_min, zr_max] × [0, zi_max]`. Only `z_I >= 0` is sampled; the
/// region is symmetric in the sign of `z_I` (conjugate roots). Nodes are
/// independent and evaluated in parallel with deterministic ordering.
pub fn scan_region(
    c: &SchemeCoefficients,
    zr_min: f64,
    zr_max: f64,
    n_r: usize,
    zi_max: f64,
    n_i: usize,
    tols: &StabilityTols,
) -> Result<StabilityGrid> {
    if n_r < 2 || n_i < 2 {
        return Err(Error::Config(format!(
            "stability grid needs >= 2 samples per axis, got {n_r}×{n_i}"
        )));
    }
    if !(zr_max > zr_min) || !(zi_max > 0.0) {
        return Err(Error::Config("stability grid ranges must be increasing".into()));
    }
    let z_r: Vec<f64> =
        (0..n_r).map(|i| zr_min + (zr_max - zr_min) * i as f64 / (n_r - 1) as f64).collect();
    let z_i: Vec<f64> = (0..n_i).map(|i| zi_max * i as f64 / (n_i - 1) as f64).collect();
    let points: Vec<StabilityPoint> = (0..n_r * n_i)
        .into_par_iter()
        .map(|idx| classify(c, z_r[idx / n_i], z_i[idx % n_i], tols))
        .collect();
    Ok(StabilityGrid { z_r, z_i, points })
}

/// Verdict of the time-stepping oracle.
#[derive(Debug, Clone, Copy)]
pub struct GrowthReport {
    /// `max_n |v^n|` over the whole run (unit random start).
    pub max_amplification: f64,
    /// No growth beyond 10× across the final half of the run.
    pub stable: bool,
}

/// Directly iterates the scheme on the prototype recurrence at
/// `μΔt = z_r`, `λΔt = z_i_mag` from a random unit history, and flags
/// sustained growth. Independent of the characteristic-polynomial route.
pub fn growth_oracle(
    c: &SchemeCoefficients,
    z_r: f64,
    z_i_mag: f64,
    n_steps: usize,
    seed: u64,
) -> Result<GrowthReport> {
    if n_steps < 100 {
        return Err(Error::Config("growth oracle needs n_steps >= 100".into()));
    }
    let s = c.s;
    let denom = Complex64::new(1.0 - z_r * c.b_m1, 0.0);
    if denom.norm() < 1e-12 {
        return Ok(GrowthReport { max_amplification: f64::INFINITY, stable: false });
    }
    let zi = Complex64::new(0.0, z_i_mag);
    let w = Complex64::new(z_r, z_i_mag);

    // Per-level weights of û^{n+1} and of the explicit part of v^{n+1}
    // (Δt = 1 after the z rescaling).
    let pred: Vec<Complex64> = (0..s).map(|j| -c.tilde_a[j] + w * c.tilde_b[j]).collect();
    let corr: Vec<Complex64> = (0..s).map(|j| -c.a[j] + w * c.b[j]).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..s)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI)))
        .collect(); // v[0] newest

    let mut max_all = 1.0f64;
    let mut max_first = 1.0f64;
    let mut max_second = 0.0f64;
    for n in 0..n_steps {
        let mut u_hat = Complex64::new(0.0, 0.0);
        let mut expl = Complex64::new(0.0, 0.0);
        for j in 0..s {
            u_hat += pred[j] * v[j];
            expl += corr[j] * v[j];
        }
        let v_new = (expl + c.b_m1 * zi * u_hat) / denom;
        let mag = v_new.norm();
        if !mag.is_finite() || mag > 1e140 {
            return Ok(GrowthReport { max_amplification: f64::INFINITY, stable: false });
        }
        max_all = max_all.max(mag);
        if n < n_steps / 2 {
            max_first = max_first.max(mag);
        } else {
            max_second = max_second.max(mag);
        }
        v.rotate_right(1);
        v[0] = v_new;
    }
    Ok(GrowthReport { max_amplification: max_all, stable: max_second <= 10.0 * max_first })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{builtin, catalog};

    #[test]
    fn consistency_root_at_origin() {
        // At (0,0), ζ = 1 is a root of every catalog scheme's polynomial.
        for c in catalog() {
            let p = char_poly(&c, 0.0, 0.0);
            let at_one = p.eval(Complex64::new(1.0, 0.0)).norm();
            assert!(at_one < 1e-12, "{}: |P(1)| = {at_one:.3e}", c.name);
        }
    }

    #[test]
    fn fe_be1_polynomial_closed_form() {
        // P(ζ) = ζ(1 - z_R) - 1 - z_I, root (1 + z_I)/(1 - z_R).
        let c = builtin("FE-BE1").unwrap();
        let (z_r, z_i) = (-1.25, 0.6);
        let p = char_poly(&c, z_r, z_i);
        assert_eq!(p.degree(), 1);
        let roots = poly_roots(&p, 1e-13, 200).unwrap();
        let expect = Complex64::new(1.0, z_i) / Complex64::new(1.0 - z_r, 0.0);
        assert!((roots[0] - expect).norm() < 1e-12);
    }

    #[test]
    fn fe_be1_at_minus_one_is_half() {
        let c = builtin("FE-BE1").unwrap();
        let pt = classify(&c, -1.0, 0.0, &StabilityTols::default());
        assert!((pt.max_root_modulus - 0.5).abs() < 1e-12);
        assert!(pt.stable);
    }

    #[test]
    fn fe_be1_region_matches_closed_form() {
        // Stable iff 1 + z_I² <= (1 - z_R)².
        let c = builtin("FE-BE1").unwrap();
        let tols = StabilityTols::default();
        let grid = scan_region(&c, -4.0, 0.0, 21, 2.0, 21, &tols).unwrap();
        for pt in &grid.points {
            let lhs = 1.0 + pt.z_i_mag * pt.z_i_mag;
            let rhs = (1.0 - pt.z_r) * (1.0 - pt.z_r);
            if (lhs.sqrt() - rhs.sqrt()).abs() < 1e-9 {
                continue; // boundary band
            }
            assert_eq!(pt.stable, lhs <= rhs, "at ({}, {})", pt.z_r, pt.z_i_mag);
        }
    }

    #[test]
    fn origin_stable_for_all_catalog_schemes() {
        let tols = StabilityTols::default();
        for c in catalog() {
            let pt = classify(&c, 0.0, 0.0, &tols);
            assert!(pt.stable, "{} unstable at the origin", c.name);
            assert!((pt.max_root_modulus - 1.0).abs() <= 1e-9, "{}", c.name);
        }
    }

    #[test]
    fn conjugate_symmetry_of_roots() {
        let c = builtin("AB-AM3").unwrap();
        let (z_r, z_i) = (-0.8, 0.7);
        let plus = poly_roots(&char_poly(&c, z_r, z_i), 1e-12, 500).unwrap();
        let minus = poly_roots(&char_poly(&c, z_r, -z_i), 1e-12, 500).unwrap();
        // Every root for +z_I has its conjugate among the roots for -z_I.
        for r in &plus {
            let conj = r.conj();
            let found = minus.iter().any(|m| (m - conj).norm() < 1e-8);
            assert!(found, "missing conjugate of {r}");
        }
    }

    #[test]
    fn fe_bdf2_real_axis_a_stability() {
        // At z_I = 0 the polynomial reduces to the implicit scheme's own;
        // BDF2 is A-stable so the whole negative real axis is stable.
        let c = builtin("FE-BDF2").unwrap();
        let tols = StabilityTols::default();
        for z_r in [-1e4, -1e3, -100.0, -10.0, -1.0, -0.01] {
            let pt = classify(&c, z_r, 0.0, &tols);
            assert!(pt.stable, "FE-BDF2 unstable at z_R = {z_r}");
        }
    }

    #[test]
    fn char_poly_at_zero_zi_drops_predictor_terms() {
        let c = builtin("SSP-BDF4").unwrap();
        let z_r = -3.7;
        let p = char_poly(&c, z_r, 0.0);
        // Implicit-only polynomial: ζ^s(1 - b_{-1} z_R) + ρ(ζ) - z_R σ(ζ).
        for (k, coeff) in p.coeffs().iter().enumerate() {
            let want = if k == c.s {
                1.0 - c.b_m1 * z_r
            } else {
                let j = c.s - 1 - k;
                c.a[j] - z_r * c.b[j]
            };
            assert!((coeff.re - want).abs() < 1e-14 && coeff.im == 0.0);
        }
    }

    #[test]
    fn growth_oracle_bounded_at_origin() {
        let c = builtin("AB-AM3").unwrap();
        let rep = growth_oracle(&c, 0.0, 0.0, 400, 42).unwrap();
        assert!(rep.stable);
        assert!(rep.max_amplification < 10.0);
    }

    #[test]
    fn growth_oracle_decays_on_fe_be1() {
        let rep = growth_oracle(&builtin("FE-BE1").unwrap(), -1.0, 0.0, 400, 1).unwrap();
        assert!(rep.stable);
        assert!(rep.max_amplification <= 1.0 + 1e-12);
    }

    #[test]
    fn growth_oracle_detects_instability() {
        // FE-BE1 at z_R = -1, z_I = 2: |root| = |1 + 2i|/2 = √5/2 > 1.
        let rep = growth_oracle(&builtin("FE-BE1").unwrap(), -1.0, 2.0, 400, 3).unwrap();
        assert!(!rep.stable);
    }

    #[test]
    fn oracle_agrees_with_root_criterion_on_sample_nodes() {
        let tols = StabilityTols::default();
        for name in ["FE-CN2", "AB-BDF3"] {
            let c = builtin(name).unwrap();
            for (z_r, z_i) in [(-0.5, 0.3), (-2.0, 1.5), (-6.0, 0.2), (-0.1, 1.9)] {
                let pt = classify(&c, z_r, z_i, &tols);
                if (pt.max_root_modulus - 1.0).abs() < 0.02 {
                    continue;
                }
                let rep = growth_oracle(&c, z_r, z_i, 600, 7).unwrap();
                assert_eq!(pt.stable, rep.stable, "{name} at ({z_r}, {z_i})");
            }
        }
    }

    #[test]
    fn degenerate_leading_coefficient_is_vacuously_stable() {
        // FE-BE1 at z_R = 1 / b_{-1} = 1, z_I = 0: P(ζ) = -1, no roots.
        let c = builtin("FE-BE1").unwrap();
        let pt = classify(&c, 1.0, 0.0, &StabilityTols::default());
        assert!(pt.stable);
        assert_eq!(pt.max_root_modulus, 0.0);
    }

    #[test]
    fn scan_rejects_tiny_grids() {
        let c = builtin("FE-BE1").unwrap();
        let tols = StabilityTols::default();
        assert!(scan_region(&c, -1.0, 0.0, 1, 1.0, 5, &tols).is_err());
    }
}
