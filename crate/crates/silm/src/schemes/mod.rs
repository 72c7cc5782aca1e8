//! Coefficient tables for semi-implicit multistep schemes.
//!
//! An `s`-step pair combines an explicit predictor and an implicit corrector,
//!
//! ```text
//! û^{n+1} = -Σ_{j=0}^{s-1} ã_j u^{n-j} + Δt Σ_{j=0}^{s-1} b̃_j H^{n-j}
//! u^{n+1} = -Σ_{j=0}^{s-1} a_j u^{n-j} + Δt Σ_{j=0}^{s-1} b_j H^{n-j}
//!                                      + Δt b_{-1} H(t^{n+1}, û^{n+1}, u^{n+1})
//! ```
//!
//! with `b_{-1} ≠ 0`. Both halves must satisfy the multistep order conditions
//! separately for the pair to reach order `p`; [`verify_order`] checks them
//! directly. Classical families (Adams-Bashforth, Adams-Moulton, BDF) are
//! derived in exact rational arithmetic in [`derive`]; named
//! predictor/corrector pairings live in [`catalog`].

mod derive;
pub use derive::{
    derive_adams_bashforth, derive_adams_moulton, derive_bdf, second_order_family, ssp_explicit,
    ExplicitTable, ImplicitTable, SspVariant,
};

mod catalog;
pub use catalog::{builtin, catalog, catalog_names};

use num_rational::Ratio;

use crate::{Error, Result};

/// Exact rational coefficient.
pub type Frac = Ratio<i128>;

/// Exact-fraction view of a scheme, kept alongside the `f64` tables when the
/// scheme was constructed rationally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeFractions {
    pub tilde_a: Vec<Frac>,
    pub tilde_b: Vec<Frac>,
    pub a: Vec<Frac>,
    pub b: Vec<Frac>,
    pub b_m1: Frac,
}

/// Coefficients of an explicit/implicit multistep pair.
///
/// Sign convention: `u^{n+1} = -Σ ã_j u^{n-j} + …`, so for forward Euler
/// `ã_0 = -1`.
#[derive(Debug, Clone)]
pub struct SchemeCoefficients {
    pub name: String,
    /// Step count (history length).
    pub s: usize,
    /// Declared order of the pair (= implicit order).
    pub p: usize,
    /// Explicit state weights ã_0..ã_{s-1}.
    pub tilde_a: Vec<f64>,
    /// Explicit derivative weights b̃_0..b̃_{s-1}.
    pub tilde_b: Vec<f64>,
    /// Implicit state weights a_0..a_{s-1}.
    pub a: Vec<f64>,
    /// Implicit weights b_0..b_{s-1} on history derivatives.
    pub b: Vec<f64>,
    /// Implicit weight b_{-1} on the new-level derivative.
    pub b_m1: f64,
    /// CFL coefficient of an SSP predictor, when the pair has one.
    pub cfl: Option<f64>,
    /// Exact fractions, when constructed rationally.
    pub fractions: Option<SchemeFractions>,
}

impl SchemeCoefficients {
    /// Builds the `f64` tables from exact fractions.
    pub fn from_fractions(
        name: impl Into<String>,
        p: usize,
        fr: SchemeFractions,
        cfl: Option<Frac>,
    ) -> Self {
        let to_f64 = |v: &[Frac]| v.iter().map(frac_to_f64).collect::<Vec<_>>();
        let s = fr.tilde_a.len();
        Self {
            name: name.into(),
            s,
            p: p.max(1),
            tilde_a: to_f64(&fr.tilde_a),
            tilde_b: to_f64(&fr.tilde_b),
            a: to_f64(&fr.a),
            b: to_f64(&fr.b),
            b_m1: frac_to_f64(&fr.b_m1),
            cfl: cfl.as_ref().map(frac_to_f64),
            fractions: Some(fr),
        }
    }

    /// Structural validity: array lengths, `s >= 1`, `b_{-1} != 0`, and the
    /// two consistency sums `1 + Σ ã_j = 0`, `1 + Σ a_j = 0`.
    pub fn validate(&self) -> Result<()> {
        if self.s < 1 {
            return Err(Error::InvalidScheme(format!("{}: s must be >= 1", self.name)));
        }
        for (label, v) in [
            ("tilde_a", &self.tilde_a),
            ("tilde_b", &self.tilde_b),
            ("a", &self.a),
            ("b", &self.b),
        ] {
            if v.len() != self.s {
                return Err(Error::InvalidScheme(format!(
                    "{}: {label} has length {} but s = {}",
                    self.name,
                    v.len(),
                    self.s
                )));
            }
        }
        if self.b_m1 == 0.0 {
            return Err(Error::InvalidScheme(format!("{}: b_{{-1}} must be nonzero", self.name)));
        }
        let sum_ta: f64 = 1.0 + self.tilde_a.iter().sum::<f64>();
        let sum_a: f64 = 1.0 + self.a.iter().sum::<f64>();
        if sum_ta.abs() > 1e-12 || sum_a.abs() > 1e-12 {
            return Err(Error::InvalidScheme(format!(
                "{}: consistency sums 1+Σã = {sum_ta:.3e}, 1+Σa = {sum_a:.3e}",
                self.name
            )));
        }
        Ok(())
    }
}

fn frac_to_f64(f: &Frac) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

/// Order-condition residuals of one scheme pair, per order.
#[derive(Debug, Clone)]
pub struct OrderReport {
    pub max_order_explicit: usize,
    pub max_order_implicit: usize,
    /// `(q, explicit residual, implicit residual)` for q = 0, 1, ….
    /// The q = 0 entry is the consistency condition `1 + Σ a_j = 0`.
    pub residuals: Vec<(usize, f64, f64)>,
}

/// Checks the order conditions of both halves of `c` and reports the largest
/// order at which every condition up to and including that order holds to
/// within `tol`.
///
/// The order-q condition on the explicit half is
/// `1/q! + Σ_{j>=1} (-j)^q/q! ã_j = Σ_{j>=0} (-j)^{q-1}/(q-1)! b̃_j` and on
/// the implicit half the right side gains `b_{-1}/(q-1)!`; the derivative
/// sums use the convention `0^0 = 1` so the q = 1 conditions reduce to the
/// familiar `1 - Σ j ã_j = Σ b̃_j` forms.
pub fn verify_order(c: &SchemeCoefficients, tol: f64) -> Result<OrderReport> {
    if c.s < 1 {
        return Err(Error::InvalidScheme("s must be >= 1".into()));
    }
    for (label, v) in [
        ("tilde_a", &c.tilde_a),
        ("tilde_b", &c.tilde_b),
        ("a", &c.a),
        ("b", &c.b),
    ] {
        if v.len() != c.s {
            return Err(Error::InvalidScheme(format!(
                "{label} has length {} but s = {}",
                v.len(),
                c.s
            )));
        }
    }

    let q_max = c.s + 2;
    let mut residuals = Vec::with_capacity(q_max + 1);
    for q in 0..=q_max {
        let re = condition_residual(q, &c.tilde_a, &c.tilde_b, None);
        let ri = condition_residual(q, &c.a, &c.b, Some(c.b_m1));
        residuals.push((q, re, ri));
    }

    let max_order = |pick: fn(&(usize, f64, f64)) -> f64| -> usize {
        let mut order = 0;
        for (q, entry) in residuals.iter().enumerate() {
            if pick(entry) <= tol {
                if q > 0 {
                    order = q;
                }
            } else {
                if q == 0 {
                    return 0;
                }
                break;
            }
        }
        order
    };

    Ok(OrderReport {
        max_order_explicit: max_order(|e| e.1),
        max_order_implicit: max_order(|e| e.2),
        residuals,
    })
}

/// Residual of the order-q condition for one table; `b_m1` is present for
/// the implicit half only.
fn condition_residual(q: usize, state: &[f64], deriv: &[f64], b_m1: Option<f64>) -> f64 {
    let s = state.len();
    if q == 0 {
        return (1.0 + state.iter().sum::<f64>()).abs();
    }
    let qf = factorial(q);
    let qm1f = factorial(q - 1);
    let mut lhs = 1.0 / qf;
    for (j, &aj) in state.iter().enumerate().take(s).skip(1) {
        lhs += (-(j as f64)).powi(q as i32) / qf * aj;
    }
    let mut rhs = b_m1.map_or(0.0, |bm| bm / qm1f);
    for (j, &bj) in deriv.iter().enumerate() {
        // (-j)^{q-1} with 0^0 = 1 at q = 1.
        let pw = if q == 1 { 1.0 } else { (-(j as f64)).powi((q - 1) as i32) };
        rhs += pw / qm1f * bj;
    }
    (lhs - rhs).abs()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(s: usize, a: Vec<f64>, b: Vec<f64>, b_m1: f64) -> SchemeCoefficients {
        SchemeCoefficients {
            name: "test".into(),
            s,
            p: 1,
            tilde_a: {
                let mut v = vec![0.0; s];
                v[0] = -1.0;
                v
            },
            tilde_b: {
                let mut v = vec![0.0; s];
                v[0] = 1.0;
                v
            },
            a,
            b,
            b_m1,
            cfl: None,
            fractions: None,
        }
    }

    #[test]
    fn backward_euler_is_order_one() {
        let c = bare(1, vec![-1.0], vec![0.0], 1.0);
        let rep = verify_order(&c, 1e-10).unwrap();
        assert_eq!(rep.max_order_implicit, 1);
        // Fails the q = 2 line: 1/2 on the left, b_{-1} = 1 on the right.
        let q2 = rep.residuals[2].2;
        assert!((q2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn crank_nicolson_is_order_two() {
        let c = bare(1, vec![-1.0], vec![0.5], 0.5);
        let rep = verify_order(&c, 1e-10).unwrap();
        assert_eq!(rep.max_order_implicit, 2);
        assert!(rep.residuals[3].2 > 1e-3);
    }

    #[test]
    fn forward_euler_explicit_order_one() {
        let c = bare(1, vec![-1.0], vec![0.5], 0.5);
        let rep = verify_order(&c, 1e-10).unwrap();
        assert_eq!(rep.max_order_explicit, 1);
    }

    #[test]
    fn identity_predictor_has_order_zero() {
        let mut c = bare(1, vec![-1.0], vec![0.0], 1.0);
        c.tilde_b[0] = 0.0;
        let rep = verify_order(&c, 1e-10).unwrap();
        assert_eq!(rep.max_order_explicit, 0);
    }

    #[test]
    fn inconsistent_state_weights_give_order_zero() {
        let c = bare(1, vec![-0.9], vec![0.0], 1.0);
        let rep = verify_order(&c, 1e-10).unwrap();
        assert_eq!(rep.max_order_implicit, 0);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mut c = bare(2, vec![-1.0, 0.0], vec![0.0, 0.0], 1.0);
        c.a = vec![-1.0];
        assert!(verify_order(&c, 1e-10).is_err());
    }

    #[test]
    fn validate_rejects_zero_b_m1() {
        let c = bare(1, vec![-1.0], vec![0.0], 0.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn order_report_covers_s_plus_two() {
        let c = bare(3, vec![-1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], 1.0);
        let rep = verify_order(&c, 1e-10).unwrap();
        assert_eq!(rep.residuals.len(), 3 + 2 + 1);
    }
}
