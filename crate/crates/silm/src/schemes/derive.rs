//! Derivation of classical multistep families from the order conditions.
//!
//! The order conditions are linear in the coefficients, so each family is
//! obtained by solving a small Vandermonde-type system. All systems are
//! solved in exact rational arithmetic and the resulting tables are exact
//! small fractions; `verify_order` residuals on them are at round-off level.

use num_traits::{One, Signed, Zero};

use super::{Frac, SchemeCoefficients, SchemeFractions};
use crate::{Error, Result};

/// Largest supported step count for the derivations. Beyond this the
/// Vandermonde systems become too ill-conditioned to be useful in `f64`
/// downstream, and the catalog never needs more.
pub const MAX_STEPS: usize = 6;

/// Explicit half of a scheme, as exact fractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTable {
    pub tilde_a: Vec<Frac>,
    pub tilde_b: Vec<Frac>,
}

/// Implicit half of a scheme, as exact fractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitTable {
    pub a: Vec<Frac>,
    pub b: Vec<Frac>,
    pub b_m1: Frac,
}

fn fr(n: i128, d: i128) -> Frac {
    Frac::new(n, d)
}

/// `(-j)^e` as an exact fraction, with `0^0 = 1`.
fn neg_pow(j: usize, e: usize) -> Frac {
    if e == 0 {
        return Frac::one();
    }
    let mut acc = Frac::one();
    for _ in 0..e {
        acc *= fr(-(j as i128), 1);
    }
    acc
}

/// Gaussian elimination with exact pivoting over the rationals.
fn solve_exact(mut m: Vec<Vec<Frac>>, mut rhs: Vec<Frac>) -> Option<Vec<Frac>> {
    let n = rhs.len();
    for k in 0..n {
        let pivot_row = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, pivot_row);
        rhs.swap(k, pivot_row);
        let piv = m[k][k].clone();
        for i in (k + 1)..n {
            if m[i][k].is_zero() {
                continue;
            }
            let factor = m[i][k].clone() / piv.clone();
            for j in k..n {
                let delta = factor.clone() * m[k][j].clone();
                m[i][j] -= delta;
            }
            let delta = factor * rhs[k].clone();
            rhs[i] -= delta;
        }
    }
    let mut x = vec![Frac::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in (i + 1)..n {
            acc -= m[i][j].clone() * x[j].clone();
        }
        x[i] = acc / m[i][i].clone();
    }
    Some(x)
}

fn check_steps(s: usize, max: usize) -> Result<()> {
    if s < 1 || s > max {
        Err(Error::StepCount { s, min: 1, max })
    } else {
        Ok(())
    }
}

/// s-step Adams-Bashforth predictor of order s: `ã_0 = -1`, derivative
/// weights from `Σ_j (-j)^{q-1} b̃_j = 1/q`, q = 1..s.
pub fn derive_adams_bashforth(s: usize) -> Result<ExplicitTable> {
    check_steps(s, MAX_STEPS)?;
    let m: Vec<Vec<Frac>> = (1..=s)
        .map(|q| (0..s).map(|j| neg_pow(j, q - 1)).collect())
        .collect();
    let rhs: Vec<Frac> = (1..=s).map(|q| fr(1, q as i128)).collect();
    let tilde_b = solve_exact(m, rhs)
        .ok_or_else(|| Error::InvalidScheme("Adams-Bashforth system is singular".into()))?;
    let mut tilde_a = vec![Frac::zero(); s];
    tilde_a[0] = -Frac::one();
    Ok(ExplicitTable { tilde_a, tilde_b })
}

/// s-step Adams-Moulton corrector of order s+1: `a_0 = -1`, weights
/// `(b_{-1}, b_0..b_{s-1})` from `b_{-1} + Σ_j (-j)^{q-1} b_j = 1/q`,
/// q = 1..s+1 (the new-level node sits at offset +1, so its power is 1).
pub fn derive_adams_moulton(s: usize) -> Result<ImplicitTable> {
    check_steps(s, MAX_STEPS - 1)?;
    let n = s + 1;
    let m: Vec<Vec<Frac>> = (1..=n)
        .map(|q| {
            let mut row = Vec::with_capacity(n);
            row.push(Frac::one()); // (-(-1))^{q-1} = 1
            for j in 0..s {
                row.push(neg_pow(j, q - 1));
            }
            row
        })
        .collect();
    let rhs: Vec<Frac> = (1..=n).map(|q| fr(1, q as i128)).collect();
    let sol = solve_exact(m, rhs)
        .ok_or_else(|| Error::InvalidScheme("Adams-Moulton system is singular".into()))?;
    let mut a = vec![Frac::zero(); s];
    a[0] = -Frac::one();
    Ok(ImplicitTable { a, b: sol[1..].to_vec(), b_m1: sol[0].clone() })
}

/// s-step BDF corrector of order s: all history derivative weights zero;
/// `(a_0..a_{s-1}, b_{-1})` solve the conditions q = 0..s.
pub fn derive_bdf(s: usize) -> Result<ImplicitTable> {
    check_steps(s, MAX_STEPS)?;
    let n = s + 1;
    // Row q (scaled by q!): Σ_j (-j)^q a_j - q b_{-1} = -1.
    let m: Vec<Vec<Frac>> = (0..=s)
        .map(|q| {
            let mut row: Vec<Frac> = (0..s).map(|j| neg_pow(j, q)).collect();
            row.push(fr(-(q as i128), 1));
            row
        })
        .collect();
    let rhs = vec![-Frac::one(); n];
    let sol = solve_exact(m, rhs)
        .ok_or_else(|| Error::InvalidScheme("BDF system is singular".into()))?;
    Ok(ImplicitTable { a: sol[..s].to_vec(), b: vec![Frac::zero(); s], b_m1: sol[s].clone() })
}

/// The two-parameter family of second-order pairs: forward Euler predictor
/// (zero-padded to two steps) with the implicit table
///
/// ```text
/// a_0 = -4α/(2α+1),  a_1 = (2α-1)/(2α+1),
/// b_{-1} = (2α+β)/(2α+1),  b_0 = 2(1-α-β)/(2α+1),  b_1 = β/(2α+1)
/// ```
///
/// α = 1/2, β = 0 is Crank-Nicolson (FE-CN2); α = 1, β = 0 is BDF2
/// (FE-BDF2); α = 1/2, β = 1/8 is the modified Crank-Nicolson with the best
/// damping (FE-MCN2).
pub fn second_order_family(alpha: f64, beta: f64) -> Result<SchemeCoefficients> {
    let den = 2.0 * alpha + 1.0;
    if den == 0.0 {
        return Err(Error::InvalidScheme("second-order family requires 2α+1 != 0".into()));
    }
    Ok(SchemeCoefficients {
        name: format!("second-order(alpha={alpha}, beta={beta})"),
        s: 2,
        p: 2,
        tilde_a: vec![-1.0, 0.0],
        tilde_b: vec![1.0, 0.0],
        a: vec![-4.0 * alpha / den, (2.0 * alpha - 1.0) / den],
        b: vec![2.0 * (1.0 - alpha - beta) / den, beta / den],
        b_m1: (2.0 * alpha + beta) / den,
        cfl: None,
        fractions: None,
    })
}

/// Exact-fraction version of [`second_order_family`], used by the catalog.
pub(crate) fn second_order_family_frac(alpha: Frac, beta: Frac) -> Result<ImplicitTable> {
    let den = fr(2, 1) * alpha.clone() + Frac::one();
    if den.is_zero() {
        return Err(Error::InvalidScheme("second-order family requires 2α+1 != 0".into()));
    }
    let two = fr(2, 1);
    Ok(ImplicitTable {
        a: vec![
            -(fr(4, 1) * alpha.clone()) / den.clone(),
            (two.clone() * alpha.clone() - Frac::one()) / den.clone(),
        ],
        b: vec![
            two.clone() * (Frac::one() - alpha.clone() - beta.clone()) / den.clone(),
            beta.clone() / den.clone(),
        ],
        b_m1: (two * alpha + beta) / den,
    })
}

/// The optimal explicit SSP multistep predictors, with their published
/// α/β coefficients and CFL coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SspVariant {
    /// Two-step second order, C = 1/2.
    Ssp2TwoStep,
    /// Four-step second order, C = 2/3.
    Ssp2FourStep,
    /// Four-step third order, C = 1/3.
    Ssp3FourStep,
}

/// Returns the SSP predictor table (mapped into the `ã_j = -α_j`,
/// `b̃_j = β_j` sign convention) together with its CFL coefficient.
pub fn ssp_explicit(variant: SspVariant) -> (ExplicitTable, Frac) {
    let (alpha, beta, cfl): (Vec<Frac>, Vec<Frac>, Frac) = match variant {
        SspVariant::Ssp2TwoStep => {
            (vec![fr(4, 5), fr(1, 5)], vec![fr(8, 5), fr(-2, 5)], fr(1, 2))
        }
        SspVariant::Ssp2FourStep => (
            vec![fr(8, 9), Frac::zero(), Frac::zero(), fr(1, 9)],
            vec![fr(4, 3), Frac::zero(), Frac::zero(), Frac::zero()],
            fr(2, 3),
        ),
        SspVariant::Ssp3FourStep => (
            vec![fr(16, 27), Frac::zero(), Frac::zero(), fr(11, 27)],
            vec![fr(16, 9), Frac::zero(), Frac::zero(), fr(4, 9)],
            fr(1, 3),
        ),
    };
    debug_assert!(alpha.iter().all(|x| !x.is_negative()));
    (
        ExplicitTable {
            tilde_a: alpha.into_iter().map(|x| -x).collect(),
            tilde_b: beta,
        },
        cfl,
    )
}

/// Assembles a full scheme from fraction halves, zero-padding the shorter
/// half so both share the step count `s = max` of the two.
pub(crate) fn assemble(
    name: &str,
    p: usize,
    ex: ExplicitTable,
    im: ImplicitTable,
    cfl: Option<Frac>,
) -> SchemeCoefficients {
    let s = ex.tilde_a.len().max(im.a.len());
    let pad = |mut v: Vec<Frac>| {
        v.resize(s, Frac::zero());
        v
    };
    let fr = SchemeFractions {
        tilde_a: pad(ex.tilde_a),
        tilde_b: pad(ex.tilde_b),
        a: pad(im.a),
        b: pad(im.b),
        b_m1: im.b_m1,
    };
    SchemeCoefficients::from_fractions(name, p, fr, cfl)
}
