//! Named predictor/corrector pairings.
//!
//! Each catalog name follows the `<predictor>-<corrector><p>` convention
//! where `p` is the order of the pair (= the implicit order); the explicit
//! predictor only needs order `p-1`. When the two halves have different step
//! counts the shorter table is zero-padded so both share `s = max` steps.
//!
//! Pairings:
//!
//! | name     | predictor            | corrector |
//! |----------|----------------------|-----------|
//! | FE-BE1   | identity             | backward Euler |
//! | FE-CN2   | forward Euler        | Crank-Nicolson |
//! | FE-BDF2  | forward Euler        | BDF2 |
//! | FE-MCN2  | forward Euler        | modified Crank-Nicolson (β = 1/8) |
//! | AB-AMp   | Adams-Bashforth(p-1) | Adams-Moulton of order p |
//! | AB-BDFp  | Adams-Bashforth(p-1) | BDF(p) |
//! | SSP-AM3  | 4-step SSP3          | Adams-Moulton of order 3 |
//! | SSP-BDFp | 4-step SSP3          | BDF(p) |
//! | SSP2-AM3 | 4-step SSP2          | Adams-Moulton of order 3 |
//! | SSP2-BDF3| 4-step SSP2          | BDF3 |
//!
//! The `SSP-` names use the third-order four-step predictor and the `SSP2-`
//! names the second-order four-step one. `SSP3-BDF4` and friends are accepted
//! as aliases for the `SSP-` spellings, as are `AB-AM2` = `FE-CN2` and
//! `AB-BDF2` = `FE-BDF2`.

use super::derive::{
    assemble, derive_adams_bashforth, derive_adams_moulton, derive_bdf, second_order_family_frac,
    ssp_explicit, ExplicitTable, SspVariant,
};
use super::{Frac, SchemeCoefficients};
use crate::{Error, Result};

const NAMES: [&str; 15] = [
    "FE-BE1", "FE-CN2", "FE-BDF2", "FE-MCN2", "AB-AM3", "AB-AM4", "AB-AM5", "AB-BDF3", "AB-BDF4",
    "AB-BDF5", "SSP-AM3", "SSP-BDF3", "SSP-BDF4", "SSP2-AM3", "SSP2-BDF3",
];

/// Canonical catalog names, in display order.
pub fn catalog_names() -> &'static [&'static str] {
    &NAMES
}

/// All catalog schemes, in display order.
pub fn catalog() -> Vec<SchemeCoefficients> {
    NAMES.iter().map(|n| builtin(n).expect("catalog scheme must build")).collect()
}

fn identity_predictor() -> ExplicitTable {
    ExplicitTable { tilde_a: vec![-Frac::new(1, 1)], tilde_b: vec![Frac::new(0, 1)] }
}

/// Looks up a scheme by catalog name (or alias).
pub fn builtin(name: &str) -> Result<SchemeCoefficients> {
    let canonical = match name {
        "AB-AM2" => "FE-CN2",
        "AB-BDF2" => "FE-BDF2",
        "SSP3-AM3" => "SSP-AM3",
        "SSP3-BDF3" => "SSP-BDF3",
        "SSP3-BDF4" => "SSP-BDF4",
        other => other,
    };
    let fe = derive_adams_bashforth(1)?;
    let half = Frac::new(1, 2);
    let eighth = Frac::new(1, 8);
    let zero = Frac::new(0, 1);
    let one = Frac::new(1, 1);
    let scheme = match canonical {
        "FE-BE1" => assemble(canonical, 1, identity_predictor(), derive_bdf(1)?, None),
        "FE-CN2" => assemble(canonical, 2, fe, second_order_family_frac(half, zero)?, None),
        "FE-BDF2" => assemble(canonical, 2, fe, second_order_family_frac(one, zero)?, None),
        "FE-MCN2" => assemble(canonical, 2, fe, second_order_family_frac(half, eighth)?, None),
        "AB-AM3" => assemble(canonical, 3, derive_adams_bashforth(2)?, derive_adams_moulton(2)?, None),
        "AB-AM4" => assemble(canonical, 4, derive_adams_bashforth(3)?, derive_adams_moulton(3)?, None),
        "AB-AM5" => assemble(canonical, 5, derive_adams_bashforth(4)?, derive_adams_moulton(4)?, None),
        "AB-BDF3" => assemble(canonical, 3, derive_adams_bashforth(2)?, derive_bdf(3)?, None),
        "AB-BDF4" => assemble(canonical, 4, derive_adams_bashforth(3)?, derive_bdf(4)?, None),
        "AB-BDF5" => assemble(canonical, 5, derive_adams_bashforth(4)?, derive_bdf(5)?, None),
        "SSP-AM3" => {
            let (pred, cfl) = ssp_explicit(SspVariant::Ssp3FourStep);
            assemble(canonical, 3, pred, derive_adams_moulton(2)?, Some(cfl))
        }
        "SSP-BDF3" => {
            let (pred, cfl) = ssp_explicit(SspVariant::Ssp3FourStep);
            assemble(canonical, 3, pred, derive_bdf(3)?, Some(cfl))
        }
        "SSP-BDF4" => {
            let (pred, cfl) = ssp_explicit(SspVariant::Ssp3FourStep);
            assemble(canonical, 4, pred, derive_bdf(4)?, Some(cfl))
        }
        "SSP2-AM3" => {
            let (pred, cfl) = ssp_explicit(SspVariant::Ssp2FourStep);
            assemble(canonical, 3, pred, derive_adams_moulton(2)?, Some(cfl))
        }
        "SSP2-BDF3" => {
            let (pred, cfl) = ssp_explicit(SspVariant::Ssp2FourStep);
            assemble(canonical, 3, pred, derive_bdf(3)?, Some(cfl))
        }
        other => return Err(Error::UnknownScheme(other.to_string())),
    };
    Ok(scheme)
}
