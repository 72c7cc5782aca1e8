//! Semi-implicit linear multistep time integration.
//!
//! This crate implements predictor-corrector multistep schemes for stiff
//! systems of the form
//!
//! ```text
//! du/dt = H(t, u(t), v(t)),      v = u  (the second argument is stiff)
//! ```
//!
//! where the right-hand side is evaluated implicitly only in its second
//! argument. An explicit multistep predictor produces `û^{n+1}`, which the
//! implicit corrector then uses in the non-stiff slot:
//!
//! ```text
//! û^{n+1} = -Σ ã_j u^{n-j} + Δt Σ b̃_j H(t^{n-j}, u^{n-j}, u^{n-j})
//! u^{n+1} = -Σ a_j u^{n-j} + Δt Σ b_j H(t^{n-j}, u^{n-j}, u^{n-j})
//!                          + Δt b_{-1} H(t^{n+1}, û^{n+1}, u^{n+1})
//! ```
//!
//! When `H` is linear in its second argument, `H(t,u,v) = K(t,u) + A(t,u)v`,
//! the correction is a single shifted linear solve and no nonlinear iteration
//! is needed.
//!
//! Module map:
//!
//! * [`schemes`] — coefficient tables, order-condition verification, and the
//!   derivation of the classical families (Adams-Bashforth, Adams-Moulton,
//!   BDF, SSP predictors) plus a named catalog of predictor/corrector pairs.
//! * [`integrator`] — history management, startup, and the stepping loop.
//! * [`linalg`] — matrix-free shifted solves (GMRES / dense) and complex
//!   polynomial root finding (Aberth-Ehrlich).
//! * [`stability`] — characteristic polynomial of the schemes on the linear
//!   prototype `u' = iλu + μv` and stability-region scans.
//! * [`problems`] — periodic 2-D finite-difference benchmark problems
//!   (reaction-diffusion with manufactured solution, Gray-Scott,
//!   nonlinear convection-diffusion) and the scalar prototype.

pub mod integrator;
pub mod linalg;
pub mod problems;
pub mod schemes;
pub mod stability;

mod error;
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
