//! Time stepping for split problems.
//!
//! A [`SplitProblem`] evaluates `H(t, u, v)` where only the second argument
//! is stiff. Each step predicts `û^{n+1}` with the explicit half of the
//! scheme, then corrects implicitly:
//!
//! * when `H` is declared linear in `v` (`H = K(t,u) + A(t,u)v`), the
//!   correction is one shifted solve
//!   `(I - Δt b_{-1} A(t^{n+1}, û)) u^{n+1} = rhs + Δt b_{-1} K(t^{n+1}, û)`;
//! * otherwise, a fixed-point iteration on
//!   `v ← rhs + Δt b_{-1} H(t^{n+1}, û, v)`.
//!
//! History keeps one sequence of states with their cached `H(t, u, u)`
//! evaluations, so a run of N steps in the linear path costs exactly N
//! `eval_h` calls (new caches) plus N `eval_k` calls (implicit stages) and
//! never re-evaluates history.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::linalg::{solve_shifted, FnOperator};
use crate::schemes::SchemeCoefficients;
use crate::{Error, Result};

/// Right-hand side with a non-stiff first state argument and a stiff second
/// one. Evaluators must be pure: independent runs may share one problem
/// across threads.
pub trait SplitProblem: Sync {
    /// State dimension m.
    fn dim(&self) -> usize;

    /// `out = H(t, u, v)`.
    fn eval_h(&self, t: f64, u: &[f64], v: &[f64], out: &mut [f64]);

    /// Whether `H(t,u,v) = K(t,u) + A(t,u)·v` holds, enabling the direct
    /// linear correction.
    fn is_linear_in_v(&self) -> bool {
        false
    }

    /// `out = K(t, u)`; required when [`Self::is_linear_in_v`] is true.
    fn eval_k(&self, _t: f64, _u: &[f64], _out: &mut [f64]) {
        unimplemented!("problem does not declare a linear-in-v structure")
    }

    /// `out = A(t, u)·w`; required when [`Self::is_linear_in_v`] is true.
    fn apply_a(&self, _t: f64, _u: &[f64], _w: &[f64], _out: &mut [f64]) {
        unimplemented!("problem does not declare a linear-in-v structure")
    }

    /// Optional closed-form solve of `(I - γ A(t,u)) x = rhs`. Returns true
    /// when it filled `out`, in which case the Krylov/dense path is skipped.
    fn shifted_solve(&self, _t: f64, _u: &[f64], _gamma: f64, _rhs: &[f64], _out: &mut [f64]) -> bool {
        false
    }

    /// Optional diagonal of `A(t,u)` for preconditioning the shifted solve.
    /// Returns true when it filled `out`.
    fn diag_a(&self, _t: f64, _u: &[f64], _out: &mut [f64]) -> bool {
        false
    }
}

/// One stored time level.
#[derive(Debug, Clone)]
struct Slot {
    t: f64,
    u: Vec<f64>,
    /// Cached `H(t, u, u)`.
    h: Vec<f64>,
}

/// Ring buffer of the last `s` accepted states, newest first.
#[derive(Debug, Clone)]
pub struct History {
    dt: f64,
    slots: VecDeque<Slot>,
}

impl History {
    /// Builds a history from slots ordered oldest → newest. Times must be
    /// uniformly spaced by `dt` (to `1e-12·dt`) and strictly increasing.
    pub fn from_slots(dt: f64, slots: Vec<(f64, Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::Config("history needs at least one slot".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        for w in slots.windows(2) {
            let gap = w[1].0 - w[0].0;
            if (gap - dt).abs() > 1e-12 * dt {
                return Err(Error::Config(format!(
                    "history not uniformly spaced: gap {gap} vs dt {dt}"
                )));
            }
        }
        let mut dq = VecDeque::with_capacity(slots.len());
        for (t, u, h) in slots {
            dq.push_front(Slot { t, u, h });
        }
        Ok(Self { dt, slots: dq })
    }

    pub fn steps(&self) -> usize {
        self.slots.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time at level `n-j` (j = 0 is the newest).
    pub fn time(&self, j: usize) -> f64 {
        self.slots[j].t
    }

    /// State at level `n-j`.
    pub fn state(&self, j: usize) -> &[f64] {
        &self.slots[j].u
    }

    /// Cached `H(t^{n-j}, u^{n-j}, u^{n-j})`.
    pub fn cached_h(&self, j: usize) -> &[f64] {
        &self.slots[j].h
    }

    pub fn newest_time(&self) -> f64 {
        self.slots[0].t
    }

    /// Rotates in a new newest level, dropping the oldest.
    fn push(&mut self, t: f64, u: Vec<f64>, h: Vec<f64>) {
        debug_assert!((t - self.slots[0].t - self.dt).abs() <= 1e-12 * self.dt.max(1.0));
        self.slots.pop_back();
        self.slots.push_front(Slot { t, u, h });
    }
}

/// How the `s` starting levels are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartupMode {
    /// Sample a user-supplied exact solution at `t_0 + jΔt`.
    Exact,
    /// Bootstrap with the low-order scheme chain on a refined sub-step.
    Cascade,
}

/// Run parameters for the integrator.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub startup: StartupMode,
    /// Relative tolerance of the implicit correction (Krylov residual or
    /// fixed-point update).
    pub linear_tol: f64,
    /// Iteration cap for the implicit correction.
    pub linear_maxiter: usize,
    /// Sub-step refinement factor used by cascade startup.
    pub cascade_substeps: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            startup: StartupMode::Cascade,
            linear_tol: 1e-10,
            linear_maxiter: 5000,
            cascade_substeps: 4,
        }
    }

    /// Defaults tuned to a scheme: cascade sub-steps `2^p` keep the startup
    /// error below the scheme error on coarse grids.
    pub fn for_scheme(c: &SchemeCoefficients, dt: f64) -> Self {
        Self { cascade_substeps: 1 << c.p.min(10), ..Self::new(dt) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.linear_tol > 0.0 && self.linear_tol < 1.0) {
            return Err(Error::Config(format!(
                "linear_tol must be in (0,1), got {}",
                self.linear_tol
            )));
        }
        if self.cascade_substeps < 1 {
            return Err(Error::Config("cascade_substeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// `out = -Σ_j state_w[j]·u^{n-j} + Δt Σ_j deriv_w[j]·h^{n-j}`.
fn weighted_combination(
    s: usize,
    dt: f64,
    state_w: &[f64],
    deriv_w: &[f64],
    hist: &History,
    out: &mut [f64],
) {
    out.fill(0.0);
    for j in 0..s {
        let aj = state_w[j];
        if aj != 0.0 {
            let u = hist.state(j);
            for i in 0..out.len() {
                out[i] -= aj * u[i];
            }
        }
        let bj = deriv_w[j];
        if bj != 0.0 {
            let w = dt * bj;
            let h = hist.cached_h(j);
            for i in 0..out.len() {
                out[i] += w * h[i];
            }
        }
    }
}

/// Advances one step: predict, correct, rotate history. The accepted state
/// becomes `hist.state(0)`.
pub fn step(
    c: &SchemeCoefficients,
    prob: &dyn SplitProblem,
    hist: &mut History,
    cfg: &IntegratorConfig,
) -> Result<()> {
    let s = c.s;
    if hist.steps() != s {
        return Err(Error::Config(format!(
            "history holds {} slots but scheme {} needs {s}",
            hist.steps(),
            c.name
        )));
    }
    let n = prob.dim();
    let dt = hist.dt();
    let t_next = hist.newest_time() + dt;

    let mut u_hat = vec![0.0; n];
    weighted_combination(s, dt, &c.tilde_a, &c.tilde_b, hist, &mut u_hat);

    let mut rhs = vec![0.0; n];
    weighted_combination(s, dt, &c.a, &c.b, hist, &mut rhs);

    let gamma = dt * c.b_m1;
    let u_next = if prob.is_linear_in_v() {
        let mut k = vec![0.0; n];
        prob.eval_k(t_next, &u_hat, &mut k);
        for i in 0..n {
            rhs[i] += gamma * k[i];
        }
        let mut x = vec![0.0; n];
        if prob.shifted_solve(t_next, &u_hat, gamma, &rhs, &mut x) {
            x
        } else {
            let op = FnOperator::new(n, |w: &[f64], out: &mut [f64]| {
                prob.apply_a(t_next, &u_hat, w, out)
            });
            let mut diag = vec![0.0; n];
            let precond = if prob.diag_a(t_next, &u_hat, &mut diag) {
                for d in diag.iter_mut() {
                    *d = 1.0 - gamma * *d;
                }
                Some(diag.as_slice())
            } else {
                None
            };
            solve_shifted(&op, gamma, &rhs, cfg.linear_tol, cfg.linear_maxiter, precond)?.x
        }
    } else {
        fixed_point_iterate(prob, t_next, &u_hat, &rhs, gamma, cfg)?
    };

    if u_next.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("state at t = {t_next}")));
    }

    let mut h_new = vec![0.0; n];
    prob.eval_h(t_next, &u_next, &u_next, &mut h_new);
    hist.push(t_next, u_next, h_new);
    Ok(())
}

/// Corrects by fixed-point iteration `v ← rhs + γ H(t, û, v)` starting from
/// `v = û`. The fallback when no linear-in-v structure is declared; diverges
/// when `γ·Lip_v(H) >= 1`.
pub fn fixed_point_correct(
    c: &SchemeCoefficients,
    prob: &dyn SplitProblem,
    hist: &History,
    u_hat: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; prob.dim()];
    weighted_combination(c.s, hist.dt(), &c.a, &c.b, hist, &mut rhs);
    let t_next = hist.newest_time() + hist.dt();
    fixed_point_iterate(prob, t_next, u_hat, &rhs, hist.dt() * c.b_m1, cfg)
}

fn fixed_point_iterate(
    prob: &dyn SplitProblem,
    t: f64,
    u_hat: &[f64],
    rhs: &[f64],
    gamma: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let n = prob.dim();
    let mut v = u_hat.to_vec();
    let mut hv = vec![0.0; n];
    let mut last_update = f64::INFINITY;
    for _ in 0..cfg.linear_maxiter {
        prob.eval_h(t, u_hat, &v, &mut hv);
        let mut diff2 = 0.0;
        let mut norm2 = 0.0;
        for i in 0..n {
            let next = rhs[i] + gamma * hv[i];
            let d = next - v[i];
            diff2 += d * d;
            norm2 += next * next;
            v[i] = next;
        }
        if !diff2.is_finite() {
            return Err(Error::FixedPoint {
                update: f64::INFINITY,
                iterations: cfg.linear_maxiter,
            });
        }
        last_update = diff2.sqrt() / (1e-30 + norm2.sqrt());
        if last_update < cfg.linear_tol {
            return Ok(v);
        }
    }
    Err(Error::FixedPoint { update: last_update, iterations: cfg.linear_maxiter })
}

/// Builds the `s` starting levels at `t_0, t_0+Δt, …, t_0+(s-1)Δt`.
///
/// `Exact` samples the supplied solution; `Cascade` bootstraps through the
/// low-order chain FE-BE1 → FE-BDF2 → AB-BDF3 → AB-BDF4 → AB-BDF5 (capped at
/// the target scheme's order) and resamples at multiples of `Δt`. The chain
/// stage of order q runs on the sub-step `Δt/cascade_substeps` refined by a
/// further factor `cascade_substeps^{cap-q}`, so the low-order stages cannot
/// limit the overall startup accuracy: the slots reproduce an exact startup
/// to `O((Δt/cascade_substeps)^p)` and beyond.
pub fn startup(
    c: &SchemeCoefficients,
    prob: &dyn SplitProblem,
    u0: &[f64],
    t0: f64,
    cfg: &IntegratorConfig,
    exact: Option<&dyn Fn(f64, &mut [f64])>,
) -> Result<History> {
    cfg.validate()?;
    let s = c.s;
    let n = prob.dim();
    let dt = cfg.dt;

    match cfg.startup {
        StartupMode::Exact => {
            let exact = exact.ok_or_else(|| {
                Error::Config("exact startup requested but no exact solution provided".into())
            })?;
            let mut slots = Vec::with_capacity(s);
            for j in 0..s {
                let t = t0 + j as f64 * dt;
                let mut u = vec![0.0; n];
                if j == 0 {
                    u.copy_from_slice(u0);
                } else {
                    exact(t, &mut u);
                }
                let mut h = vec![0.0; n];
                prob.eval_h(t, &u, &u, &mut h);
                slots.push((t, u, h));
            }
            History::from_slots(dt, slots)
        }
        StartupMode::Cascade => {
            let mut h0 = vec![0.0; n];
            prob.eval_h(t0, u0, u0, &mut h0);
            if s == 1 {
                return History::from_slots(dt, vec![(t0, u0.to_vec(), h0)]);
            }
            let r = cfg.cascade_substeps;
            let dt_sub = dt / r as f64;
            // Chain order cap: the target order, the chain length, and the
            // number of sub-levels actually available all bound it.
            let cap = c.p.clamp(1, 5).min((s - 1) * r + 1);
            let chain: Vec<SchemeCoefficients> =
                ["FE-BE1", "FE-BDF2", "AB-BDF3", "AB-BDF4", "AB-BDF5"][..cap]
                    .iter()
                    .map(|n| crate::schemes::builtin(n).expect("chain scheme"))
                    .collect();

            // Stage q (order q) runs on spacing h_q = dt_sub / r^{cap-q} and
            // produces enough levels to seed stage q+1 after resampling by r.
            // `levels` always holds every level of the current stage spacing,
            // starting at t0.
            let mut levels: Vec<(f64, Vec<f64>, Vec<f64>)> = vec![(t0, u0.to_vec(), h0)];
            for (q, scheme) in chain.iter().enumerate().map(|(i, c)| (i + 1, c)) {
                let h_q = dt_sub / (r as f64).powi((cap - q) as i32);
                let target = if q < cap {
                    t0 + (q * r) as f64 * h_q // q levels of the next spacing
                } else {
                    t0 + (s - 1) as f64 * dt
                };
                let sub_cfg = IntegratorConfig { dt: h_q, ..cfg.clone() };
                let window = levels[levels.len() - scheme.s..].to_vec();
                let mut hist = History::from_slots(h_q, window)?;
                while hist.newest_time() < target - 0.5 * h_q {
                    step(scheme, prob, &mut hist, &sub_cfg)?;
                    levels.push((hist.time(0), hist.state(0).to_vec(), hist.cached_h(0).to_vec()));
                }
                if q < cap {
                    levels = levels.iter().step_by(r).cloned().collect();
                }
            }

            // The final stage left `levels` spaced dt_sub from t0 to (s-1)Δt.
            let slots: Vec<_> = (0..s).map(|j| levels[j * r].clone()).collect();
            History::from_slots(dt, slots)
        }
    }
}

/// Steps from the current history to `t_end`, which must be an integer
/// number of steps away. The observer sees every accepted state, never the
/// predictor. Returns the number of steps taken.
pub fn integrate<O: FnMut(usize, f64, &[f64])>(
    c: &SchemeCoefficients,
    prob: &dyn SplitProblem,
    hist: &mut History,
    t_end: f64,
    cfg: &IntegratorConfig,
    observer: &mut O,
) -> Result<usize> {
    let dt = hist.dt();
    let span = t_end - hist.newest_time();
    let steps_f = span / dt;
    let n_steps = steps_f.round();
    if (steps_f - n_steps).abs() > 1e-8 * steps_f.abs().max(1.0) || n_steps < 0.0 {
        return Err(Error::Config(format!(
            "span {span} is not an integer number of steps of dt = {dt}"
        )));
    }
    let n_steps = n_steps as usize;
    for k in 1..=n_steps {
        step(c, prob, hist, cfg)?;
        observer(k, hist.newest_time(), hist.state(0));
    }
    Ok(n_steps)
}

/// Startup plus integration from `(t0, u0)` to `t_end`. Observer indices
/// count Δt-advances from `t0`, including the startup levels. A zero-length
/// run returns `u0` untouched.
pub fn integrate_from<O: FnMut(usize, f64, &[f64])>(
    c: &SchemeCoefficients,
    prob: &dyn SplitProblem,
    u0: &[f64],
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
    exact: Option<&dyn Fn(f64, &mut [f64])>,
    observer: &mut O,
) -> Result<(Vec<f64>, usize)> {
    cfg.validate()?;
    let steps_f = (t_end - t0) / cfg.dt;
    let n_total = steps_f.round();
    if (steps_f - n_total).abs() > 1e-8 * steps_f.abs().max(1.0) || n_total < 0.0 {
        return Err(Error::Config(format!(
            "(t_end - t0)/dt = {steps_f} is not an integer; adjust dt"
        )));
    }
    let n_total = n_total as usize;
    if n_total == 0 {
        return Ok((u0.to_vec(), 0));
    }
    let s = c.s;
    if n_total < s - 1 {
        return Err(Error::Config(format!(
            "{} needs {} startup levels but the run is only {n_total} steps long",
            c.name,
            s - 1
        )));
    }
    let mut hist = startup(c, prob, u0, t0, cfg, exact)?;
    for j in 1..s {
        observer(j, hist.time(s - 1 - j), hist.state(s - 1 - j));
    }
    let mut shifted = |k: usize, t: f64, u: &[f64]| observer(k + s - 1, t, u);
    integrate(c, prob, &mut hist, t_end, cfg, &mut shifted)?;
    Ok((hist.state(0).to_vec(), n_total))
}

/// Evaluation counters, exposed so tests can assert the per-step evaluation
/// economy (one cache evaluation plus one implicit-stage evaluation).
#[derive(Debug, Default)]
pub struct EvalCounts {
    pub eval_h: usize,
    pub eval_k: usize,
    pub apply_a: usize,
    pub shifted_solve: usize,
}

/// Wraps a problem and counts every evaluator call.
pub struct InstrumentedProblem<'a> {
    inner: &'a dyn SplitProblem,
    eval_h: AtomicUsize,
    eval_k: AtomicUsize,
    apply_a: AtomicUsize,
    shifted_solve: AtomicUsize,
}

impl<'a> InstrumentedProblem<'a> {
    pub fn new(inner: &'a dyn SplitProblem) -> Self {
        Self {
            inner,
            eval_h: AtomicUsize::new(0),
            eval_k: AtomicUsize::new(0),
            apply_a: AtomicUsize::new(0),
            shifted_solve: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> EvalCounts {
        EvalCounts {
            eval_h: self.eval_h.load(Ordering::Relaxed),
            eval_k: self.eval_k.load(Ordering::Relaxed),
            apply_a: self.apply_a.load(Ordering::Relaxed),
            shifted_solve: self.shifted_solve.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.eval_h.store(0, Ordering::Relaxed);
        self.eval_k.store(0, Ordering::Relaxed);
        self.apply_a.store(0, Ordering::Relaxed);
        self.shifted_solve.store(0, Ordering::Relaxed);
    }
}

impl SplitProblem for InstrumentedProblem<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval_h(&self, t: f64, u: &[f64], v: &[f64], out: &mut [f64]) {
        self.eval_h.fetch_add(1, Ordering::Relaxed);
        self.inner.eval_h(t, u, v, out)
    }
    fn is_linear_in_v(&self) -> bool {
        self.inner.is_linear_in_v()
    }
    fn eval_k(&self, t: f64, u: &[f64], out: &mut [f64]) {
        self.eval_k.fetch_add(1, Ordering::Relaxed);
        self.inner.eval_k(t, u, out)
    }
    fn apply_a(&self, t: f64, u: &[f64], w: &[f64], out: &mut [f64]) {
        self.apply_a.fetch_add(1, Ordering::Relaxed);
        self.inner.apply_a(t, u, w, out)
    }
    fn shifted_solve(&self, t: f64, u: &[f64], gamma: f64, rhs: &[f64], out: &mut [f64]) -> bool {
        let used = self.inner.shifted_solve(t, u, gamma, rhs, out);
        if used {
            self.shifted_solve.fetch_add(1, Ordering::Relaxed);
        }
        used
    }
    fn diag_a(&self, t: f64, u: &[f64], out: &mut [f64]) -> bool {
        self.inner.diag_a(t, u, out)
    }
}

/// Randomized probe that `eval_h == eval_k + apply_a` wherever a linear
/// structure is declared. Returns the worst relative mismatch.
pub fn linear_structure_mismatch(
    prob: &dyn SplitProblem,
    t: f64,
    probes: &[(Vec<f64>, Vec<f64>)],
) -> f64 {
    let n = prob.dim();
    let mut worst = 0.0f64;
    let (mut h, mut k, mut av) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (u, v) in probes {
        prob.eval_h(t, u, v, &mut h);
        prob.eval_k(t, u, &mut k);
        prob.apply_a(t, u, v, &mut av);
        for i in 0..n {
            let lhs = h[i];
            let rhs = k[i] + av[i];
            worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
    }
    worst
}
