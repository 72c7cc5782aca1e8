use silm::integrator::SplitProblem;
use silm::linalg::{solve_shifted_with, FnOperator, ShiftedMethod};
use silm::problems::{test1_problem, PeriodicGrid2D};

fn main() {
    let grid = PeriodicGrid2D::square(32, 0.0, 2.0 * std::f64::consts::PI).unwrap();
    let prob = test1_problem(&grid).unwrap();
    let n = prob.dim();
    let u = prob.initial();
    let t = 0.1;
    let gamma = 0.1 * 2.0 / 3.0;
    let rhs: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.01).sin()).collect();
    let op = FnOperator::new(n, |w: &[f64], out: &mut [f64]| prob.apply_a(t, &u, w, out));

    let mut diag = vec![0.0; n];
    prob.diag_a(t, &u, &mut diag);
    for d in diag.iter_mut() { *d = 1.0 - gamma * *d; }

    for (label, pre) in [("plain", None), ("diag", Some(diag.as_slice()))] {
        let t0 = std::time::Instant::now();
        match solve_shifted_with(ShiftedMethod::Gmres, &op, gamma, &rhs, 1e-10, 5000, pre) {
            Ok(s) => println!("{label}: ok iters={} res={:.2e} ({:?})", s.iterations, s.residual, t0.elapsed()),
            Err(e) => println!("{label}: FAILED {e} ({:?})", t0.elapsed()),
        }
    }
}
