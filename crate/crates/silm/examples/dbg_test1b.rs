use silm::integrator::{integrate_from, IntegratorConfig, StartupMode};
use silm::problems::{l1_error, l1_error_component, test1_problem, PeriodicGrid2D};
use silm::schemes::builtin;

fn main() {
    let t_end = 2.0;
    let lambda = 0.5;
    for name in ["AB-BDF5"] {
        let c = builtin(name).unwrap();
        let mut errs = Vec::new();
        let mut dts = Vec::new();
        for k in [5u32, 6, 7] {
            let n = 1usize << k;
            let grid = PeriodicGrid2D::square(n, 0.0, 2.0 * std::f64::consts::PI).unwrap();
            let prob = test1_problem(&grid).unwrap();
            let steps = (t_end / (lambda * grid.dx())).round().max(1.0);
            let dt = t_end / steps;
            let cfg = IntegratorConfig { startup: StartupMode::Exact, ..IntegratorConfig::for_scheme(&c, dt) };
            let exact = |t: f64, out: &mut [f64]| prob.exact(t, out);
            match integrate_from(&c, &prob, &prob.initial(), 0.0, t_end, &cfg, Some(&exact), &mut |_, _, _| {}) {
                Ok((u, _)) => {
                    let mut ex = vec![0.0; u.len()];
                    prob.exact(t_end, &mut ex);
                    let full = l1_error(&grid, 2, &u, &ex).unwrap();
                    let w2 = l1_error_component(&grid, 2, 1, &u, &ex).unwrap();
                    println!("{name} k={k} dt={dt:.4}: l1_full={full:.3e} l1_w2={w2:.3e}");
                    errs.push((full, w2));
                    dts.push(dt);
                }
                Err(e) => println!("{name} k={k}: FAILED {e}"),
            }
        }
        if errs.len() == 3 {
            let s_full = ((errs[0].0 / errs[2].0).ln()) / ((dts[0] / dts[2]).ln());
            let s_w2 = ((errs[0].1 / errs[2].1).ln()) / ((dts[0] / dts[2]).ln());
            println!("{name}: slope full={s_full:.2} w2={s_w2:.2}");
        }
    }
}
