use silm::integrator::{integrate_from, IntegratorConfig, StartupMode};
use silm::problems::{l1_error, test1_problem, PeriodicGrid2D};
use silm::schemes::builtin;

fn main() {
    let t_end = 2.0;
    let lambda = 0.5;
    for name in ["AB-BDF3", "SSP-BDF4", "AB-AM5"] {
        let c = builtin(name).unwrap();
        for k in [5u32, 6, 7] {
            let n = 1usize << k;
            let grid = PeriodicGrid2D::square(n, 0.0, 2.0 * std::f64::consts::PI).unwrap();
            let prob = test1_problem(&grid).unwrap();
            let steps = (t_end / (lambda * grid.dx())).round().max(1.0);
            let dt = t_end / steps;
            let cfg = IntegratorConfig { startup: StartupMode::Exact, ..IntegratorConfig::for_scheme(&c, dt) };
            let exact = |t: f64, out: &mut [f64]| prob.exact(t, out);
            let mut maxnorm_hist = Vec::new();
            let res = integrate_from(&c, &prob, &prob.initial(), 0.0, t_end, &cfg, Some(&exact), &mut |kstep, _t, u: &[f64]| {
                let m = u.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                maxnorm_hist.push((kstep, m));
            });
            match res {
                Ok((u, steps)) => {
                    let mut ex = vec![0.0; u.len()];
                    prob.exact(t_end, &mut ex);
                    let err = l1_error(&grid, 2, &u, &ex).unwrap();
                    println!("{name} k={k} dt={dt:.4} steps={steps}: l1={err:.3e}, final max|u|={:.3}", maxnorm_hist.last().unwrap().1);
                }
                Err(e) => {
                    println!("{name} k={k} dt={dt:.4}: FAILED {e}");
                    for (kk, m) in &maxnorm_hist {
                        if *kk % 5 == 0 || *m > 10.0 { println!("   step {kk}: max|u| = {m:.3e}"); }
                    }
                }
            }
        }
    }
}
