//! Central finite-difference stencils with periodic wrapping.
//!
//! Weights (numerators over a common denominator, offsets ascending):
//!
//! ```text
//! second derivative, order 2:  (1, -2, 1) / Δx²
//! second derivative, order 4:  (-1, 16, -30, 16, -1) / (12Δx²)
//! second derivative, order 6:  (2, -27, 270, -490, 270, -27, 2) / (180Δx²)
//! first derivative,  order 4:  (1, -8, 0, 8, -1) / (12Δx)
//! ```
//!
//! Second-derivative weights are symmetric and sum to zero; first-derivative
//! weights are antisymmetric, so every stencil annihilates constants.

use rayon::prelude::*;

use super::PeriodicGrid2D;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivKind {
    First,
    Second,
}

const D2_ORDER2: [f64; 3] = [1.0, -2.0, 1.0];
const D2_ORDER4: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D2_ORDER6: [f64; 7] = [
    2.0 / 180.0,
    -27.0 / 180.0,
    270.0 / 180.0,
    -490.0 / 180.0,
    270.0 / 180.0,
    -27.0 / 180.0,
    2.0 / 180.0,
];
const D1_ORDER4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];

/// Stencil weights (offsets `-reach..=reach`, before the `1/Δx^m` scaling).
pub fn weights(kind: DerivKind, order: usize) -> Result<&'static [f64]> {
    match (kind, order) {
        (DerivKind::Second, 2) => Ok(&D2_ORDER2),
        (DerivKind::Second, 4) => Ok(&D2_ORDER4),
        (DerivKind::Second, 6) => Ok(&D2_ORDER6),
        (DerivKind::First, 4) => Ok(&D1_ORDER4),
        _ => Err(Error::Config(format!("unsupported stencil ({kind:?}, order {order})"))),
    }
}

/// Grids this wide are swept in parallel rows.
const PAR_THRESHOLD: usize = 1 << 14;

/// `out = D f` along `axis` with periodic wrapping.
pub fn apply_stencil(
    grid: &PeriodicGrid2D,
    axis: Axis,
    kind: DerivKind,
    order: usize,
    f: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let w = weights(kind, order)?;
    let reach = w.len() / 2;
    let (nx, ny) = (grid.nx, grid.ny);
    if f.len() != nx * ny || out.len() != nx * ny {
        return Err(Error::Grid("stencil field size mismatch".into()));
    }
    if nx < w.len() || ny < w.len() {
        return Err(Error::Grid(format!("grid too narrow for a reach-{reach} stencil")));
    }
    let h = match axis {
        Axis::X => grid.dx(),
        Axis::Y => grid.dy(),
    };
    let scale = match kind {
        DerivKind::First => 1.0 / h,
        DerivKind::Second => 1.0 / (h * h),
    };

    let row_op = |j: usize, row_out: &mut [f64]| match axis {
        Axis::X => {
            let row = &f[j * nx..(j + 1) * nx];
            for i in 0..nx {
                let mut acc = 0.0;
                if i >= reach && i + reach < nx {
                    for (k, &wk) in w.iter().enumerate() {
                        acc += wk * row[i + k - reach];
                    }
                } else {
                    for (k, &wk) in w.iter().enumerate() {
                        let ii = (i + nx + k - reach) % nx;
                        acc += wk * row[ii];
                    }
                }
                row_out[i] = acc * scale;
            }
        }
        Axis::Y => {
            for i in 0..nx {
                row_out[i] = 0.0;
            }
            for (k, &wk) in w.iter().enumerate() {
                let jj = (j + ny + k - reach) % ny;
                let src = &f[jj * nx..(jj + 1) * nx];
                for i in 0..nx {
                    row_out[i] += wk * src[i];
                }
            }
            for i in 0..nx {
                row_out[i] *= scale;
            }
        }
    };

    if nx * ny >= PAR_THRESHOLD {
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row_out)| row_op(j, row_out));
    } else {
        for (j, row_out) in out.chunks_mut(nx).enumerate() {
            row_op(j, row_out);
        }
    }
    Ok(())
}

/// `out = (D_xx + D_yy) f` with matching one-dimensional weights on both
/// axes (no cross-derivative terms).
pub fn laplacian_into(
    grid: &PeriodicGrid2D,
    order: usize,
    f: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let w = weights(DerivKind::Second, order)?;
    let reach = w.len() / 2;
    let (nx, ny) = (grid.nx, grid.ny);
    if f.len() != nx * ny || out.len() != nx * ny {
        return Err(Error::Grid("laplacian field size mismatch".into()));
    }
    if nx < w.len() || ny < w.len() {
        return Err(Error::Grid(format!("grid too narrow for a reach-{reach} stencil")));
    }
    let sx = 1.0 / (grid.dx() * grid.dx());
    let sy = 1.0 / (grid.dy() * grid.dy());

    let row_op = |j: usize, row_out: &mut [f64]| {
        let row = &f[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let mut acc = 0.0;
            if i >= reach && i + reach < nx {
                for (k, &wk) in w.iter().enumerate() {
                    acc += wk * row[i + k - reach];
                }
            } else {
                for (k, &wk) in w.iter().enumerate() {
                    let ii = (i + nx + k - reach) % nx;
                    acc += wk * row[ii];
                }
            }
            row_out[i] = acc * sx;
        }
        for (k, &wk) in w.iter().enumerate() {
            let jj = (j + ny + k - reach) % ny;
            let src = &f[jj * nx..(jj + 1) * nx];
            let wy = wk * sy;
            for i in 0..nx {
                row_out[i] += wy * src[i];
            }
        }
    };

    if nx * ny >= PAR_THRESHOLD {
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row_out)| row_op(j, row_out));
    } else {
        for (j, row_out) in out.chunks_mut(nx).enumerate() {
            row_op(j, row_out);
        }
    }
    Ok(())
}

/// Diagonal entry of the discrete Laplacian (the weight of the center node).
pub fn laplacian_diag(grid: &PeriodicGrid2D, order: usize) -> Result<f64> {
    let w = weights(DerivKind::Second, order)?;
    let center = w[w.len() / 2];
    Ok(center * (1.0 / (grid.dx() * grid.dx()) + 1.0 / (grid.dy() * grid.dy())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_and_symmetry() {
        for order in [2usize, 4, 6] {
            let w = weights(DerivKind::Second, order).unwrap();
            let sum: f64 = w.iter().sum();
            assert!(sum.abs() < 1e-14, "order {order} weights sum {sum}");
            for k in 0..w.len() {
                assert_eq!(w[k], w[w.len() - 1 - k], "order {order} not symmetric");
            }
        }
        let w = weights(DerivKind::First, 4).unwrap();
        assert!(w.iter().sum::<f64>().abs() < 1e-15);
        for k in 0..w.len() {
            assert_eq!(w[k], -w[w.len() - 1 - k], "first derivative not antisymmetric");
        }
    }

    #[test]
    fn unsupported_pairs_rejected() {
        assert!(weights(DerivKind::First, 2).is_err());
        assert!(weights(DerivKind::Second, 8).is_err());
    }

    #[test]
    fn constants_are_annihilated() {
        let grid = PeriodicGrid2D::square(16, 0.0, 1.0).unwrap();
        let f = vec![3.7; grid.nodes()];
        let mut out = vec![f64::NAN; grid.nodes()];
        for (kind, order) in [(DerivKind::Second, 2), (DerivKind::Second, 4), (DerivKind::Second, 6), (DerivKind::First, 4)] {
            for axis in [Axis::X, Axis::Y] {
                apply_stencil(&grid, axis, kind, order, &f, &mut out).unwrap();
                assert!(out.iter().all(|&v| v.abs() < 1e-10), "({kind:?}, {order}, {axis:?})");
            }
        }
        laplacian_into(&grid, 6, &f, &mut out).unwrap();
        assert!(out.iter().all(|&v| v.abs() < 1e-9));
    }

    /// Max error of an operator against the analytic derivative on cos/sin.
    fn trig_error(n: usize, axis: Axis, kind: DerivKind, order: usize) -> f64 {
        let grid = PeriodicGrid2D::square(n, 0.0, 2.0 * std::f64::consts::PI).unwrap();
        let mut f = vec![0.0; grid.nodes()];
        let mut exact = vec![0.0; grid.nodes()];
        for j in 0..n {
            for i in 0..n {
                let c = match axis {
                    Axis::X => grid.x(i),
                    Axis::Y => grid.y(j),
                };
                f[j * n + i] = match kind {
                    DerivKind::Second => c.cos(),
                    DerivKind::First => c.sin(),
                };
                exact[j * n + i] = match kind {
                    DerivKind::Second => -c.cos(),
                    DerivKind::First => c.cos(),
                };
            }
        }
        let mut out = vec![0.0; grid.nodes()];
        apply_stencil(&grid, axis, kind, order, &f, &mut out).unwrap();
        out.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn second_derivative_order_six_on_cosine() {
        let e1 = trig_error(64, Axis::X, DerivKind::Second, 6);
        let e2 = trig_error(128, Axis::X, DerivKind::Second, 6);
        let slope = (e1 / e2).log2();
        assert!((slope - 6.0).abs() < 0.2, "observed order {slope}");
        assert!(e1 < 1e-7);
    }

    #[test]
    fn first_derivative_order_four_on_sine() {
        let e1 = trig_error(64, Axis::Y, DerivKind::First, 4);
        let e2 = trig_error(128, Axis::Y, DerivKind::First, 4);
        let slope = (e1 / e2).log2();
        assert!((slope - 4.0).abs() < 0.2, "observed order {slope}");
    }

    #[test]
    fn second_derivative_orders_two_and_four() {
        for (order, want) in [(2usize, 2.0), (4usize, 4.0)] {
            let e1 = trig_error(64, Axis::X, DerivKind::Second, order);
            let e2 = trig_error(128, Axis::X, DerivKind::Second, order);
            let slope = (e1 / e2).log2();
            assert!((slope - want).abs() < 0.2, "order {order}: observed {slope}");
        }
    }

    #[test]
    fn laplacian_matches_sum_of_axis_stencils() {
        let n = 32;
        let grid = PeriodicGrid2D::square(n, -1.0, 2.0).unwrap();
        let f: Vec<f64> = (0..grid.nodes())
            .map(|idx| {
                let (i, j) = (idx % n, idx / n);
                (3.0 * grid.x(i)).sin() * (2.0 * grid.y(j)).cos() + grid.x(i)
            })
            .collect();
        let mut dxx = vec![0.0; grid.nodes()];
        let mut dyy = vec![0.0; grid.nodes()];
        let mut lap = vec![0.0; grid.nodes()];
        apply_stencil(&grid, Axis::X, DerivKind::Second, 4, &f, &mut dxx).unwrap();
        apply_stencil(&grid, Axis::Y, DerivKind::Second, 4, &f, &mut dyy).unwrap();
        laplacian_into(&grid, 4, &f, &mut lap).unwrap();
        for i in 0..grid.nodes() {
            assert!((lap[i] - dxx[i] - dyy[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn periodic_wrap_is_exact() {
        // A pure Fourier mode is periodic, so the truncation error is
        // proportional to |sin x| everywhere: wrapped boundary nodes must
        // match their interior mirror (x and x+π have equal |sin|), with no
        // one-sided artifacts.
        let n = 32;
        let grid = PeriodicGrid2D::square(n, 0.0, 2.0 * std::f64::consts::PI).unwrap();
        let f: Vec<f64> = (0..grid.nodes()).map(|idx| (grid.x(idx % n)).sin()).collect();
        let mut out = vec![0.0; grid.nodes()];
        apply_stencil(&grid, Axis::X, DerivKind::Second, 6, &f, &mut out).unwrap();
        let err_at = |i: usize| (out[i] + (grid.x(i)).sin()).abs();
        for (b, m) in [(1usize, n / 2 + 1), (n - 1, n / 2 - 1)] {
            let (eb, em) = (err_at(b), err_at(m));
            assert!(
                (eb - em).abs() <= 1e-12 + 0.01 * em,
                "wrapped node {b}: {eb:.3e} vs mirror {m}: {em:.3e}"
            );
        }
        assert!(err_at(0) < 1e-12, "x = 0 is a zero of the error profile");
    }
}
