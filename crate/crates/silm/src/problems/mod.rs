//! Method-of-lines benchmark problems on uniform periodic 2-D grids.
//!
//! All fields are flattened with components in outer blocks and row-major
//! nodes inside (`i` fastest): index `(c, i, j) = c·nx·ny + j·nx + i`.

pub mod stencil;

mod scalar;
mod test1;
mod test2;
mod test3;

pub use scalar::DahlquistProblem;
pub use test1::{test1_problem, Test1Problem};
pub use test2::{test2_problem, Test2Problem};
pub use test3::{test3_problem, Test3Problem};

use crate::{Error, Result};

/// Uniform periodic grid on `[x0, x0+Lx) × [y0, y0+Ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid2D {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub lx: f64,
    pub ly: f64,
}

impl PeriodicGrid2D {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, lx: f64, ly: f64) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::Grid(format!("grid must be at least 8×8 (stencil width), got {nx}×{ny}")));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Grid("domain lengths must be positive".into()));
        }
        Ok(Self { nx, ny, x0, y0, lx, ly })
    }

    /// Square grid with `n` nodes per side on `[origin, origin+len)²`.
    pub fn square(n: usize, origin: f64, len: f64) -> Result<Self> {
        Self::new(n, n, origin, origin, len, len)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy()
    }

    /// Nodes per component.
    pub fn nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_square(&self) -> bool {
        self.nx == self.ny && (self.dx() - self.dy()).abs() <= 1e-12 * self.dx()
    }
}

/// Nodal values of one or two components on a grid.
#[derive(Debug, Clone)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub ncomp: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn from_flat(grid: &PeriodicGrid2D, ncomp: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != ncomp * grid.nodes() {
            return Err(Error::Grid(format!(
                "field length {} does not match {ncomp} component(s) on {}×{}",
                data.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self { nx: grid.nx, ny: grid.ny, ncomp, data })
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.nx * self.ny;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn has_non_finite(&self) -> bool {
        self.data.iter().any(|x| !x.is_finite())
    }
}

/// Grid-weighted ℓ1 distance `ΔxΔy Σ_{ij} Σ_c |numeric - exact|`.
pub fn l1_error(grid: &PeriodicGrid2D, ncomp: usize, numeric: &[f64], exact: &[f64]) -> Result<f64> {
    let len = ncomp * grid.nodes();
    if numeric.len() != len || exact.len() != len {
        return Err(Error::Grid(format!(
            "shape mismatch: expected {len}, got {} and {}",
            numeric.len(),
            exact.len()
        )));
    }
    let sum: f64 = numeric.iter().zip(exact).map(|(a, b)| (a - b).abs()).sum();
    Ok(grid.dx() * grid.dy() * sum)
}

/// ℓ1 distance restricted to one component.
pub fn l1_error_component(
    grid: &PeriodicGrid2D,
    ncomp: usize,
    comp: usize,
    numeric: &[f64],
    exact: &[f64],
) -> Result<f64> {
    let n = grid.nodes();
    if numeric.len() != ncomp * n || exact.len() != ncomp * n || comp >= ncomp {
        return Err(Error::Grid("shape mismatch in component error".into()));
    }
    let a = &numeric[comp * n..(comp + 1) * n];
    let b = &exact[comp * n..(comp + 1) * n];
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    Ok(grid.dx() * grid.dy() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_small_sizes() {
        assert!(PeriodicGrid2D::new(4, 32, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(PeriodicGrid2D::square(8, 0.0, 1.0).is_ok());
    }

    #[test]
    fn l1_error_trivial_values() {
        let grid = PeriodicGrid2D::square(8, 0.0, 2.0).unwrap();
        let a = vec![1.0; 64];
        assert_eq!(l1_error(&grid, 1, &a, &a).unwrap(), 0.0);

        // One node off by one: ΔxΔy = 0.0625.
        let mut b = a.clone();
        b[17] += 1.0;
        let err = l1_error(&grid, 1, &a, &b).unwrap();
        assert!((err - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn l1_error_shape_mismatch() {
        let grid = PeriodicGrid2D::square(8, 0.0, 2.0).unwrap();
        assert!(l1_error(&grid, 1, &[0.0; 64], &[0.0; 63]).is_err());
        assert!(l1_error(&grid, 2, &[0.0; 64], &[0.0; 64]).is_err());
    }

    #[test]
    fn field_layout_and_nan_detection() {
        let grid = PeriodicGrid2D::square(8, 0.0, 1.0).unwrap();
        let mut data = vec![0.0; 128];
        data[64] = 7.0; // first node of the second component
        let f = Field::from_flat(&grid, 2, data).unwrap();
        assert_eq!(f.comp(1)[0], 7.0);
        assert!(!f.has_non_finite());

        let mut bad = vec![0.0; 64];
        bad[5] = f64::NAN;
        assert!(Field::from_flat(&grid, 1, bad).unwrap().has_non_finite());
    }
}
