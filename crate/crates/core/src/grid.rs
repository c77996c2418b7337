//! Collocation grids and nodal fields on the square `[0, 2π]²`.
//!
//! Two boundary treatments are supported. Homogeneous Neumann is realized on
//! midpoint nodes `x_i = (i + 1/2)·2π/n`, where the cosine basis satisfies
//! the no-flux condition exactly. Periodic is realized on the standard
//! equispaced nodes `x_i = i·2π/n` with the Fourier basis. Fields store
//! nodal values row-major with the x index fastest: `data[j*nx + i]` holds
//! the value at `(x_i, y_j)`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Area of the computational domain `[0, 2π]²`.
pub const DOMAIN_AREA: f64 = 4.0 * PI * PI;

/// Boundary condition; selects both the node placement and the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Homogeneous Neumann: cosine basis on midpoint nodes.
    Neumann,
    /// Periodic: Fourier basis on standard nodes.
    Periodic,
}

impl Boundary {
    /// Lower-case name used in output headers and snapshot files.
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Neumann => "neumann",
            Boundary::Periodic => "periodic",
        }
    }
}

/// A uniform `nx × ny` collocation grid on `[0, 2π]²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    boundary: Boundary,
}

impl Grid {
    /// Creates a grid. Both dimensions must be even and at least 4; the
    /// transform layout assumes even lengths.
    pub fn new(nx: usize, ny: usize, boundary: Boundary) -> Result<Self> {
        if nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::BadGrid { nx, ny });
        }
        Ok(Self { nx, ny, boundary })
    }

    /// Number of nodes in x.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of nodes in y.
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Boundary condition of the grid.
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    /// Always false; grids have at least 16 nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh spacing in x, `2π/nx`.
    pub fn hx(&self) -> f64 {
        2.0 * PI / self.nx as f64
    }

    /// Mesh spacing in y, `2π/ny`.
    pub fn hy(&self) -> f64 {
        2.0 * PI / self.ny as f64
    }

    /// x coordinate of column `i`.
    pub fn node_x(&self, i: usize) -> f64 {
        match self.boundary {
            Boundary::Neumann => (i as f64 + 0.5) * self.hx(),
            Boundary::Periodic => i as f64 * self.hx(),
        }
    }

    /// y coordinate of row `j`.
    pub fn node_y(&self, j: usize) -> f64 {
        match self.boundary {
            Boundary::Neumann => (j as f64 + 0.5) * self.hy(),
            Boundary::Periodic => j as f64 * self.hy(),
        }
    }

    /// Area element of the uniform quadrature rule, `hx·hy`.
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }
}

/// Nodal values of a scalar function on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    data: Vec<f64>,
}

impl Field {
    /// The zero field.
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, data: vec![0.0; grid.len()] }
    }

    /// The constant field `c`.
    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, data: vec![c; grid.len()] }
    }

    /// Evaluates `f(x, y)` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.node_y(j);
            for i in 0..grid.nx() {
                data.push(f(grid.node_x(i), y));
            }
        }
        Self { grid, data }
    }

    /// Wraps existing nodal values; `data.len()` must equal `grid.len()`.
    pub fn from_data(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field data has {} values but grid {}x{} has {} nodes",
                data.len(),
                grid.nx(),
                grid.ny(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    /// The grid the field lives on.
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Nodal values, row-major with x fastest.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable nodal values.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Value at column `i`, row `j`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.nx() + i]
    }

    /// Largest absolute nodal value.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Mean nodal value, i.e. the quadrature mean over the domain.
    /// Summation is pairwise, so the result is deterministic and accurate.
    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.data) / self.data.len() as f64
    }

    /// In-place `self += alpha * other`. Panics on grid mismatch; mixing
    /// grids in arithmetic is a programming error, not a runtime condition.
    pub fn axpy(&mut self, alpha: f64, other: &Field) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += alpha * b;
        }
    }

    /// In-place `self *= alpha`.
    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    /// New field with `f` applied at every node.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// New field `self - other`. Panics on grid mismatch.
    pub fn minus(&self, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "difference of mismatched grids");
        let data = self.data.iter().zip(other.data.iter()).map(|(a, b)| a - b).collect();
        Field { grid: self.grid, data }
    }
}

/// Deterministic pairwise summation. Chunks of up to 64 values are summed
/// sequentially; larger slices split in half recursively. The fixed
/// splitting scheme keeps results independent of the caller's context.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 64 {
        let mut s = 0.0;
        for &v in values {
            s += v;
        }
        s
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}
