//! Finite dyadic grids on a root cube, piecewise-constant functions on the
//! finest cells, and the DGF1 file format.

pub mod dgf;
mod function;
mod grid;

pub(crate) use function::Pyramid;
pub use function::GridFunction;
pub use grid::{Cube, DyadicGrid, MAX_DIM};

use crate::error::Result;

/// All cubes of `level` in lexicographic order.
pub fn cells(grid: &DyadicGrid, level: u32) -> Result<Vec<Cube>> {
    grid.cells(level)
}

pub fn average(f: &GridFunction, cube: &Cube) -> Result<f64> {
    f.average(cube)
}

pub fn integrate(f: &GridFunction, w: Option<&GridFunction>) -> Result<f64> {
    f.integrate(w)
}
