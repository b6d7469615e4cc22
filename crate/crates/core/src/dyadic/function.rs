use crate::dyadic::grid::{Cube, DyadicGrid};
use crate::error::{Error, Result};

/// A piecewise-constant function on the finest cells of a grid. Values are in
/// lexicographic cell order (last coordinate fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: DyadicGrid,
    values: Vec<f64>,
    weight: bool,
}

impl GridFunction {
    pub fn new(grid: &DyadicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::ValueCount { expected: grid.cell_count(), found: values.len() });
        }
        Ok(GridFunction { grid: grid.clone(), values, weight: false })
    }

    /// A weight: every value must be finite and nonnegative.
    pub fn weight(grid: &DyadicGrid, values: Vec<f64>) -> Result<Self> {
        let mut f = Self::new(grid, values)?;
        f.mark_weight()?;
        Ok(f)
    }

    pub fn constant(grid: &DyadicGrid, c: f64) -> Self {
        GridFunction { grid: grid.clone(), values: vec![c; grid.cell_count()], weight: false }
    }

    /// Samples `f` at the center of every finest cell.
    pub fn from_centers(grid: &DyadicGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.cell_count())
            .map(|i| f(&grid.cube_center(&grid.cell(i))))
            .collect();
        GridFunction { grid: grid.clone(), values, weight: false }
    }

    /// Indicator of a cube.
    pub fn indicator(grid: &DyadicGrid, cube: &Cube) -> Result<Self> {
        grid.check_cube(cube)?;
        let mut values = vec![0.0; grid.cell_count()];
        for i in grid.cells_in(cube) {
            values[i] = 1.0;
        }
        Ok(GridFunction { grid: grid.clone(), values, weight: false })
    }

    pub(crate) fn from_morton(grid: &DyadicGrid, morton: &[f64]) -> Self {
        let lex = grid.lex_of_morton();
        let mut values = vec![0.0; morton.len()];
        for (m, &v) in morton.iter().enumerate() {
            values[lex[m] as usize] = v;
        }
        GridFunction { grid: grid.clone(), values, weight: false }
    }

    pub fn mark_weight(&mut self) -> Result<()> {
        if let Some((cell, &value)) =
            self.values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(Error::NegativeWeight { cell, value });
        }
        self.weight = true;
        Ok(())
    }

    pub fn into_weight(mut self) -> Result<Self> {
        self.mark_weight()?;
        Ok(self)
    }

    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_weight(&self) -> bool {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values rearranged in Morton order.
    pub(crate) fn morton_values(&self) -> Vec<f64> {
        self.grid.lex_of_morton().iter().map(|&i| self.values[i as usize]).collect()
    }

    pub(crate) fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            weight: false,
        }
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        self.same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            weight: false,
        })
    }

    pub fn abs(&self) -> GridFunction {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Multiplies by the indicator of the cells where `mask` is `true`.
    pub fn masked(&self, mask: &[bool]) -> Result<GridFunction> {
        if mask.len() != self.values.len() {
            return Err(Error::ValueCount { expected: self.values.len(), found: mask.len() });
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect(),
            weight: self.weight,
        })
    }

    /// `(1/|Q|) ∫_Q f`, as an exact finite sum.
    pub fn average(&self, cube: &Cube) -> Result<f64> {
        self.grid.check_cube(cube)?;
        let n = self.grid.cells_per_cube(cube.level);
        let sum: f64 = self.grid.cells_in(cube).map(|i| self.values[i]).sum();
        Ok(sum / n as f64)
    }

    /// `∫ f·w dx` with `w = 1` when absent.
    pub fn integrate(&self, w: Option<&GridFunction>) -> Result<f64> {
        let sum: f64 = match w {
            None => self.values.iter().sum(),
            Some(w) => {
                self.same_grid(w)?;
                self.values.iter().zip(&w.values).map(|(a, b)| a * b).sum()
            }
        };
        Ok(sum * self.grid.cell_volume())
    }

    /// `w(E) = ∫_E w` over a cube.
    pub fn mass(&self, cube: &Cube) -> Result<f64> {
        Ok(self.average(cube)? * self.grid.volume(cube))
    }
}

/// Per-level cube sums of a function, stored in Morton order. Level `k`
/// holds `2^{nk}` sums; the value for a cube is the plain sum of its cell
/// values, so the average is `sum / cells_per_cube(k)`.
#[derive(Debug, Clone)]
pub(crate) struct Pyramid {
    pub levels: Vec<Vec<f64>>,
}

impl Pyramid {
    /// Sums of `morton` (finest values in Morton order) over every cube.
    pub fn sums(grid: &DyadicGrid, morton: Vec<f64>) -> Self {
        let children = 1usize << grid.dim();
        let depth = grid.depth() as usize;
        let mut levels = vec![Vec::new(); depth + 1];
        levels[depth] = morton;
        for k in (0..depth).rev() {
            let next = &levels[k + 1];
            let cur: Vec<f64> = next.chunks_exact(children).map(|c| c.iter().sum()).collect();
            levels[k] = cur;
        }
        Pyramid { levels }
    }

    /// Averages of `morton` over every cube.
    pub fn averages(grid: &DyadicGrid, morton: Vec<f64>) -> Self {
        let mut p = Self::sums(grid, morton);
        for (k, lvl) in p.levels.iter_mut().enumerate() {
            let n = grid.cells_per_cube(k as u32) as f64;
            for v in lvl.iter_mut() {
                *v /= n;
            }
        }
        p
    }

    pub fn of_averages(f: &GridFunction) -> Self {
        Self::averages(f.grid(), f.morton_values())
    }
}
