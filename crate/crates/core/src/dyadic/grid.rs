use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// A dyadic cube identified by its level (0 = root) and integer coordinates
/// in `[0, 2^level)` along each axis. Unused axes (beyond the grid dimension)
/// are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cube {
    pub level: u32,
    pub index: [u32; MAX_DIM],
}

impl Cube {
    pub const ROOT: Cube = Cube { level: 0, index: [0; MAX_DIM] };

    pub fn new(level: u32, index: &[u32]) -> Self {
        let mut idx = [0u32; MAX_DIM];
        idx[..index.len()].copy_from_slice(index);
        Cube { level, index: idx }
    }

    pub fn parent(&self) -> Option<Cube> {
        if self.level == 0 {
            return None;
        }
        let mut index = self.index;
        for c in index.iter_mut() {
            *c >>= 1;
        }
        Some(Cube { level: self.level - 1, index })
    }

    /// Ancestor at `level` (the cube itself when `level == self.level`).
    pub fn ancestor(&self, level: u32) -> Option<Cube> {
        if level > self.level {
            return None;
        }
        let shift = self.level - level;
        let mut index = self.index;
        for c in index.iter_mut() {
            *c >>= shift;
        }
        Some(Cube { level, index })
    }

    /// `true` when `other` is contained in `self` (non-strict).
    pub fn contains(&self, other: &Cube) -> bool {
        other.ancestor(self.level).is_some_and(|a| a == *self)
    }

    /// Morton (Z-order) position of this cube among the cubes of its level.
    pub(crate) fn morton(&self, dim: usize) -> usize {
        let mut m = 0usize;
        for b in (0..self.level).rev() {
            for d in 0..dim {
                m = (m << 1) | ((self.index[d] >> b) & 1) as usize;
            }
        }
        m
    }

    pub(crate) fn from_morton(level: u32, dim: usize, mut m: usize) -> Cube {
        let mut index = [0u32; MAX_DIM];
        for b in 0..level {
            for d in (0..dim).rev() {
                index[d] |= ((m & 1) as u32) << b;
                m >>= 1;
            }
        }
        Cube { level, index }
    }

    /// Position among the cubes of its level in lexicographic order
    /// (last coordinate fastest).
    pub fn lex_index(&self, dim: usize) -> usize {
        let per_axis = 1usize << self.level;
        self.index[..dim].iter().fold(0usize, |acc, &c| acc * per_axis + c as usize)
    }

    pub(crate) fn from_lex(level: u32, dim: usize, mut i: usize) -> Cube {
        let per_axis = 1usize << level;
        let mut index = [0u32; MAX_DIM];
        for d in (0..dim).rev() {
            index[d] = (i % per_axis) as u32;
            i /= per_axis;
        }
        Cube { level, index }
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}{:?}", self.level, self.index)
    }
}

#[derive(Debug)]
struct Layout {
    /// Morton position -> lexicographic index
    lex_of_morton: Vec<u32>,
}

/// A root cube `origin + [0, side)^n` subdivided dyadically down to `depth`.
#[derive(Clone)]
pub struct DyadicGrid {
    dim: usize,
    depth: u32,
    origin: [f64; MAX_DIM],
    side: f64,
    layout: Arc<Layout>,
}

impl fmt::Debug for DyadicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DyadicGrid")
            .field("dim", &self.dim)
            .field("depth", &self.depth)
            .field("origin", &&self.origin[..self.dim])
            .field("side", &self.side)
            .finish()
    }
}

impl PartialEq for DyadicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.depth == other.depth
            && self.origin == other.origin
            && self.side == other.side
    }
}

impl DyadicGrid {
    pub fn new(dim: usize, depth: u32, origin: &[f64], side: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::param(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if origin.len() != dim {
            return Err(Error::param(format!(
                "origin has {} coordinates, expected {dim}",
                origin.len()
            )));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::param(format!("side must be positive, got {side}")));
        }
        if dim as u32 * depth > 26 {
            return Err(Error::param(format!(
                "grid with n={dim}, depth={depth} has too many cells"
            )));
        }
        let mut o = [0.0; MAX_DIM];
        o[..dim].copy_from_slice(origin);

        let cells = 1usize << (dim as u32 * depth);
        let mut lex_of_morton = vec![0u32; cells];
        for lex in 0..cells {
            lex_of_morton[Cube::from_lex(depth, dim, lex).morton(dim)] = lex as u32;
        }
        Ok(DyadicGrid {
            dim,
            depth,
            origin: o,
            side,
            layout: Arc::new(Layout { lex_of_morton }),
        })
    }

    /// Unit root cube `[0,1)^n`.
    pub fn unit(dim: usize, depth: u32) -> Result<Self> {
        Self::new(dim, depth, &vec![0.0; dim], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cell_count(&self) -> usize {
        1usize << (self.dim as u32 * self.depth)
    }

    pub fn cubes_at(&self, level: u32) -> usize {
        1usize << (self.dim as u32 * level)
    }

    /// Total number of cubes over all levels.
    pub fn cube_count(&self) -> usize {
        (0..=self.depth).map(|k| self.cubes_at(k)).sum()
    }

    /// Number of finest cells inside one cube of `level`.
    pub fn cells_per_cube(&self, level: u32) -> usize {
        1usize << (self.dim as u32 * (self.depth - level))
    }

    pub fn root_volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume_at(self.depth)
    }

    pub fn volume_at(&self, level: u32) -> f64 {
        (self.side * 0.5f64.powi(level as i32)).powi(self.dim as i32)
    }

    pub fn volume(&self, cube: &Cube) -> f64 {
        self.volume_at(cube.level)
    }

    pub fn cube_side(&self, cube: &Cube) -> f64 {
        self.side * 0.5f64.powi(cube.level as i32)
    }

    pub fn cube_origin(&self, cube: &Cube) -> Vec<f64> {
        let s = self.cube_side(cube);
        (0..self.dim).map(|d| self.origin[d] + cube.index[d] as f64 * s).collect()
    }

    pub fn cube_center(&self, cube: &Cube) -> Vec<f64> {
        let s = self.cube_side(cube);
        (0..self.dim)
            .map(|d| self.origin[d] + (cube.index[d] as f64 + 0.5) * s)
            .collect()
    }

    pub fn contains(&self, cube: &Cube) -> bool {
        cube.level <= self.depth
            && cube.index[..self.dim].iter().all(|&c| (c as u64) < (1u64 << cube.level))
            && cube.index[self.dim..].iter().all(|&c| c == 0)
    }

    pub(crate) fn check_cube(&self, cube: &Cube) -> Result<()> {
        if self.contains(cube) {
            Ok(())
        } else {
            Err(Error::CubeMismatch { level: cube.level })
        }
    }

    /// All cubes of `level`, lexicographic order (last coordinate fastest).
    pub fn cells(&self, level: u32) -> Result<Vec<Cube>> {
        if level > self.depth {
            return Err(Error::LevelOutOfRange { level, depth: self.depth });
        }
        Ok((0..self.cubes_at(level))
            .map(|i| Cube::from_lex(level, self.dim, i))
            .collect())
    }

    /// Every cube of the grid, root first, level by level.
    pub fn all_cubes(&self) -> impl Iterator<Item = Cube> + '_ {
        (0..=self.depth).flat_map(move |k| {
            (0..self.cubes_at(k)).map(move |i| Cube::from_lex(k, self.dim, i))
        })
    }

    /// The finest cell with lexicographic index `i`.
    pub fn cell(&self, i: usize) -> Cube {
        Cube::from_lex(self.depth, self.dim, i)
    }

    pub(crate) fn lex_of_morton(&self) -> &[u32] {
        &self.layout.lex_of_morton
    }

    /// Finest-cell Morton range `[start, end)` covered by `cube`.
    pub(crate) fn morton_range(&self, cube: &Cube) -> std::ops::Range<usize> {
        let m = cube.morton(self.dim);
        let len = self.cells_per_cube(cube.level);
        m * len..(m + 1) * len
    }

    /// Lexicographic indices of the finest cells inside `cube`.
    pub fn cells_in(&self, cube: &Cube) -> impl Iterator<Item = usize> + '_ {
        let lex = self.lex_of_morton();
        self.morton_range(cube).map(move |m| lex[m] as usize)
    }

    pub(crate) fn cube_at_morton(&self, level: u32, m: usize) -> Cube {
        Cube::from_morton(level, self.dim, m)
    }
}
