//! Calderón–Zygmund decompositions, stopping-time cube selection, sparse
//! families and the sparse operator `T^𝒮f = Σ_{Q∈𝒮} (⨍_Q f) χ_Q`.

mod cz;
mod family;
mod stopping;

pub use cz::{cz_decompose, ladder_ratio, sparse_from_cz, sparse_from_cz_with_ratio, CZDecomposition};
pub use family::{
    apply_sparse, carleson_constant, is_sparse, CarlesonResult, FamilyJson, SparseFamily, SparsityCheck,
    Violation,
};
pub use stopping::{stopping_cubes, StoppingCubes, StoppingLayer};

use crate::dyadic::{Cube, DyadicGrid};

/// Maximal cubes (top-down, first hit wins) with `value > threshold`, given
/// per-level values in Morton order. Returned as `(level, morton)` pairs in
/// Morton order of their first cell.
pub(crate) fn select_maximal(dim: usize, per_level: &[Vec<f64>], threshold: f64) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    let mut covered = vec![false];
    for (k, lvl) in per_level.iter().enumerate() {
        let mut next = vec![false; lvl.len()];
        for (m, &v) in lvl.iter().enumerate() {
            if k > 0 && covered[m >> dim] {
                next[m] = true;
            } else if v > threshold {
                next[m] = true;
                out.push((k as u32, m));
            }
        }
        covered = next;
    }
    let depth = per_level.len() - 1;
    out.sort_by_key(|&(k, m)| m << (dim * (depth - k as usize)));
    out
}

pub(crate) fn cube_of(grid: &DyadicGrid, (level, m): (u32, usize)) -> Cube {
    grid.cube_at_morton(level, m)
}
