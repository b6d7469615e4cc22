use serde::Serialize;

use crate::dyadic::{Cube, GridFunction};
use crate::error::{Error, Result};
use crate::maximal::cube_norms;
use crate::orlicz::YoungFunction;
use crate::sparse::family::CellRange;
use crate::sparse::{cube_of, select_maximal};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppingLayer {
    pub k: i32,
    /// `a^k`
    pub threshold: f64,
    /// Maximal cubes `Q_j^k` with `‖f‖_{A,Q} > a^k`, in Morton order.
    pub cubes: Vec<Cube>,
    pub norms: Vec<f64>,
    /// `E_j^k = Q_j^k \ D_{k+1}` as Morton cell ranges.
    pub e_sets: Vec<Vec<CellRange>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppingCubes {
    pub young: String,
    pub a: f64,
    pub layers: Vec<StoppingLayer>,
    /// `max |Q_j^k| / |E_j^k|`.
    pub empirical_alpha: f64,
    /// `a / (a − 2^n)`, the bound implied by convexity.
    pub alpha_bound: f64,
}

impl StoppingCubes {
    /// `D_k = ∪_j Q_j^k` as a lexicographic cell mask.
    pub fn union_mask(&self, f: &GridFunction, layer: usize) -> Vec<bool> {
        let grid = f.grid();
        let mut mask = vec![false; grid.cell_count()];
        for q in &self.layers[layer].cubes {
            for i in grid.cells_in(q) {
                mask[i] = true;
            }
        }
        mask
    }
}

/// Orlicz stopping cubes at thresholds `a^k`, `a > 2^{n+1}`. Layers run from
/// the first `k` with `‖f‖_{A,root} <= 2^n a^k` up to the last nonempty one.
pub fn stopping_cubes(f: &GridFunction, young: &YoungFunction, a: f64) -> Result<StoppingCubes> {
    let grid = f.grid();
    let n = grid.dim();
    let two_n = (1u64 << n) as f64;
    if !(a > 2.0 * two_n && a.is_finite()) {
        return Err(Error::param(format!("stopping ratio must exceed 2^(n+1) = {}, got {a}", 2.0 * two_n)));
    }
    let norms = cube_norms(f, young)?;
    let root = norms[0][0];
    if !root.is_finite() {
        return Err(Error::param("‖f‖ over the root is not finite"));
    }
    let mut layers = Vec::new();
    if root > 0.0 {
        let mut k = (root / two_n).log(a).ceil() as i32;
        while a.powi(k) * two_n < root {
            k += 1;
        }
        while a.powi(k - 1) * two_n >= root {
            k -= 1;
        }
        loop {
            let threshold = a.powi(k);
            let picked = select_maximal(n, &norms, threshold);
            if picked.is_empty() {
                break;
            }
            layers.push(StoppingLayer {
                k,
                threshold,
                norms: picked.iter().map(|&(l, m)| norms[l as usize][m]).collect(),
                cubes: picked.into_iter().map(|p| cube_of(grid, p)).collect(),
                e_sets: Vec::new(),
            });
            k += 1;
        }
    }
    let mut empirical_alpha = 1.0f64;
    for i in 0..layers.len() {
        let next: Vec<std::ops::Range<usize>> = layers
            .get(i + 1)
            .map(|l| l.cubes.iter().map(|q| grid.morton_range(q)).collect())
            .unwrap_or_default();
        let mut idx = 0;
        let mut e_sets = Vec::with_capacity(layers[i].cubes.len());
        for q in &layers[i].cubes {
            let r = grid.morton_range(q);
            let mut at = r.start;
            let mut e = Vec::new();
            while idx < next.len() && next[idx].start < r.start {
                idx += 1;
            }
            while idx < next.len() && next[idx].end <= r.end {
                if next[idx].start > at {
                    e.push((at, next[idx].start));
                }
                at = next[idx].end;
                idx += 1;
            }
            if at < r.end {
                e.push((at, r.end));
            }
            let e_cells: usize = e.iter().map(|(x, y)| y - x).sum();
            let ratio = if e_cells == 0 { f64::INFINITY } else { r.len() as f64 / e_cells as f64 };
            empirical_alpha = empirical_alpha.max(ratio);
            e_sets.push(e);
        }
        layers[i].e_sets = e_sets;
    }
    Ok(StoppingCubes {
        young: young.to_string(),
        a,
        layers,
        empirical_alpha,
        alpha_bound: a / (a - two_n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicGrid;
    use crate::maximal::orlicz_maximal;
    use crate::sparse::cz_decompose;
    use proptest::prelude::*;

    #[test]
    fn constant_function_single_layer() {
        let g = DyadicGrid::unit(2, 3).unwrap();
        let f = GridFunction::constant(&g, 3.0);
        let s = stopping_cubes(&f, &YoungFunction::log_bump(2.0, 1.0).unwrap(), 9.0).unwrap();
        assert!(s.layers.len() <= 1);
        for l in &s.layers {
            assert_eq!(l.cubes, vec![Cube::ROOT]);
        }
    }

    #[test]
    fn rejects_small_ratio() {
        let g = DyadicGrid::unit(1, 3).unwrap();
        let f = GridFunction::constant(&g, 1.0);
        assert!(stopping_cubes(&f, &YoungFunction::power(1.0).unwrap(), 4.0).is_err());
        let s = stopping_cubes(&GridFunction::constant(&g, 0.0), &YoungFunction::power(1.0).unwrap(), 5.0).unwrap();
        assert!(s.layers.is_empty());
    }

    fn arb_function(dim: usize, depth: u32) -> impl Strategy<Value = GridFunction> {
        let g = DyadicGrid::unit(dim, depth).unwrap();
        proptest::collection::vec((0.0f64..1.0, 0u32..4), g.cell_count()).prop_map(move |v| {
            let vals = v.into_iter().map(|(x, e)| x * 10f64.powi(e as i32)).collect();
            GridFunction::new(&g, vals).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn power_one_matches_cz(f in arb_function(1, 6)) {
            let s = stopping_cubes(&f, &YoungFunction::power(1.0).unwrap(), 5.0).unwrap();
            for l in &s.layers {
                let cz = cz_decompose(&f, l.threshold).unwrap();
                prop_assert_eq!(&cz.cubes, &l.cubes);
            }
        }

        #[test]
        fn lemma_properties(f in arb_function(2, 3), bump in 0.0f64..2.0) {
            let young = YoungFunction::log_bump(1.5, bump).unwrap();
            let a = 9.0;
            let s = stopping_cubes(&f, &young, a).unwrap();
            let m = orlicz_maximal(&f, &young).unwrap();
            prop_assert!(s.empirical_alpha <= s.alpha_bound * (1.0 + 1e-12));
            for (i, l) in s.layers.iter().enumerate() {
                for &v in &l.norms {
                    prop_assert!(v > l.threshold && v <= 4.0 * l.threshold * (1.0 + 1e-9));
                }
                let mask = s.union_mask(&f, i);
                for (c, &v) in m.output.values().iter().enumerate() {
                    if v > l.threshold {
                        prop_assert!(mask[c]);
                    }
                }
                if i + 1 < s.layers.len() {
                    for q in &s.layers[i + 1].cubes {
                        prop_assert!(l.cubes.iter().any(|p| p.contains(q)));
                    }
                }
            }
        }
    }
}
