use serde::{Deserialize, Serialize};

use crate::dyadic::{Cube, DyadicGrid, GridFunction, Pyramid};
use crate::error::{Error, Result};

/// Half-open range of finest cells in Morton order.
pub type CellRange = (usize, usize);

/// A finite family `𝒮` of dyadic cubes with pairwise disjoint sets
/// `E(Q) ⊆ Q`, stored as Morton cell ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFamily {
    grid: DyadicGrid,
    /// Sorted by first Morton cell, coarser first.
    cubes: Vec<Cube>,
    e_sets: Vec<Vec<CellRange>>,
}

fn sort_key(grid: &DyadicGrid, q: &Cube) -> (usize, u32) {
    (grid.morton_range(q).start, q.level)
}

/// For each cube (in sorted order), the index of its smallest strict
/// ancestor in the family.
fn family_parents(grid: &DyadicGrid, cubes: &[Cube]) -> Vec<Option<usize>> {
    let mut stack: Vec<usize> = Vec::new();
    let mut parents = Vec::with_capacity(cubes.len());
    for (j, q) in cubes.iter().enumerate() {
        let r = grid.morton_range(q);
        while let Some(&top) = stack.last() {
            if grid.morton_range(&cubes[top]).end >= r.end && cubes[top].level < q.level {
                break;
            }
            stack.pop();
        }
        parents.push(stack.last().copied());
        stack.push(j);
    }
    parents
}

fn sorted_cubes(grid: &DyadicGrid, mut cubes: Vec<Cube>) -> Result<Vec<Cube>> {
    for q in &cubes {
        grid.check_cube(q)?;
    }
    cubes.sort_by_key(|q| sort_key(grid, q));
    cubes.dedup();
    Ok(cubes)
}

impl SparseFamily {
    /// Family with the canonical `E(Q) = Q \ ∪{Q' ∈ 𝒮 : Q' ⊊ Q}`.
    /// Duplicate cubes are merged.
    pub fn from_cubes(grid: &DyadicGrid, cubes: Vec<Cube>) -> Result<Self> {
        let cubes = sorted_cubes(grid, cubes)?;
        let parents = family_parents(grid, &cubes);
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); cubes.len()];
        for (j, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(j);
            }
        }
        let e_sets = cubes
            .iter()
            .zip(&children)
            .map(|(q, kids)| {
                let r = grid.morton_range(q);
                let mut out = Vec::new();
                let mut at = r.start;
                for &c in kids {
                    let cr = grid.morton_range(&cubes[c]);
                    if cr.start > at {
                        out.push((at, cr.start));
                    }
                    at = cr.end;
                }
                if at < r.end {
                    out.push((at, r.end));
                }
                out
            })
            .collect();
        Ok(SparseFamily { grid: grid.clone(), cubes, e_sets })
    }

    /// Family with caller-supplied `E(Q)` sets, given per cube in the same
    /// order as `cubes`. Only bounds are checked here; use [`is_sparse`].
    pub fn with_e_sets(grid: &DyadicGrid, cubes: Vec<Cube>, e_sets: Vec<Vec<CellRange>>) -> Result<Self> {
        if cubes.len() != e_sets.len() {
            return Err(Error::param(format!("{} cubes but {} E sets", cubes.len(), e_sets.len())));
        }
        for q in &cubes {
            grid.check_cube(q)?;
        }
        for &(a, b) in e_sets.iter().flatten() {
            if a > b || b > grid.cell_count() {
                return Err(Error::param(format!("cell range [{a}, {b}) out of bounds")));
            }
        }
        let mut pairs: Vec<(Cube, Vec<CellRange>)> = cubes.into_iter().zip(e_sets).collect();
        pairs.sort_by_key(|(q, _)| sort_key(grid, q));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::param("duplicate cube in family"));
        }
        let (cubes, e_sets) = pairs.into_iter().unzip();
        Ok(SparseFamily { grid: grid.clone(), cubes, e_sets })
    }

    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// `E(Q_j)` as Morton cell ranges.
    pub fn e_ranges(&self, j: usize) -> &[CellRange] {
        &self.e_sets[j]
    }

    fn e_cells(&self, j: usize) -> usize {
        self.e_sets[j].iter().map(|(a, b)| b - a).sum()
    }

    /// `|E(Q_j)|`.
    pub fn e_measure(&self, j: usize) -> f64 {
        self.e_cells(j) as f64 * self.grid.cell_volume()
    }

    /// `E(Q_j)` as a mask over finest cells in lexicographic order.
    pub fn e_mask(&self, j: usize) -> Vec<bool> {
        let lex = self.grid.lex_of_morton();
        let mut mask = vec![false; self.grid.cell_count()];
        for &(a, b) in &self.e_sets[j] {
            for m in a..b {
                mask[lex[m] as usize] = true;
            }
        }
        mask
    }

    pub fn contains(&self, q: &Cube) -> bool {
        self.cubes.binary_search_by_key(&sort_key(&self.grid, q), |c| sort_key(&self.grid, c)).is_ok()
    }

    /// Indicator of membership, per level in Morton order.
    fn membership(&self) -> Vec<Vec<bool>> {
        let n = self.grid.dim();
        let mut levels: Vec<Vec<bool>> =
            (0..=self.grid.depth()).map(|k| vec![false; 1usize << (n * k as usize)]).collect();
        for q in &self.cubes {
            levels[q.level as usize][q.morton(n)] = true;
        }
        levels
    }

    pub fn to_json(&self) -> FamilyJson {
        let n = self.grid.dim();
        FamilyJson {
            dim: n,
            depth: self.grid.depth(),
            origin: self.grid.origin().to_vec(),
            side: self.grid.side(),
            cell_order: "morton".to_string(),
            cubes: self
                .cubes
                .iter()
                .zip(&self.e_sets)
                .map(|(q, e)| CubeJson {
                    level: q.level,
                    index: q.index[..n].to_vec(),
                    e_cells: e.iter().map(|&(a, b)| [a, b]).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FamilyJson) -> Result<Self> {
        if json.cell_order != "morton" {
            return Err(Error::param(format!("unsupported cell order {:?}", json.cell_order)));
        }
        let grid = DyadicGrid::new(json.dim, json.depth, &json.origin, json.side)?;
        let mut cubes = Vec::with_capacity(json.cubes.len());
        let mut e_sets = Vec::with_capacity(json.cubes.len());
        for c in &json.cubes {
            if c.index.len() != json.dim {
                return Err(Error::param(format!("cube index {:?} has the wrong dimension", c.index)));
            }
            cubes.push(Cube::new(c.level, &c.index));
            e_sets.push(c.e_cells.iter().map(|r| (r[0], r[1])).collect());
        }
        Self::with_e_sets(&grid, cubes, e_sets)
    }
}

/// On-disk form of a [`SparseFamily`]. `e_cells` are half-open ranges of
/// finest cells in Morton (Z-order) numbering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub dim: usize,
    pub depth: u32,
    pub origin: Vec<f64>,
    pub side: f64,
    pub cell_order: String,
    pub cubes: Vec<CubeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeJson {
    pub level: u32,
    pub index: Vec<u32>,
    pub e_cells: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `|∪{Q' ⊊ Q}| > ½|Q|`; `covered` is the fraction of `Q`.
    Packing { cube: Cube, covered: f64 },
    EOutsideCube { cube: Cube },
    EOverlap { first: Cube, second: Cube },
    /// `|Q| > 2|E(Q)|`; `ratio = |E(Q)|/|Q|`.
    ETooSmall { cube: Cube, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsityCheck {
    pub ok: bool,
    pub violation: Option<Violation>,
    /// `max_Q |∪{Q' ⊊ Q}|/|Q|`
    pub max_covered: f64,
    /// `min_Q |E(Q)|/|Q|`
    pub min_e_ratio: f64,
}

/// Checks packing, `E(Q) ⊆ Q`, pairwise disjointness and `|Q| <= 2|E(Q)|`.
pub fn is_sparse(s: &SparseFamily) -> SparsityCheck {
    let grid = &s.grid;
    let parents = family_parents(grid, &s.cubes);
    let mut covered = vec![0usize; s.cubes.len()];
    for (j, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            covered[*p] += grid.cells_per_cube(s.cubes[j].level);
        }
    }
    let mut violation = None;
    let mut max_covered = 0.0f64;
    let mut min_e_ratio = 1.0f64;
    for (j, q) in s.cubes.iter().enumerate() {
        let size = grid.cells_per_cube(q.level);
        let frac = covered[j] as f64 / size as f64;
        max_covered = max_covered.max(frac);
        if 2 * covered[j] > size && violation.is_none() {
            violation = Some(Violation::Packing { cube: *q, covered: frac });
        }
    }
    for (j, q) in s.cubes.iter().enumerate() {
        let r = grid.morton_range(q);
        if s.e_sets[j].iter().any(|&(a, b)| a < b && (a < r.start || b > r.end)) && violation.is_none() {
            violation = Some(Violation::EOutsideCube { cube: *q });
        }
        let size = grid.cells_per_cube(q.level);
        let e = s.e_cells(j);
        min_e_ratio = min_e_ratio.min(e as f64 / size as f64);
        if size > 2 * e && violation.is_none() {
            violation = Some(Violation::ETooSmall { cube: *q, ratio: e as f64 / size as f64 });
        }
    }
    let mut ranges: Vec<(usize, usize, usize)> = s
        .e_sets
        .iter()
        .enumerate()
        .flat_map(|(j, e)| e.iter().filter(|(a, b)| a < b).map(move |&(a, b)| (a, b, j)))
        .collect();
    ranges.sort_unstable();
    for w in ranges.windows(2) {
        if w[1].0 < w[0].1 && violation.is_none() {
            violation = Some(Violation::EOverlap { first: s.cubes[w[0].2], second: s.cubes[w[1].2] });
        }
    }
    SparsityCheck { ok: violation.is_none(), violation, max_covered, min_e_ratio }
}

/// `T^𝒮 f = Σ_{Q∈𝒮} (⨍_Q f) χ_Q`.
pub fn apply_sparse(s: &SparseFamily, f: &GridFunction) -> Result<GridFunction> {
    if s.grid != *f.grid() {
        return Err(Error::GridMismatch);
    }
    let n = s.grid.dim();
    let avg = Pyramid::of_averages(f);
    let member = s.membership();
    let mut acc = vec![0.0];
    for (k, lvl) in member.iter().enumerate() {
        acc = lvl
            .iter()
            .enumerate()
            .map(|(m, &inside)| {
                let up = if k == 0 { 0.0 } else { acc[m >> n] };
                if inside {
                    up + avg.levels[k][m]
                } else {
                    up
                }
            })
            .collect();
    }
    Ok(GridFunction::from_morton(&s.grid, &acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonResult {
    /// `max_{R ∈ 𝒮 ∪ {root}} Σ_{Q∈𝒮, Q⊆R} w(Q) / w(R)`
    pub constant: f64,
    pub argmax: Cube,
}

/// The Carleson packing constant of `𝒮` with respect to `w`.
pub fn carleson_constant(s: &SparseFamily, w: &GridFunction) -> Result<CarlesonResult> {
    if s.grid != *w.grid() {
        return Err(Error::GridMismatch);
    }
    if let Some((cell, &value)) = w.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeWeight { cell, value });
    }
    let n = s.grid.dim();
    let mass = Pyramid::sums(&s.grid, w.morton_values());
    if mass.levels[0][0] <= 0.0 {
        return Err(Error::DegenerateWeight("w vanishes identically".into()));
    }
    let member = s.membership();
    let depth = s.grid.depth() as usize;
    let mut packed: Vec<Vec<f64>> = vec![Vec::new(); depth + 1];
    for k in (0..=depth).rev() {
        packed[k] = (0..member[k].len())
            .map(|m| {
                let own = if member[k][m] { mass.levels[k][m] } else { 0.0 };
                let below = if k == depth {
                    0.0
                } else {
                    packed[k + 1][m << n..(m + 1) << n].iter().sum()
                };
                own + below
            })
            .collect();
    }
    let mut best = CarlesonResult { constant: 0.0, argmax: Cube::ROOT };
    let mut consider = |k: usize, m: usize| {
        let wr = mass.levels[k][m];
        if wr > 0.0 {
            let r = packed[k][m] / wr;
            if r > best.constant {
                best = CarlesonResult { constant: r, argmax: s.grid.cube_at_morton(k as u32, m) };
            }
        }
    };
    consider(0, 0);
    for q in &s.cubes {
        consider(q.level as usize, q.morton(n));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(dim: usize, depth: u32) -> DyadicGrid {
        DyadicGrid::unit(dim, depth).unwrap()
    }

    fn chain(cell: &Cube) -> Vec<Cube> {
        (0..=cell.level).map(|k| cell.ancestor(k).unwrap()).collect()
    }

    #[test]
    fn single_cube() {
        let g = grid(2, 3);
        let q = Cube::new(1, &[1, 0]);
        let s = SparseFamily::from_cubes(&g, vec![q]).unwrap();
        assert_eq!(s.e_measure(0), g.volume(&q));
        assert!(is_sparse(&s).ok);
        let f = GridFunction::from_centers(&g, |x| x[0] + 2.0 * x[1]);
        let t = apply_sparse(&s, &f).unwrap();
        let avg = f.average(&q).unwrap();
        for i in 0..g.cell_count() {
            let expect = if q.contains(&g.cell(i)) { avg } else { 0.0 };
            assert_eq!(t.values()[i], expect);
        }
        let k = carleson_constant(&s, &GridFunction::constant(&g, 1.0)).unwrap();
        assert_eq!(k.constant, 1.0);
    }

    #[test]
    fn chain_of_a_cell() {
        let g = grid(2, 4);
        let cell = Cube::new(4, &[5, 9]);
        let s = SparseFamily::from_cubes(&g, chain(&cell)).unwrap();
        let check = is_sparse(&s);
        assert!(check.ok, "{check:?}");
        assert_eq!(check.max_covered, 0.25);
        let t = apply_sparse(&s, &GridFunction::constant(&g, 1.0)).unwrap();
        assert_eq!(t.values()[cell.lex_index(2)], 5.0);
    }

    #[test]
    fn both_children_violate_packing() {
        let g = grid(1, 3);
        let q = Cube::new(1, &[0]);
        let s = SparseFamily::from_cubes(&g, vec![q, Cube::new(2, &[0]), Cube::new(2, &[1])]).unwrap();
        let check = is_sparse(&s);
        assert!(!check.ok);
        assert_eq!(check.violation, Some(Violation::Packing { cube: q, covered: 1.0 }));
    }

    #[test]
    fn full_chain_carleson_below_two() {
        let g = grid(1, 8);
        let s = SparseFamily::from_cubes(&g, chain(&Cube::new(8, &[0]))).unwrap();
        let k = carleson_constant(&s, &GridFunction::constant(&g, 1.0)).unwrap();
        let expect: f64 = (0..=8).map(|k| 0.5f64.powi(k)).sum();
        assert!((k.constant - expect).abs() < 1e-14 && k.constant < 2.0);
        assert_eq!(k.argmax, Cube::ROOT);
        assert!(carleson_constant(&s, &GridFunction::constant(&g, 0.0)).is_err());
    }

    #[test]
    fn bad_e_sets_detected() {
        let g = grid(1, 3);
        let a = Cube::new(1, &[0]);
        let b = Cube::new(2, &[0]);
        let s = SparseFamily::with_e_sets(&g, vec![a, b], vec![vec![(0, 4)], vec![(0, 2)]]).unwrap();
        assert!(matches!(is_sparse(&s).violation, Some(Violation::EOverlap { .. })));
        let s = SparseFamily::with_e_sets(&g, vec![b], vec![vec![(2, 4)]]).unwrap();
        assert!(matches!(is_sparse(&s).violation, Some(Violation::EOutsideCube { .. })));
        let s = SparseFamily::with_e_sets(&g, vec![a], vec![vec![(0, 1)]]).unwrap();
        assert!(matches!(is_sparse(&s).violation, Some(Violation::ETooSmall { .. })));
        assert!(SparseFamily::with_e_sets(&g, vec![a], vec![vec![(0, 9)]]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = DyadicGrid::new(2, 3, &[-1.0, 0.5], 2.0).unwrap();
        let cell = Cube::new(3, &[2, 7]);
        let s = SparseFamily::from_cubes(&g, chain(&cell)).unwrap();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        let back = SparseFamily::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn e_sets_partition_the_union() {
        let g = grid(2, 3);
        let cubes = vec![Cube::ROOT, Cube::new(1, &[0, 1]), Cube::new(2, &[0, 3]), Cube::new(3, &[7, 7])];
        let s = SparseFamily::from_cubes(&g, cubes).unwrap();
        let mut hits = vec![0; g.cell_count()];
        for j in 0..s.len() {
            for (i, m) in s.e_mask(j).iter().enumerate() {
                if *m {
                    hits[i] += 1;
                }
            }
        }
        assert!(hits.iter().all(|&h| h == 1));
    }

    fn arb_family(dim: usize, depth: u32) -> impl Strategy<Value = SparseFamily> {
        let g = grid(dim, depth);
        let total = g.cube_count();
        proptest::collection::vec(0..total, 0..12).prop_map(move |ids| {
            let all: Vec<Cube> = g.all_cubes().collect();
            SparseFamily::from_cubes(&g, ids.into_iter().map(|i| all[i]).collect()).unwrap()
        })
    }

    fn arb_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-3.0f64..3.0, len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn linear_positive_self_adjoint(s in arb_family(2, 3), a in arb_values(64), b in arb_values(64), c in -2.0f64..2.0) {
            let g = s.grid().clone();
            let f = GridFunction::new(&g, a).unwrap();
            let h = GridFunction::new(&g, b).unwrap();
            let tf = apply_sparse(&s, &f).unwrap();
            let th = apply_sparse(&s, &h).unwrap();
            let comb = apply_sparse(&s, &f.scale(c).add(&h).unwrap()).unwrap();
            for i in 0..g.cell_count() {
                prop_assert!((comb.values()[i] - (c * tf.values()[i] + th.values()[i])).abs() <= 1e-12 * (1.0 + comb.values()[i].abs()));
            }
            let lhs = tf.mul(&h).unwrap().integrate(None).unwrap();
            let rhs = f.mul(&th).unwrap().integrate(None).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            let tabs = apply_sparse(&s, &f.abs()).unwrap();
            prop_assert!(tabs.min_value() >= 0.0);
        }

        #[test]
        fn canonical_e_sets_disjoint(s in arb_family(1, 5)) {
            let check = is_sparse(&s);
            let bad = matches!(check.violation, Some(Violation::EOverlap { .. }) | Some(Violation::EOutsideCube { .. }));
            prop_assert!(!bad);
        }
    }
}
