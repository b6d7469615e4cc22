//! Dyadic Hardy–Littlewood and Orlicz maximal operators: the supremum over
//! the ancestor chain of each finest cell.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{GridFunction, Pyramid};
use crate::error::{Error, Result};
use crate::orlicz::luxemburg::luxemburg_with_unit;
use crate::orlicz::YoungFunction;

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    /// `M`, averages of `|f|`.
    HardyLittlewood,
    /// `M_A`, Luxemburg norms.
    Orlicz(YoungFunction),
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::HardyLittlewood => write!(f, "M"),
            Operator::Orlicz(YoungFunction::Power { p }) => write!(f, "M_r[r={p}]"),
            Operator::Orlicz(a) => write!(f, "M_A[{a}]"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximalResult {
    pub output: GridFunction,
    pub operator: Operator,
    /// Per finest cell (lex order), the level of the coarsest ancestor
    /// attaining the supremum.
    pub argmax_level: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionRow {
    pub t: f64,
    /// `|{M_A f > t}|`
    pub level_set: f64,
    /// `∫ A(f/t) dx`
    pub modular: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    pub young: String,
    pub rows: Vec<DistributionRow>,
    pub all_hold: bool,
}

/// Values per level in Morton order, one per cube.
pub(crate) type CubeValues = Vec<Vec<f64>>;

/// Running maximum down the tree. Returns Morton-ordered finest values and
/// argmax levels; a finer cube only wins if it beats the running max by a
/// relative `1e-12`, so ties resolve to the coarsest cube.
pub(crate) fn ancestor_max(dim: usize, per_level: &CubeValues) -> (Vec<f64>, Vec<u32>) {
    let mut best = per_level[0].clone();
    let mut arg = vec![0u32; best.len()];
    for (k, lvl) in per_level.iter().enumerate().skip(1) {
        let (nb, na): (Vec<f64>, Vec<u32>) = lvl
            .par_iter()
            .enumerate()
            .map(|(m, &v)| {
                let parent = m >> dim;
                let (b, a) = (best[parent], arg[parent]);
                if v > b + 1e-12 * b.abs() {
                    (v, k as u32)
                } else {
                    (b, a)
                }
            })
            .unzip();
        best = nb;
        arg = na;
    }
    (best, arg)
}

fn finish(f: &GridFunction, per_level: &CubeValues, operator: Operator) -> MaximalResult {
    let grid = f.grid();
    let (best, arg) = ancestor_max(grid.dim(), per_level);
    let output = GridFunction::from_morton(grid, &best);
    let lex = grid.lex_of_morton();
    let mut argmax_level = vec![0u32; arg.len()];
    for (m, &a) in arg.iter().enumerate() {
        argmax_level[lex[m] as usize] = a;
    }
    MaximalResult { output, operator, argmax_level }
}

/// `Mf(x) = max_{Q ∋ x} ⨍_Q |f|` over dyadic `Q`.
pub fn dyadic_maximal(f: &GridFunction) -> MaximalResult {
    let pyr = Pyramid::of_averages(&f.abs());
    finish(f, &pyr.levels, Operator::HardyLittlewood)
}

/// `M_A f(x) = max_{Q ∋ x} ‖f‖_{A,Q}`.
pub fn orlicz_maximal(f: &GridFunction, a: &YoungFunction) -> Result<MaximalResult> {
    let norms = cube_norms(f, a)?;
    Ok(finish(f, &norms, Operator::Orlicz(a.clone())))
}

/// `M_A(f χ_E)` for a mask `E` on the finest cells.
pub fn restricted_maximal(f: &GridFunction, mask: &[bool], a: &YoungFunction) -> Result<MaximalResult> {
    orlicz_maximal(&f.masked(mask)?, a)
}

struct CacheEntry {
    dims: (usize, u32),
    morton_abs: Vec<f64>,
    norms: Arc<CubeValues>,
}

const CACHE_CAP: usize = 64;

fn cache() -> &'static Mutex<HashMap<(u64, String), Arc<CacheEntry>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, String), Arc<CacheEntry>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Drops every memoized table of per-cube Luxemburg norms.
pub fn clear_luxemburg_cache() {
    cache().lock().expect("luxemburg cache").clear();
}

/// `‖f‖_{A,Q}` for every dyadic cube, per level in Morton order. Memoized
/// per (function, Young function); entries are immutable once published.
pub(crate) fn cube_norms(f: &GridFunction, a: &YoungFunction) -> Result<Arc<CubeValues>> {
    let grid = f.grid();
    let morton_abs: Vec<f64> = f.morton_values().into_iter().map(f64::abs).collect();
    let dims = (grid.dim(), grid.depth());
    let mut h = DefaultHasher::new();
    dims.hash(&mut h);
    for v in &morton_abs {
        v.to_bits().hash(&mut h);
    }
    let key = (h.finish(), a.to_string());
    if let Some(e) = cache().lock().expect("luxemburg cache").get(&key) {
        if e.dims == dims && e.morton_abs == morton_abs {
            return Ok(e.norms.clone());
        }
    }
    let norms = Arc::new(compute_norms(grid.dim(), grid.depth(), &morton_abs, a)?);
    let mut c = cache().lock().expect("luxemburg cache");
    if c.len() >= CACHE_CAP {
        c.clear();
    }
    let entry = c
        .entry(key)
        .or_insert_with(|| Arc::new(CacheEntry { dims, morton_abs, norms: norms.clone() }));
    Ok(entry.norms.clone())
}

fn compute_norms(dim: usize, depth: u32, morton_abs: &[f64], a: &YoungFunction) -> Result<CubeValues> {
    if let YoungFunction::Power { p } = a {
        if *p == 1.0 {
            let mut levels = Vec::with_capacity(depth as usize + 1);
            let mut cur = morton_abs.to_vec();
            let mut size = 1.0;
            let mut sums = vec![cur.clone()];
            for _ in 0..depth {
                cur = cur.chunks_exact(1 << dim).map(|c| c.iter().sum()).collect();
                sums.push(cur.clone());
            }
            for s in sums.into_iter() {
                levels.push(s.into_iter().map(|v| v / size).collect::<Vec<f64>>());
                size *= (1usize << dim) as f64;
            }
            levels.reverse();
            return Ok(levels);
        }
    }
    let unit = a.inverse(1.0);
    (0..=depth)
        .map(|k| {
            let len = 1usize << (dim * (depth - k) as usize);
            morton_abs
                .par_chunks(len)
                .map(|vals| luxemburg_with_unit(vals, a, unit).map(|r| r.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// Checks `|{M_A f > t}| <= ∫ A(f/t) dx` at each level `t`.
pub fn distribution_check(f: &GridFunction, a: &YoungFunction, t_levels: &[f64]) -> Result<DistributionReport> {
    if let Some(v) = f.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("distribution check needs f >= 0, found {v}")));
    }
    if let Some(t) = t_levels.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!("levels must be positive, got {t}")));
    }
    let m = orlicz_maximal(f, a)?;
    let cell = f.grid().cell_volume();
    let rows: Vec<DistributionRow> = t_levels
        .iter()
        .map(|&t| {
            let level_set = m.output.values().iter().filter(|&&v| v > t).count() as f64 * cell;
            let modular = f.values().iter().map(|&v| a.value(v / t)).sum::<f64>() * cell;
            DistributionRow { t, level_set, modular, holds: level_set <= modular * (1.0 + 1e-12) }
        })
        .collect();
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(DistributionReport { young: a.to_string(), rows, all_hold })
}
