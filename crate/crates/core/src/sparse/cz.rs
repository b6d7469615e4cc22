use crate::dyadic::{Cube, GridFunction, Pyramid};
use crate::error::{Error, Result};
use crate::sparse::family::SparseFamily;
use crate::sparse::{cube_of, select_maximal};

/// `f = g + Σ_j b_j` at level `λ`.
#[derive(Debug, Clone)]
pub struct CZDecomposition {
    pub lambda: f64,
    /// Maximal dyadic cubes with `⨍_Q |f| > λ`, in Morton order.
    pub cubes: Vec<Cube>,
    /// `f_{Q_j} = ⨍_{Q_j} f` (signed).
    pub averages: Vec<f64>,
    /// `⨍_{Q_j} |f|`.
    pub abs_averages: Vec<f64>,
    /// `g = Σ_j f_{Q_j} χ_{Q_j} + f χ_{Ω^c}`.
    pub good: GridFunction,
    f: GridFunction,
}

impl CZDecomposition {
    /// `b_j = (f − f_{Q_j}) χ_{Q_j}`.
    pub fn bad_part(&self, j: usize) -> GridFunction {
        let grid = self.f.grid();
        let mut v = vec![0.0; grid.cell_count()];
        for i in grid.cells_in(&self.cubes[j]) {
            v[i] = self.f.values()[i] - self.averages[j];
        }
        GridFunction::new(grid, v).expect("same grid")
    }

    pub fn bad_parts(&self) -> Vec<GridFunction> {
        (0..self.cubes.len()).map(|j| self.bad_part(j)).collect()
    }

    /// `b = Σ_j b_j`.
    pub fn bad(&self) -> GridFunction {
        self.f.zip_with(&self.good, |x, y| x - y).expect("same grid")
    }

    /// Cell mask of `Ω = ∪_j Q_j`.
    pub fn omega(&self) -> Vec<bool> {
        let grid = self.f.grid();
        let mut mask = vec![false; grid.cell_count()];
        for q in &self.cubes {
            for i in grid.cells_in(q) {
                mask[i] = true;
            }
        }
        mask
    }

    /// Every broken invariant, described; empty when the decomposition is
    /// sound at relative tolerance `tol`.
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let grid = self.f.grid();
        let n = grid.dim();
        let cap = (1u64 << n) as f64 * self.lambda;
        let mut out = Vec::new();
        for (j, q) in self.cubes.iter().enumerate() {
            let avg = self.abs_averages[j];
            if !(avg > self.lambda) || avg > cap * (1.0 + tol) {
                out.push(format!("{q}: average {avg} outside ({}, {cap}]", self.lambda));
            }
            if let Some(p) = q.parent() {
                let pa = self.f.abs().average(&p).expect("in grid");
                if pa > self.lambda {
                    out.push(format!("{q}: not maximal, parent average {pa}"));
                }
            }
            let b = self.bad_part(j);
            let mass = b.mass(q).expect("in grid");
            let scale = self.f.abs().mass(q).expect("in grid").max(f64::MIN_POSITIVE);
            if mass.abs() > tol * scale {
                out.push(format!("{q}: ∫ b_j = {mass}"));
            }
        }
        for w in self.cubes.windows(2) {
            if w[0].contains(&w[1]) || w[1].contains(&w[0]) {
                out.push(format!("{} and {} overlap", w[0], w[1]));
            }
        }
        let gmax = self.good.max_abs();
        if gmax > cap * (1.0 + tol) {
            out.push(format!("‖g‖_∞ = {gmax} exceeds {cap}"));
        }
        let mut recon = self.good.clone();
        for j in 0..self.cubes.len() {
            recon = recon.add(&self.bad_part(j)).expect("same grid");
        }
        let scale = self.f.max_abs().max(f64::MIN_POSITIVE);
        for (i, (x, y)) in recon.values().iter().zip(self.f.values()).enumerate() {
            if (x - y).abs() > tol * scale {
                out.push(format!("cell {i}: g + Σb_j = {x}, f = {y}"));
                break;
            }
        }
        out
    }
}

/// Calderón–Zygmund decomposition at level `λ` (strict selection
/// `⨍_Q |f| > λ`).
pub fn cz_decompose(f: &GridFunction, lambda: f64) -> Result<CZDecomposition> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    let grid = f.grid();
    let abs = Pyramid::of_averages(&f.abs());
    let signed = Pyramid::of_averages(f);
    let picked = select_maximal(grid.dim(), &abs.levels, lambda);
    let mut good = f.values().to_vec();
    let mut cubes = Vec::with_capacity(picked.len());
    let mut averages = Vec::with_capacity(picked.len());
    let mut abs_averages = Vec::with_capacity(picked.len());
    for &(k, m) in &picked {
        let q = cube_of(grid, (k, m));
        let avg = signed.levels[k as usize][m];
        for i in grid.cells_in(&q) {
            good[i] = avg;
        }
        cubes.push(q);
        averages.push(avg);
        abs_averages.push(abs.levels[k as usize][m]);
    }
    Ok(CZDecomposition {
        lambda,
        cubes,
        averages,
        abs_averages,
        good: GridFunction::new(grid, good)?,
        f: f.clone(),
    })
}

/// Default ladder ratio `2^{n+1} + 1`.
pub fn ladder_ratio(dim: usize) -> f64 {
    ((1u64 << (dim + 1)) + 1) as f64
}

/// Sparse family from the CZ cubes at `λ₀ a^k`, `a = 2^{n+1} + 1`.
pub fn sparse_from_cz(f: &GridFunction, lambda0: f64) -> Result<SparseFamily> {
    sparse_from_cz_with_ratio(f, lambda0, ladder_ratio(f.grid().dim()))
}

/// As [`sparse_from_cz`] with ratio `a > 2^{n+1}`. The ladder starts at the
/// first rung with `⨍_root |f| <= 2^n λ₀ a^k` (and `k >= 0`) so that a
/// selected root still satisfies the CZ upper bound; it stops once nothing
/// is selected.
pub fn sparse_from_cz_with_ratio(f: &GridFunction, lambda0: f64, a: f64) -> Result<SparseFamily> {
    let grid = f.grid();
    let n = grid.dim();
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::param(format!("lambda must be positive, got {lambda0}")));
    }
    if !(a > (1u64 << (n + 1)) as f64) {
        return Err(Error::param(format!("ladder ratio must exceed 2^(n+1), got {a}")));
    }
    let abs = Pyramid::of_averages(&f.abs());
    let root_avg = abs.levels[0][0];
    if root_avg == 0.0 {
        return Err(Error::param("sparse_from_cz needs a function that is not identically zero"));
    }
    let two_n = (1u64 << n) as f64;
    let mut k = 0i32;
    while lambda0 * a.powi(k) * two_n < root_avg {
        k += 1;
    }
    let mut picked = Vec::new();
    loop {
        let layer = select_maximal(n, &abs.levels, lambda0 * a.powi(k));
        if layer.is_empty() {
            break;
        }
        picked.extend(layer);
        k += 1;
    }
    let cubes: Vec<Cube> = picked.into_iter().map(|p| cube_of(grid, p)).collect();
    SparseFamily::from_cubes(grid, cubes)
}
