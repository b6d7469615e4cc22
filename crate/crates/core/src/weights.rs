//! Dyadic weight characteristics: `[w]_{A₁}`, `[w]_{A_p}`, the Fujii–Wilson
//! `[w]_{A∞}`, reverse Hölder exponents, and the structural checks built
//! on them.

use serde::Serialize;

use crate::dyadic::{Cube, GridFunction, Pyramid};
use crate::error::{Error, Result};
use crate::maximal::{dyadic_maximal, orlicz_maximal};
use crate::orlicz::YoungFunction;

/// Default reverse Hölder scale; passes on the whole standard corpus.
pub const DEFAULT_TAU: f64 = 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constant {
    /// `+∞` when the weight vanishes where it matters.
    pub value: f64,
    pub argmax: Cube,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightConstants {
    pub a1: Constant,
    pub p: Option<f64>,
    pub ap: Option<Constant>,
    pub ainfty: Constant,
}

fn check_weight(w: &GridFunction) -> Result<()> {
    if let Some((cell, &value)) = w.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::NegativeWeight { cell, value });
    }
    if w.values().iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateWeight("w vanishes identically".into()));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("p must exceed 1, got {p}")))
    }
}

/// `ess sup M^d w / w` over finest cells.
pub fn a1_constant(w: &GridFunction) -> Result<Constant> {
    check_weight(w)?;
    let m = dyadic_maximal(w).output;
    let grid = w.grid();
    let mut best = Constant { value: 0.0, argmax: grid.cell(0) };
    for (i, (&mv, &wv)) in m.values().iter().zip(w.values()).enumerate() {
        let r = if wv == 0.0 { f64::INFINITY } else { mv / wv };
        if r > best.value {
            best = Constant { value: r, argmax: grid.cell(i) };
            if r == f64::INFINITY {
                break;
            }
        }
    }
    Ok(best)
}

/// `max_Q (⨍_Q w)(⨍_Q w^{1−p'})^{p−1}` over all dyadic cubes.
pub fn ap_constant(w: &GridFunction, p: f64) -> Result<Constant> {
    check_weight(w)?;
    check_p(p)?;
    let grid = w.grid();
    if let Some(i) = w.values().iter().position(|&v| v == 0.0) {
        return Ok(Constant { value: f64::INFINITY, argmax: grid.cell(i) });
    }
    let q = p / (p - 1.0);
    let avg = Pyramid::of_averages(w);
    let dual = Pyramid::of_averages(&w.map(|v| v.powf(1.0 - q)));
    let mut best = Constant { value: 0.0, argmax: Cube::ROOT };
    for (k, (a, d)) in avg.levels.iter().zip(&dual.levels).enumerate() {
        for (m, (&x, &y)) in a.iter().zip(d).enumerate() {
            let v = x * y.powf(p - 1.0);
            if v > best.value {
                best = Constant { value: v, argmax: grid.cube_at_morton(k as u32, m) };
            }
        }
    }
    Ok(best)
}

/// `max_Q (1/w(Q)) ∫_Q M^d(w χ_Q)`, with the inner maximal localized to
/// sub-cubes of `Q`.
pub fn ainfty_constant(w: &GridFunction) -> Result<Constant> {
    check_weight(w)?;
    let grid = w.grid();
    let n = grid.dim();
    let depth = grid.depth() as usize;
    let avg = Pyramid::of_averages(w);
    // integral[j][m] = Σ_{x ∈ Q} max_{P: x ∈ P ⊆ Q} ⨍_P w, in cell units
    let mut integral: Vec<Vec<f64>> = avg.levels.iter().map(|l| vec![0.0; l.len()]).collect();
    let mut chain = vec![0.0; depth + 1];
    for x in 0..grid.cell_count() {
        let mut run = 0.0f64;
        for i in (0..=depth).rev() {
            run = run.max(avg.levels[i][x >> (n * (depth - i))]);
            chain[i] = run;
        }
        for (j, &v) in chain.iter().enumerate() {
            integral[j][x >> (n * (depth - j))] += v;
        }
    }
    let mut best = Constant { value: 0.0, argmax: Cube::ROOT };
    for (j, lvl) in integral.iter().enumerate() {
        let size = grid.cells_per_cube(j as u32) as f64;
        for (m, &s) in lvl.iter().enumerate() {
            let mass = avg.levels[j][m] * size;
            if mass > 0.0 {
                let v = s / mass;
                if v > best.value {
                    best = Constant { value: v, argmax: grid.cube_at_morton(j as u32, m) };
                }
            }
        }
    }
    Ok(best)
}

pub fn weight_constants(w: &GridFunction, p: Option<f64>) -> Result<WeightConstants> {
    Ok(WeightConstants {
        a1: a1_constant(w)?,
        p,
        ap: p.map(|p| ap_constant(w, p)).transpose()?,
        ainfty: ainfty_constant(w)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReverseHolderReport {
    pub tau: f64,
    pub ainfty: f64,
    /// `r_w = 1 + 1/(τ [w]_{A∞})`
    pub r: f64,
    /// `max_Q (⨍_Q w^r)^{1/r} / ⨍_Q w`
    pub worst_ratio: f64,
    pub argmax: Cube,
    pub passes: bool,
    /// Smallest `τ` (to relative 1e-6) for which the check passes.
    pub minimal_tau: f64,
}

fn reverse_holder_ratio(w: &GridFunction, r: f64) -> (f64, Cube) {
    let grid = w.grid();
    let avg = Pyramid::of_averages(w);
    let pow = Pyramid::of_averages(&w.map(|v| v.powf(r)));
    let mut best = (0.0, Cube::ROOT);
    for (k, (a, b)) in avg.levels.iter().zip(&pow.levels).enumerate() {
        for (m, (&x, &y)) in a.iter().zip(b).enumerate() {
            if x > 0.0 {
                let v = y.powf(1.0 / r) / x;
                if v > best.0 {
                    best = (v, grid.cube_at_morton(k as u32, m));
                }
            }
        }
    }
    best
}

/// `(⨍_Q w^{r_w})^{1/r_w} <= 2 ⨍_Q w` on every dyadic cube.
pub fn reverse_holder_check(w: &GridFunction, tau: f64) -> Result<ReverseHolderReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param(format!("tau must be positive, got {tau}")));
    }
    let ainfty = ainfty_constant(w)?.value;
    let r_of = |t: f64| 1.0 + 1.0 / (t * ainfty);
    let passes_at = |t: f64| reverse_holder_ratio(w, r_of(t)).0 <= 2.0;
    let r = r_of(tau);
    let (worst_ratio, argmax) = reverse_holder_ratio(w, r);

    let (mut lo, mut hi) = (tau, tau);
    if passes_at(tau) {
        while passes_at(lo) && lo > 1e-9 {
            hi = lo;
            lo /= 4.0;
        }
    } else {
        while !passes_at(hi) {
            lo = hi;
            hi *= 4.0;
            if hi > 1e15 {
                break;
            }
        }
    }
    let minimal_tau = if passes_at(lo) {
        lo
    } else {
        while hi / lo > 1.0 + 1e-6 {
            let mid = (lo * hi).sqrt();
            if passes_at(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(ReverseHolderReport { tau, ainfty, r, worst_ratio, argmax, passes: worst_ratio <= 2.0, minimal_tau })
}

/// The Young families the Coifman–Rochberg envelope is measured across.
pub fn builtin_families() -> Vec<YoungFunction> {
    vec![
        YoungFunction::power(1.0).expect("valid"),
        YoungFunction::power(1.5).expect("valid"),
        YoungFunction::eps_bump(0.5).expect("valid"),
        YoungFunction::log_bump(2.0, 1.5).expect("valid"),
        YoungFunction::loglog_bump(1.5, 1.0).expect("valid"),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoifmanRochbergRow {
    pub young: String,
    pub a1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoifmanRochbergReport {
    pub gamma: f64,
    pub rows: Vec<CoifmanRochbergRow>,
    /// Largest measured `[(M_A u)^γ]_{A₁}`.
    pub envelope: f64,
    /// `max / min` of the measured constants across families.
    pub spread: f64,
}

/// `[(M_A u)^γ]_{A₁}`.
pub fn coifman_rochberg(u: &GridFunction, a: &YoungFunction, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param(format!("gamma must lie in (0,1), got {gamma}")));
    }
    if u.values().iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateWeight("u vanishes identically".into()));
    }
    let m = orlicz_maximal(u, a)?.output.map(|v| v.powf(gamma));
    Ok(a1_constant(&m)?.value)
}

pub fn coifman_rochberg_check(u: &GridFunction, families: &[YoungFunction], gamma: f64) -> Result<CoifmanRochbergReport> {
    let rows = families
        .iter()
        .map(|a| Ok(CoifmanRochbergRow { young: a.to_string(), a1: coifman_rochberg(u, a, gamma)? }))
        .collect::<Result<Vec<_>>>()?;
    let envelope = rows.iter().map(|r| r.a1).fold(0.0, f64::max);
    let low = rows.iter().map(|r| r.a1).fold(f64::INFINITY, f64::min);
    Ok(CoifmanRochbergReport { gamma, rows, envelope, spread: envelope / low })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub p: f64,
    /// `[w₁ w₂^{1−p}]_{A_p}`
    pub lhs: f64,
    /// `[w₁]_{A₁} [w₂]_{A₁}^{p−1}`
    pub rhs: f64,
    pub holds: bool,
}

/// `[w₁ w₂^{1−p}]_{A_p} <= [w₁]_{A₁} [w₂]_{A₁}^{p−1}`.
pub fn factorization_check(w1: &GridFunction, w2: &GridFunction, p: f64) -> Result<FactorizationReport> {
    check_p(p)?;
    for w in [w1, w2] {
        check_weight(w)?;
        if let Some(cell) = w.values().iter().position(|&v| v == 0.0) {
            return Err(Error::DegenerateWeight(format!("zero at cell {cell}")));
        }
    }
    let w = w1.zip_with(w2, |a, b| a * b.powf(1.0 - p))?;
    let lhs = ap_constant(&w, p)?.value;
    let rhs = a1_constant(w1)?.value * a1_constant(w2)?.value.powf(p - 1.0);
    Ok(FactorizationReport { p, lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicGrid;
    use proptest::prelude::*;

    fn pair(a: f64, b: f64) -> GridFunction {
        GridFunction::new(&DyadicGrid::unit(1, 1).unwrap(), vec![a, b]).unwrap()
    }

    /// `(1/w(Q)) ∫_Q M(wχ_Q)` with the full (unlocalized) maximal function.
    fn ainfty_brute(w: &GridFunction) -> f64 {
        let g = w.grid();
        g.all_cubes()
            .filter(|q| w.mass(q).unwrap() > 0.0)
            .map(|q| {
                let mask: Vec<bool> = (0..g.cell_count()).map(|i| q.contains(&g.cell(i))).collect();
                let m = dyadic_maximal(&w.masked(&mask).unwrap()).output;
                m.masked(&mask).unwrap().integrate(None).unwrap() / w.mass(&q).unwrap()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_weight() {
        let g = DyadicGrid::unit(2, 3).unwrap();
        let w = GridFunction::constant(&g, 5.0);
        let c = weight_constants(&w, Some(2.0)).unwrap();
        assert_eq!(c.a1.value, 1.0);
        assert!((c.ap.unwrap().value - 1.0).abs() < 1e-14);
        assert_eq!(c.ainfty.value, 1.0);
    }

    #[test]
    fn two_cell_examples() {
        let w = pair(1.0, 3.0);
        assert_eq!(a1_constant(&w).unwrap().value, 2.0);
        assert!((ap_constant(&w, 2.0).unwrap().value - 4.0 / 3.0).abs() < 1e-15);
        let ai = ainfty_constant(&w).unwrap();
        assert_eq!(ai.value, 1.25);
        assert_eq!(ai.argmax, Cube::ROOT);
    }

    #[test]
    fn vanishing_cells() {
        let w = pair(0.0, 1.0);
        assert_eq!(a1_constant(&w).unwrap().value, f64::INFINITY);
        assert_eq!(ap_constant(&w, 2.0).unwrap().value, f64::INFINITY);
        assert!(ainfty_constant(&pair(0.0, 0.0)).is_err());
        assert!(a1_constant(&pair(-1.0, 1.0)).is_err());
    }

    #[test]
    fn ap_grows_with_spread() {
        let vals: Vec<f64> = [2.0, 8.0, 32.0, 128.0].iter().map(|&t| ap_constant(&pair(1.0, t), 2.0).unwrap().value).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        let a: Vec<f64> = [2.0, 8.0, 32.0].iter().map(|&t| ainfty_constant(&pair(1.0, t)).unwrap().value).collect();
        assert!(a.iter().all(|&v| v < 2.0));
    }

    #[test]
    fn reverse_holder_constant_weight() {
        let g = DyadicGrid::unit(1, 4).unwrap();
        let w = GridFunction::constant(&g, 2.0);
        for tau in [0.01, 1.0, 1024.0] {
            let r = reverse_holder_check(&w, tau).unwrap();
            assert!(r.passes && (r.worst_ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reverse_holder_minimal_tau_is_threshold() {
        let g = DyadicGrid::unit(1, 6).unwrap();
        let w = GridFunction::from_centers(&g, |x| x[0].powf(-0.9));
        let r = reverse_holder_check(&w, DEFAULT_TAU).unwrap();
        assert!(r.passes);
        let at = reverse_holder_check(&w, r.minimal_tau).unwrap();
        assert!(at.passes);
        let below = reverse_holder_check(&w, r.minimal_tau * 0.99).unwrap();
        assert!(!below.passes);
    }

    #[test]
    fn coifman_rochberg_examples() {
        let g = DyadicGrid::unit(1, 5).unwrap();
        let one = GridFunction::constant(&g, 1.0);
        assert_eq!(coifman_rochberg(&one, &YoungFunction::log_bump(2.0, 1.5).unwrap(), 0.5).unwrap(), 1.0);

        let u = GridFunction::indicator(&g, &Cube::new(5, &[11])).unwrap();
        let direct = coifman_rochberg(&u, &YoungFunction::power(1.0).unwrap(), 0.5).unwrap();
        // brute force: M over ancestor averages, then A₁ over all cubes ⨍_Q/inf_Q
        let mu = dyadic_maximal(&u).output.map(f64::sqrt);
        let brute = g
            .all_cubes()
            .map(|q| {
                let cells: Vec<usize> = g.cells_in(&q).collect();
                let avg = cells.iter().map(|&i| mu.values()[i]).sum::<f64>() / cells.len() as f64;
                let min = cells.iter().map(|&i| mu.values()[i]).fold(f64::INFINITY, f64::min);
                avg / min
            })
            .fold(0.0, f64::max);
        assert!((direct - brute).abs() <= 1e-9 * brute);

        let fams = [
            YoungFunction::power(1.0).unwrap(),
            YoungFunction::eps_bump(0.5).unwrap(),
            YoungFunction::log_bump(2.0, 1.5).unwrap(),
        ];
        let rep = coifman_rochberg_check(&u, &fams, 0.5).unwrap();
        assert!(rep.spread <= 4.0, "{rep:?}");
        let rep34 = coifman_rochberg_check(&u, &fams, 0.75).unwrap();
        assert!(rep34.envelope >= rep.envelope);
    }

    #[test]
    fn factorization_examples() {
        let g = DyadicGrid::unit(1, 1).unwrap();
        let one = GridFunction::constant(&g, 1.0);
        let r = factorization_check(&one, &one, 2.0).unwrap();
        assert!(r.holds && (r.lhs - 1.0).abs() < 1e-15 && r.rhs == 1.0);
        let r = factorization_check(&pair(1.0, 3.0), &one, 2.0).unwrap();
        assert!((r.lhs - 4.0 / 3.0).abs() < 1e-15 && r.rhs == 2.0 && r.holds);
        assert!(factorization_check(&pair(0.0, 1.0), &one, 2.0).is_err());
    }

    fn arb_weight(dim: usize, depth: u32) -> impl Strategy<Value = GridFunction> {
        let g = DyadicGrid::unit(dim, depth).unwrap();
        proptest::collection::vec(-3.0f64..3.0, g.cell_count())
            .prop_map(move |v| GridFunction::weight(&g, v.into_iter().map(f64::exp).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ainfty_matches_brute_force(w in arb_weight(2, 2)) {
            let fast = ainfty_constant(&w).unwrap().value;
            let brute = ainfty_brute(&w);
            prop_assert!((fast - brute).abs() <= 1e-12 * brute);
        }

        #[test]
        fn ordering_and_scale(w in arb_weight(1, 5), c in 0.01f64..100.0) {
            let k = weight_constants(&w, Some(2.0)).unwrap();
            prop_assert!(k.ainfty.value >= 1.0 - 1e-12);
            prop_assert!(k.ainfty.value <= k.a1.value * (1.0 + 1e-12));
            let s = weight_constants(&w.scale(c), Some(2.0)).unwrap();
            prop_assert!((s.a1.value - k.a1.value).abs() <= 1e-12 * k.a1.value);
            prop_assert!((s.ainfty.value - k.ainfty.value).abs() <= 1e-12 * k.ainfty.value);
            let (sp, kp) = (s.ap.unwrap(), k.ap.unwrap());
            prop_assert!((sp.value - kp.value).abs() <= 1e-12 * kp.value);
            prop_assert_eq!(s.ainfty.argmax, k.ainfty.argmax);
        }

        #[test]
        fn factorization_holds(w1 in arb_weight(1, 5), w2 in arb_weight(1, 5), pi in 0usize..3) {
            let p = [1.5, 2.0, 3.0][pi];
            let w1 = dyadic_maximal(&w1).output;
            let w2 = dyadic_maximal(&w2).output.map(|v| v.powf(0.5));
            let r = factorization_check(&w1, &w2, p).unwrap();
            prop_assert!(r.holds, "{:?}", r);
        }

        #[test]
        fn reverse_holder_upward_closed(w in arb_weight(1, 5), t in 0.01f64..10.0) {
            let r = reverse_holder_check(&w, t).unwrap();
            if r.passes {
                prop_assert!(reverse_holder_check(&w, 2.0 * t).unwrap().passes);
            }
        }
    }
}
