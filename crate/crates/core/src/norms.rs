//! Weighted strong and weak Lebesgue norms of grid functions.

use crate::dyadic::GridFunction;
use crate::error::{Error, Result};

fn weights_for<'a>(f: &GridFunction, w: Option<&'a GridFunction>) -> Result<Option<&'a [f64]>> {
    match w {
        Some(w) => {
            if f.grid() != w.grid() {
                return Err(Error::GridMismatch);
            }
            if let Some((cell, &value)) = w.values().iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
                return Err(Error::NegativeWeight { cell, value });
            }
            Ok(Some(w.values()))
        }
        None => Ok(None),
    }
}

/// `‖f‖_{L^p(w)} = (∫ |f|^p w)^{1/p}`; Lebesgue measure when `w` is `None`.
pub fn lp_norm(f: &GridFunction, p: f64, w: Option<&GridFunction>) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param(format!("p must be >= 1, got {p}")));
    }
    let w = weights_for(f, w)?;
    let cell = f.grid().cell_volume();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(p) * w.map_or(1.0, |w| w[i]))
        .sum();
    Ok((sum * cell).powf(1.0 / p))
}

/// `‖f‖_{L^{p,∞}(w)} = sup_t t w({|f| > t})^{1/p}`, evaluated exactly as
/// `max_v v w({|f| >= v})^{1/p}` over the distinct values `v` of `|f|`.
pub fn weak_norm(f: &GridFunction, p: f64, w: Option<&GridFunction>) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param(format!("p must be >= 1, got {p}")));
    }
    let w = weights_for(f, w)?;
    let cell = f.grid().cell_volume();
    let mut pairs: Vec<(f64, f64)> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.abs(), w.map_or(1.0, |w| w[i]) * cell))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            mass += pairs[i].1;
            i += 1;
        }
        if v > 0.0 {
            best = best.max(v * mass.powf(1.0 / p));
        }
    }
    Ok(best)
}

/// `w(E)` for a cell mask `E`; Lebesgue measure when `w` is `None`.
pub fn measure(mask: &[bool], w: Option<&GridFunction>, cell_volume: f64) -> f64 {
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| w.map_or(1.0, |w| w.values()[i]))
        .sum::<f64>()
        * cell_volume
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicGrid;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        let g = DyadicGrid::unit(1, 2).unwrap();
        let f = GridFunction::new(&g, vec![4.0, -2.0, 0.0, 1.0]).unwrap();
        let l2 = lp_norm(&f, 2.0, None).unwrap();
        assert!((l2 - (21.0f64 / 4.0).sqrt()).abs() < 1e-15);
        // t|{|f|>t}|: 4·¼, 2·½, 1·¾ → max 1
        assert_eq!(weak_norm(&f, 1.0, None).unwrap(), 1.0);
        let w = GridFunction::new(&g, vec![0.0, 4.0, 1.0, 1.0]).unwrap();
        assert_eq!(lp_norm(&f, 1.0, Some(&w)).unwrap(), (8.0 + 1.0) / 4.0);
        assert_eq!(weak_norm(&f, 1.0, Some(&w)).unwrap(), 2.0);
    }

    proptest! {
        #[test]
        fn weak_below_strong(v in proptest::collection::vec(-5.0f64..5.0, 16), p in 1.0f64..4.0) {
            let g = DyadicGrid::unit(2, 2).unwrap();
            let f = GridFunction::new(&g, v).unwrap();
            prop_assert!(weak_norm(&f, p, None).unwrap() <= lp_norm(&f, p, None).unwrap() * (1.0 + 1e-12));
        }
    }
}
