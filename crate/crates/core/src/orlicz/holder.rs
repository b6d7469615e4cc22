use serde::Serialize;

use crate::orlicz::young::YoungFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaResult {
    /// `max_t B⁻¹(t)C⁻¹(t)/A⁻¹(t)` over the grid, or `+∞`.
    pub kappa: f64,
    /// Grid point attaining the maximum.
    pub argmax: f64,
    /// The ratio kept growing on probes beyond the grid.
    pub unbounded: bool,
}

/// 200 log-spaced points over `[1e-8, 1e8]`.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-8, 1e8, 200)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn ratio(a: &YoungFunction, b: &YoungFunction, c: &YoungFunction, t: f64) -> f64 {
    let den = a.inverse(t);
    if den <= 0.0 {
        return f64::INFINITY;
    }
    b.inverse(t) * c.inverse(t) / den
}

/// Whether the ratio keeps growing by more than a factor 2 per probe as
/// the probes move away from `edge` in steps of `step` decades.
fn grows_beyond(f: &dyn Fn(f64) -> f64, edge: f64, step: f64) -> bool {
    let mut prev = f(edge);
    let mut growing = 0;
    for k in 1..=((120.0 / step.abs()) as i32) {
        let t = edge * 10f64.powf(step * k as f64);
        let r = f(t);
        if !r.is_finite() {
            return true;
        }
        if r > 2.0 * prev {
            growing += 1;
        } else {
            growing = 0;
        }
        prev = r;
    }
    growing >= 3
}

/// The best constant `κ` with `B⁻¹(t)C⁻¹(t) <= κ A⁻¹(t)` on `t_grid`.
pub fn holder_kappa(a: &YoungFunction, b: &YoungFunction, c: &YoungFunction, t_grid: &[f64]) -> KappaResult {
    let mut best = KappaResult { kappa: 0.0, argmax: f64::NAN, unbounded: false };
    for &t in t_grid {
        let r = ratio(a, b, c, t);
        if r > best.kappa || best.argmax.is_nan() {
            best.kappa = r;
            best.argmax = t;
        }
    }
    let lo = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = t_grid.iter().copied().fold(0.0, f64::max);
    let f = |t: f64| ratio(a, b, c, t);
    if hi > 0.0 && (grows_beyond(&f, hi, 8.0) || grows_beyond(&f, lo, -8.0)) {
        best.unbounded = true;
        best.kappa = f64::INFINITY;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_split() {
        let a = YoungFunction::power(1.0).unwrap();
        let b = YoungFunction::power(3.0).unwrap();
        let c = YoungFunction::power(1.5).unwrap();
        let k = holder_kappa(&a, &b, &c, &default_t_grid());
        assert!((k.kappa - 1.0).abs() < 1e-12, "{k:?}");
        assert!(!k.unbounded);
    }

    #[test]
    fn mismatched_exponents_unbounded() {
        let a = YoungFunction::power(1.0).unwrap();
        let b = YoungFunction::power(2.0).unwrap();
        let c = YoungFunction::power(3.0).unwrap();
        let k = holder_kappa(&a, &b, &c, &default_t_grid());
        assert!(k.unbounded && k.kappa.is_infinite());
    }

    #[test]
    fn eps_bump_triple_is_finite() {
        for (p, delta) in [(2.0, 0.5), (3.0, 1.0), (1.5, 0.2)] {
            let eps = delta / (2.0 * p);
            let eta = delta - p * eps;
            let a = YoungFunction::eps_bump(eps).unwrap();
            let b = YoungFunction::log_bump(p, p - 1.0 + delta).unwrap();
            let c = YoungFunction::holder_complement(p, eta).unwrap();
            let k = holder_kappa(&a, &b, &c, &default_t_grid());
            assert!(k.kappa.is_finite() && !k.unbounded, "p={p} δ={delta}: {k:?}");
            assert!(k.kappa >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn grid_shape() {
        let g = default_t_grid();
        assert_eq!(g.len(), 200);
        assert!((g[0] - 1e-8).abs() < 1e-20 && (g[199] - 1e8).abs() < 1e-4);
    }
}
