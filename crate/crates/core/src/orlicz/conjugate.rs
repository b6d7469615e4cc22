//! Numeric Legendre transform `Ā(s) = sup_{t>0} (st − A(t))` for convex `A`.
//!
//! For convex `A` the supremum is attained where the right derivative first
//! reaches `s`, so `Ā(s) = s t* − A(t*)` with `t* = inf{t : A'(t+) >= s}`.
//! A table of supremizer brackets on a log grid (512 points per decade) is
//! built once; evaluation bisects inside the tabulated bracket.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Result;
use crate::orlicz::young::YoungFunction;

const PER_DECADE: usize = 512;
const MIN_DECADE: i32 = -12;
const MAX_DECADE: i32 = 12;
const T_MIN: f64 = 1e-300;
const T_MAX: f64 = 1e300;

#[derive(Debug)]
pub struct NumericConjugate {
    inner: YoungFunction,
    /// `inf A(t)/t`; `Ā` vanishes on `[0, zero_level]`.
    zero_level: f64,
    /// For grid point `s_i`: `(lo_i, hi_i)` with `A'(lo_i) < s_i <= A'(hi_i)`.
    brackets: Vec<(f64, f64)>,
}

fn grid_s(i: usize) -> f64 {
    10f64.powf(MIN_DECADE as f64 + i as f64 / PER_DECADE as f64)
}

impl NumericConjugate {
    /// Builds (or fetches) the conjugate of `inner`; tables are shared
    /// process-wide per Young spec and immutable once published.
    pub fn shared(inner: YoungFunction) -> Result<Arc<NumericConjugate>> {
        static CACHE: OnceLock<Mutex<HashMap<String, Arc<NumericConjugate>>>> = OnceLock::new();
        let key = inner.to_string();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(c) = cache.lock().expect("conjugate cache").get(&key) {
            return Ok(c.clone());
        }
        let built = Arc::new(Self::build(inner));
        let mut guard = cache.lock().expect("conjugate cache");
        Ok(guard.entry(key).or_insert(built).clone())
    }

    pub fn build(inner: YoungFunction) -> NumericConjugate {
        let zero_level = inner.slope_at_zero().unwrap_or(0.0);
        let n = ((MAX_DECADE - MIN_DECADE) as usize) * PER_DECADE + 1;
        let mut brackets = Vec::with_capacity(n);
        let mut prev_lo = T_MIN;
        for i in 0..n {
            let s = grid_s(i);
            let (lo, hi) = if s <= zero_level {
                (0.0, 0.0)
            } else {
                let (lo, hi) = search_bracket(&inner, s, prev_lo);
                refine(&inner, s, lo, hi, 1e-6)
            };
            if lo > 0.0 {
                prev_lo = lo;
            }
            brackets.push((lo, hi));
        }
        NumericConjugate { inner, zero_level, brackets }
    }

    pub fn inner(&self) -> &YoungFunction {
        &self.inner
    }

    pub fn zero_level(&self) -> f64 {
        self.zero_level
    }

    /// Bracket `[lo, hi]` of the supremizer at `s`.
    fn supremizer(&self, s: f64) -> (f64, f64) {
        let pos = (s.log10() - MIN_DECADE as f64) * PER_DECADE as f64;
        let (lo, hi) = if pos >= 0.0 && pos < (self.brackets.len() - 1) as f64 {
            let i = pos.floor() as usize;
            let lo = self.brackets[i].0;
            let hi = self.brackets[i + 1].1;
            if lo > 0.0 && hi.is_finite() && hi > 0.0 {
                (lo, hi)
            } else {
                search_bracket(&self.inner, s, T_MIN)
            }
        } else {
            search_bracket(&self.inner, s, T_MIN)
        };
        if !hi.is_finite() {
            return (lo, hi);
        }
        refine(&self.inner, s, lo, hi, 1e-14)
    }

    pub fn value(&self, s: f64) -> f64 {
        if s <= self.zero_level || s <= 0.0 {
            return 0.0;
        }
        let (lo, hi) = self.supremizer(s);
        if !hi.is_finite() {
            return f64::INFINITY;
        }
        let a = &self.inner;
        let v = (s * lo - a.value(lo)).max(s * hi - a.value(hi));
        v.max(0.0)
    }

    /// Right derivative `Ā'(s+)`, the largest supremizer.
    pub fn derivative(&self, s: f64) -> f64 {
        if s < self.zero_level {
            return 0.0;
        }
        let (_, hi) = self.supremizer(s.max(f64::MIN_POSITIVE));
        hi
    }

    /// `sup{s : Ā(s) <= u}`.
    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.zero_level;
        }
        let mut lo = self.zero_level;
        let mut hi = if self.zero_level > 0.0 { 2.0 * self.zero_level } else { 1.0 };
        while self.value(hi) <= u {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        if lo == 0.0 {
            lo = hi / 2.0;
            while self.value(lo) > u && lo > 1e-300 {
                hi = lo;
                lo /= 2.0;
            }
            if self.value(lo) > u {
                return 0.0;
            }
        }
        for _ in 0..200 {
            if hi - lo <= 2e-16 * hi {
                break;
            }
            let mid = if lo > 0.0 && hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// Finds `lo < hi` with `A'(lo) < s <= A'(hi)`; `hi = ∞` when the derivative
/// never reaches `s` below `T_MAX`.
fn search_bracket(a: &YoungFunction, s: f64, start: f64) -> (f64, f64) {
    let mut lo = start.max(T_MIN);
    if a.derivative(lo) >= s {
        while lo > T_MIN && a.derivative(lo) >= s {
            lo = (lo / 16.0).max(T_MIN);
        }
        if a.derivative(lo) >= s {
            return (T_MIN, T_MIN);
        }
    }
    let mut hi = (lo * 16.0).max(1e-12);
    while a.derivative(hi) < s {
        lo = hi;
        if hi >= T_MAX {
            return (lo, f64::INFINITY);
        }
        hi = (hi * 16.0).min(T_MAX);
    }
    (lo, hi)
}

fn refine(a: &YoungFunction, s: f64, mut lo: f64, mut hi: f64, rel: f64) -> (f64, f64) {
    for _ in 0..400 {
        if hi - lo <= rel * hi {
            break;
        }
        let mid = if lo > 0.0 && hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if a.derivative(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force supremum over a dense log grid plus golden refinement.
    fn brute_conjugate(a: &YoungFunction, s: f64) -> f64 {
        let mut best = 0.0f64;
        let mut best_t = 0.0;
        for i in 0..=40000 {
            let t = 10f64.powf(-10.0 + i as f64 * 20.0 / 40000.0);
            let v = s * t - a.value(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        if best_t > 0.0 {
            let (mut lo, mut hi) = (best_t * 0.999, best_t * 1.001);
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if s * m1 - a.value(m1) < s * m2 - a.value(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            best = best.max(s * lo - a.value(lo));
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        for a in [
            YoungFunction::log_bump(2.0, 1.5).unwrap(),
            YoungFunction::eps_bump(0.5).unwrap(),
            YoungFunction::loglog_bump(1.5, 1.0).unwrap(),
            YoungFunction::power(3.0).unwrap(),
        ] {
            let c = NumericConjugate::build(a.clone());
            for s in [0.01, 0.3, 1.0, 1.2, 2.0, 3.5, 40.0] {
                if a.to_string().starts_with("epsbump") && s > 3.0 {
                    // supremizer beyond the brute-force grid
                    continue;
                }
                let brute = brute_conjugate(&a, s);
                let v = c.value(s);
                assert!((v - brute).abs() <= 1e-9 * brute.max(1e-12) + 1e-15, "{a} s={s}: {v} vs {brute}");
            }
        }
    }

    #[test]
    fn power_closed_form() {
        // Ā(s) = (p-1) p^{-p'} s^{p'} for A(t) = t^p.
        let p = 3.0;
        let q = p / (p - 1.0);
        let c = NumericConjugate::build(YoungFunction::power(p).unwrap());
        for s in [1e-6, 0.02, 1.0, 3.0, 1e5] {
            let exact = (p - 1.0) * p.powf(-q) * f64::powf(s, q);
            assert!((c.value(s) - exact).abs() <= 1e-12 * exact, "s={s}");
        }
    }

    #[test]
    fn eps_bump_vanishes_below_one() {
        let c = NumericConjugate::build(YoungFunction::eps_bump(0.5).unwrap());
        assert_eq!(c.zero_level(), 1.0);
        assert_eq!(c.value(0.7), 0.0);
        assert_eq!(c.value(1.0), 0.0);
        // flat part of the supremizer: t* = 1 for s in [1, 1.5]
        assert!((c.value(1.3) - 0.3).abs() < 1e-12);
        assert!((c.inverse(0.2) - 1.2).abs() < 1e-12);
        assert_eq!(c.inverse(0.0), 1.0);
    }

    #[test]
    fn inverse_roundtrip() {
        let c = NumericConjugate::build(YoungFunction::log_bump(1.25, 0.35).unwrap());
        for u in [1e-8, 1e-3, 0.5, 1.0, 40.0, 1e6] {
            let s = c.inverse(u);
            assert!((c.value(s) - u).abs() <= 1e-10 * u, "u={u}");
        }
    }
}
