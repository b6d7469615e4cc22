use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::orlicz::conjugate::NumericConjugate;

/// `log⁺t = max(0, ln t)`.
#[inline]
pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

/// Asymptotic profile `t^power (ln t)^log (ln ln t)^loglog` as `t → ∞`.
/// `power = ∞` marks exponential growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub power: f64,
    pub log: f64,
    pub loglog: f64,
}

impl Growth {
    fn new(power: f64, log: f64, loglog: f64) -> Self {
        Growth { power, log, loglog }
    }

    /// `sup_t A(t)/t = ∞`.
    pub fn superlinear(&self) -> bool {
        self.power > 1.0
            || (self.power == 1.0 && (self.log > 0.0 || (self.log == 0.0 && self.loglog > 0.0)))
    }

    /// Convergence of `∫_1^∞ A(t)/t^p dt/t`.
    pub fn tail_converges(&self, p: f64) -> bool {
        if self.power != p {
            return self.power < p;
        }
        self.log < -1.0 || (self.log == -1.0 && self.loglog < -1.0)
    }
}

/// A Young function drawn from a fixed set of families.
#[derive(Clone)]
pub enum YoungFunction {
    /// `t^p`
    Power { p: f64 },
    /// `t^p / p`
    ScaledPower { p: f64 },
    /// `t^p (1 + log⁺t)^a`
    LogBump { p: f64, a: f64 },
    /// `t^p (1 + log⁺t)^{p-1} (1 + log⁺(1 + log⁺t))^a`
    LogLogBump { p: f64, a: f64 },
    /// `t (1 + log⁺t)^ε`
    EpsBump { eps: f64 },
    /// `A(t^{1/p})`
    Transformed { inner: Box<YoungFunction>, p: f64 },
    /// Complementary function, tabulated numerically.
    Conjugate(Arc<NumericConjugate>),
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungFunction({self})")
    }
}

impl PartialEq for YoungFunction {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        check(p >= 1.0 && p.is_finite(), || format!("power: p must be >= 1, got {p}"))?;
        Ok(YoungFunction::Power { p })
    }

    pub fn scaled_power(p: f64) -> Result<Self> {
        check(p >= 1.0 && p.is_finite(), || format!("scaledpower: p must be >= 1, got {p}"))?;
        Ok(YoungFunction::ScaledPower { p })
    }

    /// `a` may be negative as long as the function stays increasing
    /// (`p + a >= 0`); such bumps are monotone but not convex at `t = 1`.
    pub fn log_bump(p: f64, a: f64) -> Result<Self> {
        check(p >= 1.0 && p.is_finite(), || format!("logbump: p must be >= 1, got {p}"))?;
        check(a.is_finite() && p + a >= 0.0, || {
            format!("logbump: need p + a >= 0 for monotonicity, got p={p}, a={a}")
        })?;
        Ok(YoungFunction::LogBump { p, a })
    }

    pub fn loglog_bump(p: f64, a: f64) -> Result<Self> {
        check(p >= 1.0 && p.is_finite(), || format!("loglogbump: p must be >= 1, got {p}"))?;
        check(a.is_finite() && a >= 0.0, || format!("loglogbump: a must be >= 0, got {a}"))?;
        Ok(YoungFunction::LogLogBump { p, a })
    }

    pub fn eps_bump(eps: f64) -> Result<Self> {
        check(eps >= 0.0 && eps.is_finite(), || format!("epsbump: eps must be >= 0, got {eps}"))?;
        Ok(YoungFunction::EpsBump { eps })
    }

    /// `A_p(t) = A(t^{1/p})`.
    pub fn transformed(inner: YoungFunction, p: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), || format!("ap: p must be positive, got {p}"))?;
        Ok(YoungFunction::Transformed { inner: Box::new(inner), p })
    }

    /// The Hölder complement `t^{p'} (1 + log⁺t)^{-1-(p'-1)η}`.
    pub fn holder_complement(p: f64, eta: f64) -> Result<Self> {
        check(p > 1.0, || format!("p must exceed 1, got {p}"))?;
        check(eta > 0.0 && eta <= 1.0, || format!("eta must lie in (0,1], got {eta}"))?;
        let q = p / (p - 1.0);
        Self::log_bump(q, -1.0 - (q - 1.0) * eta)
    }

    /// Evaluates `A(t)` for `t >= 0`.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungFunction::Power { p } => t.powf(*p),
            YoungFunction::ScaledPower { p } => t.powf(*p) / p,
            YoungFunction::LogBump { p, a } => {
                if t <= 1.0 {
                    t.powf(*p)
                } else {
                    t.powf(*p) * (1.0 + t.ln()).powf(*a)
                }
            }
            YoungFunction::LogLogBump { p, a } => {
                if t <= 1.0 {
                    t.powf(*p)
                } else {
                    let l1 = 1.0 + t.ln();
                    t.powf(*p) * l1.powf(p - 1.0) * (1.0 + l1.ln()).powf(*a)
                }
            }
            YoungFunction::EpsBump { eps } => {
                if t <= 1.0 {
                    t
                } else {
                    t * (1.0 + t.ln()).powf(*eps)
                }
            }
            YoungFunction::Transformed { inner, p } => inner.value(t.powf(1.0 / p)),
            YoungFunction::Conjugate(c) => c.value(t),
        }
    }

    /// Right derivative `A'(t+)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            YoungFunction::Power { p } => power_derivative(*p, 1.0, t),
            YoungFunction::ScaledPower { p } => power_derivative(*p, 1.0 / p, t),
            YoungFunction::LogBump { p, a } => {
                if t < 1.0 {
                    power_derivative(*p, 1.0, t)
                } else {
                    let l1 = 1.0 + t.ln();
                    t.powf(p - 1.0) * l1.powf(a - 1.0) * (p * l1 + a)
                }
            }
            YoungFunction::LogLogBump { .. } | YoungFunction::EpsBump { .. } => {
                if t < 1.0 {
                    let q = self.growth_at_zero().map_or(1.0, |(q, _)| q);
                    return power_derivative(q, 1.0, t);
                }
                self.value(t) * self.elasticity_at_log(t.ln()) / t
            }
            YoungFunction::Transformed { inner, p } => {
                if t == 0.0 {
                    return match self.growth_at_zero() {
                        Some((q, c)) if q == 1.0 => c,
                        Some((q, _)) if q > 1.0 => 0.0,
                        _ => f64::INFINITY,
                    };
                }
                let s = t.powf(1.0 / p);
                inner.derivative(s) * s / (p * t)
            }
            YoungFunction::Conjugate(c) => c.derivative(t),
        }
    }

    /// `ln A(e^x)`; `-∞` where `A` vanishes, `+∞` past overflow.
    pub fn ln_value_at_log(&self, x: f64) -> f64 {
        let (c, r) = self.ln_split_at_log(x);
        if c == 0.0 {
            r
        } else {
            c * x + r
        }
    }

    /// `ln A(e^x) = c·x + r`, with `c` the power at infinity where the family
    /// has one. Callers combining several such logarithms cancel the `c·x`
    /// parts exactly instead of subtracting huge nearly equal numbers.
    pub fn ln_split_at_log(&self, x: f64) -> (f64, f64) {
        let lp = |x: f64| (1.0 + x.max(0.0)).ln();
        match self {
            YoungFunction::Power { p } => (*p, 0.0),
            YoungFunction::ScaledPower { p } => (*p, -p.ln()),
            YoungFunction::LogBump { p, a } => (*p, if x > 0.0 { a * lp(x) } else { 0.0 }),
            YoungFunction::LogLogBump { p, a } => {
                if x > 0.0 {
                    let l1 = lp(x);
                    (*p, (p - 1.0) * l1 + a * (1.0 + l1).ln())
                } else {
                    (*p, 0.0)
                }
            }
            YoungFunction::EpsBump { eps } => (1.0, if x > 0.0 { eps * lp(x) } else { 0.0 }),
            YoungFunction::Transformed { inner, p } => {
                let (c, r) = inner.ln_split_at_log(x / p);
                (c / p, r)
            }
            YoungFunction::Conjugate(conj) => {
                if x > CONJ_LOG_SWITCH {
                    if let Some(split) = conjugate_split(conj.inner(), x) {
                        return split;
                    }
                }
                if x > 709.0 {
                    return (0.0, f64::INFINITY);
                }
                (0.0, conj.value(x.exp()).ln())
            }
        }
    }

    /// Elasticity `t A'(t) / A(t)` at `t = e^x` (right-sided at kinks).
    pub fn elasticity_at_log(&self, x: f64) -> f64 {
        match self {
            YoungFunction::Power { p } | YoungFunction::ScaledPower { p } => *p,
            YoungFunction::LogBump { p, a } => {
                if x < 0.0 {
                    *p
                } else {
                    p + a / (1.0 + x)
                }
            }
            YoungFunction::LogLogBump { p, a } => {
                if x < 0.0 {
                    *p
                } else {
                    let l1 = 1.0 + x;
                    p + (p - 1.0) / l1 + a / (l1 * (1.0 + l1.ln()))
                }
            }
            YoungFunction::EpsBump { eps } => {
                if x < 0.0 {
                    1.0
                } else {
                    1.0 + eps / (1.0 + x)
                }
            }
            YoungFunction::Transformed { inner, p } => inner.elasticity_at_log(x / p) / p,
            YoungFunction::Conjugate(c) => {
                if x > CONJ_LOG_SWITCH {
                    if let Some(xs) = conjugate_supremizer_log(c.inner(), x) {
                        let el = c.inner().elasticity_at_log(xs);
                        return el / (el - 1.0);
                    }
                }
                if x > 709.0 {
                    return f64::NAN;
                }
                let s = x.exp();
                let v = c.value(s);
                if v > 0.0 {
                    s * c.derivative(s) / v
                } else {
                    f64::NAN
                }
            }
        }
    }

    /// Behaviour `A(t) ≈ c t^q` as `t → 0`, when of that form.
    pub fn growth_at_zero(&self) -> Option<(f64, f64)> {
        match self {
            YoungFunction::Power { p }
            | YoungFunction::LogBump { p, .. }
            | YoungFunction::LogLogBump { p, .. } => Some((*p, 1.0)),
            YoungFunction::ScaledPower { p } => Some((*p, 1.0 / p)),
            YoungFunction::EpsBump { .. } => Some((1.0, 1.0)),
            YoungFunction::Transformed { inner, p } => {
                inner.growth_at_zero().map(|(q, c)| (q / p, c))
            }
            YoungFunction::Conjugate(_) => None,
        }
    }

    /// Behaviour as `t → ∞`.
    pub fn growth(&self) -> Growth {
        match self {
            YoungFunction::Power { p } | YoungFunction::ScaledPower { p } => Growth::new(*p, 0.0, 0.0),
            YoungFunction::LogBump { p, a } => Growth::new(*p, *a, 0.0),
            YoungFunction::LogLogBump { p, a } => Growth::new(*p, p - 1.0, *a),
            YoungFunction::EpsBump { eps } => Growth::new(1.0, *eps, 0.0),
            YoungFunction::Transformed { inner, p } => {
                let g = inner.growth();
                Growth::new(g.power / p, g.log, g.loglog)
            }
            YoungFunction::Conjugate(c) => {
                let g = c.inner().growth();
                if g.power > 1.0 && g.power.is_finite() {
                    let k = 1.0 / (g.power - 1.0);
                    Growth::new(g.power * k, -g.log * k, -g.loglog * k)
                } else {
                    Growth::new(f64::INFINITY, 0.0, 0.0)
                }
            }
        }
    }

    /// `inf_{t>0} A(t)/t`, the largest `s` with `Ā(s) = 0`.
    pub fn slope_at_zero(&self) -> Option<f64> {
        match self {
            YoungFunction::Conjugate(c) => Some(c.zero_level()),
            _ => self.growth_at_zero().map(|(q, c)| match q {
                q if q > 1.0 => 0.0,
                q if q == 1.0 => c,
                _ => f64::INFINITY,
            }),
        }
    }

    /// Whether the family is convex for its parameters (analytically).
    pub fn is_convex(&self) -> bool {
        match self {
            YoungFunction::Power { .. } | YoungFunction::ScaledPower { .. } => true,
            YoungFunction::LogBump { a, .. } => *a >= 0.0,
            YoungFunction::LogLogBump { .. } | YoungFunction::EpsBump { .. } => true,
            YoungFunction::Transformed { inner, p } => {
                inner.is_convex() && self.growth_at_zero().is_some_and(|(q, _)| q >= 1.0) && {
                    // inner(t^{1/p}) for p > 1 is convex when the inner
                    // elasticity stays >= p; sample it.
                    *p <= 1.0
                        || (-40..=80).all(|i| {
                            let x = i as f64 * 0.5;
                            let t = x.exp();
                            let h = 1e-4 * t;
                            self.derivative(t + h) >= self.derivative(t) * (1.0 - 1e-12)
                        })
                }
            }
            YoungFunction::Conjugate(_) => true,
        }
    }

    /// The right-continuous generalized inverse `sup{t : A(t) <= s}`.
    pub fn inverse(&self, s: f64) -> f64 {
        if s.is_nan() {
            return f64::NAN;
        }
        if s == f64::INFINITY {
            return f64::INFINITY;
        }
        match self {
            YoungFunction::Conjugate(c) => return c.inverse(s),
            YoungFunction::Transformed { inner, p } => return inner.inverse(s).powf(*p),
            _ => {}
        }
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            YoungFunction::Power { p } => s.powf(1.0 / p),
            YoungFunction::ScaledPower { p } => (p * s).powf(1.0 / p),
            YoungFunction::LogBump { p, .. } | YoungFunction::LogLogBump { p, .. } if s <= 1.0 => {
                s.powf(1.0 / p)
            }
            YoungFunction::EpsBump { .. } if s <= 1.0 => s,
            _ => self.solve_log(s.ln()).exp(),
        }
    }

    /// Solves `ln A(e^x) = target` for `x`, safeguarded Newton on a bracket.
    fn solve_log(&self, target: f64) -> f64 {
        let g = |x: f64| self.ln_value_at_log(x) - target;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while g(lo) > 0.0 {
            lo = 2.0 * lo - 1.0;
        }
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let gx = g(x);
            if gx == 0.0 {
                return x;
            }
            if gx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.elasticity_at_log(x);
            let mut next = x - gx / slope;
            if !(next > lo && next < hi) || !slope.is_finite() || slope <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }

    /// The complementary function `Ā(s) = sup_t (st − A(t))`.
    pub fn conjugate(&self) -> Result<YoungFunction> {
        match self {
            YoungFunction::ScaledPower { p } if *p > 1.0 => {
                Ok(YoungFunction::ScaledPower { p: *p / (*p - 1.0) })
            }
            YoungFunction::Conjugate(c) => Ok(c.inner().clone()),
            _ => {
                if !self.growth().superlinear() {
                    return Err(Error::DegenerateConjugate(format!(
                        "{self}: sup A(t)/t is finite, so the complementary function is \
                         infinite past that slope"
                    )));
                }
                if !self.is_convex() {
                    return Err(Error::DegenerateConjugate(format!(
                        "{self} is not convex; its complementary function is not supported"
                    )));
                }
                Ok(YoungFunction::Conjugate(NumericConjugate::shared(self.clone())?))
            }
        }
    }
}

/// Above `s = e^20` the supremizer of `st − A(t)` sits far past the kinks of
/// every built-in family, where `Ā` has an exact log-domain description.
const CONJ_LOG_SWITCH: f64 = 20.0;

/// `x* = ln t*` with `A'(t*) = e^u`, i.e. `ln A(x*) + ln el(x*) − x* = u`.
fn conjugate_supremizer_log(a: &YoungFunction, u: f64) -> Option<f64> {
    let g = |x: f64| {
        let (c, r) = a.ln_split_at_log(x);
        (c - 1.0) * x + r + a.elasticity_at_log(x).ln() - u
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if g(lo) > 0.0 {
        return None;
    }
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `ln Ā(e^u)` split as in [`YoungFunction::ln_split_at_log`]:
/// `Ā(s) = A(t*)(el(t*) − 1)`, so with `ln A = c x + r` and `q = c/(c−1)`,
/// `ln Ā = q u + (1−q) r − q ln el + ln(el − 1)`.
fn conjugate_split(a: &YoungFunction, u: f64) -> Option<(f64, f64)> {
    let xs = conjugate_supremizer_log(a, u)?;
    let (c, r) = a.ln_split_at_log(xs);
    let el = a.elasticity_at_log(xs);
    if !(el > 1.0) {
        return None;
    }
    if c > 1.0 && c.is_finite() {
        let q = c / (c - 1.0);
        Some((q, (1.0 - q) * r - q * el.ln() + (el - 1.0).ln()))
    } else {
        Some((0.0, c * xs + r + (el - 1.0).ln()))
    }
}

fn power_derivative(p: f64, scale: f64, t: f64) -> f64 {
    if t == 0.0 {
        return if p == 1.0 { scale } else { 0.0 };
    }
    scale * p * t.powf(p - 1.0)
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungFunction::Power { p } => write!(f, "power:p={}", fmt_num(*p)),
            YoungFunction::ScaledPower { p } => write!(f, "scaledpower:p={}", fmt_num(*p)),
            YoungFunction::LogBump { p, a } => {
                write!(f, "logbump:p={},a={}", fmt_num(*p), fmt_num(*a))
            }
            YoungFunction::LogLogBump { p, a } => {
                write!(f, "loglogbump:p={},a={}", fmt_num(*p), fmt_num(*a))
            }
            YoungFunction::EpsBump { eps } => write!(f, "epsbump:eps={}", fmt_num(*eps)),
            YoungFunction::Transformed { inner, p } => {
                write!(f, "ap:inner=({inner}),p={}", fmt_num(*p))
            }
            YoungFunction::Conjugate(c) => write!(f, "conj:inner=({})", c.inner()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent bisection oracle on a monotone map.
    fn bisect_oracle(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn power_square() {
        let a = YoungFunction::power(2.0).unwrap();
        assert_eq!(a.value(3.0), 9.0);
        assert!((a.inverse(9.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_bumps_are_one_at_one() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            for a in [0.0, 0.5, 1.5, 3.0] {
                assert_eq!(YoungFunction::log_bump(p, a).unwrap().value(1.0), 1.0);
                assert_eq!(YoungFunction::loglog_bump(p, a).unwrap().value(1.0), 1.0);
            }
        }
        assert_eq!(YoungFunction::eps_bump(0.3).unwrap().value(1.0), 1.0);
    }

    #[test]
    fn eps_bump_inverse_matches_bisection() {
        let a = YoungFunction::eps_bump(1.0).unwrap();
        let oracle = bisect_oracle(|t| t * (1.0 + t.ln()), 2.0, 1.0, 2.0);
        assert!((oracle - 1.454_733_217_561_065).abs() < 1e-12);
        assert!((a.inverse(2.0) - oracle).abs() < 1e-13);
    }

    #[test]
    fn inverse_roundtrip_all_families() {
        let fams = [
            YoungFunction::power(1.5).unwrap(),
            YoungFunction::scaled_power(3.0).unwrap(),
            YoungFunction::log_bump(2.0, 1.5).unwrap(),
            YoungFunction::log_bump(1.5, -1.2).unwrap(),
            YoungFunction::loglog_bump(2.0, 1.5).unwrap(),
            YoungFunction::eps_bump(0.5).unwrap(),
            YoungFunction::transformed(YoungFunction::log_bump(2.0, 1.1).unwrap(), 2.0).unwrap(),
        ];
        for a in &fams {
            for i in -40..=40 {
                let t = 10f64.powf(i as f64 * 0.2);
                let s = a.value(t);
                let back = a.inverse(s);
                assert!((back - t).abs() <= 1e-10 * t, "{a}: t={t} back={back}");
            }
            assert_eq!(a.inverse(0.0), 0.0);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let fams = [
            YoungFunction::log_bump(2.0, 1.5).unwrap(),
            YoungFunction::loglog_bump(1.5, 0.7).unwrap(),
            YoungFunction::eps_bump(0.5).unwrap(),
            YoungFunction::transformed(YoungFunction::log_bump(3.0, 2.0).unwrap(), 3.0).unwrap(),
        ];
        for a in &fams {
            for t in [0.3, 0.9, 1.7, 5.0, 120.0] {
                let h = 1e-6 * t;
                let fd = (a.value(t + h) - a.value(t - h)) / (2.0 * h);
                let d = a.derivative(t);
                assert!((fd - d).abs() <= 1e-5 * d.max(1.0), "{a} at {t}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn right_derivative_at_kink() {
        let a = YoungFunction::log_bump(2.0, 1.5).unwrap();
        assert!((a.derivative(1.0) - 3.5).abs() < 1e-14);
        let e = YoungFunction::eps_bump(0.25).unwrap();
        assert!((e.derivative(1.0) - 1.25).abs() < 1e-14);
        assert_eq!(e.derivative(0.5), 1.0);
    }

    #[test]
    fn ln_value_consistent() {
        let a = YoungFunction::loglog_bump(2.0, 1.5).unwrap();
        for x in [-3.0, 0.0, 0.5, 4.0, 30.0] {
            assert!((a.ln_value_at_log(x) - a.value(f64::exp(x)).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_profiles() {
        assert!(!YoungFunction::power(1.0).unwrap().growth().superlinear());
        assert!(YoungFunction::eps_bump(0.1).unwrap().growth().superlinear());
        assert!(!YoungFunction::eps_bump(0.0).unwrap().growth().superlinear());
        let g = YoungFunction::log_bump(2.0, -1.5).unwrap().growth();
        assert!(g.tail_converges(2.0));
        assert!(!YoungFunction::power(2.0).unwrap().growth().tail_converges(2.0));
    }

    #[test]
    fn invalid_parameters() {
        assert!(YoungFunction::power(0.5).is_err());
        assert!(YoungFunction::log_bump(1.0, -2.0).is_err());
        assert!(YoungFunction::eps_bump(-0.1).is_err());
        assert!(YoungFunction::transformed(YoungFunction::power(2.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn power_one_conjugate_is_degenerate() {
        let err = YoungFunction::power(1.0).unwrap().conjugate().unwrap_err();
        assert!(matches!(err, Error::DegenerateConjugate(_)));
    }

    #[test]
    fn scaled_power_self_dual() {
        let a = YoungFunction::scaled_power(2.0).unwrap();
        let c = a.conjugate().unwrap();
        assert_eq!(c, a);
        assert_eq!(c.value(3.0), 4.5);
    }

    #[test]
    fn conjugate_log_domain_matches_table() {
        for a in [
            YoungFunction::log_bump(2.0, 1.5).unwrap(),
            YoungFunction::loglog_bump(1.5, 0.5).unwrap(),
            YoungFunction::power(3.0).unwrap(),
        ] {
            let c = a.conjugate().unwrap();
            let YoungFunction::Conjugate(tab) = &c else { unreachable!() };
            for x in [20.5, 25.0, 40.0] {
                let direct = tab.value(f64::exp(x)).ln();
                let split = c.ln_value_at_log(x);
                assert!((direct - split).abs() < 1e-9 * direct.abs(), "{a} x={x}: {direct} vs {split}");
            }
            let el_direct = {
                let s = f64::exp(25.0);
                s * tab.derivative(s) / tab.value(s)
            };
            assert!((c.elasticity_at_log(25.0) - el_direct).abs() < 1e-8);
        }
    }
}
