//! Tail integrals controlling the `L^p` norm of Orlicz maximal operators:
//!
//! * `α_p(A) = (∫_1^∞ A(t)/t^p dt/t)^{1/p}`
//! * `β_p(B) = (∫_{B(1)}^∞ (t/B̄(t))^p dB̄(t))^{1/p}`
//!
//! Both are computed in the variable `x = ln t`, and on `x >= 0` after the
//! further substitution `x = e^y − 1`, which turns the slowly decaying
//! logarithmic tails into exponential ones. The remainder past the last
//! quadrature node is added analytically from the local decay rate.

use crate::error::{Error, Result};
use crate::orlicz::quadrature::integrate;
use crate::orlicz::young::{Growth, YoungFunction};

const Y_MAX: f64 = 60.0;
const QUAD_TOL: f64 = 1e-12;

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("exponent must exceed 1, got {p}")))
    }
}

/// `k0·x + k1·ln F(e^x)` with the power parts combined before multiplying
/// by `x`, so exact cancellation survives at `x ~ 1e26`.
fn ln_combo(f: &YoungFunction, x: f64, k0: f64, k1: f64) -> f64 {
    let (c, r) = f.ln_split_at_log(x);
    if r == f64::NEG_INFINITY {
        return if k1 > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let mut coef = k0 + k1 * c;
    if coef.abs() <= 1e-12 * (k0.abs() + (k1 * c).abs()) {
        coef = 0.0;
    }
    let lin = if coef == 0.0 { 0.0 } else { coef * x };
    lin + k1 * r
}

/// `∫_{x0}^∞ h(x) dx` for `x0 >= 0`, with `boundary` selecting a power-law
/// remainder in `1 + y` instead of an exponential one.
fn half_line(h: &dyn Fn(f64) -> f64, x0: f64, boundary: bool) -> f64 {
    let hy = |y: f64| h(y.exp_m1()) * y.exp();
    let y0 = x0.ln_1p();
    let mut y_end = Y_MAX.max(y0 + 4.0);
    // numeric conjugates overflow early; pull the endpoint in
    while !(hy(y_end).is_finite() && hy(y_end - 1.0).is_finite() && hy(y_end - 2.0).is_finite())
        && y_end > y0 + 3.0
    {
        y_end = y0 + 0.5 * (y_end - y0);
    }
    let total = integrate(hy, y0, y_end, 0.0, QUAD_TOL);
    let end = hy(y_end);
    if end <= 0.0 || !end.is_finite() {
        return total;
    }
    let prev = hy(y_end - 1.0);
    let tail = if boundary {
        let s = (prev.ln() - end.ln()) / ((1.0 + y_end).ln() - y_end.ln());
        if s > 1.0 {
            end * (1.0 + y_end) / (s - 1.0)
        } else {
            f64::INFINITY
        }
    } else {
        let r = prev.ln() - end.ln();
        if r > 0.0 {
            end / r
        } else {
            f64::INFINITY
        }
    };
    total + tail
}

/// `∫_{x0}^0 h(x) dx` for `x0 <= 0` (`x0 = −∞` allowed).
fn negative_part(h: &dyn Fn(f64) -> f64, x0: f64) -> f64 {
    if x0 >= 0.0 {
        return 0.0;
    }
    if x0.is_finite() {
        integrate(h, x0, 0.0, 0.0, QUAD_TOL)
    } else {
        half_line(&|x: f64| h(-x), 0.0, false)
    }
}

/// `α_p(A)`; `+∞` when the tail integral diverges.
pub fn alpha_p(a: &YoungFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let g = a.growth();
    if !g.tail_converges(p) {
        return Ok(f64::INFINITY);
    }
    let h = |x: f64| ln_combo(a, x, -p, 1.0).exp();
    let boundary = g.power == p && g.log == -1.0;
    let integral = half_line(&h, 0.0, boundary);
    Ok(integral.powf(1.0 / p))
}

fn beta_tail_converges(bbar: &Growth, p: f64) -> bool {
    if bbar.power.is_infinite() {
        return true;
    }
    let e = p + bbar.power * (1.0 - p);
    if e.abs() > 1e-12 {
        return e < 0.0;
    }
    let l = bbar.log * (1.0 - p);
    l < -1.0 || (l == -1.0 && bbar.loglog * (1.0 - p) < -1.0)
}

/// `β_p(B)`; needs the complementary function `B̄`, which is exact when `B`
/// is itself a numeric conjugate. `+∞` when divergent.
pub fn beta_p(b: &YoungFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let bbar = b.conjugate()?;
    beta_p_with(b.value(1.0), &bbar, p)
}

/// `β_p` given `B(1)` and `B̄` directly.
pub fn beta_p_with(b_at_one: f64, bbar: &YoungFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let g = bbar.growth();
    if !beta_tail_converges(&g, p) {
        return Ok(f64::INFINITY);
    }
    let x0 = if b_at_one > 0.0 { b_at_one.ln() } else { f64::NEG_INFINITY };
    if x0 == f64::NEG_INFINITY {
        match bbar.growth_at_zero() {
            Some((q0, _)) if p + q0 * (1.0 - p) > 0.0 => {}
            _ => return Ok(f64::INFINITY),
        }
    }
    let h = |x: f64| {
        let lv = ln_combo(bbar, x, p, 1.0 - p);
        if lv == f64::INFINITY && bbar.ln_value_at_log(x) == f64::NEG_INFINITY {
            return 0.0;
        }
        lv.exp() * bbar.elasticity_at_log(x)
    };
    let boundary = (p + g.power * (1.0 - p)).abs() <= 1e-12 && g.log * (1.0 - p) == -1.0;
    let integral = negative_part(&h, x0) + half_line(&h, x0.max(0.0), boundary);
    Ok(integral.powf(1.0 / p))
}

/// The quantity in the discretization step of `α_p <= β_p`:
/// `∫_{B⁻¹(a)}^∞ dB(t)/t^p` (left) and `∫_{B̄⁻¹(a)}^∞ (t/B̄)^p dB̄` (right).
pub fn aux_estimate_sides(b: &YoungFunction, p: f64, a: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    let bbar = b.conjugate()?;
    let left_h = |x: f64| ln_combo(b, x, -p, 1.0).exp() * b.elasticity_at_log(x);
    let right_h = |x: f64| ln_combo(&bbar, x, p, 1.0 - p).exp() * bbar.elasticity_at_log(x);
    let side = |h: &dyn Fn(f64) -> f64, x0: f64, boundary: bool| {
        negative_part(h, x0) + half_line(h, x0.max(0.0), boundary)
    };
    let gb = b.growth();
    let left = if gb.tail_converges(p) {
        side(&left_h, b.inverse(a).ln(), gb.power == p && gb.log == -1.0)
    } else {
        f64::INFINITY
    };
    let gbar = bbar.growth();
    let right = if beta_tail_converges(&gbar, p) {
        side(&right_h, bbar.inverse(a).ln(), false)
    } else {
        f64::INFINITY
    };
    Ok((left, right))
}
