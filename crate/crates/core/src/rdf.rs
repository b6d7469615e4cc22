//! The Rubio de Francia iteration
//! `R(h) = Σ_{k>=0} S^k h / (2‖S‖)^k`, `S f = M(f v^{1/s}) / v^{1/s}`,
//! with `‖S‖_{L^s(v)}` replaced by the dyadic bound `s'`.

use serde::Serialize;

use crate::dyadic::GridFunction;
use crate::error::{Error, Result};
use crate::maximal::dyadic_maximal;
use crate::norms::lp_norm;
use crate::weights::a1_constant;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct RdFResult {
    pub r: GridFunction,
    /// Last power of `S` included.
    pub k_terms: u32,
    /// Bound used for `‖S‖_{L^s(v)}`.
    pub s_norm: f64,
    pub norm_h: f64,
    pub norm_r: f64,
    /// `[R(h) v^{1/s}]_{A₁}`
    pub a1: f64,
    /// `h <= R(h)` cellwise, no tolerance.
    pub property_a: bool,
    /// `‖R(h)‖_{L^s(v)} <= 2‖h‖_{L^s(v)} + tol`.
    pub property_b: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RdFSummary {
    pub s: f64,
    pub k_terms: u32,
    pub s_norm: f64,
    pub norm_h: f64,
    pub norm_r: f64,
    pub norm_ratio: f64,
    pub property_a: bool,
    pub property_b: bool,
    pub a1: f64,
    /// `a1 / s'`
    pub a1_over_s_prime: f64,
}

impl RdFResult {
    pub fn summary(&self, s: f64) -> RdFSummary {
        RdFSummary {
            s,
            k_terms: self.k_terms,
            s_norm: self.s_norm,
            norm_h: self.norm_h,
            norm_r: self.norm_r,
            norm_ratio: if self.norm_h > 0.0 { self.norm_r / self.norm_h } else { 0.0 },
            property_a: self.property_a,
            property_b: self.property_b,
            a1: self.a1,
            a1_over_s_prime: self.a1 / self.s_norm,
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("s must exceed 1, got {s}")))
    }
}

fn root_weight(v: &GridFunction, s: f64) -> Result<GridFunction> {
    if let Some((cell, &value)) = v.values().iter().enumerate().find(|(_, x)| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::DegenerateWeight(format!("v must be positive, found {value} at cell {cell}")));
    }
    Ok(v.map(|x| x.powf(1.0 / s)))
}

fn apply_s(f: &GridFunction, vs: &GridFunction) -> Result<GridFunction> {
    let m = dyadic_maximal(&f.mul(vs)?).output;
    m.zip_with(vs, |a, b| a / b)
}

/// `S f = M^d(f v^{1/s}) / v^{1/s}`.
pub fn s_operator(f: &GridFunction, v: &GridFunction, s: f64) -> Result<GridFunction> {
    check_s(s)?;
    apply_s(f, &root_weight(v, s)?)
}

/// Builds `R(h)`, truncating once the geometric tail bound `2^{-K}‖h‖`
/// drops below `tol`.
pub fn rdf_build(h: &GridFunction, v: &GridFunction, s: f64, tol: f64) -> Result<RdFResult> {
    check_s(s)?;
    if !(tol > 0.0) {
        return Err(Error::param(format!("tol must be positive, got {tol}")));
    }
    if let Some((cell, &value)) = h.values().iter().enumerate().find(|(_, x)| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::param(format!("h must be nonnegative, found {value} at cell {cell}")));
    }
    let vs = root_weight(v, s)?;
    let s_prime = s / (s - 1.0);
    let norm_h = lp_norm(h, s, Some(v))?;
    if norm_h == 0.0 {
        return Err(Error::DegenerateWeight("h vanishes identically".into()));
    }
    let k_terms = (norm_h / tol).log2().ceil().max(0.0) as u32;
    let mut acc = h.values().to_vec();
    let mut term = h.clone();
    let ratio = 1.0 / (2.0 * s_prime);
    for _ in 0..k_terms {
        term = apply_s(&term, &vs)?.scale(ratio);
        for (a, t) in acc.iter_mut().zip(term.values()) {
            *a += t;
        }
    }
    let r = GridFunction::new(h.grid(), acc)?;
    let norm_r = lp_norm(&r, s, Some(v))?;
    let property_a = r.values().iter().zip(h.values()).all(|(a, b)| a >= b);
    let property_b = norm_r <= 2.0 * norm_h + tol;
    let a1 = a1_constant(&r.mul(&vs)?)?.value;
    Ok(RdFResult { r, k_terms, s_norm: s_prime, norm_h, norm_r, a1, property_a, property_b })
}
