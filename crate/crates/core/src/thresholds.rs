//! Sharp exponent and order thresholds.
//!
//! * `a_r(t)` and its minimum over `t ∈ [0, 1]` bound the admissible
//!   perturbation `α = 1 ± a` of the Diananda exponent for the order triple
//!   `{1, 1/r, 0}`.
//! * `t₁(r)` and `t₂(r)` solve the implicit equations behind the explicit
//!   perturbations `a₁(r)` and `a₂(r)`.
//! * `r₀` is the smallest order for which the half-mean upper bound holds.
//!
//! Every root is found by bisection on a bracket where the defining function
//! changes sign monotonically.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::{bisect, golden_section, one_minus_pow_ratio, BisectOptions, Bisection};

/// Grid size used by [`min_a_r`] before golden-section refinement.
pub const MIN_A_R_GRID: usize = 4096;

/// Brackets for `t₁`/`t₂` are clipped to `[EDGE, 1 − EDGE]`.
const EDGE: f64 = 1e-12;

/// A solved scalar together with its final bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Residual of the defining equation at `value`.
    pub residual: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub low_confidence: bool,
}

impl From<Bisection> for ThresholdResult {
    fn from(b: Bisection) -> Self {
        Self {
            value: b.root,
            lo: b.lo,
            hi: b.hi,
            residual: b.residual,
            iterations: b.iterations,
            low_confidence: b.low_confidence,
        }
    }
}

fn require_order_above_one(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 1.0) {
        return Err(domain(format!("a_r needs r > 1, got r = {r}")));
    }
    Ok(())
}

/// `a_r(t) = |ln((1+t)^{r−1}(1−t)/(1−t^r))| / ln((1+t)^r/(1+t^r))`.
///
/// The endpoints are limits: `|r−2|/r` at `t = 0` and
/// `|ln(2^{r−1}/r)| / ((r−1) ln 2)` at `t = 1`.
pub fn a_r_fn(r: f64, t: f64) -> Result<f64> {
    require_order_above_one(r)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("a_r needs 0 <= t <= 1, got t = {t}")));
    }
    if t == 0.0 {
        return Ok(a_r_at_zero(r));
    }
    if t == 1.0 {
        return Ok(a_r_at_one(r));
    }
    let num = (r - 1.0) * t.ln_1p() - one_minus_pow_ratio(t, r).ln();
    let den = r * t.ln_1p() - t.powf(r).ln_1p();
    Ok(num.abs() / den)
}

pub fn a_r_at_zero(r: f64) -> f64 {
    (r - 2.0).abs() / r
}

pub fn a_r_at_one(r: f64) -> f64 {
    ((r - 1.0) * std::f64::consts::LN_2 - r.ln()).abs() / ((r - 1.0) * std::f64::consts::LN_2)
}

/// Location and value of `min_{0≤t≤1} a_r(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArMinimum {
    pub t_star: f64,
    pub a_star: f64,
}

/// Global minimum of `a_r` on `[0, 1]`: dense grid, then golden-section on the
/// two cells around the best grid point. No unimodality is assumed.
pub fn min_a_r(r: f64) -> Result<ArMinimum> {
    require_order_above_one(r)?;
    let step = 1.0 / MIN_A_R_GRID as f64;
    let eval = |t: f64| a_r_fn(r, t.clamp(0.0, 1.0)).unwrap_or(f64::INFINITY);
    let (mut best_k, mut best) = (0usize, f64::INFINITY);
    for k in 0..=MIN_A_R_GRID {
        let v = eval(k as f64 * step);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let lo = (best_k.saturating_sub(1)) as f64 * step;
    let hi = ((best_k + 1).min(MIN_A_R_GRID)) as f64 * step;
    let refined = golden_section(eval, lo, hi, 1e-14, 200);
    let (t_star, a_star) = if refined.value < best { (refined.x, refined.value) } else { (best_k as f64 * step, best) };
    Ok(ArMinimum { t_star, a_star: a_star.max(0.0) })
}

/// Left minus right side of the `t₁` equation
/// `2 − r − t^{r−1} = (1−t^r)/((1+t)^{r−1}(1−t)) − 1`.
pub fn t1_equation(r: f64, t: f64) -> f64 {
    let rhs = one_minus_pow_ratio(t, r) / (1.0 + t).powf(r - 1.0) - 1.0;
    2.0 - r - t.powf(r - 1.0) - rhs
}

/// Left minus right side of the `t₂` equation
/// `r − 2 − t = (1+t)^{r−1}(1−t)/(1−t^r) − 1`.
pub fn t2_equation(r: f64, t: f64) -> f64 {
    let rhs = (1.0 + t).powf(r - 1.0) / one_minus_pow_ratio(t, r) - 1.0;
    r - 2.0 - t - rhs
}

/// `(3r + 1)·3^{1/r} − 63/4`.
pub fn r0_equation(r: f64) -> f64 {
    (3.0 * r + 1.0) * 3f64.powf(1.0 / r) - 63.0 / 4.0
}

pub fn solve_t1(r: f64) -> Result<ThresholdResult> {
    if !(r > 1.0 && r < 2.0) {
        return Err(domain(format!("t1 is defined for 1 < r < 2, got r = {r}")));
    }
    let b = bisect(|t| t1_equation(r, t), EDGE, 1.0 - EDGE, BisectOptions::default())?;
    Ok(b.into())
}

pub fn solve_t2(r: f64) -> Result<ThresholdResult> {
    if !(r > 2.0 && r < 3.0) {
        return Err(domain(format!("t2 is defined for 2 < r < 3, got r = {r}")));
    }
    let b = bisect(|t| t2_equation(r, t), EDGE, 1.0 - EDGE, BisectOptions::default())?;
    Ok(b.into())
}

/// `a₁(r) = (2 − r − t₁^{r−1}) / r` for `1 < r < 2`.
pub fn a1(r: f64) -> Result<f64> {
    let t1 = solve_t1(r)?.value;
    Ok((2.0 - r - t1.powf(r - 1.0)) / r)
}

/// `a₂(r) = (r − 2 − t₂) / r` for `2 < r < 3`.
pub fn a2(r: f64) -> Result<f64> {
    let t2 = solve_t2(r)?.value;
    Ok((r - 2.0 - t2) / r)
}

/// Largest exponent `1 + a₁(r)` for the upper bound with orders `{1, 1/r, 0}`, `1 < r < 2`.
pub fn alpha_threshold_upper(r: f64) -> Result<f64> {
    if !(r > 1.0 && r < 2.0) {
        return Err(domain(format!("upper alpha threshold is defined for 1 < r < 2, got r = {r}")));
    }
    Ok(1.0 + a1(r)?)
}

/// Smallest exponent for the lower bound with orders `{1, 1/r, 0}`, `r > 2`.
pub fn alpha_threshold_lower(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 2.0) {
        return Err(domain(format!("lower alpha threshold is defined for r > 2, got r = {r}")));
    }
    if r < 3.0 {
        Ok(1.0 - a2(r)?)
    } else if r < 4.0 {
        Ok(1.0 - 1.0 / (3.0 * r))
    } else {
        Ok(1.0 - (r - 2.0) / (r * r))
    }
}

/// Solves `(3r₀ + 1)·3^{1/r₀} = 63/4` on `(1/2, 1)`.
pub fn solve_r0() -> ThresholdResult {
    let opts = BisectOptions { ftol: 1e-14, ..BisectOptions::default() };
    bisect(r0_equation, 0.5, 1.0, opts).expect("r0 bracket [1/2, 1] changes sign").into()
}

/// Cached `r₀`.
pub fn r0() -> f64 {
    static R0: OnceLock<f64> = OnceLock::new();
    *R0.get_or_init(|| solve_r0().value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Richardson extrapolation of `a_r(t) ≈ L + c·t^p` to `t → 0`.
    fn extrapolate_at_zero(r: f64, p: f64) -> f64 {
        let (t, k) = (1e-4, 4.0);
        let coarse = a_r_fn(r, t).unwrap();
        let fine = a_r_fn(r, t / k).unwrap();
        let kp = k.powf(p);
        (kp * fine - coarse) / (kp - 1.0)
    }

    #[test]
    fn endpoint_limits_match_extrapolation() {
        // correction term is t^{r-1} below r = 2 and t above
        assert!((extrapolate_at_zero(1.5, 0.5) - 1.0 / 3.0).abs() < 1e-4);
        assert!((extrapolate_at_zero(3.0, 1.0) - 1.0 / 3.0).abs() < 1e-4);
        assert_relative_eq!(a_r_fn(1.5, 0.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(a_r_fn(3.0, 0.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        for r in [1.2, 1.5, 2.5, 4.0] {
            let near = a_r_fn(r, 1.0 - 1e-7).unwrap();
            assert!((near - a_r_fn(r, 1.0).unwrap()).abs() < 1e-6, "r = {r}");
        }
        assert!(a_r_fn(2.0, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn a_r_domain() {
        assert!(a_r_fn(1.0, 0.5).is_err());
        assert!(a_r_fn(1.5, 1.5).is_err());
        assert!(a_r_fn(1.5, -0.1).is_err());
    }

    #[test]
    fn minimum_bounds() {
        let m = min_a_r(2.0).unwrap();
        assert!(m.a_star.abs() < 1e-12);
        for r in [1.1, 1.5, 1.9, 2.5, 3.0, 5.0] {
            let m = min_a_r(r).unwrap();
            assert!(m.a_star <= a_r_fn(r, 0.0).unwrap());
            assert!(m.a_star >= 0.0);
        }
        let m = min_a_r(1.5).unwrap();
        assert!(m.a_star <= 1.0 / 3.0);
    }

    #[test]
    fn t1_and_t2() {
        for r in [1.2, 1.5, 1.8] {
            let res = solve_t1(r).unwrap();
            assert!(res.residual.abs() <= 1e-12);
            assert!(res.value > 0.0 && res.value < 1.0);
            assert!(a1(r).unwrap() > 0.0);
        }
        for r in [2.2, 2.5, 2.8] {
            let res = solve_t2(r).unwrap();
            assert!(res.residual.abs() <= 1e-12);
            assert!(res.value < r - 2.0);
            assert!(a2(r).unwrap() > 0.0);
        }
        assert!(solve_t1(2.0).is_err());
        assert!(solve_t2(3.0).is_err());
    }

    #[test]
    fn t1_near_range_ends() {
        for r in [1.0 + 1e-6, 2.0 - 1e-6] {
            let res = solve_t1(r).unwrap();
            assert!(res.value > 0.0 && res.value < 1.0, "r = {r}: {res:?}");
        }
    }

    #[test]
    fn lower_alpha_pieces() {
        assert_eq!(alpha_threshold_lower(3.0).unwrap(), 1.0 - 1.0 / 9.0);
        assert_eq!(alpha_threshold_lower(4.0).unwrap(), 0.875);
        assert!(alpha_threshold_lower(2.5).unwrap() < 1.0);
        assert!(alpha_threshold_lower(2.0).is_err());
    }

    #[test]
    fn upper_alpha_bounds() {
        for r in [1.05, 1.5, 1.95] {
            let a = alpha_threshold_upper(r).unwrap();
            assert!(a > 1.0 && a <= 1.0 + 1.0 / r);
        }
    }

    #[test]
    fn r0_solution() {
        assert_eq!(r0_equation(0.5) + 63.0 / 4.0, 22.5);
        assert_eq!(r0_equation(1.0) + 63.0 / 4.0, 12.0);
        let res = solve_r0();
        assert!(res.value > 0.65 && res.value < 0.67);
        assert!(res.residual.abs() <= 1e-12);
        assert!(res.lo <= res.value && res.value <= res.hi);
    }
}
