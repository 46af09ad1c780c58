//! Pointwise evaluation of the mean inequalities as signed residuals.
//!
//! Every inequality is reported with `lhs` and `rhs` as displayed and a
//! `residual` oriented so that `residual ≥ 0` exactly when the claimed
//! inequality holds. The minimum weight `q = min qᵢ` is always taken from the
//! configuration.
//!
//! | tag | claim |
//! |-----|-------|
//! | `diananda-upper` | `C_{r,s,t}((1−q)^α) ≥ Δ_{r,s,t,α}` |
//! | `diananda-lower` | `Δ_{r,s,t,α} ≥ C_{r,s,t}(q^α)` |
//! | `diananda-base-upper` | `M_{1/2} ≤ (1−q)A + qG` |
//! | `diananda-base-lower` | `M_{1/2} ≥ qA + (1−q)G` |
//! | `reciprocal-order-upper` | `M_{1/r} − q^{r−1}A − (1−q^{r−1})G ≤ (1/r − q^{r−1})σ/(2x₁)`, `r ≥ 2` |
//! | `reciprocal-order-lower` | `M_{1/r} − (1−q)^{r−1}A − (1−(1−q)^{r−1})G ≥ (1/r − (1−q)^{r−1})σ/(2x₁)`, `1 < r ≤ 2` |
//! | `cartwright-field-lower` | `(r−s)σ/(2x_n) ≤ M_r − M_s` |
//! | `cartwright-field-upper` | `M_r − M_s ≤ (r−s)σ/(2x₁)` |
//! | `mg-sigma-lower` | `rσ/(2x_n) ≤ M_r − G` |
//! | `mg-sigma-upper` | `M_r − G ≤ rσ/(2x₁)` |
//! | `half-mean-lower` | `M_{1/2} ≥ q^{2−1/r}M_r + (1−q^{2−1/r})G`, `1/2 < r ≤ 1` |
//! | `half-mean-upper` | `M_{1/2} ≤ (1−q)^{2−1/r}M_r + (1−(1−q)^{2−1/r})G`, `r ≥ 1` |
//! | `half-mean-sigma-upper` | `M_{1/2} − q^{2−1/r}M_r − (1−q^{2−1/r})G ≤ (1/2 − rq^{2−1/r})σ/(2x₁)`, `r₀ ≤ r ≤ 1` |
//! | `half-mean-sigma-lower` | `M_{1/2} − (1−q)^{2−1/r}M_r − (1−(1−q)^{2−1/r})G ≥ (1/2 − r(1−q)^{2−1/r})σ/(2x₁)`, `1 ≤ r ≤ 2` |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::means::{
    arithmetic_mean, c_constant_unchecked, delta, geometric_mean, power_mean, variance_sigma, Configuration,
    DeltaParams,
};
use crate::thresholds;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    #[serde(rename = "diananda-upper")]
    DianandaUpper11,
    #[serde(rename = "diananda-lower")]
    DianandaLower12,
    DianandaBaseUpper,
    DianandaBaseLower,
    #[serde(rename = "reciprocal-order-upper")]
    Gao105Upper,
    #[serde(rename = "reciprocal-order-lower")]
    Gao105pLower,
    CartwrightFieldLower,
    CartwrightFieldUpper,
    #[serde(rename = "mg-sigma-lower")]
    MGSigmaLower15,
    #[serde(rename = "mg-sigma-upper")]
    MGSigmaUpper15,
    HalfMeanLower,
    HalfMeanUpper,
    #[serde(rename = "half-mean-sigma-upper")]
    Thm2Upper13,
    #[serde(rename = "half-mean-sigma-lower")]
    Thm2Lower14,
}

impl InequalityId {
    pub const ALL: [InequalityId; 14] = [
        InequalityId::DianandaUpper11,
        InequalityId::DianandaLower12,
        InequalityId::DianandaBaseUpper,
        InequalityId::DianandaBaseLower,
        InequalityId::Gao105Upper,
        InequalityId::Gao105pLower,
        InequalityId::CartwrightFieldLower,
        InequalityId::CartwrightFieldUpper,
        InequalityId::MGSigmaLower15,
        InequalityId::MGSigmaUpper15,
        InequalityId::HalfMeanLower,
        InequalityId::HalfMeanUpper,
        InequalityId::Thm2Upper13,
        InequalityId::Thm2Lower14,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            InequalityId::DianandaUpper11 => "diananda-upper",
            InequalityId::DianandaLower12 => "diananda-lower",
            InequalityId::DianandaBaseUpper => "diananda-base-upper",
            InequalityId::DianandaBaseLower => "diananda-base-lower",
            InequalityId::Gao105Upper => "reciprocal-order-upper",
            InequalityId::Gao105pLower => "reciprocal-order-lower",
            InequalityId::CartwrightFieldLower => "cartwright-field-lower",
            InequalityId::CartwrightFieldUpper => "cartwright-field-upper",
            InequalityId::MGSigmaLower15 => "mg-sigma-lower",
            InequalityId::MGSigmaUpper15 => "mg-sigma-upper",
            InequalityId::HalfMeanLower => "half-mean-lower",
            InequalityId::HalfMeanUpper => "half-mean-upper",
            InequalityId::Thm2Upper13 => "half-mean-sigma-upper",
            InequalityId::Thm2Lower14 => "half-mean-sigma-lower",
        }
    }

    /// Tags whose value is the ratio Δ and is undefined for constant samples.
    pub fn is_delta_based(self) -> bool {
        matches!(self, InequalityId::DianandaUpper11 | InequalityId::DianandaLower12)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.tag() == s)
            .ok_or_else(|| domain(format!("unknown inequality `{s}`")))
    }
}

/// Parameters consumed by the various tags; each tag reads only what it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl CheckParams {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn triple(a: f64, b: f64, c: f64, alpha: f64) -> Self {
        Self { triple: Some([a, b, c]), alpha: Some(alpha), ..Self::default() }
    }

    pub fn order(r: f64) -> Self {
        Self { r: Some(r), ..Self::default() }
    }

    pub fn pair(r: f64, s: f64) -> Self {
        Self { r: Some(r), s: Some(s), ..Self::default() }
    }

    fn need(value: Option<f64>, name: &str, id: InequalityId) -> Result<f64> {
        let v = value.ok_or_else(|| domain(format!("parameter `{name}` is required for {id}")))?;
        if !v.is_finite() {
            return Err(domain(format!("parameter `{name}` = {v} must be finite")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Violated,
    Equality,
    Degenerate,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub tol: Tolerance,
    /// Evaluate even when the parameters or samples fall outside the tag's hypotheses.
    pub force: bool,
}


impl CheckOptions {
    pub fn forced() -> Self {
        Self { force: true, ..Self::default() }
    }
}

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: InequalityId,
    pub params: CheckParams,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `residual / scale`, see [`CheckReport::scale`].
    pub residual_rel: f64,
    pub status: Status,
    #[serde(rename = "q")]
    pub q_used: f64,
    /// `max(|lhs|, |rhs|, unit)` where `unit` is 1 for the Δ tags and `x_n`
    /// for the mean-difference tags.
    #[serde(skip)]
    pub scale: f64,
}

struct Evaluated {
    lhs: f64,
    rhs: f64,
    residual: f64,
    unit: f64,
    params: CheckParams,
}

fn require(cond: bool, force: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond || force {
        Ok(())
    } else {
        Err(domain(msg()))
    }
}

fn require_positive_min(config: &Configuration, id: InequalityId, force: bool) -> Result<()> {
    require(config.min_sample() > 0.0, force, || format!("{id} divides by x1, which must be positive (x1 = {})", config.min_sample()))
}

fn delta_params(id: InequalityId, params: &CheckParams, force: bool) -> Result<(DeltaParams, CheckParams)> {
    let [a, b, c] = params.triple.ok_or_else(|| domain(format!("parameter `triple` is required for {id}")))?;
    let alpha = CheckParams::need(params.alpha, "alpha", id)?;
    let dp = DeltaParams::new(a, b, c, alpha)?.canonical();
    require(dp.t >= 0.0, force, || format!("{id} needs nonnegative orders, got triple ({a}, {b}, {c})"))?;
    require(alpha > 0.0, force, || format!("{id} needs alpha > 0, got alpha = {alpha}"))?;
    let used = CheckParams { triple: Some([dp.r, dp.s, dp.t]), alpha: Some(alpha), ..CheckParams::default() };
    Ok((dp, used))
}

/// Evaluates one inequality on one configuration.
pub fn check(id: InequalityId, config: &Configuration, params: &CheckParams, opts: &CheckOptions) -> Result<CheckReport> {
    let q = config.min_weight();
    let force = opts.force;
    let x1 = config.min_sample();
    let xn = config.max_sample();

    let evaluated = match id {
        InequalityId::DianandaUpper11 | InequalityId::DianandaLower12 => {
            let (dp, used) = delta_params(id, params, force)?;
            let d = match delta(config, &dp) {
                Ok(d) => d,
                Err(Error::DegenerateInput(_)) => {
                    return Ok(CheckReport {
                        id,
                        params: used,
                        lhs: f64::NAN,
                        rhs: f64::NAN,
                        residual: f64::NAN,
                        residual_rel: f64::NAN,
                        status: Status::Degenerate,
                        q_used: q,
                        scale: f64::NAN,
                    })
                }
                Err(e) => return Err(e),
            };
            if id == InequalityId::DianandaUpper11 {
                let bound = c_constant_unchecked(dp.r, dp.s, dp.t, (1.0 - q).powf(dp.alpha));
                Evaluated { lhs: bound, rhs: d, residual: bound - d, unit: 1.0, params: used }
            } else {
                let bound = c_constant_unchecked(dp.r, dp.s, dp.t, q.powf(dp.alpha));
                Evaluated { lhs: d, rhs: bound, residual: d - bound, unit: 1.0, params: used }
            }
        }
        InequalityId::DianandaBaseUpper | InequalityId::DianandaBaseLower => {
            let a = arithmetic_mean(config);
            let g = geometric_mean(config);
            let m = power_mean(config, 0.5)?;
            let (rhs, residual) = if id == InequalityId::DianandaBaseUpper {
                let rhs = (1.0 - q) * a + q * g;
                (rhs, rhs - m)
            } else {
                let rhs = q * a + (1.0 - q) * g;
                (rhs, m - rhs)
            };
            Evaluated { lhs: m, rhs, residual, unit: xn, params: CheckParams::none() }
        }
        InequalityId::Gao105Upper | InequalityId::Gao105pLower => {
            let r = CheckParams::need(params.r, "r", id)?;
            if id == InequalityId::Gao105Upper {
                require(r >= 2.0, force, || format!("{id} needs r >= 2, got r = {r}"))?;
            } else {
                require(r > 1.0 && r <= 2.0, force, || format!("{id} needs 1 < r <= 2, got r = {r}"))?;
            }
            require_positive_min(config, id, force)?;
            let w = if id == InequalityId::Gao105Upper { q.powf(r - 1.0) } else { (1.0 - q).powf(r - 1.0) };
            let lhs = power_mean(config, 1.0 / r)? - w * arithmetic_mean(config) - (1.0 - w) * geometric_mean(config);
            let rhs = (1.0 / r - w) / (2.0 * x1) * variance_sigma(config);
            let residual = if id == InequalityId::Gao105Upper { rhs - lhs } else { lhs - rhs };
            Evaluated { lhs, rhs, residual, unit: xn, params: CheckParams::order(r) }
        }
        InequalityId::CartwrightFieldLower | InequalityId::CartwrightFieldUpper => {
            let r = CheckParams::need(params.r, "r", id)?;
            let s = CheckParams::need(params.s, "s", id)?;
            require(r > s, force, || format!("{id} needs r > s, got r = {r}, s = {s}"))?;
            require_positive_min(config, id, force)?;
            let diff = power_mean(config, r)? - power_mean(config, s)?;
            let sigma = variance_sigma(config);
            if id == InequalityId::CartwrightFieldLower {
                let lhs = (r - s) * sigma / (2.0 * xn);
                Evaluated { lhs, rhs: diff, residual: diff - lhs, unit: xn, params: CheckParams::pair(r, s) }
            } else {
                let rhs = (r - s) * sigma / (2.0 * x1);
                Evaluated { lhs: diff, rhs, residual: rhs - diff, unit: xn, params: CheckParams::pair(r, s) }
            }
        }
        InequalityId::MGSigmaLower15 | InequalityId::MGSigmaUpper15 => {
            let r = CheckParams::need(params.r, "r", id)?;
            require_positive_min(config, id, force)?;
            let diff = power_mean(config, r)? - geometric_mean(config);
            let sigma = variance_sigma(config);
            if id == InequalityId::MGSigmaLower15 {
                let lhs = r * sigma / (2.0 * xn);
                Evaluated { lhs, rhs: diff, residual: diff - lhs, unit: xn, params: CheckParams::order(r) }
            } else {
                let rhs = r * sigma / (2.0 * x1);
                Evaluated { lhs: diff, rhs, residual: rhs - diff, unit: xn, params: CheckParams::order(r) }
            }
        }
        InequalityId::HalfMeanLower | InequalityId::HalfMeanUpper => {
            let r = CheckParams::need(params.r, "r", id)?;
            let w = if id == InequalityId::HalfMeanLower {
                require(r > 0.5 && r <= 1.0, force, || format!("{id} needs 1/2 < r <= 1, got r = {r}"))?;
                q.powf(2.0 - 1.0 / r)
            } else {
                require(r >= 1.0, force, || format!("{id} needs r >= 1, got r = {r}"))?;
                (1.0 - q).powf(2.0 - 1.0 / r)
            };
            let m_half = power_mean(config, 0.5)?;
            let rhs = w * power_mean(config, r)? + (1.0 - w) * geometric_mean(config);
            let residual = if id == InequalityId::HalfMeanLower { m_half - rhs } else { rhs - m_half };
            Evaluated { lhs: m_half, rhs, residual, unit: xn, params: CheckParams::order(r) }
        }
        InequalityId::Thm2Upper13 | InequalityId::Thm2Lower14 => {
            let r = CheckParams::need(params.r, "r", id)?;
            let w = if id == InequalityId::Thm2Upper13 {
                let r0 = thresholds::r0();
                require(r >= r0 * (1.0 - 1e-12) && r <= 1.0, force, || {
                    format!("{id} needs r0 <= r <= 1 (r0 = {r0}), got r = {r}")
                })?;
                q.powf(2.0 - 1.0 / r)
            } else {
                require((1.0..=2.0).contains(&r), force, || format!("{id} needs 1 <= r <= 2, got r = {r}"))?;
                (1.0 - q).powf(2.0 - 1.0 / r)
            };
            require_positive_min(config, id, force)?;
            let lhs = power_mean(config, 0.5)? - w * power_mean(config, r)? - (1.0 - w) * geometric_mean(config);
            let rhs = (0.5 - r * w) / (2.0 * x1) * variance_sigma(config);
            let residual = if id == InequalityId::Thm2Upper13 { rhs - lhs } else { lhs - rhs };
            Evaluated { lhs, rhs, residual, unit: xn, params: CheckParams::order(r) }
        }
    };

    Ok(classify(id, evaluated, q, &opts.tol))
}

fn classify(id: InequalityId, e: Evaluated, q: f64, tol: &Tolerance) -> CheckReport {
    let scale = e.lhs.abs().max(e.rhs.abs()).max(e.unit);
    let threshold = tol.threshold(scale);
    let status = if e.residual.is_nan() {
        Status::Degenerate
    } else if e.residual.abs() <= threshold {
        Status::Equality
    } else if e.residual > 0.0 {
        Status::Holds
    } else {
        Status::Violated
    };
    CheckReport {
        id,
        params: e.params,
        lhs: e.lhs,
        rhs: e.rhs,
        residual: e.residual,
        residual_rel: e.residual / scale,
        status,
        q_used: q,
        scale,
    }
}

/// Residual of the rearranged form of `half-mean-sigma-upper`:
/// `q^{2−1/r}(M_r − G − rσ/(2x₁)) − (M_{1/2} − G − σ/(4x₁))`.
pub fn half_mean_sigma_upper_recast_residual(config: &Configuration, r: f64) -> Result<f64> {
    let w = config.min_weight().powf(2.0 - 1.0 / r);
    let g = geometric_mean(config);
    let sigma = variance_sigma(config);
    let x1 = config.min_sample();
    let right = w * (power_mean(config, r)? - g - r * sigma / (2.0 * x1));
    let left = power_mean(config, 0.5)? - g - sigma / (4.0 * x1);
    Ok(right - left)
}

/// Whether `config` is one of the documented equality cases of `id`.
///
/// Constant samples are an equality case of every tag. `half-mean-sigma-upper` adds
/// `r = 1, n = 2, q = 1/2`. The ratio bounds (and their base forms) are
/// attained by the two-point configuration with `x₁ = 0`, carrying weight `q`
/// on `x₁` for the upper bound and on `x₂` for the lower bound.
pub fn equality_witness(id: InequalityId, config: &Configuration, params: &CheckParams) -> bool {
    if config.is_constant() {
        return true;
    }
    let two_point_zero = config.n() == 2 && config.min_sample() == 0.0;
    let q = config.min_weight();
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    match id {
        InequalityId::Thm2Upper13 => {
            params.r.is_some_and(|r| same(r, 1.0)) && config.n() == 2 && same(q, 0.5)
        }
        InequalityId::DianandaUpper11 | InequalityId::DianandaBaseUpper => two_point_zero && same(config.q()[0], q),
        InequalityId::DianandaLower12 | InequalityId::DianandaBaseLower => two_point_zero && same(config.q()[1], q),
        _ => false,
    }
}

/// Checks one inequality over many configurations.
pub fn check_batch(
    id: InequalityId,
    configs: &[Configuration],
    params: &CheckParams,
    opts: &CheckOptions,
    exec: Execution,
) -> Vec<Result<CheckReport>> {
    exec.map_indexed(configs.len(), |i| check(id, &configs[i], params, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(x: &[f64], q: &[f64]) -> Configuration {
        Configuration::new(x.to_vec(), q.to_vec()).unwrap()
    }

    fn thirds() -> Configuration {
        let third = 1.0 / 3.0;
        cfg(&[1.0, 4.0, 9.0], &[third, third, 1.0 - 2.0 * third])
    }

    #[test]
    fn tags_round_trip() {
        for id in InequalityId::ALL {
            assert_eq!(id.tag().parse::<InequalityId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.tag()));
        }
        assert!("nope".parse::<InequalityId>().is_err());
    }

    #[test]
    fn diananda_upper_on_three_points() {
        let rep = check(InequalityId::DianandaUpper11, &thirds(), &CheckParams::triple(1.0, 0.5, 0.0, 1.0), &CheckOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Holds);
        assert!((rep.rhs - 2.0472).abs() < 1e-4);
        assert_relative_eq!(rep.lhs, 3.0, max_relative = 1e-12);
        assert!(!equality_witness(InequalityId::DianandaUpper11, &thirds(), &rep.params));
    }

    #[test]
    fn diananda_lower_boundary_equality() {
        let c = cfg(&[0.0, 1.0], &[0.75, 0.25]);
        let p = CheckParams::triple(0.0, 1.0, 0.5, 1.0);
        let rep = check(InequalityId::DianandaLower12, &c, &p, &CheckOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Equality);
        assert_relative_eq!(rep.lhs, 4.0 / 3.0, max_relative = 1e-14);
        assert_eq!(rep.params.triple, Some([1.0, 0.5, 0.0]));
        assert!(equality_witness(InequalityId::DianandaLower12, &c, &p));
        assert!(!equality_witness(InequalityId::DianandaUpper11, &c, &p));
    }

    #[test]
    fn delta_tags_degenerate_on_constant() {
        let c = cfg(&[2.0, 2.0], &[0.5, 0.5]);
        let rep = check(InequalityId::DianandaUpper11, &c, &CheckParams::triple(1.0, 0.5, 0.0, 1.0), &CheckOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Degenerate);
    }

    #[test]
    fn cartwright_field_hand_value() {
        let c = cfg(&[1.0, 4.0], &[0.5, 0.5]);
        let rep = check(InequalityId::CartwrightFieldUpper, &c, &CheckParams::pair(1.0, 0.0), &CheckOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Holds);
        assert_relative_eq!(rep.lhs, 0.5, max_relative = 1e-14);
        assert_relative_eq!(rep.rhs, 1.125, max_relative = 1e-14);
    }

    #[test]
    fn half_mean_sigma_equality_cases() {
        let c = cfg(&[3.0, 3.0, 3.0], &[0.2, 0.3, 0.5]);
        for r in [1.0, 1.5, 2.0] {
            let rep = check(InequalityId::Thm2Lower14, &c, &CheckParams::order(r), &CheckOptions::default()).unwrap();
            assert_eq!(rep.status, Status::Equality);
        }
        let c = cfg(&[1.0, 4.0], &[0.5, 0.5]);
        let p = CheckParams::order(1.0);
        let rep = check(InequalityId::Thm2Upper13, &c, &p, &CheckOptions::default()).unwrap();
        assert_eq!(rep.status, Status::Equality);
        assert!(equality_witness(InequalityId::Thm2Upper13, &c, &p));
        assert!(!equality_witness(InequalityId::Thm2Upper13, &c, &CheckParams::order(0.8)));
    }

    #[test]
    fn hypotheses_enforced_unless_forced() {
        let c = cfg(&[0.0, 1.0], &[0.5, 0.5]);
        assert!(check(InequalityId::MGSigmaUpper15, &c, &CheckParams::order(1.0), &CheckOptions::default()).is_err());
        let c = cfg(&[1.0, 2.0], &[0.5, 0.5]);
        assert!(check(InequalityId::Thm2Lower14, &c, &CheckParams::order(2.5), &CheckOptions::default()).is_err());
        assert!(check(InequalityId::Thm2Lower14, &c, &CheckParams::order(2.5), &CheckOptions::forced()).is_ok());
        assert!(check(InequalityId::Gao105Upper, &c, &CheckParams::none(), &CheckOptions::forced()).is_err());
        assert!(check(InequalityId::DianandaUpper11, &c, &CheckParams::triple(1.0, 0.5, 0.0, -1.0), &CheckOptions::default()).is_err());
    }

    #[test]
    fn recast_matches_direct() {
        let c = thirds();
        for r in [thresholds::r0(), 0.8, 1.0] {
            let rep = check(InequalityId::Thm2Upper13, &c, &CheckParams::order(r), &CheckOptions::default()).unwrap();
            let recast = half_mean_sigma_upper_recast_residual(&c, r).unwrap();
            assert!((rep.residual - recast).abs() <= 1e-12 * rep.scale, "r = {r}");
        }
    }

    #[test]
    fn report_json_keys() {
        let rep = check(InequalityId::MGSigmaUpper15, &thirds(), &CheckParams::order(2.0), &CheckOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["id", "lhs", "params", "q", "residual", "residual_rel", "rhs", "status"]);
        assert_eq!(v["id"], "mg-sigma-upper");
        assert_eq!(v["status"], "Holds");
    }
}
