//! Weighted power means and the functionals built from them.
//!
//! All means are evaluated relative to a reference sample (the largest for
//! positive orders, the smallest for negative ones) so every power term lies
//! in `[0, 1]`, and the power sum is accumulated as `Σ qᵢ·expm1(r·ln(xᵢ/ref))`
//! with compensated summation. That keeps orders in the hundreds from
//! overflowing and keeps orders near zero free of cancellation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Tolerance on `|Σ qᵢ − 1|` accepted by [`Configuration::new`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Below this `|r|` the power mean uses its second-order expansion around the
/// geometric mean.
pub const SMALL_ORDER: f64 = 1e-8;

/// Sorted nonnegative samples with positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration", into = "RawConfiguration")]
pub struct Configuration {
    x: Vec<f64>,
    q: Vec<f64>,
    strict: bool,
}

#[derive(Serialize, Deserialize)]
struct RawConfiguration {
    x: Vec<f64>,
    q: Vec<f64>,
}

impl TryFrom<RawConfiguration> for Configuration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        Configuration::new(raw.x, raw.q)
    }
}

impl From<Configuration> for RawConfiguration {
    fn from(c: Configuration) -> Self {
        RawConfiguration { x: c.x, q: c.q }
    }
}

impl Configuration {
    /// Builds a configuration from samples already sorted ascending.
    pub fn new(x: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if x.len() != q.len() {
            return Err(Error::Config(format!(
                "x has {} entries but q has {}",
                x.len(),
                q.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Config(format!("need n >= 2 samples, got {}", x.len())));
        }
        if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Config(format!("x[{i}] = {v} is not a finite nonnegative number")));
        }
        if let Some((i, v)) = q.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("q[{i}] = {v} is not a finite positive weight")));
        }
        if let Some(i) = (1..x.len()).find(|&i| x[i] < x[i - 1]) {
            return Err(Error::Config(format!(
                "x is not sorted ascending: x[{}] = {} > x[{}] = {}",
                i - 1,
                x[i - 1],
                i,
                x[i]
            )));
        }
        let total = compensated_sum(q.iter().copied());
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Config(format!("weights sum to {total}, expected 1")));
        }
        let strict = x.windows(2).all(|w| w[0] < w[1]);
        Ok(Self { x, q, strict })
    }

    /// Sorts the (sample, weight) pairs by sample before validating.
    pub fn from_unsorted(x: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if x.len() != q.len() {
            return Err(Error::Config(format!(
                "x has {} entries but q has {}",
                x.len(),
                q.len()
            )));
        }
        let mut pairs: Vec<(f64, f64)> = x.into_iter().zip(q).collect();
        if pairs.iter().any(|(v, _)| v.is_nan()) {
            return Err(Error::Config("x contains NaN".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (x, q) = pairs.into_iter().unzip();
        Self::new(x, q)
    }

    /// Like [`Configuration::from_unsorted`], but rescales weights whose sum is
    /// within `slack` of one (e.g. decimals typed on a command line).
    pub fn normalized(x: Vec<f64>, q: Vec<f64>, slack: f64) -> Result<Self> {
        let total = compensated_sum(q.iter().copied());
        if !total.is_finite() || (total - 1.0).abs() > slack {
            return Err(Error::Config(format!(
                "weights sum to {total}, which is not within {slack} of 1"
            )));
        }
        let q = q.into_iter().map(|w| w / total).collect();
        Self::from_unsorted(x, q)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// The minimum weight `q = min qᵢ`.
    pub fn min_weight(&self) -> f64 {
        self.q.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether `x₁ < x₂ < ⋯ < x_n` holds strictly.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_constant(&self) -> bool {
        self.x[0] == self.x[self.n() - 1]
    }

    pub fn min_sample(&self) -> f64 {
        self.x[0]
    }

    pub fn max_sample(&self) -> f64 {
        self.x[self.n() - 1]
    }

    /// The configuration with every sample multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(domain(format!("scale factor c = {c} must be finite and positive")));
        }
        Ok(Self {
            x: self.x.iter().map(|v| v * c).collect(),
            q: self.q.clone(),
            strict: self.strict,
        })
    }

    /// Replaces one sample, keeping weights. The result must stay sorted.
    pub fn with_sample(&self, index: usize, value: f64) -> Result<Self> {
        let mut x = self.x.clone();
        x[index] = value;
        Self::new(x, self.q.clone())
    }

    fn weight_total(&self) -> f64 {
        compensated_sum(self.q.iter().copied())
    }
}

/// Whether a mean was raised to a power or replaced by its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Plain,
    Log,
}

/// `M_r^α`, or `ln M_r` under the `α = 0` convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub value: f64,
    pub convention: Convention,
}

impl MeanValue {
    pub fn powered(config: &Configuration, r: f64, alpha: f64) -> Result<Self> {
        let m = power_mean(config, r)?;
        let (value, convention) = if alpha == 0.0 {
            (m.ln(), Convention::Log)
        } else {
            (m.powf(alpha), Convention::Plain)
        };
        if !value.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "M_{r}^{alpha} is not finite (M_{r} = {m})"
            )));
        }
        Ok(Self { value, convention })
    }
}

pub fn arithmetic_mean(config: &Configuration) -> f64 {
    let total = config.weight_total();
    compensated_sum(config.q.iter().zip(&config.x).map(|(q, x)| q * x)) / total
}

pub fn geometric_mean(config: &Configuration) -> f64 {
    if config.x[0] == 0.0 {
        return 0.0;
    }
    let reference = config.max_sample();
    let ln_ref = reference.ln();
    let total = config.weight_total();
    let mean_log_ratio = compensated_sum(config.q.iter().zip(&config.x).map(|(q, x)| q * (x.ln() - ln_ref))) / total;
    reference * mean_log_ratio.exp()
}

/// Weighted power mean `M_{n,r} = (Σ qᵢ xᵢ^r)^{1/r}`, with `M_{n,0}` the
/// weighted geometric mean.
///
/// A zero sample forces the mean to zero for `r ≤ 0`.
pub fn power_mean(config: &Configuration, r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(domain(format!("mean order r = {r} must be finite")));
    }
    if r == 0.0 {
        return Ok(geometric_mean(config));
    }
    let has_zero = config.x[0] == 0.0;
    if has_zero && r < 0.0 {
        return Ok(0.0);
    }
    if config.is_constant() {
        return Ok(config.x[0]);
    }
    if r == 1.0 {
        return Ok(arithmetic_mean(config));
    }
    if r.abs() < SMALL_ORDER && !has_zero {
        let g = geometric_mean(config);
        return Ok(g * (0.5 * r * log_variance(config)).exp());
    }
    let reference = if r > 0.0 { config.max_sample() } else { config.min_sample() };
    let ln_ref = reference.ln();
    let total = config.weight_total();
    let mut acc = CompensatedSum::new();
    for (q, x) in config.q.iter().zip(&config.x) {
        // x = 0 with r > 0 gives expm1(-inf) = -1
        acc.add(q * (r * (x.ln() - ln_ref)).exp_m1());
    }
    let shifted = acc.total() / total;
    Ok(reference * (shifted.ln_1p() / r).exp())
}

/// Weighted variance of `ln x` (requires positive samples).
fn log_variance(config: &Configuration) -> f64 {
    let total = config.weight_total();
    let mu = compensated_sum(config.q.iter().zip(&config.x).map(|(q, x)| q * x.ln())) / total;
    compensated_sum(config.q.iter().zip(&config.x).map(|(q, x)| {
        let d = x.ln() - mu;
        q * d * d
    })) / total
}

/// `σ_n = Σ qᵢ (xᵢ − A_n)²`.
pub fn variance_sigma(config: &Configuration) -> f64 {
    if config.is_constant() {
        return 0.0;
    }
    let a = arithmetic_mean(config);
    let total = config.weight_total();
    compensated_sum(config.q.iter().zip(&config.x).map(|(q, x)| {
        let d = x - a;
        q * d * d
    })) / total
}

/// Three mutually distinct mean orders and an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaParams {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
}

impl DeltaParams {
    pub fn new(r: f64, s: f64, t: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("s", s), ("t", t), ("alpha", alpha)] {
            if !v.is_finite() {
                return Err(domain(format!("{name} = {v} must be finite")));
            }
        }
        if r == s || s == t || r == t {
            return Err(domain(format!("orders must be mutually distinct, got ({r}, {s}, {t})")));
        }
        Ok(Self { r, s, t, alpha })
    }

    /// The same orders rearranged so that `r > s > t`.
    pub fn canonical(&self) -> Self {
        let mut v = [self.r, self.s, self.t];
        v.sort_by(|a, b| b.total_cmp(a));
        Self { r: v[0], s: v[1], t: v[2], alpha: self.alpha }
    }

    pub fn is_canonical(&self) -> bool {
        self.r > self.s && self.s > self.t
    }
}

/// `Δ_{r,s,t,α} = |(M_r^α − M_t^α) / (M_r^α − M_s^α)|`, with `ln M` in place
/// of `M^α` when `α = 0`.
pub fn delta(config: &Configuration, params: &DeltaParams) -> Result<f64> {
    if config.is_constant() {
        return Err(Error::DegenerateInput("all samples are equal, so Δ is 0/0".into()));
    }
    let mr = MeanValue::powered(config, params.r, params.alpha)?.value;
    let ms = MeanValue::powered(config, params.s, params.alpha)?.value;
    let mt = MeanValue::powered(config, params.t, params.alpha)?.value;
    let den = mr - ms;
    if den == 0.0 {
        return Err(Error::DegenerateInput(format!(
            "denominator M_{}^α − M_{}^α underflows to 0",
            params.r, params.s
        )));
    }
    let value = ((mr - mt) / den).abs();
    if !value.is_finite() {
        return Err(Error::DegenerateInput(format!("Δ evaluated to {value}")));
    }
    Ok(value)
}

/// `C_{r,s,t}(x) = (1 − x^{1/t−1/r}) / (1 − x^{1/s−1/r})`, and
/// `C_{r,s,0}(x) = 1 / (1 − x^{1/s−1/r})`.
pub fn c_constant(r: f64, s: f64, t: f64, xarg: f64) -> Result<f64> {
    if !(r > s && s > t && t >= 0.0) {
        return Err(domain(format!("C requires r > s > t >= 0, got ({r}, {s}, {t})")));
    }
    if !(xarg > 0.0 && xarg < 1.0) {
        return Err(domain(format!("C requires 0 < x < 1, got x = {xarg}")));
    }
    Ok(c_constant_unchecked(r, s, t, xarg))
}

/// [`c_constant`] without the ordering and range checks.
pub(crate) fn c_constant_unchecked(r: f64, s: f64, t: f64, xarg: f64) -> f64 {
    let ln_x = xarg.ln();
    let den = -((1.0 / s - 1.0 / r) * ln_x).exp_m1();
    if t == 0.0 {
        1.0 / den
    } else {
        -((1.0 / t - 1.0 / r) * ln_x).exp_m1() / den
    }
}

/// Sorts three distinct nonnegative orders into `(r, s, t)` with `r > s > t`.
pub fn order_triple(a: f64, b: f64, c: f64) -> Result<(f64, f64, f64)> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("{name} = {v} must be finite and nonnegative")));
        }
    }
    if a == b || b == c || a == c {
        return Err(domain(format!("orders must be mutually distinct, got ({a}, {b}, {c})")));
    }
    let mut v = [a, b, c];
    v.sort_by(|x, y| y.total_cmp(x));
    Ok((v[0], v[1], v[2]))
}
