//! Randomized searches over configurations.
//!
//! Every restart draws from its own ChaCha stream keyed by the restart index,
//! so serial and parallel runs give identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::exec::Execution;
use crate::inequalities::{check, CheckOptions, CheckParams, InequalityId, Status};
use crate::means::{
    arithmetic_mean, c_constant_unchecked, delta, geometric_mean, power_mean, variance_sigma, Configuration,
    DeltaParams, MeanValue,
};

/// Relative residual below which a hunt reports a violation.
pub const VIOLATION_TOL: f64 = 1e-7;
/// Samples are kept within `e^{-LOG_FLOOR}` of the largest one.
const LOG_FLOOR: f64 = 40.0;
const WEIGHT_CLAMP: f64 = 30.0;
const MIN_STEP: f64 = 1e-9;
/// Ratio configurations with `|M_r^α − M_s^α|` below this fraction of the
/// largest mean term are skipped: there Δ is dominated by cancellation.
pub const RATIO_CONDITION_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_evals: usize,
    pub seed: u64,
    pub n_range: (usize, usize),
    pub restarts: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_evals: 100_000, seed: 0, n_range: (2, 4), restarts: 16 }
    }
}

impl SearchBudget {
    fn validate(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(domain("max_evals must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(domain("restarts must be at least 1"));
        }
        let (lo, hi) = self.n_range;
        if lo < 2 || hi < lo {
            return Err(domain(format!("n_range ({lo}, {hi}) must satisfy 2 <= min <= max")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    NoViolationFound,
    ViolationFound,
    SupremumGap(f64),
}

/// Extra numbers reported by [`sharpness_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sharpness {
    pub q_target: f64,
    pub bound: f64,
    pub boundary_delta: f64,
    pub best_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub id: InequalityId,
    pub params: CheckParams,
    pub best_config: Configuration,
    pub best_residual: f64,
    pub best_residual_rel: f64,
    pub evals_used: usize,
    pub verdict: Verdict,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<Sharpness>,
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Log-samples relative to the largest: spread drawn log-uniformly, with
/// occasional samples pushed to the floor (numerically zero).
fn sample_logs<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let spread = 10f64.powf(rng.random_range(-4.0..LOG_FLOOR.log10()));
    (0..n)
        .map(|_| if rng.random_bool(0.05) { -LOG_FLOOR } else { -spread * rng.random::<f64>() })
        .collect()
}

/// Uniform on the simplex.
fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Weights with one coordinate equal to `q_target` and all others at least
/// `q_target`; the rest of the mass is spread uniformly.
fn pinned_weights<R: Rng>(rng: &mut R, n: usize, q_target: f64) -> Vec<f64> {
    let free = 1.0 - n as f64 * q_target;
    let pin = rng.random_range(0..n);
    let d = dirichlet(rng, n - 1);
    let mut it = d.into_iter();
    let mut q: Vec<f64> = (0..n)
        .map(|i| if i == pin { q_target } else { q_target + free.max(0.0) * it.next().unwrap() })
        .collect();
    fix_sum(&mut q, pin);
    q
}

/// Absorbs rounding in the weight sum into the largest non-pinned weight.
fn fix_sum(q: &mut [f64], keep: usize) {
    let total: f64 = q.iter().sum();
    let j = (0..q.len()).filter(|&i| i != keep).max_by(|&a, &b| q[a].total_cmp(&q[b])).unwrap_or(keep);
    q[j] += 1.0 - total;
}

fn exp_samples(u: &[f64]) -> Vec<f64> {
    let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    u.iter().map(|&v| if v - top <= -LOG_FLOOR { 0.0 } else { (v - top).exp() }).collect()
}

/// Free parametrization: `x = exp(u − max u)`, `q = softmax(w)`.
fn config_from_theta(theta: &[f64], n: usize) -> Option<Configuration> {
    let x = exp_samples(&theta[..n]);
    let w: Vec<f64> = theta[n..].iter().map(|v| v.clamp(-WEIGHT_CLAMP, WEIGHT_CLAMP)).collect();
    let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = w.iter().map(|v| (v - top).exp()).collect();
    let total: f64 = e.iter().sum();
    let mut q: Vec<f64> = e.into_iter().map(|v| v / total).collect();
    fix_sum(&mut q, usize::MAX);
    Configuration::from_unsorted(x, q).ok()
}

struct Local {
    theta: Vec<f64>,
    n: usize,
    value: f64,
    evals: usize,
}

/// Minimizes `objective` from random starts with coordinate descent and step
/// halving. Returns the best point seen.
fn descend<R, S, F>(rng: &mut R, n: usize, dims: usize, budget: usize, sample: S, objective: F) -> Local
where
    R: Rng,
    S: Fn(&mut R) -> Vec<f64>,
    F: Fn(&[f64]) -> f64,
{
    let mut evals = 0usize;
    let mut best = Local { theta: sample(rng), n, value: f64::INFINITY, evals: 0 };
    let seeding = (budget / 4).max(1);
    while evals < budget {
        // random phase
        let mut cur = sample(rng);
        let mut cur_val = objective(&cur);
        evals += 1;
        for _ in 0..seeding.min(budget - evals) {
            let cand = sample(rng);
            let v = objective(&cand);
            evals += 1;
            if v < cur_val {
                cur = cand;
                cur_val = v;
            }
        }
        // descent phase
        let mut step = 1.0;
        while step > MIN_STEP && evals < budget {
            let mut improved = false;
            for i in 0..dims {
                for dir in [1.0, -1.0] {
                    if evals >= budget {
                        break;
                    }
                    let mut cand = cur.clone();
                    cand[i] += dir * step;
                    let v = objective(&cand);
                    evals += 1;
                    if v < cur_val {
                        cur = cand;
                        cur_val = v;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cur_val < best.value {
            best.theta = cur;
            best.value = cur_val;
        }
    }
    best.evals = evals;
    best
}

fn well_conditioned(config: &Configuration, dp: &DeltaParams) -> bool {
    let term = |order: f64| MeanValue::powered(config, order, dp.alpha).map(|m| m.value);
    match (term(dp.r), term(dp.s), term(dp.t)) {
        (Ok(mr), Ok(ms), Ok(mt)) => (mr - ms).abs() >= RATIO_CONDITION_FLOOR * mr.abs().max(ms.abs()).max(mt.abs()),
        _ => false,
    }
}

fn as_objective(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// `(n, budget)` for every restart, budget proportional to `n`.
fn restart_plan(budget: &SearchBudget, ns: &[usize]) -> Vec<(usize, usize)> {
    let weight: usize = ns.iter().sum();
    let mut plan = Vec::new();
    for &n in ns {
        let share = budget.max_evals as u128 * n as u128 / weight as u128;
        let per = ((share / budget.restarts as u128) as usize).max(1);
        plan.extend(std::iter::repeat_n((n, per), budget.restarts));
    }
    plan
}

fn pick_best(locals: Vec<Local>) -> (Local, usize) {
    let evals = locals.iter().map(|l| l.evals).sum();
    let best = locals
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");
    (best, evals)
}

/// Minimizes the relative residual of `id` over configurations and reports
/// the most adverse one found.
pub fn counterexample_hunt(
    id: InequalityId,
    params: &CheckParams,
    budget: &SearchBudget,
    exec: Execution,
) -> Result<SearchReport> {
    budget.validate()?;
    let opts = CheckOptions::forced();
    // fail fast on missing parameters
    let probe = Configuration::new(vec![0.5, 1.0], vec![0.5, 0.5])?;
    let used = check(id, &probe, params, &opts)?.params;
    let ratio = match used.triple {
        Some([r, s, t]) if id.is_delta_based() => Some(DeltaParams::new(r, s, t, used.alpha.unwrap_or(1.0))?),
        _ => None,
    };

    let ns: Vec<usize> = (budget.n_range.0..=budget.n_range.1).collect();
    let plan = restart_plan(budget, &ns);
    let locals = exec.map_indexed(plan.len(), |k| {
        let (n, per) = plan[k];
        let mut rng = stream(budget.seed, k);
        let sample = |rng: &mut ChaCha8Rng| {
            let mut theta = sample_logs(rng, n);
            theta.extend(dirichlet(rng, n).into_iter().map(|v| v.max(1e-300).ln()));
            theta
        };
        let objective = |theta: &[f64]| {
            config_from_theta(theta, n)
                .filter(|c| ratio.is_none_or(|dp| well_conditioned(c, &dp)))
                .and_then(|c| check(id, &c, params, &opts).ok())
                .map_or(f64::INFINITY, |r| as_objective(r.residual_rel))
        };
        descend(&mut rng, n, 2 * n, per, sample, objective)
    });
    let (best, evals) = pick_best(locals);
    let best_config = config_from_theta(&best.theta, best.n).ok_or_else(|| domain("search produced no valid configuration"))?;
    let report = check(id, &best_config, params, &opts)?;
    let violated = report.residual_rel < -VIOLATION_TOL && report.status == Status::Violated;
    Ok(SearchReport {
        id,
        params: used,
        best_config,
        best_residual: report.residual,
        best_residual_rel: report.residual_rel,
        evals_used: evals,
        verdict: if violated { Verdict::ViolationFound } else { Verdict::NoViolationFound },
        seed: budget.seed,
        sharpness: None,
    })
}

/// Compares the sharp constant of a ratio bound with the two-point boundary
/// configuration and with random configurations whose minimum weight is
/// pinned to `q_target`.
pub fn sharpness_probe(
    id: InequalityId,
    params: &CheckParams,
    q_target: f64,
    budget: &SearchBudget,
    exec: Execution,
) -> Result<SearchReport> {
    let upper = match id {
        InequalityId::DianandaUpper11 => true,
        InequalityId::DianandaLower12 => false,
        other => return Err(domain(format!("sharpness probes apply to diananda-upper and diananda-lower, not {other}"))),
    };
    if !(q_target > 0.0 && q_target <= 0.5) {
        return Err(domain(format!("q_target must lie in (0, 1/2], got {q_target}")));
    }
    budget.validate()?;
    let [a, b, c] = params.triple.ok_or_else(|| domain(format!("parameter `triple` is required for {id}")))?;
    let alpha = params.alpha.ok_or_else(|| domain(format!("parameter `alpha` is required for {id}")))?;
    let dp = DeltaParams::new(a, b, c, alpha)?.canonical();
    let opts = CheckOptions::default();
    let used = CheckParams::triple(dp.r, dp.s, dp.t, alpha);
    let arg = if upper { 1.0 - q_target } else { q_target };
    let bound = c_constant_unchecked(dp.r, dp.s, dp.t, arg.powf(alpha));

    let boundary_q = if upper { vec![q_target, 1.0 - q_target] } else { vec![1.0 - q_target, q_target] };
    let boundary = Configuration::new(vec![0.0, 1.0], boundary_q)?;
    let boundary_delta = delta(&boundary, &dp)?;

    // maximize Δ for the upper bound, minimize it for the lower one
    let sign = if upper { -1.0 } else { 1.0 };
    let ns: Vec<usize> =
        (budget.n_range.0..=budget.n_range.1).filter(|&n| q_target <= 1.0 / n as f64 + 1e-15).collect();
    let plan = restart_plan(budget, &ns);
    let locals = exec.map_indexed(plan.len(), |k| {
        let (n, per) = plan[k];
        let mut rng = stream(budget.seed, k);
        let weights = pinned_weights(&mut rng, n, q_target);
        let sample = |rng: &mut ChaCha8Rng| sample_logs(rng, n);
        let objective = |u: &[f64]| {
            Configuration::from_unsorted(exp_samples(u), weights.clone())
                .ok()
                .filter(|c| well_conditioned(c, &dp))
                .and_then(|c| delta(&c, &dp).ok())
                .map_or(f64::INFINITY, |d| as_objective(sign * d))
        };
        let mut local = descend(&mut rng, n, n, per, sample, objective);
        local.theta.extend(weights);
        local
    });

    let (mut best_config, mut best_delta, mut evals) = (boundary.clone(), boundary_delta, 1);
    if !locals.is_empty() {
        let (best, used_evals) = pick_best(locals);
        evals += used_evals;
        let searched = sign * best.value;
        let better = if upper { searched > best_delta } else { searched < best_delta };
        if best.value.is_finite() && better {
            let n = best.n;
            best_config = Configuration::from_unsorted(exp_samples(&best.theta[..n]), best.theta[n..].to_vec())?;
            best_delta = searched;
        }
    }
    let report = check(id, &best_config, &used, &opts)?;
    let verdict = if report.status == Status::Violated {
        Verdict::ViolationFound
    } else {
        Verdict::SupremumGap((bound - best_delta).abs())
    };
    Ok(SearchReport {
        id,
        params: used,
        best_config,
        best_residual: report.residual,
        best_residual_rel: report.residual_rel,
        evals_used: evals,
        verdict,
        seed: budget.seed,
        sharpness: Some(Sharpness { q_target, bound, boundary_delta, best_delta }),
    })
}

/// Derivatives used as monotonicity steps in the proofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeClaim {
    /// `∂h₁/∂x₁` with `h₁ = (A^{p} − (1−q)^{(r−1)p/r}M_r^{p})/G^{p}`, `p = (1+a)r`.
    #[serde(rename = "H1_dx1")]
    H1Dx1,
    /// `∂h₂/∂x_n` with `h₂ = (A^{p} − q^{(r−1)p/r}M_r^{p})/G^{p}`, `p = (1−a)r`.
    #[serde(rename = "H2_dxn")]
    H2Dxn,
    /// `∂f_n/∂q` with `f_n` the `half-mean-sigma-upper` difference and `q` a free scalar.
    #[serde(rename = "Fn_dq")]
    FnDq,
}

impl std::str::FromStr for ProbeClaim {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "h1_dx1" => Ok(ProbeClaim::H1Dx1),
            "h2_dxn" => Ok(ProbeClaim::H2Dxn),
            "fn_dq" => Ok(ProbeClaim::FnDq),
            _ => Err(domain(format!("unknown probe `{s}` (expected H1_dx1, H2_dxn or Fn_dq)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub r: f64,
    #[serde(default)]
    pub a: f64,
}

fn h_value(config: &Configuration, r: f64, p: f64, w: f64) -> Result<f64> {
    let a = arithmetic_mean(config);
    let g = geometric_mean(config);
    let m = power_mean(config, r)?;
    Ok(((p * a.ln()).exp() - w * (p * m.ln()).exp()) / (p * g.ln()).exp())
}

fn f_n(config: &Configuration, r: f64, q: f64) -> Result<f64> {
    let w = q.powf(2.0 - 1.0 / r);
    let g = geometric_mean(config);
    Ok(power_mean(config, 0.5)? - w * power_mean(config, r)? - (1.0 - w) * g
        - (0.5 - r * w) / (2.0 * config.min_sample()) * variance_sigma(config))
}

/// Central difference refined by one Richardson step.
fn richardson<F: Fn(f64) -> Result<f64>>(f: F, v: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(v + h)? - f(v - h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Numerical derivative of the named proof function at `config`.
pub fn finite_difference_probe(claim: ProbeClaim, config: &Configuration, params: &ProbeParams) -> Result<f64> {
    let x1 = config.min_sample();
    if x1.is_nan() || x1 <= 0.0 {
        return Err(domain(format!("{claim:?} needs x1 > 0, got x1 = {x1}")));
    }
    let (r, a) = (params.r, params.a);
    if !(r.is_finite() && r > 0.0 && a.is_finite()) {
        return Err(domain(format!("probe parameters r = {r}, a = {a} are invalid")));
    }
    let q = config.min_weight();
    match claim {
        ProbeClaim::H1Dx1 | ProbeClaim::H2Dxn => {
            let (index, p, w) = if claim == ProbeClaim::H1Dx1 {
                let p = (1.0 + a) * r;
                (0, p, (1.0 - q).powf((r - 1.0) * p / r))
            } else {
                let p = (1.0 - a) * r;
                (config.n() - 1, p, q.powf((r - 1.0) * p / r))
            };
            let v = config.x()[index];
            let f = |xv: f64| h_value(&config.with_sample(index, xv)?, r, p, w);
            richardson(f, v, 1e-6 * v)
        }
        ProbeClaim::FnDq => {
            if !(q > 0.0 && q < 1.0) {
                return Err(domain(format!("Fn_dq needs 0 < q < 1, got q = {q}")));
            }
            richardson(|qv| f_n(config, r, qv), q, 1e-6 * q)
        }
    }
}
