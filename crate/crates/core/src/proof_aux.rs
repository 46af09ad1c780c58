//! Scalar auxiliary functions with claimed signs, and grid sign checks.
//!
//! Each function carries a [`Claim`] (`value ≥ bound` or `value ≤ bound`).
//! Sign checks normalize every grid value to `claim residual ≥ 0` and report
//! the worst point.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::numeric::one_minus_pow_ratio;
use crate::thresholds::{self, a1, a2, min_a_r};

/// Absolute slack allowed on the normalized residual.
pub const SIGN_TOL: f64 = 1e-10;
/// Largest grid accepted by [`aux_sign_check`].
pub const MAX_GRID_POINTS: usize = 1_000_000;
/// Per-axis density of the default grids (reduced so the total stays under the cap).
pub const DEFAULT_AXIS_COUNT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AuxFunctionId {
    Scalar23,
    Scalar24,
    Scalar322,
    BoundForA,
    Chain32,
    PhiMonotone,
    V1,
    V2,
    #[serde(rename = "M_q")]
    Mq,
    #[serde(rename = "L_x")]
    Lx,
    #[serde(rename = "E_xr")]
    Exr,
    Eta,
}

impl AuxFunctionId {
    pub const ALL: [AuxFunctionId; 12] = [
        AuxFunctionId::Scalar23,
        AuxFunctionId::Scalar24,
        AuxFunctionId::Scalar322,
        AuxFunctionId::BoundForA,
        AuxFunctionId::Chain32,
        AuxFunctionId::PhiMonotone,
        AuxFunctionId::V1,
        AuxFunctionId::V2,
        AuxFunctionId::Mq,
        AuxFunctionId::Lx,
        AuxFunctionId::Exr,
        AuxFunctionId::Eta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuxFunctionId::Scalar23 => "Scalar23",
            AuxFunctionId::Scalar24 => "Scalar24",
            AuxFunctionId::Scalar322 => "Scalar322",
            AuxFunctionId::BoundForA => "BoundForA",
            AuxFunctionId::Chain32 => "Chain32",
            AuxFunctionId::PhiMonotone => "PhiMonotone",
            AuxFunctionId::V1 => "V1",
            AuxFunctionId::V2 => "V2",
            AuxFunctionId::Mq => "M_q",
            AuxFunctionId::Lx => "L_x",
            AuxFunctionId::Exr => "E_xr",
            AuxFunctionId::Eta => "Eta",
        }
    }

    /// Argument names accepted by [`aux_eval`], in order.
    pub fn arg_names(self) -> &'static [&'static str] {
        match self {
            AuxFunctionId::Scalar23 | AuxFunctionId::Scalar24 | AuxFunctionId::BoundForA => &["r", "a", "t"],
            AuxFunctionId::Scalar322 => &["r", "p", "s", "z"],
            AuxFunctionId::Chain32 => &["r", "t"],
            AuxFunctionId::PhiMonotone => &["r1", "r2", "t"],
            AuxFunctionId::V1 | AuxFunctionId::V2 | AuxFunctionId::Mq => &["q", "r"],
            AuxFunctionId::Lx => &["x", "q", "r"],
            AuxFunctionId::Exr => &["x", "r"],
            AuxFunctionId::Eta => &["y", "q1", "q2", "q3", "r"],
        }
    }

    /// Axis names of a sign-check grid. `a_frac` is optional and defaults to 1.
    pub fn grid_axes(self) -> &'static [&'static str] {
        match self {
            AuxFunctionId::Scalar23 | AuxFunctionId::Scalar24 | AuxFunctionId::BoundForA => &["r", "t", "a_frac"],
            AuxFunctionId::Eta => &["y", "q1", "q2", "r"],
            other => other.arg_names(),
        }
    }

    pub fn claim(self) -> Claim {
        match self {
            AuxFunctionId::V1 | AuxFunctionId::V2 => Claim::AtMost(0.5),
            AuxFunctionId::Mq | AuxFunctionId::Lx => Claim::AtMost(0.0),
            _ => Claim::AtLeast(0.0),
        }
    }
}

impl fmt::Display for AuxFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AuxFunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuxFunctionId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| domain(format!("unknown auxiliary function `{s}`")))
    }
}

/// The sign property a function is claimed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Claim {
    AtLeast(f64),
    AtMost(f64),
}

impl Claim {
    /// Nonnegative exactly when the claim holds for `value`.
    pub fn normalize(self, value: f64) -> f64 {
        match self {
            Claim::AtLeast(b) => value - b,
            Claim::AtMost(b) => b - value,
        }
    }
}

fn args_for<const N: usize>(id: AuxFunctionId, args: &[f64]) -> Result<[f64; N]> {
    let arr: [f64; N] = args.try_into().map_err(|_| {
        domain(format!("{id} takes {N} arguments ({}), got {}", id.arg_names().join(", "), args.len()))
    })?;
    if let Some(v) = arr.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("{id} argument {v} is not finite")));
    }
    Ok(arr)
}

fn check_range(id: AuxFunctionId, name: &str, v: f64, ok: bool, range: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(domain(format!("{id} needs {name} in {range}, got {name} = {v}")))
    }
}

/// `(1+t)^{r−1}(1−t)/(1−t^r)`, continuous at `t = 1`.
fn mixed_ratio(r: f64, t: f64) -> f64 {
    (1.0 + t).powf(r - 1.0) / one_minus_pow_ratio(t, r)
}

/// `((1+t)^r / (1+t^r))^a`.
fn power_base(r: f64, a: f64, t: f64) -> f64 {
    (a * (r * t.ln_1p() - t.powf(r).ln_1p())).exp()
}

/// Evaluates one auxiliary function. See [`AuxFunctionId::claim`] for the
/// sign each is claimed to have; the value is returned unnormalized.
pub fn aux_eval(id: AuxFunctionId, args: &[f64]) -> Result<f64> {
    match id {
        AuxFunctionId::Scalar23 | AuxFunctionId::Scalar24 => {
            let [r, a, t] = args_for::<3>(id, args)?;
            check_range(id, "r", r, r > 1.0, "(1, inf)")?;
            check_range(id, "t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
            let lhs = power_base(r, a, t);
            let m = mixed_ratio(r, t);
            let rhs = if id == AuxFunctionId::Scalar23 { 1.0 / m } else { m };
            Ok(rhs - lhs)
        }
        AuxFunctionId::Scalar322 => {
            // d/ds ln[(z+s)^{p-1} / (z^r+s)^{p/r-1}]
            let [r, p, s, z] = args_for::<4>(id, args)?;
            check_range(id, "r", r, r > 0.0, "(0, inf)")?;
            check_range(id, "s", s, s >= 0.0, "[0, inf)")?;
            check_range(id, "z", z, z > 0.0, "(0, inf)")?;
            Ok((p - 1.0) / (z + s) - (p / r - 1.0) / (z.powf(r) + s))
        }
        AuxFunctionId::BoundForA => {
            let [r, a, t] = args_for::<3>(id, args)?;
            check_range(id, "r", r, r > 1.0, "(1, inf)")?;
            check_range(id, "t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
            let m = mixed_ratio(r, t);
            let bound = if r <= 2.0 { 1.0 / m - 1.0 } else { m - 1.0 };
            Ok(bound - a * r * t)
        }
        AuxFunctionId::Chain32 => {
            let [r, t] = args_for::<2>(id, args)?;
            check_range(id, "t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
            Ok((1.0 + t).powf(r - 1.0) - one_minus_pow_ratio(t, r) - (r - 2.0) * t)
        }
        AuxFunctionId::PhiMonotone => {
            // ln φ(r2, t) − ln φ(r1, t) with φ(r, t) = (1+t)^r / (1−t^r)
            let [r1, r2, t] = args_for::<3>(id, args)?;
            check_range(id, "t", t, t > 0.0 && t <= 1.0, "(0, 1]")?;
            check_range(id, "r1", r1, r1 > 0.0, "(0, inf)")?;
            check_range(id, "r2", r2, r2 > 0.0, "(0, inf)")?;
            Ok((r2 - r1) * t.ln_1p() + (one_minus_pow_ratio(t, r1) / one_minus_pow_ratio(t, r2)).ln())
        }
        AuxFunctionId::V1 => {
            let [q, r] = args_for::<2>(id, args)?;
            check_range(id, "q", q, (0.0..=0.5).contains(&q), "[0, 1/2]")?;
            check_range(id, "r", r, r > 0.5, "(1/2, inf)")?;
            Ok((1.0 - 2.0 * q) / 3.0 + (r - 1.0 / 3.0) * q.powf(2.0 - 1.0 / r) + 2.0 / 3.0 * q.powf(3.0 - 1.0 / r))
        }
        AuxFunctionId::V2 => {
            let [q, r] = args_for::<2>(id, args)?;
            check_range(id, "q", q, (0.0..=0.5).contains(&q), "[0, 1/2]")?;
            check_range(id, "r", r, r > 0.5, "(1/2, inf)")?;
            Ok(((1.0 - r) * (2.0 * r - 1.0) / 3.0 * (1.0 - 2.0 * q) + r) * q.powf(2.0 - 1.0 / r))
        }
        AuxFunctionId::Mq => {
            let [q, r] = args_for::<2>(id, args)?;
            check_range(id, "q", q, (0.0..=0.5).contains(&q), "[0, 1/2]")?;
            check_range(id, "r", r, r > 0.5, "(1/2, inf)")?;
            Ok(-0.5 - 2.0 * q + 2.0 * r * q.powf(2.0 - 1.0 / r) + 2.0 * q.powf(3.0 - 1.0 / r))
        }
        AuxFunctionId::Lx => {
            let [x, q, r] = args_for::<3>(id, args)?;
            check_range(id, "x", x, x >= 0.0, "[0, inf)")?;
            check_range(id, "q", q, q > 0.0 && q < 1.0, "(0, 1)")?;
            check_range(id, "r", r, r > 0.5, "(1/2, inf)")?;
            let w = q.powf(2.0 - 1.0 / r);
            Ok(-0.5 + w * (1.0 - r) * x + (1.0 - w) * x.powf(1.0 - 2.0 * q) - (0.5 - r * w) * x.powi(3))
        }
        AuxFunctionId::Exr => {
            let [x, r] = args_for::<2>(id, args)?;
            check_range(id, "x", x, x > 0.0, "(0, inf)")?;
            check_range(id, "r", r, r > 0.0, "(0, inf)")?;
            Ok(r * x.powf(2.0 - 1.0 / r) - 0.5 - x + x.powf(3.0 - 1.0 / r))
        }
        AuxFunctionId::Eta => {
            let [y, q1, q2, q3, r] = args_for::<5>(id, args)?;
            check_range(id, "y", y, y > 0.0, "(0, inf)")?;
            for (name, v) in [("q1", q1), ("q2", q2), ("q3", q3)] {
                check_range(id, name, v, v > 0.0 && v < 1.0, "(0, 1)")?;
            }
            if ((q1 + q2 + q3) - 1.0).abs() > 1e-12 {
                return Err(domain(format!("{id} needs q1 + q2 + q3 = 1, got {}", q1 + q2 + q3)));
            }
            let exponent = eta_exponent(q2, q3, q1.min(q2).min(q3), r).ok_or_else(|| {
                domain(format!("{id}: exponent denominator is not positive at q = ({q1}, {q2}, {q3}), r = {r}"))
            })?;
            Ok(y.powf(exponent) - q2 / (1.0 - q3) * y - q1 / (1.0 - q3))
        }
    }
}

/// Denominators `κ` at or below this are treated as outside the nontrivial region.
const KAPPA_MIN: f64 = 1e-12;

/// `κ = r + 1 − q₃ − (r − 1/2)/(1 − (1−q)^{2−1/r})`.
fn eta_kappa(q3: f64, q: f64, r: f64) -> f64 {
    let p = (1.0 - q).powf(2.0 - 1.0 / r);
    r + 1.0 - q3 - (r - 0.5) / (1.0 - p)
}

/// `q₂/κ`, when `κ` is positive.
fn eta_exponent(q2: f64, q3: f64, q: f64, r: f64) -> Option<f64> {
    let kappa = eta_kappa(q3, q, r);
    (kappa > KAPPA_MIN && kappa.is_finite()).then(|| q2 / kappa)
}

/// The three-point case only needs `η ≥ 0` when
/// `(1−q₃)(1−(1−q)^{2−1/r}) > r(1−q)^{2−1/r} − 1/2`; otherwise the bound it
/// feeds holds trivially. That condition is `κ·(1−(1−q)^{2−1/r}) > 0`, i.e.
/// `κ > 0`; points with `κ ≤ 1e−12` count as outside.
pub fn eta_is_nontrivial(q1: f64, q2: f64, q3: f64, r: f64) -> bool {
    eta_exponent(q2, q3, q1.min(q2).min(q3), r).is_some()
}

/// Normalized residual: nonnegative exactly when the claim holds.
pub fn aux_residual(id: AuxFunctionId, args: &[f64]) -> Result<f64> {
    Ok(id.claim().normalize(aux_eval(id, args)?))
}

/// One axis of a sign-check grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    #[serde(default)]
    pub open_lo: bool,
    #[serde(default)]
    pub open_hi: bool,
}

impl Axis {
    pub fn closed(lo: f64, hi: f64, count: usize) -> Self {
        Self { lo, hi, count, open_lo: false, open_hi: false }
    }

    pub fn open_lo(lo: f64, hi: f64, count: usize) -> Self {
        Self { open_lo: true, ..Self::closed(lo, hi, count) }
    }

    pub fn open(lo: f64, hi: f64, count: usize) -> Self {
        Self { open_lo: true, open_hi: true, ..Self::closed(lo, hi, count) }
    }

    pub fn point(v: f64) -> Self {
        Self::closed(v, v, 1)
    }

    /// Evenly spaced points, omitting open endpoints.
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(domain("axis count must be at least 1"));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(domain(format!("axis bounds [{}, {}] are invalid", self.lo, self.hi)));
        }
        let (lo, hi, n) = (self.lo, self.hi, self.count);
        let span = hi - lo;
        let pts = match (self.open_lo, self.open_hi) {
            (false, false) if n == 1 => vec![lo],
            (false, false) => (0..n).map(|k| lo + span * k as f64 / (n - 1) as f64).collect(),
            (true, false) => (0..n).map(|k| lo + span * (k + 1) as f64 / n as f64).collect(),
            (false, true) => (0..n).map(|k| lo + span * k as f64 / n as f64).collect(),
            (true, true) => (0..n).map(|k| lo + span * (k + 1) as f64 / (n + 1) as f64).collect(),
        };
        Ok(pts)
    }
}

/// Axis name to axis.
pub type GridSpec = BTreeMap<String, Axis>;

/// The claimed-valid domain of each function at default density.
pub fn default_grid(id: AuxFunctionId) -> GridSpec {
    let free_axes = id.grid_axes().iter().filter(|a| **a != "a_frac").count() as u32;
    let mut per_axis = DEFAULT_AXIS_COUNT;
    while (per_axis as f64).powi(free_axes as i32) > MAX_GRID_POINTS as f64 {
        per_axis -= 1;
    }
    let n = per_axis;
    let r0 = thresholds::r0();
    let axes: Vec<(&str, Axis)> = match id {
        AuxFunctionId::Scalar23 => vec![("r", Axis::open_lo(1.0, 2.0, n)), ("t", Axis::open(0.0, 1.0, n)), ("a_frac", Axis::point(1.0))],
        AuxFunctionId::Scalar24 => vec![("r", Axis::closed(2.0, 6.0, n)), ("t", Axis::open(0.0, 1.0, n)), ("a_frac", Axis::point(1.0))],
        AuxFunctionId::BoundForA => vec![("r", Axis::open(1.0, 6.0, n)), ("t", Axis::open(0.0, 1.0, n)), ("a_frac", Axis::point(1.0))],
        AuxFunctionId::Scalar322 => vec![
            ("r", Axis::open_lo(1.0, 3.0, n)),
            ("p", Axis::closed(1.0, 6.0, n)),
            ("s", Axis::closed(0.0, 1.0, n)),
            ("z", Axis::open_lo(1.0, 10.0, n)),
        ],
        AuxFunctionId::Chain32 => vec![("r", Axis::closed(4.0, 10.0, n)), ("t", Axis::open(0.0, 1.0, n))],
        AuxFunctionId::PhiMonotone => {
            vec![("r1", Axis::closed(2.0, 4.0, n)), ("r2", Axis::closed(2.0, 4.0, n)), ("t", Axis::open(0.0, 1.0, n))]
        }
        AuxFunctionId::V1 | AuxFunctionId::V2 => vec![("q", Axis::open_lo(0.0, 0.5, n)), ("r", Axis::closed(r0, 1.0, n))],
        AuxFunctionId::Mq => vec![("q", Axis::open_lo(0.0, 1.0 / 3.0, n)), ("r", Axis::closed(r0, 1.0, n))],
        AuxFunctionId::Lx => vec![
            ("x", Axis::closed(1.0, 10.0, n)),
            ("q", Axis::open_lo(0.0, 1.0 / 3.0, n)),
            ("r", Axis::closed(r0, 1.0, n)),
        ],
        AuxFunctionId::Exr => vec![("x", Axis::closed(0.75, 1.0, n)), ("r", Axis::closed(1.0, 2.0, n))],
        // the nontrivial case forces (1−q)^{2−1/r} < 3/4, hence every qᵢ > 0.17
        AuxFunctionId::Eta => vec![
            ("y", Axis::closed(1.0, 100.0, n)),
            ("q1", Axis::closed(1.0 / 6.0, 2.0 / 3.0, n)),
            ("q2", Axis::closed(1.0 / 6.0, 2.0 / 3.0, n)),
            ("r", Axis::closed(1.0, 2.0, n)),
        ],
    };
    axes.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignVerdict {
    AllSatisfy,
    ViolationFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCheckReport {
    pub id: AuxFunctionId,
    pub claim: Claim,
    pub grid: GridSpec,
    pub points_evaluated: usize,
    /// Grid points outside the admissible region (e.g. `p < r`, `q₃ ≤ 0`).
    pub points_skipped: usize,
    pub worst_point: BTreeMap<String, f64>,
    pub worst_value: f64,
    pub worst_residual: f64,
    pub verdict: SignVerdict,
}

/// Largest admissible `a` at order `r` for the tags that take one.
pub fn admissible_a(id: AuxFunctionId, r: f64) -> Result<f64> {
    match id {
        AuxFunctionId::Scalar23 => Ok(min_a_r(r)?.a_star),
        AuxFunctionId::Scalar24 => Ok((1.0 - 1.0 / r).min(min_a_r(r)?.a_star)),
        AuxFunctionId::BoundForA => {
            if r < 2.0 {
                a1(r)
            } else if r == 2.0 {
                Ok(0.0)
            } else if r < 3.0 {
                a2(r)
            } else if r < 4.0 {
                Ok(1.0 / (3.0 * r))
            } else {
                Ok((r - 2.0) / (r * r))
            }
        }
        other => Err(domain(format!("{other} has no admissible-a parameter"))),
    }
}

#[derive(Clone, Copy)]
struct Worst {
    index: usize,
    residual: f64,
    value: f64,
}

/// Evaluates `id` on every admissible grid point and reports the worst one.
pub fn aux_sign_check(id: AuxFunctionId, grid: &GridSpec, exec: Execution) -> Result<SignCheckReport> {
    let names = id.grid_axes();
    for key in grid.keys() {
        if !names.contains(&key.as_str()) {
            return Err(domain(format!("{id} grid has unknown axis `{key}` (expected {})", names.join(", "))));
        }
    }
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(names.len());
    for name in names {
        match grid.get(*name) {
            Some(axis) => axes.push(axis.points()?),
            None if *name == "a_frac" => axes.push(vec![1.0]),
            None => return Err(domain(format!("{id} grid is missing axis `{name}`"))),
        }
    }
    let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len())).unwrap_or(usize::MAX);
    if total > MAX_GRID_POINTS {
        return Err(domain(format!("{id} grid has {total} points, above the cap of {MAX_GRID_POINTS}")));
    }

    // per-r admissible a, computed once per r value
    let a_max: Option<Vec<f64>> = match id {
        AuxFunctionId::Scalar23 | AuxFunctionId::Scalar24 | AuxFunctionId::BoundForA => {
            let rs = &axes[0];
            let vals = exec.map_indexed(rs.len(), |i| admissible_a(id, rs[i]));
            Some(vals.into_iter().collect::<Result<Vec<_>>>()?)
        }
        _ => None,
    };

    let point_args = |index: usize| -> Option<Vec<f64>> {
        let mut rem = index;
        let mut coords = vec![0.0; axes.len()];
        let mut idx = vec![0usize; axes.len()];
        for k in (0..axes.len()).rev() {
            let len = axes[k].len();
            idx[k] = rem % len;
            coords[k] = axes[k][idx[k]];
            rem /= len;
        }
        match id {
            AuxFunctionId::Scalar23 | AuxFunctionId::Scalar24 | AuxFunctionId::BoundForA => {
                let a = coords[2] * a_max.as_ref().expect("a_max computed")[idx[0]];
                Some(vec![coords[0], a, coords[1]])
            }
            AuxFunctionId::Scalar322 => (coords[1] >= coords[0]).then_some(coords),
            AuxFunctionId::PhiMonotone => (coords[1] > coords[0]).then_some(coords),
            AuxFunctionId::Eta => {
                let (y, q1, q2, r) = (coords[0], coords[1], coords[2], coords[3]);
                let q3 = 1.0 - q1 - q2;
                (q3 > 1e-12 && eta_is_nontrivial(q1, q2, q3, r)).then(|| vec![y, q1, q2, q3, r])
            }
            _ => Some(coords),
        }
    };

    const CHUNK: usize = 4096;
    let chunks = total.div_ceil(CHUNK);
    let partial = exec.map_indexed(chunks, |c| {
        let mut worst: Option<Worst> = None;
        let mut evaluated = 0usize;
        for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
            let Some(args) = point_args(index) else { continue };
            evaluated += 1;
            let (residual, value) = match aux_eval(id, &args) {
                Ok(v) if v.is_nan() => (f64::NEG_INFINITY, v),
                Ok(v) => (id.claim().normalize(v), v),
                Err(_) => (f64::NEG_INFINITY, f64::NAN),
            };
            if worst.is_none_or(|w| residual < w.residual) {
                worst = Some(Worst { index, residual, value });
            }
        }
        (worst, evaluated)
    });

    let mut worst: Option<Worst> = None;
    let mut evaluated = 0;
    for (w, n) in partial {
        evaluated += n;
        if let Some(w) = w {
            if worst.is_none_or(|cur| w.residual < cur.residual) {
                worst = Some(w);
            }
        }
    }
    let (worst_point, worst_value, worst_residual) = match worst {
        Some(w) => {
            let args = point_args(w.index).expect("worst point is admissible");
            let point = id.arg_names().iter().map(|n| n.to_string()).zip(args).collect();
            (point, w.value, w.residual)
        }
        None => (BTreeMap::new(), f64::NAN, f64::INFINITY),
    };
    let verdict = if worst_residual >= -SIGN_TOL { SignVerdict::AllSatisfy } else { SignVerdict::ViolationFound };
    Ok(SignCheckReport {
        id,
        claim: id.claim(),
        grid: grid.clone(),
        points_evaluated: evaluated,
        points_skipped: total - evaluated,
        worst_point,
        worst_value,
        worst_residual,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn e_at_three_quarters() {
        assert_relative_eq!(aux_eval(AuxFunctionId::Exr, &[0.75, 1.0]).unwrap(), 1.0 / 16.0, max_relative = 1e-14);
    }

    #[test]
    fn m_vanishes_at_r0() {
        let v = aux_eval(AuxFunctionId::Mq, &[1.0 / 3.0, thresholds::r0()]).unwrap();
        assert!(v.abs() < 1e-10, "{v}");
    }

    #[test]
    fn v1_limit_at_zero_weight() {
        for r in [0.7, 0.9, 1.0] {
            let v = aux_eval(AuxFunctionId::V1, &[1e-12, r]).unwrap();
            assert!((v - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn scalar23_vanishes_at_a_r() {
        for (r, t) in [(1.5, 0.3), (1.2, 0.8), (1.9, 0.05)] {
            let a = thresholds::a_r_fn(r, t).unwrap();
            let v = aux_eval(AuxFunctionId::Scalar23, &[r, a, t]).unwrap();
            assert!(v.abs() < 1e-13, "r = {r}, t = {t}: {v}");
        }
    }

    #[test]
    fn l_vanishes_at_one() {
        for (q, r) in [(0.1, 0.7), (0.3, 0.95)] {
            assert!(aux_eval(AuxFunctionId::Lx, &[1.0, q, r]).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn arity_and_names() {
        assert!(aux_eval(AuxFunctionId::V1, &[0.1]).is_err());
        assert_eq!("m_q".parse::<AuxFunctionId>().unwrap(), AuxFunctionId::Mq);
        assert_eq!(serde_json::to_string(&AuxFunctionId::Exr).unwrap(), "\"E_xr\"");
    }

    #[test]
    fn axis_points() {
        assert_eq!(Axis::closed(0.0, 1.0, 3).points().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Axis::open_lo(0.0, 1.0, 2).points().unwrap(), vec![0.5, 1.0]);
        assert_eq!(Axis::open(0.0, 1.0, 1).points().unwrap(), vec![0.5]);
        assert!(Axis::closed(1.0, 0.0, 3).points().is_err());
    }

    #[test]
    fn v1_small_grid() {
        let mut g = GridSpec::new();
        g.insert("q".into(), Axis::open_lo(0.0, 0.5, 200));
        g.insert("r".into(), Axis::closed(thresholds::r0(), 1.0, 50));
        let rep = aux_sign_check(AuxFunctionId::V1, &g, Execution::Serial).unwrap();
        assert_eq!(rep.verdict, SignVerdict::AllSatisfy);
        assert_eq!(rep.points_evaluated, 10_000);
    }

    #[test]
    fn detects_a_false_claim() {
        // E_xr is negative near x = 1/2, r = 1: e = 1/4 - 1/2 - 1/2 + 1/4 < 0 would fail the claim
        let mut g = GridSpec::new();
        g.insert("x".into(), Axis::closed(0.3, 1.0, 50));
        g.insert("r".into(), Axis::closed(1.0, 2.0, 10));
        let rep = aux_sign_check(AuxFunctionId::Exr, &g, Execution::Serial).unwrap();
        assert_eq!(rep.verdict, SignVerdict::ViolationFound);
        assert!(rep.worst_value < 0.0);
    }

    #[test]
    fn grid_axis_validation() {
        let mut g = GridSpec::new();
        g.insert("q".into(), Axis::closed(0.1, 0.5, 3));
        assert!(aux_sign_check(AuxFunctionId::V1, &g, Execution::Serial).is_err());
        g.insert("r".into(), Axis::closed(0.7, 1.0, 3));
        g.insert("bogus".into(), Axis::closed(0.7, 1.0, 3));
        assert!(aux_sign_check(AuxFunctionId::V1, &g, Execution::Serial).is_err());
    }

    #[test]
    fn serial_and_parallel_reports_match() {
        let g = default_grid(AuxFunctionId::Chain32);
        let a = aux_sign_check(AuxFunctionId::Chain32, &g, Execution::Serial).unwrap();
        let b = aux_sign_check(AuxFunctionId::Chain32, &g, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
