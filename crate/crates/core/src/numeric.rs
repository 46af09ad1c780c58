//! Scalar numerical kernels shared by the other modules.

use crate::error::{domain, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// `(1 - t^r) / (1 - t)` on `[0, 1]`, with the removable singularity at `t = 1`.
pub fn one_minus_pow_ratio(t: f64, r: f64) -> f64 {
    let gap = 1.0 - t;
    if gap.abs() <= 1e-8 {
        // two-term expansion around t = 1
        return r * (1.0 - 0.5 * (r - 1.0) * gap);
    }
    if t == 0.0 {
        return 1.0;
    }
    -(r * t.ln()).exp_m1() / gap
}

#[derive(Debug, Clone, Copy)]
pub struct BisectOptions {
    /// Stop once the bracket is at most this wide and the residual is within `ftol`.
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for BisectOptions {
    fn default() -> Self {
        Self { xtol: 1e-13, ftol: 1e-13, max_iter: 200 }
    }
}

/// Outcome of a bracketed bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Set when either initial endpoint already evaluated within 1e-13 of zero.
    pub low_confidence: bool,
}

/// Plain bisection on a sign-changing bracket.
///
/// Continues past `xtol` while the residual exceeds `ftol` and a representable
/// midpoint still exists. The returned root is whichever evaluated point of the
/// final bracket has the smaller residual.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: BisectOptions) -> Result<Bisection> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(domain(format!("bisection bracket [{lo}, {hi}] is not a finite interval")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo.is_nan() || fhi.is_nan() || flo * fhi > 0.0 {
        return Err(domain(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}"
        )));
    }
    let low_confidence = flo.abs() < 1e-13 || fhi.abs() < 1e-13;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if flo == 0.0 || fhi == 0.0 {
            break;
        }
        if hi - lo <= opts.xtol && flo.abs().min(fhi.abs()) <= opts.ftol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        iterations += 1;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            flo = 0.0;
            fhi = 0.0;
            break;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let (root, residual) = if flo.abs() <= fhi.abs() { (lo, flo) } else { (hi, fhi) };
    Ok(Bisection { root, lo, hi, residual, iterations, low_confidence })
}

/// Result of a one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Endpoints are evaluated too, so a minimum sitting on the boundary is found.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Minimum {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evaluations = 2;
    let mut iter = 0;
    while (b - a).abs() > xtol && iter < max_iter {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        iter += 1;
    }
    let mut best = if fc <= fd { Minimum { x: c, value: fc, evaluations } } else { Minimum { x: d, value: fd, evaluations } };
    for end in [lo, hi] {
        let v = f(end);
        best.evaluations += 1;
        if v < best.value {
            best.x = end;
            best.value = v;
        }
    }
    best
}
