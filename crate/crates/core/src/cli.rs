//! Command-line front end.
//!
//! Each invocation runs one command and writes one report (JSON by default,
//! headered CSV on request). Exit status: 0 when the claim holds or the
//! command simply succeeds, 1 when a violation is reported, 2 on usage,
//! domain or degenerate-input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::inequalities::{check, CheckOptions, CheckParams, InequalityId, Status};
use crate::means::{power_mean, Configuration};
use crate::proof_aux::{aux_eval, aux_sign_check, default_grid, AuxFunctionId, Axis, GridSpec, SignVerdict};
use crate::search::{
    counterexample_hunt, finite_difference_probe, sharpness_probe, ProbeClaim, ProbeParams, SearchBudget, Verdict,
};
use crate::thresholds;
use crate::tolerance::{Tolerance, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};

/// Weight vectors summing to within this of 1 are rescaled; others are rejected.
pub const WEIGHT_SLACK: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "meanbounds", version, about = "Weighted power means, ratio bounds, thresholds and counterexample search")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "MEANBOUNDS_TOL_REL")]
    pub tol_rel: Option<f64>,
    #[arg(long, global = true, env = "MEANBOUNDS_TOL_ABS")]
    pub tol_abs: Option<f64>,
    /// Read the whole run from a JSON file; flags given here override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A complete run, as accepted by `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rel")]
    pub tol_rel: f64,
    #[serde(default = "default_abs")]
    pub tol_abs: f64,
}

fn default_rel() -> f64 {
    DEFAULT_REL_TOL
}

fn default_abs() -> f64 {
    DEFAULT_ABS_TOL
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Weighted power mean M_r.
    Mean(MeanArgs),
    /// Evaluate one inequality on one configuration.
    ///
    /// Tags: diananda-upper, diananda-lower, diananda-base-upper,
    /// diananda-base-lower, reciprocal-order-upper, reciprocal-order-lower,
    /// cartwright-field-lower, cartwright-field-upper, mg-sigma-lower,
    /// mg-sigma-upper, half-mean-lower, half-mean-upper, half-mean-sigma-upper,
    /// half-mean-sigma-lower.
    Check(CheckArgs),
    /// Solve for a threshold constant.
    Threshold(ThresholdArgs),
    /// Compare a ratio bound with boundary and random configurations.
    Sharpness(SharpnessArgs),
    /// Search for a configuration violating an inequality.
    Hunt(HuntArgs),
    /// Tabulate a quantity over a one-dimensional grid.
    Sweep(SweepArgs),
    /// Evaluate or grid-check an auxiliary function from the proofs.
    Aux(AuxArgs),
    /// Finite-difference derivative of a proof function.
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ConfigInput {
    /// Samples, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    /// Weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    /// JSON file of the form {"x": [...], "q": [...]}.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl ConfigInput {
    fn load(&self) -> Result<Configuration> {
        #[derive(Deserialize)]
        struct Raw {
            x: Vec<f64>,
            q: Vec<f64>,
        }
        let (x, q) = match (&self.input, &self.x, &self.q) {
            (Some(path), None, None) => {
                let raw: Raw = serde_json::from_str(&read(path)?)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                (raw.x, raw.q)
            }
            (None, Some(x), Some(q)) => (x.clone(), q.clone()),
            (Some(_), _, _) => return Err(Error::Config("give either --input or --x/--q, not both".into())),
            _ => return Err(Error::Config("a configuration needs both --x and --q (or --input)".into())),
        };
        Configuration::normalized(x, q, WEIGHT_SLACK)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct MeanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub config: ConfigInput,
    /// Order of the mean.
    #[arg(long)]
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct IneqParams {
    /// Three mean orders, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl IneqParams {
    fn to_params(&self) -> Result<CheckParams> {
        let triple = match &self.triple {
            Some(v) => Some(<[f64; 3]>::try_from(v.as_slice()).map_err(|_| {
                domain(format!("parameter `triple` needs exactly 3 values, got {}", v.len()))
            })?),
            None => None,
        };
        Ok(CheckParams { triple, alpha: self.alpha, r: self.r, s: self.s })
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct CheckArgs {
    #[arg(long)]
    pub ineq: InequalityId,
    #[command(flatten)]
    #[serde(flatten)]
    pub config: ConfigInput,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: IneqParams,
    /// Evaluate outside the inequality's hypotheses.
    #[arg(long)]
    #[serde(default)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    R0,
    T1,
    T2,
    A1,
    A2,
    AlphaUpper,
    AlphaLower,
    MinAR,
    AR,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BudgetArgs {
    /// Total objective evaluations.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
}

impl BudgetArgs {
    fn budget(&self, seed: u64) -> SearchBudget {
        SearchBudget { max_evals: self.budget, seed, n_range: (self.n_min, self.n_max), restarts: self.restarts }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct SharpnessArgs {
    #[arg(long)]
    pub ineq: InequalityId,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: IneqParams,
    #[arg(long)]
    pub q_target: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub search: BudgetArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct HuntArgs {
    #[arg(long)]
    pub ineq: InequalityId,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: IneqParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub search: BudgetArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// a_r(t) over t, needs --r.
    ArProfile,
    /// 1 + a₁(r) over r ∈ (1, 2).
    AlphaUpper,
    /// Lower-bound exponent threshold over r > 2.
    AlphaLower,
    /// min_t a_r(t) and its location over r > 1.
    MinAR,
    /// Base-case residuals at the two-point boundary configurations, over q.
    BaseResidual,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    #[serde(default)]
    pub open_lo: bool,
    #[arg(long)]
    #[serde(default)]
    pub open_hi: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct AuxArgs {
    /// V1, V2, M_q, L_x, E_xr, Eta, Scalar23, Scalar24, Scalar322, BoundForA, Chain32 or PhiMonotone.
    #[arg(long)]
    pub id: AuxFunctionId,
    /// Evaluate at one argument tuple instead of checking a grid.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<f64>>,
    /// JSON grid {axis: {lo, hi, count, open_lo, open_hi}}; defaults to the claimed domain.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
pub struct ProbeArgs {
    /// H1_dx1, H2_dxn or Fn_dq.
    #[arg(long)]
    pub claim: ProbeClaim,
    #[command(flatten)]
    #[serde(flatten)]
    pub config: ConfigInput,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub a: f64,
}

/// A report ready to emit.
struct Outcome {
    json: Value,
    /// Multi-row tables (sweeps); other reports are flattened into one row.
    table: Option<(Vec<String>, Vec<Vec<Value>>)>,
    exit: i32,
}

impl Outcome {
    fn single(json: Value, exit: i32) -> Self {
        Self { json, table: None, exit }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn need(v: Option<f64>, name: &str, which: &str) -> Result<f64> {
    v.ok_or_else(|| domain(format!("`{which}` needs --{name}")))
}

fn status_exit(status: Status) -> i32 {
    match status {
        Status::Holds | Status::Equality => EXIT_OK,
        Status::Violated => EXIT_VIOLATION,
        Status::Degenerate => EXIT_ERROR,
    }
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::ViolationFound => EXIT_VIOLATION,
        Verdict::NoViolationFound | Verdict::SupremumGap(_) => EXIT_OK,
    }
}

fn execute(run: &RunConfig) -> Result<Outcome> {
    for (name, v) in [("tol-rel", run.tol_rel), ("tol-abs", run.tol_abs)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Config(format!("--{name} must be finite and nonnegative, got {v}")));
        }
    }
    let tol = Tolerance::new(run.tol_rel, run.tol_abs);
    match &run.command {
        Command::Mean(a) => {
            let c = a.config.load()?;
            let value = power_mean(&c, a.r)?;
            Ok(Outcome::single(json!({ "x": c.x(), "q": c.q(), "r": a.r, "value": value }), EXIT_OK))
        }
        Command::Check(a) => {
            let c = a.config.load()?;
            let opts = CheckOptions { tol, force: a.force };
            let report = check(a.ineq, &c, &a.params.to_params()?, &opts)?;
            let mut v = to_value(&report);
            v["x"] = to_value(&c.x());
            v["weights"] = to_value(&c.q());
            Ok(Outcome::single(v, status_exit(report.status)))
        }
        Command::Threshold(a) => threshold(a),
        Command::Sharpness(a) => {
            let report = sharpness_probe(
                a.ineq,
                &a.params.to_params()?,
                a.q_target,
                &a.search.budget(run.seed),
                Execution::Parallel,
            )?;
            Ok(Outcome::single(to_value(&report), verdict_exit(report.verdict)))
        }
        Command::Hunt(a) => {
            let report =
                counterexample_hunt(a.ineq, &a.params.to_params()?, &a.search.budget(run.seed), Execution::Parallel)?;
            Ok(Outcome::single(to_value(&report), verdict_exit(report.verdict)))
        }
        Command::Sweep(a) => sweep(a),
        Command::Aux(a) => {
            if let Some(at) = &a.at {
                let value = aux_eval(a.id, at)?;
                let residual = a.id.claim().normalize(value);
                let exit = if residual >= -crate::proof_aux::SIGN_TOL { EXIT_OK } else { EXIT_VIOLATION };
                return Ok(Outcome::single(
                    json!({ "id": a.id, "args": at, "value": value, "claim": a.id.claim(), "residual": residual }),
                    exit,
                ));
            }
            let grid: GridSpec = match &a.grid {
                Some(path) => serde_json::from_str(&read(path)?)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
                None => default_grid(a.id),
            };
            let report = aux_sign_check(a.id, &grid, Execution::Parallel)?;
            let exit = if report.verdict == SignVerdict::AllSatisfy { EXIT_OK } else { EXIT_VIOLATION };
            Ok(Outcome::single(to_value(&report), exit))
        }
        Command::Probe(a) => {
            let c = a.config.load()?;
            let value = finite_difference_probe(a.claim, &c, &ProbeParams { r: a.r, a: a.a })?;
            Ok(Outcome::single(json!({ "claim": a.claim, "r": a.r, "a": a.a, "x": c.x(), "q": c.q(), "value": value }), EXIT_OK))
        }
    }
}

fn threshold(a: &ThresholdArgs) -> Result<Outcome> {
    let which = to_value(&a.which);
    let r = || need(a.r, "r", which.as_str().unwrap_or_default());
    let v = match a.which {
        Which::R0 => to_value(&thresholds::solve_r0()),
        Which::T1 => to_value(&thresholds::solve_t1(r()?)?),
        Which::T2 => to_value(&thresholds::solve_t2(r()?)?),
        Which::A1 => json!({ "r": r()?, "value": thresholds::a1(r()?)? }),
        Which::A2 => json!({ "r": r()?, "value": thresholds::a2(r()?)? }),
        Which::AlphaUpper => json!({ "r": r()?, "value": thresholds::alpha_threshold_upper(r()?)? }),
        Which::AlphaLower => json!({ "r": r()?, "value": thresholds::alpha_threshold_lower(r()?)? }),
        Which::MinAR => to_value(&thresholds::min_a_r(r()?)?),
        Which::AR => {
            let t = need(a.t, "t", "a-r")?;
            json!({ "r": r()?, "t": t, "value": thresholds::a_r_fn(r()?, t)? })
        }
    };
    let mut v = v;
    v["which"] = which;
    Ok(Outcome::single(v, EXIT_OK))
}

fn sweep(a: &SweepArgs) -> Result<Outcome> {
    let axis = Axis { lo: a.lo, hi: a.hi, count: a.count, open_lo: a.open_lo, open_hi: a.open_hi };
    let points = axis.points()?;
    let (axis_name, outputs): (&str, Vec<&str>) = match a.quantity {
        Quantity::ArProfile => ("t", vec!["a_r"]),
        Quantity::AlphaUpper | Quantity::AlphaLower => ("r", vec!["alpha"]),
        Quantity::MinAR => ("r", vec!["t_star", "a_star"]),
        Quantity::BaseResidual => ("q", vec!["upper_residual", "lower_residual"]),
    };
    let r = if a.quantity == Quantity::ArProfile { Some(need(a.r, "r", "ar-profile")?) } else { None };
    let rows = Execution::Parallel.map_indexed(points.len(), |i| -> Result<Vec<f64>> {
        let p = points[i];
        Ok(match a.quantity {
            Quantity::ArProfile => vec![thresholds::a_r_fn(r.unwrap_or_default(), p)?],
            Quantity::AlphaUpper => vec![thresholds::alpha_threshold_upper(p)?],
            Quantity::AlphaLower => vec![thresholds::alpha_threshold_lower(p)?],
            Quantity::MinAR => {
                let m = thresholds::min_a_r(p)?;
                vec![m.t_star, m.a_star]
            }
            Quantity::BaseResidual => {
                if !(p > 0.0 && p <= 0.5) {
                    return Err(domain(format!("base-residual needs 0 < q <= 1/2, got q = {p}")));
                }
                let opts = CheckOptions::default();
                let up = Configuration::new(vec![0.0, 1.0], vec![p, 1.0 - p])?;
                let down = Configuration::new(vec![0.0, 1.0], vec![1.0 - p, p])?;
                let none = CheckParams::none();
                vec![
                    check(InequalityId::DianandaBaseUpper, &up, &none, &opts)?.residual,
                    check(InequalityId::DianandaBaseLower, &down, &none, &opts)?.residual,
                ]
            }
        })
    });
    let mut header = vec![axis_name.to_string()];
    header.extend(outputs.iter().map(|s| s.to_string()));
    let mut table = Vec::with_capacity(points.len());
    for (p, row) in points.iter().zip(rows) {
        let mut cells = vec![json!(p)];
        cells.extend(row?.into_iter().map(|v| json!(v)));
        table.push(cells);
    }
    let json_rows: Vec<Value> = table
        .iter()
        .map(|cells| Value::Object(header.iter().cloned().zip(cells.iter().cloned()).collect::<Map<_, _>>()))
        .collect();
    let mut json = json!({ "quantity": a.quantity, "rows": json_rows });
    if let Some(r) = r {
        json["r"] = json!(r);
    }
    Ok(Outcome { json, table: Some((header, table)), exit: EXIT_OK })
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, inner, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn render(outcome: &Outcome, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json).expect("reports serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let (header, rows) = match &outcome.table {
                Some((h, rows)) => (h.clone(), rows.clone()),
                None => {
                    let mut flat = Vec::new();
                    flatten("", &outcome.json, &mut flat);
                    let (h, row): (Vec<String>, Vec<Value>) = flat.into_iter().unzip();
                    (h, vec![row])
                }
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
            w.write_record(&header).map_err(io)?;
            for row in rows {
                w.write_record(row.iter().map(cell)).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Merges `--config` with the command line; command-line values win.
fn resolve(cli: Cli) -> Result<RunConfig> {
    let base = match &cli.config {
        Some(path) => Some(
            serde_json::from_str::<RunConfig>(&read(path)?)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let command = match (cli.command, &base) {
        (Some(c), _) => c,
        (None, Some(b)) => b.command.clone(),
        (None, None) => return Err(Error::Config("no command given (try --help)".into())),
    };
    Ok(RunConfig {
        command,
        output: cli.output.or_else(|| base.as_ref().and_then(|b| b.output.clone())),
        format: cli.format.or(base.as_ref().map(|b| b.format)).unwrap_or_default(),
        seed: cli.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(0),
        tol_rel: cli.tol_rel.or(base.as_ref().map(|b| b.tol_rel)).unwrap_or(DEFAULT_REL_TOL),
        tol_abs: cli.tol_abs.or(base.as_ref().map(|b| b.tol_abs)).unwrap_or(DEFAULT_ABS_TOL),
    })
}

/// Runs one command; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match resolve(cli).and_then(|run| run_config(&run).map(|code| (run, code))) {
        Ok((_, code)) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// Executes a resolved run and writes its report.
pub fn run_config(run: &RunConfig) -> Result<i32> {
    let outcome = execute(run)?;
    let text = render(&outcome, run.format)?;
    match &run.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::Config(format!("stdout: {e}")))?;
        }
    }
    Ok(outcome.exit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        resolve(Cli::try_parse_from(std::iter::once("meanbounds").chain(args.iter().copied())).unwrap()).unwrap()
    }

    #[test]
    fn run_config_round_trips() {
        for args in [
            &["mean", "--x", "1,4", "--q", "0.5,0.5", "--r", "-0.5"][..],
            &["check", "--ineq", "diananda-upper", "--triple", "1,0.5,0", "--alpha", "1", "--x", "1,4,9", "--q", "0.3,0.3,0.4"],
            &["hunt", "--ineq", "mg-sigma-upper", "--r", "2.5", "--seed", "42"],
            &["sweep", "--quantity", "ar-profile", "--r", "1.5", "--lo", "0", "--hi", "1", "--count", "11"],
            &["threshold", "--which", "r0", "--format", "csv"],
            &["aux", "--id", "E_xr", "--at", "0.75,1"],
        ] {
            let run = parse(args);
            let text = serde_json::to_string(&run).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(run, back, "{text}");
        }
    }

    #[test]
    fn weights_are_normalized_within_slack() {
        let input = ConfigInput { x: Some(vec![1.0, 4.0, 9.0]), q: Some(vec![0.333333, 0.333333, 0.333334]), input: None };
        assert!(input.load().is_ok());
        let bad = ConfigInput { q: Some(vec![0.3, 0.3, 0.3]), ..input };
        assert!(bad.load().is_err());
    }

    #[test]
    fn csv_flattens_nested_reports() {
        let o = Outcome::single(json!({ "a": 1.5, "b": { "c": [1, 2] }, "d": null }), 0);
        assert_eq!(render(&o, Format::Csv).unwrap(), "a,b.c,d\n1.5,1;2,\n");
    }
}
