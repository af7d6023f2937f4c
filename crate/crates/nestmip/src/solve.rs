//! Solving through an external MIP solver process, and the dispatch between
//! that and the built-in enumerator.

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use log::{debug, warn};
use nestmip_core::builder::BuiltModel;
use nestmip_core::enumerate::{placement_from_values, solve_with_fixed_binaries};
use nestmip_core::mip::VarKind;
use nestmip_core::{
    build_model, enumerate_exact, export_model, BuildOptions, EnumLimits, ExportFormat, ExportOptions, MipModel,
    ModelVariant, ProblemInstance, SolveResult, SolveStatus,
};
use wait_timeout::ChildExt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveLimits {
    pub time_s: f64,
    pub gap_tol: f64,
    pub threads: usize,
    pub seed: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { time_s: 3600.0, gap_tol: 1e-4, threads: 1, seed: 0 }
    }
}

/// An external solver invocation. The template is split on whitespace and
/// each token has `{model}`, `{sol}`, `{time}`, `{gap}`, `{threads}` and
/// `{seed}` substituted; no shell is involved.
#[derive(Clone, Debug, PartialEq)]
pub struct Backend {
    pub template: String,
    pub format: ExportFormat,
    pub sos_as_constraints: bool,
}

impl Backend {
    pub fn new(template: impl Into<String>) -> Self {
        Backend { template: template.into(), format: ExportFormat::Mps, sos_as_constraints: false }
    }

    fn command_line(&self, model: &Path, sol: &Path, limits: &SolveLimits) -> Result<Vec<String>> {
        let args: Vec<String> = self
            .template
            .split_whitespace()
            .map(|tok| {
                tok.replace("{model}", &model.to_string_lossy())
                    .replace("{sol}", &sol.to_string_lossy())
                    .replace("{time}", &limits.time_s.to_string())
                    .replace("{gap}", &limits.gap_tol.to_string())
                    .replace("{threads}", &limits.threads.to_string())
                    .replace("{seed}", &limits.seed.to_string())
            })
            .collect();
        if args.is_empty() {
            return Err(Error::Backend { message: "empty solver command".into(), stdout: String::new(), stderr: String::new() });
        }
        Ok(args)
    }
}

/// Contents of a solution file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionFile {
    pub status: Option<SolveStatus>,
    pub raw_status: Option<String>,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub nodes: Option<u64>,
    pub iterations: Option<u64>,
    pub time: Option<f64>,
    pub values: HashMap<String, f64>,
}

/// Parses `key = value` header lines and `name value` variable lines. Keys
/// other than the known header keys are read as variable values.
pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut sol = SolutionFile::default();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |message: String| Error::Parse { line: k + 1, message };
        let (key, value) = match line.split_once('=') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => {
                let mut it = line.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some(a), Some(b), None) => (a, b),
                    _ => return Err(perr(format!("expected 'name value', got '{line}'"))),
                }
            }
        };
        let num = || -> Result<f64> { value.parse::<f64>().map_err(|_| perr(format!("'{value}' is not a number"))) };
        let count = || -> Result<u64> {
            let v = num()?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(perr(format!("'{value}' is not a count")));
            }
            Ok(v as u64)
        };
        match key.to_ascii_lowercase().as_str() {
            "status" => {
                sol.status = SolveStatus::parse(value);
                sol.raw_status = Some(value.to_string());
                if sol.status.is_none() {
                    return Err(perr(format!("unknown status '{value}'")));
                }
            }
            "objective" => sol.objective = Some(num()?),
            "bound" => sol.bound = Some(num()?),
            "nodes" => sol.nodes = Some(count()?),
            "iterations" => sol.iterations = Some(count()?),
            "time" => sol.time = Some(num()?),
            "gap" => {}
            _ => {
                sol.values.insert(key.to_string(), num()?);
            }
        }
    }
    Ok(sol)
}

/// Farthest a binary may sit from 0 or 1 before the value is rejected.
pub const BINARY_TOL: f64 = 0.25;

/// Maps the named values onto the model's variables. Missing names read as
/// zero; binaries are rounded.
pub fn values_for_model(model: &MipModel, names: &[String], sol: &SolutionFile) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(names.len());
    for (var, name) in model.variables.iter().zip(names) {
        let v = sol.values.get(name).copied().unwrap_or(0.0);
        if var.kind == VarKind::Binary {
            let r = v.round();
            if (v - r).abs() > BINARY_TOL || !(r == 0.0 || r == 1.0) {
                return Err(Error::Parse { line: 0, message: format!("binary {name} has value {v}") });
            }
            out.push(r);
        } else {
            out.push(v);
        }
    }
    Ok(out)
}

/// What the backend process reported.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalOutcome {
    pub solution: SolutionFile,
    /// Model values in variable order, when the solver returned a point.
    pub values: Option<Vec<f64>>,
    pub wall_time_s: f64,
    pub timed_out: bool,
}

/// Writes the model, runs the backend and reads its solution file. The
/// process is killed after the time limit plus a grace period.
pub fn run_backend(model: &MipModel, backend: &Backend, limits: &SolveLimits) -> Result<ExternalOutcome> {
    let options = ExportOptions { sos_as_constraints: backend.sos_as_constraints };
    let export = export_model(model, backend.format, options)?;
    for w in &export.warnings {
        warn!("{w}");
    }
    let dir = tempfile::tempdir().map_err(Error::io(std::env::temp_dir()))?;
    let ext = match backend.format {
        ExportFormat::Mps => "mps",
        ExportFormat::Lp => "lp",
    };
    let model_path = dir.path().join(format!("model.{ext}"));
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&model_path, &export.text).map_err(Error::io(&model_path))?;
    let args = backend.command_line(&model_path, &sol_path, limits)?;
    debug!("running {args:?}");
    let (out_path, err_path) = (dir.path().join("stdout"), dir.path().join("stderr"));
    let stdout = File::create(&out_path).map_err(Error::io(&out_path))?;
    let stderr = File::create(&err_path).map_err(Error::io(&err_path))?;
    let start = Instant::now();
    let mut child = Command::new(&args[0])
        .args(&args[1..])
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr)
        .spawn()
        .map_err(|e| Error::Backend { message: format!("cannot start {}: {e}", args[0]), stdout: String::new(), stderr: String::new() })?;
    let grace = (0.1 * limits.time_s).max(10.0);
    let waited = child
        .wait_timeout(Duration::from_secs_f64(limits.time_s + grace))
        .map_err(|e| Error::Backend { message: e.to_string(), stdout: String::new(), stderr: String::new() })?;
    let wall = start.elapsed().as_secs_f64();
    let captured = || {
        (
            std::fs::read_to_string(&out_path).unwrap_or_default(),
            std::fs::read_to_string(&err_path).unwrap_or_default(),
        )
    };
    let Some(exit) = waited else {
        let _ = child.kill();
        let _ = child.wait();
        warn!("backend killed after {wall:.1} s");
        let solution = SolutionFile { status: Some(SolveStatus::TimeLimit), ..Default::default() };
        return Ok(ExternalOutcome { solution, values: None, wall_time_s: wall, timed_out: true });
    };
    if !exit.success() {
        let (stdout, stderr) = captured();
        return Err(Error::Backend { message: format!("{} exited with {exit}", args[0]), stdout, stderr });
    }
    let text = std::fs::read_to_string(&sol_path).map_err(|e| {
        let (stdout, stderr) = captured();
        Error::Backend { message: format!("no solution file: {e}"), stdout, stderr }
    })?;
    let solution = parse_solution(&text)?;
    let values = if solution.values.is_empty() { None } else { Some(values_for_model(model, &export.names, &solution)?) };
    Ok(ExternalOutcome { solution, values, wall_time_s: wall, timed_out: false })
}

/// Solves a built model externally. The continuous part of a returned point
/// is re-solved with the built-in LP under the solver's binaries, which
/// removes solver round-off from the placement.
pub fn solve_external(built: &BuiltModel, backend: &Backend, limits: &SolveLimits) -> Result<SolveResult> {
    let out = run_backend(&built.model, backend, limits)?;
    let sol = &out.solution;
    let reported = sol.status.unwrap_or(if out.values.is_some() { SolveStatus::Feasible } else { SolveStatus::NoSolution });
    let hit_limit = out.timed_out || reported == SolveStatus::TimeLimit;
    let wall = if hit_limit { limits.time_s } else { sol.time.unwrap_or(out.wall_time_s) };
    let lb = sol.bound.unwrap_or(f64::NEG_INFINITY);
    let mut result = SolveResult::without_solution(reported, lb, wall);
    result.nodes = sol.nodes.unwrap_or(0);
    result.simplex_iterations = sol.iterations.unwrap_or(0);
    result.counts_reported = sol.nodes.is_some() && sol.iterations.is_some();
    match (reported, &out.values) {
        (SolveStatus::Infeasible, _) => return Ok(result),
        (_, None) => {
            if reported.has_solution() {
                warn!("solver reported {} without values", reported.as_str());
                result.status = SolveStatus::NoSolution;
            }
            return Ok(result);
        }
        _ => {}
    }
    let raw = out.values.expect("checked above");
    let values = match solve_with_fixed_binaries(&built.model, &raw)? {
        Some((v, _)) => v,
        None => {
            warn!("solver binaries do not admit a feasible LP; keeping the solver's point");
            raw
        }
    };
    let placement = placement_from_values(&built.registry, &values);
    result.upper_bound = placement.length;
    result.lower_bound = result.lower_bound.min(result.upper_bound);
    result.status = match reported {
        SolveStatus::Optimal => SolveStatus::Optimal,
        _ => SolveStatus::Feasible,
    };
    if result.status == SolveStatus::Optimal && !result.lower_bound.is_finite() {
        result.lower_bound = result.upper_bound;
    }
    result.placement = Some(placement);
    Ok(result)
}

/// Where to send a model.
#[derive(Clone, Debug, PartialEq)]
pub enum Solver {
    Enumerate(EnumLimits),
    External(Backend, SolveLimits),
}

/// Builds and solves one instance, timing the enumerator with the wall clock.
pub fn solve_instance(
    instance: &ProblemInstance,
    variant: ModelVariant,
    options: BuildOptions,
    solver: &Solver,
) -> Result<SolveResult> {
    match solver {
        Solver::Enumerate(limits) => {
            let start = Instant::now();
            let mut r = enumerate_exact(instance, variant, options, *limits)?;
            r.wall_time_s = start.elapsed().as_secs_f64();
            Ok(r)
        }
        Solver::External(backend, limits) => {
            let built = build_model(instance, variant, options)?;
            for w in &built.report.warnings {
                warn!("{}: {w}", instance.name);
            }
            solve_external(&built, backend, limits)
        }
    }
}
