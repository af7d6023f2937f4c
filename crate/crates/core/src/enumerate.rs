//! Exact solver for tiny models: depth-first search over the selection
//! groups, with a residual LP over the continuous variables at every node.
//!
//! With all binaries of a row fixed, the row is linear in `(L, x, y)`, so a
//! node's LP value is a valid bound for its whole subtree. Rows that only
//! involve binaries are checked as soon as they can no longer be satisfied.

use alloc::vec;
use alloc::vec::Vec;

use crate::builder::{build_model, BuildOptions, ModelVariant, Registry};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::instance::ProblemInstance;
use crate::lp::{LinearProgram, LpRow, LpStatus};
use crate::mip::{MipModel, Sense, VarKind};
use crate::solution::{Placement, SolveResult, SolveStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumLimits {
    /// Maximum number of search nodes (residual LP solves).
    pub node_cap: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { node_cap: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumOutcome {
    /// Full variable vector of the best assignment, if any is feasible.
    pub values: Option<Vec<f64>>,
    pub objective: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
}

const UNSET: i8 = -1;
const FEAS_TOL: f64 = 1e-9;

struct Prep<'m> {
    model: &'m MipModel,
    /// LP column of each continuous variable.
    col: Vec<Option<usize>>,
    cont: Vec<usize>,
    groups: Vec<Vec<usize>>,
    row_bins: Vec<Vec<(usize, f64)>>,
    row_cont: Vec<Vec<(usize, f64)>>,
    rows_of: Vec<Vec<usize>>,
    sos_of: Vec<Vec<usize>>,
}

impl<'m> Prep<'m> {
    fn new(model: &'m MipModel) -> Result<Self> {
        let n = model.variables.len();
        let mut col = vec![None; n];
        let mut cont = Vec::new();
        for (k, v) in model.variables.iter().enumerate() {
            if v.kind == VarKind::Continuous {
                col[k] = Some(cont.len());
                cont.push(k);
            }
        }
        let is_bin = |k: usize| model.variables[k].kind == VarKind::Binary;
        let mut groups = Vec::new();
        let mut grouped = vec![false; n];
        for c in &model.constraints {
            if c.sense == Sense::Eq && c.rhs == 1.0 && !c.terms.is_empty() && c.terms.iter().all(|&(v, a)| is_bin(v.0) && a == 1.0) {
                let members: Vec<usize> = c.terms.iter().map(|t| t.0 .0).collect();
                for &m in &members {
                    grouped[m] = true;
                }
                groups.push(members);
            }
        }
        if let Some(k) = (0..n).find(|&k| is_bin(k) && !grouped[k]) {
            return Err(Error::Model(alloc::format!(
                "binary {} belongs to no selection group",
                model.variables[k].name
            )));
        }
        let mut row_bins = Vec::with_capacity(model.constraints.len());
        let mut row_cont = Vec::with_capacity(model.constraints.len());
        let mut rows_of = vec![Vec::new(); n];
        for (r, c) in model.constraints.iter().enumerate() {
            let (mut b, mut x) = (Vec::new(), Vec::new());
            for &(v, a) in &c.terms {
                if is_bin(v.0) {
                    b.push((v.0, a));
                    rows_of[v.0].push(r);
                } else {
                    x.push((col[v.0].expect("continuous column"), a));
                }
            }
            row_bins.push(b);
            row_cont.push(x);
        }
        let mut sos_of = vec![Vec::new(); n];
        for (s, set) in model.sos1.iter().enumerate() {
            for m in &set.members {
                sos_of[m.0].push(s);
            }
        }
        Ok(Prep {
            model,
            col,
            cont,
            groups,
            row_bins,
            row_cont,
            rows_of,
            sos_of,
        })
    }

    /// Whether a binary-only row can still be satisfied.
    fn binary_row_ok(&self, r: usize, assign: &[i8]) -> bool {
        let c = &self.model.constraints[r];
        let (mut lo, mut hi) = (0.0, 0.0);
        for &(v, a) in &self.row_bins[r] {
            match assign[v] {
                UNSET => {
                    if a > 0.0 {
                        hi += a;
                    } else {
                        lo += a;
                    }
                }
                1 => {
                    lo += a;
                    hi += a;
                }
                _ => {}
            }
        }
        match c.sense {
            Sense::Le => lo <= c.rhs + FEAS_TOL,
            Sense::Ge => hi >= c.rhs - FEAS_TOL,
            Sense::Eq => lo <= c.rhs + FEAS_TOL && hi >= c.rhs - FEAS_TOL,
        }
    }

    fn sos_ok(&self, s: usize, assign: &[i8]) -> bool {
        self.model.sos1[s].members.iter().filter(|m| assign[m.0] == 1).count() <= 1
    }

    /// Residual LP over the continuous variables for rows whose binaries are
    /// all assigned. Rows that cannot bind inside the bound box are left out.
    fn residual_lp(&self, assign: &[i8]) -> LinearProgram {
        let m = self.model;
        let mut lp = LinearProgram::new(self.cont.len());
        for (c, &k) in self.cont.iter().enumerate() {
            lp.lower[c] = m.variables[k].lo;
            lp.upper[c] = m.variables[k].hi;
        }
        for &(v, a) in &m.objective {
            if let Some(c) = self.col[v.0] {
                lp.cost[c] += a;
            }
        }
        'rows: for (r, con) in m.constraints.iter().enumerate() {
            if self.row_cont[r].is_empty() {
                continue;
            }
            let mut rhs = con.rhs;
            for &(v, a) in &self.row_bins[r] {
                match assign[v] {
                    UNSET => continue 'rows,
                    1 => rhs -= a,
                    _ => {}
                }
            }
            let (mut lo, mut hi) = (0.0, 0.0);
            for &(c, a) in &self.row_cont[r] {
                let (l, u) = (lp.lower[c], lp.upper[c]);
                if a > 0.0 {
                    lo += a * l;
                    hi += a * u;
                } else {
                    lo += a * u;
                    hi += a * l;
                }
            }
            let redundant = match con.sense {
                Sense::Le => hi <= rhs + FEAS_TOL,
                Sense::Ge => lo >= rhs - FEAS_TOL,
                Sense::Eq => false,
            };
            if !redundant {
                lp.rows.push(LpRow {
                    terms: self.row_cont[r].clone(),
                    sense: con.sense,
                    rhs,
                });
            }
        }
        lp
    }

    fn full_values(&self, assign: &[i8], x: &[f64]) -> Vec<f64> {
        (0..assign.len())
            .map(|k| match self.col[k] {
                Some(c) => x[c],
                None => f64::from(assign[k].max(0)),
            })
            .collect()
    }
}

struct Search<'p, 'm> {
    prep: &'p Prep<'m>,
    assign: Vec<i8>,
    best: f64,
    best_values: Option<Vec<f64>>,
    nodes: u64,
    lp_iterations: u64,
    cap: usize,
}

impl Search<'_, '_> {
    /// Assigns the listed binaries; returns false when a binary-only row or
    /// an SOS set is violated. Assignments are pushed on `trail`.
    fn set(&mut self, vars: &[(usize, i8)], trail: &mut Vec<usize>) -> bool {
        let mut ok = true;
        for &(v, val) in vars {
            if self.assign[v] != UNSET {
                ok &= self.assign[v] == val;
                continue;
            }
            self.assign[v] = val;
            trail.push(v);
            for &r in &self.prep.rows_of[v] {
                if self.prep.row_cont[r].is_empty() {
                    ok &= self.prep.binary_row_ok(r, &self.assign);
                }
            }
            if val == 1 {
                for &s in &self.prep.sos_of[v] {
                    ok &= self.prep.sos_ok(s, &self.assign);
                }
            }
        }
        ok
    }

    fn undo(&mut self, trail: &[usize]) {
        for &v in trail {
            self.assign[v] = UNSET;
        }
    }

    /// Solves the node LP; returns its solution when the node can still
    /// improve on the incumbent.
    fn bound(&mut self) -> Result<Option<Vec<f64>>> {
        self.nodes += 1;
        if self.nodes as usize > self.cap {
            return Err(Error::CapExceeded(self.cap));
        }
        let s = self.prep.residual_lp(&self.assign).solve()?;
        self.lp_iterations += s.iterations as u64;
        match s.status {
            LpStatus::Optimal if s.objective < self.best - 1e-9 => Ok(Some(s.x)),
            LpStatus::Optimal | LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Model("residual LP is unbounded".into())),
            LpStatus::IterationLimit => Err(Error::Model("residual LP hit the iteration limit".into())),
        }
    }

    fn record(&mut self, x: &[f64]) {
        let values = self.prep.full_values(&self.assign, x);
        self.best = self.prep.model.objective.iter().map(|&(v, a)| a * values[v.0]).sum();
        self.best_values = Some(values);
    }

    fn dfs(&mut self, g: usize) -> Result<()> {
        let last = g + 1 == self.prep.groups.len();
        let members = &self.prep.groups[g];
        let ones = members.iter().filter(|&&m| self.assign[m] == 1).count();
        let choices: Vec<usize> = match ones {
            0 => members.iter().copied().filter(|&m| self.assign[m] == UNSET).collect(),
            1 => members.iter().copied().filter(|&m| self.assign[m] == 1).collect(),
            _ => return Ok(()),
        };
        for chosen in choices {
            let vals: Vec<(usize, i8)> = self.prep.groups[g].iter().map(|&m| (m, i8::from(m == chosen))).collect();
            let mut trail = Vec::new();
            if self.set(&vals, &mut trail) {
                if let Some(x) = self.bound()? {
                    if last {
                        self.record(&x);
                    } else {
                        self.dfs(g + 1)?;
                    }
                }
            }
            self.undo(&trail);
        }
        Ok(())
    }
}

/// Minimizes a model whose binaries all belong to `Σ v = 1` selection rows.
pub fn enumerate_model(model: &MipModel, limits: EnumLimits) -> Result<EnumOutcome> {
    let prep = Prep::new(model)?;
    let n = model.variables.len();
    let mut search = Search {
        prep: &prep,
        assign: vec![UNSET; n],
        best: f64::INFINITY,
        best_values: None,
        nodes: 0,
        lp_iterations: 0,
        cap: limits.node_cap,
    };
    let fixed: Vec<(usize, i8)> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary && (v.hi < 0.5 || v.lo > 0.5))
        .map(|(k, v)| (k, i8::from(v.lo > 0.5)))
        .collect();
    let mut trail = Vec::new();
    let consistent = search.set(&fixed, &mut trail)
        && (0..model.constraints.len()).all(|r| !prep.row_cont[r].is_empty() || prep.binary_row_ok(r, &search.assign));
    if consistent {
        if let Some(x) = search.bound()? {
            if prep.groups.is_empty() {
                search.record(&x);
            } else {
                search.dfs(0)?;
            }
        }
    }
    Ok(EnumOutcome {
        objective: search.best,
        values: search.best_values,
        nodes: search.nodes,
        lp_iterations: search.lp_iterations,
    })
}

/// Fixes every binary to its rounded value in `values` and re-solves the
/// continuous part. Returns `None` when that assignment is infeasible.
pub fn solve_with_fixed_binaries(model: &MipModel, values: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
    let prep = Prep::new(model)?;
    let mut assign = vec![UNSET; model.variables.len()];
    for (k, v) in model.variables.iter().enumerate() {
        if v.kind == VarKind::Binary {
            assign[k] = if values.get(k).copied().unwrap_or(0.0) > 0.5 { 1 } else { 0 };
        }
    }
    for r in 0..model.constraints.len() {
        if prep.row_cont[r].is_empty() && !prep.binary_row_ok(r, &assign) {
            return Ok(None);
        }
    }
    for s in 0..model.sos1.len() {
        if !prep.sos_ok(s, &assign) {
            return Ok(None);
        }
    }
    let s = prep.residual_lp(&assign).solve()?;
    if s.status != LpStatus::Optimal {
        return Ok(None);
    }
    let out = prep.full_values(&assign, &s.x);
    let obj = model.objective.iter().map(|&(v, a)| a * out[v.0]).sum();
    Ok(Some((out, obj)))
}

/// Reads piece positions and `L` out of a full variable vector.
pub fn placement_from_values(registry: &Registry, values: &[f64]) -> Placement {
    Placement {
        positions: registry
            .x
            .iter()
            .zip(&registry.y)
            .map(|(x, y)| Point::new(values[x.0], values[y.0]))
            .collect(),
        length: values[registry.length.0],
    }
}

/// Builds the model for `variant` and solves it by enumeration. The wall
/// time is left at zero; callers with a clock fill it in.
pub fn enumerate_exact(
    instance: &ProblemInstance,
    variant: ModelVariant,
    options: BuildOptions,
    limits: EnumLimits,
) -> Result<SolveResult> {
    let built = build_model(instance, variant, options)?;
    let out = enumerate_model(&built.model, limits)?;
    let mut result = SolveResult::without_solution(SolveStatus::Infeasible, f64::INFINITY, 0.0);
    result.nodes = out.nodes;
    result.simplex_iterations = out.lp_iterations;
    result.counts_reported = true;
    if let Some(values) = out.values {
        result.status = SolveStatus::Optimal;
        result.lower_bound = out.objective;
        result.upper_bound = out.objective;
        result.placement = Some(placement_from_values(&built.registry, &values));
    }
    Ok(result)
}
