//! Solver-agnostic MIP representation and its text exports.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};
pub use crate::lp::Sense;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Attachment {
    Root,
    UserCut,
}

/// What a row encodes; used for counting and auditing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ConstraintClass {
    Containment,
    Edge,
    PrevEdge,
    Selection,
    Slice,
    SliceVs2,
    Symmetry,
    IdenticalTriple,
    Subsumption,
    TripleCut,
    Other,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub attachment: Attachment,
    pub class: ConstraintClass,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sos1 {
    pub name: String,
    pub members: Vec<VarId>,
}

/// A minimization model.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MipModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub sos1: Vec<Sos1>,
    pub objective: Vec<(VarId, f64)>,
}

/// Per-variable rewrite applied by [`MipModel::substitute`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VarAction {
    Keep,
    Fix(f64),
    Alias(VarId),
}

impl MipModel {
    pub fn new(name: impl Into<String>) -> Self {
        MipModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lo: f64, hi: f64) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            kind,
            lo,
            hi,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
        class: ConstraintClass,
    ) -> usize {
        self.push_row(name.into(), terms, sense, rhs, class, Attachment::Root)
    }

    pub fn add_user_cut(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
        class: ConstraintClass,
    ) -> usize {
        self.push_row(name.into(), terms, sense, rhs, class, Attachment::UserCut)
    }

    fn push_row(
        &mut self,
        name: String,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
        class: ConstraintClass,
        attachment: Attachment,
    ) -> usize {
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
            attachment,
            class,
        });
        self.constraints.len() - 1
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn count_class(&self, class: ConstraintClass) -> usize {
        self.constraints.iter().filter(|c| c.class == class).count()
    }

    /// Checks that names are unique, every reference is declared and
    /// binaries are bounded by `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (k, v) in self.variables.iter().enumerate() {
            if seen.insert(v.name.as_str(), k).is_some() {
                return Err(Error::Model(format!("duplicate variable name {}", v.name)));
            }
            if v.kind == VarKind::Binary && (v.lo < 0.0 || v.hi > 1.0) {
                return Err(Error::Model(format!("binary {} has bounds [{}, {}]", v.name, v.lo, v.hi)));
            }
        }
        let n = self.variables.len();
        let bad = |ids: &mut dyn Iterator<Item = VarId>| ids.map(|v| v.0).max().is_some_and(|m| m >= n);
        for c in &self.constraints {
            if bad(&mut c.terms.iter().map(|t| t.0)) {
                return Err(Error::Model(format!("row {} references an undeclared variable", c.name)));
            }
        }
        for s in &self.sos1 {
            if bad(&mut s.members.iter().copied()) {
                return Err(Error::Model(format!("SOS {} references an undeclared variable", s.name)));
            }
        }
        if bad(&mut self.objective.iter().map(|t| t.0)) {
            return Err(Error::Model("objective references an undeclared variable".into()));
        }
        Ok(())
    }

    /// Applies fixings and aliases, then drops the rewritten variables and
    /// renumbers the rest. Rows left without variables are dropped when
    /// satisfied and reported as an error otherwise. Returns the old → new
    /// index map.
    pub fn substitute(&mut self, actions: &[VarAction]) -> Result<Vec<Option<VarId>>> {
        let n = self.variables.len();
        if actions.len() != n {
            return Err(Error::Model("action list does not match variable count".into()));
        }
        let resolve = |mut v: VarId| -> core::result::Result<VarId, f64> {
            for _ in 0..=n {
                match actions[v.0] {
                    VarAction::Keep => return Ok(v),
                    VarAction::Fix(val) => return Err(val),
                    VarAction::Alias(to) => v = to,
                }
            }
            Ok(v)
        };
        let mut map = vec![None; n];
        let mut kept = Vec::new();
        for (k, var) in self.variables.iter().enumerate() {
            if actions[k] == VarAction::Keep {
                map[k] = Some(VarId(kept.len()));
                kept.push(var.clone());
            }
        }
        let rewrite = |terms: &[(VarId, f64)]| -> (Vec<(VarId, f64)>, f64) {
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            let mut order = Vec::new();
            let mut constant = 0.0;
            for &(v, c) in terms {
                match resolve(v) {
                    Ok(r) => {
                        let id = map[r.0].expect("kept variable").0;
                        if !acc.contains_key(&id) {
                            order.push(id);
                        }
                        *acc.entry(id).or_insert(0.0) += c;
                    }
                    Err(val) => constant += c * val,
                }
            }
            let out = order
                .into_iter()
                .filter_map(|id| {
                    let c = acc[&id];
                    (c != 0.0).then_some((VarId(id), c))
                })
                .collect();
            (out, constant)
        };
        let mut rows = Vec::with_capacity(self.constraints.len());
        for c in self.constraints.drain(..) {
            let (terms, constant) = rewrite(&c.terms);
            let rhs = c.rhs - constant;
            if terms.is_empty() {
                let ok = match c.sense {
                    Sense::Le => 0.0 <= rhs + 1e-9,
                    Sense::Ge => 0.0 >= rhs - 1e-9,
                    Sense::Eq => libm::fabs(rhs) <= 1e-9,
                };
                if !ok {
                    return Err(Error::Model(format!("row {} became infeasible after substitution", c.name)));
                }
                continue;
            }
            rows.push(Constraint { terms, rhs, ..c });
        }
        self.constraints = rows;
        let mut sets = Vec::new();
        for s in self.sos1.drain(..) {
            let mut members: Vec<VarId> = Vec::new();
            for v in s.members {
                if let Ok(r) = resolve(v) {
                    let id = map[r.0].expect("kept variable");
                    if !members.contains(&id) {
                        members.push(id);
                    }
                }
            }
            if members.len() >= 2 {
                sets.push(Sos1 { name: s.name, members });
            }
        }
        self.sos1 = sets;
        let (objective, _) = rewrite(&self.objective);
        self.objective = objective;
        self.variables = kept;
        Ok(map)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelStats {
    pub n_binary: usize,
    pub n_continuous: usize,
    pub n_constraints_root: usize,
    pub n_user_cuts: usize,
    pub n_sos1: usize,
}

pub fn model_stats(model: &MipModel) -> ModelStats {
    let n_binary = model.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
    let n_user_cuts = model
        .constraints
        .iter()
        .filter(|c| c.attachment == Attachment::UserCut)
        .count();
    ModelStats {
        n_binary,
        n_continuous: model.variables.len() - n_binary,
        n_constraints_root: model.constraints.len() - n_user_cuts,
        n_user_cuts,
        n_sos1: model.sos1.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExportFormat {
    Mps,
    Lp,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExportOptions {
    /// Write each SOS-1 set as a `Σ v ≤ 1` row instead of an SOS section,
    /// for backends without SOS support. Valid because members are binary.
    pub sos_as_constraints: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Export {
    pub text: String,
    pub warnings: Vec<String>,
    /// Exported column names in variable order (after any shortening).
    pub names: Vec<String>,
}

/// Longest identifier written to a file.
pub const MAX_NAME_LEN: usize = 255;

fn fnv1a(s: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in s.bytes() {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

fn export_name(name: &str, warnings: &mut Vec<String>) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_graphic() && c != ':' { c } else { '_' })
        .collect();
    if clean.len() <= MAX_NAME_LEN {
        return clean;
    }
    let mut cut = MAX_NAME_LEN - 9;
    while !clean.is_char_boundary(cut) {
        cut -= 1;
    }
    let short = format!("{}_{:08x}", &clean[..cut], fnv1a(name));
    warnings.push(format!("name '{}…' shortened to '{short}'", &clean[..32.min(clean.len())]));
    short
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = libm::fabs(v);
    if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn row_names(model: &MipModel, warnings: &mut Vec<String>) -> Vec<String> {
    model
        .constraints
        .iter()
        .map(|c| {
            let base = export_name(&c.name, warnings);
            if c.attachment == Attachment::UserCut && !base.starts_with("UCUT_") {
                format!("UCUT_{base}")
            } else {
                base
            }
        })
        .collect()
}

struct SosRow {
    name: String,
    members: Vec<VarId>,
}

/// Writes the model as free-format MPS or CPLEX-style LP text. The output is
/// a pure function of the model.
pub fn export_model(model: &MipModel, format: ExportFormat, options: ExportOptions) -> Result<Export> {
    model.validate()?;
    let mut warnings = Vec::new();
    let names: Vec<String> = model
        .variables
        .iter()
        .map(|v| export_name(&v.name, &mut warnings))
        .collect();
    let rows = row_names(model, &mut warnings);
    let sos_rows: Vec<SosRow> = if options.sos_as_constraints {
        model
            .sos1
            .iter()
            .map(|s| SosRow {
                name: export_name(&s.name, &mut warnings),
                members: s.members.clone(),
            })
            .collect()
    } else {
        Vec::new()
    };
    let model_name = export_name(if model.name.is_empty() { "model" } else { &model.name }, &mut warnings);
    let text = match format {
        ExportFormat::Mps => write_mps(model, &model_name, &names, &rows, &sos_rows, options),
        ExportFormat::Lp => write_lp(model, &model_name, &names, &rows, &sos_rows, options),
    };
    Ok(Export { text, warnings, names })
}

fn write_mps(
    model: &MipModel,
    model_name: &str,
    names: &[String],
    rows: &[String],
    sos_rows: &[SosRow],
    options: ExportOptions,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {model_name}");
    out.push_str("ROWS\n N  OBJ\n");
    for (c, name) in model.constraints.iter().zip(rows) {
        let s = match c.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {s}  {name}");
    }
    for s in sos_rows {
        let _ = writeln!(out, " L  {}", s.name);
    }
    // Column-major coefficient lists.
    let n = model.variables.len();
    let mut cols: Vec<Vec<(String, f64)>> = vec![Vec::new(); n];
    for &(v, c) in &model.objective {
        cols[v.0].push(("OBJ".into(), c));
    }
    for (c, name) in model.constraints.iter().zip(rows) {
        for &(v, a) in &c.terms {
            cols[v.0].push((name.clone(), a));
        }
    }
    for s in sos_rows {
        for v in &s.members {
            cols[v.0].push((s.name.clone(), 1.0));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (k, var) in model.variables.iter().enumerate() {
        let is_int = var.kind == VarKind::Binary;
        if is_int != in_int {
            let tag = if is_int { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, "    M{marker}  'MARKER'  '{tag}'");
            marker += 1;
            in_int = is_int;
        }
        if cols[k].is_empty() {
            // keep the column declared
            let _ = writeln!(out, "    {}  OBJ  0", names[k]);
        }
        for (row, a) in &cols[k] {
            let _ = writeln!(out, "    {}  {row}  {}", names[k], fmt_num(*a));
        }
    }
    if in_int {
        let _ = writeln!(out, "    M{marker}  'MARKER'  'INTEND'");
    }
    out.push_str("RHS\n");
    for (c, name) in model.constraints.iter().zip(rows) {
        if c.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {name}  {}", fmt_num(c.rhs));
        }
    }
    for s in sos_rows {
        let _ = writeln!(out, "    RHS  {}  1", s.name);
    }
    out.push_str("BOUNDS\n");
    for (var, name) in model.variables.iter().zip(names) {
        if var.kind == VarKind::Binary && var.lo == 0.0 && var.hi == 1.0 {
            let _ = writeln!(out, " BV BND  {name}");
            continue;
        }
        if var.lo == var.hi {
            let _ = writeln!(out, " FX BND  {name}  {}", fmt_num(var.lo));
            continue;
        }
        if var.lo == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND  {name}");
        } else if var.lo != 0.0 || var.kind == VarKind::Binary {
            let _ = writeln!(out, " LO BND  {name}  {}", fmt_num(var.lo));
        }
        if var.hi.is_finite() {
            let _ = writeln!(out, " UP BND  {name}  {}", fmt_num(var.hi));
        }
    }
    if !options.sos_as_constraints && !model.sos1.is_empty() {
        out.push_str("SOS\n");
        for s in &model.sos1 {
            let _ = writeln!(out, " S1 SOS  {}  1", s.name);
            for (w, v) in s.members.iter().enumerate() {
                let _ = writeln!(out, "    {}  {}", names[v.0], w + 1);
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

fn write_lp_terms(out: &mut String, terms: &[(VarId, f64)], names: &[String]) {
    if terms.is_empty() {
        out.push_str(" 0 ");
        out.push_str(names.first().map(String::as_str).unwrap_or("L"));
        return;
    }
    for (k, &(v, c)) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", fmt_num(libm::fabs(c)), names[v.0]);
    }
}

fn write_lp(
    model: &MipModel,
    model_name: &str,
    names: &[String],
    rows: &[String],
    sos_rows: &[SosRow],
    options: ExportOptions,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {model_name}");
    out.push_str("Minimize\n obj:");
    write_lp_terms(&mut out, &model.objective, names);
    out.push_str("\nSubject To\n");
    for (c, name) in model.constraints.iter().zip(rows) {
        let _ = write!(out, " {name}:");
        write_lp_terms(&mut out, &c.terms, names);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", fmt_num(c.rhs));
    }
    for s in sos_rows {
        let terms: Vec<(VarId, f64)> = s.members.iter().map(|&v| (v, 1.0)).collect();
        let _ = write!(out, " {}:", s.name);
        write_lp_terms(&mut out, &terms, names);
        out.push_str(" <= 1\n");
    }
    out.push_str("Bounds\n");
    for (var, name) in model.variables.iter().zip(names) {
        if var.kind == VarKind::Binary {
            continue;
        }
        let lo = if var.lo == f64::NEG_INFINITY { "-inf".to_string() } else { fmt_num(var.lo) };
        let hi = if var.hi == f64::INFINITY { "+inf".to_string() } else { fmt_num(var.hi) };
        let _ = writeln!(out, " {lo} <= {name} <= {hi}");
    }
    let binaries: Vec<&String> = model
        .variables
        .iter()
        .zip(names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(8) {
            out.push(' ');
            for n in chunk {
                let _ = write!(out, " {n}");
            }
            out.push('\n');
        }
    }
    if !options.sos_as_constraints && !model.sos1.is_empty() {
        out.push_str("SOS\n");
        for s in &model.sos1 {
            let _ = write!(out, " {}: S1::", s.name);
            for (w, v) in s.members.iter().enumerate() {
                let _ = write!(out, " {}:{}", names[v.0], w + 1);
            }
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

/// Reads back the free-MPS subset written by [`export_model`]. Row classes
/// are not stored in the file; parsed rows get [`ConstraintClass::Other`],
/// and `UCUT_` rows are reattached as user cuts.
pub fn parse_mps(text: &str) -> Result<MipModel> {
    #[derive(PartialEq)]
    enum Sec {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
        Sos,
    }
    let mut model = MipModel::default();
    let mut sec = Sec::None;
    let mut row_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut col_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut in_int = false;
    let mut bounded: Vec<bool> = Vec::new();
    let err = |line: usize, msg: &str| Error::Input(format!("MPS line {}: {msg}", line + 1));
    let parse_f = |line: usize, s: &str| s.parse::<f64>().map_err(|_| err(line, "bad number"));
    for (ln, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let tok: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            sec = match tok[0] {
                "NAME" => {
                    model.name = tok.get(1).copied().unwrap_or("").to_string();
                    Sec::None
                }
                "ROWS" => Sec::Rows,
                "COLUMNS" => Sec::Columns,
                "RHS" => Sec::Rhs,
                "BOUNDS" => Sec::Bounds,
                "SOS" => Sec::Sos,
                "ENDATA" => break,
                other => return Err(err(ln, &format!("unknown section {other}"))),
            };
            continue;
        }
        match sec {
            Sec::Rows => {
                if tok.len() != 2 {
                    return Err(err(ln, "ROWS entry needs 2 fields"));
                }
                let sense = match tok[0] {
                    "N" => continue,
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(err(ln, "bad row type")),
                };
                row_index.insert(tok[1].to_string(), model.constraints.len());
                let attachment = if tok[1].starts_with("UCUT_") { Attachment::UserCut } else { Attachment::Root };
                model.constraints.push(Constraint {
                    name: tok[1].to_string(),
                    terms: Vec::new(),
                    sense,
                    rhs: 0.0,
                    attachment,
                    class: ConstraintClass::Other,
                });
            }
            Sec::Columns => {
                if tok.len() == 3 && tok[1] == "'MARKER'" {
                    in_int = tok[2] == "'INTORG'";
                    continue;
                }
                if tok.len() < 3 || tok.len().is_multiple_of(2) {
                    return Err(err(ln, "COLUMNS entry needs name/value pairs"));
                }
                let col = match col_index.get(tok[0]) {
                    Some(&c) => c,
                    None => {
                        let kind = if in_int { VarKind::Binary } else { VarKind::Continuous };
                        let hi = if in_int { 1.0 } else { f64::INFINITY };
                        let id = model.add_var(tok[0], kind, 0.0, hi);
                        bounded.push(false);
                        col_index.insert(tok[0].to_string(), id.0);
                        id.0
                    }
                };
                for pair in tok[1..].chunks(2) {
                    let v = parse_f(ln, pair[1])?;
                    if pair[0] == "OBJ" {
                        if v != 0.0 {
                            model.objective.push((VarId(col), v));
                        }
                    } else {
                        let r = *row_index.get(pair[0]).ok_or_else(|| err(ln, "unknown row"))?;
                        model.constraints[r].terms.push((VarId(col), v));
                    }
                }
            }
            Sec::Rhs => {
                for pair in tok[1..].chunks(2) {
                    if pair.len() != 2 {
                        return Err(err(ln, "RHS entry needs name/value pairs"));
                    }
                    let r = *row_index.get(pair[0]).ok_or_else(|| err(ln, "unknown row"))?;
                    model.constraints[r].rhs = parse_f(ln, pair[1])?;
                }
            }
            Sec::Bounds => {
                if tok.len() < 3 {
                    return Err(err(ln, "BOUNDS entry too short"));
                }
                let c = *col_index.get(tok[2]).ok_or_else(|| err(ln, "unknown column"))?;
                let val = tok.get(3).map(|s| parse_f(ln, s)).transpose()?;
                let v = &mut model.variables[c];
                bounded[c] = true;
                match (tok[0], val) {
                    ("BV", _) => {
                        v.kind = VarKind::Binary;
                        v.lo = 0.0;
                        v.hi = 1.0;
                    }
                    ("LO", Some(x)) => v.lo = x,
                    ("UP", Some(x)) => v.hi = x,
                    ("FX", Some(x)) => {
                        v.lo = x;
                        v.hi = x;
                    }
                    ("MI", _) => v.lo = f64::NEG_INFINITY,
                    ("PL", _) => v.hi = f64::INFINITY,
                    ("FR", _) => {
                        v.lo = f64::NEG_INFINITY;
                        v.hi = f64::INFINITY;
                    }
                    _ => return Err(err(ln, "unsupported bound type")),
                }
            }
            Sec::Sos => {
                if tok[0] == "S1" {
                    let name = tok.get(2).copied().unwrap_or("sos").to_string();
                    model.sos1.push(Sos1 { name, members: Vec::new() });
                } else {
                    let c = *col_index.get(tok[0]).ok_or_else(|| err(ln, "unknown SOS member"))?;
                    model
                        .sos1
                        .last_mut()
                        .ok_or_else(|| err(ln, "SOS member before set header"))?
                        .members
                        .push(VarId(c));
                }
            }
            Sec::None => return Err(err(ln, "data outside a section")),
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MipModel {
        let mut m = MipModel::new("tiny");
        let l = m.add_var("L", VarKind::Continuous, 1.5, 10.0);
        let x = m.add_var("x_1", VarKind::Continuous, 0.0, 8.0);
        let a = m.add_binary("v_1_2_1_1_l");
        let b = m.add_binary("v_1_2_1_1_r");
        let c = m.add_binary("v_1_2_1_1_t3");
        m.objective.push((l, 1.0));
        m.add_constraint("c1", vec![(x, 1.0), (l, -1.0)], Sense::Le, -0.1, ConstraintClass::Containment);
        m.add_constraint("sel", vec![(a, 1.0), (b, 1.0), (c, 1.0)], Sense::Eq, 1.0, ConstraintClass::Selection);
        m.add_user_cut("tc1", vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0, ConstraintClass::TripleCut);
        m.sos1.push(Sos1 { name: "clq1".into(), members: vec![a, b, c] });
        m
    }

    #[test]
    fn empty_model_stats_and_minimal_export() {
        assert_eq!(model_stats(&MipModel::default()), ModelStats::default());
        let mut m = MipModel::new("empty");
        let l = m.add_var("L", VarKind::Continuous, 0.0, f64::INFINITY);
        m.objective.push((l, 1.0));
        let e = export_model(&m, ExportFormat::Mps, ExportOptions::default()).unwrap();
        let back = parse_mps(&e.text).unwrap();
        assert_eq!(back.variables.len(), 1);
        assert_eq!(back.constraints.len(), 0);
    }

    #[test]
    fn mps_round_trip() {
        let m = tiny();
        let e = export_model(&m, ExportFormat::Mps, ExportOptions::default()).unwrap();
        let back = parse_mps(&e.text).unwrap();
        assert_eq!(back.variables.len(), m.variables.len());
        assert_eq!(back.constraints.len(), m.constraints.len());
        for (a, b) in m.variables.iter().zip(&back.variables) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.kind, b.kind);
            assert_eq!((a.lo, a.hi), (b.lo, b.hi));
        }
        for (a, b) in m.constraints.iter().zip(&back.constraints) {
            // MPS lists coefficients column by column
            let sorted = |t: &[(VarId, f64)]| {
                let mut t = t.to_vec();
                t.sort_by_key(|x| x.0 .0);
                t
            };
            assert_eq!(sorted(&a.terms), sorted(&b.terms));
            assert_eq!(a.rhs, b.rhs);
            assert_eq!(a.sense, b.sense);
            assert_eq!(a.attachment, b.attachment);
        }
        assert_eq!(back.sos1, m.sos1);
        assert_eq!(model_stats(&back), model_stats(&m));
    }

    #[test]
    fn sos_section_weights() {
        let e = export_model(&tiny(), ExportFormat::Mps, ExportOptions::default()).unwrap();
        let sos = e.text.split("SOS\n").nth(1).unwrap();
        assert!(sos.contains("v_1_2_1_1_l  1\n"));
        assert!(sos.contains("v_1_2_1_1_r  2\n"));
        assert!(sos.contains("v_1_2_1_1_t3  3\n"));
        let lp = export_model(&tiny(), ExportFormat::Lp, ExportOptions::default()).unwrap();
        assert!(lp.text.contains("clq1: S1:: v_1_2_1_1_l:1 v_1_2_1_1_r:2 v_1_2_1_1_t3:3"));
        assert!(lp.text.contains(" UCUT_tc1:"));
    }

    #[test]
    fn sos_as_rows() {
        let opts = ExportOptions { sos_as_constraints: true };
        let e = export_model(&tiny(), ExportFormat::Mps, opts).unwrap();
        assert!(!e.text.contains("\nSOS\n"));
        let back = parse_mps(&e.text).unwrap();
        assert_eq!(back.constraints.len(), tiny().constraints.len() + 1);
    }

    #[test]
    fn long_names_are_shortened_deterministically() {
        let mut m = MipModel::new("n");
        let long = "v".repeat(400);
        m.add_binary(long.clone());
        let a = export_model(&m, ExportFormat::Lp, ExportOptions::default()).unwrap();
        let b = export_model(&m, ExportFormat::Lp, ExportOptions::default()).unwrap();
        assert_eq!(a.text, b.text);
        assert_eq!(a.warnings.len(), 1);
        assert_eq!(a.names[0].len(), MAX_NAME_LEN);
    }

    #[test]
    fn number_formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-12, 123456789.123, -2.5e20, 7.0] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_num(2.0), "2");
    }

    #[test]
    fn substitute_fixes_and_aliases() {
        let mut m = tiny();
        // fix t3 to 0, alias r onto l
        let actions = vec![VarAction::Keep, VarAction::Keep, VarAction::Keep, VarAction::Alias(VarId(2)), VarAction::Fix(0.0)];
        let map = m.substitute(&actions).unwrap();
        assert_eq!(map, vec![Some(VarId(0)), Some(VarId(1)), Some(VarId(2)), None, None]);
        assert_eq!(m.variables.len(), 3);
        let sel = m.constraints.iter().find(|c| c.name == "sel").unwrap();
        assert_eq!(sel.terms, vec![(VarId(2), 2.0)]);
        // clique collapses to one member and is dropped
        assert!(m.sos1.is_empty());
        m.validate().unwrap();
    }

    #[test]
    fn validate_rejects_duplicates() {
        let mut m = MipModel::new("d");
        m.add_binary("a");
        m.add_binary("a");
        assert!(m.validate().is_err());
    }
}
