//! Assembly of the six model variants from an instance.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::cuts::{self, MutationReport, TripleCut};
use crate::error::{Error, Result};
use crate::geometry::{convex_nfp, Interval};
use crate::instance::ProblemInstance;
use crate::mip::{model_stats, ConstraintClass, MipModel, ModelStats, Sense, VarAction, VarId, VarKind};
use crate::slices::{build_edge_regions, build_subregions, classify_boundary_edges, EdgeClass, FeasibleSubRegion, NfpEdge, NfpPart, RegionKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelVariant {
    NfpCmNc,
    NfpCm,
    ImprovedNfpCm,
    NfpCmVsNc,
    NfpCmVs,
    NfpCmVs2,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 6] = [
        ModelVariant::NfpCmNc,
        ModelVariant::NfpCm,
        ModelVariant::ImprovedNfpCm,
        ModelVariant::NfpCmVsNc,
        ModelVariant::NfpCmVs,
        ModelVariant::NfpCmVs2,
    ];

    /// Display name, e.g. `NFP-CM-VS2`.
    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::NfpCmNc => "NFP-CMnc",
            ModelVariant::NfpCm => "NFP-CM",
            ModelVariant::ImprovedNfpCm => "Improved-NFP-CM",
            ModelVariant::NfpCmVsNc => "NFP-CM-VSnc",
            ModelVariant::NfpCmVs => "NFP-CM-VS",
            ModelVariant::NfpCmVs2 => "NFP-CM-VS2",
        }
    }

    /// File-system friendly identifier, e.g. `nfp-cm-vs2`.
    pub fn slug(self) -> &'static str {
        match self {
            ModelVariant::NfpCmNc => "nfp-cm-nc",
            ModelVariant::NfpCm => "nfp-cm",
            ModelVariant::ImprovedNfpCm => "improved-nfp-cm",
            ModelVariant::NfpCmVsNc => "nfp-cm-vs-nc",
            ModelVariant::NfpCmVs => "nfp-cm-vs",
            ModelVariant::NfpCmVs2 => "nfp-cm-vs2",
        }
    }

    pub fn is_vertical_slice(self) -> bool {
        matches!(self, ModelVariant::NfpCmVsNc | ModelVariant::NfpCmVs | ModelVariant::NfpCmVs2)
    }

    fn y_symmetry(self) -> bool {
        self.is_vertical_slice() || self == ModelVariant::ImprovedNfpCm
    }

    fn triple_cuts(self) -> bool {
        matches!(self, ModelVariant::NfpCmVs | ModelVariant::NfpCmVs2)
    }
}

impl core::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        ModelVariant::ALL
            .into_iter()
            .find(|v| {
                let slug: String = v.slug().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
                slug == key
            })
            .ok_or_else(|| Error::Input(format!("unknown model variant '{s}'")))
    }
}

/// Switches for the optional reductions. A toggle only has an effect on the
/// variants that use that reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CutToggles {
    pub symmetry: bool,
    pub eliminations: bool,
    pub identical_triples: bool,
    pub merges: bool,
    pub subsumption: bool,
    pub cliques: bool,
    pub triple_cuts: bool,
}

impl Default for CutToggles {
    fn default() -> Self {
        CutToggles {
            symmetry: true,
            eliminations: true,
            identical_triples: true,
            merges: true,
            subsumption: true,
            cliques: true,
            triple_cuts: true,
        }
    }
}

impl CutToggles {
    pub fn none() -> Self {
        CutToggles {
            symmetry: false,
            eliminations: false,
            identical_triples: false,
            merges: false,
            subsumption: false,
            cliques: false,
            triple_cuts: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub cuts: CutToggles,
    /// Maximum number of triple cuts kept; `None` keeps all.
    pub triple_cut_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionEntry {
    pub region: FeasibleSubRegion,
    /// `None` once the variable has been eliminated.
    pub var: Option<VarId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartEntry {
    pub part: NfpPart,
    pub regions: Vec<RegionEntry>,
}

impl PartEntry {
    pub fn region(&self, kind: RegionKind) -> Option<&RegionEntry> {
        self.regions.iter().find(|r| r.region.kind == kind)
    }
}

/// NFP parts, their regions and the variables that select them.
#[derive(Clone, Debug, PartialEq)]
pub struct Registry {
    pub parts: Vec<PartEntry>,
    pub window_x: Interval,
    pub window_y: Interval,
    pub length: VarId,
    /// Indexed by piece − 1.
    pub x: Vec<VarId>,
    pub y: Vec<VarId>,
    pair_parts: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Registry {
    /// Indices into `parts` for the pair `i < j`.
    pub fn parts_of(&self, i: usize, j: usize) -> &[usize] {
        self.pair_parts.get(&(i, j)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn part(&self, i: usize, j: usize, f: usize, g: usize) -> Option<&PartEntry> {
        self.parts_of(i, j)
            .iter()
            .map(|&p| &self.parts[p])
            .find(|e| e.part.f == f && e.part.g == g)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pair_parts.keys().copied()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildReport {
    pub n_parts: usize,
    pub eliminated: usize,
    pub merged: usize,
    pub symmetry_rows: usize,
    pub identical_triples: usize,
    pub subsumption_rows: usize,
    pub clique_sets: usize,
    pub triple_cuts: usize,
    pub triple_cuts_truncated: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuiltModel {
    pub variant: ModelVariant,
    pub model: MipModel,
    pub registry: Registry,
    pub report: BuildReport,
    pub triple_cuts: Vec<TripleCut>,
}

impl BuiltModel {
    pub fn stats(&self) -> ModelStats {
        model_stats(&self.model)
    }
}

/// A model under construction: variables are only rewritten at the end, so
/// reductions record [`VarAction`]s instead of editing rows.
pub struct ModelDraft<'a> {
    pub instance: &'a ProblemInstance,
    pub variant: ModelVariant,
    pub model: MipModel,
    pub registry: Registry,
    pub actions: Vec<VarAction>,
}

impl ModelDraft<'_> {
    /// Current representative of `v`, or `None` if it was fixed.
    pub fn resolve(&self, mut v: VarId) -> Option<VarId> {
        for _ in 0..=self.actions.len() {
            match self.actions[v.0] {
                VarAction::Keep => return Some(v),
                VarAction::Fix(_) => return None,
                VarAction::Alias(to) => v = to,
            }
        }
        Some(v)
    }

    fn binary(&mut self, name: String) -> VarId {
        self.actions.push(VarAction::Keep);
        self.model.add_binary(name)
    }

    fn continuous(&mut self, name: &str, lo: f64, hi: f64) -> VarId {
        self.actions.push(VarAction::Keep);
        self.model.add_var(name, VarKind::Continuous, lo, hi)
    }
}

/// Relative-coordinate window. Large enough to strictly contain every no-fit
/// polygon and every relative placement allowed by the containment bounds.
pub fn relative_window(instance: &ProblemInstance) -> (Interval, Interval) {
    let w = 2.0 * instance.l_ub;
    let h = 3.0 * instance.height;
    (Interval::new(-w, w), Interval::new(-h, h))
}

fn edge_terms(e: &NfpEdge, xi: VarId, xj: VarId, yi: VarId, yj: VarId, sign: f64) -> Vec<(VarId, f64)> {
    let cy = sign * (e.b.x - e.a.x);
    let cx = sign * (e.a.y - e.b.y);
    [(yj, cy), (yi, -cy), (xj, cx), (xi, -cx)]
        .into_iter()
        .filter(|t| t.1 != 0.0)
        .collect()
}

/// Builds one model variant. Fails with `InfeasibleInstance` when a piece is
/// taller than the board.
pub fn build_model(instance: &ProblemInstance, variant: ModelVariant, options: BuildOptions) -> Result<BuiltModel> {
    instance.check_fits()?;
    let n = instance.n_pieces();
    let (wx, wy) = relative_window(instance);
    let h = instance.height;
    let l_ub = instance.l_ub;
    let mut d = ModelDraft {
        instance,
        variant,
        model: MipModel::new(format!("{}_{}", instance.name, variant.slug())),
        registry: Registry {
            parts: Vec::new(),
            window_x: wx,
            window_y: wy,
            length: VarId(0),
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            pair_parts: BTreeMap::new(),
        },
        actions: Vec::new(),
    };
    d.registry.length = d.continuous("L", instance.l_lb, l_ub);
    d.model.objective.push((d.registry.length, 1.0));
    for i in 1..=n {
        let t = instance.piece_type(i);
        let x = d.continuous(&format!("x_{i}"), t.l_min, l_ub - t.l_max);
        let y = d.continuous(&format!("y_{i}"), t.h_min, h - t.h_max);
        d.registry.x.push(x);
        d.registry.y.push(y);
    }
    for i in 1..=n {
        let l_max = instance.piece_type(i).l_max;
        let (x, l) = (d.registry.x[i - 1], d.registry.length);
        d.model.add_constraint(format!("len_{i}"), vec![(x, 1.0), (l, -1.0)], Sense::Le, -l_max, ConstraintClass::Containment);
    }

    for i in 1..=n {
        for j in (i + 1)..=n {
            let (ti, tj) = (instance.piece_type(i), instance.piece_type(j));
            for f in 1..=ti.convex_parts.len() {
                for g in 1..=tj.convex_parts.len() {
                    let nfp = convex_nfp(&ti.relative_part(f), &tj.convex_parts[g - 1], tj.ref_point)?;
                    let mut part = classify_boundary_edges(&nfp)?;
                    part.i = i;
                    part.j = j;
                    part.f = f;
                    part.g = g;
                    add_part(&mut d, part, variant)?;
                }
            }
        }
    }

    let toggles = options.cuts;
    let mut report = BuildReport {
        n_parts: d.registry.parts.len(),
        ..Default::default()
    };
    let absorb = |report: &mut BuildReport, m: MutationReport| {
        report.warnings.extend(m.warnings);
    };

    let symmetry = toggles.symmetry && variant != ModelVariant::NfpCmNc;
    if symmetry {
        let m = cuts::add_symmetry_rows(&mut d, variant.y_symmetry());
        report.symmetry_rows = m.rows;
        absorb(&mut report, m);
    }
    if variant.is_vertical_slice() {
        if symmetry && (toggles.eliminations || toggles.identical_triples) {
            let m = cuts::apply_identical_piece_reductions(&mut d, toggles.eliminations, toggles.identical_triples);
            report.eliminated = m.fixed;
            report.identical_triples = m.rows;
            absorb(&mut report, m);
        }
        if toggles.merges {
            let m = cuts::merge_duplicate_side_vars(&mut d);
            report.merged = m.merged;
            absorb(&mut report, m);
        }
    }
    let relations = match variant {
        ModelVariant::NfpCm => (false, toggles.cliques),
        v if v.is_vertical_slice() => (toggles.subsumption, toggles.cliques),
        _ => (false, false),
    };
    if relations.0 || relations.1 {
        let m = cuts::pairwise_region_relation_cuts(&mut d, relations.0, relations.1);
        report.subsumption_rows = m.rows;
        report.clique_sets = m.sos;
        absorb(&mut report, m);
    }
    let mut triple = Vec::new();
    if variant.triple_cuts() && toggles.triple_cuts {
        let set = cuts::generate_triple_cuts(&d, options.triple_cut_cap);
        if set.truncated {
            report.warnings.push(format!(
                "triple cuts truncated to {} (cap {:?})",
                set.cuts.len(),
                options.triple_cut_cap
            ));
        }
        report.triple_cuts_truncated = set.truncated;
        for (k, cut) in set.cuts.iter().enumerate() {
            let terms = cut.vars.iter().map(|&v| (v, 1.0)).collect();
            d.model.add_user_cut(format!("UCUT_tc_{}", k + 1), terms, Sense::Le, cut.rhs, ConstraintClass::TripleCut);
        }
        report.triple_cuts = set.cuts.len();
        triple = set.cuts;
    }

    let ModelDraft { mut model, mut registry, actions, .. } = d;
    let map = model.substitute(&actions)?;
    let remap = |v: VarId| map[v.0].expect("continuous variables are never rewritten");
    registry.length = remap(registry.length);
    for v in registry.x.iter_mut().chain(registry.y.iter_mut()) {
        *v = remap(*v);
    }
    for entry in &mut registry.parts {
        for r in &mut entry.regions {
            r.var = r.var.and_then(|v| resolve_final(&actions, &map, v));
        }
    }
    for cut in &mut triple {
        for v in &mut cut.vars {
            *v = resolve_final(&actions, &map, *v).expect("cut variables are live");
        }
    }
    model.validate()?;
    Ok(BuiltModel {
        variant,
        model,
        registry,
        report,
        triple_cuts: triple,
    })
}

fn resolve_final(actions: &[VarAction], map: &[Option<VarId>], mut v: VarId) -> Option<VarId> {
    for _ in 0..=actions.len() {
        match actions[v.0] {
            VarAction::Keep => return map[v.0],
            VarAction::Fix(_) => return None,
            VarAction::Alias(to) => v = to,
        }
    }
    None
}

fn add_part(d: &mut ModelDraft<'_>, part: NfpPart, variant: ModelVariant) -> Result<()> {
    let inst = d.instance;
    let (h, l_ub) = (inst.height, inst.l_ub);
    let (wx, wy) = (d.registry.window_x, d.registry.window_y);
    let (i, j, f, g) = (part.i, part.j, part.f, part.g);
    let (pi, pj) = (inst.piece_type(i), inst.piece_type(j));
    let (xi, xj) = (d.registry.x[i - 1], d.registry.x[j - 1]);
    let (yi, yj) = (d.registry.y[i - 1], d.registry.y[j - 1]);
    let id = format!("{i}_{j}_{f}_{g}");

    let regions = if variant.is_vertical_slice() {
        build_subregions(&part, wx, wy)?
    } else {
        build_edge_regions(&part, wx, wy)?
    };
    let mut entries = Vec::with_capacity(regions.len());
    for r in regions {
        let var = d.binary(format!("v_{id}_{}", r.kind.tag()));
        entries.push(RegionEntry { region: r, var: Some(var) });
    }
    let var_of = |kind: RegionKind| entries.iter().find(|e| e.region.kind == kind).and_then(|e| e.var).expect("region variable");

    let selection = entries.iter().map(|e| (e.var.expect("fresh"), 1.0)).collect();
    d.model.add_constraint(format!("sel_{id}"), selection, Sense::Eq, 1.0, ConstraintClass::Selection);

    let edge_row = |d: &mut ModelDraft<'_>, k: usize, e: &NfpEdge, v: VarId| {
        let c = e.constant();
        let m = libm::fabs(e.b.x - e.a.x) * h + libm::fabs(e.a.y - e.b.y) * l_ub + c;
        let mut terms = edge_terms(e, xi, xj, yi, yj, 1.0);
        terms.push((v, m));
        d.model.add_constraint(format!("e_{id}_{k}"), terms, Sense::Le, m - c, ConstraintClass::Edge);
    };

    if !variant.is_vertical_slice() {
        let ne = part.edges.len();
        for (k0, e) in part.edges.iter().enumerate() {
            let v = var_of(RegionKind::Edge(k0 + 1));
            edge_row(d, k0 + 1, e, v);
            if variant == ModelVariant::ImprovedNfpCm {
                // stay on the inner side of the previous edge's supporting line
                let p = &part.edges[(k0 + ne - 1) % ne];
                let c = p.constant();
                let m = libm::fabs(p.b.x - p.a.x) * h + libm::fabs(p.a.y - p.b.y) * l_ub - c;
                let mut terms = edge_terms(p, xi, xj, yi, yj, -1.0);
                terms.push((v, m));
                d.model.add_constraint(format!("p_{id}_{}", k0 + 1), terms, Sense::Le, m + c, ConstraintClass::PrevEdge);
            }
        }
    } else {
        // x_j − x_i ranges over [lo_rel, hi_rel] inside the containment box.
        let hi_rel = l_ub - pj.l_max - pi.l_min;
        let lo_rel = pj.l_min - (l_ub - pi.l_max);
        let dx = |s: f64| vec![(xj, s), (xi, -s)];
        let (vl, vr) = (var_of(RegionKind::Left), var_of(RegionKind::Right));
        for (k0, e) in part.edges.iter().enumerate() {
            let k = k0 + 1;
            let (v, lo_x, hi_x) = match e.class {
                EdgeClass::Top => (var_of(RegionKind::Top(k)), e.b.x, e.a.x),
                EdgeClass::Bottom => (var_of(RegionKind::Bottom(k)), e.a.x, e.b.x),
                EdgeClass::Side => continue,
            };
            edge_row(d, k, e, v);
            if variant != ModelVariant::NfpCmVs2 {
                // lo_x ≤ x_j − x_i ≤ hi_x when selected
                let m1 = lo_x - lo_rel;
                let mut t = dx(-1.0);
                t.push((v, m1));
                d.model.add_constraint(format!("s1_{id}_{k}"), t, Sense::Le, m1 - lo_x, ConstraintClass::Slice);
                let m2 = hi_rel - hi_x;
                let mut t = dx(1.0);
                t.push((v, m2));
                d.model.add_constraint(format!("s2_{id}_{k}"), t, Sense::Le, m2 + hi_x, ConstraintClass::Slice);
            }
        }
        if variant == ModelVariant::NfpCmVs2 {
            let mut lower = dx(1.0);
            lower.push((vl, -lo_rel));
            lower.push((vr, -part.x_max));
            let mut upper = dx(1.0);
            upper.push((vl, -part.x_min));
            upper.push((vr, -hi_rel));
            for (k0, e) in part.edges.iter().enumerate() {
                let k = k0 + 1;
                match e.class {
                    EdgeClass::Top => {
                        let v = var_of(RegionKind::Top(k));
                        lower.push((v, -e.b.x));
                        upper.push((v, -e.a.x));
                    }
                    EdgeClass::Bottom => {
                        let v = var_of(RegionKind::Bottom(k));
                        lower.push((v, -e.a.x));
                        upper.push((v, -e.b.x));
                    }
                    EdgeClass::Side => {}
                }
            }
            let lower = lower.into_iter().filter(|t| t.1 != 0.0).collect();
            let upper = upper.into_iter().filter(|t| t.1 != 0.0).collect();
            d.model.add_constraint(format!("vs2a_{id}"), lower, Sense::Ge, 0.0, ConstraintClass::SliceVs2);
            d.model.add_constraint(format!("vs2b_{id}"), upper, Sense::Le, 0.0, ConstraintClass::SliceVs2);
        } else {
            let ml = hi_rel - part.x_min;
            let mut t = dx(1.0);
            t.push((vl, ml));
            d.model.add_constraint(format!("sl_{id}"), t, Sense::Le, ml + part.x_min, ConstraintClass::Slice);
            let mr = lo_rel - part.x_max;
            let mut t = dx(1.0);
            t.push((vr, mr));
            d.model.add_constraint(format!("sr_{id}"), t, Sense::Ge, mr + part.x_max, ConstraintClass::Slice);
        }
    }

    let index = d.registry.parts.len();
    d.registry.pair_parts.entry((i, j)).or_default().push(index);
    d.registry.parts.push(PartEntry { part, regions: entries });
    Ok(())
}
