//! Valid inequalities, symmetry breaking, variable eliminations and merges,
//! region-relation cuts and triple-piece feasibility cuts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::builder::{ModelDraft, Registry};
use crate::geometry::{separation, Interval, EPS_GEOM};
use crate::mip::{ConstraintClass, Sense, Sos1, VarAction, VarId};
use crate::slices::{EdgeClass, FeasibleSubRegion, RegionKind};

/// What a reduction step changed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MutationReport {
    pub rows: usize,
    pub fixed: usize,
    pub merged: usize,
    pub sos: usize,
    pub warnings: Vec<String>,
}

/// `y_i ≤ y_j` (or `x_i ≤ x_j`) for each piece and the next piece of its type.
pub fn add_symmetry_rows(d: &mut ModelDraft<'_>, y_axis: bool) -> MutationReport {
    let pieces = &d.instance.pieces;
    let mut report = MutationReport::default();
    for (a, p) in pieces.iter().enumerate() {
        let Some(q) = pieces[a + 1..].iter().find(|q| q.type_id == p.type_id) else { continue };
        let (i, j) = (p.index, q.index);
        let vars = if y_axis { &d.registry.y } else { &d.registry.x };
        let terms = alloc::vec![(vars[i - 1], 1.0), (vars[j - 1], -1.0)];
        let axis = if y_axis { 'y' } else { 'x' };
        d.model.add_constraint(format!("sym{axis}_{i}_{j}"), terms, Sense::Le, 0.0, ConstraintClass::Symmetry);
        report.rows += 1;
    }
    report
}

/// Under `y_i ≤ y_j` for same-type pieces: fixes bottom slices lying below
/// the reference point to zero, and adds the identical-piece inequality
/// `Σ_top v_ij + Σ_bottom v_iu ≤ 1` for `t_j = t_u`.
///
/// The inequality needs every selected top slice of `(i, j)` to lie strictly
/// above every selected bottom slice of `(i, u)`; it is only emitted when
/// the edge heights guarantee this.
pub fn apply_identical_piece_reductions(d: &mut ModelDraft<'_>, eliminations: bool, triples: bool) -> MutationReport {
    let mut report = MutationReport::default();
    let inst = d.instance;
    if eliminations {
        for entry in &d.registry.parts {
            let p = &entry.part;
            if inst.piece_type(p.i).type_id != inst.piece_type(p.j).type_id {
                continue;
            }
            for r in &entry.regions {
                let RegionKind::Bottom(k) = r.region.kind else { continue };
                let e = &p.edges[k - 1];
                if e.a.y < -EPS_GEOM && e.b.y < -EPS_GEOM {
                    if let Some(v) = r.var {
                        if d.actions[v.0] == VarAction::Keep {
                            d.actions[v.0] = VarAction::Fix(0.0);
                            report.fixed += 1;
                        }
                    }
                }
            }
        }
    }
    if triples {
        let n = inst.n_pieces();
        let mut rows = Vec::new();
        let mut skipped = 0;
        for i in 1..=n {
            for j in (i + 1)..=n {
                for u in (j + 1)..=n {
                    if inst.piece_type(j).type_id != inst.piece_type(u).type_id {
                        continue;
                    }
                    for &pij in d.registry.parts_of(i, j) {
                        for &piu in d.registry.parts_of(i, u) {
                            let (eij, eiu) = (&d.registry.parts[pij], &d.registry.parts[piu]);
                            if eij.part.f != eiu.part.f {
                                continue;
                            }
                            let live = |kind: EdgeClass, e: &crate::builder::PartEntry| -> Vec<(VarId, f64, f64)> {
                                e.regions
                                    .iter()
                                    .filter_map(|r| {
                                        let k = match (kind, r.region.kind) {
                                            (EdgeClass::Top, RegionKind::Top(k)) | (EdgeClass::Bottom, RegionKind::Bottom(k)) => k,
                                            _ => return None,
                                        };
                                        let edge = &e.part.edges[k - 1];
                                        let v = d.resolve(r.var?)?;
                                        Some((v, edge.a.y.min(edge.b.y), edge.a.y.max(edge.b.y)))
                                    })
                                    .collect()
                            };
                            let tops = live(EdgeClass::Top, eij);
                            let bottoms = live(EdgeClass::Bottom, eiu);
                            if tops.is_empty() || bottoms.is_empty() {
                                continue;
                            }
                            let top_floor = tops.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
                            let bottom_ceiling = bottoms.iter().map(|b| b.2).fold(f64::NEG_INFINITY, f64::max);
                            if top_floor <= bottom_ceiling + EPS_GEOM {
                                skipped += 1;
                                continue;
                            }
                            let mut terms: Vec<(VarId, f64)> = tops.iter().chain(&bottoms).map(|t| (t.0, 1.0)).collect();
                            terms.dedup();
                            let (f, g, h) = (eij.part.f, eij.part.g, eiu.part.g);
                            rows.push((format!("idt_{i}_{j}_{u}_{f}_{g}_{h}"), terms));
                        }
                    }
                }
            }
        }
        for (name, terms) in rows {
            d.model.add_constraint(name, terms, Sense::Le, 1.0, ConstraintClass::IdenticalTriple);
            report.rows += 1;
        }
        if skipped > 0 {
            report.warnings.push(format!(
                "{skipped} identical-piece inequalities skipped: top slices not strictly above bottom slices"
            ));
        }
    }
    report
}

/// Replaces Left (Right) variables of NFP parts of one piece pair that share
/// `x_min` (`x_max`) by the variable of the lowest `(f, g)` part.
pub fn merge_duplicate_side_vars(d: &mut ModelDraft<'_>) -> MutationReport {
    let mut report = MutationReport::default();
    let pairs: Vec<(usize, usize)> = d.registry.pairs().collect();
    for (i, j) in pairs {
        let parts = d.registry.parts_of(i, j).to_vec();
        for kind in [RegionKind::Left, RegionKind::Right] {
            let mut reps: Vec<(f64, VarId)> = Vec::new();
            for &p in &parts {
                let entry = &d.registry.parts[p];
                let x = if kind == RegionKind::Left { entry.part.x_min } else { entry.part.x_max };
                let Some(v) = entry.region(kind).and_then(|r| r.var) else { continue };
                match reps.iter().find(|(rx, _)| libm::fabs(rx - x) <= EPS_GEOM) {
                    Some(&(_, rep)) => {
                        if d.resolve(v) != d.resolve(rep) {
                            d.actions[v.0] = VarAction::Alias(rep);
                            report.merged += 1;
                        }
                    }
                    None => reps.push((x, v)),
                }
            }
        }
    }
    report
}

/// Relation between two regions of different NFP parts of one piece pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionRelation {
    Identical,
    /// The first region contains the second.
    Contains,
    /// The first region lies inside the second.
    ContainedIn,
    Disjoint,
    Overlapping,
}

/// Compares clip polygons. Disjoint means the closed regions are separated
/// by more than the tolerance, so no placement can lie in both.
pub fn region_relation(a: &FeasibleSubRegion, b: &FeasibleSubRegion) -> RegionRelation {
    let (pa, pb) = (&a.clip_polygon, &b.clip_polygon);
    let a_in_b = pb.contains_polygon_convex(pa, EPS_GEOM);
    let b_in_a = pa.contains_polygon_convex(pb, EPS_GEOM);
    match (a_in_b, b_in_a) {
        (true, true) => RegionRelation::Identical,
        (true, false) => RegionRelation::ContainedIn,
        (false, true) => RegionRelation::Contains,
        _ if separation(pa, pb) > EPS_GEOM => RegionRelation::Disjoint,
        _ => RegionRelation::Overlapping,
    }
}

/// Greedy edge clique cover: take the lexicographically smallest uncovered
/// edge, grow it with every vertex (in ascending order) adjacent to all
/// members, mark the clique's edges covered, repeat.
pub fn edge_clique_cover<T: Ord + Copy>(edges: &[(T, T)]) -> Vec<Vec<T>> {
    let mut adj: BTreeMap<T, BTreeSet<T>> = BTreeMap::new();
    let mut uncovered: BTreeSet<(T, T)> = BTreeSet::new();
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
        uncovered.insert((a, b));
    }
    let mut cliques = Vec::new();
    while let Some(&(a, b)) = uncovered.iter().next() {
        let mut clique = alloc::vec![a, b];
        for &w in adj.keys() {
            if w != a && w != b && clique.iter().all(|c| adj[c].contains(&w)) {
                clique.push(w);
            }
        }
        clique.sort();
        for x in 0..clique.len() {
            for y in (x + 1)..clique.len() {
                uncovered.remove(&(clique[x], clique[y]));
            }
        }
        cliques.push(clique);
    }
    cliques
}

/// Subsumption rows `Σ v_a ≤ v_b` (regions `a` of one part inside region `b`
/// of another) and SOS-1 sets from a clique cover of the disjoint pairs.
pub fn pairwise_region_relation_cuts(d: &mut ModelDraft<'_>, subsumption: bool, cliques: bool) -> MutationReport {
    let mut report = MutationReport::default();
    let pairs: Vec<(usize, usize)> = d.registry.pairs().collect();
    for (i, j) in pairs {
        let parts = d.registry.parts_of(i, j).to_vec();
        if parts.len() < 2 {
            continue;
        }
        let mut conflicts: Vec<(VarId, VarId)> = Vec::new();
        // (b's part, b's region, a's part) → a variables
        let mut inside: BTreeMap<(usize, usize, usize), Vec<VarId>> = BTreeMap::new();
        for (x, &p) in parts.iter().enumerate() {
            for &q in &parts[x + 1..] {
                let (ep, eq) = (&d.registry.parts[p], &d.registry.parts[q]);
                for (ra, a) in ep.regions.iter().enumerate() {
                    let Some(va) = a.var.and_then(|v| d.resolve(v)) else { continue };
                    for (rb, b) in eq.regions.iter().enumerate() {
                        let Some(vb) = b.var.and_then(|v| d.resolve(v)) else { continue };
                        if va == vb {
                            continue;
                        }
                        match region_relation(&a.region, &b.region) {
                            RegionRelation::Disjoint => conflicts.push((va, vb)),
                            RegionRelation::ContainedIn => inside.entry((q, rb, p)).or_default().push(va),
                            RegionRelation::Contains => inside.entry((p, ra, q)).or_default().push(vb),
                            RegionRelation::Identical => {
                                inside.entry((q, rb, p)).or_default().push(va);
                                inside.entry((p, ra, q)).or_default().push(vb);
                            }
                            RegionRelation::Overlapping => {}
                        }
                    }
                }
            }
        }
        if subsumption {
            for ((bp, br, ap), mut vars) in inside {
                let vb = d.resolve(d.registry.parts[bp].regions[br].var.expect("live")).expect("live");
                vars.sort();
                vars.dedup();
                let mut terms: Vec<(VarId, f64)> = vars.into_iter().map(|v| (v, 1.0)).collect();
                terms.push((vb, -1.0));
                let (pa, pb) = (&d.registry.parts[ap].part, &d.registry.parts[bp].part);
                let tag = d.registry.parts[bp].regions[br].region.kind.tag();
                let name = format!("sub_{i}_{j}_{}_{}_{}_{}_{tag}", pa.f, pa.g, pb.f, pb.g);
                d.model.add_constraint(name, terms, Sense::Le, 0.0, ConstraintClass::Subsumption);
                report.rows += 1;
            }
        }
        if cliques && !conflicts.is_empty() {
            for (k, members) in edge_clique_cover(&conflicts).into_iter().enumerate() {
                d.model.sos1.push(Sos1 {
                    name: format!("clq_{i}_{j}_{}", k + 1),
                    members,
                });
                report.sos += 1;
            }
        }
    }
    report
}

/// Horizontal-only infeasibility test for three relative placements:
/// `(x_ij + x_ju) ∩ x_iu = ∅`.
pub fn is_unfeasible_triple(r_ij: &FeasibleSubRegion, r_iu: &FeasibleSubRegion, r_ju: &FeasibleSubRegion) -> bool {
    spans_unfeasible(r_ij.x_span, r_iu.x_span, r_ju.x_span)
}

/// Interval form of [`is_unfeasible_triple`]; crossing by at most the
/// geometric tolerance still counts as intersecting.
pub fn spans_unfeasible(x_ij: Interval, x_iu: Interval, x_ju: Interval) -> bool {
    let z = x_ij.sum(&x_ju).intersect(&x_iu);
    z.is_empty_within(EPS_GEOM)
}

/// `v_ij + v_iu + Σ v_ju ≤ 2` over the `(j, u)` regions excluded by the
/// placements selected for `(i, j)` and `(i, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleCut {
    pub i: usize,
    pub j: usize,
    pub u: usize,
    pub f: usize,
    pub g: usize,
    pub h: usize,
    pub k_ij: RegionKind,
    pub k_iu: RegionKind,
    pub k_ju: Vec<RegionKind>,
    pub x_ij: Interval,
    pub x_iu: Interval,
    pub x_ju: Vec<Interval>,
    /// `v_ij`, `v_iu`, then the excluded `v_ju` variables.
    pub vars: Vec<VarId>,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TripleCutSet {
    pub cuts: Vec<TripleCut>,
    pub truncated: bool,
}

/// Enumerates triple cuts in `(i, j, u, f, g, h, k, k′)` order over the
/// regions of a draft. Duplicate variable sets are emitted once.
pub fn generate_triple_cuts(d: &ModelDraft<'_>, cap: Option<usize>) -> TripleCutSet {
    triple_cuts_with(&d.registry, |v| d.resolve(v), cap)
}

/// Same as [`generate_triple_cuts`] on a finished registry.
pub fn triple_cuts_for(registry: &Registry, cap: Option<usize>) -> TripleCutSet {
    triple_cuts_with(registry, Some, cap)
}

fn triple_cuts_with(registry: &Registry, resolve: impl Fn(VarId) -> Option<VarId>, cap: Option<usize>) -> TripleCutSet {
    let n = registry.x.len();
    let mut out = TripleCutSet::default();
    let mut seen: BTreeSet<Vec<VarId>> = BTreeSet::new();
    let live = |v: Option<VarId>| v.and_then(&resolve);
    for i in 1..=n {
        for j in (i + 1)..=n {
            for u in (j + 1)..=n {
                for &pij in registry.parts_of(i, j) {
                    let eij = &registry.parts[pij];
                    for &piu in registry.parts_of(i, u) {
                        let eiu = &registry.parts[piu];
                        if eiu.part.f != eij.part.f {
                            continue;
                        }
                        let (f, g, h) = (eij.part.f, eij.part.g, eiu.part.g);
                        let Some(eju) = registry.part(j, u, g, h) else { continue };
                        for rij in &eij.regions {
                            let Some(vij) = live(rij.var) else { continue };
                            for riu in &eiu.regions {
                                let Some(viu) = live(riu.var) else { continue };
                                let mut k_ju = Vec::new();
                                let mut x_ju = Vec::new();
                                let mut vars = alloc::vec![vij, viu];
                                for rju in &eju.regions {
                                    let Some(vju) = live(rju.var) else { continue };
                                    if is_unfeasible_triple(&rij.region, &riu.region, &rju.region) && !vars.contains(&vju) {
                                        k_ju.push(rju.region.kind);
                                        x_ju.push(rju.region.x_span);
                                        vars.push(vju);
                                    }
                                }
                                if k_ju.is_empty() {
                                    continue;
                                }
                                let mut key = vars.clone();
                                key.sort();
                                if !seen.insert(key) {
                                    continue;
                                }
                                if cap.is_some_and(|c| out.cuts.len() >= c) {
                                    out.truncated = true;
                                    return out;
                                }
                                out.cuts.push(TripleCut {
                                    i,
                                    j,
                                    u,
                                    f,
                                    g,
                                    h,
                                    k_ij: rij.region.kind,
                                    k_iu: riu.region.kind,
                                    k_ju,
                                    x_ij: rij.region.x_span,
                                    x_iu: riu.region.x_span,
                                    x_ju,
                                    vars,
                                    rhs: 2.0,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use alloc::vec;

    fn region(kind: RegionKind, x0: f64, y0: f64, x1: f64, y1: f64) -> FeasibleSubRegion {
        FeasibleSubRegion {
            kind,
            clip_polygon: Polygon::rectangle(x0, y0, x1, y1).unwrap(),
            x_span: Interval::new(x0, x1),
        }
    }

    fn span(lo: f64, hi: f64) -> FeasibleSubRegion {
        region(RegionKind::Left, lo, 0.0, hi.max(lo + 1e-3), 1.0).with_span(lo, hi)
    }

    trait WithSpan {
        fn with_span(self, lo: f64, hi: f64) -> Self;
    }

    impl WithSpan for FeasibleSubRegion {
        fn with_span(mut self, lo: f64, hi: f64) -> Self {
            self.x_span = Interval::new(lo, hi);
            self
        }
    }

    #[test]
    fn unfeasible_triple_examples() {
        assert!(is_unfeasible_triple(&span(2.0, 4.0), &span(7.0, 8.0), &span(1.0, 2.0)));
        assert!(!is_unfeasible_triple(&span(2.0, 4.0), &span(5.0, 7.0), &span(1.0, 2.0)));
        assert!(!is_unfeasible_triple(&span(0.0, 0.0), &span(1.0, 1.0), &span(1.0, 1.0)));
    }

    #[test]
    fn unfeasible_triple_is_sound_on_a_grid() {
        // If the test says infeasible, no r_j − r_i in x_ij combined with
        // r_u − r_j in x_ju lands in x_iu.
        let cases = [
            ((2.0, 4.0), (7.0, 8.0), (1.0, 2.0)),
            ((-3.0, -1.0), (0.5, 1.0), (-1.0, 1.0)),
            ((0.0, 1.0), (5.0, 6.0), (0.0, 3.9)),
        ];
        for ((a, b), (c, e), (p, q)) in cases {
            let (xij, xiu, xju) = (Interval::new(a, b), Interval::new(c, e), Interval::new(p, q));
            if !spans_unfeasible(xij, xiu, xju) {
                continue;
            }
            for s in 0..=200 {
                let dij = a + (b - a) * s as f64 / 200.0;
                for t in 0..=200 {
                    let dju = p + (q - p) * t as f64 / 200.0;
                    assert!(!xiu.contains(dij + dju, 0.0));
                }
            }
        }
    }

    #[test]
    fn region_relations() {
        let big = region(RegionKind::Bottom(1), 0.0, -10.0, 4.0, -1.0);
        let small = region(RegionKind::Bottom(2), 1.0, -10.0, 2.0, -3.0);
        let far = region(RegionKind::Top(3), 0.0, 2.0, 4.0, 10.0);
        let touching = region(RegionKind::Top(4), 0.0, -1.0, 4.0, 5.0);
        assert_eq!(region_relation(&small, &big), RegionRelation::ContainedIn);
        assert_eq!(region_relation(&big, &small), RegionRelation::Contains);
        assert_eq!(region_relation(&big, &far), RegionRelation::Disjoint);
        assert_eq!(region_relation(&big, &touching), RegionRelation::Overlapping);
        assert_eq!(region_relation(&big, &big.clone()), RegionRelation::Identical);
    }

    #[test]
    fn clique_cover_single_edge_and_triangle() {
        assert_eq!(edge_clique_cover(&[(3, 1)]), vec![vec![1, 3]]);
        let tri = edge_clique_cover(&[(1, 2), (2, 3), (1, 3), (3, 4)]);
        assert_eq!(tri, vec![vec![1, 2, 3], vec![3, 4]]);
        assert!(edge_clique_cover::<u32>(&[]).is_empty());
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn clique_cover_is_sound_and_complete(
                raw in proptest::collection::vec((0u8..10, 0u8..10), 0..40)
            ) {
                let edges: Vec<(u8, u8)> = raw.into_iter().filter(|(a, b)| a != b).collect();
                let set: BTreeSet<(u8, u8)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                let cover = edge_clique_cover(&edges);
                for c in &cover {
                    for x in 0..c.len() {
                        for y in (x + 1)..c.len() {
                            prop_assert!(set.contains(&(c[x].min(c[y]), c[x].max(c[y]))));
                        }
                    }
                }
                for &(a, b) in &set {
                    prop_assert!(cover.iter().any(|c| c.contains(&a) && c.contains(&b)));
                }
            }
        }
    }
}
