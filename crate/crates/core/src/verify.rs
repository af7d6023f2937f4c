//! Geometric check of a placement, independent of any model.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry::{separation, Point};
use crate::instance::ProblemInstance;
use crate::solution::Placement;

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    /// Part of a piece lies outside `[0, L] × [0, H]`.
    Containment { piece: usize },
    /// Two convex parts of different pieces overlap.
    Overlap { i: usize, j: usize, f: usize, g: usize },
    /// Rightmost point of the pieces exceeds the reported length.
    Length,
    /// Placement does not have one position per piece.
    Shape,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Penetration depth, protrusion or excess length.
    pub amount: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    /// `max_i (x_i + l_i^max)`.
    pub recomputed_length: f64,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_clean() {
            return "ok".into();
        }
        let mut parts = Vec::new();
        for v in &self.violations {
            parts.push(match &v.kind {
                ViolationKind::Containment { piece } => format!("piece {piece} outside board by {}", v.amount),
                ViolationKind::Overlap { i, j, f, g } => format!("pieces {i}/{j} parts {f}/{g} overlap by {}", v.amount),
                ViolationKind::Length => format!("length exceeded by {}", v.amount),
                ViolationKind::Shape => "placement size mismatch".into(),
            });
        }
        parts.join("; ")
    }
}

/// Checks containment in the board of length `L + tol`, pairwise overlap of
/// convex parts (penetration deeper than `2·tol`, i.e. after shrinking each
/// part by `tol`) and the recomputed strip length.
pub fn verify_placement(instance: &ProblemInstance, placement: &Placement, tol: f64) -> VerificationReport {
    let n = instance.n_pieces();
    let mut report = VerificationReport::default();
    if placement.positions.len() != n {
        report.violations.push(Violation { kind: ViolationKind::Shape, amount: 0.0 });
        return report;
    }
    let (h, l) = (instance.height, placement.length);
    let placed: Vec<Vec<crate::geometry::Polygon>> = (1..=n)
        .map(|i| {
            let t = instance.piece_type(i);
            let shift = placement.positions[i - 1] - t.ref_point;
            t.convex_parts.iter().map(|p| p.polygon.translate(shift)).collect()
        })
        .collect();
    let mut right_edge = f64::NEG_INFINITY;
    for i in 1..=n {
        let t = instance.piece_type(i);
        let pos: Point = placement.positions[i - 1];
        right_edge = right_edge.max(pos.x + t.l_max);
        let mut out: f64 = 0.0;
        for part in &placed[i - 1] {
            for v in part.vertices() {
                out = out.max(-v.x).max(v.x - l).max(-v.y).max(v.y - h);
            }
        }
        if out > tol {
            report.violations.push(Violation { kind: ViolationKind::Containment { piece: i }, amount: out });
        }
    }
    report.recomputed_length = right_edge;
    if right_edge > l + tol {
        report.violations.push(Violation { kind: ViolationKind::Length, amount: right_edge - l });
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            for (f, a) in placed[i - 1].iter().enumerate() {
                for (g, b) in placed[j - 1].iter().enumerate() {
                    let depth = -separation(a, b);
                    if depth > 2.0 * tol {
                        report.violations.push(Violation {
                            kind: ViolationKind::Overlap { i, j, f: f + 1, g: g + 1 },
                            amount: depth,
                        });
                    }
                }
            }
        }
    }
    report
}
