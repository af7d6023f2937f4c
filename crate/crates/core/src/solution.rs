//! Solver outcomes and piece placements.

use alloc::vec::Vec;

use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
    NoSolution,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::NoSolution => "no_solution",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.trim().to_ascii_lowercase().as_str() {
            "optimal" => SolveStatus::Optimal,
            "feasible" => SolveStatus::Feasible,
            "infeasible" => SolveStatus::Infeasible,
            "time_limit" | "timelimit" => SolveStatus::TimeLimit,
            "no_solution" | "nosolution" | "unknown" => SolveStatus::NoSolution,
            _ => return None,
        })
    }

    /// True when a placement comes with the result.
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

/// Reference-point coordinates of every piece (in piece order) and the strip
/// length they use.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Placement {
    pub positions: Vec<Point>,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveResult {
    pub status: SolveStatus,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub nodes: u64,
    pub simplex_iterations: u64,
    pub wall_time_s: f64,
    /// False when the backend did not report node or iteration counts and
    /// the zeros above are placeholders.
    pub counts_reported: bool,
    pub placement: Option<Placement>,
}

impl SolveResult {
    pub fn without_solution(status: SolveStatus, lower_bound: f64, wall_time_s: f64) -> Self {
        SolveResult {
            status,
            lower_bound,
            upper_bound: f64::INFINITY,
            nodes: 0,
            simplex_iterations: 0,
            wall_time_s,
            counts_reported: false,
            placement: None,
        }
    }

    /// `(UB − LB) / UB`, clamped to `[0, 1]`; `None` without a finite,
    /// positive upper bound.
    pub fn gap(&self) -> Option<f64> {
        if !self.upper_bound.is_finite() || self.upper_bound <= 0.0 || !self.lower_bound.is_finite() {
            return None;
        }
        Some(((self.upper_bound - self.lower_bound) / self.upper_bound).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_definition() {
        let mut r = SolveResult::without_solution(SolveStatus::Feasible, 5.0, 1.0);
        assert_eq!(r.gap(), None);
        r.upper_bound = 6.0;
        assert!((r.gap().unwrap() - 1.0 / 6.0).abs() < 1e-15);
        r.lower_bound = 7.0;
        assert_eq!(r.gap(), Some(0.0));
    }

    #[test]
    fn status_strings_round_trip() {
        for s in [
            SolveStatus::Optimal,
            SolveStatus::Feasible,
            SolveStatus::Infeasible,
            SolveStatus::TimeLimit,
            SolveStatus::NoSolution,
        ] {
            assert_eq!(SolveStatus::parse(s.as_str()), Some(s));
        }
        assert_eq!(SolveStatus::parse("bogus"), None);
    }
}
