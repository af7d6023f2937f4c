//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for the residual problems of the enumerator (a handful of columns
//! and at most a few hundred rows). Variables must have finite lower bounds;
//! upper bounds become explicit rows so that their duals are reported too.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min cost·x` subject to `rows` and `lower ≤ x ≤ upper`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Primal point plus dual multipliers. Duals follow the Lagrangian
/// `cost·x − Σ y_r (a_r·x − b_r)`: non-positive on `≤` rows, non-negative on
/// `≥` rows. `upper_duals` belong to the implicit `x ≤ upper` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub row_duals: Vec<f64>,
    pub upper_duals: Vec<f64>,
    pub iterations: usize,
}

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Runs Bland's rule on the current objective row. Columns flagged in
    /// `barred` never enter.
    fn optimize(&mut self, barred: &[bool]) -> LpStatus {
        let rhs = self.width;
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return LpStatus::IterationLimit;
            }
            let Some(c) = (0..self.width).find(|&j| !barred[j] && self.obj[j] < -COST_EPS) else {
                return LpStatus::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > PIVOT_EPS {
                    let ratio = row[rhs] / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-12
                                || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return LpStatus::Unbounded,
            }
        }
    }
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            cost: vec![0.0; n],
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Model("bound vectors do not match cost length".into()));
        }
        if let Some(k) = (0..n).find(|&k| !self.lower[k].is_finite()) {
            return Err(Error::Model(format!("variable {k} has no finite lower bound")));
        }
        for row in &self.rows {
            if let Some(&(k, _)) = row.terms.iter().find(|(k, _)| *k >= n) {
                return Err(Error::Model(format!("row references unknown column {k}")));
            }
        }
        if (0..n).any(|k| self.upper[k] < self.lower[k] - PIVOT_EPS) {
            return Ok(self.infeasible(0));
        }

        // Shifted rows over z = x − lower, followed by the upper-bound rows.
        let mut dense: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
        for row in &self.rows {
            let mut a = vec![0.0; n];
            let mut b = row.rhs;
            for &(k, c) in &row.terms {
                a[k] += c;
                b -= c * self.lower[k];
            }
            dense.push((a, row.sense, b));
        }
        let mut upper_rows = Vec::new();
        for k in 0..n {
            if self.upper[k].is_finite() {
                let mut a = vec![0.0; n];
                a[k] = 1.0;
                upper_rows.push((k, dense.len()));
                dense.push((a, Sense::Le, self.upper[k] - self.lower[k]));
            }
        }
        let m = dense.len();

        let mut negated = vec![false; m];
        for (r, (a, sense, b)) in dense.iter_mut().enumerate() {
            if *b < 0.0 {
                negated[r] = true;
                *b = -*b;
                for v in a.iter_mut() {
                    *v = -*v;
                }
                *sense = match *sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }

        // Column layout: structural, one surplus per ≥ row, one unit column
        // per row (slack for ≤, artificial otherwise).
        let n_surplus = dense.iter().filter(|r| r.1 == Sense::Ge).count();
        let unit0 = n + n_surplus;
        let width = unit0 + m;
        let mut artificial = vec![false; width];
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut s = n;
        for (r, (a, sense, b)) in dense.iter().enumerate() {
            let mut row = vec![0.0; width + 1];
            row[..n].copy_from_slice(a);
            if *sense == Sense::Ge {
                row[s] = -1.0;
                s += 1;
            }
            row[unit0 + r] = 1.0;
            artificial[unit0 + r] = *sense != Sense::Le;
            row[width] = *b;
            rows.push(row);
            basis.push(unit0 + r);
        }

        let mut obj = vec![0.0; width + 1];
        for (r, row) in rows.iter().enumerate() {
            if artificial[basis[r]] {
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= v;
                }
            }
        }
        for j in 0..width {
            if artificial[j] {
                obj[j] = 0.0;
            }
        }
        let mut t = Tableau {
            rows,
            obj,
            basis,
            width,
            iterations: 0,
        };
        let no_bar = vec![false; width];
        match t.optimize(&no_bar) {
            LpStatus::Optimal => {}
            LpStatus::IterationLimit => return Ok(self.status_only(LpStatus::IterationLimit, t.iterations)),
            // phase one is bounded below by zero
            _ => return Err(Error::Model("phase one reported unbounded".into())),
        }
        let scale = 1.0 + t.rows.iter().map(|r| libm::fabs(r[width])).fold(0.0, f64::max);
        if -t.obj[width] > 1e-7 * scale {
            return Ok(self.infeasible(t.iterations));
        }

        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if artificial[t.basis[r]] {
                if let Some(c) = (0..unit0).find(|&j| libm::fabs(t.rows[r][j]) > PIVOT_EPS) {
                    t.pivot(r, c);
                }
            }
        }

        let mut obj = vec![0.0; width + 1];
        obj[..n].copy_from_slice(&self.cost);
        for r in 0..m {
            let cb = if t.basis[r] < n { self.cost[t.basis[r]] } else { 0.0 };
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&t.rows[r]) {
                    *o -= cb * v;
                }
            }
        }
        t.obj = obj;
        let status = t.optimize(&artificial);
        if status != LpStatus::Optimal {
            return Ok(self.status_only(status, t.iterations));
        }

        let mut z = vec![0.0; width];
        for (r, &b) in t.basis.iter().enumerate() {
            z[b] = t.rows[r][width];
        }
        let x: Vec<f64> = (0..n).map(|k| self.lower[k] + z[k]).collect();
        let objective = (0..n).map(|k| self.cost[k] * x[k]).sum();
        let dual = |r: usize| {
            let y = -t.obj[unit0 + r];
            if negated[r] {
                -y
            } else {
                y
            }
        };
        let row_duals = (0..self.rows.len()).map(dual).collect();
        let mut upper_duals = vec![0.0; n];
        for &(k, r) in &upper_rows {
            upper_duals[k] = dual(r);
        }
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            row_duals,
            upper_duals,
            iterations: t.iterations,
        })
    }

    fn infeasible(&self, iterations: usize) -> LpSolution {
        self.status_only(LpStatus::Infeasible, iterations)
    }

    fn status_only(&self, status: LpStatus, iterations: usize) -> LpSolution {
        let objective = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        LpSolution {
            status,
            x: Vec::new(),
            objective,
            row_duals: Vec::new(),
            upper_duals: Vec::new(),
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(terms: &[(usize, f64)], sense: Sense, rhs: f64) -> LpRow {
        LpRow {
            terms: terms.to_vec(),
            sense,
            rhs,
        }
    }

    /// Checks primal feasibility, dual sign conditions, reduced-cost signs
    /// and complementary slackness, returning the largest residual.
    fn certificate_residual(lp: &LinearProgram, s: &LpSolution) -> f64 {
        let n = lp.n_vars();
        let mut worst: f64 = 0.0;
        let mut reduced = lp.cost.clone();
        for (r, rw) in lp.rows.iter().enumerate() {
            let act: f64 = rw.terms.iter().map(|&(k, c)| c * s.x[k]).sum();
            let y = s.row_duals[r];
            let viol = match rw.sense {
                Sense::Le => (act - rw.rhs).max(0.0).max(y),
                Sense::Ge => (rw.rhs - act).max(0.0).max(-y),
                Sense::Eq => (act - rw.rhs).abs(),
            };
            worst = worst.max(viol);
            worst = worst.max((y * (act - rw.rhs)).abs());
            for &(k, c) in &rw.terms {
                reduced[k] -= y * c;
            }
        }
        for k in 0..n {
            let yu = s.upper_duals[k];
            worst = worst.max(yu.max(0.0));
            if lp.upper[k].is_finite() {
                worst = worst.max((yu * (s.x[k] - lp.upper[k])).abs());
            }
            reduced[k] -= yu;
            worst = worst.max((-reduced[k]).max(0.0));
            worst = worst.max((reduced[k] * (s.x[k] - lp.lower[k])).abs());
        }
        worst
    }

    #[test]
    fn textbook_maximization() {
        // max 3a + 5b s.t. a ≤ 4, 2b ≤ 12, 3a + 2b ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.cost = vec![-3.0, -5.0];
        lp.rows.push(row(&[(0, 1.0)], Sense::Le, 4.0));
        lp.rows.push(row(&[(1, 2.0)], Sense::Le, 12.0));
        lp.rows.push(row(&[(0, 3.0), (1, 2.0)], Sense::Le, 18.0));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        assert!(certificate_residual(&lp, &s) < 1e-8);
    }

    #[test]
    fn equality_and_ge_rows_with_bounds() {
        // min a + 2b + L, a + b = 3, L − a ≥ 1, 0 ≤ a ≤ 2, 0.5 ≤ b, 0 ≤ L ≤ 10
        let mut lp = LinearProgram::new(3);
        lp.cost = vec![1.0, 2.0, 1.0];
        lp.lower = vec![0.0, 0.5, 0.0];
        lp.upper = vec![2.0, f64::INFINITY, 10.0];
        lp.rows.push(row(&[(0, 1.0), (1, 1.0)], Sense::Eq, 3.0));
        lp.rows.push(row(&[(2, 1.0), (0, -1.0)], Sense::Ge, 1.0));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        // a = 2, b = 1, L = 3 → 2 + 2 + 3 = 7
        assert!((s.objective - 7.0).abs() < 1e-9, "{}", s.objective);
        assert!(certificate_residual(&lp, &s) < 1e-8);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.cost = vec![1.0];
        lp.rows.push(row(&[(0, 1.0)], Sense::Ge, 1.0));
        lp.rows.push(row(&[(0, 1.0)], Sense::Le, 0.0));
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.cost = vec![-1.0];
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.cost = vec![-0.75, 150.0, -0.02, 6.0];
        lp.rows.push(row(&[(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Sense::Le, 0.0));
        lp.rows.push(row(&[(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Sense::Le, 0.0));
        lp.rows.push(row(&[(2, 1.0)], Sense::Le, 1.0));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9);
        assert!(certificate_residual(&lp, &s) < 1e-8);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.cost = vec![1.0, 1.0];
        lp.rows.push(row(&[(0, 1.0), (1, 1.0)], Sense::Eq, 2.0));
        lp.rows.push(row(&[(0, 2.0), (1, 2.0)], Sense::Eq, 4.0));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!(certificate_residual(&lp, &s) < 1e-8);
    }

    #[test]
    fn rejects_free_variables() {
        let mut lp = LinearProgram::new(1);
        lp.lower[0] = f64::NEG_INFINITY;
        assert!(lp.solve().is_err());
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn random_bounded_lps_have_certificates(
                cost in proptest::collection::vec(-5i32..5, 3),
                coeffs in proptest::collection::vec(proptest::collection::vec(-4i32..5, 3), 1..6),
                rhs in proptest::collection::vec(-6i32..12, 6),
                senses in proptest::collection::vec(0u8..3, 6),
            ) {
                let mut lp = LinearProgram::new(3);
                lp.cost = cost.iter().map(|&c| c as f64).collect();
                lp.upper = vec![7.0; 3];
                for (r, a) in coeffs.iter().enumerate() {
                    let sense = match senses[r] { 0 => Sense::Le, 1 => Sense::Ge, _ => Sense::Eq };
                    let terms = a.iter().enumerate().map(|(k, &c)| (k, c as f64)).collect();
                    lp.rows.push(LpRow { terms, sense, rhs: rhs[r] as f64 });
                }
                let s = lp.solve().unwrap();
                match s.status {
                    LpStatus::Optimal => prop_assert!(certificate_residual(&lp, &s) < 1e-7),
                    LpStatus::Infeasible => {
                        // no integer grid point may be feasible
                        for a in 0..=7 { for b in 0..=7 { for c in 0..=7 {
                            let x = [a as f64, b as f64, c as f64];
                            let ok = lp.rows.iter().all(|rw| {
                                let act: f64 = rw.terms.iter().map(|&(k, v)| v * x[k]).sum();
                                match rw.sense {
                                    Sense::Le => act <= rw.rhs + 1e-9,
                                    Sense::Ge => act >= rw.rhs - 1e-9,
                                    Sense::Eq => (act - rw.rhs).abs() <= 1e-9,
                                }
                            });
                            prop_assert!(!ok);
                        }}}
                    }
                    other => prop_assert!(false, "unexpected status {:?}", other),
                }
            }
        }
    }
}
