//! Dense two-phase primal simplex for problems of the form
//!
//! ```text
//! minimize    c . x
//! subject to  A x <= b      (b of any sign)
//!             x >= lb       (componentwise, 0 by default)
//! ```
//!
//! Bland's rule picks both the entering and the leaving variable, so the
//! pivot sequence is deterministic and cycling is impossible. Sized for the
//! desk-scale problems in this crate (hundreds of variables), not for
//! sparse industrial instances.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("objective has {objective} coefficients but row {row} has {found}")]
    DimensionMismatch {
        objective: usize,
        row: usize,
        found: usize,
    },
    #[error("problem data contains a non-finite number")]
    NonFinite,
    #[error("pivot limit exceeded after {0} iterations")]
    IterationLimit(usize),
}

/// Residuals up to this size count as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Reduced costs closer to zero than this are treated as optimal.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Pivot elements smaller than this are treated as zero.
const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal {
        value: f64,
        x: Vec<f64>,
        iterations: usize,
    },
    Infeasible {
        iterations: usize,
    },
    Unbounded {
        iterations: usize,
    },
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible { .. } => LpStatus::Infeasible,
            LpSolution::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<(f64, &[f64])> {
        match self {
            LpSolution::Optimal { value, x, .. } => Some((*value, x)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    /// Minimized coefficient vector; its length fixes the variable count.
    pub objective: Vec<f64>,
    /// Inequality rows `rows[i] . x <= rhs[i]`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Per-variable lower bounds; empty means all zeros.
    pub lower_bounds: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        LpProblem {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
            lower_bounds: Vec::new(),
        }
    }

    pub fn add_row(&mut self, row: Vec<f64>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::DimensionMismatch {
                    objective: n,
                    row: i,
                    found: row.len(),
                });
            }
        }
        if !self.lower_bounds.is_empty() && self.lower_bounds.len() != n {
            return Err(LpError::DimensionMismatch {
                objective: n,
                row: usize::MAX,
                found: self.lower_bounds.len(),
            });
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite())
            && self.lower_bounds.iter().all(|v| v.is_finite())
            && self.rows.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFinite);
        }
        Ok(())
    }
}

struct Tableau {
    /// m rows of n_total coefficients plus the rhs in the last slot.
    rows: Vec<Vec<f64>>,
    /// Active cost row (reduced costs, last slot = -objective value).
    cost: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
    n_total: usize,
    n_real: usize,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let piv = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        self.basis[r] = col;
        self.iterations += 1;
    }

    /// Bland: entering = lowest-index improving column, leaving = min ratio
    /// with ties broken by the lowest basic variable index.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool, limit: usize) -> Result<LpStatus, LpError> {
        loop {
            if self.iterations > limit {
                return Err(LpError::IterationLimit(self.iterations));
            }
            let entering = (0..self.n_total)
                .find(|&j| allowed(j) && self.cost[j] < -OPTIMALITY_TOL);
            let Some(col) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                if !self.active[r] {
                    continue;
                }
                let a = self.rows[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rows[r][self.n_total] / a;
                    let better = match leave {
                        None => true,
                        Some((best_r, best)) => {
                            ratio < best - 1e-12
                                || (ratio < best + 1e-12 && self.basis[r] < self.basis[best_r])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Ok(LpStatus::Unbounded);
            };
            self.pivot(r, col);
        }
    }
}

/// Solve an inequality-form LP. `Err` only for malformed input or a blown
/// pivot budget; infeasible and unbounded outcomes are ordinary results.
pub fn lp_solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let n = problem.objective.len();
    let m = problem.rows.len();

    // Shift out nonzero lower bounds: x = x' + lb with x' >= 0.
    let lb = if problem.lower_bounds.is_empty() {
        vec![0.0; n]
    } else {
        problem.lower_bounds.clone()
    };
    let shift_cost: f64 = problem.objective.iter().zip(&lb).map(|(c, l)| c * l).sum();

    // Row i: sum_j a_ij x'_j + s_i = b_i - a_i . lb, flipped so rhs >= 0.
    let mut need_artificial = vec![false; m];
    let mut flipped = vec![false; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let adj: f64 = problem.rows[i].iter().zip(&lb).map(|(a, l)| a * l).sum();
        let b = problem.rhs[i] - adj;
        if b < 0.0 {
            flipped[i] = true;
            need_artificial[i] = true;
            rhs[i] = -b;
        } else {
            rhs[i] = b;
        }
    }
    let n_art = need_artificial.iter().filter(|&&x| x).count();
    let n_total = n + m + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_index = n + m;
    for i in 0..m {
        let mut row = vec![0.0; n_total + 1];
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * problem.rows[i][j];
        }
        row[n + i] = sign; // slack
        if need_artificial[i] {
            row[art_index] = 1.0;
            basis.push(art_index);
            art_index += 1;
        } else {
            basis.push(n + i);
        }
        row[n_total] = rhs[i];
        rows.push(row);
    }

    let limit = 20_000 + 200 * (n + m);
    let mut tab = Tableau {
        rows,
        cost: vec![0.0; n_total + 1],
        basis,
        active: vec![true; m],
        n_total,
        n_real: n + m,
        iterations: 0,
    };

    // Phase 1: drive the artificial sum to zero.
    if n_art > 0 {
        for j in tab.n_real..n_total {
            tab.cost[j] = 1.0;
        }
        for r in 0..m {
            if tab.basis[r] >= tab.n_real {
                let row = tab.rows[r].clone();
                for (v, p) in tab.cost.iter_mut().zip(&row) {
                    *v -= p;
                }
            }
        }
        let status = tab.run(&|_| true, limit)?;
        debug_assert_ne!(status, LpStatus::Unbounded, "phase 1 is bounded below");
        let infeas = -tab.cost[n_total];
        if infeas > FEASIBILITY_TOL {
            return Ok(LpSolution::Infeasible {
                iterations: tab.iterations,
            });
        }
        // Pivot lingering artificials out of the basis; an all-zero row is a
        // redundant constraint and gets deactivated.
        for r in 0..m {
            if tab.basis[r] >= tab.n_real {
                let col = (0..tab.n_real).find(|&j| tab.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(j) => tab.pivot(r, j),
                    None => tab.active[r] = false,
                }
            }
        }
    }

    // Phase 2: original objective priced out against the current basis.
    let mut cost = vec![0.0; n_total + 1];
    cost[..n].copy_from_slice(&problem.objective);
    tab.cost = cost;
    for r in 0..m {
        if !tab.active[r] {
            continue;
        }
        let f = tab.cost[tab.basis[r]];
        if f != 0.0 {
            let row = tab.rows[r].clone();
            for (v, p) in tab.cost.iter_mut().zip(&row) {
                *v -= f * p;
            }
        }
    }
    let n_real = tab.n_real;
    let status = tab.run(&|j| j < n_real, limit)?;
    if status == LpStatus::Unbounded {
        return Ok(LpSolution::Unbounded {
            iterations: tab.iterations,
        });
    }

    let mut x = lb;
    for r in 0..m {
        if tab.active[r] && tab.basis[r] < n {
            x[tab.basis[r]] += tab.rows[r][n_total];
        }
    }
    let value: f64 = problem
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum::<f64>();
    debug_assert!((value - (-tab.cost[n_total] + shift_cost)).abs() <= 1e-6 * (1.0 + value.abs()));
    Ok(LpSolution::Optimal {
        value,
        x,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn basic_optimum() {
        // min -x1 - 2 x2 s.t. x1 + x2 <= 4, x2 <= 3 -> (1, 3), value -7.
        let mut p = LpProblem::new(vec![-1.0, -2.0]);
        p.add_row(vec![1.0, 1.0], 4.0);
        p.add_row(vec![0.0, 1.0], 3.0);
        let s = lp_solve(&p).unwrap();
        let (value, x) = s.optimal().unwrap();
        close(value, -7.0, 1e-9);
        close(x[0], 1.0, 1e-9);
        close(x[1], 3.0, 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        // x1 <= -1 with x1 >= 0 is empty.
        let mut p = LpProblem::new(vec![1.0]);
        p.add_row(vec![1.0], -1.0);
        assert_eq!(lp_solve(&p).unwrap().status(), LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x1 with only x2 bounded.
        let mut p = LpProblem::new(vec![-1.0, 0.0]);
        p.add_row(vec![0.0, 1.0], 1.0);
        assert_eq!(lp_solve(&p).unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // min x1 + x2 s.t. -x1 - x2 <= -2 (i.e. x1 + x2 >= 2).
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.add_row(vec![-1.0, -1.0], -2.0);
        let s = lp_solve(&p).unwrap();
        let (value, x) = s.optimal().unwrap();
        close(value, 2.0, 1e-9);
        close(x[0] + x[1], 2.0, 1e-9);
    }

    #[test]
    fn lower_bounds_shift() {
        // min x1 + x2 with x >= (2, 3) and x1 + x2 <= 10.
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.add_row(vec![1.0, 1.0], 10.0);
        p.lower_bounds = vec![2.0, 3.0];
        let s = lp_solve(&p).unwrap();
        let (value, x) = s.optimal().unwrap();
        close(value, 5.0, 1e-9);
        close(x[0], 2.0, 1e-9);
        close(x[1], 3.0, 1e-9);
    }

    #[test]
    fn zero_rows() {
        let p = LpProblem::new(vec![1.0, 1.0]);
        let sol = lp_solve(&p).unwrap();
        let (value, x) = sol.optimal().unwrap();
        close(value, 0.0, 1e-12);
        assert_eq!(x, vec![0.0, 0.0]);
        let p = LpProblem::new(vec![-1.0]);
        assert_eq!(lp_solve(&p).unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.add_row(vec![1.0], 1.0);
        assert!(matches!(lp_solve(&p), Err(LpError::DimensionMismatch { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        let mut p = LpProblem::new(vec![1.0]);
        p.add_row(vec![f64::INFINITY], 1.0);
        assert_eq!(lp_solve(&p), Err(LpError::NonFinite));
    }

    #[test]
    fn redundant_equality_rows() {
        // x1 = 1 written twice as paired inequalities; phase 1 must cope
        // with the redundancy.
        let mut p = LpProblem::new(vec![1.0]);
        p.add_row(vec![1.0], 1.0);
        p.add_row(vec![-1.0], -1.0);
        p.add_row(vec![1.0], 1.0);
        p.add_row(vec![-1.0], -1.0);
        let s = lp_solve(&p).unwrap();
        let (value, x) = s.optimal().unwrap();
        close(value, 1.0, 1e-9);
        close(x[0], 1.0, 1e-9);
    }

    #[test]
    fn random_instances_feasible_and_consistent() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..50 {
            let n = 2 + rng.next_below(4) as usize;
            let m = 1 + rng.next_below(4) as usize;
            let mut p = LpProblem::new((0..n).map(|_| rng.next_f64() - 0.3).collect());
            for _ in 0..m {
                let row: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
                p.add_row(row, 1.0 + rng.next_f64());
            }
            // Box to keep it bounded.
            for j in 0..n {
                let mut row = vec![0.0; n];
                row[j] = 1.0;
                p.add_row(row, 5.0);
            }
            let s = lp_solve(&p).unwrap();
            let (value, x) = s.optimal().unwrap();
            for (row, rhs) in p.rows.iter().zip(&p.rhs) {
                let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
                assert!(lhs <= rhs + FEASIBILITY_TOL);
            }
            for v in x {
                assert!(*v >= -FEASIBILITY_TOL);
            }
            let recomputed: f64 = p.objective.iter().zip(x).map(|(c, v)| c * v).sum();
            close(value, recomputed, 1e-9 * (1.0 + value.abs()));
        }
    }

    #[test]
    fn deterministic_pivots() {
        let mut p = LpProblem::new(vec![-2.0, -3.0, -4.0]);
        p.add_row(vec![3.0, 2.0, 1.0], 10.0);
        p.add_row(vec![2.0, 5.0, 3.0], 15.0);
        let a = lp_solve(&p).unwrap();
        let b = lp_solve(&p).unwrap();
        assert_eq!(a, b);
    }
}
