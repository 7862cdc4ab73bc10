//! Norm-projection onto a polyhedron `P = { x : A x <= b, x >= 0 }`:
//! minimize `<<q - x>>_alpha` over `x in P`.
//!
//! Three routes with different scopes:
//!
//! * [`project_lp`]: one LP via the OWL top-k epigraph. Exact for convex
//!   distortions, where the scaled norm is an OWL norm.
//! * [`project_enumerate`]: one LP per sort order of the deviations, exact
//!   for any continuous distortion; factorial cost, guarded to `n <= 8`.
//! * [`project_milp`]: depth-first branch and bound over the assignment of
//!   deviations to sorted positions, exact for any continuous distortion at
//!   polynomial-per-node cost. The underlying mixed-integer model
//!   ([`MilpModel`]) linearizes `s = (assignment) * y` with big-M bounds;
//!   node bounds come from an LP relaxation of the node's subproblem.

use crate::distortion::Distortion;
use crate::norm::{scaled_ges_norm, NormError, NormWeights};
use crate::owl::ges_owl_weights;
use crate::simplex::{lp_solve, LpError, LpProblem, LpSolution};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("LP solver failure: {0}")]
    Lp(#[from] LpError),
    #[error("polyhedron is empty")]
    InfeasiblePolyhedron,
    #[error("q has length {q} but the polyhedron has {n} variables")]
    DimensionMismatch { q: usize, n: usize },
    #[error("{0} variables exceed the enumeration guard (n <= 8)")]
    DimensionTooLarge(usize),
    #[error("alpha = 1 is outside the projection domain")]
    AlphaOne,
    #[error("polyhedron row {0} is malformed")]
    MalformedRow(usize),
    #[error("cannot bound the feasible box: polyhedron unbounded and the top weight vanishes")]
    UnboundedBox,
    #[error("node budget of {limit} exhausted after {nodes} nodes; best value {best:?}")]
    NodeLimitExceeded {
        limit: u64,
        nodes: u64,
        best: Option<f64>,
    },
    #[error("projection LP unexpectedly {0}")]
    UnexpectedLpOutcome(String),
}

/// `{ x : A x <= b, x >= 0 }` with `A` given by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl Polyhedron {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self, ProjError> {
        if a.is_empty() || a.len() != b.len() {
            return Err(ProjError::MalformedRow(a.len().min(b.len())));
        }
        let n = a[0].len();
        if n == 0 {
            return Err(ProjError::MalformedRow(0));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n || row.iter().any(|v| !v.is_finite()) || !b[i].is_finite() {
                return Err(ProjError::MalformedRow(i));
            }
        }
        Ok(Polyhedron { a, b })
    }

    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n()
            && x.iter().all(|&v| v >= -tol)
            && self
                .a
                .iter()
                .zip(&self.b)
                .all(|(row, &b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= b + tol)
    }

    /// Appends `A x <= b` onto an LP whose first `n` variables are `x`.
    fn add_rows(&self, p: &mut LpProblem, nv: usize) {
        for (row, &b) in self.a.iter().zip(&self.b) {
            let mut r = vec![0.0; nv];
            r[..row.len()].copy_from_slice(row);
            p.add_row(r, b);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub value: f64,
    pub minimizer: Vec<f64>,
}

fn validate_inputs(q: &[f64], poly: &Polyhedron, alpha: f64) -> Result<(), ProjError> {
    if q.len() != poly.n() {
        return Err(ProjError::DimensionMismatch {
            q: q.len(),
            n: poly.n(),
        });
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(ProjError::Norm(NormError::NonFinite));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ProjError::Norm(NormError::AlphaOutOfRange(alpha)));
    }
    if alpha == 1.0 {
        return Err(ProjError::AlphaOne);
    }
    Ok(())
}

/// Single-LP projection for convex distortions.
///
/// With OWL weights `w` for `(alpha, g)` the objective is
/// `sum_k d_k * TopK(e, k)` for `d_k = v_k - v_{k+1}` (reversed weights) and
/// deviations `e_i >= |x_i - q_i|`; each top-k sum is replaced by its
/// epigraph `k t_k + sum_i u_{ki}`, `u_{ki} >= e_i - t_k`.
pub fn project_lp(
    q: &[f64],
    poly: &Polyhedron,
    alpha: f64,
    g: &Distortion,
) -> Result<Projection, ProjError> {
    validate_inputs(q, poly, alpha)?;
    let n = q.len();
    let w = ges_owl_weights(alpha, g, n)?.weights;
    let weights = w.weights();
    let mut d = vec![0.0; n];
    for k in 0..n {
        let v_k = weights[n - 1 - k];
        let v_next = if k + 1 < n { weights[n - 2 - k] } else { 0.0 };
        d[k] = v_k - v_next;
    }
    let active: Vec<usize> = (0..n).filter(|&k| d[k] > 1e-14).collect();

    // Variables: x (n), e (n), then per active k: t_k, u_{k,0..n}.
    let nv = 2 * n + active.len() * (n + 1);
    let idx_e = |i: usize| n + i;
    let idx_t = |a: usize| 2 * n + a * (n + 1);
    let idx_u = |a: usize, i: usize| 2 * n + a * (n + 1) + 1 + i;

    let mut objective = vec![0.0; nv];
    for (a, &k) in active.iter().enumerate() {
        objective[idx_t(a)] = d[k] * (k + 1) as f64;
        for i in 0..n {
            objective[idx_u(a, i)] = d[k];
        }
    }
    let mut p = LpProblem::new(objective);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        row[i] = 1.0;
        row[idx_e(i)] = -1.0;
        p.add_row(row, q[i]);
        let mut row = vec![0.0; nv];
        row[i] = -1.0;
        row[idx_e(i)] = -1.0;
        p.add_row(row, -q[i]);
    }
    for (a, _) in active.iter().enumerate() {
        for i in 0..n {
            let mut row = vec![0.0; nv];
            row[idx_e(i)] = 1.0;
            row[idx_t(a)] = -1.0;
            row[idx_u(a, i)] = -1.0;
            p.add_row(row, 0.0);
        }
    }
    poly.add_rows(&mut p, nv);

    match lp_solve(&p)? {
        LpSolution::Optimal { value, x, .. } => Ok(Projection {
            value,
            minimizer: x[..n].to_vec(),
        }),
        LpSolution::Infeasible { .. } => Err(ProjError::InfeasiblePolyhedron),
        LpSolution::Unbounded { .. } => {
            Err(ProjError::UnexpectedLpOutcome("unbounded".into()))
        }
    }
}

/// LP for one fixed sort order `perm` of the deviations (ascending):
/// minimize `t + sum_r c_r z_r / (1 - alpha)` with `z_r >= e_{perm[r]} - t`
/// and the chain `e_{perm[0]} <= ... <= e_{perm[n-1]}`.
fn sorted_order_lp(
    q: &[f64],
    poly: &Polyhedron,
    alpha: f64,
    c: &[f64],
    perm: &[usize],
) -> LpProblem {
    let n = q.len();
    // Variables: x (n), e (n), z (n), t.
    let nv = 3 * n + 1;
    let idx_e = |i: usize| n + i;
    let idx_z = |r: usize| 2 * n + r;
    let idx_t = 3 * n;

    let scale = 1.0 / (1.0 - alpha);
    let mut objective = vec![0.0; nv];
    objective[idx_t] = 1.0;
    for r in 0..n {
        objective[idx_z(r)] = c[r] * scale;
    }
    let mut p = LpProblem::new(objective);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        row[i] = 1.0;
        row[idx_e(i)] = -1.0;
        p.add_row(row, q[i]);
        let mut row = vec![0.0; nv];
        row[i] = -1.0;
        row[idx_e(i)] = -1.0;
        p.add_row(row, -q[i]);
    }
    for r in 0..n.saturating_sub(1) {
        let mut row = vec![0.0; nv];
        row[idx_e(perm[r])] = 1.0;
        row[idx_e(perm[r + 1])] = -1.0;
        p.add_row(row, 0.0);
    }
    for r in 0..n {
        let mut row = vec![0.0; nv];
        row[idx_e(perm[r])] = 1.0;
        row[idx_t] = -1.0;
        row[idx_z(r)] = -1.0;
        p.add_row(row, 0.0);
    }
    poly.add_rows(&mut p, nv);
    p
}

/// Exhaustive projection: solve the fixed-sort LP for every permutation and
/// take the best. Exact for any continuous distortion since the optimal
/// deviation vector is sorted by one of them. Guarded to `n <= 8`.
pub fn project_enumerate(
    q: &[f64],
    poly: &Polyhedron,
    alpha: f64,
    g: &Distortion,
) -> Result<Projection, ProjError> {
    use itertools::Itertools;
    validate_inputs(q, poly, alpha)?;
    let n = q.len();
    if n > 8 {
        return Err(ProjError::DimensionTooLarge(n));
    }
    let c = NormWeights::new(g, n)?.c;
    let mut best: Option<Projection> = None;
    for perm in (0..n).permutations(n) {
        let p = sorted_order_lp(q, poly, alpha, &c, &perm);
        match lp_solve(&p)? {
            LpSolution::Optimal { value, x, .. } => {
                if best.as_ref().map_or(true, |b| value < b.value) {
                    best = Some(Projection {
                        value,
                        minimizer: x[..n].to_vec(),
                    });
                }
            }
            LpSolution::Infeasible { .. } => return Err(ProjError::InfeasiblePolyhedron),
            LpSolution::Unbounded { .. } => {
                return Err(ProjError::UnexpectedLpOutcome("unbounded".into()))
            }
        }
    }
    Ok(best.expect("n >= 1 yields at least one permutation"))
}

/// Options for the branch-and-bound search.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpOptions {
    pub node_limit: u64,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions {
            node_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpProjection {
    pub value: f64,
    pub minimizer: Vec<f64>,
    /// Number of branch-and-bound nodes whose LP was solved.
    pub nodes: u64,
    /// Sort order realized by the minimizer: `permutation[r]` is the variable
    /// occupying ascending deviation position `r`.
    pub permutation: Vec<usize>,
}

/// Exact mixed-integer model of the projection: binaries `u_{p,k}` assign
/// deviation `y_k` to sorted position `p`, `s` is the sorted image (chain
/// `s_0 <= ... <= s_{n-1}`), and the bilinear `s_p = sum_k u_{p,k} y_k` is
/// linearized by `|s_p - y_k| <= M (1 - u_{p,k})` with
/// `M = max_i (|q_i| + box_i)` for a feasible-box bound `box_i`.
#[derive(Debug, Clone)]
pub struct MilpModel {
    q: Vec<f64>,
    poly: Polyhedron,
    alpha: f64,
    c: Vec<f64>,
    big_m: f64,
}

impl MilpModel {
    pub fn new(
        q: &[f64],
        poly: &Polyhedron,
        alpha: f64,
        g: &Distortion,
    ) -> Result<Self, ProjError> {
        validate_inputs(q, poly, alpha)?;
        let n = q.len();
        let c = NormWeights::new(g, n)?.c;

        // Feasible point: seeds the deviation bound and proves nonemptiness.
        let feas = lp_solve(&LpProblem {
            objective: vec![0.0; n],
            rows: poly.rows().to_vec(),
            rhs: poly.rhs().to_vec(),
            lower_bounds: vec![],
        })?;
        let x0 = match feas {
            LpSolution::Optimal { x, .. } => x,
            _ => return Err(ProjError::InfeasiblePolyhedron),
        };
        let dev0: Vec<f64> = q.iter().zip(&x0).map(|(a, b)| a - b).collect();
        let d0 = scaled_ges_norm(&dev0, alpha, g)?;

        // box_i: per-variable maximum over P, with a fallback through the
        // norm bound max dev <= value/c_n when a coordinate is unbounded.
        let c_top = *c.last().unwrap();
        let mut big_m = 0.0_f64;
        for i in 0..n {
            let mut objective = vec![0.0; n];
            objective[i] = -1.0;
            let sol = lp_solve(&LpProblem {
                objective,
                rows: poly.rows().to_vec(),
                rhs: poly.rhs().to_vec(),
                lower_bounds: vec![],
            })?;
            let box_i = match sol {
                LpSolution::Optimal { value, .. } => -value,
                LpSolution::Unbounded { .. } => {
                    if c_top > 1e-14 {
                        q[i].max(0.0) + d0 / c_top * (1.0 + 1e-9) + 1e-9
                    } else {
                        return Err(ProjError::UnboundedBox);
                    }
                }
                LpSolution::Infeasible { .. } => return Err(ProjError::InfeasiblePolyhedron),
            };
            big_m = big_m.max(q[i].abs() + box_i);
        }
        Ok(MilpModel {
            q: q.to_vec(),
            poly: poly.clone(),
            alpha,
            c,
            big_m: big_m + 1.0,
        })
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    fn n(&self) -> usize {
        self.q.len()
    }

    /// Full LP relaxation of the model with `u in [0,1]` and the given
    /// binaries pinned. Exposed for cross-checking the search's node bounds;
    /// the branch-and-bound itself uses [`Self::node_lp`].
    pub fn relaxation(
        &self,
        fixed_ones: &[(usize, usize)],
        fixed_zeros: &[(usize, usize)],
    ) -> LpProblem {
        let n = self.n();
        // Variables: x (n), y (n), s (n), z (n), t, u (n*n row-major by position).
        let nv = 4 * n + 1 + n * n;
        let idx_y = |i: usize| n + i;
        let idx_s = |p: usize| 2 * n + p;
        let idx_z = |r: usize| 3 * n + r;
        let idx_t = 4 * n;
        let idx_u = |p: usize, k: usize| 4 * n + 1 + p * n + k;

        let scale = 1.0 / (1.0 - self.alpha);
        let mut objective = vec![0.0; nv];
        objective[idx_t] = 1.0;
        for r in 0..n {
            objective[idx_z(r)] = self.c[r] * scale;
        }
        let mut p = LpProblem::new(objective);
        for i in 0..n {
            let mut row = vec![0.0; nv];
            row[i] = 1.0;
            row[idx_y(i)] = -1.0;
            p.add_row(row, self.q[i]);
            let mut row = vec![0.0; nv];
            row[i] = -1.0;
            row[idx_y(i)] = -1.0;
            p.add_row(row, -self.q[i]);
        }
        for r in 0..n - 1 {
            let mut row = vec![0.0; nv];
            row[idx_s(r)] = 1.0;
            row[idx_s(r + 1)] = -1.0;
            p.add_row(row, 0.0);
        }
        for r in 0..n {
            let mut row = vec![0.0; nv];
            row[idx_s(r)] = 1.0;
            row[idx_t] = -1.0;
            row[idx_z(r)] = -1.0;
            p.add_row(row, 0.0);
        }
        // Assignment structure: doubly stochastic u.
        for pos in 0..n {
            let mut row = vec![0.0; nv];
            for k in 0..n {
                row[idx_u(pos, k)] = 1.0;
            }
            p.add_row(row.clone(), 1.0);
            for v in row.iter_mut() {
                *v = -*v;
            }
            p.add_row(row, -1.0);
        }
        for k in 0..n {
            let mut row = vec![0.0; nv];
            for pos in 0..n {
                row[idx_u(pos, k)] = 1.0;
            }
            p.add_row(row.clone(), 1.0);
            for v in row.iter_mut() {
                *v = -*v;
            }
            p.add_row(row, -1.0);
        }
        // Big-M linkage |s_p - y_k| <= M (1 - u_{p,k}).
        for pos in 0..n {
            for k in 0..n {
                let mut row = vec![0.0; nv];
                row[idx_y(k)] = 1.0;
                row[idx_s(pos)] = -1.0;
                row[idx_u(pos, k)] = self.big_m;
                p.add_row(row, self.big_m);
                let mut row = vec![0.0; nv];
                row[idx_s(pos)] = 1.0;
                row[idx_y(k)] = -1.0;
                row[idx_u(pos, k)] = self.big_m;
                p.add_row(row, self.big_m);
            }
        }
        for pos in 0..n {
            for k in 0..n {
                let mut row = vec![0.0; nv];
                row[idx_u(pos, k)] = 1.0;
                p.add_row(row, 1.0);
            }
        }
        for &(pos, k) in fixed_ones {
            let mut row = vec![0.0; nv];
            row[idx_u(pos, k)] = -1.0;
            p.add_row(row, -1.0);
        }
        for &(pos, k) in fixed_zeros {
            let mut row = vec![0.0; nv];
            row[idx_u(pos, k)] = 1.0;
            p.add_row(row, 0.0);
        }
        self.poly.add_rows(&mut p, nv);
        p
    }

    /// Node LP for a suffix assignment: `suffix[d]` is the variable fixed to
    /// position `n-1-d`. Relaxation of the node's subproblem: assigned
    /// positions pin `s_p = y_k`; the unassigned deviations are tied to the
    /// unassigned positions by cuts valid in every integer completion —
    /// `s_0 <= y_k <= s_top` for the extreme unassigned positions, and the
    /// sum of unassigned deviations equals the sum of unassigned-position
    /// `s` values (the assignment is a bijection). The remaining pairwise
    /// linkage is dropped.
    fn node_lp(&self, suffix: &[usize]) -> LpProblem {
        let n = self.n();
        let len = suffix.len();
        // Variables: x (n), y (n), s (n), z (n), t.
        let nv = 4 * n + 1;
        let idx_y = |i: usize| n + i;
        let idx_s = |p: usize| 2 * n + p;
        let idx_z = |r: usize| 3 * n + r;
        let idx_t = 4 * n;

        let scale = 1.0 / (1.0 - self.alpha);
        let mut objective = vec![0.0; nv];
        objective[idx_t] = 1.0;
        for r in 0..n {
            objective[idx_z(r)] = self.c[r] * scale;
        }
        let mut p = LpProblem::new(objective);
        for i in 0..n {
            let mut row = vec![0.0; nv];
            row[i] = 1.0;
            row[idx_y(i)] = -1.0;
            p.add_row(row, self.q[i]);
            let mut row = vec![0.0; nv];
            row[i] = -1.0;
            row[idx_y(i)] = -1.0;
            p.add_row(row, -self.q[i]);
        }
        for r in 0..n - 1 {
            let mut row = vec![0.0; nv];
            row[idx_s(r)] = 1.0;
            row[idx_s(r + 1)] = -1.0;
            p.add_row(row, 0.0);
        }
        for r in 0..n {
            let mut row = vec![0.0; nv];
            row[idx_s(r)] = 1.0;
            row[idx_t] = -1.0;
            row[idx_z(r)] = -1.0;
            p.add_row(row, 0.0);
        }
        let mut assigned = vec![false; n];
        for (d, &k) in suffix.iter().enumerate() {
            let pos = n - 1 - d;
            assigned[k] = true;
            let mut row = vec![0.0; nv];
            row[idx_s(pos)] = 1.0;
            row[idx_y(k)] = -1.0;
            p.add_row(row, 0.0);
            let mut row = vec![0.0; nv];
            row[idx_y(k)] = 1.0;
            row[idx_s(pos)] = -1.0;
            p.add_row(row, 0.0);
        }
        if len < n {
            let top_unassigned = n - 1 - len;
            for k in 0..n {
                if !assigned[k] {
                    let mut row = vec![0.0; nv];
                    row[idx_y(k)] = 1.0;
                    row[idx_s(top_unassigned)] = -1.0;
                    p.add_row(row, 0.0);
                    let mut row = vec![0.0; nv];
                    row[idx_s(0)] = 1.0;
                    row[idx_y(k)] = -1.0;
                    p.add_row(row, 0.0);
                }
            }
            let mut balance = vec![0.0; nv];
            for k in 0..n {
                if !assigned[k] {
                    balance[idx_y(k)] = 1.0;
                }
            }
            for r in 0..=top_unassigned {
                balance[idx_s(r)] = -1.0;
            }
            p.add_row(balance.clone(), 0.0);
            for v in balance.iter_mut() {
                *v = -*v;
            }
            p.add_row(balance, 0.0);
        }
        self.poly.add_rows(&mut p, nv);
        p
    }
}

/// Exact projection for any continuous distortion by depth-first branch and
/// bound on the position-assignment binaries. Positions are fixed from the
/// largest down; children are explored most-promising first (largest node
/// deviation). Every node LP yields a feasible `x`, so incumbents improve
/// continuously; a node is pruned once its bound cannot beat the incumbent
/// by more than 1e-9.
pub fn project_milp(
    q: &[f64],
    poly: &Polyhedron,
    alpha: f64,
    g: &Distortion,
    options: &MilpOptions,
) -> Result<MilpProjection, ProjError> {
    let model = MilpModel::new(q, poly, alpha, g)?;
    let n = q.len();

    let mut best_value = f64::INFINITY;
    let mut best_x: Vec<f64> = Vec::new();
    let mut nodes: u64 = 0;
    // Stack of suffix assignments; deeper nodes pushed last (depth first).
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];

    while let Some(suffix) = stack.pop() {
        if nodes >= options.node_limit {
            return Err(ProjError::NodeLimitExceeded {
                limit: options.node_limit,
                nodes,
                best: (best_value.is_finite()).then_some(best_value),
            });
        }
        nodes += 1;
        let lp = model.node_lp(&suffix);
        let sol = lp_solve(&lp)?;
        let (bound, point) = match sol {
            LpSolution::Optimal { value, x, .. } => (value, x),
            LpSolution::Infeasible { .. } => {
                if suffix.is_empty() {
                    return Err(ProjError::InfeasiblePolyhedron);
                }
                continue;
            }
            LpSolution::Unbounded { .. } => {
                return Err(ProjError::UnexpectedLpOutcome("unbounded".into()))
            }
        };
        if bound >= best_value - 1e-9 {
            continue;
        }
        // The x-part is feasible regardless of the assignment; its true norm
        // is always a valid incumbent.
        let xhat = &point[..n];
        let dev: Vec<f64> = q.iter().zip(xhat).map(|(a, b)| a - b).collect();
        let true_value = scaled_ges_norm(&dev, alpha, g)?;
        if true_value < best_value {
            best_value = true_value;
            best_x = xhat.to_vec();
        }
        if suffix.len() >= n {
            continue;
        }
        let mut assigned = vec![false; n];
        for &k in &suffix {
            assigned[k] = true;
        }
        let mut candidates: Vec<usize> = (0..n).filter(|&k| !assigned[k]).collect();
        if candidates.len() == 1 {
            let mut child = suffix.clone();
            child.push(candidates[0]);
            stack.push(child);
            continue;
        }
        // Largest relaxed deviation first; push in reverse so it pops first.
        candidates.sort_by(|&a, &b| {
            point[n + b]
                .partial_cmp(&point[n + a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &k in candidates.iter().rev() {
            let mut child = suffix.clone();
            child.push(k);
            stack.push(child);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let dev: Vec<f64> = q.iter().zip(&best_x).map(|(a, b)| (a - b).abs()).collect();
    order.sort_by(|&a, &b| {
        dev[a]
            .partial_cmp(&dev[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    Ok(MilpProjection {
        value: best_value,
        minimizer: best_x,
        nodes,
        permutation: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn simplex_poly() -> Polyhedron {
        Polyhedron::new(vec![vec![1.0, 1.0]], vec![1.0]).unwrap()
    }

    #[test]
    fn polyhedron_validation() {
        assert!(Polyhedron::new(vec![], vec![]).is_err());
        assert!(Polyhedron::new(vec![vec![1.0], vec![1.0, 2.0]], vec![1.0, 1.0]).is_err());
        assert!(Polyhedron::new(vec![vec![f64::NAN]], vec![1.0]).is_err());
        let p = simplex_poly();
        assert!(p.contains(&[0.5, 0.5], 1e-9));
        assert!(!p.contains(&[0.8, 0.8], 1e-9));
        assert!(!p.contains(&[-0.1, 0.5], 1e-9));
    }

    #[test]
    fn lp_identity_distance_to_simplex() {
        let g = Distortion::identity();
        let got = project_lp(&[1.0, 1.0], &simplex_poly(), 0.0, &g).unwrap();
        close(got.value, 0.5, 1e-8);
        assert!(simplex_poly().contains(&got.minimizer, 1e-8));
    }

    #[test]
    fn lp_power_two_unique_minimizer() {
        let g = Distortion::power(2.0).unwrap();
        let got = project_lp(&[1.0, 1.0], &simplex_poly(), 0.0, &g).unwrap();
        close(got.value, 0.5, 1e-8);
        close(got.minimizer[0], 0.5, 1e-7);
        close(got.minimizer[1], 0.5, 1e-7);
    }

    #[test]
    fn lp_feasible_point_projects_to_itself() {
        let g = Distortion::power(2.0).unwrap();
        let got = project_lp(&[0.2, 0.3], &simplex_poly(), 0.4, &g).unwrap();
        close(got.value, 0.0, 1e-8);
        close(got.minimizer[0], 0.2, 1e-7);
        close(got.minimizer[1], 0.3, 1e-7);
    }

    #[test]
    fn lp_rejects_nonconvex_and_alpha_one() {
        assert!(project_lp(&[1.0, 1.0], &simplex_poly(), 0.0, &Distortion::sqrt()).is_err());
        assert_eq!(
            project_lp(
                &[1.0, 1.0],
                &simplex_poly(),
                1.0,
                &Distortion::identity()
            ),
            Err(ProjError::AlphaOne)
        );
    }

    #[test]
    fn empty_polyhedron_reported() {
        let poly = Polyhedron::new(vec![vec![1.0], vec![-1.0]], vec![-2.0, 1.0]).unwrap();
        let g = Distortion::identity();
        assert_eq!(
            project_lp(&[0.0], &poly, 0.0, &g),
            Err(ProjError::InfeasiblePolyhedron)
        );
        assert_eq!(
            project_enumerate(&[0.0], &poly, 0.0, &g),
            Err(ProjError::InfeasiblePolyhedron)
        );
        assert!(matches!(
            project_milp(&[0.0], &poly, 0.0, &g, &MilpOptions::default()),
            Err(ProjError::InfeasiblePolyhedron)
        ));
    }

    #[test]
    fn enumerate_single_variable_is_clamp() {
        // P = { x <= 3, x >= 0 }; the norm of a scalar is |.| at every alpha.
        let poly = Polyhedron::new(vec![vec![1.0]], vec![3.0]).unwrap();
        let g = Distortion::power(2.0).unwrap();
        for (q, expect) in [(5.0, 2.0), (-1.5, 1.5), (2.0, 0.0)] {
            let got = project_enumerate(&[q], &poly, 0.3, &g).unwrap();
            close(got.value, expect, 1e-8);
        }
    }

    #[test]
    fn enumerate_guard() {
        let poly = Polyhedron::new(vec![vec![1.0; 9]], vec![1.0]).unwrap();
        assert_eq!(
            project_enumerate(&[0.0; 9], &poly, 0.0, &Distortion::identity()),
            Err(ProjError::DimensionTooLarge(9))
        );
    }

    #[test]
    fn enumerate_matches_lp_for_convex() {
        let mut rng = SplitMix64::new(17);
        let g = Distortion::power(2.0).unwrap();
        for _ in 0..5 {
            let n = 2 + rng.next_below(3) as usize;
            let m = 1 + rng.next_below(3) as usize;
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.next_f64()).collect())
                .collect();
            let b: Vec<f64> = (0..m).map(|_| 0.5 + rng.next_f64()).collect();
            let poly = Polyhedron::new(a, b).unwrap();
            let q: Vec<f64> = (0..n).map(|_| 1.0 + rng.next_f64()).collect();
            let alpha = 0.3 * rng.next_f64();
            let via_lp = project_lp(&q, &poly, alpha, &g).unwrap();
            let via_enum = project_enumerate(&q, &poly, alpha, &g).unwrap();
            close(via_lp.value, via_enum.value, 1e-6);
        }
    }

    #[test]
    fn milp_matches_enumerate_nonconvex() {
        // sqrt is concave: project_lp is out, the other two routes must agree.
        let mut rng = SplitMix64::new(23);
        let g = Distortion::sqrt();
        for _ in 0..5 {
            let n = 2 + rng.next_below(2) as usize;
            let m = 1 + rng.next_below(2) as usize;
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.next_f64()).collect())
                .collect();
            let b: Vec<f64> = (0..m).map(|_| 0.5 + rng.next_f64()).collect();
            let poly = Polyhedron::new(a, b).unwrap();
            let q: Vec<f64> = (0..n).map(|_| 1.0 + rng.next_f64()).collect();
            let alpha = 0.4 * rng.next_f64();
            let via_enum = project_enumerate(&q, &poly, alpha, &g).unwrap();
            let via_milp = project_milp(&q, &poly, alpha, &g, &MilpOptions::default()).unwrap();
            close(via_milp.value, via_enum.value, 1e-6);
            assert!(poly.contains(&via_milp.minimizer, 1e-7));
        }
    }

    #[test]
    fn milp_feasible_point_is_zero() {
        let g = Distortion::sqrt();
        let got = project_milp(
            &[0.25, 0.25],
            &simplex_poly(),
            0.2,
            &g,
            &MilpOptions::default(),
        )
        .unwrap();
        close(got.value, 0.0, 1e-8);
    }

    #[test]
    fn milp_node_budget_error() {
        let g = Distortion::identity();
        let err = project_milp(
            &[1.0, 1.0],
            &simplex_poly(),
            0.0,
            &g,
            &MilpOptions { node_limit: 1 },
        )
        .unwrap_err();
        match err {
            ProjError::NodeLimitExceeded { limit, nodes, .. } => {
                assert_eq!(limit, 1);
                assert_eq!(nodes, 1);
            }
            other => panic!("expected node limit error, got {other:?}"),
        }
    }

    #[test]
    fn milp_permutation_sorts_deviations() {
        let g = Distortion::power(2.0).unwrap();
        let got = project_milp(
            &[2.0, 0.1],
            &simplex_poly(),
            0.0,
            &g,
            &MilpOptions::default(),
        )
        .unwrap();
        let dev: Vec<f64> = [2.0, 0.1]
            .iter()
            .zip(&got.minimizer)
            .map(|(a, b)| (a - b).abs())
            .collect();
        assert!(dev[got.permutation[0]] <= dev[got.permutation[1]] + 1e-12);
    }

    #[test]
    fn node_and_full_relaxation_are_valid_bounds() {
        // Both the search's node LP and the textbook big-M relaxation must
        // lower-bound the exact optimum, at the root and along the optimal
        // assignment (where the fixed subproblem's optimum equals the global
        // one).
        let g = Distortion::power(2.0).unwrap();
        let poly =
            Polyhedron::new(vec![vec![1.0, 1.0, 0.5], vec![0.3, 0.8, 1.0]], vec![1.0, 0.9])
                .unwrap();
        let q = [1.2, 0.8, 1.5];
        let alpha = 0.1;
        let n = q.len();
        let model = MilpModel::new(&q, &poly, alpha, &g).unwrap();
        let exact = project_enumerate(&q, &poly, alpha, &g).unwrap().value;
        let milp = project_milp(&q, &poly, alpha, &g, &MilpOptions::default()).unwrap();
        close(milp.value, exact, 1e-6);

        let (root_bound, _) = lp_solve(&model.node_lp(&[])).unwrap().optimal().unwrap();
        assert!(root_bound <= exact + 1e-7);
        let (full_bound, _) = lp_solve(&model.relaxation(&[], &[]))
            .unwrap()
            .optimal()
            .unwrap();
        assert!(full_bound <= exact + 1e-7);

        // Pin the optimal top variable; the fixed subproblem optimum is then
        // the global optimum, so both bounds must stay below it.
        let top = milp.permutation[n - 1];
        let (node_bound, _) = lp_solve(&model.node_lp(&[top]))
            .unwrap()
            .optimal()
            .unwrap();
        assert!(node_bound <= exact + 1e-7);
        let zeros: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| [(n - 1, i), (i, top)])
            .filter(|&(p, k)| !(p == n - 1 && k == top))
            .collect();
        let (full_fixed_bound, _) = lp_solve(&model.relaxation(&[(n - 1, top)], &zeros))
            .unwrap()
            .optimal()
            .unwrap();
        assert!(full_fixed_bound <= exact + 1e-7);
    }

    #[test]
    fn milp_deterministic() {
        let g = Distortion::power(2.0).unwrap();
        let a = project_milp(&[1.0, 2.0], &simplex_poly(), 0.1, &g, &MilpOptions::default())
            .unwrap();
        let b = project_milp(&[1.0, 2.0], &simplex_poly(), 0.1, &g, &MilpOptions::default())
            .unwrap();
        assert_eq!(a, b);
    }
}
