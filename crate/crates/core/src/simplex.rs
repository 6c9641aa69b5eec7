//! Self-contained dense linear-programming solver.
//!
//! Two-phase primal simplex on a dense tableau with bounded variables:
//! upper bounds are handled in the ratio test (bound flips) instead of extra
//! rows, lower bounds are shifted to zero, and rows/columns are equilibrated
//! before phase 1. Pivoting is deterministic (lowest-index tie-breaks) and
//! Bland's rule engages while pivots are degenerate, so the solver terminates
//! on cycling-prone inputs. Day-horizon scheduling LPs are a few hundred
//! variables, well inside dense-tableau territory.

use thiserror::Error;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Eq => write!(f, "="),
            Relation::Ge => write!(f, ">="),
        }
    }
}

/// One linear constraint `coeffs · x (relation) rhs`.
#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization LP with per-variable box bounds.
///
/// Lower bounds must be finite (they are shifted to zero internally);
/// upper bounds may be `f64::INFINITY`.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, bounds: Vec<(f64, f64)>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(LpConstraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if n == 0 {
            return Err(LpError::Invalid("problem has no variables".into()));
        }
        if self.bounds.len() != n {
            return Err(LpError::Invalid(format!(
                "bounds length {} != n_vars {n}",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Invalid("non-finite objective coefficient".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() {
                return Err(LpError::Invalid(format!("variable {j}: lower bound must be finite")));
            }
            if hi.is_nan() || hi < lo {
                return Err(LpError::Invalid(format!(
                    "variable {j}: invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Invalid(format!(
                    "constraint {i}: {} coefficients for {n} variables",
                    row.coeffs.len()
                )));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
                return Err(LpError::Invalid(format!("constraint {i}: non-finite entry")));
            }
        }
        Ok(())
    }

    /// Plain-text dump, one constraint per line, for external cross-checks.
    pub fn to_debug_text(&self) -> String {
        let term = |c: f64, j: usize| format!("{c}*x{j}");
        let mut out = String::from("minimize: ");
        out.push_str(
            &self
                .objective
                .iter()
                .enumerate()
                .map(|(j, &c)| term(c, j))
                .collect::<Vec<_>>()
                .join(" + "),
        );
        out.push_str("\nsubject to:\n");
        for (i, row) in self.constraints.iter().enumerate() {
            let lhs = row
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(|(j, &c)| term(c, j))
                .collect::<Vec<_>>()
                .join(" + ");
            let lhs = if lhs.is_empty() { "0".to_string() } else { lhs };
            out.push_str(&format!("  r{i}: {lhs} {} {}\n", row.relation, row.rhs));
        }
        out.push_str("bounds:\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            out.push_str(&format!("  {lo} <= x{j} <= {hi}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; meaningful when status is `Optimal`.
    pub x: Vec<f64>,
    /// `objective · x` for optimal solutions, 0 otherwise.
    pub objective_value: f64,
    pub iterations: usize,
    /// Constraint rows that could not be satisfied (phase-1 leftovers);
    /// nonempty only when status is `Infeasible`.
    pub infeasible_rows: Vec<usize>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("iteration limit exceeded after {iterations} iterations")]
    IterationLimit { iterations: usize },
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Pivot cap; `None` means `10_000 * n_vars`.
    pub max_iterations: Option<usize>,
    /// Entries below this are treated as zero when pivoting.
    pub pivot_tol: f64,
    /// Feasibility tolerance on phase-1 residuals.
    pub feas_tol: f64,
    /// Reduced costs within this of zero do not qualify for entering.
    pub reduced_cost_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            pivot_tol: 1e-10,
            feas_tol: 1e-9,
            reduced_cost_tol: 1e-9,
        }
    }
}

/// Solve with default options.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    solve_with(problem, &SolverOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    ncols: usize,
    n_structural: usize,
    rows: Vec<Vec<f64>>,
    /// Current value of every column variable, in the shifted/scaled domain.
    x: Vec<f64>,
    upper: Vec<f64>,
    status: Vec<VarStatus>,
    basis: Vec<usize>,
    artificial: Vec<bool>,
    iterations: usize,
    max_iterations: usize,
    opts: SolverOptions,
    /// Bland's rule is active while the previous pivot was degenerate.
    bland: bool,
}

enum PhaseOutcome {
    Converged,
    Unbounded,
}

impl Tableau {
    /// One simplex phase: pivot until no improving reduced cost remains.
    fn run(&mut self, costs: &[f64], allow_artificial_entering: bool) -> Result<PhaseOutcome, LpError> {
        loop {
            if self.iterations >= self.max_iterations {
                return Err(LpError::IterationLimit {
                    iterations: self.iterations,
                });
            }
            let reduced = self.reduced_costs(costs);
            let entering = self.pick_entering(&reduced, allow_artificial_entering);
            let Some(j) = entering else {
                return Ok(PhaseOutcome::Converged);
            };
            let dir: f64 = if self.status[j] == VarStatus::AtLower { 1.0 } else { -1.0 };

            // Bounded ratio test: the entering variable travels until its own
            // opposite bound or until a basic variable hits one of its bounds.
            let mut theta = self.upper[j];
            let mut leaving: Option<(usize, VarStatus)> = None;
            for i in 0..self.m {
                let rate = dir * self.rows[i][j];
                let b = self.basis[i];
                let (t, hit) = if rate > self.opts.pivot_tol {
                    (self.x[b].max(0.0) / rate, VarStatus::AtLower)
                } else if rate < -self.opts.pivot_tol && self.upper[b].is_finite() {
                    ((self.upper[b] - self.x[b]).max(0.0) / -rate, VarStatus::AtUpper)
                } else {
                    continue;
                };
                // Strictly better, or a tie broken toward the lowest leaving
                // variable index (deterministic, Bland-compatible).
                let replace = if t < theta - 1e-12 {
                    true
                } else if t <= theta + 1e-12 {
                    match leaving {
                        None => true,
                        Some((r, _)) => b < self.basis[r],
                    }
                } else {
                    false
                };
                if replace {
                    theta = theta.min(t);
                    leaving = Some((i, hit));
                }
            }

            if theta.is_infinite() {
                return Ok(PhaseOutcome::Unbounded);
            }
            self.bland = theta <= 1e-11;

            // Move the entering variable and update basic values.
            let step = dir * theta;
            for i in 0..self.m {
                let b = self.basis[i];
                self.x[b] -= step * self.rows[i][j];
            }
            self.x[j] += step;

            match leaving {
                None => {
                    // Bound flip: no basis change.
                    self.status[j] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.x[j] = if dir > 0.0 { self.upper[j] } else { 0.0 };
                }
                Some((r, hit)) => {
                    let out = self.basis[r];
                    self.x[out] = if hit == VarStatus::AtUpper { self.upper[out] } else { 0.0 };
                    self.status[out] = hit;
                    self.status[j] = VarStatus::Basic;
                    self.basis[r] = j;
                    self.pivot(r, j);
                }
            }
            self.iterations += 1;
        }
    }

    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        // d = c - c_B^T (B^-1 A); self.rows already holds B^-1 A.
        let mut d = costs.to_vec();
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.rows[i];
                for j in 0..self.ncols {
                    d[j] -= cb * row[j];
                }
            }
        }
        d
    }

    fn pick_entering(&self, reduced: &[f64], allow_artificial: bool) -> Option<usize> {
        let tol = self.opts.reduced_cost_tol;
        let eligible = |j: usize| -> Option<f64> {
            if self.status[j] == VarStatus::Basic {
                return None;
            }
            if self.artificial[j] && !allow_artificial {
                return None;
            }
            // Fixed variables (zero travel) never enter.
            if self.upper[j] <= 0.0 {
                return None;
            }
            let d = reduced[j];
            match self.status[j] {
                VarStatus::AtLower if d < -tol => Some(-d),
                VarStatus::AtUpper if d > tol => Some(d),
                _ => None,
            }
        };

        if self.bland {
            (0..self.ncols).find(|&j| eligible(j).is_some())
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if let Some(score) = eligible(j) {
                    if best.map_or(true, |(_, s)| score > s) {
                        best = Some((j, score));
                    }
                }
            }
            best.map(|(j, _)| j)
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let pr = self.rows[r][j];
        debug_assert!(pr.abs() > self.opts.pivot_tol);
        let inv = 1.0 / pr;
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[r].clone();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let factor = self.rows[i][j];
            if factor != 0.0 {
                let row = &mut self.rows[i];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[j] = 0.0;
            }
        }
    }
}

/// Solve a minimization LP.
///
/// Returns `Ok` with status `Optimal`, `Infeasible` or `Unbounded`;
/// iteration-limit exhaustion is an `Err`, distinct from infeasibility.
pub fn solve_with(problem: &LpProblem, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    problem.validate()?;
    let n = problem.n_vars();
    let m = problem.constraints.len();

    // Shift lower bounds to zero and convert >= rows to <=.
    let lower: Vec<f64> = problem.bounds.iter().map(|b| b.0).collect();
    let gap: Vec<f64> = problem.bounds.iter().map(|b| b.1 - b.0).collect();
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    let mut is_eq: Vec<bool> = Vec::with_capacity(m);
    for row in &problem.constraints {
        let shift: f64 = row.coeffs.iter().zip(&lower).map(|(c, l)| c * l).sum();
        let (mut coeffs, mut b) = (row.coeffs.clone(), row.rhs - shift);
        if row.relation == Relation::Ge {
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
            b = -b;
        }
        a.push(coeffs);
        rhs.push(b);
        is_eq.push(row.relation == Relation::Eq);
    }

    // Equilibration: rows then columns by max-abs entry.
    let mut col_scale = vec![1.0f64; n];
    for i in 0..m {
        let max = a[i].iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        if max > 0.0 {
            let s = 1.0 / max;
            for c in a[i].iter_mut() {
                *c *= s;
            }
            rhs[i] *= s;
        }
    }
    for j in 0..n {
        let max = (0..m).fold(0.0f64, |acc, i| acc.max(a[i][j].abs()));
        if max > 0.0 {
            let s = 1.0 / max;
            for row in a.iter_mut() {
                row[j] *= s;
            }
            col_scale[j] = s;
        }
    }
    // z = y / col_scale, so bounds and costs scale the opposite way.
    let scaled_gap: Vec<f64> = gap.iter().zip(&col_scale).map(|(g, s)| g / s).collect();
    let scaled_obj: Vec<f64> = problem
        .objective
        .iter()
        .zip(&col_scale)
        .map(|(c, s)| c * s)
        .collect();

    // Assemble columns: structural, slacks for <= rows, artificials.
    let n_slacks = is_eq.iter().filter(|&&e| !e).count();
    let mut columns = n + n_slacks;
    let mut slack_col = vec![usize::MAX; m];
    {
        let mut next = n;
        for i in 0..m {
            if !is_eq[i] {
                slack_col[i] = next;
                next += 1;
            }
        }
    }
    // Rows with negative rhs are negated so every initial basic value is >= 0.
    let mut negated = vec![false; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            negated[i] = true;
            rhs[i] = -rhs[i];
            for c in a[i].iter_mut() {
                *c = -*c;
            }
        }
    }
    // A slack can seed the basis only where its coefficient stayed +1.
    let needs_artificial: Vec<bool> = (0..m).map(|i| is_eq[i] || negated[i]).collect();
    let mut artificial_col = vec![usize::MAX; m];
    for i in 0..m {
        if needs_artificial[i] {
            artificial_col[i] = columns;
            columns += 1;
        }
    }

    let mut rows = vec![vec![0.0f64; columns]; m];
    for i in 0..m {
        rows[i][..n].copy_from_slice(&a[i]);
        if slack_col[i] != usize::MAX {
            rows[i][slack_col[i]] = if negated[i] { -1.0 } else { 1.0 };
        }
        if artificial_col[i] != usize::MAX {
            rows[i][artificial_col[i]] = 1.0;
        }
    }

    let mut upper = vec![f64::INFINITY; columns];
    upper[..n].copy_from_slice(&scaled_gap);
    let mut artificial = vec![false; columns];
    for i in 0..m {
        if artificial_col[i] != usize::MAX {
            artificial[artificial_col[i]] = true;
        }
    }

    let mut x = vec![0.0f64; columns];
    let mut status = vec![VarStatus::AtLower; columns];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let b = if needs_artificial[i] { artificial_col[i] } else { slack_col[i] };
        basis[i] = b;
        status[b] = VarStatus::Basic;
        x[b] = rhs[i];
    }

    let max_iterations = opts.max_iterations.unwrap_or(10_000 * n);
    let mut tableau = Tableau {
        m,
        ncols: columns,
        n_structural: n,
        rows,
        x,
        upper,
        status,
        basis,
        artificial,
        iterations: 0,
        max_iterations,
        opts: *opts,
        bland: false,
    };

    // Phase 1: minimize the artificial sum.
    if tableau.artificial.iter().any(|&a| a) {
        let mut phase1_costs = vec![0.0f64; columns];
        for (j, &is_art) in tableau.artificial.iter().enumerate() {
            if is_art {
                phase1_costs[j] = 1.0;
            }
        }
        match tableau.run(&phase1_costs, true)? {
            PhaseOutcome::Converged => {}
            PhaseOutcome::Unbounded => {
                return Err(LpError::Numerical(
                    "phase 1 reported an unbounded ray; the artificial objective is bounded below".into(),
                ));
            }
        }
        let residual: f64 = (0..columns).filter(|&j| tableau.artificial[j]).map(|j| tableau.x[j]).sum();
        if residual > opts.feas_tol {
            let infeasible_rows: Vec<usize> = (0..m)
                .filter(|&i| tableau.artificial[tableau.basis[i]] && tableau.x[tableau.basis[i]] > opts.feas_tol)
                .collect();
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective_value: 0.0,
                iterations: tableau.iterations,
                infeasible_rows,
            });
        }
        // Pin artificials to zero for phase 2; any pivot touching their row
        // now kicks them out degenerately and they can never re-enter.
        for j in 0..columns {
            if tableau.artificial[j] {
                tableau.upper[j] = 0.0;
                tableau.x[j] = 0.0;
            }
        }
    }

    // Phase 2: the real objective (zero-padded over slack/artificial columns).
    let mut phase2_costs = vec![0.0f64; columns];
    phase2_costs[..n].copy_from_slice(&scaled_obj);
    let outcome = tableau.run(&phase2_costs, false)?;

    let iterations = tableau.iterations;
    match outcome {
        PhaseOutcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; n],
            objective_value: 0.0,
            iterations,
            infeasible_rows: Vec::new(),
        }),
        PhaseOutcome::Converged => {
            let n_structural = tableau.n_structural;
            let mut x = vec![0.0f64; n_structural];
            for j in 0..n_structural {
                let mut v = lower[j] + col_scale[j] * tableau.x[j];
                // Snap float dirt onto the box.
                let (lo, hi) = problem.bounds[j];
                if v < lo {
                    v = if lo - v < 1e-7 { lo } else { v };
                }
                if v > hi {
                    v = if v - hi < 1e-7 { hi } else { v };
                }
                x[j] = v;
            }
            let objective_value: f64 = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                x,
                objective_value,
                iterations,
                infeasible_rows: Vec::new(),
            })
        }
    }
}

/// A single constraint or bound violated beyond tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: usize,
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Constraint,
    LowerBound,
    UpperBound,
}

/// List every constraint and bound `x` violates by more than `tol`.
/// An empty report means `x` is feasible at that tolerance.
pub fn check_feasible(problem: &LpProblem, x: &[f64], tol: f64) -> Vec<Violation> {
    assert_eq!(x.len(), problem.n_vars(), "dimension mismatch");
    let mut violations = Vec::new();
    for (j, (&xj, &(lo, hi))) in x.iter().zip(&problem.bounds).enumerate() {
        if xj < lo - tol {
            violations.push(Violation {
                kind: ViolationKind::LowerBound,
                index: j,
                amount: lo - xj,
            });
        }
        if xj > hi + tol {
            violations.push(Violation {
                kind: ViolationKind::UpperBound,
                index: j,
                amount: xj - hi,
            });
        }
    }
    for (i, row) in problem.constraints.iter().enumerate() {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        let overshoot = match row.relation {
            Relation::Le => lhs - row.rhs,
            Relation::Ge => row.rhs - lhs,
            Relation::Eq => (lhs - row.rhs).abs(),
        };
        if overshoot > tol {
            violations.push(Violation {
                kind: ViolationKind::Constraint,
                index: i,
                amount: overshoot,
            });
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(objective: Vec<f64>, bounds: Vec<(f64, f64)>) -> LpProblem {
        LpProblem::new(objective, bounds)
    }

    #[test]
    fn two_variable_vertex() {
        // min -2x - y, x + y <= 1, x <= 0.6, x,y >= 0 -> (0.6, 0.4), -1.6
        let mut p = lp(vec![-2.0, -1.0], vec![(0.0, 0.6), (0.0, f64::INFINITY)]);
        p.push_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - -1.6).abs() < 1e-9);
        assert!((s.x[0] - 0.6).abs() < 1e-9);
        assert!((s.x[1] - 0.4).abs() < 1e-9);
    }

    #[test]
    fn bound_attaining_minimum() {
        let p = lp(vec![1.0], vec![(0.0, f64::INFINITY)]);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective_value, 0.0);
    }

    #[test]
    fn unbounded_ray_detected() {
        let p = lp(vec![-1.0], vec![(0.0, f64::INFINITY)]);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn phase1_detects_infeasible() {
        // x <= 0 and x >= 1 cannot hold together.
        let mut p = lp(vec![0.0], vec![(0.0, f64::INFINITY)]);
        p.push_constraint(vec![1.0], Relation::Le, 0.0);
        p.push_constraint(vec![1.0], Relation::Ge, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert!(!s.infeasible_rows.is_empty());
    }

    #[test]
    fn equality_row_with_negative_rhs() {
        // x - y = -2 with x,y in [0, 5]; min x + y -> x = 0, y = 2.
        let mut p = lp(vec![1.0, 1.0], vec![(0.0, 5.0), (0.0, 5.0)]);
        p.push_constraint(vec![1.0, -1.0], Relation::Eq, -2.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-9);
        assert!((s.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn shifted_lower_bounds() {
        // min x + 2y with x >= 1.5, y >= -2, x + y >= 1 -> unique (3, -2).
        let mut p = lp(vec![1.0, 2.0], vec![(1.5, f64::INFINITY), (-2.0, f64::INFINITY)]);
        p.push_constraint(vec![1.0, 1.0], Relation::Ge, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - -1.0).abs() < 1e-9);
        assert!((s.x[0] - 3.0).abs() < 1e-9);
        assert!((s.x[1] - -2.0).abs() < 1e-9);
        assert!(check_feasible(&p, &s.x, 1e-9).is_empty());
    }

    #[test]
    fn fixed_variables_are_respected() {
        // y fixed at 2; min x s.t. x + y >= 3 -> x = 1.
        let mut p = lp(vec![1.0, 0.0], vec![(0.0, f64::INFINITY), (2.0, 2.0)]);
        p.push_constraint(vec![1.0, 1.0], Relation::Ge, 3.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rows_terminate() {
        // Duplicated and redundant rows force degenerate pivots.
        let mut p = lp(vec![-1.0, -1.0], vec![(0.0, 1.0), (0.0, 1.0)]);
        for _ in 0..4 {
            p.push_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        }
        p.push_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        p.push_constraint(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - -1.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_limit_is_distinct_error() {
        let mut p = lp(vec![-1.0, -1.0], vec![(0.0, 1.0), (0.0, 1.0)]);
        p.push_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        let opts = SolverOptions {
            max_iterations: Some(0),
            ..SolverOptions::default()
        };
        assert!(matches!(
            solve_with(&p, &opts),
            Err(LpError::IterationLimit { .. })
        ));
    }

    #[test]
    fn objective_scaling_invariance() {
        let mut p = lp(vec![-2.0, -1.0], vec![(0.0, 0.6), (0.0, 2.0)]);
        p.push_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        let base = solve(&p).unwrap();
        let mut scaled = p.clone();
        for c in scaled.objective.iter_mut() {
            *c *= 37.5;
        }
        let s = solve(&scaled).unwrap();
        assert_eq!(s.status, base.status);
        assert!((s.objective_value - 37.5 * base.objective_value).abs() < 1e-7);
        // The scaled optimum is optimal for the original problem too.
        let obj_at_scaled_x: f64 = p.objective.iter().zip(&s.x).map(|(c, v)| c * v).sum();
        assert!((obj_at_scaled_x - base.objective_value).abs() < 1e-7);
    }

    #[test]
    fn check_feasible_reports_constructed_violation() {
        let mut p = lp(vec![0.0], vec![(0.0, f64::INFINITY)]);
        p.push_constraint(vec![1.0], Relation::Ge, 1.0);
        let report = check_feasible(&p, &[0.0], 1e-9);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::Constraint);
        assert!((report[0].amount - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_solutions_pass_check_feasible() {
        let mut p = lp(
            vec![1.0, -2.0, 0.5],
            vec![(0.0, 4.0), (0.0, 3.0), (-1.0, 1.0)],
        );
        p.push_constraint(vec![1.0, 1.0, 0.0], Relation::Le, 5.0);
        p.push_constraint(vec![0.0, 1.0, -1.0], Relation::Ge, 0.5);
        p.push_constraint(vec![1.0, 0.0, 1.0], Relation::Eq, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(check_feasible(&p, &s.x, 1e-9).is_empty());
    }

    #[test]
    fn debug_text_lists_each_constraint() {
        let mut p = lp(vec![1.0, 2.0], vec![(0.0, 1.0), (0.0, f64::INFINITY)]);
        p.push_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        p.push_constraint(vec![1.0, -1.0], Relation::Eq, 0.0);
        let text = p.to_debug_text();
        assert!(text.contains("r0: 1*x0 + 1*x1 <= 1"));
        assert!(text.contains("r1: 1*x0 + -1*x1 = 0"));
    }

    #[test]
    fn rejects_invalid_problems() {
        let p = lp(vec![], vec![]);
        assert!(matches!(solve(&p), Err(LpError::Invalid(_))));

        let p = lp(vec![1.0], vec![(f64::NEG_INFINITY, 0.0)]);
        assert!(matches!(solve(&p), Err(LpError::Invalid(_))));

        let p = lp(vec![1.0], vec![(1.0, 0.0)]);
        assert!(matches!(solve(&p), Err(LpError::Invalid(_))));

        let mut p = lp(vec![1.0], vec![(0.0, 1.0)]);
        p.push_constraint(vec![f64::NAN], Relation::Le, 1.0);
        assert!(matches!(solve(&p), Err(LpError::Invalid(_))));
    }
}
