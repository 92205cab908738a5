//! Dense two-phase primal simplex over non-negative variables.
//!
//! Pivoting follows Bland's least-index rule in both phases, which rules out
//! cycling and makes the outcome a deterministic function of the input.

use std::fmt;

use crate::{Error, Result};

/// Feasibility tolerance on constraint rows of a returned solution.
pub const TOL_FEAS: f64 = 1e-7;
/// Tolerance on the reported objective value.
pub const TOL_OBJ: f64 = 1e-7;

/// Entries smaller than this are treated as zero when choosing pivots.
const PIVOT_EPS: f64 = 1e-11;
/// Reduced costs above `-COST_EPS` do not improve the objective.
const COST_EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (lhs - rhs).abs() <= tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Le => lhs <= rhs + tol,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        })
    }
}

/// `coeffs · x  relation  rhs`
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.relation.holds(self.lhs(x), self.rhs, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Optimize `objective · x` subject to `constraints` and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub var_count: usize,
    pub objective: Vec<f64>,
    pub direction: Direction,
    pub constraints: Vec<LinearConstraint>,
}

impl LinearProgram {
    pub fn new(direction: Direction, objective: Vec<f64>, constraints: Vec<LinearConstraint>) -> Self {
        Self {
            var_count: objective.len(),
            objective,
            direction,
            constraints,
        }
    }

    pub fn maximize(objective: Vec<f64>, constraints: Vec<LinearConstraint>) -> Self {
        Self::new(Direction::Maximize, objective, constraints)
    }

    pub fn minimize(objective: Vec<f64>, constraints: Vec<LinearConstraint>) -> Self {
        Self::new(Direction::Minimize, objective, constraints)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, solution: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> Status {
        match self {
            LpOutcome::Optimal { .. } => Status::Optimal,
            LpOutcome::Infeasible => Status::Infeasible,
            LpOutcome::Unbounded => Status::Unbounded,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

/// True iff some `x >= 0` satisfies every constraint.
pub fn feasible(constraints: &[LinearConstraint], var_count: usize) -> Result<bool> {
    let p = LinearProgram::new(Direction::Minimize, vec![0.0; var_count], constraints.to_vec());
    Ok(solve(&p)?.status() != Status::Infeasible)
}

pub fn solve(p: &LinearProgram) -> Result<LpOutcome> {
    check_dimensions(p)?;
    Tableau::new(p).run(p)
}

fn check_dimensions(p: &LinearProgram) -> Result<()> {
    if p.objective.len() != p.var_count {
        return Err(Error::NumericFailure(format!(
            "objective has {} coefficients for {} variables",
            p.objective.len(),
            p.var_count
        )));
    }
    for (i, c) in p.constraints.iter().enumerate() {
        if c.coeffs.len() != p.var_count {
            return Err(Error::NumericFailure(format!(
                "constraint {i} has {} coefficients for {} variables",
                c.coeffs.len(),
                p.var_count
            )));
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure(format!(
                "constraint {i} has a non-finite coefficient"
            )));
        }
    }
    if p.objective.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("non-finite objective".into()));
    }
    Ok(())
}

/// Column layout: structural variables, then one slack/surplus per inequality
/// row, then one artificial per row that needs one. Each row stores its
/// right-hand side in the last position.
struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    structural: usize,
    first_artificial: usize,
    width: usize,
    iterations: usize,
    max_iterations: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(p: &LinearProgram) -> Self {
        let n = p.var_count;
        let m = p.constraints.len();
        // Normalize to rhs >= 0.
        let normalized: Vec<(Vec<f64>, Relation, f64)> = p
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    (
                        c.coeffs.iter().map(|v| -v).collect(),
                        c.relation.flipped(),
                        -c.rhs,
                    )
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();
        let slack_count = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let artificial_count = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let first_artificial = n + slack_count;
        let width = first_artificial + artificial_count;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for (coeffs, relation, rhs) in normalized {
            let mut row = vec![0.0; width + 1];
            row[..n].copy_from_slice(&coeffs);
            row[width] = rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Self {
            rows,
            basis,
            structural: n,
            first_artificial,
            width,
            iterations: 0,
            max_iterations: 50 * (n + m).max(1),
        }
    }

    fn run(mut self, p: &LinearProgram) -> Result<LpOutcome> {
        // Phase 1: minimize the sum of artificials.
        if self.first_artificial < self.width {
            let mut cost = vec![0.0; self.width];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            let mut obj = self.reduced_costs(&cost);
            self.optimize(&mut obj, self.width)?;
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.rows)
                .filter(|(b, _)| **b >= self.first_artificial)
                .map(|(_, r)| r[self.width])
                .sum();
            if infeasibility > TOL_FEAS {
                return Ok(LpOutcome::Infeasible);
            }
            self.drive_out_artificials();
        }

        // Phase 2 on the original objective, written as a minimization.
        let sign = match p.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        };
        let mut cost = vec![0.0; self.width];
        for (c, v) in cost.iter_mut().zip(&p.objective) {
            *c = sign * v;
        }
        let mut obj = self.reduced_costs(&cost);
        match self.optimize(&mut obj, self.first_artificial)? {
            PhaseEnd::Unbounded => Ok(LpOutcome::Unbounded),
            PhaseEnd::Optimal => {
                let mut solution = vec![0.0; self.structural];
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if b < self.structural {
                        solution[b] = row[self.width].max(0.0);
                    }
                }
                let value = p.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
                Ok(LpOutcome::Optimal { value, solution })
            }
        }
    }

    /// Objective row `c_j - c_B B^-1 A_j`, with `-c_B B^-1 b` in the last slot.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, r) in obj.iter_mut().zip(row) {
                    *o -= cb * r;
                }
            }
        }
        obj
    }

    /// Minimizes using columns `0..allowed` as entering candidates.
    fn optimize(&mut self, obj: &mut [f64], allowed: usize) -> Result<PhaseEnd> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j] < -COST_EPS) else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_EPS {
                    let ratio = row[self.width] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || ((ratio - lr).abs() <= 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((leave, _)) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };
            self.pivot(leave, enter, Some(obj))?;
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: Option<&mut [f64]>) -> Result<()> {
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::NumericFailure(format!(
                "simplex exceeded {} iterations",
                self.max_iterations
            )));
        }
        let pivot = self.rows[r][c];
        if !pivot.is_finite() || pivot.abs() <= PIVOT_EPS {
            return Err(Error::NumericFailure("degenerate pivot element".into()));
        }
        for v in self.rows[r].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[c] = 0.0;
            }
        }
        if let Some(obj) = obj {
            let factor = obj[c];
            if factor != 0.0 {
                for (v, p) in obj.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                obj[c] = 0.0;
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Pivots remaining (zero-valued) artificials out of the basis; rows with
    /// no structural or slack support are redundant and dropped.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial)
                    .filter(|&j| self.rows[i][j].abs() > 1e-9)
                    .max_by(|&a, &b| {
                        self.rows[i][a]
                            .abs()
                            .partial_cmp(&self.rows[i][b].abs())
                            .unwrap()
                            .then(b.cmp(&a))
                    });
                match col {
                    Some(j) => {
                        // Cannot fail: the pivot is nonzero and finite.
                        let _ = self.pivot(i, j, None);
                        self.iterations -= 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
