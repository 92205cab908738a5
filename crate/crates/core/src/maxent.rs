//! Maximum-entropy completion of the hard theory.
//!
//! The entropy maximizer over `{p >= 0, sum p = 1, G p rel b}` has the Gibbs
//! form `p_w ∝ exp(-(G^T λ)_w)` on the worlds that can carry mass at all. We
//! first find those worlds with linear programs (every other world is frozen
//! at zero) and then minimize the convex dual
//!
//! ```text
//! f(λ) = log Σ_w exp(-(G^T λ)_w) + b·λ,       λ_i >= 0 for inequality rows
//! ```
//!
//! by projected Newton steps. The gradient is `b - G p` and the Hessian is the
//! covariance of the rows under `p`.

use nalgebra::{DMatrix, DVector};

use crate::entail::{consistent, ConstraintSet};
use crate::kb::{CIGTuple, Conditional};
use crate::lp::{self, LinearConstraint, LinearProgram, LpOutcome, Relation};
use crate::worlds::{WorldSet, WorldTable};
use crate::{Result, DEFAULT_TOL};

/// Convergence threshold on the residual.
pub const DEFAULT_TOL_ME: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// A probability vector indexed by world.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    /// `None` unless every entry is nonnegative and the entries sum to one,
    /// both within `tol`.
    pub fn new(p: Vec<f64>, tol: f64) -> Option<Self> {
        let total: f64 = p.iter().sum();
        (p.iter().all(|&v| v >= -tol) && (total - 1.0).abs() <= tol).then_some(Self { p })
    }

    pub fn uniform(world_count: usize) -> Self {
        Self {
            p: vec![1.0 / world_count as f64; world_count],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn mass(&self, set: &WorldSet) -> f64 {
        set.iter().map(|w| self.p[w]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeStatus {
    Ok,
    Infeasible,
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct MeResult {
    pub status: MeStatus,
    /// Present when the status is `Ok`.
    pub dist: Option<Distribution>,
    pub entropy: f64,
    pub iterations: usize,
    /// Largest row violation or complementarity product at termination.
    pub residual: f64,
    /// Worlds that no admissible distribution can give positive mass.
    pub frozen: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MaxEntSolver {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting multipliers, one per non-normalization row of the constraint
    /// set. Inequality multipliers are clamped to be nonnegative.
    pub init: Option<Vec<f64>>,
}

impl Default for MaxEntSolver {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL_ME,
            max_iter: DEFAULT_MAX_ITER,
            init: None,
        }
    }
}

pub fn max_entropy(cs: &ConstraintSet) -> Result<MeResult> {
    MaxEntSolver::default().solve(cs)
}

/// Natural-log entropy with `0 log 0 = 0`.
pub fn entropy(d: &Distribution) -> f64 {
    -d.p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// `P(q.target | q.given)` under `d`; `None` when `P(q.given) <= tol`.
pub fn me_query(d: &Distribution, table: &WorldTable, q: &Conditional, tol: f64) -> Result<Option<f64>> {
    let given = table.satisfying_set(&q.given)?;
    let joint = table.satisfying_set(&q.target)?.intersection(&given);
    let denom = d.mass(&given);
    Ok((denom > tol).then(|| d.mass(&joint) / denom))
}

#[derive(Debug, Clone)]
pub struct CiCheck {
    pub tuple: CIGTuple,
    pub holds: bool,
    /// `|P(x & y | z) - P(x | z) P(y | z)|`, unset when `P(z)` is zero.
    pub discrepancy: Option<f64>,
}

pub fn ci_report(
    d: &Distribution,
    table: &WorldTable,
    tuples: &[CIGTuple],
    tol_ci: f64,
) -> Result<Vec<CiCheck>> {
    tuples
        .iter()
        .map(|t| {
            let z = table.satisfying_set(t.given())?;
            let pz = d.mass(&z);
            let discrepancy = if pz <= DEFAULT_TOL {
                None
            } else {
                let [x, y] = t.pair();
                let xz = table.satisfying_set(x)?.intersection(&z);
                let yz = table.satisfying_set(y)?.intersection(&z);
                let xyz = xz.intersection(&yz);
                let (px, py, pxy) = (d.mass(&xz) / pz, d.mass(&yz) / pz, d.mass(&xyz) / pz);
                Some((pxy - px * py).abs())
            };
            Ok(CiCheck {
                tuple: t.clone(),
                holds: discrepancy.is_some_and(|v| v <= tol_ci),
                discrepancy,
            })
        })
        .collect()
}

/// Worlds that some admissible distribution gives mass above `cs.tol()`.
/// Assumes `cs` is consistent.
pub fn support(cs: &ConstraintSet) -> Result<WorldSet> {
    let n = cs.world_count();
    let tol = cs.tol();
    let mut positive = WorldSet::empty(n);
    let mut unknown = WorldSet::full(n);
    while !unknown.is_empty() {
        // max ε with p_w = ε + q_w on the unknown worlds: ε > 0 means all of
        // them can be positive at once.
        if uniform_slack(cs, &unknown)? > tol {
            positive = positive.union(&unknown);
            break;
        }
        let w = unknown.iter().next().expect("nonempty");
        let mut single = WorldSet::empty(n);
        single.insert(w);
        match cs.witness(&single)? {
            Some(p) if p[w] > tol => {
                for (v, &pv) in p.iter().enumerate() {
                    if pv > tol {
                        positive.insert(v);
                    }
                }
                unknown = unknown.intersection(&positive.complement());
            }
            _ => unknown = unknown.intersection(&single.complement()),
        }
    }
    Ok(positive)
}

fn uniform_slack(cs: &ConstraintSet, set: &WorldSet) -> Result<f64> {
    let n = cs.world_count();
    let shift = set.indicator();
    let rows = cs
        .rows()
        .iter()
        .map(|r| {
            let mut coeffs = r.coeffs.clone();
            coeffs.push(r.coeffs.iter().zip(&shift).map(|(a, s)| a * s).sum());
            LinearConstraint::new(coeffs, r.relation, r.rhs)
        })
        .collect();
    let mut objective = vec![0.0; n];
    objective.push(1.0);
    Ok(match lp::solve(&LinearProgram::maximize(objective, rows))? {
        LpOutcome::Optimal { value, .. } => value,
        _ => 0.0,
    })
}

/// Rows in dual orientation: `Le` rows (including negated `Ge` rows) carry
/// nonnegative multipliers, `Eq` rows free ones.
struct DualRows {
    g: DMatrix<f64>,
    b: DVector<f64>,
    bounded: Vec<bool>,
}

impl DualRows {
    fn new(rows: &[LinearConstraint], active: &[usize]) -> Self {
        let m = rows.len();
        let mut g = DMatrix::zeros(m, active.len());
        let mut b = DVector::zeros(m);
        let mut bounded = vec![false; m];
        for (i, r) in rows.iter().enumerate() {
            let sign = if r.relation == Relation::Ge { -1.0 } else { 1.0 };
            for (j, &w) in active.iter().enumerate() {
                g[(i, j)] = sign * r.coeffs[w];
            }
            b[i] = sign * r.rhs;
            bounded[i] = r.relation != Relation::Eq;
        }
        Self { g, b, bounded }
    }

    /// Gibbs distribution over the active worlds and the dual objective.
    fn evaluate(&self, lambda: &DVector<f64>) -> (DVector<f64>, f64) {
        let s = -(self.g.transpose() * lambda);
        let top = s.max();
        let weights = s.map(|v| (v - top).exp());
        let z: f64 = weights.sum();
        let value = top + z.ln() + self.b.dot(lambda);
        (weights / z, value)
    }

    fn project(&self, lambda: &mut DVector<f64>) {
        for (i, v) in lambda.iter_mut().enumerate() {
            if self.bounded[i] && *v < 0.0 {
                *v = 0.0;
            }
        }
    }

    fn residual(&self, lambda: &DVector<f64>, p: &DVector<f64>) -> f64 {
        let slack = &self.b - &self.g * p;
        (0..self.b.len())
            .map(|i| {
                if self.bounded[i] {
                    (-slack[i]).max(0.0).max((lambda[i] * slack[i]).abs())
                } else {
                    slack[i].abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

impl MaxEntSolver {
    pub fn solve(&self, cs: &ConstraintSet) -> Result<MeResult> {
        let n = cs.world_count();
        if !consistent(cs)? {
            return Ok(MeResult {
                status: MeStatus::Infeasible,
                dist: None,
                entropy: 0.0,
                iterations: 0,
                residual: f64::INFINITY,
                frozen: Vec::new(),
            });
        }
        let support = support(cs)?;
        let active: Vec<usize> = support.iter().collect();
        let frozen: Vec<usize> = support.complement().iter().collect();

        let rows = DualRows::new(cs.extra_rows(), &active);
        let m = rows.b.len();
        let mut lambda = match &self.init {
            Some(init) if init.len() == m => DVector::from_iterator(
                m,
                init.iter()
                    .zip(cs.extra_rows())
                    .map(|(&v, r)| if r.relation == Relation::Ge { -v } else { v }),
            ),
            _ => DVector::zeros(m),
        };
        rows.project(&mut lambda);

        let (mut p, mut value) = rows.evaluate(&lambda);
        let mut residual = rows.residual(&lambda, &p);
        let mut iterations = 0;
        // Newton converges quadratically near the optimum, so polishing well
        // past the threshold costs a step or two.
        let target = (self.tol * 1e-4).max(1e-15);
        while residual > target && iterations < self.max_iter {
            iterations += 1;
            match newton_step(&rows, &lambda, &p, value) {
                Some((next, next_p, next_value)) => {
                    lambda = next;
                    p = next_p;
                    value = next_value;
                    residual = rows.residual(&lambda, &p);
                }
                None => break,
            }
        }

        let mut full = vec![0.0; n];
        for (j, &w) in active.iter().enumerate() {
            full[w] = p[j];
        }
        let dist = Distribution { p: full };
        let status = if residual <= self.tol {
            MeStatus::Ok
        } else {
            MeStatus::NotConverged
        };
        Ok(MeResult {
            status,
            entropy: entropy(&dist),
            dist: (status == MeStatus::Ok).then_some(dist),
            iterations,
            residual,
            frozen,
        })
    }
}

/// One projected Newton step with Armijo backtracking along the projection
/// arc. `None` when no decrease can be found.
fn newton_step(
    rows: &DualRows,
    lambda: &DVector<f64>,
    p: &DVector<f64>,
    value: f64,
) -> Option<(DVector<f64>, DVector<f64>, f64)> {
    let m = lambda.len();
    let mean = &rows.g * p;
    let grad = &rows.b - &mean;

    // Multipliers stuck at their bound with the gradient pushing outward are
    // held fixed; the Newton system is solved over the rest.
    let free: Vec<usize> = (0..m)
        .filter(|&i| !(rows.bounded[i] && lambda[i] <= 1e-12 && grad[i] > 0.0))
        .collect();
    let mut dir = DVector::zeros(m);
    if !free.is_empty() {
        let k = free.len();
        let mut h = DMatrix::zeros(k, k);
        for (a, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                let second: f64 = (0..p.len()).map(|w| p[w] * rows.g[(i, w)] * rows.g[(j, w)]).sum();
                h[(a, c)] = second - mean[i] * mean[j];
            }
        }
        let rhs = DVector::from_iterator(k, free.iter().map(|&i| -grad[i]));
        let scale = 1.0 + h.diagonal().amax();
        let mut damping = 1e-12 * scale;
        let step = loop {
            let damped = &h + DMatrix::identity(k, k) * damping;
            if let Some(chol) = damped.cholesky() {
                break chol.solve(&rhs);
            }
            damping *= 100.0;
            if damping > 1e6 * scale {
                break rhs.clone() / scale;
            }
        };
        for (a, &i) in free.iter().enumerate() {
            dir[i] = step[a];
        }
    }

    let search = |direction: &DVector<f64>| {
        let mut alpha = 1.0;
        for _ in 0..60 {
            let mut next = lambda + direction * alpha;
            rows.project(&mut next);
            let moved = &next - lambda;
            let (next_p, next_value) = rows.evaluate(&next);
            if moved.amax() > 0.0 && next_value <= value + 1e-4 * grad.dot(&moved) {
                return Some((next, next_p, next_value));
            }
            alpha *= 0.5;
        }
        None
    };
    search(&dir).or_else(|| search(&(-&grad)))
}
