//! Monotonic probabilistic entailment over the world simplex.
//!
//! A distribution is a vector `p` indexed by worlds. Every hard statement
//! `P(X | Y) rel q` becomes the linear row `P(X & Y) - q P(Y) rel 0`, which
//! is vacuous when `P(Y) = 0`. Tight bounds on a query `P(X | Y)` are the
//! extremes of a linear-fractional program, solved as two linear programs
//! after the Charnes-Cooper substitution `y = t p` with `P_y(Y) = 1`.

use crate::kb::{Conditional, KnowledgeBase, ProbConstraint, Sentence};
use crate::lp::{self, LinearConstraint, LinearProgram, LpOutcome, Relation};
use crate::worlds::{build_world_table, WorldSet, WorldTable};
use crate::{Error, Result, Settings};

/// Interval `[lower, upper]` on a conditional probability. `None` when no
/// admissible distribution gives the conditioning sentence positive mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub interval: Option<(f64, f64)>,
}

impl Bound {
    pub fn undefined() -> Self {
        Self { interval: None }
    }

    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            interval: Some((lower, upper)),
        }
    }

    pub fn is_defined(&self) -> bool {
        self.interval.is_some()
    }

    pub fn lower(&self) -> Option<f64> {
        self.interval.map(|(l, _)| l)
    }

    pub fn upper(&self) -> Option<f64> {
        self.interval.map(|(_, u)| u)
    }

    pub fn width(&self) -> Option<f64> {
        self.interval.map(|(l, u)| u - l)
    }

    /// True if `self` lies inside `other`, up to `tol` at each end.
    pub fn within(&self, other: &Bound, tol: f64) -> bool {
        match (self.interval, other.interval) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((l, u)), Some((ol, ou))) => l >= ol - tol && u <= ou + tol,
        }
    }
}

/// Linear rows over world probabilities. Row 0 is always `sum p = 1`.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    table: WorldTable,
    rows: Vec<LinearConstraint>,
    tol: f64,
}

impl ConstraintSet {
    pub fn new(table: WorldTable, tol: f64) -> Self {
        let n = table.world_count();
        let normalization = LinearConstraint::new(vec![1.0; n], Relation::Eq, 1.0);
        Self {
            table,
            rows: vec![normalization],
            tol,
        }
    }

    /// The hard rows of `kb` over `table`.
    pub fn from_constraints<'a, I>(table: WorldTable, tol: f64, constraints: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ProbConstraint>,
    {
        let mut cs = Self::new(table, tol);
        for c in constraints {
            let row = linearize(c, &cs.table)?;
            cs.rows.push(row);
        }
        Ok(cs)
    }

    pub fn table(&self) -> &WorldTable {
        &self.table
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rows(&self) -> &[LinearConstraint] {
        &self.rows
    }

    /// All rows but the normalization row.
    pub fn extra_rows(&self) -> &[LinearConstraint] {
        &self.rows[1..]
    }

    pub fn push(&mut self, row: LinearConstraint) {
        debug_assert_eq!(row.coeffs.len(), self.table.world_count());
        self.rows.push(row);
    }

    pub fn with_row(&self, row: LinearConstraint) -> Self {
        let mut next = self.clone();
        next.push(row);
        next
    }

    pub fn world_count(&self) -> usize {
        self.table.world_count()
    }

    /// True iff `p` (indexed by world) satisfies every row within `tol`.
    pub fn admits(&self, p: &[f64], tol: f64) -> bool {
        p.iter().all(|&v| v >= -tol) && self.rows.iter().all(|r| r.is_satisfied(p, tol))
    }

    fn optimize(&self, direction: lp::Direction, objective: Vec<f64>) -> Result<LpOutcome> {
        lp::solve(&LinearProgram::new(direction, objective, self.rows.clone()))
    }

    /// `max sum_{w in set} p_w` over admissible distributions.
    pub fn max_mass(&self, set: &WorldSet) -> Result<Option<f64>> {
        Ok(self.optimize(lp::Direction::Maximize, set.indicator())?.value())
    }

    pub fn min_mass(&self, set: &WorldSet) -> Result<Option<f64>> {
        Ok(self.optimize(lp::Direction::Minimize, set.indicator())?.value())
    }

    /// An admissible distribution maximizing the mass of `set`, if any.
    pub fn witness(&self, set: &WorldSet) -> Result<Option<Vec<f64>>> {
        Ok(self
            .optimize(lp::Direction::Maximize, set.indicator())?
            .solution()
            .map(<[f64]>::to_vec))
    }
}

/// The world table and hard constraint set of a knowledge base.
#[derive(Debug, Clone)]
pub struct Theory {
    pub kb: KnowledgeBase,
    pub hard: ConstraintSet,
    pub settings: Settings,
}

impl Theory {
    pub fn new(kb: KnowledgeBase, settings: Settings) -> Result<Self> {
        let table = build_world_table(&kb.atoms, settings.atom_cap)?;
        let hard = ConstraintSet::from_constraints(table, settings.tol, &kb.hard)?;
        Ok(Self { kb, hard, settings })
    }

    pub fn table(&self) -> &WorldTable {
        self.hard.table()
    }
}

/// `P(X|Y) rel q` as `sum_{X&Y} p - q sum_Y p rel 0`. When `Y` holds in every
/// world this is `sum_X p rel q`.
pub fn linearize(pc: &ProbConstraint, table: &WorldTable) -> Result<LinearConstraint> {
    let target = table.satisfying_set(&pc.target)?;
    let given = table.satisfying_set(&pc.given)?;
    Ok(conditional_row(&target, &given, pc.relation, pc.value))
}

pub(crate) fn conditional_row(
    target: &WorldSet,
    given: &WorldSet,
    relation: Relation,
    value: f64,
) -> LinearConstraint {
    let joint = target.intersection(given);
    if given.is_full() {
        return LinearConstraint::new(joint.indicator(), relation, value);
    }
    let coeffs = (0..given.len())
        .map(|w| {
            let in_joint = if joint.contains(w) { 1.0 } else { 0.0 };
            let in_given = if given.contains(w) { value } else { 0.0 };
            in_joint - in_given
        })
        .collect();
    LinearConstraint::new(coeffs, relation, 0.0)
}

/// True iff some distribution over worlds satisfies every row.
pub fn consistent(cs: &ConstraintSet) -> Result<bool> {
    lp::feasible(cs.rows(), cs.world_count())
}

fn ensure_consistent(cs: &ConstraintSet) -> Result<()> {
    if consistent(cs)? {
        Ok(())
    } else {
        Err(Error::InconsistentBase)
    }
}

/// Tight bounds on `P(q.target | q.given)` over admissible distributions with
/// `P(q.given) > 0`.
pub fn bound(cs: &ConstraintSet, q: &Conditional) -> Result<Bound> {
    ensure_consistent(cs)?;
    let table = cs.table();
    let given = table.satisfying_set(&q.given)?;
    let joint = table.satisfying_set(&q.target)?.intersection(&given);
    bound_sets(cs, &joint, &given)
}

fn bound_sets(cs: &ConstraintSet, joint: &WorldSet, given: &WorldSet) -> Result<Bound> {
    let tol = cs.tol();
    let max_given = cs.max_mass(given)?.ok_or(Error::InconsistentBase)?;
    if max_given <= tol {
        return Ok(Bound::undefined());
    }

    // Variables: y_w for each world, then t. Rows a.p rel b become
    // a.y - b t rel 0; add sum_{given} y = 1.
    let n = cs.world_count();
    let mut rows: Vec<LinearConstraint> = cs
        .rows()
        .iter()
        .map(|r| {
            let mut coeffs = r.coeffs.clone();
            coeffs.push(-r.rhs);
            LinearConstraint::new(coeffs, r.relation, 0.0)
        })
        .collect();
    let mut scale = given.indicator();
    scale.push(0.0);
    rows.push(LinearConstraint::new(scale, Relation::Eq, 1.0));

    let mut objective = joint.indicator();
    objective.push(0.0);
    debug_assert_eq!(objective.len(), n + 1);

    let extreme = |direction| -> Result<f64> {
        let p = LinearProgram::new(direction, objective.clone(), rows.clone());
        match lp::solve(&p)? {
            LpOutcome::Optimal { value, .. } => Ok(value.clamp(0.0, 1.0)),
            LpOutcome::Infeasible => Err(Error::NumericFailure(
                "fractional program infeasible although P(Y) > 0 is attainable".into(),
            )),
            LpOutcome::Unbounded => Err(Error::NumericFailure(
                "fractional program unbounded".into(),
            )),
        }
    };
    let lower = extreme(lp::Direction::Minimize)?;
    let upper = extreme(lp::Direction::Maximize)?;
    Ok(if lower <= upper {
        Bound::new(lower, upper)
    } else {
        let mid = 0.5 * (lower + upper);
        Bound::new(mid, mid)
    })
}

/// True iff `P(s) = 1` in every admissible distribution.
pub fn entails_certain(cs: &ConstraintSet, s: &Sentence) -> Result<bool> {
    let counter = cs.table().satisfying_set(s)?.complement();
    if counter.is_empty() {
        return Ok(true);
    }
    ensure_consistent(cs)?;
    let max = cs.max_mass(&counter)?.ok_or(Error::InconsistentBase)?;
    Ok(max <= cs.tol())
}

/// The unique value of `P(q.target | q.given)`, if the bounds pin it down.
pub fn point_value(cs: &ConstraintSet, q: &Conditional) -> Result<Option<f64>> {
    let b = bound(cs, q)?;
    Ok(b.interval
        .filter(|(l, u)| u - l <= cs.tol())
        .map(|(l, u)| 0.5 * (l + u)))
}
