//! Specificity-prioritized maximization of conditional independence.
//!
//! Given hard constraints and a query `P(H | S)`, candidate independence
//! defaults `ci {H, S} given C` are generated for every conditioning sentence
//! `C` of a hard statement about `H` with `S -> C` certain, together with any
//! declared defaults. Candidates are ordered so that more specific conditions
//! come first (`C2` precedes `C1` when `C2 -> C1` is certain but not the
//! converse), then adopted greedily. A default is adopted only when one pair
//! member has a determined probability given the condition, which makes the
//! product constraint linear:
//!
//! ```text
//! P(x & y & z) - v P(y & z) = 0      where v = P(x | z)
//! ```
//!
//! The result is one deterministic extension: the hard rows plus every
//! adopted row, with each rejected candidate tagged with the reason.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use crate::entail::{bound, consistent, entails_certain, point_value, Bound, ConstraintSet, Theory};
use crate::entail::conditional_row;
use crate::kb::{canonical_form, CIGTuple, Conditional, DefaultDecl, KnowledgeBase, PriorityDecl, Sentence};
use crate::lp::{LinearConstraint, Relation};
use crate::{Error, Result};

/// `I(left, given, right)`: every member of `left` is independent of every
/// member of `right` given each member of `given`.
#[derive(Debug, Clone)]
pub struct SetCITriple {
    pub left: Vec<Sentence>,
    pub given: Vec<Sentence>,
    pub right: Vec<Sentence>,
}

/// Pairwise expansion into `ci {a, b} given c` tuples, deduplicated and sorted
/// by canonical form.
pub fn expand_ci(tr: &SetCITriple) -> Result<Vec<CIGTuple>> {
    let keys = |v: &[Sentence]| v.iter().map(canonical_form).collect::<BTreeSet<_>>();
    let (l, g, r) = (keys(&tr.left), keys(&tr.given), keys(&tr.right));
    if l.is_empty() || g.is_empty() || r.is_empty() {
        return Err(Error::OverlapError("every set must be nonempty".into()));
    }
    let sets = [("left", &l), ("given", &g), ("right", &r)];
    for (i, (first, a)) in sets.iter().enumerate() {
        for (second, b) in &sets[i + 1..] {
            if let Some(shared) = a.intersection(b).next() {
                return Err(Error::OverlapError(format!(
                    "`{shared}` appears in both the {first} and {second} sets"
                )));
            }
        }
    }
    let mut out = BTreeSet::new();
    for a in &tr.left {
        for b in &tr.right {
            for c in &tr.given {
                out.insert(CIGTuple::new(a.clone(), b.clone(), c.clone()));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Adds the expansion of `tr` to the declared defaults of `kb`.
pub fn declare_set_default(kb: &mut KnowledgeBase, tr: &SetCITriple) -> Result<()> {
    for tuple in expand_ci(tr)? {
        if !kb.defaults.iter().any(|d| d.tuple == tuple) {
            kb.defaults.push(DefaultDecl {
                tuple,
                expanded: true,
                span: None,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Generated from a hard statement about the query target.
    Inheritance,
    Declared,
    /// Declared through a set-level independence statement.
    Expanded,
}

/// Which pair member carried the determined probability, and its value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFactor {
    pub member: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CandidateDefault {
    pub tuple: CIGTuple,
    pub origin: Origin,
    pub linearization: Option<LinearConstraint>,
    pub point_factor: Option<PointFactor>,
    /// 1-based position in the priority order; 0 before ordering.
    pub rank: usize,
}

impl CandidateDefault {
    fn new(tuple: CIGTuple, origin: Origin) -> Self {
        Self {
            tuple,
            origin,
            linearization: None,
            point_factor: None,
            rank: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockReason {
    /// Neither pair member has a determined probability given the condition.
    NotLinearizable,
    /// The row contradicts the rows adopted so far.
    Infeasible,
    /// Adopting would force the conditioned event to probability zero.
    ForcedVacuous,
    UserExcluded,
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockReason::NotLinearizable => "NOT_LINEARIZABLE",
            BlockReason::Infeasible => "INFEASIBLE",
            BlockReason::ForcedVacuous => "FORCED_VACUOUS",
            BlockReason::UserExcluded => "USER_EXCLUDED",
        })
    }
}

/// Two candidates that neither specificity nor user priorities order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incomparable {
    pub first: CIGTuple,
    pub second: CIGTuple,
}

impl fmt::Display for Incomparable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "incomparable: {} / {}", self.first, self.second)
    }
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub adopted: Vec<CandidateDefault>,
    pub blocked: Vec<(CandidateDefault, BlockReason)>,
    pub order_audit: Vec<Incomparable>,
    /// Hard rows followed by the adopted rows.
    pub rows: ConstraintSet,
}

impl Extension {
    /// One line per candidate in rank order:
    /// `ADOPT|BLOCK(reason)  ci {x, y} given z  [v=value]  rank=k`.
    pub fn trace(&self) -> Vec<String> {
        let mut entries: Vec<(usize, String)> = self
            .adopted
            .iter()
            .map(|c| (c.rank, trace_line("ADOPT".into(), c)))
            .chain(
                self.blocked
                    .iter()
                    .map(|(c, r)| (c.rank, trace_line(format!("BLOCK({r})"), c))),
            )
            .collect();
        entries.sort_by_key(|(rank, _)| *rank);
        entries.into_iter().map(|(_, line)| line).collect()
    }
}

fn trace_line(verdict: String, c: &CandidateDefault) -> String {
    let value = c
        .point_factor
        .map(|pf| format!("  [v={}]", format_value(pf.value)))
        .unwrap_or_default();
    format!("{verdict}  {}{value}  rank={}", c.tuple, c.rank)
}

fn format_value(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().unwrap_or(v);
    format!("{rounded}")
}

#[derive(Debug, Clone, Default)]
pub struct ExtensionOptions {
    /// Candidates that are never adopted.
    pub excluded: Vec<CIGTuple>,
}

/// Candidate defaults for the query, inheritance candidates first, then
/// declared ones, without duplicates.
pub fn generate_candidates(theory: &Theory, q: &Conditional) -> Result<Vec<CandidateDefault>> {
    let hard = &theory.hard;
    if !consistent(hard)? {
        return Err(Error::InconsistentBase);
    }
    let table = theory.table();
    let target = table.satisfying_set(&q.target)?;
    let negated = target.complement();
    let situation = &q.given;

    let mut out: Vec<CandidateDefault> = Vec::new();
    let mut push = |c: CandidateDefault| {
        if !out.iter().any(|o| o.tuple == c.tuple) {
            out.push(c);
        }
    };

    for pc in &theory.kb.hard {
        let about = table.satisfying_set(&pc.target)?;
        if about != target && about != negated {
            continue;
        }
        let class = &pc.given;
        if !entails_certain(hard, &Sentence::implies(situation.clone(), class.clone()))? {
            continue;
        }
        if entails_certain(hard, &Sentence::implies(class.clone(), situation.clone()))? {
            continue;
        }
        push(CandidateDefault::new(
            CIGTuple::new(q.target.clone(), situation.clone(), class.clone()),
            Origin::Inheritance,
        ));
    }
    for d in &theory.kb.defaults {
        let origin = if d.expanded {
            Origin::Expanded
        } else {
            Origin::Declared
        };
        push(CandidateDefault::new(d.tuple.clone(), origin));
    }
    Ok(out)
}

/// Orders candidates by specificity and user priorities.
///
/// Ties and incomparable pairs fall back to canonical order; each
/// incomparable pair is reported in the returned audit list.
pub fn specificity_order(
    cands: Vec<CandidateDefault>,
    hard: &ConstraintSet,
    priorities: &[PriorityDecl],
) -> Result<(Vec<CandidateDefault>, Vec<Incomparable>)> {
    let n = cands.len();
    let mut before = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (gi, gj) = (cands[i].tuple.given(), cands[j].tuple.given());
            if entails_certain(hard, &Sentence::implies(gi.clone(), gj.clone()))?
                && !entails_certain(hard, &Sentence::implies(gj.clone(), gi.clone()))?
            {
                before[i][j] = true;
            }
        }
    }
    for p in priorities {
        let hi = cands.iter().position(|c| c.tuple == p.higher);
        let lo = cands.iter().position(|c| c.tuple == p.lower);
        if let (Some(hi), Some(lo)) = (hi, lo) {
            before[hi][lo] = true;
        }
    }

    // Kahn's algorithm, smallest canonical key first among ready nodes.
    let mut indegree: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| before[i][j]).count())
        .collect();
    let mut ready: BinaryHeap<Reverse<(&[String; 3], usize)>> = (0..n)
        .filter(|&j| indegree[j] == 0)
        .map(|j| Reverse((cands[j].tuple.key(), j)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(i);
        for j in 0..n {
            if before[i][j] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(Reverse((cands[j].tuple.key(), j)));
                }
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|j| !order.contains(j)).unwrap();
        return Err(Error::PriorityCycle(cands[stuck].tuple.to_string()));
    }

    // Transitive closure for the audit.
    let mut reach = before;
    for k in 0..n {
        for i in 0..n {
            if i != k && reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    let mut audit = Vec::new();
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            if !reach[i][j] && !reach[j][i] {
                audit.push(Incomparable {
                    first: cands[i].tuple.clone(),
                    second: cands[j].tuple.clone(),
                });
            }
        }
    }

    let mut slots: Vec<Option<CandidateDefault>> = cands.into_iter().map(Some).collect();
    let ordered = order
        .into_iter()
        .enumerate()
        .map(|(rank, i)| {
            let mut c = slots[i].take().unwrap();
            c.rank = rank + 1;
            c
        })
        .collect();
    Ok((ordered, audit))
}

pub fn compute_extension(theory: &Theory, q: &Conditional) -> Result<Extension> {
    compute_extension_with(theory, q, &ExtensionOptions::default())
}

pub fn compute_extension_with(
    theory: &Theory,
    q: &Conditional,
    options: &ExtensionOptions,
) -> Result<Extension> {
    let cands = generate_candidates(theory, q)?;
    let (ordered, order_audit) = specificity_order(cands, &theory.hard, &theory.kb.priorities)?;

    let mut rows = theory.hard.clone();
    let mut adopted = Vec::new();
    let mut blocked = Vec::new();
    for mut cand in ordered {
        if options.excluded.contains(&cand.tuple) {
            blocked.push((cand, BlockReason::UserExcluded));
            continue;
        }
        match try_adopt(&rows, &mut cand)? {
            None => {
                rows.push(cand.linearization.clone().expect("adopted row"));
                adopted.push(cand);
            }
            Some(reason) => blocked.push((cand, reason)),
        }
    }
    debug_assert!(consistent(&rows)?);
    Ok(Extension {
        adopted,
        blocked,
        order_audit,
        rows,
    })
}

/// Runs the adoption checks for one candidate against `rows`, filling in its
/// point factor and linearization. Returns the block reason, if any.
pub fn try_adopt(rows: &ConstraintSet, cand: &mut CandidateDefault) -> Result<Option<BlockReason>> {
    let table = rows.table();
    let [x, y] = cand.tuple.pair().clone();
    let z = cand.tuple.given().clone();

    let mut factor = None;
    for (member, s) in [(0, &x), (1, &y)] {
        if let Some(value) = point_value(rows, &Conditional::new(s.clone(), z.clone()))? {
            factor = Some(PointFactor { member, value });
            break;
        }
    }
    let Some(factor) = factor else {
        return Ok(Some(BlockReason::NotLinearizable));
    };
    cand.point_factor = Some(factor);

    // `valued` has the determined probability; `other` is conditioned on.
    let (valued, other) = if factor.member == 0 { (&x, &y) } else { (&y, &x) };
    let zs = table.satisfying_set(&z)?;
    let other_and_z = table.satisfying_set(other)?.intersection(&zs);
    let valued_set = table.satisfying_set(valued)?;
    let row = conditional_row(&valued_set, &other_and_z, Relation::Eq, factor.value);
    cand.linearization = Some(row.clone());

    let extended = rows.with_row(row);
    if !consistent(&extended)? {
        return Ok(Some(BlockReason::Infeasible));
    }
    let max = extended.max_mass(&other_and_z)?.unwrap_or(0.0);
    if max <= rows.tol() {
        return Ok(Some(BlockReason::ForcedVacuous));
    }
    Ok(None)
}

/// Bound on the query under the extension, together with the extension.
///
/// A query that the hard rows already pin to a point keeps that value.
pub fn spmci_bound(theory: &Theory, q: &Conditional) -> Result<(Bound, Extension)> {
    spmci_bound_with(theory, q, &ExtensionOptions::default())
}

pub fn spmci_bound_with(
    theory: &Theory,
    q: &Conditional,
    options: &ExtensionOptions,
) -> Result<(Bound, Extension)> {
    let ext = compute_extension_with(theory, q, options)?;
    let hard = bound(&theory.hard, q)?;
    if hard.width().is_some_and(|w| w <= theory.hard.tol()) {
        return Ok((hard, ext));
    }
    let b = bound(&ext.rows, q)?;
    Ok((b, ext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::Settings;

    fn theory(text: &str) -> Theory {
        Theory::new(parse_kb(text).unwrap(), Settings::default()).unwrap()
    }

    fn a(n: &str) -> Sentence {
        Sentence::atom(n)
    }

    fn conj(names: &[&str]) -> Sentence {
        Sentence::conjunction(names.iter().map(|n| a(n)))
    }

    const NEPTUNE_A1: &str = "atoms L N T W; P(L | N) = 0.1;";
    const NEPTUNE_A2: &str = "atoms L N T W; P(L | N) = 0.1; P(L | N & T) = 0.05;";

    #[test]
    fn expand_pairs() {
        let tr = SetCITriple {
            left: vec![a("a1"), a("a2")],
            given: vec![a("c")],
            right: vec![a("b")],
        };
        let out = expand_ci(&tr).unwrap();
        assert_eq!(
            out,
            vec![
                CIGTuple::new(a("a1"), a("b"), a("c")),
                CIGTuple::new(a("a2"), a("b"), a("c"))
            ]
        );

        let tr = SetCITriple {
            left: vec![a("a")],
            given: vec![a("c")],
            right: vec![a("b")],
        };
        assert_eq!(expand_ci(&tr).unwrap().len(), 1);

        let tr = SetCITriple {
            left: vec![a("a")],
            given: vec![a("c1"), a("c2")],
            right: vec![a("b")],
        };
        let out = expand_ci(&tr).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].given(), &a("c1"));
    }

    #[test]
    fn expand_rejects_overlap() {
        let tr = SetCITriple {
            left: vec![a("a"), a("b")],
            given: vec![a("c")],
            right: vec![a("b")],
        };
        assert!(matches!(expand_ci(&tr), Err(Error::OverlapError(_))));
        let tr = SetCITriple {
            left: vec![Sentence::and(a("x"), a("y"))],
            given: vec![Sentence::and(a("y"), a("x"))],
            right: vec![a("b")],
        };
        assert!(matches!(expand_ci(&tr), Err(Error::OverlapError(_))));
    }

    #[test]
    fn candidates_neptune() {
        let th = theory(NEPTUNE_A2);
        let q = Conditional::new(a("L"), conj(&["N", "T", "W"]));
        let c = generate_candidates(&th, &q).unwrap();
        let tuples: Vec<&CIGTuple> = c.iter().map(|c| &c.tuple).collect();
        assert_eq!(tuples.len(), 2);
        assert!(tuples.contains(&&CIGTuple::new(a("L"), q.given.clone(), a("N"))));
        assert!(tuples.contains(&&CIGTuple::new(a("L"), q.given.clone(), conj(&["N", "T"]))));

        let th = theory(NEPTUNE_A1);
        let q = Conditional::new(a("L"), conj(&["N", "T"]));
        let c = generate_candidates(&th, &q).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].tuple, CIGTuple::new(a("L"), conj(&["N", "T"]), a("N")));
        assert_eq!(c[0].origin, Origin::Inheritance);
    }

    #[test]
    fn no_candidates_without_information() {
        let th = theory("atoms H S; P(S) = 0.5;");
        let q = Conditional::new(a("H"), a("S"));
        assert!(generate_candidates(&th, &q).unwrap().is_empty());
        let ext = compute_extension(&th, &q).unwrap();
        assert!(ext.adopted.is_empty() && ext.blocked.is_empty());
        assert_eq!(ext.rows.rows().len(), th.hard.rows().len());
    }

    #[test]
    fn specificity_puts_narrow_classes_first() {
        let th = theory(NEPTUNE_A2);
        let s = conj(&["N", "T", "W"]);
        let cands = vec![
            CandidateDefault::new(CIGTuple::new(a("L"), s.clone(), a("N")), Origin::Inheritance),
            CandidateDefault::new(
                CIGTuple::new(a("L"), s.clone(), conj(&["N", "T"])),
                Origin::Inheritance,
            ),
        ];
        let (ordered, audit) = specificity_order(cands, &th.hard, &[]).unwrap();
        assert_eq!(ordered[0].tuple.given(), &conj(&["N", "T"]));
        assert_eq!(ordered[0].rank, 1);
        assert!(audit.is_empty());
    }

    #[test]
    fn singleton_and_incomparable_orders() {
        let th = theory("atoms A B X Y;");
        let one = vec![CandidateDefault::new(
            CIGTuple::new(a("X"), a("Y"), a("A")),
            Origin::Declared,
        )];
        let (ordered, audit) = specificity_order(one, &th.hard, &[]).unwrap();
        assert_eq!(ordered.len(), 1);
        assert!(audit.is_empty());

        let two = vec![
            CandidateDefault::new(CIGTuple::new(a("X"), a("Y"), a("B")), Origin::Declared),
            CandidateDefault::new(CIGTuple::new(a("X"), a("Y"), a("A")), Origin::Declared),
        ];
        let (ordered, audit) = specificity_order(two, &th.hard, &[]).unwrap();
        assert_eq!(ordered[0].tuple.given(), &a("A"));
        assert_eq!(audit.len(), 1);
    }

    #[test]
    fn user_priority_and_cycles() {
        let th = theory("atoms A B X Y;");
        let ta = CIGTuple::new(a("X"), a("Y"), a("A"));
        let tb = CIGTuple::new(a("X"), a("Y"), a("B"));
        let cands = || {
            vec![
                CandidateDefault::new(ta.clone(), Origin::Declared),
                CandidateDefault::new(tb.clone(), Origin::Declared),
            ]
        };
        let prefer_b = PriorityDecl {
            higher: tb.clone(),
            lower: ta.clone(),
            span: None,
        };
        let (ordered, audit) = specificity_order(cands(), &th.hard, std::slice::from_ref(&prefer_b)).unwrap();
        assert_eq!(ordered[0].tuple, tb);
        assert!(audit.is_empty());

        let prefer_a = PriorityDecl {
            higher: ta.clone(),
            lower: tb.clone(),
            span: None,
        };
        assert!(matches!(
            specificity_order(cands(), &th.hard, &[prefer_a, prefer_b]),
            Err(Error::PriorityCycle(_))
        ));
    }

    #[test]
    fn user_priority_against_specificity_is_a_cycle() {
        let th = theory("atoms L N T;");
        let s = conj(&["N", "T"]);
        let general = CIGTuple::new(a("L"), s.clone(), a("N"));
        let specific = CIGTuple::new(a("L"), s.clone(), s.clone());
        let cands = vec![
            CandidateDefault::new(general.clone(), Origin::Declared),
            CandidateDefault::new(specific.clone(), Origin::Declared),
        ];
        let p = PriorityDecl {
            higher: general,
            lower: specific,
            span: None,
        };
        assert!(matches!(
            specificity_order(cands, &th.hard, &[p]),
            Err(Error::PriorityCycle(_))
        ));
    }

    #[test]
    fn neptune_a1_inherits() {
        let th = theory(NEPTUNE_A1);
        let q = Conditional::new(a("L"), conj(&["N", "T"]));
        let (b, ext) = spmci_bound(&th, &q).unwrap();
        let (l, u) = b.interval.unwrap();
        assert!((l - 0.1).abs() < 1e-9 && (u - 0.1).abs() < 1e-9);
        assert_eq!(ext.adopted.len(), 1);
        assert!(ext.blocked.is_empty());
    }

    #[test]
    fn neptune_a2_prefers_specific_class() {
        let th = theory(NEPTUNE_A2);
        let s = conj(&["N", "T", "W"]);
        let q = Conditional::new(a("L"), s.clone());
        let (b, ext) = spmci_bound(&th, &q).unwrap();
        let (l, u) = b.interval.unwrap();
        assert!((l - 0.05).abs() < 1e-9 && (u - 0.05).abs() < 1e-9, "{l} {u}");
        assert_eq!(ext.adopted.len(), 1);
        assert_eq!(ext.adopted[0].tuple.given(), &conj(&["N", "T"]));
        assert_eq!(ext.blocked.len(), 1);
        assert_eq!(ext.blocked[0].0.tuple.given(), &a("N"));
        assert_eq!(ext.blocked[0].1, BlockReason::ForcedVacuous);
        assert!(consistent(&ext.rows).unwrap());
    }

    #[test]
    fn hard_point_value_passes_through() {
        let th = theory(NEPTUNE_A2);
        let q = Conditional::new(a("L"), conj(&["N", "T"]));
        let (b, _) = spmci_bound(&th, &q).unwrap();
        assert_eq!(b, bound(&th.hard, &q).unwrap());
        let (l, _) = b.interval.unwrap();
        assert!((l - 0.05).abs() < 1e-9);
    }

    #[test]
    fn user_exclusion_blocks() {
        let th = theory(NEPTUNE_A1);
        let q = Conditional::new(a("L"), conj(&["N", "T"]));
        let options = ExtensionOptions {
            excluded: vec![CIGTuple::new(conj(&["T", "N"]), a("L"), a("N"))],
        };
        let (b, ext) = spmci_bound_with(&th, &q, &options).unwrap();
        assert_eq!(ext.blocked[0].1, BlockReason::UserExcluded);
        assert_eq!(b, Bound::new(0.0, 1.0));
    }

    #[test]
    fn not_linearizable_without_point_values() {
        let th = theory("atoms X Y Z; P(X | Z) >= 0.2;");
        let mut kb = th.kb.clone();
        kb.add_default(CIGTuple::new(a("X"), a("Y"), a("Z")));
        let th = Theory::new(kb, Settings::default()).unwrap();
        let ext = compute_extension(&th, &Conditional::new(a("X"), a("Y"))).unwrap();
        assert!(ext
            .blocked
            .iter()
            .any(|(c, r)| c.origin == Origin::Declared && *r == BlockReason::NotLinearizable));
    }

    #[test]
    fn trace_format() {
        let th = theory(NEPTUNE_A2);
        let q = Conditional::new(a("L"), conj(&["N", "T", "W"]));
        let ext = compute_extension(&th, &q).unwrap();
        let trace = ext.trace();
        assert_eq!(
            trace,
            vec![
                "ADOPT  ci {N & T & W, L} given N & T  [v=0.05]  rank=1".to_owned(),
                "BLOCK(FORCED_VACUOUS)  ci {N & T & W, L} given N  [v=0.1]  rank=2".to_owned(),
            ]
        );
    }

    #[test]
    fn declared_set_defaults_are_marked_expanded() {
        let mut kb = parse_kb("atoms A B C D;").unwrap();
        declare_set_default(
            &mut kb,
            &SetCITriple {
                left: vec![a("A"), a("B")],
                given: vec![a("D")],
                right: vec![a("C")],
            },
        )
        .unwrap();
        assert_eq!(kb.defaults.len(), 2);
        assert!(kb.defaults.iter().all(|d| d.expanded));
        let th = Theory::new(kb, Settings::default()).unwrap();
        let c = generate_candidates(&th, &Conditional::new(a("A"), a("C"))).unwrap();
        assert!(c.iter().all(|c| c.origin == Origin::Expanded));
    }
}
