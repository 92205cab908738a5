//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use npr_core::entail::{consistent, Theory};
use npr_core::kb::{Atom, CIGTuple, Conditional, KnowledgeBase, ProbConstraint, Sentence};
use npr_core::lp::Relation;
use npr_core::worlds::{build_world_table, WorldSet, WorldTable};
use npr_core::spmci::{generate_candidates, try_adopt, BlockReason, Extension};
use npr_core::Settings;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub const ATOM_NAMES: [&str; 4] = ["A", "B", "C", "D"];

/// Grid resolution: probabilities are multiples of 1/GRID (step 0.02).
pub const GRID: u32 = 50;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atoms(n: usize) -> Vec<Atom> {
    ATOM_NAMES[..n].iter().map(|s| Atom::new(*s)).collect()
}

pub fn theory(kb: KnowledgeBase) -> Theory {
    Theory::new(kb, Settings::default()).unwrap()
}

pub fn parse(text: &str) -> Theory {
    theory(npr_core::kb::parse_kb(text).unwrap())
}

pub fn example(name: &str) -> String {
    let path = format!("{}/kbs/{name}.npr", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

pub const EXAMPLES: [&str; 6] = [
    "igor_a1",
    "igor_a2",
    "neptune_a1",
    "neptune_a2",
    "neptune_chain",
    "evidential",
];

/// Literals, conjunctions, disjunctions and implications of up to two
/// literals over the first `n` atoms.
pub fn random_sentence(rng: &mut TestRng, n: usize) -> Sentence {
    let literal = |rng: &mut TestRng| {
        let a = Sentence::atom(ATOM_NAMES[rng.gen_range(0..n)]);
        if rng.gen_bool(0.3) {
            Sentence::not(a)
        } else {
            a
        }
    };
    match rng.gen_range(0..6) {
        0 | 1 => literal(rng),
        2 => Sentence::and(literal(rng), literal(rng)),
        3 => Sentence::or(literal(rng), literal(rng)),
        4 => Sentence::implies(literal(rng), literal(rng)),
        _ => Sentence::not(Sentence::and(literal(rng), literal(rng))),
    }
}

/// A uniformly random composition of GRID into `parts` nonnegative parts.
pub fn random_grid_point(rng: &mut TestRng, parts: usize) -> Vec<u32> {
    let mut cuts: Vec<u32> = (0..parts - 1).map(|_| rng.gen_range(0..=GRID)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(GRID - prev);
    out
}

pub fn mass(point: &[u32], set: &WorldSet) -> u32 {
    set.iter().map(|w| point[w]).sum()
}

/// A random knowledge base satisfied by the grid distribution `point`.
///
/// Inequality values are multiples of 0.1 that `point` satisfies; equality
/// values are the exact conditional probability under `point`.
pub fn random_kb_at(rng: &mut TestRng, n: usize, constraints: usize, point: &[u32]) -> KnowledgeBase {
    let table = build_world_table(&atoms(n), 12).unwrap();
    let mut kb = KnowledgeBase::with_atoms(ATOM_NAMES[..n].iter().copied());
    for _ in 0..constraints {
        let x = random_sentence(rng, n);
        let mut y = if rng.gen_bool(0.4) {
            Sentence::True
        } else {
            random_sentence(rng, n)
        };
        let ys = table.satisfying_set(&y).unwrap();
        if mass(point, &ys) == 0 {
            y = Sentence::True;
        }
        let ys = table.satisfying_set(&y).unwrap();
        let xys = table.satisfying_set(&x).unwrap().intersection(&ys);
        let (num, den) = (mass(point, &xys), mass(point, &ys));
        let ratio = num as f64 / den as f64;
        let pc = match rng.gen_range(0..3) {
            0 => ProbConstraint::new(x, y, Relation::Eq, ratio),
            1 => ProbConstraint::new(x, y, Relation::Ge, (10 * num / den) as f64 / 10.0),
            _ => ProbConstraint::new(x, y, Relation::Le, (10 * num).div_ceil(den) as f64 / 10.0),
        };
        kb.add_hard(pc);
    }
    kb
}

/// Like `random_kb_at`, restricted to statements a step-0.02 grid resolves:
/// equalities are unconditional with values on the grid, conditional
/// statements are inequalities with values that are multiples of 0.1.
pub fn grid_kb_at(rng: &mut TestRng, n: usize, constraints: usize, point: &[u32]) -> KnowledgeBase {
    let table = build_world_table(&atoms(n), 12).unwrap();
    let mut kb = KnowledgeBase::with_atoms(ATOM_NAMES[..n].iter().copied());
    for _ in 0..constraints {
        let x = random_sentence(rng, n);
        let mut y = if rng.gen_bool(0.4) {
            Sentence::True
        } else {
            random_sentence(rng, n)
        };
        if mass(point, &table.satisfying_set(&y).unwrap()) == 0 {
            y = Sentence::True;
        }
        let ys = table.satisfying_set(&y).unwrap();
        let xys = table.satisfying_set(&x).unwrap().intersection(&ys);
        let (num, den) = (mass(point, &xys), mass(point, &ys));
        let pc = match rng.gen_range(0..3) {
            0 if ys.is_full() && num % 5 == 0 => {
                ProbConstraint::new(x, y, Relation::Eq, num as f64 / GRID as f64)
            }
            0 | 1 => ProbConstraint::new(x, y, Relation::Ge, (10 * num / den) as f64 / 10.0),
            _ => ProbConstraint::new(x, y, Relation::Le, (10 * num).div_ceil(den) as f64 / 10.0),
        };
        kb.add_hard(pc);
    }
    kb
}

pub fn random_kb(rng: &mut TestRng, n: usize, constraints: usize) -> (KnowledgeBase, Vec<u32>) {
    let point = random_grid_point(rng, 1 << n);
    (random_kb_at(rng, n, constraints, &point), point)
}

/// A query whose condition has positive mass under `point`.
pub fn random_query(rng: &mut TestRng, n: usize, point: &[u32]) -> Conditional {
    let table = build_world_table(&atoms(n), 12).unwrap();
    loop {
        let x = random_sentence(rng, n);
        let y = if rng.gen_bool(0.3) {
            Sentence::True
        } else {
            random_sentence(rng, n)
        };
        if mass(point, &table.satisfying_set(&y).unwrap()) > 0 {
            return Conditional::new(x, y);
        }
    }
}

/// `(num, den)` with `den <= GRID` and `num / den == v`.
pub fn rational(v: f64) -> (i64, i64) {
    for den in 1..=GRID as i64 {
        let num = (v * den as f64).round();
        if (num / den as f64 - v).abs() < 1e-12 {
            return (num as i64, den);
        }
    }
    panic!("{v} is not a fraction with a small denominator")
}

/// Extremes of `P(q.target | q.given)` over every grid distribution (all
/// probabilities multiples of 1/GRID) that satisfies the hard constraints
/// exactly. Worlds that no sentence in sight distinguishes are merged first,
/// which leaves the set of attainable sums unchanged.
pub fn grid_bound(kb: &KnowledgeBase, q: &Conditional) -> Option<(f64, f64)> {
    grid_bound_relaxed(kb, q, 0.0)
}

/// As `grid_bound`, with every row relaxed by `slack` in probability units.
pub fn grid_bound_relaxed(kb: &KnowledgeBase, q: &Conditional, slack: f64) -> Option<(f64, f64)> {
    let table = build_world_table(&kb.atoms, 12).unwrap();
    let set = |s: &Sentence| table.satisfying_set(s).unwrap();

    // Integer rows: den * [XY] - num * [Y], compared with 0.
    let mut rows: Vec<(WorldSet, WorldSet, i64, i64, Relation)> = Vec::new();
    for c in &kb.hard {
        let y = set(&c.given);
        let xy = set(&c.target).intersection(&y);
        let (num, den) = rational(c.value);
        rows.push((xy, y, num, den, c.relation));
    }
    let qy = set(&q.given);
    let qxy = set(&q.target).intersection(&qy);

    let signature = |w: usize| -> Vec<bool> {
        rows.iter()
            .flat_map(|(xy, y, ..)| [xy.contains(w), y.contains(w)])
            .chain([qxy.contains(w), qy.contains(w)])
            .collect()
    };
    let mut classes: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut order = Vec::new();
    for w in 0..table.world_count() {
        let sig = signature(w);
        if !classes.contains_key(&sig) {
            classes.insert(sig.clone(), order.len());
            order.push(w);
        }
    }
    // Per class: coefficient of each row, then query joint and given flags.
    let coeffs: Vec<Vec<i64>> = order
        .iter()
        .map(|&w| {
            rows.iter()
                .map(|(xy, y, num, den, _)| {
                    den * xy.contains(w) as i64 - num * y.contains(w) as i64
                })
                .collect()
        })
        .collect();
    let qflags: Vec<(i64, i64)> = order
        .iter()
        .map(|&w| (qxy.contains(w) as i64, qy.contains(w) as i64))
        .collect();
    let relations: Vec<Relation> = rows.iter().map(|r| r.4).collect();
    let slacks: Vec<i64> = rows
        .iter()
        .map(|r| (slack * (r.3 * GRID as i64) as f64 + 1e-9).floor() as i64)
        .collect();

    let mut search = GridSearch {
        coeffs: &coeffs,
        qflags: &qflags,
        relations: &relations,
        slacks: &slacks,
        best: None,
    };
    let mut sums = vec![0i64; relations.len()];
    search.visit(0, GRID as i64, &mut sums, 0, 0);
    search.best
}

struct GridSearch<'a> {
    coeffs: &'a [Vec<i64>],
    qflags: &'a [(i64, i64)],
    relations: &'a [Relation],
    slacks: &'a [i64],
    best: Option<(f64, f64)>,
}

impl GridSearch<'_> {
    fn visit(&mut self, class: usize, left: i64, sums: &mut [i64], joint: i64, given: i64) {
        let last = class + 1 == self.coeffs.len();
        let range = if last { left..=left } else { 0..=left };
        for k in range {
            for (s, c) in sums.iter_mut().zip(&self.coeffs[class]) {
                *s += k * c;
            }
            let (qj, qg) = self.qflags[class];
            let (j, g) = (joint + k * qj, given + k * qg);
            if last {
                self.leaf(sums, j, g);
            } else {
                self.visit(class + 1, left - k, sums, j, g);
            }
            for (s, c) in sums.iter_mut().zip(&self.coeffs[class]) {
                *s -= k * c;
            }
        }
    }

    fn leaf(&mut self, sums: &[i64], joint: i64, given: i64) {
        if given == 0 {
            return;
        }
        let ok = sums
            .iter()
            .zip(self.relations)
            .zip(self.slacks)
            .all(|((&s, r), &d)| match r {
                Relation::Eq => s.abs() <= d,
                Relation::Ge => s >= -d,
                Relation::Le => s <= d,
            });
        if ok {
            let v = joint as f64 / given as f64;
            self.best = Some(match self.best {
                None => (v, v),
                Some((l, u)) => (l.min(v), u.max(v)),
            });
        }
    }
}

/// Shuffled copy of the constraints, keeping a random nonempty prefix.
pub fn random_subbase(rng: &mut TestRng, kb: &KnowledgeBase) -> KnowledgeBase {
    let mut sub = kb.clone();
    sub.hard.shuffle(rng);
    let keep = rng.gen_range(0..=sub.hard.len());
    sub.hard.truncate(keep);
    sub
}

pub fn table_of(kb: &KnowledgeBase) -> WorldTable {
    build_world_table(&kb.atoms, 12).unwrap()
}

/// Checks that the extension rows are feasible, that every candidate got
/// exactly one verdict, and that replaying each candidate's checks against
/// the rows adopted before it reproduces that verdict.
pub fn extension_sound(th: &Theory, query: &Conditional, ext: &Extension) -> Result<(), String> {
    if !consistent(&ext.rows).unwrap() {
        return Err("extension rows are infeasible".into());
    }
    let cands = generate_candidates(th, query).unwrap();
    if ext.adopted.len() + ext.blocked.len() != cands.len() {
        return Err("candidate count mismatch".into());
    }
    let mut seen: Vec<&CIGTuple> = ext.adopted.iter().map(|c| &c.tuple).collect();
    seen.extend(ext.blocked.iter().map(|(c, _)| &c.tuple));
    for c in &cands {
        if seen.iter().filter(|t| ***t == c.tuple).count() != 1 {
            return Err(format!("{} does not appear exactly once", c.tuple));
        }
    }

    let mut verdicts: Vec<(usize, Option<BlockReason>)> =
        ext.adopted.iter().map(|c| (c.rank, None)).collect();
    verdicts.extend(ext.blocked.iter().map(|(c, r)| (c.rank, Some(*r))));
    verdicts.sort_by_key(|(rank, _)| *rank);
    let mut rows = th.hard.clone();
    for (rank, verdict) in verdicts {
        let original = ext
            .adopted
            .iter()
            .chain(ext.blocked.iter().map(|(c, _)| c))
            .find(|c| c.rank == rank)
            .unwrap();
        let mut again = original.clone();
        let replay = try_adopt(&rows, &mut again).unwrap();
        // Exclusions are decided before any check runs.
        let expected = verdict.filter(|r| *r != BlockReason::UserExcluded);
        if verdict != Some(BlockReason::UserExcluded) && replay != expected {
            return Err(format!("rank {rank} {}: {verdict:?} replays as {replay:?}", original.tuple));
        }
        if verdict.is_none() {
            rows.push(again.linearization.unwrap());
        }
    }
    Ok(())
}
