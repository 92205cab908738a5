//! Knowledge-base data model and its textual format.
//!
//! A knowledge base declares atoms, hard probability statements of the form
//! `P(X | Y) rel q`, conditional-independence defaults, priorities between
//! defaults, and queries:
//!
//! ```text
//! atoms L N T W;
//! P(L | N) = 0.1;
//! P(L | N & T) = 0.05;
//! default ci {E1, E2} given H;
//! prefer ci {L, S} given N & T over ci {L, S} given N;
//! query P(L | N & T & W);
//! ```
//!
//! Disjunction is written `v` because `|` is the conditioning bar.

mod lexer;
mod parser;
mod sentence;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::lp::Relation;
pub use parser::{parse_ci, parse_conditional, parse_kb, parse_kb_with_cap, parse_sentence};
pub use sentence::{canonical_form, Sentence};

/// Words that cannot be used as atom names.
pub const RESERVED: [&str; 3] = ["v", "true", "false"];

/// 1-based source position of a statement or token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: Span, message: impl Into<String>) -> Self {
        Self {
            line: span.line,
            column: span.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub span: Option<Span>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(span) => write!(f, "{span}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every semantic problem found in a syntactically valid knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub issues: Vec<Issue>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation issue(s)", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom(pub String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The conditional probability `P(target | given)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conditional {
    pub target: Sentence,
    pub given: Sentence,
}

impl Conditional {
    pub fn new(target: Sentence, given: Sentence) -> Self {
        Self { target, given }
    }

    pub fn unconditional(target: Sentence) -> Self {
        Self::new(target, Sentence::True)
    }
}

impl fmt::Display for Conditional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.given == Sentence::True {
            write!(f, "P({})", self.target)
        } else {
            write!(f, "P({} | {})", self.target, self.given)
        }
    }
}

/// A hard statement `P(target | given) relation value`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbConstraint {
    pub target: Sentence,
    pub given: Sentence,
    pub relation: Relation,
    pub value: f64,
    pub span: Option<Span>,
}

impl ProbConstraint {
    pub fn new(target: Sentence, given: Sentence, relation: Relation, value: f64) -> Self {
        Self {
            target,
            given,
            relation,
            value,
            span: None,
        }
    }

    /// `P(s) = 1`, the encoding of a categorical assertion.
    pub fn certain(s: Sentence) -> Self {
        Self::new(s, Sentence::True, Relation::Eq, 1.0)
    }

    pub fn conditional(&self) -> Conditional {
        Conditional::new(self.target.clone(), self.given.clone())
    }
}

impl fmt::Display for ProbConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.conditional(), self.relation, self.value)
    }
}

/// Conditional independence of the two pair members given a third sentence:
/// `P(x & y | z) = P(x | z) P(y | z)`.
///
/// The pair is unordered. Members are stored sorted by canonical form, and
/// equality, ordering and hashing go through canonical forms, so commuted
/// pairs and commuted `&`/`v` arguments compare equal.
#[derive(Debug, Clone)]
pub struct CIGTuple {
    pair: [Sentence; 2],
    given: Sentence,
    key: [String; 3],
}

impl CIGTuple {
    pub fn new(x: Sentence, y: Sentence, given: Sentence) -> Self {
        let (kx, ky) = (canonical_form(&x), canonical_form(&y));
        let (pair, first, second) = if kx <= ky {
            ([x, y], kx, ky)
        } else {
            ([y, x], ky, kx)
        };
        let key = [first, second, canonical_form(&given)];
        Self { pair, given, key }
    }

    pub fn pair(&self) -> &[Sentence; 2] {
        &self.pair
    }

    pub fn given(&self) -> &Sentence {
        &self.given
    }

    /// Canonical forms of both pair members followed by the conditioning sentence.
    pub fn key(&self) -> &[String; 3] {
        &self.key
    }
}

impl PartialEq for CIGTuple {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for CIGTuple {}

impl Hash for CIGTuple {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for CIGTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CIGTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for CIGTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ci {{{}, {}}} given {}",
            self.pair[0], self.pair[1], self.given
        )
    }
}

#[derive(Debug, Clone)]
pub struct DefaultDecl {
    pub tuple: CIGTuple,
    /// Produced by expanding a set-level independence statement rather than
    /// written as a single `default ci` line.
    pub expanded: bool,
    pub span: Option<Span>,
}

/// `prefer higher over lower`.
#[derive(Debug, Clone)]
pub struct PriorityDecl {
    pub higher: CIGTuple,
    pub lower: CIGTuple,
    pub span: Option<Span>,
}

#[derive(Debug, Clone)]
pub struct QueryDecl {
    pub conditional: Conditional,
    pub span: Option<Span>,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    pub atoms: Vec<Atom>,
    pub hard: Vec<ProbConstraint>,
    pub defaults: Vec<DefaultDecl>,
    pub priorities: Vec<PriorityDecl>,
    pub queries: Vec<QueryDecl>,
}

impl KnowledgeBase {
    pub fn with_atoms<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            atoms: names.into_iter().map(|n| Atom(n.into())).collect(),
            ..Self::default()
        }
    }

    pub fn add_hard(&mut self, c: ProbConstraint) -> &mut Self {
        self.hard.push(c);
        self
    }

    pub fn add_default(&mut self, tuple: CIGTuple) -> &mut Self {
        self.defaults.push(DefaultDecl {
            tuple,
            expanded: false,
            span: None,
        });
        self
    }

    pub fn add_priority(&mut self, higher: CIGTuple, lower: CIGTuple) -> &mut Self {
        self.priorities.push(PriorityDecl {
            higher,
            lower,
            span: None,
        });
        self
    }

    pub fn add_query(&mut self, q: Conditional) -> &mut Self {
        self.queries.push(QueryDecl {
            conditional: q,
            span: None,
        });
        self
    }

    pub fn atom_names(&self) -> Vec<&str> {
        self.atoms.iter().map(Atom::name).collect()
    }

    /// Pretty-prints the knowledge base in its textual format.
    ///
    /// Set-expanded defaults are written as ordinary `default ci` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.atoms.is_empty() {
            out.push_str("atoms");
            for a in &self.atoms {
                out.push(' ');
                out.push_str(a.name());
            }
            out.push_str(";\n");
        }
        for c in &self.hard {
            out.push_str(&format!("{c};\n"));
        }
        for d in &self.defaults {
            out.push_str(&format!("default {};\n", d.tuple));
        }
        for p in &self.priorities {
            out.push_str(&format!("prefer {} over {};\n", p.higher, p.lower));
        }
        for q in &self.queries {
            out.push_str(&format!("query {};\n", q.conditional));
        }
        out
    }
}
