use std::fmt;

/// A propositional formula over declared atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sentence {
    True,
    False,
    Atom(String),
    Not(Box<Sentence>),
    And(Box<Sentence>, Box<Sentence>),
    Or(Box<Sentence>, Box<Sentence>),
    Implies(Box<Sentence>, Box<Sentence>),
    Iff(Box<Sentence>, Box<Sentence>),
}

impl Sentence {
    pub fn atom(name: impl Into<String>) -> Self {
        Sentence::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Sentence) -> Self {
        Sentence::Not(Box::new(s))
    }

    pub fn and(a: Sentence, b: Sentence) -> Self {
        Sentence::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Sentence, b: Sentence) -> Self {
        Sentence::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Sentence, b: Sentence) -> Self {
        Sentence::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Sentence, b: Sentence) -> Self {
        Sentence::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction of `parts`; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Sentence>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Sentence::and)
            .unwrap_or(Sentence::True)
    }

    /// Atom names in first-occurrence order, without repeats.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Sentence::True | Sentence::False => {}
            Sentence::Atom(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            Sentence::Not(c) => c.collect_atoms(out),
            Sentence::And(a, b)
            | Sentence::Or(a, b)
            | Sentence::Implies(a, b)
            | Sentence::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Evaluate under an assignment given as a lookup from atom name to value.
    pub fn eval<F: Fn(&str) -> bool + Copy>(&self, value_of: F) -> bool {
        match self {
            Sentence::True => true,
            Sentence::False => false,
            Sentence::Atom(name) => value_of(name),
            Sentence::Not(c) => !c.eval(value_of),
            Sentence::And(a, b) => a.eval(value_of) && b.eval(value_of),
            Sentence::Or(a, b) => a.eval(value_of) || b.eval(value_of),
            Sentence::Implies(a, b) => !a.eval(value_of) || b.eval(value_of),
            Sentence::Iff(a, b) => a.eval(value_of) == b.eval(value_of),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Sentence::Iff(..) => 1,
            Sentence::Implies(..) => 2,
            Sentence::Or(..) => 3,
            Sentence::And(..) => 4,
            Sentence::Not(..) => 5,
            Sentence::True | Sentence::False | Sentence::Atom(_) => 6,
        }
    }

    fn is_binary(&self) -> bool {
        self.precedence() <= 4
    }
}

/// Deterministic, purely syntactic normal form.
///
/// Binary subterms are parenthesized and the two arguments of every `&` and
/// `v` node are sorted, so commuted conjunctions and disjunctions share one
/// string. No other rewriting happens: `!!A` stays `!!A`. The output is itself
/// valid sentence syntax.
pub fn canonical_form(s: &Sentence) -> String {
    match s {
        Sentence::True => "true".to_owned(),
        Sentence::False => "false".to_owned(),
        Sentence::Atom(name) => name.clone(),
        Sentence::Not(c) => format!("!{}", canonical_operand(c)),
        Sentence::And(a, b) => commutative(a, b, "&"),
        Sentence::Or(a, b) => commutative(a, b, "v"),
        Sentence::Implies(a, b) => {
            format!("{} -> {}", canonical_operand(a), canonical_operand(b))
        }
        Sentence::Iff(a, b) => {
            format!("{} <-> {}", canonical_operand(a), canonical_operand(b))
        }
    }
}

fn canonical_operand(s: &Sentence) -> String {
    if s.is_binary() {
        format!("({})", canonical_form(s))
    } else {
        canonical_form(s)
    }
}

fn commutative(a: &Sentence, b: &Sentence, op: &str) -> String {
    let mut parts = [canonical_operand(a), canonical_operand(b)];
    parts.sort();
    format!("{} {op} {}", parts[0], parts[1])
}

/// Renders in the knowledge-base syntax with the fewest parentheses that
/// still parse back to the identical tree.
impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sentence::True => f.write_str("true"),
            Sentence::False => f.write_str("false"),
            Sentence::Atom(name) => f.write_str(name),
            Sentence::Not(c) => {
                f.write_str("!")?;
                write_operand(f, c, c.precedence() < 5)
            }
            Sentence::And(a, b) => write_binary(f, self, a, b, " & ", Assoc::Left),
            Sentence::Or(a, b) => write_binary(f, self, a, b, " v ", Assoc::Left),
            Sentence::Implies(a, b) => write_binary(f, self, a, b, " -> ", Assoc::Right),
            Sentence::Iff(a, b) => write_binary(f, self, a, b, " <-> ", Assoc::Left),
        }
    }
}

enum Assoc {
    Left,
    Right,
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    node: &Sentence,
    a: &Sentence,
    b: &Sentence,
    op: &str,
    assoc: Assoc,
) -> fmt::Result {
    let p = node.precedence();
    let (paren_left, paren_right) = match assoc {
        Assoc::Left => (a.precedence() < p, b.precedence() <= p),
        Assoc::Right => (a.precedence() <= p, b.precedence() < p),
    };
    write_operand(f, a, paren_left)?;
    f.write_str(op)?;
    write_operand(f, b, paren_right)
}

fn write_operand(f: &mut fmt::Formatter<'_>, s: &Sentence, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({s})")
    } else {
        write!(f, "{s}")
    }
}
