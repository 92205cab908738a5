use std::collections::HashSet;

use super::lexer::{tokenize, Tok, Token};
use super::{
    Atom, CIGTuple, Conditional, DefaultDecl, Issue, KnowledgeBase, ParseError, PriorityDecl,
    ProbConstraint, QueryDecl, Sentence, Span, ValidationError, RESERVED,
};
use crate::lp::Relation;
use crate::{Error, DEFAULT_ATOM_CAP};

/// Parses and validates a knowledge base with the default atom cap.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, Error> {
    parse_kb_with_cap(text, DEFAULT_ATOM_CAP)
}

pub fn parse_kb_with_cap(text: &str, atom_cap: usize) -> Result<KnowledgeBase, Error> {
    let tokens = tokenize(text)?;
    let mut parser = Parser::new(&tokens, end_span(text));
    let (kb, sentence_spans) = parser.knowledge_base()?;
    validate(&kb, &sentence_spans, atom_cap)?;
    Ok(kb)
}

/// Parses one sentence, resolving every atom against `atoms`.
pub fn parse_sentence(text: &str, atoms: &[Atom]) -> Result<Sentence, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser::new(&tokens, end_span(text));
    let s = parser.sentence()?;
    parser.expect_end()?;
    check_atoms(&s, atoms, &tokens)?;
    Ok(s)
}

/// Parses `P(X)` or `P(X | Y)`.
pub fn parse_conditional(text: &str, atoms: &[Atom]) -> Result<Conditional, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser::new(&tokens, end_span(text));
    parser.keyword("P")?;
    let q = parser.probability_body()?;
    parser.expect_end()?;
    check_atoms(&q.target, atoms, &tokens)?;
    check_atoms(&q.given, atoms, &tokens)?;
    Ok(q)
}

/// Parses `ci {x, y} given z`.
pub fn parse_ci(text: &str, atoms: &[Atom]) -> Result<CIGTuple, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser::new(&tokens, end_span(text));
    let t = parser.ci_ref()?;
    parser.expect_end()?;
    for s in tuple_sentences(&t) {
        check_atoms(&s, atoms, &tokens)?;
    }
    Ok(t)
}

fn end_span(text: &str) -> Span {
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Span { line, column }
}

fn check_atoms(s: &Sentence, atoms: &[Atom], tokens: &[Token]) -> Result<(), ParseError> {
    for name in s.atoms() {
        if !atoms.iter().any(|a| a.name() == name) {
            let span = tokens
                .iter()
                .find(|t| t.tok == Tok::Ident(name.to_owned()))
                .map_or(Span { line: 1, column: 1 }, |t| t.span);
            return Err(ParseError::new(span, format!("unknown atom `{name}`")));
        }
    }
    Ok(())
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    eof: Span,
}

type SentenceSpans = Vec<(Span, Vec<Sentence>)>;

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token], eof: Span) -> Self {
        Self { tokens, pos: 0, eof }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map_or(self.eof, |t| t.span)
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_owned(), Tok::describe);
        Err(ParseError::new(
            self.span(),
            format!("expected {expected}, found {found}"),
        ))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(&tok.describe())
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w == word)
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.at_keyword(word) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("`{word}`"))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            self.error("end of input")
        } else {
            Ok(())
        }
    }

    fn knowledge_base(&mut self) -> Result<(KnowledgeBase, SentenceSpans), ParseError> {
        let mut kb = KnowledgeBase::default();
        let mut spans = Vec::new();
        while self.pos < self.tokens.len() {
            let span = self.span();
            match self.peek() {
                Some(Tok::Ident(w)) if w == "atoms" => {
                    self.pos += 1;
                    let mut any = false;
                    while let Some(Tok::Ident(name)) = self.peek() {
                        kb.atoms.push(Atom::new(name.clone()));
                        self.pos += 1;
                        any = true;
                    }
                    if !any {
                        return self.error("an atom name");
                    }
                    self.expect(Tok::Semi)?;
                }
                Some(Tok::Ident(w)) if w == "P" => {
                    self.pos += 1;
                    let q = self.probability_body()?;
                    let relation = match self.peek() {
                        Some(Tok::Eq) => Relation::Eq,
                        Some(Tok::Ge) => Relation::Ge,
                        Some(Tok::Le) => Relation::Le,
                        _ => return self.error("`=`, `>=` or `<=`"),
                    };
                    self.pos += 1;
                    let value = match self.peek() {
                        Some(Tok::Number(v)) => *v,
                        _ => return self.error("a number"),
                    };
                    self.pos += 1;
                    self.expect(Tok::Semi)?;
                    spans.push((span, vec![q.target.clone(), q.given.clone()]));
                    kb.hard.push(ProbConstraint {
                        target: q.target,
                        given: q.given,
                        relation,
                        value,
                        span: Some(span),
                    });
                }
                Some(Tok::Ident(w)) if w == "default" => {
                    self.pos += 1;
                    let tuple = self.ci_ref()?;
                    self.expect(Tok::Semi)?;
                    spans.push((span, tuple_sentences(&tuple)));
                    kb.defaults.push(DefaultDecl {
                        tuple,
                        expanded: false,
                        span: Some(span),
                    });
                }
                Some(Tok::Ident(w)) if w == "prefer" => {
                    self.pos += 1;
                    let higher = self.ci_ref()?;
                    self.keyword("over")?;
                    let lower = self.ci_ref()?;
                    self.expect(Tok::Semi)?;
                    let mut all = tuple_sentences(&higher);
                    all.extend(tuple_sentences(&lower));
                    spans.push((span, all));
                    kb.priorities.push(PriorityDecl {
                        higher,
                        lower,
                        span: Some(span),
                    });
                }
                Some(Tok::Ident(w)) if w == "query" => {
                    self.pos += 1;
                    self.keyword("P")?;
                    let q = self.probability_body()?;
                    self.expect(Tok::Semi)?;
                    spans.push((span, vec![q.target.clone(), q.given.clone()]));
                    kb.queries.push(QueryDecl {
                        conditional: q,
                        span: Some(span),
                    });
                }
                _ => return self.error("`atoms`, `P`, `default`, `prefer` or `query`"),
            }
        }
        Ok((kb, spans))
    }

    /// `( sentence [ | sentence ] )`, after the leading `P`.
    fn probability_body(&mut self) -> Result<Conditional, ParseError> {
        self.expect(Tok::LParen)?;
        let target = self.sentence()?;
        let given = if self.eat(&Tok::Bar) {
            self.sentence()?
        } else {
            Sentence::True
        };
        self.expect(Tok::RParen)?;
        Ok(Conditional { target, given })
    }

    /// `ci { sentence , sentence } given sentence`
    fn ci_ref(&mut self) -> Result<CIGTuple, ParseError> {
        self.keyword("ci")?;
        self.expect(Tok::LBrace)?;
        let x = self.sentence()?;
        self.expect(Tok::Comma)?;
        let y = self.sentence()?;
        self.expect(Tok::RBrace)?;
        self.keyword("given")?;
        let z = self.sentence()?;
        Ok(CIGTuple::new(x, y, z))
    }

    fn sentence(&mut self) -> Result<Sentence, ParseError> {
        let mut left = self.implication()?;
        while self.eat(&Tok::DoubleArrow) {
            let right = self.implication()?;
            left = Sentence::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Sentence, ParseError> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let right = self.implication()?;
            Ok(Sentence::implies(left, right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Sentence, ParseError> {
        let mut left = self.conjunction()?;
        while self.at_keyword("v") {
            self.pos += 1;
            let right = self.conjunction()?;
            left = Sentence::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Sentence, ParseError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::And) {
            let right = self.unary()?;
            left = Sentence::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Sentence, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Sentence::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let s = self.sentence()?;
                self.expect(Tok::RParen)?;
                Ok(s)
            }
            Some(Tok::Ident(w)) if w == "true" => {
                self.pos += 1;
                Ok(Sentence::True)
            }
            Some(Tok::Ident(w)) if w == "false" => {
                self.pos += 1;
                Ok(Sentence::False)
            }
            Some(Tok::Ident(w)) if w != "v" => {
                self.pos += 1;
                Ok(Sentence::atom(w.clone()))
            }
            _ => self.error("a sentence"),
        }
    }
}

fn tuple_sentences(t: &CIGTuple) -> Vec<Sentence> {
    let [x, y] = t.pair().clone();
    vec![x, y, t.given().clone()]
}

fn validate(kb: &KnowledgeBase, spans: &SentenceSpans, atom_cap: usize) -> Result<(), ValidationError> {
    let mut issues = Vec::new();
    let mut push = |span: Option<Span>, message: String| issues.push(Issue { span, message });

    let mut seen = HashSet::new();
    for atom in &kb.atoms {
        if RESERVED.contains(&atom.name()) {
            push(None, format!("`{}` is reserved and cannot name an atom", atom.name()));
        }
        if !seen.insert(atom.name()) {
            push(None, format!("atom `{}` declared more than once", atom.name()));
        }
    }
    if kb.atoms.len() > atom_cap {
        push(
            None,
            format!("{} atoms exceed the configured cap of {atom_cap}", kb.atoms.len()),
        );
    }

    for (span, sentences) in spans {
        let mut reported = Vec::new();
        for s in sentences {
            for name in s.atoms() {
                if !seen.contains(name) && !reported.contains(&name) {
                    reported.push(name);
                    push(Some(*span), format!("undeclared atom `{name}`"));
                }
            }
        }
    }

    for c in &kb.hard {
        if !(0.0..=1.0).contains(&c.value) {
            push(c.span, format!("value out of [0,1]: {}", c.value));
        }
    }
    for p in &kb.priorities {
        if p.higher == p.lower {
            push(p.span, "a default cannot be preferred over itself".to_owned());
        }
    }

    if issues.is_empty() {
        Ok(())
    } else {
        Err(ValidationError { issues })
    }
}
