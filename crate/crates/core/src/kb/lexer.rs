use super::{ParseError, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Semi,
    LParen,
    RParen,
    Bar,
    Comma,
    LBrace,
    RBrace,
    Eq,
    Ge,
    Le,
    Not,
    And,
    Arrow,
    DoubleArrow,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(v) => format!("number {v}"),
            Tok::Semi => "`;`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        let advance = |n: usize, col: &mut usize, i: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut col, &mut i),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                let word: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(word), span });
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                col += i - start;
                let text: String = chars[start..i].iter().collect();
                let value = text
                    .parse::<f64>()
                    .map_err(|_| ParseError::new(span, format!("malformed number `{text}`")))?;
                out.push(Token { tok: Tok::Number(value), span });
            }
            _ => {
                let rest = &chars[i..];
                let starts = |p: &str| {
                    p.chars().count() <= rest.len() && p.chars().zip(rest).all(|(a, b)| a == *b)
                };
                let (tok, len) = if starts("<->") {
                    (Tok::DoubleArrow, 3)
                } else if starts("->") {
                    (Tok::Arrow, 2)
                } else if starts(">=") {
                    (Tok::Ge, 2)
                } else if starts("<=") {
                    (Tok::Le, 2)
                } else {
                    let t = match c {
                        ';' => Tok::Semi,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '|' => Tok::Bar,
                        ',' => Tok::Comma,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '=' => Tok::Eq,
                        '!' => Tok::Not,
                        '&' => Tok::And,
                        other => {
                            return Err(ParseError::new(
                                span,
                                format!("unexpected character `{other}`"),
                            ))
                        }
                    };
                    (t, 1)
                };
                out.push(Token { tok, span });
                advance(len, &mut col, &mut i);
            }
        }
    }
    Ok(out)
}
