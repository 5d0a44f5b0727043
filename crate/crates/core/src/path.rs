//! Property-path expressions: parsing, inverse normalization and printing.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! path     := sequence ('|' sequence)*
//! sequence := elt_inv ('/' elt_inv)*
//! elt_inv  := '^'? elt
//! elt      := primary ('*' | '+' | '?')?
//! primary  := '<' iri '>' | '(' path ')'
//! ```
//!
//! `^<a>*` therefore reads as `^(<a>*)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathExpr {
    /// IRI label including its angle brackets, e.g. `<http://e/p>`.
    Label(String),
    Inverse(Box<PathExpr>),
    Seq(Box<PathExpr>, Box<PathExpr>),
    Alt(Box<PathExpr>, Box<PathExpr>),
    ZeroOrMore(Box<PathExpr>),
    OneOrMore(Box<PathExpr>),
    ZeroOrOne(Box<PathExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported feature at byte {offset}: {feature}")]
    Unsupported {
        offset: usize,
        feature: &'static str,
    },
}

impl PathExpr {
    pub fn label(iri: impl Into<String>) -> PathExpr {
        PathExpr::Label(iri.into())
    }

    pub fn inverse(e: PathExpr) -> PathExpr {
        PathExpr::Inverse(Box::new(e))
    }

    pub fn seq(l: PathExpr, r: PathExpr) -> PathExpr {
        PathExpr::Seq(Box::new(l), Box::new(r))
    }

    pub fn alt(l: PathExpr, r: PathExpr) -> PathExpr {
        PathExpr::Alt(Box::new(l), Box::new(r))
    }

    pub fn star(e: PathExpr) -> PathExpr {
        PathExpr::ZeroOrMore(Box::new(e))
    }

    pub fn plus(e: PathExpr) -> PathExpr {
        PathExpr::OneOrMore(Box::new(e))
    }

    pub fn opt(e: PathExpr) -> PathExpr {
        PathExpr::ZeroOrOne(Box::new(e))
    }

    /// Number of label leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            PathExpr::Label(_) => 1,
            PathExpr::Inverse(e)
            | PathExpr::ZeroOrMore(e)
            | PathExpr::OneOrMore(e)
            | PathExpr::ZeroOrOne(e) => e.leaf_count(),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PathExpr::Label(_) => 1,
            PathExpr::Inverse(e)
            | PathExpr::ZeroOrMore(e)
            | PathExpr::OneOrMore(e)
            | PathExpr::ZeroOrOne(e) => 1 + e.depth(),
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// True when the empty word is in the language.
    pub fn nullable(&self) -> bool {
        match self {
            PathExpr::Label(_) => false,
            PathExpr::Inverse(e) | PathExpr::OneOrMore(e) => e.nullable(),
            PathExpr::ZeroOrMore(_) | PathExpr::ZeroOrOne(_) => true,
            PathExpr::Seq(l, r) => l.nullable() && r.nullable(),
            PathExpr::Alt(l, r) => l.nullable() || r.nullable(),
        }
    }

    /// True when every `Inverse` sits directly above a `Label`.
    pub fn is_normalized(&self) -> bool {
        match self {
            PathExpr::Label(_) => true,
            PathExpr::Inverse(e) => matches!(**e, PathExpr::Label(_)),
            PathExpr::ZeroOrMore(e) | PathExpr::OneOrMore(e) | PathExpr::ZeroOrOne(e) => {
                e.is_normalized()
            }
            PathExpr::Seq(l, r) | PathExpr::Alt(l, r) => l.is_normalized() && r.is_normalized(),
        }
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathExpr::Label(iri) => f.write_str(iri),
            PathExpr::Inverse(e) => write!(f, "(^{e})"),
            PathExpr::Seq(l, r) => write!(f, "({l}/{r})"),
            PathExpr::Alt(l, r) => write!(f, "({l}|{r})"),
            PathExpr::ZeroOrMore(e) => write!(f, "({e}*)"),
            PathExpr::OneOrMore(e) => write!(f, "({e}+)"),
            PathExpr::ZeroOrOne(e) => write!(f, "({e}?)"),
        }
    }
}

/// Fully parenthesized form that [`parse_path`] reads back to the same tree.
pub fn expr_to_string(e: &PathExpr) -> String {
    e.to_string()
}

pub fn parse_path(text: &str) -> Result<PathExpr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty path expression"));
    }
    let e = p.path()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected {:?}", p.peek().unwrap())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn path(&mut self) -> Result<PathExpr, ParseError> {
        let mut e = self.sequence()?;
        while self.eat('|') {
            e = PathExpr::alt(e, self.sequence()?);
        }
        Ok(e)
    }

    fn sequence(&mut self) -> Result<PathExpr, ParseError> {
        let mut e = self.elt_or_inverse()?;
        while self.eat('/') {
            e = PathExpr::seq(e, self.elt_or_inverse()?);
        }
        Ok(e)
    }

    fn elt_or_inverse(&mut self) -> Result<PathExpr, ParseError> {
        if self.eat('^') {
            Ok(PathExpr::inverse(self.elt()?))
        } else {
            self.elt()
        }
    }

    fn elt(&mut self) -> Result<PathExpr, ParseError> {
        let primary = self.primary()?;
        self.skip_ws();
        Ok(match self.peek() {
            Some('*') => {
                self.pos += 1;
                PathExpr::star(primary)
            }
            Some('+') => {
                self.pos += 1;
                PathExpr::plus(primary)
            }
            Some('?') => {
                self.pos += 1;
                PathExpr::opt(primary)
            }
            _ => primary,
        })
    }

    fn primary(&mut self) -> Result<PathExpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => self.iri(),
            Some('(') => {
                self.pos += 1;
                let e = self.path()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some('!') => Err(ParseError::Unsupported {
                offset: self.pos,
                feature: "negated property set",
            }),
            Some(c) => Err(self.error(format!("expected '<' or '(', found {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn iri(&mut self) -> Result<PathExpr, ParseError> {
        let start = self.pos;
        for (i, c) in self.src[start..].char_indices().skip(1) {
            match c {
                '>' => {
                    self.pos = start + i + 1;
                    return Ok(PathExpr::Label(self.src[start..self.pos].to_owned()));
                }
                '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                    self.pos = start + i;
                    return Err(self.error(format!("invalid character {c:?} in IRI")));
                }
                c if c.is_whitespace() => {
                    self.pos = start + i;
                    return Err(self.error("whitespace in IRI"));
                }
                _ => {}
            }
        }
        self.pos = self.src.len();
        Err(self.error("unterminated IRI"))
    }
}

/// Pushes every `Inverse` down to the leaves without changing the language.
pub fn normalize_inverses(e: &PathExpr) -> PathExpr {
    normalize(e, false)
}

fn normalize(e: &PathExpr, inverted: bool) -> PathExpr {
    match e {
        PathExpr::Label(_) if inverted => PathExpr::inverse(e.clone()),
        PathExpr::Label(_) => e.clone(),
        PathExpr::Inverse(inner) => normalize(inner, !inverted),
        PathExpr::Seq(l, r) if inverted => PathExpr::seq(normalize(r, true), normalize(l, true)),
        PathExpr::Seq(l, r) => PathExpr::seq(normalize(l, false), normalize(r, false)),
        PathExpr::Alt(l, r) => PathExpr::alt(normalize(l, inverted), normalize(r, inverted)),
        PathExpr::ZeroOrMore(inner) => PathExpr::star(normalize(inner, inverted)),
        PathExpr::OneOrMore(inner) => PathExpr::plus(normalize(inner, inverted)),
        PathExpr::ZeroOrOne(inner) => PathExpr::opt(normalize(inner, inverted)),
    }
}
