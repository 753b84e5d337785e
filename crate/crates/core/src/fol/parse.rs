//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := iff
//! iff     := imp ( "<->" iff )?
//! imp     := or ( "->" imp )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "~" unary | ("all" | "ex") VAR "." formula | primary
//! primary := "(" formula ")" | PRED "(" VAR ")" | VAR ("in" | "in*" | "=" | "=*") VAR
//! ```

use super::{Atom, Formula, Pred, Var};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown predicate `{name}` at offset {offset}")]
    UnknownPredicate { offset: usize, name: String },
    #[error("reserved variable name `{name}` at offset {offset}")]
    Reserved { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownPredicate { offset, .. }
            | ParseError::Reserved { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept machine-generated names (`_v0`, ...). Used when replaying dumps.
    pub allow_reserved: bool,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Formula, ParseError> {
    let tokens = lex(text, opts)?;
    let mut p = Parser { tokens, pos: 0 };
    let f = p.formula()?;
    match p.peek() {
        (Tok::Eof, _) => Ok(f),
        (t, off) => Err(syntax(off, format!("unexpected {}", t.describe()))),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    In,
    InStar,
    Eq,
    EqStar,
    Not,
    And,
    Or,
    Arrow,
    DArrow,
    All,
    Ex,
    Dot,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::In => "in",
            Tok::InStar => "in*",
            Tok::Eq => "=",
            Tok::EqStar => "=*",
            Tok::Not => "~",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::All => "all",
            Tok::Ex => "ex",
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { offset, message: message.into() }
}

fn lex(text: &str, opts: ParseOptions) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => {
                out.push((Tok::Not, start));
                i += 1;
            }
            b'&' => {
                out.push((Tok::And, start));
                i += 1;
            }
            b'|' => {
                out.push((Tok::Or, start));
                i += 1;
            }
            b'.' => {
                out.push((Tok::Dot, start));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    out.push((Tok::EqStar, start));
                    i += 2;
                } else {
                    out.push((Tok::Eq, start));
                    i += 1;
                }
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, start));
                i += 2;
            }
            b'<' if bytes[i..].starts_with(b"<->") => {
                out.push((Tok::DArrow, start));
                i += 3;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                if c == b'_' && !opts.allow_reserved {
                    return Err(ParseError::Reserved { offset: start, name: word.to_string() });
                }
                let tok = match word {
                    "in" if bytes.get(j) == Some(&b'*') => {
                        j += 1;
                        Tok::InStar
                    }
                    "in" => Tok::In,
                    "all" => Tok::All,
                    "ex" => Tok::Ex,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, start));
                i = j;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> (Tok, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.peek();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<usize, ParseError> {
        let (t, off) = self.bump();
        if t == want {
            Ok(off)
        } else {
            Err(syntax(off, format!("expected `{}`, found {}", want.symbol(), t.describe())))
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.bump() {
            (Tok::Ident(name), _) => Ok(Var::new(name)),
            (t, off) => Err(syntax(off, format!("expected variable, found {}", t.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        if self.peek().0 == Tok::DArrow {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek().0 == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek().0 == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek().0 == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().0 {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::All | Tok::Ex => {
                let (q, _) = self.bump();
                let v = self.var()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if q == Tok::All { Formula::forall(v, body) } else { Formula::exists(v, body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let (t, off) = self.bump();
        match t {
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if self.peek().0 == Tok::LParen => {
                let pred = match name.as_str() {
                    "set" => Pred::Set,
                    "At" => Pred::At,
                    "Pure" => Pred::Pure,
                    _ => return Err(ParseError::UnknownPredicate { offset: off, name }),
                };
                self.bump();
                let v = self.var()?;
                self.expect(Tok::RParen)?;
                Ok(Atom::unary(pred, v).into())
            }
            Tok::Ident(name) => {
                let lhs = Var::new(name);
                let (rel, roff) = self.bump();
                let pred = match rel {
                    Tok::In => Pred::In,
                    Tok::InStar => Pred::InStar,
                    Tok::Eq => Pred::Eq,
                    Tok::EqStar => Pred::EqStar,
                    other => {
                        return Err(syntax(
                            roff,
                            format!("expected relation after variable, found {}", other.describe()),
                        ))
                    }
                };
                let rhs = self.var()?;
                Ok(Atom::binary(pred, lhs, rhs).into())
            }
            other => Err(syntax(off, format!("expected formula, found {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_mapping() {
        assert_eq!(
            parse("all z. (z in x <-> z in y)").unwrap(),
            Formula::forall("z", Formula::iff(Formula::mem("z", "x"), Formula::mem("z", "y")))
        );
        assert_eq!(parse("x =* y").unwrap(), Formula::eq_star("x", "y"));
        assert_eq!(parse("x in* y").unwrap(), Formula::mem_star("x", "y"));
        assert_eq!(parse("At(x)").unwrap(), Formula::at("x"));
    }

    #[test]
    fn truncated_predicate_reports_offset() {
        let err = parse("set(").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
    }

    #[test]
    fn unknown_predicate() {
        let err = parse("foo(x)").unwrap_err();
        assert_eq!(err, ParseError::UnknownPredicate { offset: 0, name: "foo".into() });
    }

    #[test]
    fn reserved_names_rejected_unless_allowed() {
        assert!(matches!(parse("_v0 in x"), Err(ParseError::Reserved { offset: 0, .. })));
        let opts = ParseOptions { allow_reserved: true };
        assert_eq!(parse_with("_v0 in x", opts).unwrap(), Formula::mem("_v0", "x"));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("~a in b & c in d | e in f -> g in h <-> i in j").unwrap();
        let expect = Formula::iff(
            Formula::implies(
                Formula::or(
                    Formula::and(Formula::not(Formula::mem("a", "b")), Formula::mem("c", "d")),
                    Formula::mem("e", "f"),
                ),
                Formula::mem("g", "h"),
            ),
            Formula::mem("i", "j"),
        );
        assert_eq!(f, expect);
        // arrows associate to the right
        assert_eq!(
            parse("a in b -> c in d -> e in f").unwrap(),
            Formula::implies(
                Formula::mem("a", "b"),
                Formula::implies(Formula::mem("c", "d"), Formula::mem("e", "f"))
            )
        );
        // & and | to the left
        assert_eq!(
            parse("a in b & c in d & e in f").unwrap(),
            Formula::and(
                Formula::and(Formula::mem("a", "b"), Formula::mem("c", "d")),
                Formula::mem("e", "f")
            )
        );
    }

    #[test]
    fn quantifier_scope_runs_to_closing_paren() {
        assert_eq!(
            parse("(all x. x in y | y in x) & y = y").unwrap(),
            Formula::and(
                Formula::forall("x", Formula::or(Formula::mem("x", "y"), Formula::mem("y", "x"))),
                Formula::eq("y", "y")
            )
        );
    }

    #[test]
    fn dangling_input() {
        let err = parse("x in y )").unwrap_err();
        assert_eq!(err.offset(), 7);
        assert!(parse("x in").is_err());
        assert!(parse("all . x in y").is_err());
        assert!(parse("x # y").is_err());
    }
}
