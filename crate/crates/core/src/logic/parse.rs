use std::collections::HashMap;

use super::{Span, Term, TermKind};
use crate::error::ParseError;
use crate::gates::Axis;

/// Named propositions that may be referenced by identifier inside a term.
pub type PropEnv = HashMap<String, Term>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    Tilde,
    Amp,
    Caret,
    Bar,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| (t, Span { start, end: start + 1 });
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => out.push(single(Tok::Tilde)),
            b'&' => out.push(single(Tok::Amp)),
            b'^' => out.push(single(Tok::Caret)),
            b'|' => out.push(single(Tok::Bar)),
            b'(' => out.push(single(Tok::LParen)),
            b')' => out.push(single(Tok::RParen)),
            b'[' => out.push(single(Tok::LBracket)),
            b']' => out.push(single(Tok::RBracket)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, Span { start, end: i + 2 }));
                i += 2;
                continue;
            }
            b'<' if src[i..].starts_with("<->") => {
                out.push((Tok::DoubleArrow, Span { start, end: i + 3 }));
                i += 3;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i]
                    .parse()
                    .map_err(|_| ParseError::new(start, "number too large"))?;
                out.push((Tok::Num(n), Span { start, end: i }));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), Span { start, end: i }));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    out.push((Tok::Eof, Span { start: src.len(), end: src.len() }));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    Right,
}

fn binary_op(tok: &Tok) -> Option<(u8, Assoc)> {
    match tok {
        Tok::DoubleArrow => Some((1, Assoc::Left)),
        Tok::Arrow => Some((2, Assoc::Right)),
        Tok::Bar => Some((3, Assoc::Left)),
        Tok::Caret => Some((4, Assoc::Left)),
        Tok::Amp => Some((5, Assoc::Left)),
        _ => None,
    }
}

const OPERAND_START: &[&str] = &["atom", "`top`", "`bot`", "proposition name", "`~`", "`[`", "`(`"];
const BINARY_OPS: &[&str] = &["`&`", "`^`", "`|`", "`->`", "`<->`"];

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    props: Option<&'a PropEnv>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::new(self.span().start, format!("unexpected {}", self.peek().describe()))
            .expecting(expected)
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&[&tok.describe()]))
        }
    }

    fn expr(&mut self, min_prec: u8) -> Result<Term, ParseError> {
        let mut lhs = self.unary()?;
        while let Some((prec, assoc)) = binary_op(self.peek()) {
            if prec < min_prec {
                break;
            }
            let (op, _) = self.bump();
            let next = if assoc == Assoc::Left { prec + 1 } else { prec };
            let rhs = self.expr(next)?;
            let span = Span {
                start: lhs.span.start,
                end: rhs.span.end,
            };
            let (l, r) = (Box::new(lhs), Box::new(rhs));
            let kind = match op {
                Tok::DoubleArrow => TermKind::Iff(l, r),
                Tok::Arrow => TermKind::Imp(l, r),
                Tok::Bar => TermKind::Or(l, r),
                Tok::Caret => TermKind::Xor(l, r),
                Tok::Amp => TermKind::And(l, r),
                _ => unreachable!("binary_op only matches operators"),
            };
            lhs = Term { kind, span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                let body = self.unary()?;
                let end = body.span.end;
                Ok(Term::not(body).with_span(Span { start, end }))
            }
            Tok::LBracket => {
                self.bump();
                let (name, name_span) = match self.bump() {
                    (Tok::Ident(s), sp) => (s, sp),
                    (t, sp) => {
                        return Err(ParseError::new(sp.start, format!("unexpected {}", t.describe()))
                            .expecting(&["gate name", "`mz`", "`mx`", "`my`"]))
                    }
                };
                let mut wires = Vec::new();
                while let Tok::Num(w) = *self.peek() {
                    if w == 0 {
                        return Err(ParseError::new(self.span().start, "qubit indices start at 1"));
                    }
                    wires.push(w);
                    self.bump();
                }
                if *self.peek() != Tok::RBracket {
                    return Err(self.unexpected(&["qubit index", "`]`"]));
                }
                self.bump();
                if wires.is_empty() {
                    return Err(ParseError::new(name_span.end, "missing qubit index").expecting(&["qubit index"]));
                }
                let body = self.unary()?;
                let span = Span {
                    start,
                    end: body.span.end,
                };
                let meas_axis = name
                    .strip_prefix('m')
                    .filter(|rest| rest.len() == 1)
                    .and_then(|rest| Axis::from_letter(rest.chars().next()?));
                match meas_axis {
                    Some(axis) => {
                        if wires.len() != 1 {
                            return Err(ParseError::new(
                                name_span.start,
                                format!("measurement `{name}` takes exactly one qubit"),
                            ));
                        }
                        Ok(Term::meas(axis, wires[0], body).with_span(span))
                    }
                    None => Ok(Term::apply(name, wires, body).with_span(span)),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr(0)?;
                if *self.peek() != Tok::RParen {
                    let mut expected = BINARY_OPS.to_vec();
                    expected.push("`)`");
                    return Err(self.unexpected(&expected));
                }
                let end = self.bump().1.end;
                Ok(inner.with_span(Span { start, end }))
            }
            Tok::Ident(name) => {
                let (_, span) = self.bump();
                self.ident(&name, span)
            }
            _ => Err(self.unexpected(OPERAND_START)),
        }
    }

    fn ident(&self, name: &str, span: Span) -> Result<Term, ParseError> {
        match name {
            "top" => return Ok(Term::top().with_span(span)),
            "bot" => return Ok(Term::bot().with_span(span)),
            _ => {}
        }
        let mut chars = name.chars();
        if let Some(axis) = chars.next().and_then(Axis::from_letter) {
            let digits = chars.as_str();
            if !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit()) {
                let q: usize = digits
                    .parse()
                    .map_err(|_| ParseError::new(span.start, "qubit index too large"))?;
                if q == 0 {
                    return Err(ParseError::new(span.start, "qubit indices start at 1"));
                }
                return Ok(Term::atom(axis, q).with_span(span));
            }
        }
        match self.props.and_then(|env| env.get(name)) {
            Some(t) => Ok(t.clone().with_span(span)),
            None => Err(ParseError::new(span.start, format!("unknown proposition `{name}`"))
                .expecting(&["atom such as `z1`", "`top`", "`bot`"])),
        }
    }
}

/// Parses a term.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    parse_impl(text, None)
}

/// Parses a term in which bare identifiers may name propositions from `props`.
pub fn parse_with(text: &str, props: &PropEnv) -> Result<Term, ParseError> {
    parse_impl(text, Some(props))
}

fn parse_impl(text: &str, props: Option<&PropEnv>) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        props,
    };
    let t = p.expr(0)?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(BINARY_OPS));
    }
    p.expect(Tok::Eof)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn epr_formula() {
        assert_eq!(
            p("(z1 <-> z2) & (x1 <-> x2)"),
            Term::and(Term::iff(Term::z(1), Term::z(2)), Term::iff(Term::x(1), Term::x(2)))
        );
    }

    #[test]
    fn gate_prefix() {
        assert_eq!(p("[H 1] z1"), Term::apply("H", vec![1], Term::z(1)));
        assert_eq!(
            p("[CNOT 1 2][H 1]~z1"),
            Term::apply("CNOT", vec![1, 2], Term::apply("H", vec![1], Term::not(Term::z(1))))
        );
        assert_eq!(p("[mz 3]x1"), Term::meas(Axis::Z, 3, Term::x(1)));
    }

    #[test]
    fn precedence_and_over_or() {
        assert_eq!(
            p("z1 & x2 | y3"),
            Term::or(Term::and(Term::z(1), Term::x(2)), Term::y(3))
        );
        assert_eq!(
            p("x1 ^ x2 | z1"),
            Term::or(Term::xor(Term::x(1), Term::x(2)), Term::z(1))
        );
        assert_eq!(p("~z1 & z2"), Term::and(Term::not(Term::z(1)), Term::z(2)));
        assert_eq!(
            p("[H 1]z1 & z2"),
            Term::and(Term::apply("H", vec![1], Term::z(1)), Term::z(2))
        );
    }

    #[test]
    fn associativity() {
        assert_eq!(
            p("z1 -> z2 -> z3"),
            Term::imp(Term::z(1), Term::imp(Term::z(2), Term::z(3)))
        );
        assert_eq!(
            p("x1 ^ x2 ^ x3"),
            Term::xor(Term::xor(Term::x(1), Term::x(2)), Term::x(3))
        );
        assert_eq!(
            p("z1 <-> z2 <-> z3"),
            Term::iff(Term::iff(Term::z(1), Term::z(2)), Term::z(3))
        );
    }

    #[test]
    fn spans_cover_source() {
        let t = p("  ~z1 & (x2)");
        assert_eq!(t.span, Span { start: 2, end: 12 });
        if let TermKind::And(l, r) = &t.kind {
            assert_eq!(l.span, Span { start: 2, end: 5 });
            assert_eq!(r.span, Span { start: 8, end: 12 });
        } else {
            panic!("expected conjunction");
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("z1 & ").unwrap_err();
        assert_eq!(e.position, 5);
        assert!(!e.expected.is_empty());
        assert_eq!(parse("z1 z2").unwrap_err().position, 3);
        assert_eq!(parse("z0").unwrap_err().position, 0);
        assert_eq!(parse("(z1").unwrap_err().position, 3);
        assert_eq!(parse("[H]z1").unwrap_err().position, 2);
        assert_eq!(parse("[mz 1 2]z1").unwrap_err().position, 1);
        assert_eq!(parse("z1 # z2").unwrap_err().position, 3);
        assert_eq!(parse("foo & z1").unwrap_err().position, 0);
        assert!(parse("").is_err());
        assert!(parse("z1 - z2").is_err());
    }

    #[test]
    fn named_propositions() {
        let mut env = PropEnv::new();
        env.insert("E23".into(), p("(z2 <-> z3) & (x2 <-> x3)"));
        let t = parse_with("z1 & E23", &env).unwrap();
        assert_eq!(t, Term::and(Term::z(1), p("(z2 <-> z3) & (x2 <-> x3)")));
    }
}
