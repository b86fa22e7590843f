//! Lexer and recursive-descent parser for propositions and terms.

use std::fmt;

use thiserror::Error;

use super::{Mode, Path, Prop, Term};

const MAX_DEPTH: usize = 512;

const KEYWORDS: &[&str] = &[
    "sstar", "smul", "dTop", "dBot", "fst", "snd", "inl", "inr", "dOr", "Top", "Bot",
];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Byte range in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Source spans laid out like the term's children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    pub fn lookup(&self, path: &Path) -> Option<Span> {
        let mut cur = self;
        for &i in &path.0 {
            cur = cur.children.get(i)?;
        }
        Some(cur.span)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    Comma,
    LParen,
    RParen,
    Lt,
    Gt,
    Bar2,
    Star,
    Colon,
    Arrow,
    And,
    Or,
    Word(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lambda => "`\\`",
            Tok::Dot => "`.`",
            Tok::Comma => "`,`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Bar2 => "`||`",
            Tok::Star => "`*`",
            Tok::Colon => "`:`",
            Tok::Arrow => "`->`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Word(w) => return write!(f, "`{w}`"),
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (start, c) = bytes[i];
        let next = bytes.get(i + 1).map(|&(_, c)| c);
        let single = |tok: Tok| (tok, 1usize);
        let (tok, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '\\' if next == Some('/') => (Tok::Or, 2),
            '\\' => single(Tok::Lambda),
            '/' if next == Some('\\') => (Tok::And, 2),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '|' if next == Some('|') => (Tok::Bar2, 2),
            '.' => single(Tok::Dot),
            ',' => single(Tok::Comma),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '<' => single(Tok::Lt),
            '>' => single(Tok::Gt),
            '*' => single(Tok::Star),
            ':' => single(Tok::Colon),
            c if is_word_char(c) => {
                let mut j = i;
                while j < bytes.len() && is_word_char(bytes[j].1) {
                    j += 1;
                }
                let end = bytes.get(j).map(|&(o, _)| o).unwrap_or(src.len());
                out.push((
                    Tok::Word(src[start..end].to_string()),
                    Span { start, end },
                ));
                i = j;
                continue;
            }
            other => return Err(error_at(src, start, format!("unexpected character `{other}`"))),
        };
        let end = bytes.get(i + len).map(|&(o, _)| o).unwrap_or(src.len());
        out.push((tok, Span { start, end }));
        i += len;
    }
    out.push((
        Tok::Eof,
        Span {
            start: src.len(),
            end: src.len(),
        },
    ));
    Ok(out)
}

fn error_at(src: &str, offset: usize, message: String) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    ParseError {
        offset,
        line,
        col,
        message,
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    depth: usize,
    mode: &'a Mode,
}

type Parsed = Result<(Term, SpanTree), ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: String) -> Result<T, ParseError> {
        Err(error_at(self.src, self.span().start, message))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("nesting too deep".to_string());
        }
        Ok(())
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) if is_var_name(&w) => {
                self.bump();
                Ok(w)
            }
            other => self.err(format!("expected a variable name, found {other}")),
        }
    }

    fn scalar(&mut self) -> Result<String, ParseError> {
        let sp = self.span();
        let w = match self.peek().clone() {
            Tok::Word(w) => w,
            other => return self.err(format!("expected a scalar name, found {other}")),
        };
        match self.mode.scalars() {
            None => {
                return Err(error_at(
                    self.src,
                    sp.start,
                    "scalars are only available in algebraic mode".to_string(),
                ))
            }
            Some(s) if s.index_of(&w).is_none() => {
                return Err(error_at(
                    self.src,
                    sp.start,
                    format!("unknown scalar `{w}`"),
                ))
            }
            _ => {}
        }
        self.bump();
        Ok(w)
    }

    fn node(&self, start: usize, children: Vec<SpanTree>) -> SpanTree {
        SpanTree {
            span: Span {
                start,
                end: self.prev_end(),
            },
            children,
        }
    }

    fn term(&mut self) -> Parsed {
        self.enter()?;
        let r = if *self.peek() == Tok::Lambda {
            let start = self.span().start;
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Dot)?;
            let (body, bs) = self.term()?;
            Ok((Term::lam(&x, body), self.node(start, vec![bs])))
        } else {
            self.par()
        };
        self.depth -= 1;
        r
    }

    fn par(&mut self) -> Parsed {
        let start = self.span().start;
        let (mut t, mut ts) = self.app()?;
        while *self.peek() == Tok::Bar2 {
            self.bump();
            let (u, us) = self.app()?;
            t = Term::par(t, u);
            ts = self.node(start, vec![ts, us]);
        }
        Ok((t, ts))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Word(_) | Tok::Star | Tok::Lt | Tok::LParen
        )
    }

    fn app(&mut self) -> Parsed {
        let start = self.span().start;
        if !self.starts_atom() {
            return self.err(format!("expected a term, found {}", self.peek()));
        }
        let (mut t, mut ts) = self.atom()?;
        while self.starts_atom() {
            let (u, us) = self.atom()?;
            t = Term::app(t, u);
            ts = self.node(start, vec![ts, us]);
        }
        Ok((t, ts))
    }

    fn unary(&mut self, start: usize, f: fn(Term) -> Term) -> Parsed {
        self.expect(Tok::LParen)?;
        let (t, ts) = self.term()?;
        self.expect(Tok::RParen)?;
        Ok((f(t), self.node(start, vec![ts])))
    }

    fn atom(&mut self) -> Parsed {
        self.enter()?;
        let r = self.atom_inner();
        self.depth -= 1;
        r
    }

    fn atom_inner(&mut self) -> Parsed {
        let sp = self.span();
        let start = sp.start;
        match self.bump() {
            Tok::Star => {
                if self.mode.is_algebraic() {
                    return Err(error_at(
                        self.src,
                        start,
                        "`*` is not available in algebraic mode, use sstar(s)".to_string(),
                    ));
                }
                Ok((Term::Star, self.node(start, vec![])))
            }
            Tok::Lt => {
                let (a, as_) = self.term()?;
                self.expect(Tok::Comma)?;
                let (b, bs) = self.term()?;
                self.expect(Tok::Gt)?;
                Ok((Term::pair(a, b), self.node(start, vec![as_, bs])))
            }
            Tok::LParen => {
                let (t, ts) = self.term()?;
                if *self.peek() == Tok::Colon {
                    self.bump();
                    let p = self.prop()?;
                    self.expect(Tok::RParen)?;
                    return Ok((Term::ann(t, p), self.node(start, vec![ts])));
                }
                self.expect(Tok::RParen)?;
                Ok((t, ts))
            }
            Tok::Word(w) => match w.as_str() {
                "sstar" => {
                    self.expect(Tok::LParen)?;
                    let s = self.scalar()?;
                    self.expect(Tok::RParen)?;
                    Ok((Term::sstar(&s), self.node(start, vec![])))
                }
                "smul" => {
                    self.expect(Tok::LParen)?;
                    let s = self.scalar()?;
                    self.expect(Tok::Comma)?;
                    let (t, ts) = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok((Term::smul(&s, t), self.node(start, vec![ts])))
                }
                "dTop" => {
                    self.expect(Tok::LParen)?;
                    let (a, as_) = self.term()?;
                    self.expect(Tok::Comma)?;
                    let (b, bs) = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok((Term::elim_top(a, b), self.node(start, vec![as_, bs])))
                }
                "dOr" => {
                    self.expect(Tok::LParen)?;
                    let (t, ts) = self.term()?;
                    self.expect(Tok::Comma)?;
                    let x = self.ident()?;
                    self.expect(Tok::Dot)?;
                    let (u, us) = self.term()?;
                    self.expect(Tok::Comma)?;
                    let y = self.ident()?;
                    self.expect(Tok::Dot)?;
                    let (v, vs) = self.term()?;
                    self.expect(Tok::RParen)?;
                    Ok((
                        Term::elim_or(t, &x, u, &y, v),
                        self.node(start, vec![ts, us, vs]),
                    ))
                }
                "dBot" => self.unary(start, Term::elim_bot),
                "fst" => self.unary(start, Term::fst),
                "snd" => self.unary(start, Term::snd),
                "inl" => self.unary(start, Term::inl),
                "inr" => self.unary(start, Term::inr),
                _ if is_var_name(&w) => Ok((Term::var(&w), self.node(start, vec![]))),
                _ => Err(error_at(
                    self.src,
                    start,
                    format!("`{w}` is not a valid variable name"),
                )),
            },
            other => Err(error_at(
                self.src,
                start,
                format!("expected a term, found {other}"),
            )),
        }
    }

    fn prop(&mut self) -> Result<Prop, ParseError> {
        self.enter()?;
        let a = self.prop_or()?;
        let r = if *self.peek() == Tok::Arrow {
            self.bump();
            let b = self.prop()?;
            Prop::imp(a, b)
        } else {
            a
        };
        self.depth -= 1;
        Ok(r)
    }

    fn prop_or(&mut self) -> Result<Prop, ParseError> {
        let mut a = self.prop_and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            a = Prop::or(a, self.prop_and()?);
        }
        Ok(a)
    }

    fn prop_and(&mut self) -> Result<Prop, ParseError> {
        let mut a = self.prop_atom()?;
        while *self.peek() == Tok::And {
            self.bump();
            a = Prop::and(a, self.prop_atom()?);
        }
        Ok(a)
    }

    fn prop_atom(&mut self) -> Result<Prop, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) if w == "Top" => {
                self.bump();
                Ok(Prop::Top)
            }
            Tok::Word(w) if w == "Bot" => {
                self.bump();
                Ok(Prop::Bot)
            }
            Tok::LParen => {
                self.bump();
                let p = self.prop()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            other => self.err(format!("expected a proposition, found {other}")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {}", self.peek()));
        }
        Ok(())
    }
}

pub fn is_var_name(w: &str) -> bool {
    w.chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && w.chars().all(is_word_char)
        && !KEYWORDS.contains(&w)
}

fn parser<'a>(src: &'a str, mode: &'a Mode) -> Result<Parser<'a>, ParseError> {
    Ok(Parser {
        src,
        toks: lex(src)?,
        pos: 0,
        depth: 0,
        mode,
    })
}

pub fn parse_prop(src: &str) -> Result<Prop, ParseError> {
    let mode = Mode::Plain;
    let mut p = parser(src, &mode)?;
    let r = p.prop()?;
    p.finish()?;
    Ok(r)
}

pub fn parse_term(src: &str, mode: &Mode) -> Result<Term, ParseError> {
    parse_term_spanned(src, mode).map(|(t, _)| t)
}

/// Parses a term and also returns the source span of every subterm.
pub fn parse_term_spanned(src: &str, mode: &Mode) -> Result<(Term, SpanTree), ParseError> {
    let mut p = parser(src, mode)?;
    let r = p.term()?;
    p.finish()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::BiMagma;

    fn t(s: &str) -> Term {
        parse_term(s, &Mode::Plain).unwrap()
    }

    #[test]
    fn props() {
        assert_eq!(parse_prop("Top -> Top").unwrap(), Prop::imp(Prop::Top, Prop::Top));
        assert_eq!(
            parse_prop("Top \\/ Top \\/ Bot").unwrap(),
            Prop::or(Prop::or(Prop::Top, Prop::Top), Prop::Bot)
        );
        assert_eq!(
            parse_prop("Top -> Top -> Bot").unwrap(),
            Prop::imp(Prop::Top, Prop::imp(Prop::Top, Prop::Bot))
        );
        assert_eq!(
            parse_prop("Top /\\ Top \\/ Bot -> Top").unwrap(),
            Prop::imp(
                Prop::or(Prop::and(Prop::Top, Prop::Top), Prop::Bot),
                Prop::Top
            )
        );
        assert!(parse_prop("Top ->").is_err());
    }

    #[test]
    fn terms() {
        assert_eq!(
            t("inl(*) || inr(*)"),
            Term::par(Term::inl(Term::Star), Term::inr(Term::Star))
        );
        assert_eq!(
            t("\\x. x y"),
            Term::lam("x", Term::app(Term::var("x"), Term::var("y")))
        );
        assert_eq!(
            t("* || * || *"),
            Term::par(Term::par(Term::Star, Term::Star), Term::Star)
        );
        assert_eq!(
            t("dOr(t, x. x, y. y)"),
            Term::elim_or(Term::var("t"), "x", Term::var("x"), "y", Term::var("y"))
        );
        assert_eq!(
            t("(inl(*) : Top \\/ Bot)"),
            Term::ann(Term::inl(Term::Star), Prop::or(Prop::Top, Prop::Bot))
        );
        assert_eq!(t("f a b"), Term::app(Term::app(Term::var("f"), Term::var("a")), Term::var("b")));
    }

    #[test]
    fn modes() {
        let alg = Mode::algebraic(BiMagma::z4());
        assert_eq!(parse_term("sstar(2)", &alg).unwrap(), Term::sstar("2"));
        let e = parse_term("sstar(7)", &alg).unwrap_err();
        assert!(e.message.contains("unknown scalar"));
        assert!(parse_term("*", &alg).is_err());
        assert!(parse_term("sstar(1)", &Mode::Plain).is_err());
        assert!(parse_term("smul(1, *)", &Mode::Plain).is_err());
    }

    #[test]
    fn errors_are_positioned() {
        let e = parse_term("inl(* ||", &Mode::Plain).unwrap_err();
        assert_eq!(e.offset, 8);
        let e = parse_term("x $ y", &Mode::Plain).unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
        let deep = "(".repeat(10_000);
        assert!(parse_term(&deep, &Mode::Plain).is_err());
        assert!(parse_term("", &Mode::Plain).is_err());
        assert!(parse_term("inl x", &Mode::Plain).is_err());
    }

    #[test]
    fn spans() {
        let (_, sp) = parse_term_spanned("inl(*) || inr(x)", &Mode::Plain).unwrap();
        assert_eq!(sp.lookup(&Path(vec![1])), Some(Span { start: 10, end: 16 }));
        assert_eq!(sp.lookup(&Path(vec![1, 0])), Some(Span { start: 14, end: 15 }));
    }
}
