//! Text syntax for MTL formulas.
//!
//! ```text
//! formula  := implies
//! implies  := or ("->" implies)?
//! or       := and ("\/" and)*
//! and      := binary ("/\" binary)*
//! binary   := unary (("U" | "R") interval? binary)?
//! unary    := ("!" | "X") unary | ("<>" | "[]") interval? unary | primary
//! primary  := "true" | "false" | "(" formula ")" | atom
//! atom     := [number "*"] name ("<=" | "<" | ">=" | ">") term
//!           | name "in" box
//!           | "(" name ("," name)* ")" "in" box ("x" box)*
//!           | name
//! interval := ["_"] ("[" | "(") term "," term ("]" | ")")
//! term     := ["-"] number | "inf" | parameter
//! ```
//!
//! `!` is pushed through compound subformulas so the result is always in
//! negation normal form.

use std::fmt;

use thiserror::Error;

use super::formula::{
    BoxDim, Cmp, Formula, GroundInterval, Interval, IntervalError, Predicate, Term,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("{0}")]
    Interval(#[from] IntervalError),
    #[error("undeclared parameter `{0}`")]
    UndeclaredParameter(String),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
}

/// A parse failure with its byte offset in the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: {}", self.position, self.kind)
    }
}

/// Parses `text`, resolving identifiers used as thresholds or interval
/// endpoints against `params`. Singleton intervals are rejected.
pub fn parse<S: AsRef<str>>(text: &str, params: &[S]) -> Result<Formula, ParseError> {
    Parser::new(params).parse(text)
}

/// Configurable parser.
#[derive(Debug, Clone)]
pub struct Parser {
    params: Vec<String>,
    channels: Option<Vec<String>>,
    strict: bool,
}

impl Parser {
    pub fn new<S: AsRef<str>>(params: &[S]) -> Self {
        Self {
            params: params.iter().map(|s| s.as_ref().to_string()).collect(),
            channels: None,
            strict: true,
        }
    }

    /// Restricts atom channels to `channels`; other names become errors.
    pub fn channels<S: AsRef<str>>(mut self, channels: &[S]) -> Self {
        self.channels = Some(channels.iter().map(|s| s.as_ref().to_string()).collect());
        self
    }

    /// With `strict == false`, literal singleton intervals `[a,a]` are
    /// accepted.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn parse(&self, text: &str) -> Result<Formula, ParseError> {
        let tokens = lex(text)?;
        let mut st = State {
            cfg: self,
            tokens,
            pos: 0,
            end: text.len(),
        };
        let phi = st.implies()?;
        if let Some(t) = st.peek() {
            return Err(st.syntax_at(t.pos, format!("unexpected {}", t.tok)));
        }
        Ok(phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Underscore,
    Star,
    Minus,
    Not,
    And,
    Or,
    Implies,
    Le,
    Ge,
    Diamond,
    BoxOp,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(v) => write!(f, "number {v}"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Underscore => f.write_str("`_`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Not => f.write_str("`!`"),
            Tok::And => f.write_str("`/\\`"),
            Tok::Or => f.write_str("`\\/`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Ge => f.write_str("`>=`"),
            Tok::Diamond => f.write_str("`<>`"),
            Tok::BoxOp => f.write_str("`[]`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: String| ParseError {
        position: pos,
        kind: ParseErrorKind::Syntax(msg),
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let next = bytes.get(i + 1).copied();
        let mut push = |tok: Tok, len: usize| {
            out.push(Token { tok, pos: start });
            len
        };
        i += match c {
            b' ' | b'\t' | b'\n' | b'\r' => 1,
            b'(' => push(Tok::LParen, 1),
            b')' => push(Tok::RParen, 1),
            b'[' if next == Some(b']') => push(Tok::BoxOp, 2),
            b'[' => push(Tok::LBracket, 1),
            b']' => push(Tok::RBracket, 1),
            b',' => push(Tok::Comma, 1),
            b'*' => push(Tok::Star, 1),
            b'!' => push(Tok::Not, 1),
            b'/' if next == Some(b'\\') => push(Tok::And, 2),
            b'\\' if next == Some(b'/') => push(Tok::Or, 2),
            b'-' if next == Some(b'>') => push(Tok::Implies, 2),
            b'-' => push(Tok::Minus, 1),
            b'<' if next == Some(b'>') => push(Tok::Diamond, 2),
            b'<' if next == Some(b'=') => push(Tok::Le, 2),
            b'<' => push(Tok::Le, 1),
            b'>' if next == Some(b'=') => push(Tok::Ge, 2),
            b'>' => push(Tok::Ge, 1),
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let s = &text[i..j];
                let v: f64 = s
                    .parse()
                    .map_err(|_| err(i, format!("malformed number `{s}`")))?;
                push(Tok::Number(v), j - i)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let s = &text[i..j];
                match s {
                    "_" => push(Tok::Underscore, 1),
                    "U_" | "R_" => {
                        out.push(Token {
                            tok: Tok::Ident(s[..1].to_string()),
                            pos: start,
                        });
                        out.push(Token {
                            tok: Tok::Underscore,
                            pos: start + 1,
                        });
                        2
                    }
                    _ => push(Tok::Ident(s.to_string()), j - i),
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unexpected character `{ch}`")));
            }
        };
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &["true", "false", "inf", "in", "X", "U", "R"];

struct State<'a> {
    cfg: &'a Parser,
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl State<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn syntax_at(&self, pos: usize, msg: String) -> ParseError {
        ParseError {
            position: pos,
            kind: ParseErrorKind::Syntax(msg),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.syntax_at(t.pos, format!("expected {wanted}, found {}", t.tok)),
            None => self.syntax_at(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek_tok() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, wanted: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Some(Tok::Ident(s)) if s == kw)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::or(lhs.negate(), rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.binary()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.binary()?);
        }
        Ok(lhs)
    }

    fn binary(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        let until = if self.is_keyword("U") {
            true
        } else if self.is_keyword("R") {
            false
        } else {
            return Ok(lhs);
        };
        self.pos += 1;
        let iv = self.opt_interval()?;
        let rhs = self.binary()?;
        Ok(if until {
            Formula::until(iv, lhs, rhs)
        } else {
            Formula::release(iv, lhs, rhs)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek_tok() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(self.unary()?.negate())
            }
            Some(Tok::Ident(s)) if s == "X" => {
                self.pos += 1;
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Diamond) => {
                self.pos += 1;
                let iv = self.opt_interval()?;
                Ok(Formula::eventually(iv, self.unary()?))
            }
            Some(Tok::BoxOp) => {
                self.pos += 1;
                let iv = self.opt_interval()?;
                Ok(Formula::always(iv, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.is_keyword("true") {
            self.pos += 1;
            return Ok(Formula::True);
        }
        if self.is_keyword("false") {
            self.pos += 1;
            return Ok(Formula::False);
        }
        match self.peek_tok() {
            Some(Tok::LParen) => {
                if matches!(self.peek_at(1), Some(Tok::Ident(_)))
                    && matches!(self.peek_at(2), Some(Tok::Comma))
                {
                    return self.tuple_box();
                }
                self.pos += 1;
                let phi = self.implies()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(phi)
            }
            Some(Tok::Number(_)) | Some(Tok::Minus) => self.scaled_atom(),
            Some(Tok::Ident(_)) => self.named_atom(),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn channel(&mut self) -> Result<String, ParseError> {
        let pos = self.here();
        match self.peek_tok() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let name = s.clone();
                self.pos += 1;
                if let Some(chs) = &self.cfg.channels {
                    if !chs.contains(&name) {
                        return Err(ParseError {
                            position: pos,
                            kind: ParseErrorKind::UnknownChannel(name),
                        });
                    }
                }
                Ok(name)
            }
            _ => Err(self.unexpected("a channel name")),
        }
    }

    fn scaled_atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.here();
        let neg = self.eat(&Tok::Minus);
        let coeff = match self.peek_tok() {
            Some(Tok::Number(v)) => *v,
            _ => return Err(self.unexpected("a coefficient")),
        };
        self.pos += 1;
        let coeff = if neg { -coeff } else { coeff };
        if coeff == 0.0 {
            return Err(self.syntax_at(pos, "coefficient must be non-zero".into()));
        }
        self.expect(&Tok::Star, "`*`")?;
        let channel = self.channel()?;
        self.comparison(channel, coeff)
    }

    fn named_atom(&mut self) -> Result<Formula, ParseError> {
        let channel = self.channel()?;
        match self.peek_tok() {
            Some(Tok::Le) | Some(Tok::Ge) => self.comparison(channel, 1.0),
            Some(Tok::Ident(s)) if s == "in" => {
                self.pos += 1;
                let (lower, upper) = self.box_range()?;
                Ok(Formula::Atom(Predicate::Box {
                    dims: vec![BoxDim {
                        channel,
                        lower,
                        upper,
                    }],
                }))
            }
            _ => Ok(Formula::Atom(Predicate::Prop { channel })),
        }
    }

    fn comparison(&mut self, channel: String, coeff: f64) -> Result<Formula, ParseError> {
        let cmp = match self.peek_tok() {
            Some(Tok::Le) => Cmp::Le,
            Some(Tok::Ge) => Cmp::Ge,
            _ => return Err(self.unexpected("`<=` or `>=`")),
        };
        self.pos += 1;
        let threshold = self.term()?;
        Ok(Formula::Atom(Predicate::Linear {
            channel,
            coeff,
            cmp,
            threshold,
        }))
    }

    fn tuple_box(&mut self) -> Result<Formula, ParseError> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut names = vec![self.channel()?];
        while self.eat(&Tok::Comma) {
            names.push(self.channel()?);
        }
        self.expect(&Tok::RParen, "`)`")?;
        if !self.is_keyword("in") {
            return Err(self.unexpected("`in`"));
        }
        self.pos += 1;
        let mut dims = Vec::with_capacity(names.len());
        for (k, channel) in names.into_iter().enumerate() {
            if k > 0 {
                if !self.is_keyword("x") {
                    return Err(self.unexpected("`x` between box ranges"));
                }
                self.pos += 1;
            }
            let (lower, upper) = self.box_range()?;
            dims.push(BoxDim {
                channel,
                lower,
                upper,
            });
        }
        Ok(Formula::Atom(Predicate::Box { dims }))
    }

    fn box_range(&mut self) -> Result<(Term, Term), ParseError> {
        let pos = self.here();
        self.expect(&Tok::LBracket, "`[`")?;
        let lower = self.term()?;
        self.expect(&Tok::Comma, "`,`")?;
        let upper = self.term()?;
        self.expect(&Tok::RBracket, "`]`")?;
        if let (Term::Const(l), Term::Const(u)) = (lower, upper) {
            if l > u {
                return Err(ParseError {
                    position: pos,
                    kind: IntervalError::Inverted { lower: l, upper: u }.into(),
                });
            }
        }
        Ok((lower, upper))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.here();
        let neg = self.eat(&Tok::Minus);
        match self.peek_tok().cloned() {
            Some(Tok::Number(v)) => {
                self.pos += 1;
                Ok(Term::Const(if neg { -v } else { v }))
            }
            Some(Tok::Ident(s)) if s == "inf" => {
                self.pos += 1;
                Ok(Term::Const(if neg {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }))
            }
            Some(Tok::Ident(s)) if !neg && !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                match self.cfg.params.iter().position(|p| *p == s) {
                    Some(idx) => Ok(Term::Param(idx)),
                    None => Err(ParseError {
                        position: pos,
                        kind: ParseErrorKind::UndeclaredParameter(s),
                    }),
                }
            }
            _ => Err(self.unexpected("a number, `inf` or a parameter")),
        }
    }

    fn opt_interval(&mut self) -> Result<Interval, ParseError> {
        let underscore = self.eat(&Tok::Underscore);
        let lower_closed = match self.peek_tok() {
            Some(Tok::LBracket) => true,
            Some(Tok::LParen) if underscore => false,
            _ if underscore => return Err(self.unexpected("an interval")),
            _ => return Ok(Interval::unbounded()),
        };
        let pos = self.here();
        self.pos += 1;
        let lower = self.term()?;
        self.expect(&Tok::Comma, "`,`")?;
        let upper = self.term()?;
        let upper_closed = match self.peek_tok() {
            Some(Tok::RBracket) => true,
            Some(Tok::RParen) => false,
            _ => return Err(self.unexpected("`]` or `)`")),
        };
        self.pos += 1;
        let iv = Interval::new(lower, upper, lower_closed, upper_closed);
        let interval_err = |e: IntervalError| ParseError {
            position: pos,
            kind: e.into(),
        };
        for t in [lower, upper] {
            if let Term::Const(v) = t {
                if v.is_nan() || v < 0.0 {
                    return Err(interval_err(IntervalError::NegativeEndpoint(v)));
                }
            }
        }
        if let (Term::Const(l), Term::Const(u)) = (lower, upper) {
            GroundInterval {
                lower: l,
                upper: u,
                lower_closed,
                upper_closed: upper_closed && u != f64::INFINITY,
            }
            .validate(!self.cfg.strict)
            .map_err(interval_err)?;
        }
        Ok(iv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONE: &[&str] = &[];

    fn le(ch: &str, c: f64) -> Formula {
        Formula::Atom(Predicate::le(ch, Term::Const(c)))
    }

    #[test]
    fn always_over_half_open_interval() {
        let phi = parse("[]_(0,2.5] !g2", NONE).unwrap();
        let iv = Interval::new(Term::Const(0.0), Term::Const(2.5), false, true);
        assert_eq!(
            phi,
            Formula::always(
                iv,
                Formula::NegAtom(Predicate::Prop {
                    channel: "g2".into()
                })
            )
        );
    }

    #[test]
    fn negated_eventually_becomes_always() {
        let phi = parse("!(<>_[0,5] p)", NONE).unwrap();
        let p = Predicate::Prop {
            channel: "p".into(),
        };
        assert_eq!(
            phi,
            Formula::always(Interval::closed(0.0, 5.0), Formula::NegAtom(p))
        );
    }

    #[test]
    fn parametric_until() {
        let phi = parse("p U_[0,theta] q", &["theta"]).unwrap();
        let iv = Interval::new(Term::Const(0.0), Term::Param(0), true, true);
        assert_eq!(
            phi,
            Formula::until(
                iv,
                Formula::Atom(Predicate::Prop {
                    channel: "p".into()
                }),
                Formula::Atom(Predicate::Prop {
                    channel: "q".into()
                })
            )
        );
    }

    #[test]
    fn precedence_and_implication() {
        let phi = parse("y <= 1 /\\ y >= 0 \\/ y <= 5 -> y <= 9", NONE).unwrap();
        let lhs = Formula::or(
            Formula::and(
                le("y", 1.0),
                Formula::Atom(Predicate::ge("y", Term::Const(0.0))),
            ),
            le("y", 5.0),
        );
        assert_eq!(phi, Formula::or(lhs.negate(), le("y", 9.0)));
    }

    #[test]
    fn box_atoms() {
        let phi = parse(
            "[]_[0,th1] !((x1, x2) in [1.5,th2]x[1,th3])",
            &["th1", "th2", "th3"],
        )
        .unwrap();
        match phi {
            Formula::Release(iv, lhs, rhs) => {
                assert_eq!(*lhs, Formula::False);
                assert_eq!(iv.upper, Term::Param(0));
                match *rhs {
                    Formula::NegAtom(Predicate::Box { ref dims }) => {
                        assert_eq!(dims.len(), 2);
                        assert_eq!(dims[0].upper, Term::Param(1));
                        assert_eq!(dims[1].lower, Term::Const(1.0));
                        assert_eq!(dims[1].upper, Term::Param(2));
                    }
                    ref other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        let single = parse("v in [0,2]", NONE).unwrap();
        assert!(matches!(single, Formula::Atom(Predicate::Box { .. })));
    }

    #[test]
    fn scaled_atoms_and_strict_aliases() {
        let phi = parse("2*y < th", &["th"]).unwrap();
        assert_eq!(
            phi,
            Formula::Atom(Predicate::Linear {
                channel: "y".into(),
                coeff: 2.0,
                cmp: Cmp::Le,
                threshold: Term::Param(0),
            })
        );
        assert_eq!(
            parse("y > -1.5e0", NONE).unwrap(),
            Formula::Atom(Predicate::ge("y", Term::Const(-1.5)))
        );
    }

    #[test]
    fn next_negation_stays_dual() {
        let phi = parse("!X y <= 1", NONE).unwrap();
        assert_eq!(phi, Formula::WeakNext(Box::new(le("y", 1.0).negate())));
    }

    #[test]
    fn until_is_right_associative() {
        let phi = parse("a U b U c", NONE).unwrap();
        match phi {
            Formula::Until(_, _, rhs) => assert!(matches!(*rhs, Formula::Until(..))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("y <= theta", NONE).unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.kind, ParseErrorKind::UndeclaredParameter("theta".into()));

        let e = parse("<>_[2,2] y <= 1", NONE).unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::Interval(IntervalError::Singleton(2.0))
        );
        assert!(Parser::new(NONE)
            .strict(false)
            .parse("<>_[2,2] y <= 1")
            .is_ok());

        let e = parse("<>_(2,2] y <= 1", NONE).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Interval(IntervalError::Empty(2.0)));

        let e = parse("y <= 1 /\\", NONE).unwrap_err();
        assert_eq!(e.position, 9);

        let e = parse("y <= 1 )", NONE).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = Parser::new(NONE)
            .channels(&["y"])
            .parse("omega <= 1")
            .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownChannel("omega".into()));
    }

    #[test]
    fn display_round_trips() {
        let params = vec!["a".to_string(), "b".to_string()];
        for text in [
            "[]_[0,a] (y <= b)",
            "(p U_(0.5,inf) X q) /\\ <>_[1,2) !(v in [0,3])",
            "((x1, x2) in [1.5,a]x[1,b]) R y >= 2",
            "!X -2*y <= 1",
            "true \\/ false",
        ] {
            let phi = parse(text, &params).unwrap();
            let shown = phi.display(&params).to_string();
            assert_eq!(parse(&shown, &params).unwrap(), phi, "{shown}");
        }
    }
}
