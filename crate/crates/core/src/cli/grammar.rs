//! Recursive-descent parser and canonical printer for operator text.
//!
//! ```text
//! top    := 'mult(' expr ')' | 'spec(' expr ')' | 'sym(' expr ',' ('I'|'P') ')'
//!         | 'sum(' top {',' top} ')' | 'prod(' top ',' top ')' | 'scale(' number ',' top ')'
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | power
//! power  := primary ('^' rational)*
//! primary:= number | 'x1' | 'x2' | 'x3' | 't' | func '(' expr ')' | '(' expr ')'
//! rational := ['-'] int | '(' ['-'] int ['/' int] ')'
//! ```

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{BinOp, Exponent, Expr, Func, Var};
use crate::quantize::{MatrixFactor, OperatorSpec};

/// Nesting beyond this depth is rejected instead of recursing further.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected {}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("type error at byte {offset}: {message}")]
    Type { offset: usize, message: String },
    #[error("nesting deeper than {MAX_DEPTH} at byte {offset}")]
    TooDeep { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Type { offset, .. } | ParseError::TooDeep { offset } => {
                *offset
            }
        }
    }
}

/// The parsed operator text.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorAst {
    Mult(Expr),
    Spec(Expr),
    Sym(Expr, MatrixFactor),
    Sum(Vec<OperatorAst>),
    Prod(Box<OperatorAst>, Box<OperatorAst>),
    Scale(f64, Box<OperatorAst>),
}

impl OperatorAst {
    /// Lowers to an operator, declaring `order` for every spectral and symbol
    /// leaf.
    pub fn to_spec(&self, order: f64) -> OperatorSpec {
        match self {
            OperatorAst::Mult(e) => OperatorSpec::multiplication(e.clone()),
            OperatorAst::Spec(e) => OperatorSpec::spectral(e.clone(), order),
            OperatorAst::Sym(e, f) => OperatorSpec::symbol(e.clone(), *f, order),
            OperatorAst::Sum(parts) => OperatorSpec::Sum(parts.iter().map(|p| p.to_spec(order)).collect()),
            OperatorAst::Prod(a, b) => OperatorSpec::product(a.to_spec(order), b.to_spec(order)),
            OperatorAst::Scale(c, a) => OperatorSpec::scale(Complex64::new(*c, 0.0), a.to_spec(order)),
        }
    }
}

impl fmt::Display for OperatorAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorAst::Mult(e) => write!(f, "mult({e})"),
            OperatorAst::Spec(e) => write!(f, "spec({e})"),
            OperatorAst::Sym(e, m) => {
                let m = match m {
                    MatrixFactor::Identity => "I",
                    MatrixFactor::FirstProjection => "P",
                };
                write!(f, "sym({e}, {m})")
            }
            OperatorAst::Sum(parts) => {
                f.write_str("sum(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            OperatorAst::Prod(a, b) => write!(f, "prod({a}, {b})"),
            OperatorAst::Scale(c, a) => write!(f, "scale({c}, {a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            if text == "." {
                return Err(ParseError::Syntax {
                    offset: start,
                    found: "`.`".into(),
                    expected: vec!["a digit".into()],
                });
            }
            out.push((Tok::Num(text.to_string()), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: start,
                found: format!("character {ch:?}"),
                expected: vec!["a token".into()],
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    first_t: Option<usize>,
    first_coord: Option<usize>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, tok: Tok, name: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep { offset: self.offset() });
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn top(&mut self) -> PResult<OperatorAst> {
        self.enter()?;
        const TOPS: [&str; 6] = ["`mult`", "`spec`", "`sym`", "`sum`", "`prod`", "`scale`"];
        let (tok, at) = (self.peek().clone(), self.offset());
        let Tok::Ident(name) = tok else {
            return self.fail(&TOPS);
        };
        let ast = match name.as_str() {
            "mult" | "spec" | "sym" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let (body, first_t, first_coord) = self.body()?;
                let ast = match name.as_str() {
                    "mult" => {
                        if let Some(o) = first_t {
                            return Err(ParseError::Type {
                                offset: o,
                                message: format!("`t` inside the multiplication starting at byte {at}"),
                            });
                        }
                        OperatorAst::Mult(body)
                    }
                    "spec" => {
                        if let Some(o) = first_coord {
                            return Err(ParseError::Type {
                                offset: o,
                                message: format!("coordinate inside the spectral multiplier starting at byte {at}"),
                            });
                        }
                        OperatorAst::Spec(body)
                    }
                    _ => {
                        self.expect(Tok::Comma, "`,`")?;
                        let factor = match self.peek() {
                            Tok::Ident(m) if m == "I" => MatrixFactor::Identity,
                            Tok::Ident(m) if m == "P" => MatrixFactor::FirstProjection,
                            _ => return self.fail(&["`I`", "`P`"]),
                        };
                        self.bump();
                        OperatorAst::Sym(body, factor)
                    }
                };
                self.expect(Tok::RParen, "`)`")?;
                ast
            }
            "sum" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let mut parts = vec![self.top()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    parts.push(self.top()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                OperatorAst::Sum(parts)
            }
            "prod" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let a = self.top()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.top()?;
                self.expect(Tok::RParen, "`)`")?;
                OperatorAst::Prod(Box::new(a), Box::new(b))
            }
            "scale" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let negative = *self.peek() == Tok::Minus;
                if negative {
                    self.bump();
                }
                let c = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let a = self.top()?;
                self.expect(Tok::RParen, "`)`")?;
                OperatorAst::Scale(if negative { -c } else { c }, Box::new(a))
            }
            _ => return self.fail(&TOPS),
        };
        self.leave();
        Ok(ast)
    }

    /// An expression together with the offsets of its first `t` and first
    /// coordinate.
    fn body(&mut self) -> PResult<(Expr, Option<usize>, Option<usize>)> {
        self.first_t = None;
        self.first_coord = None;
        let e = self.expr()?;
        Ok((e, self.first_t.take(), self.first_coord.take()))
    }

    fn number(&mut self) -> PResult<f64> {
        let Tok::Num(text) = self.peek().clone() else {
            return self.fail(&["a number"]);
        };
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.bump();
                Ok(v)
            }
            _ => Err(ParseError::Type {
                offset: self.offset(),
                message: format!("number `{text}` is out of range"),
            }),
        }
    }

    fn integer(&mut self) -> PResult<i64> {
        let Tok::Num(text) = self.peek().clone() else {
            return self.fail(&["an integer"]);
        };
        if !text.bytes().all(|b| b.is_ascii_digit()) {
            return self.fail(&["an integer"]);
        }
        match text.parse::<i64>() {
            Ok(v) => {
                self.bump();
                Ok(v)
            }
            Err(_) => Err(ParseError::Type {
                offset: self.offset(),
                message: format!("integer `{text}` is out of range"),
            }),
        }
    }

    fn signed_integer(&mut self) -> PResult<i64> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(-self.integer()?)
        } else {
            self.integer()
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        let mut chained = 0;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.enter()?;
            chained += 1;
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.depth -= chained;
        self.leave();
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        let mut chained = 0;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.enter()?;
            chained += 1;
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.depth -= chained;
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            self.enter()?;
            self.bump();
            let inner = self.unary()?;
            self.leave();
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let start = self.offset();
        let mut base = self.primary()?;
        let mut chained = 0;
        while *self.peek() == Tok::Caret {
            self.enter()?;
            chained += 1;
            let at = self.offset();
            self.bump();
            let e = self.rational()?;
            if !e.is_integer() && base.uses_coordinates() {
                return Err(ParseError::Type {
                    offset: at,
                    message: format!("fractional power of the coordinate-dependent expression at byte {start}"),
                });
            }
            base = Expr::pow(base, e);
        }
        self.depth -= chained;
        Ok(base)
    }

    fn rational(&mut self) -> PResult<Exponent> {
        let at = self.offset();
        let (num, den) = if *self.peek() == Tok::LParen {
            self.bump();
            let num = self.signed_integer()?;
            let den = if *self.peek() == Tok::Slash {
                self.bump();
                self.signed_integer()?
            } else {
                1
            };
            self.expect(Tok::RParen, "`/` or `)`")?;
            (num, den)
        } else if matches!(self.peek(), Tok::Num(_) | Tok::Minus) {
            (self.signed_integer()?, 1)
        } else {
            return self.fail(&["an integer", "`(`"]);
        };
        Exponent::new(num, den).ok_or_else(|| ParseError::Type {
            offset: at,
            message: "exponent has a zero denominator or overflows".into(),
        })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let (tok, at) = (self.peek().clone(), self.offset());
        match tok {
            Tok::Num(_) => Ok(Expr::num(self.number()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let var = match name.as_str() {
                    "x1" => Some(Var::X1),
                    "x2" => Some(Var::X2),
                    "x3" => Some(Var::X3),
                    "t" => Some(Var::T),
                    _ => None,
                };
                if let Some(v) = var {
                    self.bump();
                    let slot = if v == Var::T { &mut self.first_t } else { &mut self.first_coord };
                    slot.get_or_insert(at);
                    return Ok(Expr::var(v));
                }
                let func = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    _ => return self.fail(&PRIMARY),
                };
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::call(func, arg))
            }
            _ => self.fail(&PRIMARY),
        }
    }
}

const PRIMARY: [&str; 9] = ["a number", "`x1`", "`x2`", "`x3`", "`t`", "`sin`", "`cos`", "`exp`", "`(`"];

/// Parses operator text.
pub fn parse_operator(src: &str) -> Result<OperatorAst, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        first_t: None,
        first_coord: None,
    };
    let ast = p.top()?;
    if *p.peek() != Tok::End {
        return p.fail(&["end of input"]);
    }
    Ok(ast)
}
