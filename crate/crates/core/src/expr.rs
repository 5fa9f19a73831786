//! Real scalar expressions in the chart coordinates `x1..x3` and the
//! spectral variable `t = |xi|`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
    T,
}

impl Var {
    /// Zero-based coordinate index, `None` for `t`.
    pub fn coordinate(self) -> Option<usize> {
        match self {
            Var::X1 => Some(0),
            Var::X2 => Some(1),
            Var::X3 => Some(2),
            Var::T => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// A rational exponent `num/den` in lowest terms with `den >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    num: i64,
    den: u64,
}

impl Exponent {
    /// Returns `None` for a zero denominator.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let (mut n, mut d) = (num as i128, den as i128);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd(n.unsigned_abs(), d as u128).max(1) as i128;
        let n = i64::try_from(n / g).ok()?;
        let d = u64::try_from(d / g).ok()?;
        Some(Exponent { num: n, den: d })
    }

    pub fn integer(n: i64) -> Self {
        Exponent { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (n, 1) if n >= 0 => write!(f, "{n}"),
            (n, 1) => write!(f, "({n})"),
            (n, d) => write!(f, "({n}/{d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// A literal; the parser only produces nonnegative values.
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn t() -> Self {
        Expr::Var(Var::T)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::binary(BinOp::Mul, a, b)
    }

    pub fn call(f: Func, a: Expr) -> Self {
        Expr::Call(f, Box::new(a))
    }

    pub fn pow(a: Expr, e: Exponent) -> Self {
        Expr::Pow(Box::new(a), e)
    }

    /// Evaluates at chart coordinates `x` and spectral value `t`.
    ///
    /// Coordinates missing from `x` evaluate to NaN.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::T) => t,
            Expr::Var(v) => x.get(v.coordinate().unwrap()).copied().unwrap_or(f64::NAN),
            Expr::Neg(a) => -a.eval(x, t),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x, t), b.eval(x, t));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(a, e) => {
                let a = a.eval(x, t);
                if e.is_integer() {
                    match i32::try_from(e.num) {
                        Ok(n) => a.powi(n),
                        Err(_) => a.powf(e.num as f64),
                    }
                } else {
                    a.powf(e.value())
                }
            }
            Expr::Call(f, a) => {
                let a = a.eval(x, t);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                }
            }
        }
    }

    fn any_var(&self, pred: &impl Fn(Var) -> bool) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => pred(*v),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.any_var(pred),
            Expr::Binary(_, a, b) => a.any_var(pred) || b.any_var(pred),
        }
    }

    pub fn uses_t(&self) -> bool {
        self.any_var(&|v| v == Var::T)
    }

    pub fn uses_coordinates(&self) -> bool {
        self.any_var(&|v| v != Var::T)
    }

    /// Largest zero-based coordinate index referenced, if any.
    pub fn max_coordinate(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(v) => v.coordinate(),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_coordinate(),
            Expr::Binary(_, a, b) => a.max_coordinate().max(b.max_coordinate()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) if v.is_sign_negative() => 0,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_with_parens(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical text: minimal parentheses under the grammar's precedence, so
/// that parsing the output reproduces the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_with_parens(f, a.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.fmt_with_parens(f, a.precedence() < p)?;
                write!(f, "{}", op.symbol())?;
                b.fmt_with_parens(f, b.precedence() <= p)
            }
            Expr::Pow(a, e) => {
                a.fmt_with_parens(f, a.precedence() < 5)?;
                write!(f, "^{e}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_reduces() {
        let e = Exponent::new(2, -4).unwrap();
        assert_eq!((e.num(), e.den()), (-1, 2));
        assert!(Exponent::new(1, 0).is_none());
        assert_eq!(Exponent::new(0, 5).unwrap(), Exponent::integer(0));
    }

    #[test]
    fn evaluation() {
        let e = Expr::binary(
            BinOp::Div,
            Expr::pow(Expr::t(), Exponent::integer(2)),
            Expr::binary(BinOp::Add, Expr::num(1.0), Expr::pow(Expr::t(), Exponent::integer(2))),
        );
        assert!((e.eval(&[], 2.0) - 0.8).abs() < 1e-15);
        let c = Expr::call(Func::Cos, Expr::var(Var::X1));
        assert_eq!(c.eval(&[0.0], 0.0), 1.0);
        assert!(Expr::var(Var::X2).eval(&[0.0], 0.0).is_nan());
        let r = Expr::pow(Expr::t(), Exponent::new(1, 2).unwrap());
        assert!((r.eval(&[], 9.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn printing_is_minimal() {
        let t = Expr::t;
        let e = Expr::binary(
            BinOp::Sub,
            Expr::num(1.0),
            Expr::binary(BinOp::Sub, t(), Expr::Neg(Box::new(t()))),
        );
        assert_eq!(e.to_string(), "1-(t--t)");
        let p = Expr::pow(Expr::Neg(Box::new(t())), Exponent::new(-3, 2).unwrap());
        assert_eq!(p.to_string(), "(-t)^(-3/2)");
        let q = Expr::Neg(Box::new(Expr::pow(t(), Exponent::integer(2))));
        assert_eq!(q.to_string(), "-t^2");
    }

    #[test]
    fn variable_queries() {
        let e = Expr::mul(Expr::var(Var::X3), Expr::t());
        assert!(e.uses_t() && e.uses_coordinates());
        assert_eq!(e.max_coordinate(), Some(2));
        assert_eq!(Expr::num(1.0).max_coordinate(), None);
    }
}
