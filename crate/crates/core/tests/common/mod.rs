#![allow(dead_code)]

use std::sync::Arc;

use groupweyl::cli::grammar::OperatorAst;
use groupweyl::expr::{BinOp, Exponent, Expr, Func, Var};
use groupweyl::fourier::{inverse_on_rule, FourierCoefficients, GridFunction};
use groupweyl::quantize::MatrixFactor;
use groupweyl::{Group, QuadratureRule};
use num_complex::Complex64;
use rand::Rng;

pub fn rule(group: Group, bandlimit: u32) -> Arc<QuadratureRule> {
    Arc::new(group.haar_quadrature(bandlimit).unwrap())
}

/// A function with random coefficients on every irrep of modulus `<= band`.
pub fn random_band_limited<R: Rng>(rng: &mut R, rule: &Arc<QuadratureRule>, band: f64) -> (FourierCoefficients, GridFunction) {
    let mut c = FourierCoefficients::zeros(rule.group(), band);
    for (_, m) in c.iter_mut() {
        for v in m.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let f = inverse_on_rule(&c, rule).unwrap();
    (c, f)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_number<R: Rng>(rng: &mut R) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(0..10) as f64,
        1 => rng.gen_range(0.0..10.0),
        2 => rng.gen_range(0.0..1e-6),
        _ => rng.gen_range(0.0..1e8),
    }
}

/// A random expression over `vars` whose printed form the parser accepts.
pub fn random_expr<R: Rng>(rng: &mut R, vars: &[Var], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if vars.is_empty() || rng.gen_bool(0.4) {
            Expr::num(random_number(rng))
        } else {
            Expr::var(vars[rng.gen_range(0..vars.len())])
        };
    }
    let sub = |rng: &mut R| random_expr(rng, vars, depth - 1);
    match rng.gen_range(0..4) {
        0 => Expr::Neg(Box::new(sub(rng))),
        1 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][rng.gen_range(0..4)];
            Expr::binary(op, sub(rng), sub(rng))
        }
        2 => {
            let base = sub(rng);
            let den = if base.uses_coordinates() { 1 } else { rng.gen_range(1..4) };
            let e = Exponent::new(rng.gen_range(-4..5), den).unwrap();
            Expr::pow(base, e)
        }
        _ => Expr::call([Func::Sin, Func::Cos, Func::Exp][rng.gen_range(0..3)], sub(rng)),
    }
}

const COORDS: [Var; 3] = [Var::X1, Var::X2, Var::X3];

/// A random operator tree obeying the typing rules of the operator grammar.
pub fn random_ast<R: Rng>(rng: &mut R, depth: u32) -> OperatorAst {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    match rng.gen_range(0..if leaf { 3 } else { 6 }) {
        0 => OperatorAst::Mult(random_expr(rng, &COORDS, 3)),
        1 => OperatorAst::Spec(random_expr(rng, &[Var::T], 3)),
        2 => {
            let factor = if rng.gen_bool(0.5) { MatrixFactor::Identity } else { MatrixFactor::FirstProjection };
            OperatorAst::Sym(random_expr(rng, &[Var::T, Var::X1, Var::X2, Var::X3], 3), factor)
        }
        3 => OperatorAst::Sum((0..rng.gen_range(1..4)).map(|_| random_ast(rng, depth - 1)).collect()),
        4 => OperatorAst::Prod(Box::new(random_ast(rng, depth - 1)), Box::new(random_ast(rng, depth - 1))),
        _ => {
            let c = if rng.gen_bool(0.5) { random_number(rng) } else { -random_number(rng) };
            OperatorAst::Scale(c, Box::new(random_ast(rng, depth - 1)))
        }
    }
}
