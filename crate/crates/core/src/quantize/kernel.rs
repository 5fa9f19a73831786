//! Symbols from right-convolution kernels on the torus.
//!
//! `Af(x) = int f(y) R_A(x, y^{-1} x) dy`, so `R_A(x, x - y)` is the value at
//! `x` of `A` applied to a delta at `y`. The delta is replaced by the
//! Dirichlet kernel of the rule's bandlimit, and `R^_A(x, k)` is the partial
//! Fourier transform of `z -> R_A(x, z)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{synthesize, GridFunction};
use crate::group::{torus_character, CMatrix, GroupElement, GroupKind, IrrepLabel, QuadratureRule};
use crate::quantize::{apply_at, extract_symbol, OperatorSpec};
use crate::sum::ComplexSum;

/// `R^_A(x, xi)` computed from the discretised kernel.
pub fn kernel_symbol(
    spec: &OperatorSpec,
    label: &IrrepLabel,
    x: &GroupElement,
    rule: &Arc<QuadratureRule>,
) -> Result<Complex64> {
    let group = rule.group();
    if !matches!(group.kind(), GroupKind::Torus(_)) {
        return Err(Error::Unsupported(format!(
            "right-convolution kernels are only realised on tori, not {}",
            group.kind()
        )));
    }
    spec.validate(group)?;
    if !group.contains(label) {
        return Err(Error::LabelMismatch {
            group: group.kind(),
            label: *label,
        });
    }
    let band = rule.bandlimit() as f64;
    let labels = group.dual_enumerate(band);
    let k = label.frequency();
    let mut acc = ComplexSum::new();
    for (y, w) in rule.nodes().iter().zip(rule.weights()) {
        let coeffs: Vec<CMatrix> = labels
            .iter()
            .map(|l| CMatrix::from_element(1, 1, torus_character(l.frequency(), y.coords()).conj()))
            .collect();
        let terms: Vec<(IrrepLabel, &CMatrix)> = labels.iter().copied().zip(&coeffs).collect();
        let delta = GridFunction::new(rule.clone(), synthesize(rule, &terms)?)?.with_band(Some(band));
        let r = apply_at(spec, &delta, x)?;
        let z: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| a - b).collect();
        acc.add(r * torus_character(k, &z).conj() * *w);
    }
    Ok(acc.value())
}

/// `|R^_A(x, xi) - sigma_A(x, xi)|` with the symbol from [`extract_symbol`].
pub fn kernel_symbol_check(
    spec: &OperatorSpec,
    label: &IrrepLabel,
    x: &GroupElement,
    rule: &Arc<QuadratureRule>,
) -> Result<f64> {
    let from_kernel = kernel_symbol(spec, label, x, rule)?;
    let sigma = extract_symbol(spec, label, x, rule)?;
    Ok((from_kernel - sigma[(0, 0)]).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp, Expr, Exponent, Func, Var};
    use crate::group::Group;

    fn resolvent() -> Expr {
        let t2 = Expr::pow(Expr::t(), Exponent::integer(2));
        Expr::binary(BinOp::Div, Expr::num(1.0), Expr::binary(BinOp::Add, Expr::num(1.0), t2))
    }

    #[test]
    fn spectral_and_multiplication_kernels_match_symbols() {
        let g = Group::t2();
        let r = Arc::new(g.haar_quadrature(4).unwrap());
        let x = g.element(&[0.7, 2.1]).unwrap();
        let kappa = Expr::call(Func::Cos, Expr::binary(BinOp::Sub, Expr::var(Var::X1), Expr::var(Var::X2)));
        for spec in [
            OperatorSpec::spectral(resolvent(), -2.0),
            OperatorSpec::multiplication(kappa),
        ] {
            for label in [IrrepLabel::Torus2(0, 0), IrrepLabel::Torus2(1, -2)] {
                let res = kernel_symbol_check(&spec, &label, &x, &r).unwrap();
                assert!(res < 1e-10, "{res}");
            }
        }
    }

    #[test]
    fn rejects_su2() {
        let g = Group::su2();
        let r = Arc::new(g.haar_quadrature(2).unwrap());
        let err = kernel_symbol_check(&OperatorSpec::identity(), &IrrepLabel::Su2(0), &g.identity(), &r);
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }
}
