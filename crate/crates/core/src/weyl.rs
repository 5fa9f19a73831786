//! Matrix elements, partial traces and their normalised averages.
//!
//! The partial trace of an operator is `T(lambda) = sum_{|xi| <= lambda} d_xi
//! int_G Tr sigma(x, xi) dx`. Dividing by the multiplicity-counted
//! `N(lambda) = sum d_xi^2` gives the averaged quantity compared against the
//! quantum limit.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::GridFunction;
use crate::group::{within, BasisElement, Group, IrrepLabel, QuadratureRule};
use crate::quantize::{apply, coefficient_images, extract_on_rule, symbol_from_images, symbol_of, ClosedSymbol, OperatorSpec};
use crate::sum::{ComplexSum, NeumaierSum};

/// Lower bound accepted for `Tr sigma` in the growth check.
const POSITIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// `int kappa dx`.
    MultiplicationAvg,
    /// The declared limit `f_inf` of a spectral multiplier.
    SpectralAvg,
    /// `f_inf int kappa dx` for a multiplication composed with a multiplier.
    ProductAvg,
    /// A linear combination of the above.
    Combination,
}

/// The average of the principal symbol over the co-sphere bundle, which is
/// the expected limit of `T(lambda) / N(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceLimit {
    pub kind: ReferenceKind,
    pub value: f64,
}

impl ReferenceLimit {
    /// Derives the limit from the structure of `spec`.
    ///
    /// `f_inf` is the declared limit at infinity of every spectral multiplier
    /// in `spec`; without it, specs containing one have no reference.
    pub fn infer(spec: &OperatorSpec, f_inf: Option<f64>, rule: &QuadratureRule) -> Result<Option<Self>> {
        spec.validate(rule.group())?;
        Ok(infer(spec, f_inf, rule)?.and_then(|(kind, v)| {
            (v.im.abs() <= 1e-12 * v.re.abs().max(1.0)).then_some(ReferenceLimit { kind, value: v.re })
        }))
    }
}

fn infer(spec: &OperatorSpec, f_inf: Option<f64>, rule: &QuadratureRule) -> Result<Option<(ReferenceKind, Complex64)>> {
    if let Some(c) = spec.closed_form() {
        if !c.uses_t() && c.only_identity() {
            let mut acc = ComplexSum::new();
            for (n, (x, w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
                let (a, _) = c.eval_at(x.coords(), 0.0, Some(n), None)?;
                acc.add(a * *w);
            }
            return Ok(Some((ReferenceKind::MultiplicationAvg, acc.value())));
        }
    }
    Ok(match spec {
        OperatorSpec::Multiplication(_) => unreachable!("multiplications are closed-form"),
        OperatorSpec::Spectral { .. } => f_inf.map(|v| (ReferenceKind::SpectralAvg, Complex64::new(v, 0.0))),
        OperatorSpec::SymbolRule { .. } => None,
        OperatorSpec::Sum(parts) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in parts {
                match infer(p, f_inf, rule)? {
                    Some((_, v)) => acc += v,
                    None => return Ok(None),
                }
            }
            Some((ReferenceKind::Combination, acc))
        }
        OperatorSpec::Scale(c, a) => infer(a, f_inf, rule)?.map(|(k, v)| (k, v * c)),
        OperatorSpec::Product(a, b) => {
            let (ra, rb) = (infer(a, f_inf, rule)?, infer(b, f_inf, rule)?);
            match (ra, rb) {
                (Some((ka, va)), Some((kb, vb)))
                    if ka == ReferenceKind::SpectralAvg || kb == ReferenceKind::SpectralAvg =>
                {
                    let kind = if ka == kb {
                        ReferenceKind::SpectralAvg
                    } else {
                        ReferenceKind::ProductAvg
                    };
                    Some((kind, va * vb))
                }
                _ => None,
            }
        }
    })
}

/// `(A phi, phi)` for the Peter-Weyl basis function `phi = sqrt(d) xi_ij`.
pub fn matrix_element(spec: &OperatorSpec, basis: &BasisElement, rule: &Arc<QuadratureRule>) -> Result<Complex64> {
    let d = basis.label.dim() as f64;
    let phi = GridFunction::coefficient(rule.clone(), &basis.label, basis.row, basis.col)?
        .scale(Complex64::new(d.sqrt(), 0.0));
    apply(spec, &phi)?.inner(&phi)
}

/// Both sides of `sum_ij (A xi_ij, xi_ij) = int Tr sigma(x, xi) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreIdentity {
    pub label: IrrepLabel,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Computes the left side from quadrature matrix elements and the right side
/// from the symbol field, then reports their difference.
pub fn verify_core_identity(spec: &OperatorSpec, label: &IrrepLabel, rule: &Arc<QuadratureRule>) -> Result<CoreIdentity> {
    let d = label.dim();
    let mut lhs = ComplexSum::new();
    let rhs = if spec.closed_form().is_some() {
        for i in 0..d {
            for j in 0..d {
                let xi = GridFunction::coefficient(rule.clone(), label, i, j)?;
                lhs.add(apply(spec, &xi)?.inner(&xi)?);
            }
        }
        symbol_of(spec, &[*label], rule)?.trace_integral(label)?
    } else {
        // the extracted symbol is built from the same images, so apply once
        spec.validate(rule.group())?;
        let images = coefficient_images(spec, label, rule)?;
        for (k, img) in images.iter().enumerate() {
            let xi = GridFunction::coefficient(rule.clone(), label, k / d, k % d)?;
            lhs.add(img.inner(&xi)?);
        }
        let sigma = symbol_from_images(label, &images, rule)?;
        let mut acc = ComplexSum::new();
        for (m, w) in sigma.iter().zip(rule.weights()) {
            acc.add(m.trace() * *w);
        }
        acc.value()
    };
    let lhs = lhs.value();
    Ok(CoreIdentity {
        label: *label,
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// `N(lambda) = sum_{|xi| <= lambda} d_xi^2`.
pub fn counting_function(group: &Group, lambda: f64) -> u64 {
    group
        .dual_enumerate(lambda)
        .iter()
        .map(|l| (l.dim() * l.dim()) as u64)
        .sum()
}

fn integrate_ab(c: &ClosedSymbol, rule: &QuadratureRule, t: f64, label: IrrepLabel) -> Result<(Complex64, Complex64)> {
    let (mut a, mut b) = (ComplexSum::new(), ComplexSum::new());
    for (n, (x, w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let (va, vb) = c.eval_at(x.coords(), t, Some(n), Some(label))?;
        a.add(va * *w);
        b.add(vb * *w);
    }
    Ok((a.value(), b.value()))
}

/// `int_G Tr sigma(x, xi) dx` for each label, integrating over `rule`.
///
/// Closed-form symbols only need `rule` as an integration rule in `x`;
/// extracted symbols additionally need it to resolve every label.
pub fn irrep_traces(spec: &OperatorSpec, labels: &[IrrepLabel], rule: &Arc<QuadratureRule>) -> Result<Vec<Complex64>> {
    let group = *rule.group();
    spec.validate(&group)?;
    let Some(c) = spec.closed_form() else {
        return labels
            .par_iter()
            .map(|l| {
                let mats = extract_on_rule(spec, l, rule)?;
                let mut acc = ComplexSum::new();
                for (m, w) in mats.iter().zip(rule.weights()) {
                    acc.add(m.trace() * *w);
                }
                Ok(acc.value())
            })
            .collect();
    };
    let trace = |(a, b): (Complex64, Complex64), l: &IrrepLabel| a * l.dim() as f64 + b;
    if !c.uses_x() {
        let x0 = rule.nodes()[0].coords();
        return labels
            .iter()
            .map(|l| Ok(trace(c.eval_at(x0, group.modulus(l), None, Some(*l))?, l)))
            .collect();
    }
    if !c.uses_t() {
        let ab = integrate_ab(&c, rule, 0.0, group.trivial())?;
        return Ok(labels.iter().map(|l| trace(ab, l)).collect());
    }
    let mut order: Vec<u64> = Vec::new();
    let mut first: HashMap<u64, IrrepLabel> = HashMap::new();
    for l in labels {
        let key = group.eigenvalue(l).to_bits();
        if let std::collections::hash_map::Entry::Vacant(e) = first.entry(key) {
            e.insert(*l);
            order.push(key);
        }
    }
    let integrals: HashMap<u64, (Complex64, Complex64)> = order
        .par_iter()
        .map(|key| {
            let mu = f64::from_bits(*key);
            Ok((*key, integrate_ab(&c, rule, mu.sqrt(), first[key])?))
        })
        .collect::<Result<_>>()?;
    Ok(labels
        .iter()
        .map(|l| trace(integrals[&group.eigenvalue(l).to_bits()], l))
        .collect())
}

/// `T(lambda)`; the imaginary part is a diagnostic and vanishes for
/// self-adjoint operators.
pub fn partial_trace(spec: &OperatorSpec, lambda: f64, rule: &Arc<QuadratureRule>) -> Result<Complex64> {
    let labels = rule.group().dual_enumerate(lambda);
    let traces = irrep_traces(spec, &labels, rule)?;
    let mut acc = ComplexSum::new();
    for (l, tr) in labels.iter().zip(traces) {
        acc.add(tr * l.dim() as f64);
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylScanRow {
    pub lambda: f64,
    pub n: u64,
    pub t: f64,
    pub t_imag: f64,
    pub avg: f64,
    pub reference: Option<f64>,
    pub abs_err: Option<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("lambda grid contains a non-finite value".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("lambda grid must be nondecreasing".into()));
    }
    Ok(())
}

/// `T` and `N` along an increasing grid, each irrep integrated once.
fn accumulate(
    group: &Group,
    grid: &[f64],
    labels: &[IrrepLabel],
    traces: &[Complex64],
) -> Vec<(u64, Complex64)> {
    let mut out = Vec::with_capacity(grid.len());
    let (mut n, mut t, mut p) = (0u64, ComplexSum::new(), 0usize);
    for &lambda in grid {
        while p < labels.len() && within(group.eigenvalue(&labels[p]), lambda) {
            let d = labels[p].dim();
            n += (d * d) as u64;
            t.add(traces[p] * d as f64);
            p += 1;
        }
        out.push((n, t.value()));
    }
    out
}

/// Rows `(lambda, N, T, T/N, ref, |T/N - ref|)` along a nondecreasing grid.
pub fn weyl_scan(
    spec: &OperatorSpec,
    grid: &[f64],
    reference: Option<ReferenceLimit>,
    rule: &Arc<QuadratureRule>,
) -> Result<Vec<WeylScanRow>> {
    check_grid(grid)?;
    let group = *rule.group();
    let top = grid.last().copied().unwrap_or(0.0);
    let labels = group.dual_enumerate(top);
    let traces = irrep_traces(spec, &labels, rule)?;
    Ok(grid
        .iter()
        .zip(accumulate(&group, grid, &labels, &traces))
        .map(|(&lambda, (n, t))| {
            let avg = t.re / n as f64;
            let r = reference.map(|r| r.value);
            WeylScanRow {
                lambda,
                n,
                t: t.re,
                t_imag: t.im,
                avg,
                reference: r,
                abs_err: r.map(|r| (avg - r).abs()),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryRow {
    /// One-based position in the enumeration.
    pub n: usize,
    pub label: IrrepLabel,
    pub dim: usize,
    /// `A_n = d_xi int Tr sigma(x, xi_n) dx`.
    pub a_n: f64,
    pub a_n_imag: f64,
    /// `(A_1 + ... + A_n) / n`.
    pub cesaro: f64,
    /// `(A_1 + ... + A_n) / (d_1^2 + ... + d_n^2)`.
    pub weyl_avg: f64,
}

/// The sequence `A_n` over the dual in enumeration order with its running
/// averages.
pub fn corollary_sequence(spec: &OperatorSpec, lambda_max: f64, rule: &Arc<QuadratureRule>) -> Result<Vec<CorollaryRow>> {
    let labels = rule.group().dual_enumerate(lambda_max);
    let traces = irrep_traces(spec, &labels, rule)?;
    let (mut sum, mut count) = (NeumaierSum::new(), 0u64);
    Ok(labels
        .iter()
        .zip(traces)
        .enumerate()
        .map(|(i, (l, tr))| {
            let d = l.dim();
            let a = tr * d as f64;
            sum.add(a.re);
            count += (d * d) as u64;
            CorollaryRow {
                n: i + 1,
                label: *l,
                dim: d,
                a_n: a.re,
                a_n_imag: a.im,
                cesaro: sum.value() / (i + 1) as f64,
                weyl_avg: sum.value() / count as f64,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub lambda: f64,
    pub t: f64,
    /// `C lambda^(n+m)`.
    pub bound: f64,
    /// `lambda^m` times the partial trace of the order-reduced symbol.
    pub reduced: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub order: f64,
    /// `n + m`.
    pub exponent: f64,
    /// Least-squares slope of `log T` against `log lambda` over the upper half
    /// of the grid; absent when `T` vanishes there.
    pub slope: Option<f64>,
    /// `max T / lambda^(n+m)` over the lower half of the grid.
    pub constant: f64,
    pub degenerate: bool,
    pub bound_ok: bool,
    /// `T - T_trivial <= lambda^m T_reduced` at every grid point.
    pub reduction_ok: bool,
    pub rows: Vec<GrowthRow>,
}

/// Minimum number of grid points in the slope-fit window.
pub const MIN_FIT_POINTS: usize = 6;

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Checks `T(lambda) = O(lambda^(n+m))` for an operator of order `m > 0` with
/// nonnegative symbol trace.
pub fn growth_check(spec: &OperatorSpec, grid: &[f64], rule: &Arc<QuadratureRule>) -> Result<GrowthReport> {
    check_grid(grid)?;
    let m = spec.order_hint();
    if m.is_nan() || m <= 0.0 {
        return Err(Error::InvalidArgument(format!("growth check needs order m > 0, got {m}")));
    }
    let window = grid.len() - grid.len() / 2;
    if window < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "growth check needs at least {} grid points, got {}",
            2 * MIN_FIT_POINTS - 1,
            grid.len()
        )));
    }
    let group = *rule.group();
    let top = grid.last().copied().unwrap_or(0.0);
    let labels = group.dual_enumerate(top);
    check_positivity(spec, &labels, rule)?;

    let traces = irrep_traces(spec, &labels, rule)?;
    let reduced: Vec<Complex64> = labels
        .iter()
        .zip(&traces)
        .map(|(l, t)| if l.is_trivial() { *t * 0.0 } else { *t * group.modulus(l).powf(-m) })
        .collect();
    let trivial = labels
        .iter()
        .zip(&traces)
        .find(|(l, _)| l.is_trivial())
        .map_or(0.0, |(_, t)| t.re);
    let full = accumulate(&group, grid, &labels, &traces);
    let red = accumulate(&group, grid, &labels, &reduced);

    let p = group.dim() as f64 + m;
    let ts: Vec<f64> = full.iter().map(|(_, t)| t.re).collect();
    let degenerate = ts.iter().all(|t| *t == 0.0);
    let lower = &grid[..grid.len() / 2];
    let calib: Vec<usize> = if lower.iter().any(|l| *l > 0.0) {
        (0..lower.len()).filter(|&i| grid[i] > 0.0).collect()
    } else {
        (0..grid.len()).filter(|&i| grid[i] > 0.0).collect()
    };
    let constant = calib
        .iter()
        .map(|&i| ts[i] / grid[i].powf(p))
        .fold(0.0_f64, f64::max);
    let fit: Vec<(f64, f64)> = (grid.len() / 2..grid.len())
        .filter(|&i| grid[i] > 0.0 && ts[i] > 0.0)
        .map(|i| (grid[i].ln(), ts[i].ln()))
        .collect();
    let slope = if degenerate { None } else { least_squares_slope(&fit) };

    let mut rows = Vec::with_capacity(grid.len());
    let (mut within_bound, mut reduction_ok) = (true, true);
    for (i, &lambda) in grid.iter().enumerate() {
        let bound = constant * lambda.max(0.0).powf(p);
        let reduced = lambda.max(0.0).powf(m) * red[i].1.re;
        let slack = 1e-9 * ts[i].abs().max(1e-300);
        within_bound &= ts[i] <= bound + slack || degenerate;
        reduction_ok &= ts[i] - trivial <= reduced + slack + 1e-12;
        rows.push(GrowthRow {
            lambda,
            t: ts[i],
            bound,
            reduced,
        });
    }
    let bound_ok = degenerate || (within_bound && slope.is_some_and(|s| s <= p + 0.1));
    Ok(GrowthReport {
        order: m,
        exponent: p,
        slope,
        constant,
        degenerate,
        bound_ok,
        reduction_ok,
        rows,
    })
}

/// Fails with the first `(node, irrep)` where `Tr sigma < -1e-12`.
fn check_positivity(spec: &OperatorSpec, labels: &[IrrepLabel], rule: &Arc<QuadratureRule>) -> Result<()> {
    let closed = spec.closed_form();
    let nodes = match &closed {
        Some(c) if !c.uses_x() => 1,
        _ => rule.len(),
    };
    let group = *rule.group();
    let first = labels
        .par_iter()
        .map(|l| -> Result<Option<Error>> {
            let traces: Vec<f64> = match &closed {
                Some(c) => (0..nodes)
                    .map(|n| {
                        let (a, b) = c.eval_at(rule.nodes()[n].coords(), group.modulus(l), Some(n), Some(*l))?;
                        Ok((a * l.dim() as f64 + b).re)
                    })
                    .collect::<Result<_>>()?,
                None => extract_on_rule(spec, l, rule)?.iter().map(|m| m.trace().re).collect(),
            };
            Ok(traces
                .iter()
                .position(|t| *t < -POSITIVITY_TOL)
                .map(|node| Error::PositivityViolation {
                    node,
                    label: *l,
                    trace: traces[node],
                }))
        })
        .collect::<Result<Vec<_>>>()?;
    match first.into_iter().flatten().next() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp, Exponent, Expr, Func, Var};
    use crate::quantize::MatrixFactor;

    fn rule(g: Group, b: u32) -> Arc<QuadratureRule> {
        Arc::new(g.haar_quadrature(b).unwrap())
    }

    fn cos_x1() -> Expr {
        Expr::call(Func::Cos, Expr::var(Var::X1))
    }

    fn t_over_1pt() -> Expr {
        let t2 = Expr::pow(Expr::t(), Exponent::integer(2));
        Expr::binary(BinOp::Div, t2.clone(), Expr::binary(BinOp::Add, Expr::num(1.0), t2))
    }

    #[test]
    fn counting_examples() {
        assert_eq!(counting_function(&Group::t1(), 5.0), 11);
        assert_eq!(counting_function(&Group::su2(), 1.0), 5);
        assert_eq!(counting_function(&Group::t2(), 1.0), 5);
    }

    #[test]
    fn identity_trace_is_counting_function() {
        for (g, l) in [(Group::t1(), 5.0), (Group::su2(), 1.0), (Group::t2(), 3.3)] {
            let r = rule(g, 2);
            let t = partial_trace(&OperatorSpec::identity(), l, &r).unwrap();
            assert_eq!(t.re, counting_function(&g, l) as f64);
        }
    }

    #[test]
    fn multiplication_matrix_element_vanishes() {
        let r = rule(Group::t1(), 4);
        let b = BasisElement {
            label: IrrepLabel::Torus1(3),
            row: 0,
            col: 0,
        };
        let v = matrix_element(&OperatorSpec::multiplication(cos_x1()), &b, &r).unwrap();
        assert!(v.norm() < 1e-15);
        let one = matrix_element(&OperatorSpec::identity(), &b, &r).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
    }

    #[test]
    fn spectral_matrix_elements_are_diagonal() {
        let g = Group::su2();
        let r = rule(g, 3);
        let spec = OperatorSpec::spectral(t_over_1pt(), 0.0);
        let label = IrrepLabel::Su2(2);
        let mu = g.eigenvalue(&label);
        for (row, col) in [(0, 0), (1, 2)] {
            let v = matrix_element(&spec, &BasisElement { label, row, col }, &r).unwrap();
            assert!((v - mu / (1.0 + mu)).norm() < 1e-12);
        }
    }

    #[test]
    fn core_identity_for_multiplication() {
        let r = rule(Group::su2(), 4);
        let spec = OperatorSpec::multiplication(Expr::call(Func::Exp, Expr::call(Func::Cos, Expr::var(Var::X2))));
        for two_l in 0..4 {
            let c = verify_core_identity(&spec, &IrrepLabel::Su2(two_l), &r).unwrap();
            assert!(c.residual < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn multiplication_scan_is_exact() {
        let r = rule(Group::t2(), 4);
        let one_plus = OperatorSpec::multiplication(Expr::binary(BinOp::Add, Expr::num(1.0), cos_x1()));
        let reference = ReferenceLimit::infer(&one_plus, None, &r).unwrap().unwrap();
        assert_eq!(reference.kind, ReferenceKind::MultiplicationAvg);
        let rows = weyl_scan(&one_plus, &[0.5, 1.0, 4.0, 9.5], Some(reference), &r).unwrap();
        for row in rows {
            assert!(row.abs_err.unwrap() < 1e-12);
        }
    }

    #[test]
    fn spectral_average_on_circle() {
        let r = rule(Group::t1(), 2);
        let spec = OperatorSpec::spectral(t_over_1pt(), 0.0);
        let rows = weyl_scan(&spec, &[50.0], None, &r).unwrap();
        let oracle: f64 = (-50i32..=50).map(|k| (k * k) as f64 / (1.0 + (k * k) as f64)).sum::<f64>() / 101.0;
        assert!((rows[0].avg - oracle).abs() < 1e-13);
        assert!((rows[0].avg - 1.0).abs() <= 0.05);
    }

    #[test]
    fn corollary_sequence_for_spectral_on_su2() {
        let g = Group::su2();
        let r = rule(g, 2);
        let rows = corollary_sequence(&OperatorSpec::spectral(t_over_1pt(), 0.0), 3.0, &r).unwrap();
        for row in &rows {
            let mu = g.eigenvalue(&row.label);
            let expect = (row.dim * row.dim) as f64 * mu / (1.0 + mu);
            assert!((row.a_n - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_on_circle() {
        let r = rule(Group::t1(), 2);
        let spec = OperatorSpec::symbol(Expr::t(), MatrixFactor::Identity, 1.0);
        let grid: Vec<f64> = (0..=45).map(|i| 10.0 + 2.0 * i as f64).collect();
        let rep = growth_check(&spec, &grid, &r).unwrap();
        let s = rep.slope.unwrap();
        assert!((s - 2.0).abs() <= 0.1, "{s}");
        assert!(rep.bound_ok && rep.reduction_ok);
    }

    #[test]
    fn growth_rejects_negative_symbol() {
        let r = rule(Group::t1(), 2);
        let spec = OperatorSpec::symbol(Expr::Neg(Box::new(Expr::t())), MatrixFactor::Identity, 1.0);
        let grid: Vec<f64> = (1..=12).map(f64::from).collect();
        assert!(matches!(
            growth_check(&spec, &grid, &r),
            Err(Error::PositivityViolation {
                label: IrrepLabel::Torus1(-1),
                ..
            })
        ));
    }

    #[test]
    fn zero_symbol_is_degenerate() {
        let r = rule(Group::t1(), 2);
        let spec = OperatorSpec::symbol(Expr::mul(Expr::num(0.0), Expr::t()), MatrixFactor::Identity, 1.0);
        let grid: Vec<f64> = (1..=12).map(f64::from).collect();
        let rep = growth_check(&spec, &grid, &r).unwrap();
        assert!(rep.degenerate && rep.bound_ok && rep.slope.is_none());
    }
}
