//! Operators on `G`, their global symbols `sigma(x, xi) = xi(x)^* A xi(x)`, and
//! the quantisation formula `Af(x) = sum_xi d_xi Tr[xi(x) sigma(x, xi) f^(xi)]`.
//!
//! Symbols that can be written down exactly are kept as closed-form rules of
//! the shape `a(x, |xi|) I + b(x, |xi|) P`, where `P` projects onto the first
//! basis vector. Everything else is extracted numerically by applying the
//! operator to matrix coefficients.

pub mod kernel;

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fourier::{analyze, synthesize, trace_product, GridFunction};
use crate::group::{CMatrix, Group, GroupElement, IrrepLabel, QuadratureRule};
use crate::sum::ComplexSum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixFactor {
    Identity,
    /// `E_11`, the projection onto the first component.
    FirstProjection,
}

impl MatrixFactor {
    fn compose(self, other: MatrixFactor) -> MatrixFactor {
        if self == MatrixFactor::Identity && other == MatrixFactor::Identity {
            MatrixFactor::Identity
        } else {
            MatrixFactor::FirstProjection
        }
    }
}

/// A description of an operator on `L^2(G)`.
///
/// `Product(a, b)` is the composition `a o b`, so `b` acts first.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Multiplication(Expr),
    /// `f(sqrt(L))`, with the expression in `t` evaluated at `|xi|`.
    Spectral { f: Expr, order: f64 },
    SymbolRule {
        rule: Expr,
        factor: MatrixFactor,
        order: f64,
    },
    Sum(Vec<OperatorSpec>),
    Product(Box<OperatorSpec>, Box<OperatorSpec>),
    Scale(Complex64, Box<OperatorSpec>),
}

impl OperatorSpec {
    pub fn multiplication(kappa: Expr) -> Self {
        OperatorSpec::Multiplication(kappa)
    }

    pub fn spectral(f: Expr, order: f64) -> Self {
        OperatorSpec::Spectral { f, order }
    }

    pub fn symbol(rule: Expr, factor: MatrixFactor, order: f64) -> Self {
        OperatorSpec::SymbolRule {
            rule,
            factor,
            order,
        }
    }

    pub fn identity() -> Self {
        OperatorSpec::symbol(Expr::num(1.0), MatrixFactor::Identity, 0.0)
    }

    pub fn product(a: OperatorSpec, b: OperatorSpec) -> Self {
        OperatorSpec::Product(Box::new(a), Box::new(b))
    }

    pub fn scale(c: Complex64, a: OperatorSpec) -> Self {
        OperatorSpec::Scale(c, Box::new(a))
    }

    /// Declared order `m`: zero for multiplications, additive under
    /// composition, the maximum over sums.
    pub fn order_hint(&self) -> f64 {
        match self {
            OperatorSpec::Multiplication(_) => 0.0,
            OperatorSpec::Spectral { order, .. } | OperatorSpec::SymbolRule { order, .. } => *order,
            OperatorSpec::Sum(parts) => parts
                .iter()
                .map(OperatorSpec::order_hint)
                .fold(f64::NEG_INFINITY, f64::max)
                .max(0.0),
            OperatorSpec::Product(a, b) => a.order_hint() + b.order_hint(),
            OperatorSpec::Scale(_, a) => a.order_hint(),
        }
    }

    /// Checks coordinate usage against `group` and the body restrictions of
    /// multiplication (no `t`) and spectral (no coordinates) operators.
    pub fn validate(&self, group: &Group) -> Result<()> {
        let check_coords = |e: &Expr| match e.max_coordinate() {
            Some(i) if i >= group.dim() => Err(Error::CoordinateOutOfRange {
                index: i + 1,
                group: group.kind(),
            }),
            _ => Ok(()),
        };
        match self {
            OperatorSpec::Multiplication(k) => {
                if k.uses_t() {
                    return Err(Error::InvalidArgument(format!(
                        "multiplication body `{k}` depends on t"
                    )));
                }
                check_coords(k)
            }
            OperatorSpec::Spectral { f, .. } => {
                if f.uses_coordinates() {
                    return Err(Error::InvalidArgument(format!(
                        "spectral body `{f}` depends on coordinates"
                    )));
                }
                Ok(())
            }
            OperatorSpec::SymbolRule { rule, .. } => check_coords(rule),
            OperatorSpec::Sum(parts) => parts.iter().try_for_each(|p| p.validate(group)),
            OperatorSpec::Product(a, b) => {
                a.validate(group)?;
                b.validate(group)
            }
            OperatorSpec::Scale(c, a) => {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::InvalidArgument("scale factor is not finite".into()));
                }
                a.validate(group)
            }
        }
    }

    /// The symbol as a closed-form rule, when one is available exactly.
    ///
    /// A composition `a o b` is closed-form when `b` is a Fourier multiplier
    /// or `a` is a multiplication; in both cases `sigma_ab = sigma_a sigma_b`.
    pub(crate) fn closed_form(&self) -> Option<ClosedSymbol> {
        self.terms().map(ClosedSymbol::new)
    }

    fn terms(&self) -> Option<Vec<Term>> {
        match self {
            OperatorSpec::Multiplication(k) => Some(vec![Term::new(k.clone(), MatrixFactor::Identity)]),
            OperatorSpec::Spectral { f, .. } => Some(vec![Term::new(f.clone(), MatrixFactor::Identity)]),
            OperatorSpec::SymbolRule { rule, factor, .. } => Some(vec![Term::new(rule.clone(), *factor)]),
            OperatorSpec::Sum(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.terms()?);
                }
                Some(out)
            }
            OperatorSpec::Scale(c, a) => Some(
                a.terms()?
                    .into_iter()
                    .map(|t| Term {
                        coef: t.coef * c,
                        ..t
                    })
                    .collect(),
            ),
            OperatorSpec::Product(a, b) => {
                let (ta, tb) = (a.terms()?, b.terms()?);
                let b_multiplier = tb.iter().all(|t| !t.expr.uses_coordinates());
                let a_multiplication = ta
                    .iter()
                    .all(|t| !t.expr.uses_t() && t.factor == MatrixFactor::Identity);
                if !(b_multiplier || a_multiplication) {
                    return None;
                }
                let mut out = Vec::with_capacity(ta.len() * tb.len());
                for x in &ta {
                    for y in &tb {
                        out.push(Term {
                            coef: x.coef * y.coef,
                            expr: Expr::mul(x.expr.clone(), y.expr.clone()),
                            factor: x.factor.compose(y.factor),
                        });
                    }
                }
                Some(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Term {
    coef: Complex64,
    expr: Expr,
    factor: MatrixFactor,
}

impl Term {
    fn new(expr: Expr, factor: MatrixFactor) -> Self {
        Term {
            coef: ONE,
            expr,
            factor,
        }
    }
}

/// `sigma(x, xi) = a(x, |xi|) I + b(x, |xi|) P`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ClosedSymbol {
    terms: Vec<Term>,
    uses_x: bool,
    uses_t: bool,
}

impl ClosedSymbol {
    fn new(terms: Vec<Term>) -> Self {
        let uses_x = terms.iter().any(|t| t.expr.uses_coordinates());
        let uses_t = terms.iter().any(|t| t.expr.uses_t());
        ClosedSymbol {
            terms,
            uses_x,
            uses_t,
        }
    }

    pub(crate) fn uses_x(&self) -> bool {
        self.uses_x
    }

    pub(crate) fn uses_t(&self) -> bool {
        self.uses_t
    }

    pub(crate) fn only_identity(&self) -> bool {
        self.terms.iter().all(|t| t.factor == MatrixFactor::Identity)
    }

    /// Returns the `(a, b)` pair; on a non-finite value, the offending term.
    fn eval(&self, x: &[f64], t: f64) -> std::result::Result<(Complex64, Complex64), &Expr> {
        let (mut a, mut b) = (ZERO, ZERO);
        for term in &self.terms {
            if term.coef == ZERO {
                continue;
            }
            let v = term.expr.eval(x, t);
            if !v.is_finite() {
                return Err(&term.expr);
            }
            match term.factor {
                MatrixFactor::Identity => a += term.coef * v,
                MatrixFactor::FirstProjection => b += term.coef * v,
            }
        }
        Ok((a, b))
    }

    pub(crate) fn eval_at(
        &self,
        x: &[f64],
        t: f64,
        node: Option<usize>,
        label: Option<IrrepLabel>,
    ) -> Result<(Complex64, Complex64)> {
        self.eval(x, t).map_err(|e| Error::Evaluation {
            expr: e.to_string(),
            node,
            label,
        })
    }
}

fn ab_matrix(a: Complex64, b: Complex64, d: usize) -> CMatrix {
    let mut m = CMatrix::from_diagonal_element(d, d, a);
    m[(0, 0)] += b;
    m
}

/// `(a I + b P) m` without forming the symbol.
fn ab_times(a: Complex64, b: Complex64, m: &CMatrix) -> CMatrix {
    let mut out = m * a;
    for j in 0..m.ncols() {
        out[(0, j)] += b * m[(0, j)];
    }
    out
}

fn first_row(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    out.row_mut(0).copy_from(&m.row(0));
    out
}

#[derive(Debug, Clone)]
enum Repr {
    Closed(ClosedSymbol),
    /// Per irrep, one matrix per quadrature node.
    Dense(IndexMap<IrrepLabel, Vec<CMatrix>>),
}

/// The global symbol of an operator over a set of irreps and the nodes of a
/// quadrature rule.
#[derive(Debug, Clone)]
pub struct SymbolField {
    rule: Arc<QuadratureRule>,
    irreps: Vec<IrrepLabel>,
    order_hint: f64,
    /// `m` when the field stands for `sigma |xi|^{-m}` with the trivial slot zeroed.
    reduction: Option<f64>,
    repr: Repr,
}

impl SymbolField {
    pub fn group(&self) -> &Group {
        self.rule.group()
    }

    pub fn irreps(&self) -> &[IrrepLabel] {
        &self.irreps
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn order_hint(&self) -> f64 {
        self.order_hint
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.repr, Repr::Closed(_))
    }

    fn weight_of(&self, label: &IrrepLabel) -> f64 {
        match self.reduction {
            None => 1.0,
            Some(_) if label.is_trivial() => 0.0,
            Some(m) => self.group().modulus(label).powf(-m),
        }
    }

    fn ensure_member(&self, label: &IrrepLabel) -> Result<()> {
        if self.irreps.contains(label) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("irrep {label} is not part of this symbol field")))
        }
    }

    fn ensure_node(&self, node: usize) -> Result<()> {
        if node < self.rule.len() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("node {node} out of range")))
        }
    }

    /// `sigma(x_node, xi)`.
    pub fn matrix(&self, node: usize, label: &IrrepLabel) -> Result<CMatrix> {
        self.ensure_member(label)?;
        self.ensure_node(node)?;
        let w = self.weight_of(label);
        match &self.repr {
            Repr::Closed(c) => {
                let x = self.rule.nodes()[node].coords();
                let (a, b) = c.eval_at(x, self.group().modulus(label), Some(node), Some(*label))?;
                Ok(ab_matrix(a * w, b * w, label.dim()))
            }
            Repr::Dense(map) => Ok(&map[label][node] * Complex64::new(w, 0.0)),
        }
    }

    /// `Tr sigma(x_node, xi)`.
    pub fn trace_at(&self, node: usize, label: &IrrepLabel) -> Result<Complex64> {
        self.ensure_member(label)?;
        self.ensure_node(node)?;
        self.trace_unchecked(node, label)
    }

    fn trace_unchecked(&self, node: usize, label: &IrrepLabel) -> Result<Complex64> {
        let w = self.weight_of(label);
        match &self.repr {
            Repr::Closed(c) => {
                let x = self.rule.nodes()[node].coords();
                let (a, b) = c.eval_at(x, self.group().modulus(label), Some(node), Some(*label))?;
                Ok((a * label.dim() as f64 + b) * w)
            }
            Repr::Dense(map) => Ok(map[label][node].trace() * w),
        }
    }

    /// `int_G Tr sigma(x, xi) dx` by the field's quadrature rule.
    pub fn trace_integral(&self, label: &IrrepLabel) -> Result<Complex64> {
        self.ensure_member(label)?;
        if let Repr::Closed(c) = &self.repr {
            if !c.uses_x() {
                return self.trace_unchecked(0, label);
            }
        }
        let mut acc = ComplexSum::new();
        for (n, w) in self.rule.weights().iter().enumerate() {
            acc.add(self.trace_unchecked(n, label)? * *w);
        }
        Ok(acc.value())
    }

    fn closed(&self) -> Option<&ClosedSymbol> {
        match &self.repr {
            Repr::Closed(c) => Some(c),
            Repr::Dense(_) => None,
        }
    }
}

fn check_labels(group: &Group, irreps: &[IrrepLabel]) -> Result<()> {
    for l in irreps {
        if !group.contains(l) {
            return Err(Error::LabelMismatch {
                group: group.kind(),
                label: *l,
            });
        }
    }
    Ok(())
}

/// Groups label indices by Laplace eigenvalue, in order of first appearance.
fn shells(group: &Group, labels: &[IrrepLabel]) -> Vec<(f64, Vec<usize>)> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let mu = group.eigenvalue(l);
        let slot = *index.entry(mu.to_bits()).or_insert_with(|| {
            out.push((mu, Vec::new()));
            out.len() - 1
        });
        out[slot].1.push(i);
    }
    out
}

/// The symbol field of `spec` over `irreps` at the nodes of `rule`.
///
/// Closed-form symbols are checked for finiteness at every (node, irrep)
/// pair. Other symbols are extracted by applying the operator to matrix
/// coefficients, which requires `rule` to resolve every irrep.
pub fn symbol_of(spec: &OperatorSpec, irreps: &[IrrepLabel], rule: &Arc<QuadratureRule>) -> Result<SymbolField> {
    let group = *rule.group();
    spec.validate(&group)?;
    check_labels(&group, irreps)?;
    let repr = match spec.closed_form() {
        Some(c) => {
            let nodes = if c.uses_x() { rule.len() } else { 1 };
            shells(&group, irreps).par_iter().try_for_each(|(mu, idx)| {
                let label = irreps[idx[0]];
                (0..nodes).try_for_each(|n| {
                    c.eval_at(rule.nodes()[n].coords(), mu.sqrt(), Some(n), Some(label))
                        .map(|_| ())
                })
            })?;
            Repr::Closed(c)
        }
        None => {
            let mats = irreps
                .par_iter()
                .map(|l| extract_on_rule(spec, l, rule))
                .collect::<Result<Vec<_>>>()?;
            Repr::Dense(irreps.iter().copied().zip(mats).collect())
        }
    };
    Ok(SymbolField {
        rule: rule.clone(),
        irreps: irreps.to_vec(),
        order_hint: spec.order_hint(),
        reduction: None,
        repr,
    })
}

/// `sigma(x_n, xi)` at every node, by applying `spec` to each `xi_ij`.
pub(crate) fn extract_on_rule(spec: &OperatorSpec, label: &IrrepLabel, rule: &Arc<QuadratureRule>) -> Result<Vec<CMatrix>> {
    let images = coefficient_images(spec, label, rule)?;
    symbol_from_images(label, &images, rule)
}

/// `A xi_ij` for every matrix coefficient of `label`, row-major in `(i, j)`.
pub(crate) fn coefficient_images(spec: &OperatorSpec, label: &IrrepLabel, rule: &Arc<QuadratureRule>) -> Result<Vec<GridFunction>> {
    let d = label.dim();
    let mut images = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let xi = GridFunction::coefficient(rule.clone(), label, i, j)?;
            images.push(apply_unchecked(spec, &xi)?);
        }
    }
    Ok(images)
}

/// `xi(x_n)^* [A xi_ij](x_n)` at every node.
pub(crate) fn symbol_from_images(label: &IrrepLabel, images: &[GridFunction], rule: &QuadratureRule) -> Result<Vec<CMatrix>> {
    let d = label.dim();
    (0..rule.len())
        .map(|n| {
            let g = CMatrix::from_fn(d, d, |i, j| images[i * d + j].values()[n]);
            Ok(rule.irrep_at_node(label, n)?.adjoint() * g)
        })
        .collect()
}

/// The quantisation formula applied to `f` with the symbol `sigma`.
pub fn quantize_apply(sigma: &SymbolField, f: &GridFunction) -> Result<GridFunction> {
    if !Arc::ptr_eq(sigma.rule(), f.rule()) {
        return Err(Error::RuleMismatch);
    }
    if let Some(b) = f.band() {
        let known: std::collections::HashSet<&IrrepLabel> = sigma.irreps.iter().collect();
        if let Some(missing) = sigma.group().dual_enumerate(b).into_iter().find(|l| !known.contains(l)) {
            return Err(Error::InvalidArgument(format!(
                "function band {b} reaches irrep {missing}, which the symbol does not cover"
            )));
        }
    }
    let rule = sigma.rule();
    let coeffs = analyze(rule, f.values(), &sigma.irreps)?;
    let values = match &sigma.repr {
        Repr::Closed(c) => quantize_closed(c, sigma.reduction, rule, &sigma.irreps, &coeffs)?,
        Repr::Dense(map) => (0..rule.len())
            .into_par_iter()
            .map(|n| {
                let mut acc = ComplexSum::new();
                for (l, fh) in sigma.irreps.iter().zip(&coeffs) {
                    let w = sigma.weight_of(l);
                    if w == 0.0 {
                        continue;
                    }
                    let xi = rule.irrep_at_node(l, n)?;
                    let s = &map[l][n] * fh;
                    acc.add(trace_product(&xi, &s) * (w * l.dim() as f64));
                }
                Ok(acc.value())
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let band = match sigma.closed() {
        Some(c) if !c.uses_x() => f.band(),
        _ => None,
    };
    Ok(GridFunction::new(rule.clone(), values)?.with_band(band))
}

/// `sum_xi d_xi Tr[xi(x_n) sigma(x_n, xi) c_xi]` for a closed-form symbol.
fn quantize_closed(
    c: &ClosedSymbol,
    reduction: Option<f64>,
    rule: &QuadratureRule,
    labels: &[IrrepLabel],
    coeffs: &[CMatrix],
) -> Result<Vec<Complex64>> {
    let group = rule.group();
    let weight = |l: &IrrepLabel| match reduction {
        None => 1.0,
        Some(_) if l.is_trivial() => 0.0,
        Some(m) => group.modulus(l).powf(-m),
    };
    if !c.uses_x() {
        let x0 = rule.nodes()[0].coords();
        let mut scaled = Vec::with_capacity(labels.len());
        for (l, m) in labels.iter().zip(coeffs) {
            let (a, b) = c.eval_at(x0, group.modulus(l), None, Some(*l))?;
            let w = weight(l);
            scaled.push((*l, ab_times(a * w, b * w, m)));
        }
        let terms: Vec<(IrrepLabel, &CMatrix)> = scaled.iter().map(|(l, m)| (*l, m)).collect();
        return synthesize(rule, &terms);
    }
    let needs_p = c.terms.iter().any(|t| t.factor == MatrixFactor::FirstProjection);
    let per_shell = shells(group, labels)
        .par_iter()
        .map(|(mu, idx)| {
            let t = mu.sqrt();
            let label = labels[idx[0]];
            let w = weight(&label);
            if w == 0.0 {
                return Ok(None);
            }
            let full: Vec<(IrrepLabel, &CMatrix)> = idx.iter().map(|&i| (labels[i], &coeffs[i])).collect();
            let h_i = synthesize(rule, &full)?;
            let h_p = if needs_p {
                let firsts: Vec<CMatrix> = idx.iter().map(|&i| first_row(&coeffs[i])).collect();
                let terms: Vec<(IrrepLabel, &CMatrix)> = idx.iter().zip(&firsts).map(|(&i, m)| (labels[i], m)).collect();
                synthesize(rule, &terms)?
            } else {
                Vec::new()
            };
            let mut out = Vec::with_capacity(rule.len());
            for (n, x) in rule.nodes().iter().enumerate() {
                let (a, b) = c.eval_at(x.coords(), t, Some(n), Some(label))?;
                let mut v = a * h_i[n];
                if needs_p {
                    v += b * h_p[n];
                }
                out.push(v * w);
            }
            Ok(Some(out))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = vec![ComplexSum::new(); rule.len()];
    for shell in per_shell.into_iter().flatten() {
        for (a, v) in acc.iter_mut().zip(shell) {
            a.add(v);
        }
    }
    Ok(acc.iter().map(ComplexSum::value).collect())
}

/// The action of `spec` on `f`, evaluated on `f`'s quadrature grid.
///
/// Fourier multipliers and symbol rules act on the coefficients of `f` up to
/// its declared band, or up to the rule's bandlimit when no band is known.
pub fn apply(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    spec.validate(f.group())?;
    apply_unchecked(spec, f)
}

fn resolved_labels(f: &GridFunction) -> Vec<IrrepLabel> {
    let band = f.band().unwrap_or(f.rule().bandlimit() as f64);
    f.group().dual_enumerate(band)
}

fn apply_unchecked(spec: &OperatorSpec, f: &GridFunction) -> Result<GridFunction> {
    let rule = f.rule();
    match spec {
        OperatorSpec::Multiplication(k) => {
            let values = rule
                .nodes()
                .iter()
                .zip(f.values())
                .enumerate()
                .map(|(n, (x, v))| {
                    let kv = k.eval(x.coords(), 0.0);
                    if kv.is_finite() {
                        Ok(v * kv)
                    } else {
                        Err(Error::Evaluation {
                            expr: k.to_string(),
                            node: Some(n),
                            label: None,
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            GridFunction::new(rule.clone(), values)
        }
        OperatorSpec::Spectral { .. } | OperatorSpec::SymbolRule { .. } => {
            let c = spec.closed_form().expect("leaf specs are closed-form");
            let labels = resolved_labels(f);
            let coeffs = analyze(rule, f.values(), &labels)?;
            let values = quantize_closed(&c, None, rule, &labels, &coeffs)?;
            let band = if c.uses_x() { None } else { Some(f.band().unwrap_or(rule.bandlimit() as f64)) };
            Ok(GridFunction::new(rule.clone(), values)?.with_band(band))
        }
        OperatorSpec::Sum(parts) => {
            let mut acc = GridFunction::zero(rule.clone());
            for p in parts {
                acc = acc.add(&apply_unchecked(p, f)?)?;
            }
            Ok(acc)
        }
        OperatorSpec::Product(a, b) => apply_unchecked(a, &apply_unchecked(b, f)?),
        OperatorSpec::Scale(c, a) => Ok(apply_unchecked(a, f)?.scale(*c)),
    }
}

/// `(A f)(x)` at an arbitrary point `x`.
///
/// The outermost operator is evaluated pointwise through the Fourier series
/// of its argument; inner factors of a composition act on the grid.
pub fn apply_at(spec: &OperatorSpec, f: &GridFunction, x: &GroupElement) -> Result<Complex64> {
    spec.validate(f.group())?;
    if x.kind() != f.group().kind() {
        return Err(Error::ElementMismatch { group: f.group().kind() });
    }
    apply_at_unchecked(spec, f, x)
}

fn apply_at_unchecked(spec: &OperatorSpec, f: &GridFunction, x: &GroupElement) -> Result<Complex64> {
    match spec {
        OperatorSpec::Multiplication(_) | OperatorSpec::Spectral { .. } | OperatorSpec::SymbolRule { .. } => {
            let c = spec.closed_form().expect("leaf specs are closed-form");
            let group = f.group();
            let labels = resolved_labels(f);
            let coeffs = analyze(f.rule(), f.values(), &labels)?;
            let mut acc = ComplexSum::new();
            for (l, m) in labels.iter().zip(&coeffs) {
                let (a, b) = c.eval_at(x.coords(), group.modulus(l), None, Some(*l))?;
                let xi = group.irrep_matrix(l, x)?;
                acc.add(trace_product(&xi, &ab_times(a, b, m)) * l.dim() as f64);
            }
            Ok(acc.value())
        }
        OperatorSpec::Sum(parts) => {
            let mut acc = ComplexSum::new();
            for p in parts {
                acc.add(apply_at_unchecked(p, f, x)?);
            }
            Ok(acc.value())
        }
        OperatorSpec::Product(a, b) => apply_at_unchecked(a, &apply_unchecked(b, f)?, x),
        OperatorSpec::Scale(c, a) => Ok(apply_at_unchecked(a, f, x)? * c),
    }
}

/// `xi(x)^* (A xi)(x)`, applying `spec` to every matrix coefficient of `xi`.
pub fn extract_symbol(
    spec: &OperatorSpec,
    label: &IrrepLabel,
    x: &GroupElement,
    rule: &Arc<QuadratureRule>,
) -> Result<CMatrix> {
    let group = rule.group();
    spec.validate(group)?;
    if !group.contains(label) {
        return Err(Error::LabelMismatch {
            group: group.kind(),
            label: *label,
        });
    }
    if x.kind() != group.kind() {
        return Err(Error::ElementMismatch { group: group.kind() });
    }
    let d = label.dim();
    let mut image = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let xi = GridFunction::coefficient(rule.clone(), label, i, j)?;
            image[(i, j)] = apply_at_unchecked(spec, &xi, x)?;
        }
    }
    Ok(group.irrep_matrix(label, x)?.adjoint() * image)
}

/// `sigma |xi|^{-m}` with the trivial slot set to zero, `m` the order hint.
pub fn reduce_order(sigma: &SymbolField) -> Result<SymbolField> {
    let m = sigma.order_hint;
    if m.is_nan() || m <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "order reduction needs a positive order, got {m}"
        )));
    }
    let mut out = sigma.clone();
    out.reduction = Some(sigma.reduction.unwrap_or(0.0) + m);
    out.order_hint = 0.0;
    Ok(out)
}
