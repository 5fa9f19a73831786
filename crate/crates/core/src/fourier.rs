//! Group Fourier transform, inversion and Plancherel on quadrature grids.
//!
//! Transforms are direct sums over quadrature nodes. On SU(2) the sums are
//! taken one Euler angle at a time, which keeps the cost at
//! `O(nodes * (2K+1))` instead of `O(nodes * sum d^2)`.

use std::sync::Arc;

use indexmap::IndexMap;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::quadrature::Layout;
use crate::group::{wigner, CMatrix, Group, GroupElement, IrrepLabel, QuadratureRule};
use crate::sum::ComplexSum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A function on `G` sampled at the nodes of a quadrature rule.
///
/// `band`, when known, bounds `|xi|` over the Fourier support of the function.
#[derive(Debug, Clone)]
pub struct GridFunction {
    rule: Arc<QuadratureRule>,
    values: Vec<Complex64>,
    band: Option<f64>,
}

impl GridFunction {
    pub fn new(rule: Arc<QuadratureRule>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} node values, got {}",
                rule.len(),
                values.len()
            )));
        }
        Ok(GridFunction {
            rule,
            values,
            band: None,
        })
    }

    pub fn from_fn(rule: Arc<QuadratureRule>, f: impl Fn(&GroupElement) -> Complex64) -> Self {
        let values = rule.nodes().iter().map(f).collect();
        GridFunction {
            rule,
            values,
            band: None,
        }
    }

    /// The matrix coefficient `xi_ij` (zero-based `row`, `col`).
    pub fn coefficient(
        rule: Arc<QuadratureRule>,
        label: &IrrepLabel,
        row: usize,
        col: usize,
    ) -> Result<Self> {
        let d = label.dim();
        if row >= d || col >= d {
            return Err(Error::InvalidArgument(format!(
                "entry ({row},{col}) outside a {d}x{d} representation"
            )));
        }
        let values = (0..rule.len())
            .map(|n| rule.irrep_entry_at_node(label, n, row, col))
            .collect::<Result<Vec<_>>>()?;
        let band = Some(rule.group().modulus(label));
        Ok(GridFunction { rule, values, band })
    }

    /// Declares a bound on the Fourier support.
    pub fn with_band(mut self, band: Option<f64>) -> Self {
        self.band = band;
        self
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn band(&self) -> Option<f64> {
        self.band
    }

    pub fn group(&self) -> &Group {
        self.rule.group()
    }

    pub(crate) fn same_rule(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.rule, &other.rule)
    }

    /// `(f, g) = int f conj(g) dx` by quadrature.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if !self.same_rule(other) {
            return Err(Error::RuleMismatch);
        }
        let prod: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .collect();
        Ok(self.rule.integrate_complex(&prod))
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        self.rule.integrate(&sq).max(0.0).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction {
            rule: self.rule.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            band: if c == ZERO { Some(0.0) } else { self.band },
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        if !self.same_rule(other) {
            return Err(Error::RuleMismatch);
        }
        let band = match (self.band, other.band) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Ok(GridFunction {
            rule: self.rule.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            band,
        })
    }

    pub fn zero(rule: Arc<QuadratureRule>) -> GridFunction {
        let n = rule.len();
        GridFunction {
            rule,
            values: vec![ZERO; n],
            band: Some(0.0),
        }
    }
}

/// Fourier coefficients `f^(xi)` for every class with `|xi| <= bandlimit`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    group: Group,
    bandlimit: f64,
    entries: IndexMap<IrrepLabel, CMatrix>,
}

impl FourierCoefficients {
    pub fn zeros(group: &Group, bandlimit: f64) -> Self {
        let entries = group
            .dual_enumerate(bandlimit)
            .into_iter()
            .map(|l| (l, CMatrix::zeros(l.dim(), l.dim())))
            .collect();
        FourierCoefficients {
            group: *group,
            bandlimit,
            entries,
        }
    }

    /// An empty coefficient set (no classes at all).
    pub fn empty(group: &Group) -> Self {
        FourierCoefficients {
            group: *group,
            bandlimit: 0.0,
            entries: IndexMap::new(),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn bandlimit(&self) -> f64 {
        self.bandlimit
    }

    pub fn get(&self, label: &IrrepLabel) -> Option<&CMatrix> {
        self.entries.get(label)
    }

    pub fn get_mut(&mut self, label: &IrrepLabel) -> Option<&mut CMatrix> {
        self.entries.get_mut(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IrrepLabel, &CMatrix)> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&IrrepLabel, &mut CMatrix)> {
        self.entries.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `f^(xi) = int f(x) xi(x)^* dx` for every `|xi| <= lambda`.
pub fn forward_ft(f: &GridFunction, lambda: f64) -> Result<FourierCoefficients> {
    let rule = f.rule();
    let available = rule.bandlimit();
    let needed = lambda.max(f.band.unwrap_or(0.0));
    if needed > available as f64 * (1.0 + 1e-12) {
        return Err(Error::InsufficientBandlimit {
            required: needed,
            available,
        });
    }
    let labels = rule.group().dual_enumerate(lambda);
    let mats = analyze(rule, &f.values, &labels)?;
    Ok(FourierCoefficients {
        group: *rule.group(),
        bandlimit: lambda,
        entries: labels.into_iter().zip(mats).collect(),
    })
}

/// `f(x) = sum_xi d_xi Tr[xi(x) f^(xi)]` at an arbitrary point.
pub fn inverse_ft(coeffs: &FourierCoefficients, x: &GroupElement) -> Result<Complex64> {
    let mut acc = ComplexSum::new();
    for (label, m) in &coeffs.entries {
        let xi = coeffs.group.irrep_matrix(label, x)?;
        acc.add(trace_product(&xi, m) * label.dim() as f64);
    }
    Ok(acc.value())
}

/// Inverse transform evaluated at every node of `rule`.
pub fn inverse_on_rule(coeffs: &FourierCoefficients, rule: &Arc<QuadratureRule>) -> Result<GridFunction> {
    if rule.group().kind() != coeffs.group.kind() {
        return Err(Error::RuleMismatch);
    }
    let terms: Vec<(IrrepLabel, &CMatrix)> = coeffs.entries.iter().map(|(l, m)| (*l, m)).collect();
    let values = synthesize(rule, &terms)?;
    Ok(GridFunction {
        rule: rule.clone(),
        values,
        band: Some(coeffs.bandlimit),
    })
}

/// `(sum_xi d_xi ||f^(xi)||_HS^2)^(1/2)`.
pub fn plancherel_norm(coeffs: &FourierCoefficients) -> f64 {
    let mut acc = crate::sum::NeumaierSum::new();
    for (label, m) in &coeffs.entries {
        acc.add(label.dim() as f64 * m.norm_squared());
    }
    acc.value().sqrt()
}

/// `Tr[a b]` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn check_resolved(rule: &QuadratureRule, labels: &[IrrepLabel]) -> Result<()> {
    for l in labels {
        if !rule.group().contains(l) {
            return Err(Error::LabelMismatch {
                group: rule.group().kind(),
                label: *l,
            });
        }
        if !rule.resolves(l) {
            return Err(Error::InsufficientBandlimit {
                required: rule.group().modulus(l),
                available: rule.bandlimit(),
            });
        }
    }
    Ok(())
}

/// Phase table `e^{sign * i * k * theta_j}` for `k = -kmax..=kmax`, row-major in `k`.
fn phase_table(angles: &[f64], kmax: i64, scale: f64, sign: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity((2 * kmax as usize + 1) * angles.len());
    for k in -kmax..=kmax {
        for &a in angles {
            out.push(Complex64::from_polar(1.0, sign * scale * k as f64 * a));
        }
    }
    out
}

/// Quadrature sums `sum_n w_n f(x_n) xi(x_n)^*` for each label.
pub(crate) fn analyze(
    rule: &QuadratureRule,
    values: &[Complex64],
    labels: &[IrrepLabel],
) -> Result<Vec<CMatrix>> {
    check_resolved(rule, labels)?;
    if labels.is_empty() {
        return Ok(Vec::new());
    }
    match &rule.layout {
        Layout::Torus { per_axis } => {
            let n = *per_axis;
            let w = rule.weights()[0];
            let angles: Vec<f64> = (0..n).map(|j| rule_angle(j, n)).collect();
            let kmax = labels
                .iter()
                .map(|l| l.frequency().iter().map(|k| k.abs()).max().unwrap())
                .max()
                .unwrap() as i64;
            let width = 2 * kmax as usize + 1;
            let ph = phase_table(&angles, kmax, 1.0, -1.0);
            let row = |k: i32| ((k as i64 + kmax) as usize) * n;
            if rule.group().dim() == 1 {
                Ok(labels
                    .iter()
                    .map(|l| {
                        let r = row(l.frequency()[0]);
                        let mut acc = ComplexSum::new();
                        for j in 0..n {
                            acc.add(values[j] * ph[r + j]);
                        }
                        CMatrix::from_element(1, 1, acc.value() * w)
                    })
                    .collect())
            } else {
                // partial[j1][k2] = sum_j2 f[j1][j2] e^{-i k2 x_j2}
                let mut partial = vec![ZERO; n * width];
                for j1 in 0..n {
                    for kk in 0..width {
                        let mut acc = ZERO;
                        for j2 in 0..n {
                            acc += values[j1 * n + j2] * ph[kk * n + j2];
                        }
                        partial[j1 * width + kk] = acc;
                    }
                }
                Ok(labels
                    .iter()
                    .map(|l| {
                        let [k1, k2] = l.frequency();
                        let r1 = row(k1);
                        let c2 = (k2 as i64 + kmax) as usize;
                        let mut acc = ComplexSum::new();
                        for j1 in 0..n {
                            acc.add(partial[j1 * width + c2] * ph[r1 + j1]);
                        }
                        CMatrix::from_element(1, 1, acc.value() * w)
                    })
                    .collect())
            }
        }
        Layout::Su2 {
            alphas,
            betas,
            gammas,
            ..
        } => {
            let (na, nb, ng) = (alphas.len(), betas.len(), gammas.len());
            let k = labels
                .iter()
                .map(|l| match l {
                    IrrepLabel::Su2(t) => *t as i64,
                    _ => 0,
                })
                .max()
                .unwrap();
            let width = 2 * k as usize + 1;
            // phases e^{+i m theta} with m = twoM / 2, twoM = -K..=K
            let pa = phase_table(alphas, k, 0.5, 1.0);
            let pg = phase_table(gammas, k, 0.5, 1.0);
            let tables = rule.spin_tables();
            let mut out: Vec<CMatrix> = labels
                .iter()
                .map(|l| CMatrix::zeros(l.dim(), l.dim()))
                .collect();
            let mut f1 = vec![ZERO; width * ng];
            let mut f2 = vec![ZERO; width * width];
            for ib in 0..nb {
                for ig in 0..ng {
                    let base = (ib * ng + ig) * na;
                    for p in 0..width {
                        let mut acc = ZERO;
                        for ia in 0..na {
                            acc += values[base + ia] * pa[p * na + ia];
                        }
                        f1[p * ng + ig] = acc;
                    }
                }
                // m_i and m_j share the parity of twoL, so only p = q mod 2 is read
                for p in 0..width {
                    for q in (p % 2..width).step_by(2) {
                        let mut acc = ZERO;
                        for ig in 0..ng {
                            acc += f1[p * ng + ig] * pg[q * ng + ig];
                        }
                        f2[p * width + q] = acc;
                    }
                }
                let w = rule.weights()[ib * ng * na];
                for (l, m) in labels.iter().zip(out.iter_mut()) {
                    let IrrepLabel::Su2(two_l) = *l else { unreachable!() };
                    let d = two_l as usize + 1;
                    let off = wigner::packed_offset(two_l);
                    let table = &tables[ib][off..off + d * d];
                    for i in 0..d {
                        let q = (two_l as i64 - 2 * i as i64 + k) as usize;
                        for j in 0..d {
                            let p = (two_l as i64 - 2 * j as i64 + k) as usize;
                            // conj(D_ji) = e^{i m_j alpha} d_{m_j m_i} e^{i m_i gamma}
                            m[(i, j)] += f2[p * width + q] * (w * table[j * d + i]);
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

fn rule_angle(j: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / n as f64
}

/// `sum_terms d_xi Tr[xi(x_n) M]` at every node.
pub(crate) fn synthesize(rule: &QuadratureRule, terms: &[(IrrepLabel, &CMatrix)]) -> Result<Vec<Complex64>> {
    let labels: Vec<IrrepLabel> = terms.iter().map(|(l, _)| *l).collect();
    check_resolved(rule, &labels)?;
    for (l, m) in terms {
        if m.nrows() != l.dim() || m.ncols() != l.dim() {
            return Err(Error::InvalidArgument(format!(
                "coefficient for {l} must be {0}x{0}",
                l.dim()
            )));
        }
    }
    let mut out = vec![ZERO; rule.len()];
    if terms.is_empty() {
        return Ok(out);
    }
    match &rule.layout {
        Layout::Torus { per_axis } => {
            let n = *per_axis;
            let angles: Vec<f64> = (0..n).map(|j| rule_angle(j, n)).collect();
            let kmax = labels
                .iter()
                .map(|l| l.frequency().iter().map(|k| k.abs()).max().unwrap())
                .max()
                .unwrap() as i64;
            let width = 2 * kmax as usize + 1;
            let ph = phase_table(&angles, kmax, 1.0, 1.0);
            if rule.group().dim() == 1 {
                for (l, m) in terms {
                    let r = (l.frequency()[0] as i64 + kmax) as usize * n;
                    let c = m[(0, 0)];
                    for j in 0..n {
                        out[j] += c * ph[r + j];
                    }
                }
            } else {
                let mut grid = vec![ZERO; width * width];
                for (l, m) in terms {
                    let [k1, k2] = l.frequency();
                    grid[(k1 as i64 + kmax) as usize * width + (k2 as i64 + kmax) as usize] += m[(0, 0)];
                }
                // partial[k1][j2] = sum_k2 grid[k1][k2] e^{i k2 x_j2}
                let mut partial = vec![ZERO; width * n];
                for k1 in 0..width {
                    for j2 in 0..n {
                        let mut acc = ZERO;
                        for k2 in 0..width {
                            acc += grid[k1 * width + k2] * ph[k2 * n + j2];
                        }
                        partial[k1 * n + j2] = acc;
                    }
                }
                for j1 in 0..n {
                    for j2 in 0..n {
                        let mut acc = ZERO;
                        for k1 in 0..width {
                            acc += partial[k1 * n + j2] * ph[k1 * n + j1];
                        }
                        out[j1 * n + j2] = acc;
                    }
                }
            }
        }
        Layout::Su2 {
            alphas,
            betas,
            gammas,
            ..
        } => {
            let (na, nb, ng) = (alphas.len(), betas.len(), gammas.len());
            let k = labels
                .iter()
                .map(|l| match l {
                    IrrepLabel::Su2(t) => *t as i64,
                    _ => 0,
                })
                .max()
                .unwrap();
            let width = 2 * k as usize + 1;
            let pa = phase_table(alphas, k, 0.5, -1.0);
            let pg = phase_table(gammas, k, 0.5, -1.0);
            let tables = rule.spin_tables();
            let mut g = vec![ZERO; width * width];
            let mut h = vec![ZERO; ng * width];
            for ib in 0..nb {
                g.iter_mut().for_each(|v| *v = ZERO);
                for (l, m) in terms {
                    let IrrepLabel::Su2(two_l) = *l else { unreachable!() };
                    let d = two_l as usize + 1;
                    let off = wigner::packed_offset(two_l);
                    let table = &tables[ib][off..off + d * d];
                    for i in 0..d {
                        let p = (two_l as i64 - 2 * i as i64 + k) as usize;
                        for j in 0..d {
                            let q = (two_l as i64 - 2 * j as i64 + k) as usize;
                            g[p * width + q] += m[(j, i)] * (d as f64 * table[i * d + j]);
                        }
                    }
                }
                for ig in 0..ng {
                    for p in 0..width {
                        let mut acc = ZERO;
                        for q in (p % 2..width).step_by(2) {
                            acc += g[p * width + q] * pg[q * ng + ig];
                        }
                        h[ig * width + p] = acc;
                    }
                }
                for ig in 0..ng {
                    let base = (ib * ng + ig) * na;
                    for ia in 0..na {
                        let mut acc = ZERO;
                        for p in 0..width {
                            acc += h[ig * width + p] * pa[p * na + ia];
                        }
                        out[base + ia] = acc;
                    }
                }
            }
        }
    }
    Ok(out)
}
