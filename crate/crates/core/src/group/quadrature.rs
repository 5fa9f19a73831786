use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::{su2_from_little_d, torus_character, wigner, CMatrix, Group, GroupElement, GroupKind, IrrepLabel};
use crate::error::{Error, Result};
use crate::sum::{ComplexSum, NeumaierSum};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Debug, Clone)]
pub(crate) enum Layout {
    /// `per_axis` equispaced angles per coordinate; node index is row-major with `x1` slowest.
    Torus { per_axis: usize },
    /// Node index is `(ib * n_gamma + ig) * n_alpha + ia`.
    Su2 {
        alphas: Vec<f64>,
        betas: Vec<f64>,
        gammas: Vec<f64>,
        two_l_max: u32,
    },
}

/// Nodes and positive weights realizing the normalized Haar integral.
///
/// A rule with bandlimit `B` integrates every product `xi_ij * conj(eta_kl)`
/// exactly whenever `|xi|, |eta| <= B`.
#[derive(Debug)]
pub struct QuadratureRule {
    group: Group,
    bandlimit: u32,
    nodes: Vec<GroupElement>,
    weights: Vec<f64>,
    pub(crate) layout: Layout,
    spin_tables: OnceLock<Vec<Vec<f64>>>,
}

/// Largest `2l` with `|l| <= bandlimit`.
fn su2_two_l_max(group: &Group, bandlimit: f64) -> u32 {
    let mut t = 0u32;
    while super::within(group.eigenvalue(&IrrepLabel::Su2(t + 1)), bandlimit) {
        t += 1;
    }
    t
}

impl QuadratureRule {
    pub fn new(group: &Group, bandlimit: u32) -> Result<Self> {
        let b = bandlimit as usize;
        match group.kind() {
            GroupKind::Torus(n) => {
                let kmax = (bandlimit as f64 / group.metric_scale().sqrt() + 1e-9).floor() as usize;
                let per_axis = 2 * kmax + 2;
                let axis: Vec<f64> = (0..per_axis)
                    .map(|j| 2.0 * PI * j as f64 / per_axis as f64)
                    .collect();
                let mut nodes = Vec::new();
                if n == 1 {
                    for &a in &axis {
                        nodes.push(GroupElement::from_reduced(group.kind(), &[a]));
                    }
                } else {
                    for &a in &axis {
                        for &c in &axis {
                            nodes.push(GroupElement::from_reduced(group.kind(), &[a, c]));
                        }
                    }
                }
                let w = 1.0 / nodes.len() as f64;
                Ok(QuadratureRule {
                    group: *group,
                    bandlimit,
                    weights: vec![w; nodes.len()],
                    nodes,
                    layout: Layout::Torus { per_axis },
                    spin_tables: OnceLock::new(),
                })
            }
            GroupKind::Su2 => {
                if bandlimit == 0 {
                    return Err(Error::InvalidBandlimit {
                        group: group.kind(),
                        bandlimit,
                    });
                }
                let k = su2_two_l_max(group, bandlimit as f64) as usize;
                let n_alpha = (2 * b + 2).max(k + 2);
                let n_gamma = (2 * b + 2).max(2 * k + 2);
                let n_beta = (b + 1).max(k / 2 + 1);
                let alphas: Vec<f64> = (0..n_alpha)
                    .map(|j| 2.0 * PI * j as f64 / n_alpha as f64)
                    .collect();
                let gammas: Vec<f64> = (0..n_gamma)
                    .map(|j| 4.0 * PI * j as f64 / n_gamma as f64)
                    .collect();
                let (cos_nodes, gl_weights) = gauss_legendre(n_beta);
                let betas: Vec<f64> = cos_nodes.iter().map(|u| u.acos()).collect();
                let mut nodes = Vec::with_capacity(n_alpha * n_beta * n_gamma);
                let mut weights = Vec::with_capacity(nodes.capacity());
                let w_ag = 1.0 / (n_alpha * n_gamma) as f64;
                for (ib, &beta) in betas.iter().enumerate() {
                    for &gamma in &gammas {
                        for &alpha in &alphas {
                            nodes.push(GroupElement::from_reduced(
                                GroupKind::Su2,
                                &[alpha, beta, gamma],
                            ));
                            weights.push(w_ag * gl_weights[ib] / 2.0);
                        }
                    }
                }
                Ok(QuadratureRule {
                    group: *group,
                    bandlimit,
                    nodes,
                    weights,
                    layout: Layout::Su2 {
                        alphas,
                        betas,
                        gammas,
                        two_l_max: k as u32,
                    },
                    spin_tables: OnceLock::new(),
                })
            }
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn bandlimit(&self) -> u32 {
        self.bandlimit
    }

    pub fn nodes(&self) -> &[GroupElement] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether `|label|` is within the exactness band of this rule.
    pub fn resolves(&self, label: &IrrepLabel) -> bool {
        self.group.contains(label) && super::within(self.group.eigenvalue(label), self.bandlimit as f64)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        let mut acc = NeumaierSum::new();
        for (w, v) in self.weights.iter().zip(values) {
            acc.add(w * v);
        }
        acc.value()
    }

    pub fn integrate_complex(&self, values: &[Complex64]) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (w, v) in self.weights.iter().zip(values) {
            acc.add(v * *w);
        }
        acc.value()
    }

    /// Packed little-d tables, one per beta node, covering every spin the rule resolves.
    pub(crate) fn spin_tables(&self) -> &[Vec<f64>] {
        self.spin_tables.get_or_init(|| match &self.layout {
            Layout::Su2 {
                betas, two_l_max, ..
            } => betas
                .iter()
                .map(|&b| wigner::little_d_table(*two_l_max, b))
                .collect(),
            Layout::Torus { .. } => Vec::new(),
        })
    }

    /// `xi(x_node)`, using cached little-d tables on SU(2).
    pub fn irrep_at_node(&self, label: &IrrepLabel, node: usize) -> Result<CMatrix> {
        if !self.group.contains(label) {
            return Err(Error::LabelMismatch {
                group: self.group.kind(),
                label: *label,
            });
        }
        match (&self.layout, *label) {
            (
                Layout::Su2 {
                    alphas,
                    gammas,
                    two_l_max,
                    ..
                },
                IrrepLabel::Su2(two_l),
            ) if two_l <= *two_l_max => {
                let n_a = alphas.len();
                let n_g = gammas.len();
                let ia = node % n_a;
                let ig = (node / n_a) % n_g;
                let ib = node / (n_a * n_g);
                let table = &self.spin_tables()[ib];
                let off = wigner::packed_offset(two_l);
                let d = two_l as usize + 1;
                Ok(su2_from_little_d(
                    two_l,
                    alphas[ia],
                    gammas[ig],
                    &table[off..off + d * d],
                ))
            }
            (Layout::Torus { .. }, _) => Ok(CMatrix::from_element(
                1,
                1,
                torus_character(label.frequency(), self.nodes[node].coords()),
            )),
            _ => self.group.irrep_matrix(label, &self.nodes[node]),
        }
    }
}

impl QuadratureRule {
    /// Entry `(row, col)` of `xi(x_n)`, without forming the whole matrix.
    pub fn irrep_entry_at_node(&self, label: &IrrepLabel, node: usize, row: usize, col: usize) -> Result<Complex64> {
        match (&self.layout, *label) {
            (
                Layout::Su2 {
                    alphas,
                    gammas,
                    two_l_max,
                    ..
                },
                IrrepLabel::Su2(two_l),
            ) if two_l <= *two_l_max && row <= two_l as usize && col <= two_l as usize => {
                let n_a = alphas.len();
                let n_g = gammas.len();
                let (ia, ig, ib) = (node % n_a, (node / n_a) % n_g, node / (n_a * n_g));
                let d = two_l as usize + 1;
                let little = self.spin_tables()[ib][wigner::packed_offset(two_l) + row * d + col];
                let m_row = (two_l as f64 - 2.0 * row as f64) / 2.0;
                let m_col = (two_l as f64 - 2.0 * col as f64) / 2.0;
                Ok(Complex64::from_polar(little, -m_row * alphas[ia] - m_col * gammas[ig]))
            }
            _ => self.irrep_at_node(label, node).map(|m| m[(row, col)]),
        }
    }
}

impl Group {
    /// Exact Haar quadrature for band-limited products; see [`QuadratureRule`].
    pub fn haar_quadrature(&self, bandlimit: u32) -> Result<QuadratureRule> {
        QuadratureRule::new(self, bandlimit)
    }
}
