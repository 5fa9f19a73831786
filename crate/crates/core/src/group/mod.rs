//! Concrete compact Lie groups: the tori `T^1`, `T^2` and `SU(2)`.
//!
//! A [`Group`] knows its unitary dual, its Laplace spectrum, how to evaluate
//! irreducible representations at a point, and how to build exact Haar
//! quadrature rules for band-limited integrands.

pub(crate) mod quadrature;
pub mod wigner;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use quadrature::{gauss_legendre, QuadratureRule};

pub type CMatrix = DMatrix<Complex64>;

/// Relative slack used when testing `mu <= lambda^2`.
const SPECTRAL_TOL: f64 = 1e-12;

pub(crate) fn within(mu: f64, lambda: f64) -> bool {
    let l = lambda.max(0.0);
    mu <= l * l * (1.0 + SPECTRAL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// The `n`-torus, `n` in `{1, 2}`.
    Torus(u8),
    Su2,
}

impl GroupKind {
    pub fn dim(self) -> usize {
        match self {
            GroupKind::Torus(n) => n as usize,
            GroupKind::Su2 => 3,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Torus(n) => write!(f, "t{n}"),
            GroupKind::Su2 => write!(f, "su2"),
        }
    }
}

/// A point of the unitary dual.
///
/// SU(2) labels carry `2l` so that half-integer spins stay integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrepLabel {
    Torus1(i32),
    Torus2(i32, i32),
    Su2(u32),
}

impl IrrepLabel {
    pub fn dim(&self) -> usize {
        match self {
            IrrepLabel::Torus1(_) | IrrepLabel::Torus2(..) => 1,
            IrrepLabel::Su2(two_l) => *two_l as usize + 1,
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(
            self,
            IrrepLabel::Torus1(0) | IrrepLabel::Torus2(0, 0) | IrrepLabel::Su2(0)
        )
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            IrrepLabel::Torus1(_) => GroupKind::Torus(1),
            IrrepLabel::Torus2(..) => GroupKind::Torus(2),
            IrrepLabel::Su2(_) => GroupKind::Su2,
        }
    }

    /// Torus frequency padded to two components.
    pub(crate) fn frequency(&self) -> [i32; 2] {
        match *self {
            IrrepLabel::Torus1(k) => [k, 0],
            IrrepLabel::Torus2(k1, k2) => [k1, k2],
            IrrepLabel::Su2(_) => [0, 0],
        }
    }

    /// Eigenvalue of the Laplacian under the unit metric scale.
    fn unit_eigenvalue(&self) -> f64 {
        match *self {
            IrrepLabel::Torus1(k) => (k as f64).powi(2),
            IrrepLabel::Torus2(a, b) => (a as f64).powi(2) + (b as f64).powi(2),
            IrrepLabel::Su2(t) => (t as f64) * (t as f64 + 2.0) / 4.0,
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Torus1(k) => write!(f, "{k}"),
            IrrepLabel::Torus2(a, b) => write!(f, "({a},{b})"),
            IrrepLabel::Su2(t) if t % 2 == 0 => write!(f, "l={}", t / 2),
            IrrepLabel::Su2(t) => write!(f, "l={t}/2"),
        }
    }
}

/// One Peter-Weyl basis function `sqrt(d) xi_ij`; `row` and `col` are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisElement {
    pub label: IrrepLabel,
    pub row: usize,
    pub col: usize,
}

/// A group element in chart coordinates reduced to the fundamental domain.
///
/// Torus: angles in `[0, 2pi)`. SU(2): ZYZ Euler angles
/// `(alpha, beta, gamma)` in `[0, 2pi) x [0, pi] x [0, 4pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    kind: GroupKind,
    coords: [f64; 3],
}

impl GroupElement {
    pub(crate) fn from_reduced(kind: GroupKind, coords: &[f64]) -> Self {
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        GroupElement { kind, coords: c }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.kind.dim()]
    }

    fn su2(&self) -> [[Complex64; 2]; 2] {
        wigner::su2_matrix(self.coords[0], self.coords[1], self.coords[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Group {
    kind: GroupKind,
    metric_scale: f64,
}

impl Group {
    pub fn new(kind: GroupKind) -> Result<Self> {
        if let GroupKind::Torus(n) = kind {
            if !(1..=2).contains(&n) {
                return Err(Error::InvalidArgument(format!(
                    "only T^1 and T^2 are supported, got T^{n}"
                )));
            }
        }
        Ok(Group {
            kind,
            metric_scale: 1.0,
        })
    }

    pub fn t1() -> Self {
        Group::new(GroupKind::Torus(1)).unwrap()
    }

    pub fn t2() -> Self {
        Group::new(GroupKind::Torus(2)).unwrap()
    }

    pub fn su2() -> Self {
        Group::new(GroupKind::Su2).unwrap()
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "t1" => Some(Group::t1()),
            "t2" => Some(Group::t2()),
            "su2" => Some(Group::su2()),
            _ => None,
        }
    }

    /// Multiplies every Laplace eigenvalue by `scale`.
    pub fn with_metric_scale(self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "metric scale must be positive, got {scale}"
            )));
        }
        Ok(Group {
            metric_scale: scale,
            ..self
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn metric_scale(&self) -> f64 {
        self.metric_scale
    }

    pub fn contains(&self, label: &IrrepLabel) -> bool {
        label.kind() == self.kind
    }

    fn check(&self, label: &IrrepLabel) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(Error::LabelMismatch {
                group: self.kind,
                label: *label,
            })
        }
    }

    /// Laplace eigenvalue `mu_xi`.
    pub fn eigenvalue(&self, label: &IrrepLabel) -> f64 {
        self.metric_scale * label.unit_eigenvalue()
    }

    /// `|xi| = sqrt(mu_xi)`.
    pub fn modulus(&self, label: &IrrepLabel) -> f64 {
        self.eigenvalue(label).sqrt()
    }

    pub fn trivial(&self) -> IrrepLabel {
        match self.kind {
            GroupKind::Torus(1) => IrrepLabel::Torus1(0),
            GroupKind::Torus(_) => IrrepLabel::Torus2(0, 0),
            GroupKind::Su2 => IrrepLabel::Su2(0),
        }
    }

    /// All classes with `|xi| <= lambda`, sorted by eigenvalue and then by label.
    ///
    /// Negative `lambda` is treated as zero.
    pub fn dual_enumerate(&self, lambda: f64) -> Vec<IrrepLabel> {
        let lambda = lambda.max(0.0);
        let mut out = Vec::new();
        match self.kind {
            GroupKind::Torus(n) => {
                let kmax = (lambda / self.metric_scale.sqrt() + 1e-9).floor() as i32;
                for a in -kmax..=kmax {
                    if n == 1 {
                        out.push(IrrepLabel::Torus1(a));
                        continue;
                    }
                    for b in -kmax..=kmax {
                        out.push(IrrepLabel::Torus2(a, b));
                    }
                }
            }
            GroupKind::Su2 => {
                let mut t = 0u32;
                while within(self.eigenvalue(&IrrepLabel::Su2(t)), lambda) {
                    out.push(IrrepLabel::Su2(t));
                    t += 1;
                }
            }
        }
        out.retain(|l| within(self.eigenvalue(l), lambda));
        out.sort_by(|a, b| {
            self.eigenvalue(a)
                .total_cmp(&self.eigenvalue(b))
                .then_with(|| a.cmp(b))
        });
        out
    }

    /// The orthonormal functions `sqrt(d) xi_ij` with `|xi| <= lambda`.
    pub fn peter_weyl_basis(&self, lambda: f64) -> Vec<BasisElement> {
        let mut out = Vec::new();
        for label in self.dual_enumerate(lambda) {
            let d = label.dim();
            for row in 0..d {
                for col in 0..d {
                    out.push(BasisElement { label, row, col });
                }
            }
        }
        out
    }

    /// Builds an element from chart coordinates, reducing them into the fundamental domain.
    pub fn element(&self, coords: &[f64]) -> Result<GroupElement> {
        if coords.len() != self.dim() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::ElementMismatch { group: self.kind });
        }
        match self.kind {
            GroupKind::Torus(_) => {
                let reduced: Vec<f64> = coords.iter().map(|&c| wigner::wrap(c, 2.0 * PI)).collect();
                Ok(GroupElement::from_reduced(self.kind, &reduced))
            }
            GroupKind::Su2 => {
                let (a, b, g) = (coords[0], coords[1], coords[2]);
                let canonical = (0.0..2.0 * PI).contains(&a)
                    && (0.0..=PI).contains(&b)
                    && (0.0..4.0 * PI).contains(&g)
                    && b > 0.0
                    && b < PI;
                if canonical {
                    return Ok(GroupElement::from_reduced(self.kind, coords));
                }
                let (a, b, g) = wigner::euler_from_su2(&wigner::su2_matrix(a, b, g));
                Ok(GroupElement::from_reduced(self.kind, &[a, b, g]))
            }
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::from_reduced(self.kind, &vec![0.0; self.dim()])
    }

    fn check_element(&self, x: &GroupElement) -> Result<()> {
        if x.kind == self.kind {
            Ok(())
        } else {
            Err(Error::ElementMismatch { group: self.kind })
        }
    }

    /// Group product `x * y`.
    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        match self.kind {
            GroupKind::Torus(_) => {
                let sum: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| a + b).collect();
                self.element(&sum)
            }
            GroupKind::Su2 => {
                let u = wigner::su2_mul(&x.su2(), &y.su2());
                let (a, b, g) = wigner::euler_from_su2(&u);
                Ok(GroupElement::from_reduced(self.kind, &[a, b, g]))
            }
        }
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check_element(x)?;
        match self.kind {
            GroupKind::Torus(_) => {
                let neg: Vec<f64> = x.coords().iter().map(|c| -c).collect();
                self.element(&neg)
            }
            GroupKind::Su2 => {
                let u = x.su2();
                let adj = [
                    [u[0][0].conj(), u[1][0].conj()],
                    [u[0][1].conj(), u[1][1].conj()],
                ];
                let (a, b, g) = wigner::euler_from_su2(&adj);
                Ok(GroupElement::from_reduced(self.kind, &[a, b, g]))
            }
        }
    }

    /// The unitary matrix `xi(x)`.
    pub fn irrep_matrix(&self, label: &IrrepLabel, x: &GroupElement) -> Result<CMatrix> {
        self.check(label)?;
        self.check_element(x)?;
        Ok(match *label {
            IrrepLabel::Su2(two_l) => {
                let c = x.coords();
                let d = little_d(two_l, c[1]);
                su2_from_little_d(two_l, c[0], c[2], &d)
            }
            _ => CMatrix::from_element(1, 1, torus_character(label.frequency(), x.coords())),
        })
    }
}

fn little_d(two_l: u32, beta: f64) -> Vec<f64> {
    wigner::little_d(two_l, beta)
}

pub(crate) fn torus_character(k: [i32; 2], x: &[f64]) -> Complex64 {
    let phase: f64 = x.iter().zip(k.iter()).map(|(xi, ki)| *ki as f64 * xi).sum();
    Complex64::from_polar(1.0, phase)
}

/// `D^l_{m'm}(alpha, beta, gamma) = e^{-i m' alpha} d^l_{m'm}(beta) e^{-i m gamma}`.
pub(crate) fn su2_from_little_d(two_l: u32, alpha: f64, gamma: f64, d: &[f64]) -> CMatrix {
    let n = two_l as usize + 1;
    let phase = |angle: f64, i: usize| {
        let m = (two_l as f64 - 2.0 * i as f64) / 2.0;
        Complex64::from_polar(1.0, -m * angle)
    };
    let pa: Vec<Complex64> = (0..n).map(|i| phase(alpha, i)).collect();
    let pg: Vec<Complex64> = (0..n).map(|j| phase(gamma, j)).collect();
    CMatrix::from_fn(n, n, |i, j| pa[i] * d[i * n + j] * pg[j])
}
