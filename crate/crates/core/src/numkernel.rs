//! Tolerance-aware PSD numerics.
//!
//! Everything downstream (parallel sums, supports, densities of functionals)
//! goes through the types here: a validated [`HermitianMatrix`], a
//! [`PsdOperator`] carrying its certified spectrum, and an orthogonal
//! [`Projection`]. The eigensolver itself is nalgebra's Hermitian
//! `SymmetricEigen`; this module fixes the ordering, clipping and rank rules
//! on top of it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Real diagonal matrix as a complex matrix.
pub fn diag_matrix(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { ZERO })
}

/// Largest absolute entry of `m - m*`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m*) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Spectral norm of a Hermitian matrix (cheaper than the SVD route).
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// `B - A` is PSD up to `order_rel * max(‖A‖, ‖B‖)`.
pub fn loewner_leq(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> bool {
    loewner_leq_scaled(a, b, 0.0, tol)
}

/// Like [`loewner_leq`] with the slack measured against `max(‖A‖, ‖B‖, scale)`.
pub fn loewner_leq_scaled(a: &CMatrix, b: &CMatrix, scale: f64, tol: &Tolerances) -> bool {
    let scale = hermitian_norm(a).max(hermitian_norm(b)).max(scale);
    min_eigenvalue(&(b - a)) >= -tol.order_rel * scale
}

/// A square matrix with `m = m*` to within the configured absolute tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        if m.nrows() == 0 {
            return Err(Error::Invalid("matrix dimension must be at least 1".into()));
        }
        let defect = hermitian_defect(&m);
        if defect > tol.hermitian_abs {
            return Err(Error::NonHermitian(defect));
        }
        Ok(Self(symmetrize(&m)))
    }

    /// Symmetrizes a matrix produced by an internal computation.
    pub(crate) fn from_computed(m: &CMatrix) -> Self {
        Self(symmetrize(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues non-increasing.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn eigendecompose(h: &HermitianMatrix) -> Eigen {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.as_matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Eigen { values, vectors }
}

/// Positive semidefinite operator with its clipped spectrum and numerical rank.
#[derive(Debug, Clone)]
pub struct PsdOperator {
    matrix: CMatrix,
    eigvals: Vec<f64>,
    eigvecs: CMatrix,
    rank: usize,
    cutoff: f64,
}

impl PsdOperator {
    pub fn new(h: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        Self::certify(h, None, false, tol)
    }

    /// Validates an arbitrary matrix as Hermitian and PSD.
    pub fn from_matrix(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        Self::new(HermitianMatrix::new(m, tol)?, tol)
    }

    /// Certifies the Hermitian part of a computed matrix.
    pub fn from_computed(m: &CMatrix, tol: &Tolerances) -> Result<Self> {
        Self::certify(HermitianMatrix::from_computed(m), None, true, tol)
    }

    /// Like [`PsdOperator::from_computed`] but the rank cutoff is taken relative
    /// to `scale` rather than to the operator's own largest eigenvalue.
    pub fn from_computed_with_scale(m: &CMatrix, scale: f64, tol: &Tolerances) -> Result<Self> {
        Self::certify(HermitianMatrix::from_computed(m), Some(scale), true, tol)
    }

    fn certify(
        h: HermitianMatrix,
        scale: Option<f64>,
        computed: bool,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = h.dim();
        let Eigen { values, vectors } = eigendecompose(&h);
        let radius = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let min = values.last().copied().unwrap_or(0.0);
        let allowed = tol.psd_neg_rel * radius.max(scale.unwrap_or(0.0));
        if min < -allowed {
            return Err(Error::NotPsd { min, allowed });
        }
        let top = values.first().copied().unwrap_or(0.0).max(0.0);
        let factor = if computed {
            tol.computed_rank_factor(n)
        } else {
            tol.rank_factor(n)
        };
        let cutoff = factor * scale.unwrap_or(top).max(top);
        let eigvals: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
        let rank = eigvals.iter().filter(|&&v| v > cutoff).count();
        if rank == 0 {
            return Ok(Self::zero(n));
        }
        Ok(Self {
            matrix: h.into_matrix(),
            eigvals,
            eigvecs: vectors,
            rank,
            cutoff,
        })
    }

    /// Builds `V diag(values) V*` from an orthonormal eigenbasis.
    pub(crate) fn from_spectrum(values: &[f64], vectors: &CMatrix, tol: &Tolerances) -> Self {
        let n = vectors.nrows();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let eigvals: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();
        let eigvecs = CMatrix::from_fn(n, n, |r, col| vectors[(r, order[col])]);
        let scaled = CMatrix::from_fn(n, n, |r, col| eigvecs[(r, col)] * eigvals[col]);
        let matrix = symmetrize(&(scaled * eigvecs.adjoint()));
        let top = eigvals.first().copied().unwrap_or(0.0);
        let cutoff = tol.rank_factor(n) * top;
        let rank = eigvals.iter().filter(|&&v| v > cutoff).count();
        Self {
            matrix,
            eigvals,
            eigvecs,
            rank,
            cutoff,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(n, n),
            eigvals: vec![0.0; n],
            eigvecs: CMatrix::identity(n, n),
            rank: 0,
            cutoff: 0.0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n], &Tolerances::default()).expect("identity is PSD")
    }

    /// Non-negative real diagonal operator.
    pub fn diag(values: &[f64], tol: &Tolerances) -> Result<Self> {
        if let Some(&v) = values.iter().find(|v| **v < 0.0) {
            return Err(Error::NotPsd {
                min: v,
                allowed: 0.0,
            });
        }
        Ok(Self::from_spectrum(
            values,
            &CMatrix::identity(values.len(), values.len()),
            tol,
        ))
    }

    /// `scale * v v*`.
    pub fn rank_one(v: &CVector, scale: f64, tol: &Tolerances) -> Result<Self> {
        Self::from_computed(&(v * v.adjoint() * c(scale)), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn eigvecs(&self) -> &CMatrix {
        &self.eigvecs
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Eigenvalues at or below this count as zero.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Operator norm (largest eigenvalue).
    pub fn norm(&self) -> f64 {
        self.eigvals.first().copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.eigvals.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    /// Orthonormal basis of the numerical range (columns).
    pub fn range_basis(&self) -> CMatrix {
        self.eigvecs.columns(0, self.rank).into_owned()
    }

    /// Orthonormal basis of the numerical kernel (columns).
    pub fn kernel_basis(&self) -> CMatrix {
        self.eigvecs
            .columns(self.rank, self.dim() - self.rank)
            .into_owned()
    }

    /// Applies `phi` to the eigenvalues in the numerical range, zero elsewhere.
    fn spectral_map(&self, phi: impl Fn(f64) -> f64, tol: &Tolerances) -> Self {
        let values: Vec<f64> = self
            .eigvals
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < self.rank { phi(v) } else { 0.0 })
            .collect();
        Self::from_spectrum(&values, &self.eigvecs, tol)
    }

    /// Sum, certified as PSD.
    pub fn add(&self, other: &PsdOperator, tol: &Tolerances) -> Result<Self> {
        check_dims(self, other)?;
        Self::from_computed(&(&self.matrix + &other.matrix), tol)
    }

    /// Non-negative multiple.
    pub fn scale(&self, s: f64, tol: &Tolerances) -> Self {
        let values: Vec<f64> = self.eigvals.iter().map(|v| v * s.max(0.0)).collect();
        Self::from_spectrum(&values, &self.eigvecs, tol)
    }
}

pub(crate) fn check_dims(a: &PsdOperator, b: &PsdOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// Orthogonal projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: CMatrix,
    rank: usize,
}

impl Projection {
    /// Validates `P² = P = P*` to within 1e-10 Frobenius.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let idem = (&m * &m - &m).norm();
        let herm = (&m - m.adjoint()).norm();
        let defect = idem.max(herm);
        if defect > 1e-10 {
            return Err(Error::NotAProjection(defect));
        }
        let rank = m.trace().re.round().max(0.0) as usize;
        Ok(Self {
            matrix: symmetrize(&m),
            rank,
        })
    }

    /// Projection onto the span of orthonormal columns `q` (in `C^n`).
    pub fn from_orthonormal(q: &CMatrix) -> Self {
        Self {
            matrix: symmetrize(&(q * q.adjoint())),
            rank: q.ncols(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n, n),
            rank: n,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(n, n),
            rank: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: CMatrix::identity(n, n) - &self.matrix,
            rank: n - self.rank,
        }
    }

    /// Orthonormal basis of the range and of its complement, as column blocks.
    pub fn split_basis(&self) -> (CMatrix, CMatrix) {
        let eig = eigendecompose(&HermitianMatrix::from_computed(&self.matrix));
        let n = self.dim();
        let r = eig.values.iter().filter(|&&v| v > 0.5).count();
        (
            eig.vectors.columns(0, r).into_owned(),
            eig.vectors.columns(r, n - r).into_owned(),
        )
    }

    /// `range(self) ⊆ range(other)` up to `tol.subspace`.
    pub fn leq(&self, other: &Projection, tol: &Tolerances) -> bool {
        let outside = other.complement().matrix * &self.matrix;
        outside.norm() <= tol.subspace
    }
}

/// Hermitian eigendecomposition with non-increasing eigenvalues.
pub fn eigendecompose_checked(m: CMatrix, tol: &Tolerances) -> Result<Eigen> {
    Ok(eigendecompose(&HermitianMatrix::new(m, tol)?))
}

/// Moore-Penrose pseudoinverse; eigenvalues at or below the rank cutoff map to 0.
pub fn pseudo_inverse(a: &PsdOperator, tol: &Tolerances) -> PsdOperator {
    a.spectral_map(|v| 1.0 / v, tol)
}

pub fn support_projection(a: &PsdOperator) -> Projection {
    Projection::from_orthonormal(&a.range_basis())
}

pub fn sqrt_psd(a: &PsdOperator, tol: &Tolerances) -> PsdOperator {
    a.spectral_map(f64::sqrt, tol)
}

/// Mass of `a` outside `range(b)`: `‖(I - P_b) A (I - P_b)‖`, relative to `‖A‖`.
pub(crate) fn mass_outside(a: &PsdOperator, b: &PsdOperator) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let k = b.kernel_basis();
    if k.ncols() == 0 {
        return 0.0;
    }
    hermitian_norm(&(k.adjoint() * a.matrix() * &k)) / a.norm()
}

/// `range(a) ⊆ range(b)` in the mass sense: the part of `a` living on
/// `ker(b)` is below `tol.subspace` relative to `‖a‖`.
pub fn range_contained(a: &PsdOperator, b: &PsdOperator, tol: &Tolerances) -> Result<bool> {
    check_dims(a, b)?;
    Ok(mass_outside(a, b) <= tol.subspace)
}

/// `min{α ≥ 0 : A ≤ αB}`, or `+∞` when `range(A) ⊄ range(B)`.
pub fn max_generalized_eig(a: &PsdOperator, b: &PsdOperator, tol: &Tolerances) -> Result<f64> {
    check_dims(a, b)?;
    if a.is_zero() {
        return Ok(0.0);
    }
    if !range_contained(a, b, tol)? {
        return Ok(f64::INFINITY);
    }
    // Work in the eigenbasis of the range of B: W = Λ^{-1/2} Q* A Q Λ^{-1/2}.
    let q = b.range_basis();
    let inv_sqrt: Vec<f64> = b.eigvals()[..b.rank()]
        .iter()
        .map(|v| 1.0 / v.sqrt())
        .collect();
    let mut w = q.adjoint() * a.matrix() * &q;
    for i in 0..w.nrows() {
        for j in 0..w.ncols() {
            w[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let top = eigendecompose(&HermitianMatrix::from_computed(&w)).values[0];
    Ok(top.max(0.0))
}

/// Row-major dense complex matrix in the `{"dim", "re", "im"}` wire format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        Self {
            dim: n,
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        let ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !ok(&self.re) || !ok(&self.im) {
            return Err(Error::Invalid(format!(
                "matrix JSON rows do not match dim {n}"
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }

    /// Rounds every entry to a multiple of `step` (and clears negative zeros).
    pub fn rounded(&self, step: f64) -> Self {
        let r = |x: &f64| {
            let v = (x / step).round() * step;
            if v == 0.0 {
                0.0
            } else {
                v
            }
        };
        Self {
            dim: self.dim,
            re: self
                .re
                .iter()
                .map(|row| row.iter().map(r).collect())
                .collect(),
            im: self
                .im
                .iter()
                .map(|row| row.iter().map(r).collect())
                .collect(),
        }
    }
}

/// Extended reals on the wire: finite numbers as JSON numbers, `+∞` as `"inf"`.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad extended real {s:?}"))),
        }
    }
}
