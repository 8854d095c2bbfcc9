//! Positive functionals on block algebras.
//!
//! On `⊕ᵢ M_{nᵢ}(ℂ)` every positive functional is `f(a) = Σᵢ tr(Dᵢ aᵢ)` for a
//! unique blockwise-PSD density `D`, so functionals are stored as densities.
//! Order, absolute continuity and singularity become statements about the
//! density blocks:
//!
//! * `f ≤ g` iff `D_g − D_f` is PSD;
//! * `f ≪ g` iff `range(D_f) ⊆ range(D_g)` (left kernels `L_g ⊆ L_f`);
//! * `f ⊥ g` iff the parallel sum `D_f : D_g` vanishes.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numkernel::{
    c, loewner_leq, max_generalized_eig, range_contained, support_projection, CMatrix, MatrixJson,
    PsdOperator, C64,
};
use crate::opdecomp::parallel_sum;
use crate::sampling;
use crate::staralg::{AlgebraElement, BlockAlgebra, ElementJson, ZeroProductAlgebra};

/// `f(a) = Σᵢ tr(Dᵢ aᵢ)` with every `Dᵢ` PSD.
#[derive(Debug, Clone)]
pub struct PositiveFunctional {
    algebra: BlockAlgebra,
    density: Vec<PsdOperator>,
}

impl PositiveFunctional {
    pub fn new(density: &AlgebraElement, tol: &Tolerances) -> Result<Self> {
        let blocks = density
            .blocks()
            .iter()
            .map(|b| PsdOperator::from_matrix(b.clone(), tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            algebra: density.algebra().clone(),
            density: blocks,
        })
    }

    pub fn from_blocks(algebra: &BlockAlgebra, density: Vec<PsdOperator>) -> Result<Self> {
        if density.len() != algebra.num_blocks()
            || density
                .iter()
                .zip(algebra.block_dims())
                .any(|(d, &n)| d.dim() != n)
        {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self {
            algebra: algebra.clone(),
            density,
        })
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            density: algebra
                .block_dims()
                .iter()
                .map(|&n| PsdOperator::zero(n))
                .collect(),
        }
    }

    /// Random functional; each block gets a random rank in `0..=nᵢ`.
    pub fn random(algebra: &BlockAlgebra, rng: &mut impl Rng, tol: &Tolerances) -> Self {
        let density = algebra
            .block_dims()
            .iter()
            .map(|&n| {
                PsdOperator::from_computed(&sampling::psd_any_rank(n, rng), tol)
                    .expect("Gram matrices are PSD")
            })
            .collect();
        Self {
            algebra: algebra.clone(),
            density,
        }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn densities(&self) -> &[PsdOperator] {
        &self.density
    }

    pub fn density(&self) -> AlgebraElement {
        AlgebraElement::new(
            &self.algebra,
            self.density.iter().map(|d| d.matrix().clone()).collect(),
        )
        .expect("density shapes match the algebra")
    }

    /// `‖f‖ = f(1) = Σ tr Dᵢ`.
    pub fn norm(&self) -> f64 {
        self.density.iter().map(PsdOperator::trace).sum()
    }

    /// Largest block operator norm of the density.
    pub fn density_norm(&self) -> f64 {
        self.density
            .iter()
            .map(PsdOperator::norm)
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.density.iter().all(PsdOperator::is_zero)
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_algebra(other)?;
        let density = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| a.add(b, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(&self.algebra, density)
    }

    pub fn scale(&self, s: f64, tol: &Tolerances) -> Self {
        Self {
            algebra: self.algebra.clone(),
            density: self.density.iter().map(|d| d.scale(s, tol)).collect(),
        }
    }

    pub fn to_json(&self) -> FunctionalJson {
        FunctionalJson {
            algebra: self.algebra.clone(),
            density: self.density().to_json(),
        }
    }
}

/// `{"algebra": {"blocks": [...]}, "density": Element}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub algebra: BlockAlgebra,
    pub density: ElementJson,
}

impl FunctionalJson {
    pub fn to_functional(&self, tol: &Tolerances) -> Result<PositiveFunctional> {
        let density = self.density.to_element()?;
        if density.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        PositiveFunctional::new(&density, tol)
    }
}

/// `f(a) = Σᵢ tr(Dᵢ aᵢ)`.
pub fn evaluate(f: &PositiveFunctional, a: &AlgebraElement) -> Result<C64> {
    if f.algebra() != a.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(f.density
        .iter()
        .zip(a.blocks())
        .map(|(d, x)| (d.matrix() * x).trace())
        .sum())
}

/// `f ≤ g`: every block of `D_g − D_f` is PSD within tolerance.
pub fn order_leq(f: &PositiveFunctional, g: &PositiveFunctional, tol: &Tolerances) -> Result<bool> {
    f.same_algebra(g)?;
    Ok(f.density
        .iter()
        .zip(&g.density)
        .all(|(a, b)| loewner_leq(a.matrix(), b.matrix(), tol)))
}

/// Blockwise support projection `s(f)`.
pub fn support(f: &PositiveFunctional) -> AlgebraElement {
    AlgebraElement::new(
        f.algebra(),
        f.density
            .iter()
            .map(|d| support_projection(d).matrix().clone())
            .collect(),
    )
    .expect("support blocks match the algebra")
}

/// Basis of the left kernel `L_f = {a : f(a*a) = 0} = {a : a·s(f) = 0}`.
pub fn left_kernel_basis(f: &PositiveFunctional) -> Vec<AlgebraElement> {
    let mut out = Vec::new();
    for (i, d) in f.density.iter().enumerate() {
        let n = d.dim();
        let kernel = d.kernel_basis();
        for r in 0..n {
            for k in 0..kernel.ncols() {
                let mut block = CMatrix::zeros(n, n);
                for s in 0..n {
                    block[(r, s)] = kernel[(s, k)].conj();
                }
                out.push(replace_block(&AlgebraElement::zero(f.algebra()), i, block));
            }
        }
    }
    out
}

fn replace_block(a: &AlgebraElement, i: usize, block: CMatrix) -> AlgebraElement {
    let mut blocks = a.blocks().to_vec();
    blocks[i] = block;
    AlgebraElement::new(a.algebra(), blocks).expect("block shape preserved")
}

/// `f ≪ g`, decided by support containment blockwise.
pub fn abs_continuous(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    tol: &Tolerances,
) -> Result<bool> {
    f.same_algebra(g)?;
    for (a, b) in f.density.iter().zip(&g.density) {
        if !range_contained(a, b, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `L_g ⊆ L_f`, tested on a basis of `L_g`: `f(a*a) ≈ 0` for each basis element.
pub fn left_kernel_contained(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    tol: &Tolerances,
) -> Result<bool> {
    f.same_algebra(g)?;
    let scale = f.density_norm().max(1.0);
    for a in left_kernel_basis(g) {
        let value = evaluate(f, &a.adjoint().mul(&a)?)?;
        if value.re > tol.subspace * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An explicit increasing sequence `f_n ↑ f` with `f_n ≤ α_n g`.
#[derive(Debug, Clone)]
pub struct AcWitness {
    pub functionals: Vec<PositiveFunctional>,
    pub alphas: Vec<f64>,
}

/// Constant witness `f_n = f`, `α_n = min{α : f ≤ α g}`, each step verified.
pub fn ac_witness(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    len: usize,
    tol: &Tolerances,
) -> Result<AcWitness> {
    if !abs_continuous(f, g, tol)? {
        return Err(Error::NotAbsolutelyContinuous);
    }
    let alpha = domination_constant(f, g, tol)?;
    if !alpha.is_finite() {
        return Err(Error::NotAbsolutelyContinuous);
    }
    let bound = g.scale(alpha, tol);
    if !order_leq(f, &bound, tol)? {
        return Err(Error::NotAbsolutelyContinuous);
    }
    Ok(AcWitness {
        functionals: vec![f.clone(); len.max(1)],
        alphas: vec![alpha; len.max(1)],
    })
}

/// `min{α ≥ 0 : f ≤ α g}` (maximum over blocks), `+∞` if none.
pub fn domination_constant(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    tol: &Tolerances,
) -> Result<f64> {
    f.same_algebra(g)?;
    let mut alpha = 0.0f64;
    for (a, b) in f.density.iter().zip(&g.density) {
        alpha = alpha.max(max_generalized_eig(a, b, tol)?);
    }
    Ok(alpha)
}

/// `f ⊥ g`: every block of `D_f : D_g` is negligible against the larger density.
pub fn singular(f: &PositiveFunctional, g: &PositiveFunctional, tol: &Tolerances) -> Result<bool> {
    f.same_algebra(g)?;
    let scale = f.density_norm().max(g.density_norm()).max(1.0);
    for (a, b) in f.density.iter().zip(&g.density) {
        if parallel_sum(a, b, tol)?.norm() > tol.singular * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cyclic representation `(π, ξ)` with `f(a) = ⟨π(a)ξ, ξ⟩`.
#[derive(Debug, Clone)]
pub struct GnsData {
    /// `π(e)` for each matrix unit `e` of [`BlockAlgebra::basis`].
    pub representation: Vec<CMatrix>,
    pub cyclic_vector: DVector<C64>,
    pub kernel_basis: Vec<AlgebraElement>,
    pub quotient_dim: usize,
}

impl GnsData {
    /// `π(a)` by linearity over the matrix-unit basis.
    pub fn pi(&self, a: &AlgebraElement) -> CMatrix {
        let d = self.quotient_dim;
        let mut out = CMatrix::zeros(d, d);
        for (coord, rep) in a.coordinates().iter().zip(&self.representation) {
            if coord.norm() != 0.0 {
                out += rep * *coord;
            }
        }
        out
    }

    /// Checks the homomorphism, *-preservation, reconstruction and cyclicity.
    pub fn check(&self, f: &PositiveFunctional) -> GnsReport {
        let basis = f.algebra().basis();
        let mut hom = 0.0f64;
        let mut star = 0.0f64;
        let mut recon = 0.0f64;
        for (x, px) in basis.iter().zip(&self.representation) {
            star = star.max((self.pi(&x.adjoint()) - px.adjoint()).norm());
            let value = evaluate(f, x).expect("same algebra");
            let inner = (px * &self.cyclic_vector).dotc(&self.cyclic_vector);
            recon = recon.max((value - inner.conj()).norm().min((value - inner).norm()));
            for (y, py) in basis.iter().zip(&self.representation) {
                let xy = x.mul(y).expect("same algebra");
                hom = hom.max((self.pi(&xy) - px * py).norm());
            }
        }
        let d = self.quotient_dim;
        let mut orbit = CMatrix::zeros(d, basis.len());
        for (j, p) in self.representation.iter().enumerate() {
            orbit.set_column(j, &(p * &self.cyclic_vector));
        }
        let orbit_rank = if d == 0 {
            0
        } else {
            orbit
                .svd(false, false)
                .singular_values
                .iter()
                .filter(|&&s| s > 1e-8)
                .count()
        };
        GnsReport {
            homomorphism_error: hom,
            adjoint_error: star,
            reconstruction_error: recon,
            cyclic: orbit_rank == d,
        }
    }

    pub fn to_json(&self) -> GnsJson {
        GnsJson {
            quotient_dim: self.quotient_dim,
            kernel_dim: self.kernel_basis.len(),
            cyclic_vector: VectorJson {
                re: self.cyclic_vector.iter().map(|z| z.re).collect(),
                im: self.cyclic_vector.iter().map(|z| z.im).collect(),
            },
            representation: self
                .representation
                .iter()
                .map(MatrixJson::from_matrix)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnsReport {
    pub homomorphism_error: f64,
    pub adjoint_error: f64,
    pub reconstruction_error: f64,
    pub cyclic: bool,
}

impl GnsReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.cyclic
            && self.homomorphism_error <= tol
            && self.adjoint_error <= tol
            && self.reconstruction_error <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsJson {
    pub quotient_dim: usize,
    pub kernel_dim: usize,
    pub cyclic_vector: VectorJson,
    pub representation: Vec<MatrixJson>,
}

/// GNS construction on `A / L_f` with `⟨a, b⟩ = f(b*a)`.
///
/// The matrix units are orthonormalized by modified Gram–Schmidt (two passes);
/// vectors whose squared norm falls below `tol.gram_schmidt · ‖D_f‖` lie in
/// `L_f` and are dropped.
pub fn gns(f: &PositiveFunctional, tol: &Tolerances) -> Result<GnsData> {
    if f.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    let basis = f.algebra().basis();
    let m = basis.len();
    // gram[(j, k)] = <e_k, e_j> = f(e_j* e_k)
    let mut gram = CMatrix::zeros(m, m);
    for j in 0..m {
        let ej_star = basis[j].adjoint();
        for k in 0..m {
            gram[(j, k)] = evaluate(f, &ej_star.mul(&basis[k])?)?;
        }
    }
    let inner = |x: &DVector<C64>, y: &DVector<C64>| -> C64 { (y.adjoint() * &gram * x)[(0, 0)] };
    let drop_below = tol.gram_schmidt * f.density_norm();
    let mut ortho: Vec<DVector<C64>> = Vec::new();
    for k in 0..m {
        let mut v = DVector::from_fn(m, |i, _| if i == k { c(1.0) } else { c(0.0) });
        for _ in 0..2 {
            for u in &ortho {
                let proj = inner(&v, u);
                v -= u * proj;
            }
        }
        let norm_sq = inner(&v, &v).re;
        if norm_sq > drop_below {
            ortho.push(v / c(norm_sq.sqrt()));
        }
    }
    let d = ortho.len();
    // coefficient vectors -> algebra elements
    let elements: Vec<AlgebraElement> = ortho
        .iter()
        .map(|v| {
            basis
                .iter()
                .zip(v.iter())
                .fold(AlgebraElement::zero(f.algebra()), |acc, (e, &w)| {
                    acc.add(&e.scale(w)).expect("same algebra")
                })
        })
        .collect();
    let adjoints: Vec<AlgebraElement> = elements.iter().map(AlgebraElement::adjoint).collect();
    let mut representation = Vec::with_capacity(m);
    for e in &basis {
        let mut p = CMatrix::zeros(d, d);
        for (mcol, um) in elements.iter().enumerate() {
            let aum = e.mul(um)?;
            for (l, ul_star) in adjoints.iter().enumerate() {
                p[(l, mcol)] = evaluate(f, &ul_star.mul(&aum)?)?;
            }
        }
        representation.push(p);
    }
    let cyclic_vector = DVector::from_iterator(
        d,
        adjoints
            .iter()
            .map(|u| evaluate(f, u).expect("same algebra")),
    );
    Ok(GnsData {
        representation,
        cyclic_vector,
        kernel_basis: left_kernel_basis(f),
        quotient_dim: d,
    })
}

/// Hereditary corner `eAe` of a block algebra, with orthonormal bases of the
/// ranges of the projection blocks `eᵢ`.
#[derive(Debug, Clone)]
pub struct Corner {
    projection: AlgebraElement,
    bases: Vec<CMatrix>,
}

impl Corner {
    pub fn new(e: &AlgebraElement, tol: &Tolerances) -> Result<Self> {
        let mut bases = Vec::new();
        for b in e.blocks() {
            let n = b.nrows();
            let defect = (b * b - b).norm().max((b - b.adjoint()).norm());
            if defect > 1e-10 {
                return Err(Error::NotAProjection(defect));
            }
            let p = PsdOperator::from_matrix(b.clone(), tol)
                .map_err(|_| Error::NotAProjection(defect))?;
            let q = p.range_basis();
            debug_assert_eq!(q.nrows(), n);
            bases.push(q);
        }
        Ok(Self {
            projection: e.clone(),
            bases,
        })
    }

    pub fn projection(&self) -> &AlgebraElement {
        &self.projection
    }

    /// Ranks of the projection blocks: `eAe ≅ ⊕ M_{rᵢ}`.
    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(|q| q.ncols()).collect()
    }

    /// `e x e` in corner coordinates `Qᵢ* xᵢ Qᵢ`.
    pub fn compress(&self, x: &AlgebraElement) -> Result<Vec<CMatrix>> {
        if x.algebra() != self.projection.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self
            .bases
            .iter()
            .zip(x.blocks())
            .map(|(q, b)| q.adjoint() * b * q)
            .collect())
    }

    /// Embeds corner coordinates back into `A`.
    pub fn embed(&self, blocks: &[CMatrix]) -> AlgebraElement {
        AlgebraElement::new(
            self.projection.algebra(),
            self.bases
                .iter()
                .zip(blocks)
                .map(|(q, b)| q * b * q.adjoint())
                .collect(),
        )
        .expect("corner embeds into its algebra")
    }
}

/// Positive functional on a corner `eAe`, stored as a density in corner coordinates.
#[derive(Debug, Clone)]
pub struct CornerFunctional {
    pub corner: Corner,
    pub density: Vec<PsdOperator>,
}

impl CornerFunctional {
    pub fn new(corner: &Corner, density: Vec<PsdOperator>) -> Result<Self> {
        if density.len() != corner.bases.len()
            || density
                .iter()
                .zip(corner.ranks())
                .any(|(d, r)| d.dim() != r)
        {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self {
            corner: corner.clone(),
            density,
        })
    }

    /// Value on a corner element given in corner coordinates.
    pub fn evaluate_compressed(&self, blocks: &[CMatrix]) -> C64 {
        self.density
            .iter()
            .zip(blocks)
            .map(|(d, x)| (d.matrix() * x).trace())
            .sum()
    }

    /// `f(e)`, the norm of the corner functional.
    pub fn norm(&self) -> f64 {
        self.density.iter().map(PsdOperator::trace).sum()
    }

    pub fn order_leq(&self, other: &CornerFunctional, tol: &Tolerances) -> bool {
        self.density
            .iter()
            .zip(&other.density)
            .all(|(a, b)| loewner_leq(a.matrix(), b.matrix(), tol))
    }

    pub fn abs_continuous(&self, other: &CornerFunctional, tol: &Tolerances) -> Result<bool> {
        for (a, b) in self.density.iter().zip(&other.density) {
            if !range_contained(a, b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Restriction `f|_{eAe}`.
pub fn restrict_to_corner(
    f: &PositiveFunctional,
    corner: &Corner,
    tol: &Tolerances,
) -> Result<CornerFunctional> {
    let compressed = corner.compress(&f.density())?;
    let density = compressed
        .iter()
        .map(|b| {
            if b.nrows() == 0 {
                Ok(PsdOperator::zero(0))
            } else {
                PsdOperator::from_computed_with_scale(b, f.density_norm(), tol)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CornerFunctional::new(corner, density)
}

/// Norm-preserving extension `f̃(x) = f_corner(e x e)`.
pub fn corner_extension(f: &CornerFunctional, tol: &Tolerances) -> Result<PositiveFunctional> {
    let blocks: Vec<CMatrix> = f.density.iter().map(|d| d.matrix().clone()).collect();
    let density = f.corner.embed(&blocks);
    let scale = f.density.iter().map(PsdOperator::norm).fold(0.0, f64::max);
    let ops = density
        .blocks()
        .iter()
        .map(|b| PsdOperator::from_computed_with_scale(b, scale, tol))
        .collect::<Result<Vec<_>>>()?;
    PositiveFunctional::from_blocks(density.algebra(), ops)
}

/// Blocks carrying a non-zero part of the density.
fn occupied_blocks(f: &PositiveFunctional) -> Vec<usize> {
    (0..f.density.len())
        .filter(|&i| !f.density[i].is_zero())
        .collect()
}

/// Smallest `K` with `|f(a)| ≤ K σ_F(a)` for all `a`, if any: the summed trace
/// norms of the density blocks, provided `f` lives on the blocks in `F`.
pub fn representability_bound(f: &PositiveFunctional, blocks: &[usize]) -> Option<f64> {
    let occupied = occupied_blocks(f);
    if occupied.iter().all(|i| blocks.contains(i)) {
        Some(occupied.iter().map(|&i| f.density[i].trace()).sum())
    } else {
        None
    }
}

/// `f` is continuous with respect to some `σ_F` in the family.
pub fn representable(f: &PositiveFunctional, family: &[Vec<usize>]) -> bool {
    if f.is_zero() {
        return true;
    }
    family
        .iter()
        .any(|blocks| representability_bound(f, blocks).is_some())
}

/// Representability of a linear functional `φ` (coordinates in the standard
/// basis) on a zero-multiplication algebra: some finite `K` must satisfy
/// `|φ(eⱼ)| ≤ K γ(eⱼ)` on every basis vector.
pub fn representable_zero_product(algebra: &ZeroProductAlgebra, phi: &[C64]) -> bool {
    (0..algebra.dim).all(|j| {
        let mut e = vec![c(0.0); algebra.dim];
        e[j] = c(1.0);
        algebra.gamma_norm(&e) > 0.0 || phi.get(j).is_none_or(|v| v.norm() == 0.0)
    })
}
