//! Unitary block-diagonalization of a matrix *-algebra given by generators.
//!
//! The algebra `A ⊆ M_n(ℂ)` generated by a self-adjoint family splits as
//! `ℂⁿ = N ⊕ ⊕_c (ℂ^{m_c} ⊗ ℂ^{d_c})`, where `N` is the common kernel, `A`
//! acts as `I_{m_c} ⊗ M_{d_c}` on the `c`-th isotypic component and the
//! commutant acts as `M_{m_c} ⊗ I_{d_c}`. The `d_c` are the dimensions of the
//! irreducible representations of `A` and the `m_c` their multiplicities.
//!
//! Procedure:
//! 1. span the algebra by products of generators and split off `N`;
//! 2. a random self-adjoint element of the center has one eigenvalue per
//!    isotypic component, its eigenspaces are the components;
//! 3. on each component a random self-adjoint element of the commutant has `m_c`
//!    eigenspaces of dimension `d_c`, one per copy of the irreducible block;
//! 4. a random commutant element compressed between two copies is a multiple of
//!    a unitary intertwiner; it aligns the bases so equivalent copies carry
//!    identical matrices.
//!
//! Randomness comes from a seeded generator; a failed split is retried with
//! fresh samples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{c, eigendecompose, CMatrix, HermitianMatrix, MatrixJson, C64};
use crate::sampling;

/// Adjoint-closed family of `ambient_dim × ambient_dim` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPresentation {
    ambient_dim: usize,
    generators: Vec<CMatrix>,
}

impl GeneratorPresentation {
    /// Appends the adjoint of every generator that is not already present.
    pub fn new(ambient_dim: usize, generators: Vec<CMatrix>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        if let Some(g) = generators
            .iter()
            .find(|g| g.nrows() != ambient_dim || g.ncols() != ambient_dim)
        {
            return Err(Error::DimensionMismatch(g.nrows(), ambient_dim));
        }
        let mut all = generators.clone();
        for g in &generators {
            let adj = g.adjoint();
            let scale = g.norm().max(1.0);
            if !all.iter().any(|h| (h - &adj).norm() <= 1e-12 * scale) {
                all.push(adj);
            }
        }
        Ok(Self {
            ambient_dim,
            generators: all,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn to_json(&self) -> GeneratorsJson {
        GeneratorsJson {
            ambient_dim: self.ambient_dim,
            generators: self
                .generators
                .iter()
                .map(MatrixJson::from_matrix)
                .collect(),
        }
    }
}

/// `{"ambient_dim": n, "generators": [Matrix, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorsJson {
    pub ambient_dim: usize,
    pub generators: Vec<MatrixJson>,
}

impl GeneratorsJson {
    pub fn to_presentation(&self) -> Result<GeneratorPresentation> {
        let gens = self
            .generators
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        GeneratorPresentation::new(self.ambient_dim, gens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedderburnOptions {
    /// Fresh random samples tried before giving up.
    pub max_retries: usize,
    /// Relative threshold below which a new product is linearly dependent.
    pub span_tol: f64,
    /// Relative singular-value threshold for null spaces.
    pub null_tol: f64,
    /// Relative eigenvalue gap separating two clusters.
    pub cluster_tol: f64,
}

impl Default for WedderburnOptions {
    fn default() -> Self {
        Self {
            max_retries: 8,
            span_tol: 1e-9,
            null_tol: 1e-7,
            cluster_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WedderburnResult {
    /// Columns: for each irreducible class (in `block_dims` order), each copy's
    /// basis, then the common kernel. `unitary* · G · unitary` is block diagonal.
    pub unitary: CMatrix,
    /// Dimension of each inequivalent irreducible representation, ascending.
    pub block_dims: Vec<usize>,
    /// Multiplicity of each irreducible representation in `ℂⁿ`.
    pub multiplicities: Vec<usize>,
    /// Largest off-block Frobenius mass (or copy mismatch) over all generators.
    pub residual: f64,
    /// Dimension of the common kernel of the generators.
    pub null_dim: usize,
}

impl WedderburnResult {
    /// Sizes of the diagonal blocks in column order (kernel last, if any).
    pub fn block_layout(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .block_dims
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&d, &m)| std::iter::repeat_n(d, m))
            .collect();
        if self.null_dim > 0 {
            out.push(self.null_dim);
        }
        out
    }

    /// Largest irreducible dimension; finite for every input here.
    pub fn max_irreducible_dim(&self) -> usize {
        self.block_dims.iter().copied().max().unwrap_or(0)
    }
}

/// The multiset of irreducible dimensions, one entry per inequivalent class.
pub fn irreducible_dimensions(result: &WedderburnResult) -> Vec<usize> {
    result.block_dims.clone()
}

/// Column-stacking vectorization.
fn vectorize(m: &CMatrix) -> Vec<C64> {
    m.iter().copied().collect()
}

/// Orthonormal basis (columns) of the null space of `m`; singular values below
/// `rel_tol · max(‖m‖, scale)` count as zero.
fn null_space(m: &CMatrix, rel_tol: f64, scale: f64) -> CMatrix {
    let gram = m.adjoint() * m;
    let eig = eigendecompose(&HermitianMatrix::from_computed(&gram));
    let top = eig
        .values
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(scale * scale);
    let cut = (rel_tol * rel_tol) * top.max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] <= cut)
        .collect();
    CMatrix::from_fn(m.ncols(), keep.len(), |r, j| eig.vectors[(r, keep[j])])
}

fn generator_scale(gens: &[CMatrix]) -> f64 {
    gens.iter().map(|g| g.norm()).fold(0.0, f64::max)
}

/// Frobenius-orthonormal basis of the (possibly non-unital) algebra generated.
fn algebra_span(gens: &[CMatrix], span_tol: f64) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    let mut queue: Vec<CMatrix> = Vec::new();
    let push = |x: CMatrix, basis: &mut Vec<CMatrix>, queue: &mut Vec<CMatrix>| {
        let norm0 = x.norm();
        if norm0 == 0.0 {
            return;
        }
        let mut y = x;
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&y);
                y -= b * proj;
            }
        }
        let norm = y.norm();
        if norm > span_tol * norm0 {
            y /= c(norm);
            basis.push(y.clone());
            queue.push(y);
        }
    };
    for g in gens {
        push(g.clone(), &mut basis, &mut queue);
    }
    while let Some(y) = queue.pop() {
        for g in gens {
            push(&y * g, &mut basis, &mut queue);
        }
    }
    basis
}

/// Groups sorted-descending eigenvalues into clusters of near-equal values.
fn clusters(values: &[f64], rel_tol: f64) -> Vec<Vec<usize>> {
    let spread = values
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(1e-300);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(last) if (values[*last.last().unwrap()] - v).abs() <= rel_tol * spread => {
                last.push(i)
            }
            _ => out.push(vec![i]),
        }
    }
    out
}

fn columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), idx.len(), |r, j| m[(r, idx[j])])
}

fn random_combination(basis: &[CMatrix], rng: &mut impl Rng) -> CMatrix {
    let n = basis[0].nrows();
    let mut acc = CMatrix::zeros(n, n);
    for b in basis {
        let w = C64::new(sampling::gaussian(rng), sampling::gaussian(rng));
        acc += b * w;
    }
    acc
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Commutant `{X : XG = GX for all G}` as a list of matrices.
fn commutant(gens: &[CMatrix], null_tol: f64) -> Vec<CMatrix> {
    let d = gens[0].nrows();
    let eye = CMatrix::identity(d, d);
    let mut rows = CMatrix::zeros(gens.len() * d * d, d * d);
    for (k, g) in gens.iter().enumerate() {
        // vec(XG - GX) = (Gᵀ ⊗ I - I ⊗ G) vec(X)
        let op = g.transpose().kronecker(&eye) - eye.kronecker(g);
        rows.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(&op);
    }
    let ns = null_space(&rows, null_tol, generator_scale(gens));
    (0..ns.ncols())
        .map(|j| CMatrix::from_column_slice(d, d, ns.column(j).as_slice()))
        .collect()
}

/// Basis of the center of the algebra spanned by `basis`.
fn center(basis: &[CMatrix], gens: &[CMatrix], null_tol: f64) -> Vec<CMatrix> {
    let d = gens[0].nrows();
    let mut system = CMatrix::zeros(gens.len() * d * d, basis.len());
    for (j, b) in basis.iter().enumerate() {
        let col: Vec<C64> = gens
            .iter()
            .flat_map(|g| vectorize(&(b * g - g * b)))
            .collect();
        system.column_mut(j).copy_from_slice(&col);
    }
    let ns = null_space(&system, null_tol, generator_scale(gens));
    (0..ns.ncols())
        .map(|j| {
            let mut z = CMatrix::zeros(d, d);
            for (l, b) in basis.iter().enumerate() {
                z += b * ns[(l, j)];
            }
            z
        })
        .collect()
}

struct Component {
    irrep_dim: usize,
    copies: Vec<CMatrix>,
}

/// Splits one isotypic component (given in its own coordinates) into aligned copies.
fn split_component(
    gens: &[CMatrix],
    opts: &WedderburnOptions,
    rng: &mut impl Rng,
) -> Option<Component> {
    let dim = gens[0].nrows();
    let comm = commutant(gens, opts.null_tol);
    let mult = (comm.len() as f64).sqrt().round() as usize;
    if mult == 0 || mult * mult != comm.len() || !dim.is_multiple_of(mult) {
        return None;
    }
    let irrep_dim = dim / mult;
    if mult == 1 {
        return Some(Component {
            irrep_dim,
            copies: vec![CMatrix::identity(dim, dim)],
        });
    }
    let h = hermitian_part(&random_combination(&comm, rng));
    let eig = eigendecompose(&HermitianMatrix::from_computed(&h));
    let groups = clusters(&eig.values, opts.cluster_tol);
    if groups.len() != mult || groups.iter().any(|g| g.len() != irrep_dim) {
        return None;
    }
    let spaces: Vec<CMatrix> = groups.iter().map(|g| columns(&eig.vectors, g)).collect();
    let first = spaces[0].clone();
    let mut copies = vec![first.clone()];
    let link = random_combination(&comm, rng);
    for w in &spaces[1..] {
        let t = w.adjoint() * &link * &first;
        let svd = t.svd(true, true);
        let sv = &svd.singular_values;
        let (lo, hi) = sv
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
        if hi == 0.0 || (hi - lo) > 1e-6 * hi {
            return None;
        }
        let polar = svd.u.unwrap() * svd.v_t.unwrap();
        copies.push(w * polar);
    }
    Some(Component { irrep_dim, copies })
}

/// Largest off-block Frobenius mass and copy mismatch of `u* G u` under `layout`.
fn certify(
    gens: &[CMatrix],
    u: &CMatrix,
    block_dims: &[usize],
    multiplicities: &[usize],
    null_dim: usize,
) -> f64 {
    let mut starts = Vec::new();
    let mut sizes = Vec::new();
    let mut offset = 0;
    for (&d, &m) in block_dims.iter().zip(multiplicities) {
        for _ in 0..m {
            starts.push(offset);
            sizes.push(d);
            offset += d;
        }
    }
    if null_dim > 0 {
        starts.push(offset);
        sizes.push(null_dim);
    }
    let mut owner = Vec::new();
    for (b, &s) in sizes.iter().enumerate() {
        owner.extend(std::iter::repeat_n(b, s));
    }
    let mut worst = 0.0f64;
    for g in gens {
        let conj = u.adjoint() * g * u;
        let scale = g.norm().max(1.0);
        let mut off = 0.0;
        for i in 0..conj.nrows() {
            for j in 0..conj.ncols() {
                if owner[i] != owner[j] {
                    off += conj[(i, j)].norm_sqr();
                }
            }
        }
        worst = worst.max(off.sqrt() / scale);
        // equivalent copies must carry the same matrix
        let mut b = 0;
        for (&d, &m) in block_dims.iter().zip(multiplicities) {
            let s0 = starts[b];
            let first = conj.view((s0, s0), (d, d)).into_owned();
            for k in 1..m {
                let sk = starts[b + k];
                let other = conj.view((sk, sk), (d, d));
                worst = worst.max((other - &first).norm() / scale);
            }
            b += m;
        }
    }
    worst
}

fn attempt(
    gens: &[CMatrix],
    range: &CMatrix,
    basis: &[CMatrix],
    opts: &WedderburnOptions,
    rng: &mut impl Rng,
) -> Option<(Vec<usize>, Vec<usize>, CMatrix)> {
    let r = range.ncols();
    let local_gens: Vec<CMatrix> = gens.iter().map(|g| range.adjoint() * g * range).collect();
    let local_basis: Vec<CMatrix> = basis.iter().map(|b| range.adjoint() * b * range).collect();
    let cent = center(&local_basis, &local_gens, opts.null_tol);
    if cent.is_empty() {
        return None;
    }
    let z = hermitian_part(&random_combination(&cent, rng));
    let eig = eigendecompose(&HermitianMatrix::from_computed(&z));
    let groups = clusters(&eig.values, opts.cluster_tol);
    if groups.len() != cent.len() {
        return None;
    }
    let mut comps: Vec<(Component, CMatrix)> = Vec::new();
    for g in &groups {
        let v = columns(&eig.vectors, g);
        let restricted: Vec<CMatrix> = local_gens.iter().map(|x| v.adjoint() * x * &v).collect();
        let comp = split_component(&restricted, opts, rng)?;
        comps.push((comp, v));
    }
    comps.sort_by_key(|(comp, _)| comp.irrep_dim);
    let mut cols: Vec<CMatrix> = Vec::new();
    let mut dims = Vec::new();
    let mut mults = Vec::new();
    for (comp, v) in &comps {
        dims.push(comp.irrep_dim);
        mults.push(comp.copies.len());
        for copy in &comp.copies {
            cols.push(range * v * copy);
        }
    }
    let n = range.nrows();
    let mut u = CMatrix::zeros(n, r);
    let mut at = 0;
    for block in cols {
        u.view_mut((0, at), (n, block.ncols())).copy_from(&block);
        at += block.ncols();
    }
    Some((dims, mults, u))
}

/// Block-diagonalizes the *-algebra generated by `presentation`.
pub fn wedderburn_decompose(
    presentation: &GeneratorPresentation,
    seed: u64,
    opts: &WedderburnOptions,
) -> Result<WedderburnResult> {
    let n = presentation.ambient_dim();
    let gens = presentation.generators();
    let mut rng = sampling::rng(seed);

    // common kernel: null space of Σ G*G
    let mut gram = CMatrix::zeros(n, n);
    for g in gens {
        gram += g.adjoint() * g;
    }
    let eig = eigendecompose(&HermitianMatrix::from_computed(&gram));
    let top = eig.values.first().copied().unwrap_or(0.0);
    let r = eig
        .values
        .iter()
        .filter(|&&v| v > opts.null_tol * opts.null_tol * top && v > 0.0)
        .count();
    let range = eig.vectors.columns(0, r).into_owned();
    let kernel = eig.vectors.columns(r, n - r).into_owned();
    let null_dim = n - r;

    if r == 0 {
        return Ok(WedderburnResult {
            unitary: kernel,
            block_dims: vec![],
            multiplicities: vec![],
            residual: 0.0,
            null_dim,
        });
    }

    let basis = algebra_span(gens, opts.span_tol);
    for _ in 0..opts.max_retries.max(1) {
        let Some((block_dims, multiplicities, u_range)) =
            attempt(gens, &range, &basis, opts, &mut rng)
        else {
            continue;
        };
        let mut unitary = CMatrix::zeros(n, n);
        unitary.view_mut((0, 0), (n, r)).copy_from(&u_range);
        unitary.view_mut((0, r), (n, null_dim)).copy_from(&kernel);
        let residual = certify(gens, &unitary, &block_dims, &multiplicities, null_dim);
        return Ok(WedderburnResult {
            unitary,
            block_dims,
            multiplicities,
            residual,
            null_dim,
        });
    }
    Err(Error::NoConvergence(format!(
        "random self-adjoint samples failed to split the algebra after {} tries; reseed",
        opts.max_retries
    )))
}
