//! Finite-dimensional *-algebras `⊕ᵢ M_{nᵢ}(ℂ)`.
//!
//! Elements are stored blockwise. The C*-seminorms of such an algebra are
//! exactly the `σ_F(x) = max_{i∈F} ‖xᵢ‖` for subsets `F` of blocks, and the
//! greatest of them, `γ`, is the C*-norm itself.

mod group;
mod wedderburn;

pub use group::{group_algebra, CayleyTable};
pub use wedderburn::{
    irreducible_dimensions, wedderburn_decompose, GeneratorPresentation, GeneratorsJson,
    WedderburnOptions, WedderburnResult,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{c, spectral_norm, CMatrix, MatrixJson, C64};
use crate::sampling;

/// `⊕ᵢ M_{nᵢ}(ℂ)` described by its block sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockAlgebra {
    #[serde(rename = "blocks")]
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::Invalid(format!(
                "block sizes must be a non-empty list of positive integers, got {block_dims:?}"
            )));
        }
        Ok(Self { block_dims })
    }

    /// The full matrix algebra `M_n(ℂ)`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Complex dimension `Σ nᵢ²`.
    pub fn dimension(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// Matrix units `E^{(i)}_{rs}`, block by block, row-major within a block.
    pub fn basis(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(self.dimension());
        for (i, &n) in self.block_dims.iter().enumerate() {
            for r in 0..n {
                for s in 0..n {
                    let mut e = AlgebraElement::zero(self);
                    e.blocks[i][(r, s)] = c(1.0);
                    out.push(e);
                }
            }
        }
        out
    }

    /// Restricts a validated JSON value; alias of [`BlockAlgebra::new`] for
    /// deserialized data.
    fn validate(self) -> Result<Self> {
        Self::new(self.block_dims)
    }
}

/// Element of a [`BlockAlgebra`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: BlockAlgebra,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn new(algebra: &BlockAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::AlgebraMismatch);
        }
        for (b, &n) in blocks.iter().zip(algebra.block_dims()) {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .block_dims()
                .iter()
                .map(|&n| CMatrix::zeros(n, n))
                .collect(),
        }
    }

    pub fn identity(algebra: &BlockAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .block_dims()
                .iter()
                .map(|&n| CMatrix::identity(n, n))
                .collect(),
        }
    }

    /// Element with i.i.d. complex Gaussian entries.
    pub fn random(algebra: &BlockAlgebra, rng: &mut impl Rng) -> Self {
        Self {
            algebra: algebra.clone(),
            blocks: algebra
                .block_dims()
                .iter()
                .map(|&n| sampling::ginibre(n, n, rng))
                .collect(),
        }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(x, y)| f(x, y))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn adjoint(&self) -> Self {
        self.map(|b| b.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|b| b * s)
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    /// Frobenius norm over all blocks.
    pub fn frobenius(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Operator norms of the blocks.
    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(spectral_norm).collect()
    }

    /// Coordinates in the matrix-unit basis of [`BlockAlgebra::basis`].
    pub fn coordinates(&self) -> Vec<C64> {
        self.blocks
            .iter()
            .flat_map(|b| {
                let n = b.nrows();
                (0..n).flat_map(move |r| (0..n).map(move |s| b[(r, s)]))
            })
            .collect()
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(MatrixJson::from_matrix).collect(),
        }
    }
}

/// `{"algebra": {"blocks": [...]}, "blocks": [Matrix, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub algebra: BlockAlgebra,
    pub blocks: Vec<MatrixJson>,
}

impl ElementJson {
    pub fn to_element(&self) -> Result<AlgebraElement> {
        let algebra = self.algebra.clone().validate()?;
        let blocks = self
            .blocks
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::new(&algebra, blocks)
    }
}

/// `σ_F(x) = max_{i∈F} ‖xᵢ‖`, zero for empty `F`. Block indices are 0-based.
pub fn seminorm_sigma_f(x: &AlgebraElement, blocks: &[usize]) -> Result<f64> {
    let k = x.algebra().num_blocks();
    let mut best = 0.0f64;
    for &i in blocks {
        if i >= k {
            return Err(Error::IndexOutOfRange { index: i, len: k });
        }
        best = best.max(spectral_norm(x.block(i)));
    }
    Ok(best)
}

/// Greatest C*-seminorm: the maximum block operator norm.
pub fn gamma_norm(x: &AlgebraElement) -> f64 {
    x.block_norms().into_iter().fold(0.0, f64::max)
}

/// `ℂ^d` with the zero multiplication and the identity involution.
///
/// Every C*-seminorm `σ` on it satisfies `σ(a)² = σ(a*a) = σ(0) = 0`, so the
/// greatest C*-seminorm vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroProductAlgebra {
    pub dim: usize,
}

impl ZeroProductAlgebra {
    pub fn mul(&self, _x: &[C64], _y: &[C64]) -> Vec<C64> {
        vec![c(0.0); self.dim]
    }

    pub fn gamma_norm(&self, _x: &[C64]) -> f64 {
        0.0
    }
}
