//! Seeded random matrices for property checks, examples and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkernel::{c, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(gaussian(rng), gaussian(rng)) * c(std::f64::consts::FRAC_1_SQRT_2)
    })
}

/// Random Hermitian matrix.
pub fn hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()) * c(0.5)
}

/// Random PSD matrix `G G* / n` of the given rank.
pub fn psd(n: usize, rank: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(n, rank, rng);
    let m = &g * g.adjoint() * c(1.0 / n.max(1) as f64);
    (&m + m.adjoint()) * c(0.5)
}

/// Random PSD matrix with rank drawn uniformly from `0..=n`.
pub fn psd_any_rank(n: usize, rng: &mut impl Rng) -> CMatrix {
    let rank = rng.random_range(0..=n);
    psd(n, rank, rng)
}

/// Haar-ish random unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}
