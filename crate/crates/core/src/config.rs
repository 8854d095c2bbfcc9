use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the toolkit.
///
/// Passed explicitly to each operation that needs it; there is no global state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative rank cutoff factor. `None` means `dim * f64::EPSILON`.
    /// An eigenvalue counts toward the rank iff it exceeds `factor * max_eigenvalue`.
    pub rank_rel: Option<f64>,
    /// Rank floor for operators produced by arithmetic, applied only when
    /// `rank_rel` is `None`. Rounding noise in computed products sits well above
    /// `dim * f64::EPSILON`.
    pub noise_rel: f64,
    /// Absolute Hermitian-symmetry tolerance on entries.
    pub hermitian_abs: f64,
    /// Most negative eigenvalue (relative to the spectral radius) still accepted as PSD.
    pub psd_neg_rel: f64,
    /// Relative threshold for `A:B ≈ 0`.
    pub singular: f64,
    /// Relative residual bound for `regular + singular = A`.
    pub residual: f64,
    /// Relative slack used by PSD-order tests.
    pub order_rel: f64,
    /// Subspace containment threshold (Frobenius norm of `(I - Q) P`).
    pub subspace: f64,
    /// Stopping threshold for the iterative parallel-sum limit.
    pub iter_stop: f64,
    /// Accepted step at the rounding-noise floor when `iter_stop` is unreachable.
    pub iter_plateau: f64,
    /// Iterative schedule runs n = 1, 2, 4, ..., 2^iter_max_exp.
    pub iter_max_exp: u32,
    /// Gram-Schmidt drop threshold (relative).
    pub gram_schmidt: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: None,
            noise_rel: 1e-10,
            hermitian_abs: 1e-12,
            psd_neg_rel: 1e-9,
            singular: 1e-9,
            residual: 1e-8,
            order_rel: 1e-9,
            subspace: 1e-6,
            iter_stop: 1e-10,
            iter_plateau: 1e-8,
            iter_max_exp: 40,
            gram_schmidt: 1e-12,
        }
    }
}

impl Tolerances {
    /// Rank cutoff factor for a matrix of dimension `dim`.
    pub fn rank_factor(&self, dim: usize) -> f64 {
        self.rank_rel.unwrap_or(dim.max(1) as f64 * f64::EPSILON)
    }

    /// Rank cutoff factor for a computed (not user-supplied) matrix.
    pub fn computed_rank_factor(&self, dim: usize) -> f64 {
        self.rank_rel
            .unwrap_or((dim.max(1) as f64 * f64::EPSILON).max(self.noise_rel))
    }

    pub fn with_rank_rel(mut self, tau: f64) -> Self {
        self.rank_rel = Some(tau);
        self
    }

    pub fn with_singular(mut self, tol: f64) -> Self {
        self.singular = tol;
        self
    }
}
