//! Truncated non-uniqueness laboratory on `M_N(ℂ)`.
//!
//! With `ξ = Σ_{k≤N} 2^{-k} e_k` the three functionals are
//!
//! * `f` with density `diag(2^{-1}, …, 2^{-N})`,
//! * `g` with density `diag(10^{-1}, …, 10^{-N})`,
//! * `p(a) = ⟨aξ, ξ⟩`.
//!
//! In the infinite limit `p ≤ f ≪ g` while `p ⊥ g`, so `f + p` has more than
//! one Lebesgue decomposition. At every finite `N` the decomposition is unique,
//! and the lab charts how the certificates degenerate: `α_min(f, g) = 5^N`
//! explodes and the largest `λ` with `λp ≤ g` collapses to 0.
//!
//! The witnesses `aₙ = |ξ⟩⟨ξ′ₙ| / ‖ξ′ₙ‖²`, `ξ′ₙ = Σ_{k>n} 2^{-k} e_k`, satisfy
//! `aₙ e_k = 0` for `k ≤ n` and `aₙ ξ = ξ`, so `p(aₙ*aₙ) = ‖ξ‖²` while
//! `g(aₙ*aₙ)` decays like `(2/5)ⁿ`.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::functionals::{evaluate, PositiveFunctional};
use crate::numkernel::{c, diag_matrix, max_generalized_eig, spectral_norm, CMatrix, CVector};
use crate::staralg::{AlgebraElement, BlockAlgebra};

/// Beyond this level the weights `10^{-N}` approach the bottom of the double range
/// once squared inside products.
pub const MAX_LEVEL: usize = 40;
/// Slack allowed on every inequality of the bound report.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct TruncationLab {
    pub level: usize,
    pub xi: CVector,
    /// `ξ′ₙ` for `n = 1..N−1` (index `n − 1`).
    pub xi_prime: Vec<CVector>,
    pub f: PositiveFunctional,
    pub g: PositiveFunctional,
    pub p: PositiveFunctional,
    /// `aₙ` for `n = 1..N−1` (index `n − 1`).
    pub witnesses: Vec<AlgebraElement>,
    pub tolerances: Tolerances,
}

/// Tolerances for level `N`: the densities are exactly diagonal with full
/// support down to `10^{-N}`, so the rank cutoff must sit far below that, and
/// singularity is judged against the smallest weight.
pub fn lab_tolerances(level: usize) -> Tolerances {
    let floor = 10f64.powi(-(level as i32));
    Tolerances::default()
        .with_rank_rel(1e-300)
        .with_singular(1e-6 * floor)
}

fn weights(level: usize, base: f64) -> Vec<f64> {
    (1..=level).map(|k| base.powi(-(k as i32))).collect()
}

fn tail(level: usize, n: usize) -> CVector {
    CVector::from_fn(level, |i, _| {
        if i >= n {
            c(2f64.powi(-(i as i32 + 1)))
        } else {
            c(0.0)
        }
    })
}

impl TruncationLab {
    pub fn build(level: usize) -> Result<Self> {
        if level < 2 {
            return Err(Error::InvalidLevel(level));
        }
        if level > MAX_LEVEL {
            return Err(Error::UnderflowRisk(level));
        }
        let tol = lab_tolerances(level);
        let alg = BlockAlgebra::full(level)?;
        let functional = |m: CMatrix| -> Result<PositiveFunctional> {
            PositiveFunctional::new(&AlgebraElement::new(&alg, vec![m])?, &tol)
        };
        let xi = tail(level, 0);
        let f = functional(diag_matrix(&weights(level, 2.0)))?;
        let g = functional(diag_matrix(&weights(level, 10.0)))?;
        let p = functional(&xi * xi.adjoint())?;
        let xi_prime: Vec<CVector> = (1..level).map(|n| tail(level, n)).collect();
        let witnesses = xi_prime
            .iter()
            .map(|xp| {
                let a = &xi * xp.adjoint() / c(xp.norm_squared());
                AlgebraElement::new(&alg, vec![a])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            level,
            xi,
            xi_prime,
            f,
            g,
            p,
            witnesses,
            tolerances: tol,
        })
    }

    /// `f + p`, the functional whose decomposition becomes non-unique in the limit.
    pub fn h(&self) -> Result<PositiveFunctional> {
        self.f.add(&self.p, &self.tolerances)
    }

    /// `max{λ : λp ≤ g} = 1 / (ξ* D_g⁻¹ ξ)`.
    pub fn lambda_max(&self) -> Result<f64> {
        let beta = max_generalized_eig(
            &self.p.densities()[0],
            &self.g.densities()[0],
            &self.tolerances,
        )?;
        Ok(1.0 / beta)
    }

    /// `min{α : f ≤ αg}`; equals `5^N`.
    pub fn alpha_min(&self) -> Result<f64> {
        max_generalized_eig(
            &self.f.densities()[0],
            &self.g.densities()[0],
            &self.tolerances,
        )
    }
}

/// `aₙ` for `1 ≤ n ≤ N − 1`.
pub fn witness_operator(lab: &TruncationLab, n: usize) -> Result<AlgebraElement> {
    if n == 0 || n >= lab.level {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: lab.level - 1,
        });
    }
    Ok(lab.witnesses[n - 1].clone())
}

/// `(2/9)(2/5)ⁿ(n+1)`.
pub fn g_bound(n: usize) -> f64 {
    2.0 / 9.0 * 0.4f64.powi(n as i32) * (n + 1) as f64
}

/// `(2/3)(2/5)ⁿ(n+1)`.
pub fn lambda_bound(n: usize) -> f64 {
    2.0 / 3.0 * 0.4f64.powi(n as i32) * (n + 1) as f64
}

/// `2ⁿ √(2(n+1))`.
pub fn norm_bound(n: usize) -> f64 {
    2f64.powi(n as i32) * (2.0 * (n + 1) as f64).sqrt()
}

/// `‖ξ‖² = (1/3)(1 − 4^{-N})`.
pub fn xi_norm_sq(level: usize) -> f64 {
    (1.0 - 4f64.powi(-(level as i32))) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    #[serde(rename = "N")]
    pub level: usize,
    pub n: usize,
    pub p_an: f64,
    pub g_an: f64,
    pub paper_bound: f64,
    pub lambda_max: f64,
    pub alpha_min: f64,
    #[serde(skip)]
    pub norm_an: f64,
    #[serde(skip)]
    pub norm_bound: f64,
    #[serde(skip)]
    pub lambda_bound: f64,
}

impl BoundRow {
    pub fn ratio(&self) -> f64 {
        self.g_an / self.paper_bound
    }

    /// Names of the inequalities this row violates.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.p_an < xi_norm_sq(self.level) - BOUND_SLACK || self.p_an > 1.0 / 3.0 + BOUND_SLACK {
            out.push("p(a*a) range");
        }
        if self.g_an > self.paper_bound + BOUND_SLACK {
            out.push("g(a*a) bound");
        }
        if self.norm_an > self.norm_bound * (1.0 + BOUND_SLACK) {
            out.push("norm bound");
        }
        if self.lambda_max > self.lambda_bound + BOUND_SLACK {
            out.push("lambda bound");
        }
        out
    }
}

/// One row per `n = 1..N−1`.
pub fn bound_report(lab: &TruncationLab) -> Result<Vec<BoundRow>> {
    let lambda_max = lab.lambda_max()?;
    let alpha_min = lab.alpha_min()?;
    let mut rows = Vec::with_capacity(lab.level - 1);
    for n in 1..lab.level {
        let a = witness_operator(lab, n)?;
        let ata = a.adjoint().mul(&a)?;
        rows.push(BoundRow {
            level: lab.level,
            n,
            p_an: evaluate(&lab.p, &ata)?.re,
            g_an: evaluate(&lab.g, &ata)?.re,
            paper_bound: g_bound(n),
            lambda_max,
            alpha_min,
            norm_an: spectral_norm(a.block(0)),
            norm_bound: norm_bound(n),
            lambda_bound: lambda_bound(n),
        });
    }
    Ok(rows)
}

/// CSV with header `N,n,p_an,g_an,paper_bound,lambda_max,alpha_min`.
pub fn write_csv<W: std::io::Write>(rows: &[BoundRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(())
}
