//! Operator-level Lebesgue theory for positive matrices.
//!
//! The formulas here come from Ando's theory of positive operators and the
//! Anderson–Duffin parallel sum, which the functional-level results build on:
//!
//! * parallel sum `A:B = A (A+B)⁺ B`;
//! * shorted operator (generalized Schur complement) onto the range of a
//!   projection `P`: `PAP − (PAP⊥)(P⊥AP⊥)⁺(P⊥AP)`;
//! * the regular part of `A` with respect to `B` is `lim_n A:(nB)`, which in
//!   finite dimension equals `A` shorted to `range(B)`.
//!
//! Both routes to the regular part are implemented. The Schur route is the
//! default; the iterative route evaluates the parallel-sum sequence on the
//! doubling schedule `n = 1, 2, 4, ...` and extrapolates it to `n = ∞`.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numkernel::{
    check_dims, ext_real, max_generalized_eig, pseudo_inverse, range_contained, support_projection,
    CMatrix, MatrixJson, Projection, PsdOperator,
};

/// How the regular part is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Schur,
    Iterative,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schur" => Ok(Mode::Schur),
            "iterative" => Ok(Mode::Iterative),
            other => Err(Error::Invalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// `A = regular + singular` with `regular` the largest part absolutely
/// continuous with respect to `B`.
#[derive(Debug, Clone)]
pub struct OperatorDecomposition {
    pub regular: PsdOperator,
    pub singular: PsdOperator,
    /// `min{α : regular ≤ α B}` (`+∞` if no such α).
    pub alpha_min: f64,
    pub iterations_used: usize,
}

/// Wire format `{"regular": M, "singular": M, "alpha_min": number | "inf"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDecompositionJson {
    pub regular: MatrixJson,
    pub singular: MatrixJson,
    #[serde(with = "ext_real")]
    pub alpha_min: f64,
}

impl OperatorDecomposition {
    pub fn to_json(&self) -> OperatorDecompositionJson {
        OperatorDecompositionJson {
            regular: MatrixJson::from_matrix(self.regular.matrix()),
            singular: MatrixJson::from_matrix(self.singular.matrix()),
            alpha_min: self.alpha_min,
        }
    }
}

fn scale_of(a: &PsdOperator, b: &PsdOperator) -> f64 {
    a.norm().max(b.norm())
}

/// Parallel sum `A:B = A(A+B)⁺B`.
pub fn parallel_sum(a: &PsdOperator, b: &PsdOperator, tol: &Tolerances) -> Result<PsdOperator> {
    check_dims(a, b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(PsdOperator::zero(a.dim()));
    }
    let sum = PsdOperator::from_computed(&(a.matrix() + b.matrix()), tol)?;
    let x = a.matrix() * pseudo_inverse(&sum, tol).matrix() * b.matrix();
    PsdOperator::from_computed_with_scale(&x, scale_of(a, b), tol)
}

/// Largest PSD operator below `A` whose range lies in `range(P)`.
pub fn shorted_operator(a: &PsdOperator, p: &Projection, tol: &Tolerances) -> Result<PsdOperator> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch(a.dim(), p.dim()));
    }
    if p.rank() == 0 || a.is_zero() {
        return Ok(PsdOperator::zero(a.dim()));
    }
    if p.rank() == p.dim() {
        return Ok(a.clone());
    }
    let (q1, q2) = p.split_basis();
    let m = a.matrix();
    let a11 = q1.adjoint() * m * &q1;
    let a12 = q1.adjoint() * m * &q2;
    let a22 = PsdOperator::from_computed_with_scale(&(q2.adjoint() * m * &q2), a.norm(), tol)?;
    let schur = a11 - &a12 * pseudo_inverse(&a22, tol).matrix() * a12.adjoint();
    PsdOperator::from_computed_with_scale(&(&q1 * schur * q1.adjoint()), a.norm(), tol)
}

/// Romberg columns kept when extrapolating the parallel-sum sequence.
const MAX_EXTRAPOLATION_COLUMNS: usize = 8;
/// Non-improving schedule points tolerated once the noise floor is reached.
const PLATEAU_PATIENCE: usize = 4;

/// `lim_n A:(nB)` on the schedule `n = 2^k`, Richardson-extrapolated in `1/n`.
///
/// `A:(nB)` is a rational function of `1/n` that is analytic at `1/n = 0`, so
/// the Romberg table over the doubling schedule converges to the limit. Rounding
/// error in `A + nB` grows with `n`; when the extrapolated iterates stop
/// improving before `iter_stop` is met, the iterate at the smallest step is
/// accepted if that step is below `iter_plateau`.
///
/// Returns the limit and the number of schedule points evaluated.
pub fn iterated_parallel_limit(
    a: &PsdOperator,
    b: &PsdOperator,
    tol: &Tolerances,
) -> Result<(PsdOperator, usize)> {
    check_dims(a, b)?;
    if a.is_zero() || b.is_zero() {
        return Ok((PsdOperator::zero(a.dim()), 0));
    }
    let scale = a.norm().max(1.0);
    let mut prev_row: Vec<CMatrix> = Vec::new();
    let mut prev_best: Option<CMatrix> = None;
    // (step, estimate, points evaluated) at the smallest step seen so far
    let mut floor: Option<(f64, CMatrix, usize)> = None;
    let mut stale = 0;
    for k in 0..=tol.iter_max_exp {
        let n = 2f64.powi(k as i32);
        let x = parallel_sum(a, &b.scale(n, tol), tol)?;
        let mut row = vec![x.matrix().clone()];
        for j in 1..=prev_row.len().min(MAX_EXTRAPOLATION_COLUMNS) {
            let factor = 2f64.powi(j as i32) - 1.0;
            let next = &row[j - 1] + (&row[j - 1] - &prev_row[j - 1]).map(|z| z / factor);
            row.push(next);
        }
        let best = row.last().expect("row is non-empty").clone();
        let used = k as usize + 1;
        if let (Some(pb), true) = (&prev_best, k >= 3) {
            let step = (&best - pb).norm() / scale;
            if step < tol.iter_stop {
                let limit = PsdOperator::from_computed_with_scale(&best, a.norm(), tol)?;
                return Ok((limit, used));
            }
            match &floor {
                Some((s, _, _)) if step >= *s => {
                    if *s < tol.iter_plateau {
                        stale += 1;
                    }
                }
                _ => {
                    floor = Some((step, best.clone(), used));
                    stale = 0;
                }
            }
            if stale >= PLATEAU_PATIENCE {
                break;
            }
        }
        prev_best = Some(best);
        prev_row = row;
    }
    match floor {
        Some((step, est, used)) if step < tol.iter_plateau => {
            let limit = PsdOperator::from_computed_with_scale(&est, a.norm(), tol)?;
            Ok((limit, used))
        }
        _ => Err(Error::NoConvergence(format!(
            "parallel-sum sequence did not settle by n = 2^{}",
            tol.iter_max_exp
        ))),
    }
}

/// Lebesgue decomposition of `A` with respect to `B`.
pub fn operator_lebesgue(
    a: &PsdOperator,
    b: &PsdOperator,
    mode: Mode,
    tol: &Tolerances,
) -> Result<OperatorDecomposition> {
    check_dims(a, b)?;
    let n = a.dim();
    if a.is_zero() {
        return Ok(OperatorDecomposition {
            regular: PsdOperator::zero(n),
            singular: PsdOperator::zero(n),
            alpha_min: 0.0,
            iterations_used: 0,
        });
    }
    if b.is_zero() {
        return Ok(OperatorDecomposition {
            regular: PsdOperator::zero(n),
            singular: a.clone(),
            alpha_min: 0.0,
            iterations_used: 0,
        });
    }
    let (regular, iterations_used) = match mode {
        Mode::Schur => (shorted_operator(a, &support_projection(b), tol)?, 0),
        Mode::Iterative => iterated_parallel_limit(a, b, tol)?,
    };
    let singular =
        PsdOperator::from_computed_with_scale(&(a.matrix() - regular.matrix()), a.norm(), tol)?;
    let alpha_min = max_generalized_eig(&regular, b, tol)?;
    Ok(OperatorDecomposition {
        regular,
        singular,
        alpha_min,
        iterations_used,
    })
}

/// `A ⊥ B`: the parallel sum vanishes relative to `max(‖A‖, ‖B‖, 1)`.
pub fn operators_singular(a: &PsdOperator, b: &PsdOperator, tol: &Tolerances) -> Result<bool> {
    let ps = parallel_sum(a, b, tol)?;
    Ok(ps.norm() <= tol.singular * a.norm().max(b.norm()).max(1.0))
}

/// Closability of the form with Gram matrix `F` with respect to the form with
/// Gram matrix `G`. In finite dimension this is `ker G ⊆ ker F`.
pub fn form_closable(f: &PsdOperator, g: &PsdOperator, tol: &Tolerances) -> Result<bool> {
    range_contained(f, g, tol)
}
