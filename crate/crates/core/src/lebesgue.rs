//! Lebesgue decomposition `f = f_r + f_s` of a positive functional with
//! respect to another, and its certification.
//!
//! Blockwise, `D_{f_r}` is the shorted operator of `D_f` to `range(D_g)`; the
//! iterative mode computes the same operator as `lim_n D_f : (n D_g)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::functionals::{abs_continuous, order_leq, singular, FunctionalJson, PositiveFunctional};
use crate::numkernel::{
    c, ext_real, hermitian_norm, loewner_leq_scaled, sqrt_psd, support_projection, CMatrix,
    HermitianMatrix, PsdOperator,
};
use crate::opdecomp::{operator_lebesgue, shorted_operator, Mode};
use crate::sampling;

/// Seed used by [`is_unique`] for its singular-part probe.
const PROBE_SEED: u64 = 0x5eed;
/// Samples drawn per probe and per maximality check.
pub const SAMPLES: usize = 20;

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub regular: PositiveFunctional,
    pub singular: PositiveFunctional,
    /// `min{α : f_r ≤ α g}`, `+∞` if none.
    pub alpha_min: f64,
    pub unique: bool,
    pub iterations_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub regular: FunctionalJson,
    pub singular: FunctionalJson,
    #[serde(with = "ext_real")]
    pub alpha_min: f64,
    pub unique: bool,
}

impl Decomposition {
    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            regular: self.regular.to_json(),
            singular: self.singular.to_json(),
            alpha_min: self.alpha_min,
            unique: self.unique,
        }
    }
}

fn check_same(f: &PositiveFunctional, g: &PositiveFunctional) -> Result<()> {
    if f.algebra() != g.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(())
}

/// `f = f_r + f_s` with `f_r` the greatest functional below `f` that is
/// absolutely continuous with respect to `g`.
pub fn decompose(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    mode: Mode,
    tol: &Tolerances,
) -> Result<Decomposition> {
    check_same(f, g)?;
    let mut regular = Vec::new();
    let mut singular_part = Vec::new();
    let mut alpha = 0.0f64;
    let mut iterations = 0;
    for (a, b) in f.densities().iter().zip(g.densities()) {
        let d = operator_lebesgue(a, b, mode, tol)?;
        alpha = alpha.max(d.alpha_min);
        iterations = iterations.max(d.iterations_used);
        regular.push(d.regular);
        singular_part.push(d.singular);
    }
    Ok(Decomposition {
        regular: PositiveFunctional::from_blocks(f.algebra(), regular)?,
        singular: PositiveFunctional::from_blocks(f.algebra(), singular_part)?,
        alpha_min: alpha,
        unique: alpha.is_finite(),
        iterations_used: iterations,
    })
}

/// Random `K` with `0 ≤ K ≤ P`, where `P` projects onto the columns of `q`.
fn random_contraction(q: &CMatrix, rng: &mut impl Rng) -> CMatrix {
    let r = q.ncols();
    if r == 0 {
        return CMatrix::zeros(q.nrows(), q.nrows());
    }
    let u = sampling::unitary(r, rng);
    let weights =
        CMatrix::from_diagonal(&nalgebra::DVector::from_fn(
            r,
            |_, _| c(rng.random::<f64>()),
        ));
    let w = q * u;
    &w * weights * w.adjoint()
}

/// `S K S` for `S = D^{1/2}`; lies below `D` whenever `0 ≤ K ≤ I`.
fn sandwich(root: &PsdOperator, k: &CMatrix, scale: f64, tol: &Tolerances) -> Result<PsdOperator> {
    let s = root.matrix();
    PsdOperator::from_computed_with_scale(&(s * k * s), scale, tol)
}

/// Largest g-singular part found among sampled `p ≤ f` (blockwise norm).
///
/// Each sample is `p = S K S` with `S = D_f^{1/2}` and random `0 ≤ K ≤ I`; its
/// part singular to `g` is `p − short(p, range D_g)`.
pub fn singular_probe(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<f64> {
    check_same(f, g)?;
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for (a, b) in f.densities().iter().zip(g.densities()) {
        if a.is_zero() {
            continue;
        }
        let root = sqrt_psd(a, tol);
        let full = CMatrix::identity(a.dim(), a.dim());
        let pg = support_projection(b);
        for _ in 0..samples {
            let p = sandwich(&root, &random_contraction(&full, &mut rng), a.norm(), tol)?;
            let regular = shorted_operator(&p, &pg, tol)?;
            worst = worst.max(hermitian_norm(&(p.matrix() - regular.matrix())));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCheck {
    pub unique: bool,
    #[serde(with = "ext_real")]
    pub alpha: f64,
    /// Norm of the largest g-singular functional found below `f_r`.
    pub probe_residual: f64,
}

/// Uniqueness via uniform dominance `f_r ≤ α g`, cross-checked by probing
/// `f_r` for non-zero parts singular to `g`.
pub fn uniqueness_check(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    seed: u64,
    tol: &Tolerances,
) -> Result<UniquenessCheck> {
    let d = decompose(f, g, Mode::Schur, tol)?;
    let probe_residual = singular_probe(&d.regular, g, SAMPLES, seed, tol)?;
    let limit = 1e-8 * f.density_norm().max(1.0);
    Ok(UniquenessCheck {
        unique: d.alpha_min.is_finite() && probe_residual < limit,
        alpha: d.alpha_min,
        probe_residual,
    })
}

pub fn is_unique(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    tol: &Tolerances,
) -> Result<(bool, f64)> {
    let u = uniqueness_check(f, g, PROBE_SEED, tol)?;
    Ok((u.unique, u.alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst measured defect (0 when the check is boolean).
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    fn push(&mut self, name: &str, passed: bool, defect: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            defect,
        });
    }
}

/// Orthonormal basis of `W = {v ∈ range D : D^{1/2} v ∈ range B}`.
///
/// `S P_W S` is then the shorted operator of `D` to `range B`, and every
/// `S K S` with `0 ≤ K ≤ P_W` is a functional below `D` that is absolutely
/// continuous with respect to `B`.
fn continuous_directions(root: &PsdOperator, b: &PsdOperator) -> CMatrix {
    let q = root.range_basis();
    let kb = b.kernel_basis();
    if q.ncols() == 0 || kb.ncols() == 0 {
        return q;
    }
    let m = kb.adjoint() * root.matrix() * &q;
    let gram = m.adjoint() * &m;
    let cutoff = 1e-12 * root.norm().powi(2);
    let eig = crate::numkernel::eigendecompose(&HermitianMatrix::from_computed(&gram));
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] <= cutoff)
        .collect();
    let mut null = CMatrix::zeros(q.ncols(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        null.set_column(j, &eig.vectors.column(i));
    }
    q * null
}

/// Checks the decomposition invariants, samples maximality of `f_r`, and
/// checks that functionals below `f_r` stay absolutely continuous.
pub fn verify_decomposition(
    f: &PositiveFunctional,
    g: &PositiveFunctional,
    d: &Decomposition,
    seed: u64,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport { checks: Vec::new() };
    if f.algebra() != g.algebra()
        || d.regular.algebra() != f.algebra()
        || d.singular.algebra() != f.algebra()
    {
        report.push("same algebra", false, f64::INFINITY);
        return report;
    }
    report.push("same algebra", true, 0.0);

    let scale = f.density_norm().max(1.0);
    let sum_defect = f
        .densities()
        .iter()
        .zip(d.regular.densities().iter().zip(d.singular.densities()))
        .map(|(a, (r, s))| (r.matrix() + s.matrix() - a.matrix()).norm())
        .fold(0.0, f64::max);
    report.push(
        "regular + singular = f",
        sum_defect <= 1e-8 * scale,
        sum_defect,
    );

    let bool_check = |r: Result<bool>| r.unwrap_or(false);
    report.push(
        "regular << g",
        bool_check(abs_continuous(&d.regular, g, tol)),
        0.0,
    );
    report.push(
        "singular _|_ g",
        bool_check(singular(&d.singular, g, tol)),
        0.0,
    );
    report.push(
        "singular _|_ regular",
        bool_check(singular(&d.singular, &d.regular, tol)),
        0.0,
    );
    report.push(
        "regular <= f",
        bool_check(order_leq(&d.regular, f, tol)),
        0.0,
    );

    let mut rng = sampling::rng(seed);
    let mut maximal = true;
    let mut below_continuous = true;
    let mut worst_excess = 0.0f64;
    for ((a, b), r) in f
        .densities()
        .iter()
        .zip(g.densities())
        .zip(d.regular.densities())
    {
        if a.is_zero() {
            continue;
        }
        let root = sqrt_psd(a, tol);
        let w = continuous_directions(&root, b);
        for i in 0..SAMPLES {
            let k = if i == 0 {
                &w * w.adjoint()
            } else {
                random_contraction(&w, &mut rng)
            };
            match sandwich(&root, &k, a.norm(), tol) {
                Ok(cand) => {
                    if !loewner_leq_scaled(cand.matrix(), r.matrix(), a.norm(), tol) {
                        maximal = false;
                        let gap = crate::numkernel::min_eigenvalue(&(r.matrix() - cand.matrix()));
                        worst_excess = worst_excess.max(-gap);
                    }
                }
                Err(_) => maximal = false,
            }
        }
        if !r.is_zero() {
            let r_root = sqrt_psd(r, tol);
            let full = CMatrix::identity(r.dim(), r.dim());
            for _ in 0..SAMPLES {
                let below = sandwich(&r_root, &random_contraction(&full, &mut rng), r.norm(), tol);
                let ok = below
                    .and_then(|t| crate::numkernel::range_contained(&t, b, tol))
                    .unwrap_or(false);
                below_continuous &= ok;
            }
        }
    }
    report.push("maximality (sampled)", maximal, worst_excess);
    report.push(
        "t <= regular implies t << g (sampled)",
        below_continuous,
        0.0,
    );
    report
}
