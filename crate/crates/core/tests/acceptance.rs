//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::time::{Duration, Instant};

use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::functionals::{
    abs_continuous, left_kernel_contained, order_leq, singular, PositiveFunctional,
};
use lebesgue_toolkit::lebesgue::{decompose, is_unique, uniqueness_check, verify_decomposition};
use lebesgue_toolkit::nonuniq::{bound_report, TruncationLab};
use lebesgue_toolkit::numkernel::{c, CMatrix, PsdOperator};
use lebesgue_toolkit::opdecomp::{operator_lebesgue, Mode};
use lebesgue_toolkit::sampling::{self, SeededRng};
use lebesgue_toolkit::staralg::{
    group_algebra, irreducible_dimensions, wedderburn_decompose, BlockAlgebra, CayleyTable,
    GeneratorPresentation, WedderburnOptions,
};
use nalgebra::SymmetricEigen;
use rand::Rng;

const PAIRS: usize = 200;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn psd(n: usize, rank: usize, rng: &mut SeededRng) -> PsdOperator {
    PsdOperator::from_computed(&sampling::psd(n, rank, rng), &tol()).unwrap()
}

/// Random block algebra with `Σ nᵢ² ≤ 30`.
fn random_algebra(rng: &mut SeededRng) -> BlockAlgebra {
    loop {
        let k = rng.random_range(1..=4);
        let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=5)).collect();
        if dims.iter().map(|d| d * d).sum::<usize>() <= 30 {
            return BlockAlgebra::new(dims).unwrap();
        }
    }
}

fn functional_pair(seed: u64) -> (PositiveFunctional, PositiveFunctional) {
    let mut rng = sampling::rng(seed);
    let alg = random_algebra(&mut rng);
    let f = PositiveFunctional::random(&alg, &mut rng, &tol());
    let g = PositiveFunctional::random(&alg, &mut rng, &tol());
    (f, g)
}

// plain nalgebra helpers, kept independent of the library's numerics

fn spectrum(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    if m.nrows() == 0 {
        return (Vec::new(), m.clone());
    }
    let h = (m + m.adjoint()) * c(0.5);
    let e = SymmetricEigen::new(h);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

fn min_eig(m: &CMatrix) -> f64 {
    spectrum(m).0.into_iter().fold(f64::INFINITY, f64::min)
}

fn columns_where(m: &CMatrix, keep: impl Fn(f64) -> bool) -> CMatrix {
    let (vals, vecs) = spectrum(m);
    let idx: Vec<usize> = (0..vals.len()).filter(|&i| keep(vals[i])).collect();
    CMatrix::from_fn(m.nrows(), idx.len(), |r, j| vecs[(r, idx[j])])
}

fn sqrt_of(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = spectrum(m);
    let d = CMatrix::from_fn(vals.len(), vals.len(), |i, j| {
        if i == j {
            c(vals[i].max(0.0).sqrt())
        } else {
            c(0.0)
        }
    });
    &vecs * d * vecs.adjoint()
}

/// Orthonormal basis of `{v ∈ range A : A^{1/2} v ∈ range B}`.
fn continuous_subspace(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let na = a.norm().max(1e-300);
    let nb = b.norm().max(1e-300);
    let qa = columns_where(a, |v| v > 1e-10 * na);
    let qb = columns_where(b, |v| v > 1e-10 * nb);
    let off = CMatrix::identity(n, n) - &qb * qb.adjoint();
    let m = off * sqrt_of(a) * &qa;
    let gram = m.adjoint() * &m;
    let scale = a.norm().max(1e-300);
    let null = columns_where(&gram, |v| v <= 1e-12 * scale);
    qa * null
}

fn elapsed(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..PAIRS as u64 {
        let mut rng = sampling::rng(seed);
        let n = rng.random_range(2..=12);
        let a = psd(n, rng.random_range(0..=n), &mut rng);
        let b = psd(n, rng.random_range(0..=n), &mut rng);
        let schur = operator_lebesgue(&a, &b, Mode::Schur, &tol()).unwrap();
        let iter = operator_lebesgue(&a, &b, Mode::Iterative, &tol()).unwrap();
        let diff = (schur.regular.matrix() - iter.regular.matrix()).norm()
            + (schur.singular.matrix() - iter.singular.matrix()).norm();
        worst = worst.max(diff);
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-7 && t < Duration::from_secs(10),
        format!("max Frobenius gap {worst:.2e}, runtime {}", elapsed(t)),
    )
}

fn decomposition_invariants() -> Outcome {
    let t = tol();
    let mut failures = Vec::new();
    let mut worst_sum = 0.0f64;
    let mut worst_max = 0.0f64;
    for seed in 0..PAIRS as u64 {
        let (f, g) = functional_pair(1000 + seed);
        let d = decompose(&f, &g, Mode::Schur, &t).unwrap();
        let scale = f.density_norm().max(1.0);
        for (k, (fr, (fs, fb))) in d
            .regular
            .densities()
            .iter()
            .zip(d.singular.densities().iter().zip(f.densities()))
            .enumerate()
        {
            let sum = (fr.matrix() + fs.matrix() - fb.matrix()).norm() / scale;
            worst_sum = worst_sum.max(sum);
            // maximality against candidates built here from f and g alone
            let a = fb.matrix();
            let w = continuous_subspace(a, g.densities()[k].matrix());
            let root = sqrt_of(a);
            let pw = &w * w.adjoint();
            let mut rng = sampling::rng(seed ^ 0xabc);
            for j in 0..20 {
                let kmat = if j == 0 {
                    pw.clone()
                } else {
                    let x = sampling::psd(a.nrows(), a.nrows(), &mut rng);
                    let x = &x / c(spectrum(&x).0.into_iter().fold(0.0, f64::max).max(1e-300));
                    &pw * x * &pw
                };
                let cand = &root * kmat * &root;
                let defect = -min_eig(&(fr.matrix() - cand)) / scale;
                worst_max = worst_max.max(defect);
            }
        }
        let report = verify_decomposition(&f, &g, &d, seed, &t);
        if !report.passed() {
            failures.push(format!("seed {seed}: {:?}", report.failures()));
        }
        if !abs_continuous(&d.regular, &g, &t).unwrap()
            || !singular(&d.singular, &g, &t).unwrap()
            || !singular(&d.singular, &d.regular, &t).unwrap()
        {
            failures.push(format!("seed {seed}: relation check"));
        }
    }
    let passed = failures.is_empty() && worst_sum <= 1e-8 && worst_max <= 1e-8;
    let mut detail =
        format!("max |f_r + f_s - f| {worst_sum:.2e}, max maximality violation {worst_max:.2e}");
    if !failures.is_empty() {
        detail.push_str(&format!(", failures {failures:?}"));
    }
    outcome(passed, detail)
}

fn uniqueness_on_finite_algebras() -> Outcome {
    let t = tol();
    let mut worst_probe = 0.0f64;
    let mut failed = 0;
    for seed in 0..PAIRS as u64 {
        let (f, g) = functional_pair(1000 + seed);
        let (unique, alpha) = is_unique(&f, &g, &t).unwrap();
        let u = uniqueness_check(&f, &g, seed, &t).unwrap();
        worst_probe = worst_probe.max(u.probe_residual);
        if !unique || !alpha.is_finite() || u.probe_residual >= 1e-8 {
            failed += 1;
        }
    }
    outcome(
        failed == 0,
        format!("{failed} failures out of {PAIRS}, max probe residual {worst_probe:.2e}"),
    )
}

fn truncation_constants() -> Outcome {
    let start = Instant::now();
    let lab = TruncationLab::build(24).unwrap();
    let rows = bound_report(&lab).unwrap();
    let t = start.elapsed();
    let slack = 1e-10;
    let low = (1.0 - 4f64.powi(-24)) / 3.0;
    let mut ok = t < Duration::from_secs(1);
    let mut ratios = Vec::new();
    for r in rows.iter().filter(|r| r.n <= 8) {
        let n = r.n as i32;
        let g_bound = 2.0 / 9.0 * 0.4f64.powi(n) * (n as f64 + 1.0);
        let norm_bound = 2f64.powi(n) * (2.0 * (n as f64 + 1.0)).sqrt();
        ok &= r.p_an >= low - slack && r.p_an <= 1.0 / 3.0 + slack;
        ok &= r.g_an <= g_bound + slack;
        ok &= r.norm_an <= norm_bound + slack;
        ratios.push(format!("{}:{:.3}", r.n, r.g_an / g_bound));
    }
    outcome(
        ok,
        format!(
            "g ratio by n [{}], runtime {}",
            ratios.join(" "),
            elapsed(t)
        ),
    )
}

fn degeneration_chart() -> Outcome {
    let mut ok = true;
    let mut alpha_err = 0.0f64;
    let mut lambda_err = 0.0f64;
    for level in [6, 12, 24] {
        let lab = TruncationLab::build(level).unwrap();
        let want = 5f64.powi(level as i32);
        let rel = (lab.alpha_min().unwrap() - want).abs() / want;
        alpha_err = alpha_err.max(rel);
        ok &= rel <= 1e-6;
    }
    let mut previous = f64::INFINITY;
    let mut last = 0.0;
    for level in 2..=24 {
        let lambda = TruncationLab::build(level).unwrap().lambda_max().unwrap();
        let closed: f64 = 1.0 / (1..=level).map(|k| 2.5f64.powi(k as i32)).sum::<f64>();
        lambda_err = lambda_err.max((lambda - closed).abs() / closed);
        ok &= lambda < previous;
        previous = lambda;
        last = lambda;
    }
    let bound = 2.0 / 3.0 * 0.4 * 2.0;
    ok &= last < bound && lambda_err <= 1e-6;
    outcome(
        ok,
        format!(
            "alpha rel err {alpha_err:.2e}, lambda_max(24) = {last:.3e} < {bound:.4}, closed-form rel err {lambda_err:.2e}"
        ),
    )
}

fn wedderburn_recovery() -> Outcome {
    let mut ok_seeds = 0;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = sampling::rng(5000 + seed);
        let k = rng.random_range(1..=4);
        let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=4)).collect();
        let n: usize = dims.iter().sum();
        let u = sampling::unitary(n, &mut rng);
        let gens: Vec<CMatrix> = (0..2)
            .map(|_| {
                let mut m = CMatrix::zeros(n, n);
                let mut off = 0;
                for &d in &dims {
                    m.view_mut((off, off), (d, d))
                        .copy_from(&sampling::ginibre(d, d, &mut rng));
                    off += d;
                }
                &u * m * u.adjoint()
            })
            .collect();
        let p = GeneratorPresentation::new(n, gens).unwrap();
        let Ok(res) = wedderburn_decompose(&p, seed, &WedderburnOptions::default()) else {
            continue;
        };
        let mut got = res.block_layout();
        let mut want = dims;
        got.sort();
        want.sort();
        worst = worst.max(res.residual);
        if got == want && res.residual < 1e-7 {
            ok_seeds += 1;
        }
    }
    let dims_of = |table: CayleyTable| {
        let p = group_algebra(&table).unwrap();
        let res = wedderburn_decompose(&p, 0, &WedderburnOptions::default()).unwrap();
        let mut d = irreducible_dimensions(&res);
        d.sort();
        d
    };
    let s3 = dims_of(CayleyTable::symmetric3());
    let z4 = dims_of(CayleyTable::cyclic(4));
    outcome(
        ok_seeds == 100 && s3 == vec![1, 1, 2] && z4 == vec![1, 1, 1, 1],
        format!("{ok_seeds}/100 seeds, max residual {worst:.2e}, S3 {s3:?}, Z4 {z4:?}"),
    )
}

fn commutative_split() -> Outcome {
    let t = tol();
    let mut mismatches = 0;
    for seed in 0..PAIRS as u64 {
        let mut rng = sampling::rng(9000 + seed);
        let k = rng.random_range(1..=12);
        let mu: Vec<f64> = (0..k)
            .map(|_| {
                if rng.random_bool(0.7) {
                    rng.random_range(0.0..3.0)
                } else {
                    0.0
                }
            })
            .collect();
        let nu: Vec<f64> = (0..k)
            .map(|_| {
                if rng.random_bool(0.5) {
                    rng.random_range(0.01..3.0)
                } else {
                    0.0
                }
            })
            .collect();
        let alg = BlockAlgebra::new(vec![1; k]).unwrap();
        let func = |v: &[f64]| {
            PositiveFunctional::from_blocks(
                &alg,
                v.iter()
                    .map(|&x| PsdOperator::diag(&[x], &t).unwrap())
                    .collect(),
            )
            .unwrap()
        };
        let d = decompose(&func(&mu), &func(&nu), Mode::Schur, &t).unwrap();
        for i in 0..k {
            let (want_r, want_s) = if nu[i] > 0.0 {
                (mu[i], 0.0)
            } else {
                (0.0, mu[i])
            };
            if d.regular.densities()[i].matrix()[(0, 0)].re != want_r
                || d.singular.densities()[i].matrix()[(0, 0)].re != want_s
            {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} coordinate mismatches"),
    )
}

fn chain_and_zero_intersection() -> Outcome {
    let t = tol();
    let mut violations = Vec::new();
    let mut exercised = [0usize; 3];
    for seed in 0..PAIRS as u64 {
        let (f, g) = functional_pair(1000 + seed);
        let d = decompose(&f, &g, Mode::Schur, &t).unwrap();
        let h = f.add(&g, &t).unwrap();
        let pairs = [
            (&f, &g),
            (&f, &h),
            (&d.regular, &g),
            (&d.singular, &g),
            (&d.singular, &d.regular),
        ];
        for (x, y) in pairs {
            let leq = order_leq(x, y, &t).unwrap();
            let ac = abs_continuous(x, y, &t).unwrap();
            let kernels = left_kernel_contained(x, y, &t).unwrap();
            exercised[0] += leq as usize;
            exercised[1] += ac as usize;
            if (leq && !ac) || (ac && !kernels) {
                violations.push(format!("seed {seed}: chain"));
            }
            if ac && singular(x, y, &t).unwrap() {
                exercised[2] += 1;
                if x.density_norm() > 1e-8 * f.density_norm().max(1.0) {
                    violations.push(format!("seed {seed}: zero intersection"));
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{} violations; f <= g seen {}, f << g seen {}, << and _|_ seen {}",
            violations.len(),
            exercised[0],
            exercised[1],
            exercised[2]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 schur and iterative agree", oracle_equivalence),
        (
            "2 decomposition invariants and maximality",
            decomposition_invariants,
        ),
        (
            "3 uniqueness on finite-dimensional algebras",
            uniqueness_on_finite_algebras,
        ),
        ("4 truncation constants at N = 24", truncation_constants),
        ("5 degeneration chart", degeneration_chart),
        ("6 wedderburn recovery", wedderburn_recovery),
        ("7 commutative split", commutative_split),
        ("8 chain and zero-intersection", chain_and_zero_intersection),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let o = run();
        all &= o.passed;
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
