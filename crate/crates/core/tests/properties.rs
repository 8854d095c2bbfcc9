use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::functionals::{
    abs_continuous, corner_extension, evaluate, gns, left_kernel_contained, order_leq,
    representable_zero_product, restrict_to_corner, singular, Corner, CornerFunctional,
    FunctionalJson, PositiveFunctional,
};
use lebesgue_toolkit::lebesgue::{decompose, singular_probe};
use lebesgue_toolkit::numkernel::{
    c, diag_matrix, loewner_leq, loewner_leq_scaled, max_generalized_eig, pseudo_inverse, sqrt_psd,
    support_projection, CMatrix, Projection, PsdOperator, C64,
};
use lebesgue_toolkit::opdecomp::{
    form_closable, operator_lebesgue, operators_singular, parallel_sum, shorted_operator, Mode,
};
use lebesgue_toolkit::sampling::{self, SeededRng};
use lebesgue_toolkit::staralg::{
    gamma_norm, seminorm_sigma_f, wedderburn_decompose, AlgebraElement, BlockAlgebra,
    GeneratorPresentation, WedderburnOptions, ZeroProductAlgebra,
};
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn psd(n: usize, rank: usize, rng: &mut SeededRng) -> PsdOperator {
    PsdOperator::from_computed(&sampling::psd(n, rank, rng), &tol()).unwrap()
}

fn random_algebra(rng: &mut SeededRng, max_blocks: usize, max_dim: usize) -> BlockAlgebra {
    let k = rng.random_range(1..=max_blocks);
    BlockAlgebra::new((0..k).map(|_| rng.random_range(1..=max_dim)).collect()).unwrap()
}

fn random_projection(n: usize, rank: usize, rng: &mut SeededRng) -> Projection {
    let u = sampling::unitary(n, rng);
    Projection::from_orthonormal(&u.columns(0, rank).into_owned())
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn support_projection_fixes_operator(seed in any::<u64>(), n in 1usize..=12, r in 0usize..=12) {
        let mut rng = sampling::rng(seed);
        let a = psd(n, r.min(n), &mut rng);
        let s = support_projection(&a);
        let back = s.matrix() * a.matrix() * s.matrix();
        prop_assert!((back - a.matrix()).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn pseudo_inverse_is_an_involution(seed in any::<u64>(), n in 1usize..=8, r in 1usize..=8) {
        let mut rng = sampling::rng(seed);
        let a = psd(n, r.min(n), &mut rng);
        let back = pseudo_inverse(&pseudo_inverse(&a, &tol()), &tol());
        prop_assert!((back.matrix() - a.matrix()).norm() <= 1e-8 * a.norm());
    }

    #[test]
    fn generalized_eigenvalue_is_tight(seed in any::<u64>(), n in 1usize..=8, ra in 0usize..=8, rb in 1usize..=8) {
        let mut rng = sampling::rng(seed);
        let b = psd(n, rb.min(n), &mut rng);
        // A supported inside range(B)
        let q = b.range_basis();
        let k = sampling::psd(q.ncols(), ra.min(q.ncols()), &mut rng);
        let a = PsdOperator::from_computed(&(&q * k * q.adjoint()), &tol()).unwrap();
        let alpha = max_generalized_eig(&a, &b, &tol()).unwrap();
        prop_assert!(alpha.is_finite());
        let up = b.matrix() * c(alpha * (1.0 + 1e-9));
        prop_assert!(loewner_leq(a.matrix(), &up, &tol()));
        if !a.is_zero() {
            let down = b.matrix() * c(alpha * (1.0 - 1e-6));
            let strict = Tolerances { order_rel: 1e-12, ..tol() };
            prop_assert!(!loewner_leq(a.matrix(), &down, &strict));
        }
    }

    #[test]
    fn parallel_sums_increase_to_the_regular_part(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = sampling::rng(seed);
        let a = psd(n, n, &mut rng);
        let b = psd(n, rng.random_range(1..n), &mut rng);
        let mut prev = PsdOperator::zero(n);
        let loose = Tolerances { order_rel: 1e-8, ..tol() };
        for k in 0..12 {
            let x = parallel_sum(&a, &b.scale(2f64.powi(k), &tol()), &tol()).unwrap();
            prop_assert!(loewner_leq(prev.matrix(), x.matrix(), &loose));
            prop_assert!(loewner_leq(x.matrix(), a.matrix(), &loose));
            prev = x;
        }
        let s = operator_lebesgue(&a, &b, Mode::Schur, &tol()).unwrap();
        let i = operator_lebesgue(&a, &b, Mode::Iterative, &tol()).unwrap();
        prop_assert!((s.regular.matrix() - i.regular.matrix()).norm() <= 1e-7);
    }

    #[test]
    fn shorted_operator_dominates_candidates(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = sampling::rng(seed);
        let a = psd(n, rng.random_range(1..=n), &mut rng);
        let p = random_projection(n, rng.random_range(1..n), &mut rng);
        let short = shorted_operator(&a, &p, &tol()).unwrap();
        // C = S K S with 0 <= K <= I and range(C) ⊆ range(P): take K = P_W * t
        let root = sqrt_psd(&a, &tol());
        let pm = p.complement();
        let mut best = 0.0f64;
        for _ in 0..5 {
            // random C ≤ A, then project its range into range(P) by shorting C itself
            let k = sampling::psd(n, n, &mut rng);
            let k = &k / c(lebesgue_toolkit::numkernel::spectral_norm(&k).max(1e-300));
            let cand = PsdOperator::from_computed(&(root.matrix() * k * root.matrix()), &tol()).unwrap();
            let cand = shorted_operator(&cand, &p, &tol()).unwrap();
            prop_assert!((pm.matrix() * cand.matrix()).norm() <= 1e-8 * a.norm());
            let loose = Tolerances { order_rel: 1e-8, ..tol() };
            prop_assert!(loewner_leq_scaled(cand.matrix(), short.matrix(), a.norm(), &loose));
            best = best.max(cand.norm());
        }
        prop_assert!(best <= short.norm() + 1e-8 * a.norm());
    }

    #[test]
    fn decomposition_identities(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = sampling::rng(seed);
        let a = psd(n, rng.random_range(0..=n), &mut rng);
        let b = psd(n, rng.random_range(0..=n), &mut rng);
        let d = operator_lebesgue(&a, &b, Mode::Schur, &tol()).unwrap();
        prop_assert!(loewner_leq(d.regular.matrix(), a.matrix(), &tol()));
        prop_assert!(operators_singular(&d.singular, &b, &tol()).unwrap());
    }

    #[test]
    fn orthogonal_diagonal_supports_are_singular(mask in prop::collection::vec(any::<bool>(), 1..10), seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let x: Vec<f64> = mask.iter().map(|&m| if m { rng.random_range(0.1..2.0) } else { 0.0 }).collect();
        let y: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { rng.random_range(0.1..2.0) }).collect();
        let a = PsdOperator::diag(&x, &tol()).unwrap();
        let b = PsdOperator::diag(&y, &tol()).unwrap();
        prop_assert!(operators_singular(&a, &b, &tol()).unwrap());
    }

    #[test]
    fn form_chain(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = sampling::rng(seed);
        let f = psd(n, rng.random_range(0..=n), &mut rng);
        let extra = psd(n, rng.random_range(0..=n), &mut rng);
        let g = f.add(&extra, &tol()).unwrap();
        prop_assert!(loewner_leq(f.matrix(), g.matrix(), &tol()));
        prop_assert!(form_closable(&f, &g, &tol()).unwrap());
        let kg = g.kernel_basis();
        prop_assert!((f.matrix() * kg).norm() <= 1e-8 * f.norm().max(1.0));
    }

    #[test]
    fn sigma_f_is_a_c_star_seminorm(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 4, 4);
        let k = alg.num_blocks();
        let blocks: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.5)).collect();
        let x = AlgebraElement::random(&alg, &mut rng);
        let y = AlgebraElement::random(&alg, &mut rng);
        let s = |z: &AlgebraElement| seminorm_sigma_f(z, &blocks).unwrap();
        let eps = 1e-10;
        prop_assert!(s(&x.mul(&y).unwrap()) <= s(&x) * s(&y) + eps);
        prop_assert!((s(&x.adjoint()) - s(&x)).abs() <= eps);
        prop_assert!((s(&x.adjoint().mul(&x).unwrap()) - s(&x).powi(2)).abs() <= 1e-9 * s(&x).powi(2).max(1.0));
        let all: Vec<usize> = (0..k).collect();
        prop_assert!((gamma_norm(&x) - seminorm_sigma_f(&x, &all).unwrap()).abs() <= eps);
        prop_assert!(gamma_norm(&x) + eps >= s(&x));
    }

    #[test]
    fn zero_product_only_represents_zero(coeffs in prop::collection::vec(-1.0f64..1.0, 1..6)) {
        let z = ZeroProductAlgebra { dim: coeffs.len() };
        let phi: Vec<C64> = coeffs.iter().map(|&v| c(v)).collect();
        let is_zero = coeffs.iter().all(|&v| v == 0.0);
        prop_assert_eq!(representable_zero_product(&z, &phi), is_zero);
        prop_assert!(representable_zero_product(&z, &vec![c(0.0); coeffs.len()]));
    }

    #[test]
    fn wedderburn_round_trip(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let k = rng.random_range(1..=3);
        let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=3)).collect();
        let n: usize = dims.iter().sum();
        let u = sampling::unitary(n, &mut rng);
        let gens: Vec<CMatrix> = (0..2)
            .map(|_| {
                let mut m = CMatrix::zeros(n, n);
                let mut off = 0;
                for &d in &dims {
                    m.view_mut((off, off), (d, d)).copy_from(&sampling::ginibre(d, d, &mut rng));
                    off += d;
                }
                &u * m * u.adjoint()
            })
            .collect();
        let p = GeneratorPresentation::new(n, gens).unwrap();
        let res = wedderburn_decompose(&p, seed, &WedderburnOptions::default()).unwrap();
        let mut got = res.block_layout();
        let mut want = dims.clone();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
        prop_assert!(res.residual < 1e-7);
    }

    #[test]
    fn chain_and_zero_intersection(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 3, 4);
        let f = PositiveFunctional::random(&alg, &mut rng, &tol());
        let g = PositiveFunctional::random(&alg, &mut rng, &tol());
        let t = tol();
        if order_leq(&f, &g, &t).unwrap() {
            prop_assert!(abs_continuous(&f, &g, &t).unwrap());
        }
        if abs_continuous(&f, &g, &t).unwrap() {
            prop_assert!(left_kernel_contained(&f, &g, &t).unwrap());
        }
        // f ≤ f + g always, so the first implication is exercised on every seed
        let h = f.add(&g, &t).unwrap();
        prop_assert!(order_leq(&f, &h, &t).unwrap());
        prop_assert!(abs_continuous(&f, &h, &t).unwrap());
        prop_assert!(left_kernel_contained(&f, &h, &t).unwrap());
        let d = decompose(&f, &g, Mode::Schur, &t).unwrap();
        for (x, y) in [(&d.singular, &g), (&d.regular, &g), (&f, &g)] {
            if abs_continuous(x, y, &t).unwrap() && singular(x, y, &t).unwrap() {
                prop_assert!(x.density_norm() <= 1e-8 * f.density_norm().max(1.0));
            }
        }
    }

    #[test]
    fn gns_reconstructs(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 3, 3);
        let f = PositiveFunctional::random(&alg, &mut rng, &tol());
        prop_assume!(!f.is_zero());
        let data = gns(&f, &tol()).unwrap();
        let kernel_dim: usize = f.densities().iter().map(|d| d.dim() * (d.dim() - d.rank())).sum();
        prop_assert_eq!(data.kernel_basis.len(), kernel_dim);
        prop_assert_eq!(data.quotient_dim + kernel_dim, alg.dimension());
        for (e, p) in alg.basis().iter().zip(&data.representation) {
            let value = evaluate(&f, e).unwrap();
            let inner = (p * &data.cyclic_vector).dotc(&data.cyclic_vector).conj();
            prop_assert!((value - inner).norm() <= 1e-8 * f.density_norm().max(1.0));
        }
        prop_assert!(data.check(&f).passed(1e-8));
    }

    #[test]
    fn corner_extension_is_the_only_norm_preserving_one(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = sampling::rng(seed);
        let t = tol();
        let r = rng.random_range(1..n);
        let alg = BlockAlgebra::new(vec![n, 1]).unwrap();
        let e_rank: Vec<f64> = (0..n).map(|i| if i < r { 1.0 } else { 0.0 }).collect();
        let e = AlgebraElement::new(&alg, vec![diag_matrix(&e_rank), diag_matrix(&[1.0])]).unwrap();
        let corner = Corner::new(&e, &t).unwrap();
        let w = PsdOperator::from_computed(&sampling::psd(r, r, &mut rng), &t).unwrap();
        let w1 = PsdOperator::diag(&[rng.random_range(0.0..1.0)], &t).unwrap();
        let fc = CornerFunctional::new(&corner, vec![w.clone(), w1.clone()]).unwrap();
        let ext = corner_extension(&fc, &t).unwrap();
        prop_assert!((ext.norm() - fc.norm()).abs() <= 1e-12 * fc.norm().max(1.0));

        // general positive extension: [[W, W^½ K Y^½], [.., Y]] with ‖K‖ ≤ 1
        let y0 = PsdOperator::from_computed(&sampling::psd(n - r, n - r, &mut rng), &t).unwrap();
        let k = sampling::ginibre(r, n - r, &mut rng);
        let k = &k / c(lebesgue_toolkit::numkernel::spectral_norm(&k));
        let w_root = sqrt_psd(&w, &t);
        for scale in [0.0, 1e-3, 0.5] {
            let y = y0.scale(scale, &t);
            let x = w_root.matrix() * &k * sqrt_psd(&y, &t).matrix();
            let mut d = CMatrix::zeros(n, n);
            d.view_mut((0, 0), (r, r)).copy_from(w.matrix());
            d.view_mut((0, r), (r, n - r)).copy_from(&x);
            d.view_mut((r, 0), (n - r, r)).copy_from(&x.adjoint());
            d.view_mut((r, r), (n - r, n - r)).copy_from(y.matrix());
            let h = PositiveFunctional::new(
                &AlgebraElement::new(&alg, vec![d, w1.matrix().clone()]).unwrap(),
                &t,
            )
            .unwrap();
            // h extends fc
            let hc = restrict_to_corner(&h, &corner, &t).unwrap();
            prop_assert!((hc.density[0].matrix() - w.matrix()).norm() <= 1e-12);
            let same_norm = (h.norm() - fc.norm()).abs() <= 1e-12;
            prop_assert_eq!(same_norm, scale == 0.0);
            if same_norm {
                let z = AlgebraElement::random(&alg, &mut rng);
                prop_assert!((evaluate(&h, &z).unwrap() - evaluate(&ext, &z).unwrap()).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn restriction_preserves_absolute_continuity(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let t = tol();
        let alg = random_algebra(&mut rng, 3, 4);
        let g = PositiveFunctional::random(&alg, &mut rng, &t);
        let f = decompose(&PositiveFunctional::random(&alg, &mut rng, &t), &g, Mode::Schur, &t).unwrap().regular;
        prop_assert!(abs_continuous(&f, &g, &t).unwrap());
        let blocks: Vec<CMatrix> = alg
            .block_dims()
            .iter()
            .map(|&n| random_projection(n, rng.random_range(0..=n), &mut rng).matrix().clone())
            .collect();
        let corner = Corner::new(&AlgebraElement::new(&alg, blocks).unwrap(), &t).unwrap();
        let fc = restrict_to_corner(&f, &corner, &t).unwrap();
        let gc = restrict_to_corner(&g, &corner, &t).unwrap();
        prop_assert!(fc.abs_continuous(&gc, &t).unwrap());
    }

    #[test]
    fn schur_and_iterative_functionals_agree(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 3, 4);
        let f = PositiveFunctional::random(&alg, &mut rng, &tol());
        let g = PositiveFunctional::random(&alg, &mut rng, &tol());
        let s = decompose(&f, &g, Mode::Schur, &tol()).unwrap();
        let i = decompose(&f, &g, Mode::Iterative, &tol()).unwrap();
        for (a, b) in s.regular.densities().iter().zip(i.regular.densities()) {
            prop_assert!((a.matrix() - b.matrix()).norm() <= 1e-7);
        }
    }

    #[test]
    fn decomposition_is_idempotent(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 3, 4);
        let t = tol();
        let f = PositiveFunctional::random(&alg, &mut rng, &t);
        let g = PositiveFunctional::random(&alg, &mut rng, &t);
        let d = decompose(&f, &g, Mode::Schur, &t).unwrap();
        let scale = 1e-8 * f.density_norm().max(1.0);
        let again = decompose(&d.regular, &g, Mode::Schur, &t).unwrap();
        for (a, b) in again.regular.densities().iter().zip(d.regular.densities()) {
            prop_assert!((a.matrix() - b.matrix()).norm() <= scale);
        }
        let sing = decompose(&d.singular, &g, Mode::Schur, &t).unwrap();
        prop_assert!(sing.regular.density_norm() <= scale);
    }

    #[test]
    fn nothing_singular_hides_below_a_continuous_functional(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 3, 4);
        let t = tol();
        let g = PositiveFunctional::random(&alg, &mut rng, &t);
        let f = decompose(&PositiveFunctional::random(&alg, &mut rng, &t), &g, Mode::Schur, &t).unwrap().regular;
        prop_assert!(singular_probe(&f, &g, 10, seed, &t).unwrap() < 1e-8);
    }

    #[test]
    fn diagonal_algebras_split_by_support(weights in prop::collection::vec((0.0f64..2.0, any::<bool>(), any::<bool>()), 1..12)) {
        // commutative case: f_r = f on supp(ν), f_s = f off it
        let mu: Vec<f64> = weights.iter().map(|&(w, keep, _)| if keep { w } else { 0.0 }).collect();
        let nu: Vec<f64> = weights.iter().map(|&(w, _, on)| if on { 1.0 + w } else { 0.0 }).collect();
        let k = mu.len();
        let alg = BlockAlgebra::new(vec![1; k]).unwrap();
        let func = |v: &[f64]| {
            PositiveFunctional::from_blocks(&alg, v.iter().map(|&x| PsdOperator::diag(&[x], &tol()).unwrap()).collect()).unwrap()
        };
        let d = decompose(&func(&mu), &func(&nu), Mode::Schur, &tol()).unwrap();
        for i in 0..k {
            let (want_r, want_s) = if nu[i] > 0.0 { (mu[i], 0.0) } else { (0.0, mu[i]) };
            prop_assert_eq!(d.regular.densities()[i].matrix()[(0, 0)].re, want_r);
            prop_assert_eq!(d.singular.densities()[i].matrix()[(0, 0)].re, want_s);
        }
    }

    #[test]
    fn functional_json_round_trip(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let alg = random_algebra(&mut rng, 3, 4);
        let f = PositiveFunctional::random(&alg, &mut rng, &tol());
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back: FunctionalJson = serde_json::from_str(&text).unwrap();
        let g = back.to_functional(&tol()).unwrap();
        for (a, b) in f.densities().iter().zip(g.densities()) {
            prop_assert!((a.matrix() - b.matrix()).norm() <= 1e-12);
        }
    }
}
