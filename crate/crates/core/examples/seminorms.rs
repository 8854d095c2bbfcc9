//! σ_F seminorms on a block algebra, the greatest C*-seminorm, and which
//! positive functionals are bounded by which seminorm.

use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::functionals::{
    representability_bound, representable, representable_zero_product, PositiveFunctional,
};
use lebesgue_toolkit::numkernel::{c, PsdOperator};
use lebesgue_toolkit::sampling;
use lebesgue_toolkit::staralg::{
    gamma_norm, seminorm_sigma_f, AlgebraElement, BlockAlgebra, ZeroProductAlgebra,
};

fn main() -> lebesgue_toolkit::error::Result<()> {
    let tol = Tolerances::default();
    let algebra = BlockAlgebra::new(vec![1, 2, 3])?;
    let mut rng = sampling::rng(3);
    let x = AlgebraElement::random(&algebra, &mut rng);
    println!("block norms     {:?}", x.block_norms());
    for f in [vec![], vec![0], vec![1, 2], vec![0, 1, 2]] {
        println!("sigma_{f:?} = {:.6}", seminorm_sigma_f(&x, &f)?);
    }
    println!("gamma          = {:.6}", gamma_norm(&x));

    // density living on blocks 0 and 2 only
    let f = PositiveFunctional::from_blocks(
        &algebra,
        vec![
            PsdOperator::diag(&[0.5], &tol)?,
            PsdOperator::zero(2),
            PsdOperator::diag(&[0.1, 0.2, 0.2], &tol)?,
        ],
    )?;
    let family = vec![vec![0, 1], vec![0, 2]];
    println!(
        "f representable in {family:?}: {}",
        representable(&f, &family)
    );
    println!(
        "K for F = [0, 2]: {:?}",
        representability_bound(&f, &[0, 2])
    );
    println!(
        "K for F = [0, 1]: {:?}",
        representability_bound(&f, &[0, 1])
    );

    let z = ZeroProductAlgebra { dim: 3 };
    println!(
        "zero-product algebra: phi = 0 representable {}, phi = e_1* representable {}",
        representable_zero_product(&z, &[c(0.0); 3]),
        representable_zero_product(&z, &[c(1.0), c(0.0), c(0.0)])
    );
    Ok(())
}
