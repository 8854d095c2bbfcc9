//! Lebesgue decomposition of one PSD matrix with respect to another, computed
//! twice: by the shorted operator and by the limit of parallel sums.

use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::numkernel::PsdOperator;
use lebesgue_toolkit::opdecomp::{operator_lebesgue, operators_singular, parallel_sum, Mode};
use lebesgue_toolkit::sampling;

fn main() -> lebesgue_toolkit::error::Result<()> {
    let tol = Tolerances::default();
    let mut rng = sampling::rng(7);

    // A of full rank, B of rank 2 in dimension 4
    let a = PsdOperator::from_computed(&sampling::psd(4, 4, &mut rng), &tol)?;
    let b = PsdOperator::from_computed(&sampling::psd(4, 2, &mut rng), &tol)?;

    let schur = operator_lebesgue(&a, &b, Mode::Schur, &tol)?;
    let iter = operator_lebesgue(&a, &b, Mode::Iterative, &tol)?;

    println!("rank A = {}, rank B = {}", a.rank(), b.rank());
    println!("regular part rank  = {}", schur.regular.rank());
    println!("singular part rank = {}", schur.singular.rank());
    println!("alpha_min          = {:.6}", schur.alpha_min);
    println!(
        "schur vs iterative = {:.2e} (after {} doublings)",
        (schur.regular.matrix() - iter.regular.matrix()).norm(),
        iter.iterations_used
    );

    let ps = parallel_sum(&schur.singular, &b, &tol)?;
    println!("|| A_s : B ||      = {:.2e}", ps.norm());
    println!(
        "A_s singular to B  = {}",
        operators_singular(&schur.singular, &b, &tol)?
    );
    Ok(())
}
