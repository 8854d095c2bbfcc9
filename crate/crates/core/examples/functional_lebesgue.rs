//! Decompose a random positive functional on a block algebra with respect to
//! another and run the sampled certification.

use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::functionals::PositiveFunctional;
use lebesgue_toolkit::lebesgue::{decompose, is_unique, verify_decomposition};
use lebesgue_toolkit::opdecomp::Mode;
use lebesgue_toolkit::sampling;
use lebesgue_toolkit::staralg::BlockAlgebra;

fn main() -> lebesgue_toolkit::error::Result<()> {
    let tol = Tolerances::default();
    let algebra = BlockAlgebra::new(vec![1, 2, 3])?;
    let mut rng = sampling::rng(2024);
    let f = PositiveFunctional::random(&algebra, &mut rng, &tol);
    let g = PositiveFunctional::random(&algebra, &mut rng, &tol);

    let d = decompose(&f, &g, Mode::Schur, &tol)?;
    println!("algebra blocks: {:?}", algebra.block_dims());
    println!("rank of D_f per block:   {:?}", ranks(&f));
    println!("rank of D_g per block:   {:?}", ranks(&g));
    println!("rank of D_f_r per block: {:?}", ranks(&d.regular));
    println!("rank of D_f_s per block: {:?}", ranks(&d.singular));
    println!(
        "||f|| = {:.6} = {:.6} + {:.6}",
        f.norm(),
        d.regular.norm(),
        d.singular.norm()
    );

    let report = verify_decomposition(&f, &g, &d, 1, &tol);
    for c in &report.checks {
        println!("  {:<40} {}", c.name, if c.passed { "ok" } else { "FAIL" });
    }

    let (unique, alpha) = is_unique(&f, &g, &tol)?;
    println!("unique = {unique}, f_r <= {alpha:.4} g");
    Ok(())
}

fn ranks(f: &PositiveFunctional) -> Vec<usize> {
    f.densities().iter().map(|d| d.rank()).collect()
}
