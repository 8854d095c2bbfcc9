//! Extend a functional from a corner eAe to the whole algebra without
//! increasing its norm, and restrict it back.

use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::functionals::{
    corner_extension, evaluate, restrict_to_corner, Corner, CornerFunctional,
};
use lebesgue_toolkit::numkernel::{diag_matrix, PsdOperator};
use lebesgue_toolkit::sampling;
use lebesgue_toolkit::staralg::{AlgebraElement, BlockAlgebra};

fn main() -> lebesgue_toolkit::error::Result<()> {
    let tol = Tolerances::default();
    let algebra = BlockAlgebra::new(vec![3, 2])?;
    let e = AlgebraElement::new(
        &algebra,
        vec![diag_matrix(&[1.0, 1.0, 0.0]), diag_matrix(&[0.0, 1.0])],
    )?;
    let corner = Corner::new(&e, &tol)?;
    println!("corner ranks {:?}", corner.ranks());

    let mut rng = sampling::rng(8);
    let w0 = PsdOperator::from_computed(&sampling::psd(2, 2, &mut rng), &tol)?;
    let w1 = PsdOperator::diag(&[0.4], &tol)?;
    let fc = CornerFunctional::new(&corner, vec![w0, w1])?;

    let ext = corner_extension(&fc, &tol)?;
    println!("||f on corner|| = {:.6}", fc.norm());
    println!("||extension||   = {:.6}", ext.norm());

    let x = AlgebraElement::random(&algebra, &mut rng);
    let exe = e.mul(&x)?.mul(&e)?;
    println!("ext(x)           = {:.6}", evaluate(&ext, &x)?);
    println!(
        "f_corner(exe)    = {:.6}",
        fc.evaluate_compressed(&corner.compress(&exe)?)
    );

    let back = restrict_to_corner(&ext, &corner, &tol)?;
    let drift: f64 = back
        .density
        .iter()
        .zip(&fc.density)
        .map(|(a, b)| (a.matrix() - b.matrix()).norm())
        .sum();
    println!("restriction of extension drift = {drift:.2e}");
    Ok(())
}
