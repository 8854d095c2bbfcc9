//! GNS representation of a state on M_2 ⊕ M_1 that is faithful on one block
//! and vanishes on the other.

use lebesgue_toolkit::config::Tolerances;
use lebesgue_toolkit::functionals::{evaluate, gns, PositiveFunctional};
use lebesgue_toolkit::numkernel::{c, CMatrix};
use lebesgue_toolkit::staralg::{AlgebraElement, BlockAlgebra};

fn main() -> lebesgue_toolkit::error::Result<()> {
    let tol = Tolerances::default();
    let algebra = BlockAlgebra::new(vec![2, 1])?;
    let rho = CMatrix::from_row_slice(2, 2, &[c(0.7), c(0.2), c(0.2), c(0.3)]);
    let density = AlgebraElement::new(&algebra, vec![rho, CMatrix::zeros(1, 1)])?;
    let f = PositiveFunctional::new(&density, &tol)?;

    let data = gns(&f, &tol)?;
    println!("dim A            = {}", algebra.dimension());
    println!("dim L_f          = {}", data.kernel_basis.len());
    println!("dim A / L_f      = {}", data.quotient_dim);

    let mut rng = lebesgue_toolkit::sampling::rng(5);
    let x = AlgebraElement::random(&algebra, &mut rng);
    let lhs = evaluate(&f, &x)?;
    let rhs = (data.pi(&x) * &data.cyclic_vector)
        .dotc(&data.cyclic_vector)
        .conj();
    println!("f(x)             = {lhs:.6}");
    println!("<pi(x) xi, xi>   = {rhs:.6}");

    let report = data.check(&f);
    println!("homomorphism err = {:.2e}", report.homomorphism_error);
    println!("adjoint err      = {:.2e}", report.adjoint_error);
    println!("cyclic           = {}", report.cyclic);
    Ok(())
}
