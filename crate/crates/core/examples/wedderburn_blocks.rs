//! Recover the block structure of a hidden ⊕ M_{n_i} algebra from generators
//! conjugated by a random unitary, then decompose the group algebra of S_3.

use lebesgue_toolkit::numkernel::CMatrix;
use lebesgue_toolkit::sampling;
use lebesgue_toolkit::staralg::{
    group_algebra, wedderburn_decompose, CayleyTable, GeneratorPresentation, WedderburnOptions,
};

fn main() -> lebesgue_toolkit::error::Result<()> {
    let mut rng = sampling::rng(11);
    // M_2 ⊕ M_2 ⊕ M_1 on C^7, the first summand acting twice
    let layout = [2usize, 2, 2, 1];
    let n: usize = layout.iter().sum();
    let u = sampling::unitary(n, &mut rng);
    let mut gens = Vec::new();
    for _ in 0..3 {
        let x = sampling::ginibre(2, 2, &mut rng);
        let y = sampling::ginibre(2, 2, &mut rng);
        let z = sampling::ginibre(1, 1, &mut rng);
        let mut m = CMatrix::zeros(n, n);
        m.view_mut((0, 0), (2, 2)).copy_from(&x);
        m.view_mut((2, 2), (2, 2)).copy_from(&x);
        m.view_mut((4, 4), (2, 2)).copy_from(&y);
        m.view_mut((6, 6), (1, 1)).copy_from(&z);
        gens.push(&u * m * u.adjoint());
    }
    let hidden = GeneratorPresentation::new(n, gens)?;
    let res = wedderburn_decompose(&hidden, 0, &WedderburnOptions::default())?;
    println!(
        "hidden algebra: dims {:?}, multiplicities {:?}",
        res.block_dims, res.multiplicities
    );
    println!("residual {:.2e}", res.residual);

    let s3 = group_algebra(&CayleyTable::symmetric3())?;
    let res = wedderburn_decompose(&s3, 0, &WedderburnOptions::default())?;
    println!(
        "C[S_3]: irreducible dims {:?}, multiplicities {:?}",
        res.block_dims, res.multiplicities
    );
    println!(
        "uniqueness certificate: max irreducible dimension = {}",
        res.max_irreducible_dim()
    );
    Ok(())
}
