//! Tableau counts and generating functions for a few small shapes.

use tasep::partitions::SkewShape;
use tasep::tableaux::{gen_G, gen_flagged_schur, gen_g, gen_j, list_rpp, list_set_valued, list_ssyt, DEFAULT_CONVENTION};
use tasep::{part, Partition};

fn main() -> tasep::Result<()> {
    let shape = SkewShape::straight(part![2, 1]);
    println!(
        "shape (2,1), entries <= 3: {} SSYT, {} RPP, {} set-valued",
        list_ssyt(&shape, 3).len(),
        list_rpp(&shape, 3).len(),
        list_set_valued(&shape, 3).len()
    );
    println!("g_(1,1)(x1)    = {}", gen_g(&SkewShape::straight(part![1, 1]), 1, true));
    println!("j_(2)(x1)      = {}", gen_j(&SkewShape::straight(part![2]), 1, true));
    println!("g_(2,1)(x1,x2) = {}", gen_g(&shape, 2, false));
    let skew = SkewShape::new(part![2, 1], part![1])?;
    println!("G_(2,1)/(1)(x1,x2) = {}", gen_G(&skew, 2, true, true, DEFAULT_CONVENTION));
    let lam: Partition = "[2,1]".parse()?;
    println!("flagged s_(2,1), flags 1,2 = {}", gen_flagged_schur(&lam, 2, &[1, 2])?);
    Ok(())
}
