//! Noncommutative operators: a blocking word on a basis vector, symbolic and
//! bound, and the Knuth relation checks.

use tasep::exactalg::q;
use tasep::operators::{apply_word, check_weak_knuth, Engine, OpKind, OpParams, OperatorWord, PartitionVector};
use tasep::part;

fn main() -> tasep::Result<()> {
    let start = PartitionVector::basis(part![1, 1]);
    for w in ["U2 U1 U1", "U1 U2 U1"] {
        let word: OperatorWord = w.parse()?;
        println!("{} (1,1) = {}", word, apply_word(&word, &start, &OpParams::symbolic(), None)?);
    }

    let bound = OpParams::bound(vec![q(0, 1), q(1, 2), q(1, 3)], vec![q(0, 1), q(1, 5), q(1, 7)]);
    let word: OperatorWord = "U2 U1 U1".parse()?;
    let mut e = Engine::new(bound, None);
    println!("bound: {}", e.apply_word(&word, &PartitionVector::basis(part![1, 1])));

    let weak = check_weak_knuth(OpKind::Blocking, 3, 3, &OpParams::symbolic(), None, false)?;
    println!(
        "weak Knuth for U on a 3x3 box: {} instances, {} failures",
        weak.instances,
        weak.failures.len()
    );
    let strong = check_weak_knuth(OpKind::Blocking, 2, 2, &OpParams::symbolic(), None, true)?;
    println!("strong Knuth for U on a 2x2 box: {} failures", strong.failures.len());
    if let Some(f) = strong.failures.first() {
        println!("  e.g. {} at {}: {}", f.relation, f.start, f.difference);
    }
    Ok(())
}
