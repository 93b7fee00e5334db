//! Exact agreement of the tableau, operator and chained closed-form routes
//! with the enumeration oracle over the desk grid.

use tasep::validate::{route_agreement, GridSpec};

fn main() -> tasep::Result<()> {
    let smoke = std::env::args().any(|a| a == "--smoke");
    let spec = if smoke { GridSpec::smoke(7) } else { GridSpec::desk(7) };
    let t = std::time::Instant::now();
    let r = route_agreement(&spec)?;
    println!(
        "{} grid points, {} comparisons, {} mismatches in {:.1?}",
        r.points,
        r.comparisons,
        r.mismatches.len(),
        t.elapsed()
    );
    for m in r.mismatches.iter().take(5) {
        println!("  {:?}", m);
    }
    Ok(())
}
