//! Sampled one-step laws against the exact kernels, with and without a
//! deliberately biased generator.

use tasep::kernels::ALL_CASES;
use tasep::part;
use tasep::simulate::rng_for;
use tasep::validate::{mc_vs_exact, random_binding, McOptions};

fn main() -> tasep::Result<()> {
    let opts = McOptions {
        samples: 100_000,
        seed: 2024,
        threads: 0,
        bias: None,
    };
    for (k, case) in ALL_CASES.into_iter().enumerate() {
        let p = random_binding(case, 3, 1, &mut rng_for(17, k as u64));
        let good = mc_vs_exact(case, &part![1, 1], 1, &p, 3, &opts)?;
        let bad = mc_vs_exact(case, &part![1, 1], 1, &p, 3, &McOptions { bias: Some(1.3), ..opts.clone() })?;
        println!(
            "{:>11}: TV {:.4} p {:.3} | biased: TV {:.4} p {:.2e}",
            case.to_string(),
            good.tv,
            good.p_value,
            bad.tv,
            bad.p_value
        );
    }
    Ok(())
}
