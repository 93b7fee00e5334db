//! One-step and two-step kernels for every case at a fixed rational binding,
//! computed along each route and printed as exact fractions.

use tasep::exactalg::{q, q_to_string, Params};
use tasep::kernels::{chain, kernel, CaseId, KernelQuery, Route, ALL_CASES};
use tasep::part;

fn main() -> tasep::Result<()> {
    let p = Params::new(vec![q(1, 4), q(1, 5)], vec![q(1, 2), q(1, 3), q(1, 4)])
        .with_alpha(vec![q(0, 1), q(1, 7), q(1, 9), q(1, 11)])
        .with_beta(vec![q(1, 10), q(1, 12), q(1, 14), q(1, 16)]);
    let mu = part![1, 1];
    for case in ALL_CASES {
        let t = chain(case, 2, &mu, &p, 3, 4)?;
        println!("case {} from {}: {} states, tail {}", case, mu, t.probs.len(), q_to_string(&t.tail));
        for (lam, v) in t.probs.iter().take(4) {
            println!("  {:>9}  {}", lam.to_string(), q_to_string(v));
        }
    }

    // the three routes agree exactly
    let lam = part![2, 1, 1];
    for route in [Route::Tableau, Route::Operator, Route::ClosedFormChain] {
        let kq = KernelQuery::new(CaseId::C, 2, mu.clone(), lam.clone(), 3, &p).route(route);
        println!("C {} -> {} via {:?}: {}", mu, lam, route, q_to_string(&kernel(&kq)?));
    }
    Ok(())
}
