//! Multi-point probabilities P(G(n) <= ν) (pushing) and P(G(n) >= ν)
//! (blocking) in the series, residue and quadrature modes, checked against
//! direct summation of the chain.

use tasep::exactalg::{q, q_to_string, Params};
use tasep::kernels::CaseId;
use tasep::multipoint::{mp_case_c_alt, multipoint, ContourSpec, MultiPointQuery};
use tasep::part;
use tasep::validate::brute_force_event;

fn main() -> tasep::Result<()> {
    let p = Params::new(vec![q(1, 5), q(1, 6)], vec![q(1, 2), q(1, 3), q(1, 4)])
        .with_alpha(vec![q(0, 1), q(1, 9), q(1, 10), q(1, 11)]);
    let cases = [
        (CaseId::A, part![2, 1], part![]),
        (CaseId::D, part![2, 1, 1], part![]),
        (CaseId::C, part![2, 2], part![1, 1]),
        (CaseId::B, part![2, 1], part![1]),
        (CaseId::CanonicalC, part![2, 2], part![1, 1]),
    ];
    for (case, nu, mu) in cases {
        let mq = MultiPointQuery::new(case, nu.clone(), mu.clone(), 2, &p).ell(3);
        let v = multipoint(&mq, None)?;
        let brute: tasep::exactalg::Q = brute_force_event(case, case.is_pushing(), &mu, &nu, 2, &p, 3)?;
        println!(
            "{:>11} nu={} mu={}: {} (exact {}), brute force {}",
            case.to_string(),
            nu,
            mu,
            v.value,
            v.exact.as_ref().map(q_to_string).unwrap_or_default(),
            q_to_string(&brute)
        );
    }

    let mq = MultiPointQuery::new(CaseId::C, part![2, 2], part![1, 1], 2, &p).ell(3);
    for spec in [ContourSpec::residue(), ContourSpec::quadrature(None, 64)] {
        let v = multipoint(&mq, Some(&spec))?;
        let alt = mp_case_c_alt(&mq, &spec)?;
        println!("C {:>10}: {:.15} alt {:.15} (nodes {})", spec.mode.to_string(), v.value, alt.value, v.resolution);
    }
    Ok(())
}
