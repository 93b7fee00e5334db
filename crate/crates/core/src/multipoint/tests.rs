use super::*;
use crate::exactalg::{q, schur_expand, LaurentPoly, Params, Q};
use crate::kernels::{kernel, KernelQuery};
use crate::part;
use crate::validate::brute_force_event;

fn x(i: u32) -> LaurentPoly {
    LaurentPoly::var(VarId::x(i))
}

fn p(j: u32) -> LaurentPoly {
    LaurentPoly::var(VarId::p(j))
}

fn pinv(j: u32) -> LaurentPoly {
    LaurentPoly::var_pow(VarId::p(j), -1)
}

fn binding() -> Params<Q> {
    Params::new(vec![q(1, 3), q(1, 5)], vec![q(1, 2), q(2, 5), q(1, 4)])
}

fn bernoulli_binding() -> Params<Q> {
    Params::new(vec![q(1, 2), q(2, 5)], vec![q(7, 10), q(1, 2), q(3, 10)])
}

#[test]
fn case_a_determinant_expansion() {
    let xs: Vec<LaurentPoly> = (1..=3).map(x).collect();
    let with = |extra: &[LaurentPoly]| -> Vec<LaurentPoly> { xs.iter().chain(extra).cloned().collect() };
    let m = vec![
        vec![supersym_h(2, &with(&[pinv(1)]), &[]), supersym_h(3, &xs, &[])],
        vec![supersym_h(0, &with(&[pinv(1), pinv(2)]), &[]), supersym_h(1, &with(&[pinv(2)]), &[])],
    ];
    let d = &(&(&p(1) * &p(1)) * &p(2)) * &det(&m);
    let e = schur_expand(&d, 3, 6).unwrap();
    let one = LaurentPoly::int(1);
    assert_eq!(e.coeff(&part![2, 1]), &(&p(1) * &p(1)) * &p(2));
    assert_eq!(e.coeff(&part![2]), &(&p(1) * &p(2)) + &(&p(1) * &p(1)));
    assert_eq!(e.coeff(&part![1, 1]), &p(1) * &p(2));
    assert_eq!(e.coeff(&part![1]), &p(1) + &p(2));
    assert_eq!(e.coeff(&part![]), one);
    assert_eq!(e.coeffs.len(), 5);

    // the library value is the same determinant times ∏(1 − π_i x_m)
    let b = binding();
    let mq = MultiPointQuery::new(CaseId::A, part![2, 1], part![], 2, &b);
    let v = mp_pushing(&mq, None).unwrap().exact.unwrap();
    let val = |f: &LaurentPoly| {
        f.eval_with::<Q>(&|var| match var.family {
            crate::exactalg::Family::X => Some(if var.index <= 2 { b.x(var.index as usize) } else { q(0, 1) }),
            crate::exactalg::Family::P => Some(b.rate(var.index as usize)),
            _ => None,
        })
        .unwrap()
    };
    let norm: Q = (1..=2)
        .flat_map(|j| b.x.iter().map(move |xm| (j, xm.clone())))
        .fold(q(1, 1), |acc, (j, xm)| acc * (q(1, 1) - b.rate(j) * xm));
    assert_eq!(v, norm * val(&d));
    assert_eq!(v, brute_force_event(CaseId::A, true, &part![], &part![2, 1], 2, &b, 2).unwrap());
}

#[test]
fn case_d_determinant_expansion() {
    let xs: Vec<LaurentPoly> = (1..=3).map(x).collect();
    let nr = |j: u32| -pinv(j);
    let lam = [2i64, 1, 1];
    let nu = [1i64, 0, 0];
    let mut m = vec![vec![LaurentPoly::zero(); 3]; 3];
    for i in 1..=3usize {
        for j in 1..=3usize {
            let xp: Vec<LaurentPoly> = xs.iter().cloned().chain((1..j as u32).map(nr)).collect();
            let ym: Vec<LaurentPoly> = (1..=i as u32).map(nr).collect();
            m[i - 1][j - 1] = supersym_e(lam[i - 1] - nu[j - 1] + j as i64 - i as i64, &xp, &ym);
        }
    }
    let d = &(&(&p(1) * &p(2)) * &p(3)) * &det(&m);
    let e = schur_expand(&d, 3, 8).unwrap();
    let p123 = &(&p(1) * &p(2)) * &p(3);
    assert_eq!(e.coeff(&part![3]), p123);
    assert_eq!(e.coeff(&part![2, 1]), p123);
    assert_eq!(e.coeff(&part![2]), &(&(&p(1) * &p(2)) + &(&p(1) * &p(3))) + &(&p(2) * &p(3)));
    assert_eq!(e.coeff(&part![1, 1]), &(&p(1) * &p(2)) + &(&p(1) * &p(3)));
    assert_eq!(e.coeff(&part![1]), &(&p(1) + &p(2)) + &p(3));
    assert_eq!(e.coeff(&part![]), LaurentPoly::int(1));
    assert_eq!(e.coeffs.len(), 6);

    let b = bernoulli_binding();
    let mq = MultiPointQuery::new(CaseId::D, part![2, 1, 1], part![1], 2, &b);
    let v = mp_pushing(&mq, None).unwrap().exact.unwrap();
    assert_eq!(v, brute_force_event(CaseId::D, true, &part![1], &part![2, 1, 1], 2, &b, 3).unwrap());
}

#[test]
fn certain_events() {
    let one = q(1, 1);
    let b = binding();
    let empty = MultiPointQuery::new(CaseId::A, part![], part![], 0, &b).ell(2);
    assert_eq!(mp_pushing(&empty, None).unwrap().exact, Some(one.clone()));
    // after steps, G ≤ ∅ means nobody moved
    let still = MultiPointQuery::new(CaseId::A, part![], part![], 2, &b).ell(2);
    assert_eq!(mp_pushing(&still, None).unwrap().exact, Some(q(299, 500)));
    for case in [CaseId::B, CaseId::C] {
        let pp = if case == CaseId::B { bernoulli_binding() } else { binding() };
        let mq = MultiPointQuery::new(case, part![2, 1], part![2, 1], 2, &pp).ell(3);
        let v = mp_blocking(&mq, Some(&ContourSpec::residue())).unwrap();
        assert_eq!(v.exact, Some(one.clone()), "{}", case);
        let s = mp_blocking(&mq, None).unwrap();
        assert!((s.value - 1.0).abs() <= s.error_bound + 1e-15);
    }
    let c = binding().with_alpha(vec![q(0, 1), q(1, 10), q(-1, 10), q(1, 5)]);
    let mq = MultiPointQuery::new(CaseId::CanonicalC, part![2, 1], part![2, 1], 2, &c).ell(2);
    assert_eq!(mp_canonical(&mq, Some(&ContourSpec::residue())).unwrap().exact, Some(one));
}

#[test]
fn single_particle_case_c() {
    let b = Params::new(vec![q(1, 3)], vec![q(1, 2)]);
    let mq = MultiPointQuery::new(CaseId::C, part![1], part![], 1, &b);
    for spec in [ContourSpec::residue(), ContourSpec::series()] {
        let v = mp_blocking(&mq, Some(&spec)).unwrap();
        assert!((v.value - 1.0 / 6.0).abs() <= v.error_bound + 1e-15);
    }
    assert_eq!(
        mp_blocking(&mq, Some(&ContourSpec::residue())).unwrap().exact,
        Some(q(1, 6))
    );
}

#[test]
fn series_residue_quadrature_and_alt_agree() {
    let b = binding();
    let mq = MultiPointQuery::new(CaseId::C, part![2, 1], part![], 2, &b).ell(2);
    let res = mp_blocking(&mq, Some(&ContourSpec::residue())).unwrap();
    let ser = mp_blocking(&mq, None).unwrap();
    let quad = mp_blocking(&mq, Some(&ContourSpec::quadrature(None, 256))).unwrap();
    let alt = mp_case_c_alt(&mq, &ContourSpec::residue()).unwrap();
    let alt_q = mp_case_c_alt(&mq, &ContourSpec::quadrature(Some(q(1, 1)), 256)).unwrap();
    assert_eq!(res.exact, alt.exact);
    assert!(ser.error_bound < 1e-12);
    for v in [&ser, &quad, &alt_q] {
        assert!((v.value - res.value).abs() < 1e-10, "{:?} vs {:?}", v, res);
    }
    assert_eq!(
        res.exact.unwrap(),
        brute_force_event(CaseId::C, false, &part![], &part![2, 1], 2, &b, 2).unwrap()
    );
}

#[test]
fn bad_radius_is_rejected() {
    let b = binding();
    let mq = MultiPointQuery::new(CaseId::C, part![2, 1], part![], 2, &b).ell(2);
    // inside poles reach 1/2, the x-poles start at 3
    for r in [q(1, 4), q(4, 1)] {
        let err = mp_blocking(&mq, Some(&ContourSpec::quadrature(Some(r), 64))).unwrap_err();
        assert!(matches!(err, Error::Constraint(_)), "{:?}", err);
    }
    let spec: ContourSpec = "r=3,q=256".parse().unwrap();
    assert_eq!(spec.mode, ContourMode::Quadrature);
    assert_eq!(spec.radius, Some(q(3, 1)));
    // case A entries in the z-plane: poles at x and 1/π, all inside r = 3
    let a = MultiPointQuery::new(CaseId::A, part![2, 1], part![], 2, &b);
    let v = mp_pushing(&a, Some(&spec)).unwrap();
    let exact = mp_pushing(&a, None).unwrap();
    assert!((v.value - exact.value).abs() < 1e-10);
    assert!(mp_pushing(&a, Some(&"r=1".parse().unwrap())).is_err());
}

#[test]
fn direction_must_match_case() {
    let b = binding();
    let mq = MultiPointQuery::new(CaseId::C, part![1], part![], 1, &b).direction(Direction::Le);
    assert!(matches!(multipoint(&mq, None), Err(Error::Usage(_))));
}

#[test]
fn brute_force_agreement_small() {
    let geo = binding();
    let ber = bernoulli_binding();
    let alpha = geo.clone().with_alpha(vec![q(0, 1), q(1, 10), q(-1, 5), q(1, 7)]);
    let cases: [(CaseId, &Params<Q>); 5] = [
        (CaseId::A, &geo),
        (CaseId::B, &ber),
        (CaseId::C, &geo),
        (CaseId::D, &ber),
        (CaseId::CanonicalC, &alpha),
    ];
    let pairs = [
        (part![2, 1], part![]),
        (part![2, 2, 1], part![1]),
        (part![2, 1, 1], part![1, 1]),
        (part![1, 1], part![2, 1]),
    ];
    for (case, pp) in cases {
        for (t, s) in &pairs {
            let mq = MultiPointQuery::new(case, t.clone(), s.clone(), 2, pp).ell(3);
            let v = multipoint(&mq, Some(&ContourSpec::residue())).unwrap();
            let bf = brute_force_event(case, case.is_pushing(), s, t, 2, pp, 3).unwrap();
            assert_eq!(v.exact.unwrap(), bf, "{} {} {}", case, t, s);
        }
    }
}

#[test]
fn canonical_degenerations() {
    let b = binding();
    let zero = b.clone().with_alpha(vec![q(0, 1); 5]);
    for (t, s) in [(part![2, 1], part![]), (part![3, 1, 1], part![1, 1])] {
        let c = multipoint(&MultiPointQuery::new(CaseId::C, t.clone(), s.clone(), 2, &b).ell(3), Some(&ContourSpec::residue()))
            .unwrap();
        let k = multipoint(&MultiPointQuery::new(CaseId::CanonicalC, t, s, 2, &zero).ell(3), Some(&ContourSpec::residue()))
            .unwrap();
        assert_eq!(c.exact, k.exact);
    }
    // one particle, one step: P(G ≥ 1) = 1 − P(∅ | ∅)
    let a = Params::new(vec![q(1, 3)], vec![q(1, 2)]).with_alpha(vec![q(0, 1), q(1, 4)]);
    let v = mp_canonical(&MultiPointQuery::new(CaseId::CanonicalC, part![1], part![], 1, &a), Some(&ContourSpec::residue()))
        .unwrap();
    let stay = kernel(&KernelQuery::new(CaseId::CanonicalC, 1, part![], part![], 1, &a)).unwrap();
    assert_eq!(v.exact.unwrap(), q(1, 1) - stay);
}

#[test]
fn flagged_branching_small() {
    for lam in [part![1], part![2, 1], part![2, 2]] {
        for n in 1..=2 {
            assert!(flagged_branching_gap(&lam, n).unwrap().is_zero(), "{} {}", lam, n);
        }
    }
}

#[test]
fn continuous_small_time_and_mass() {
    let rates = [1.0, 0.7, 1.3];
    for case in [CaseId::A, CaseId::C] {
        let v = continuous_kernel(case, 1e-6, &[1, 0, 0], &[1, 0, 0], &rates, None).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "{} {}", case, v);
        let d = continuous_distribution(case, 0.5, &Partition::empty(), 2, &rates, 12).unwrap();
        let total: f64 = d.values().sum();
        assert!((total - 1.0).abs() < 1e-8, "{} {}", case, total);
        assert!(d.values().all(|&p| p > -1e-15));
    }
}

#[test]
fn continuous_modes_agree() {
    let rates = [1.0, 0.6];
    for case in [CaseId::A, CaseId::C] {
        for lam in [[2i64, 1], [3, 3], [1, 0]] {
            let r = continuous_kernel(case, 1.0, &[0, 0], &lam, &rates, None).unwrap();
            let q = continuous_kernel(case, 1.0, &[0, 0], &lam, &rates, Some(&ContourSpec::quadrature(None, 256))).unwrap();
            assert!((r - q).abs() < 1e-12, "{} {:?}: {} vs {}", case, lam, r, q);
        }
    }
}

#[test]
fn master_equation_and_boundaries() {
    let rates = [1.0, 1.0];
    for case in [CaseId::A, CaseId::C] {
        for lam in [[2i64, 1], [1, 1], [3, 0], [2, 2]] {
            let r = master_residual(case, 1.0, &[0, 0], &lam, &rates, 1e-4).unwrap();
            assert!(r <= 1e-6, "{} {:?}: {}", case, lam, r);
        }
        for lam in [[1i64, 1], [2, 2], [3, 3]] {
            let b = boundary_determinant(case, 1.0, &[0, 0], &lam, 1, &rates).unwrap();
            assert!(b.abs() <= 1e-12, "{} {:?}: {}", case, lam, b);
        }
    }
    let uneven = [0.8, 1.3, 0.5];
    for case in [CaseId::A, CaseId::C] {
        let b = boundary_determinant(case, 1.0, &[1, 0, 0], &[2, 2, 1], 1, &uneven).unwrap();
        assert!(b.abs() <= 1e-12, "{}: {}", case, b);
    }
}
