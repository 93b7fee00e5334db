//! Continuous-time kernels for the blocking (C) and pushing (A) limits.
//! Vectors need not be partitions: the determinant extends to all integer
//! vectors, which is what the master equation is stated for.

use super::contour::{adaptive_trapezoid, exp_series, Integrand};
use super::{ContourMode, ContourSpec};
use crate::error::{Error, Result};
use crate::exactalg::{det_f64, q_to_f64};
use crate::kernels::CaseId;
use crate::partitions::Partition;
use std::collections::BTreeMap;

fn check(case: CaseId, t: f64, mu: &[i64], lambda: &[i64], rates: &[f64]) -> Result<()> {
    if !matches!(case, CaseId::A | CaseId::C) {
        return Err(Error::Usage(format!("continuous kernels exist for A and C, not {}", case)));
    }
    if !(t > 0.0) {
        return Err(Error::Constraint(format!("t > 0 fails: {}", t)));
    }
    if mu.len() != lambda.len() {
        return Err(Error::Usage("mu and lambda need the same length".into()));
    }
    if rates.len() < lambda.len() {
        return Err(Error::Usage(format!("{} rates for {} particles", rates.len(), lambda.len())));
    }
    if rates[..lambda.len()].iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Constraint("rates pi_j > 0 fail".into()));
    }
    Ok(())
}

/// Entry (i, j), 1-based, with exponent d = (λ_i − i) − (μ_j − j).
fn entry(case: CaseId, i: usize, j: usize, d: i64, rates: &[f64]) -> Result<Integrand<f64>> {
    let mut ig = Integrand::new(1.0);
    match case {
        CaseId::C => {
            // β_k = π_{k+1}; ∏_{k<i}(1 − β_k/w) / ∏_{k<j}(1 − β_k/w)
            for k in 1..i {
                ig = ig.one_minus_over_w(rates[k], 1)?;
            }
            for k in 1..j {
                ig = ig.one_minus_over_w(rates[k], -1)?;
            }
        }
        _ => {
            // ∏_{k<j}(1 − w/π_k) / ∏_{k<i}(1 − w/π_k)
            for k in 1..j {
                ig = ig.one_minus_w_over(rates[k - 1], 1)?;
            }
            for k in 1..i {
                ig = ig.one_minus_w_over(rates[k - 1], -1)?;
            }
        }
    }
    ig.w_pow(-(d as i32) - 1)
}

fn radius(case: CaseId, ell: usize, rates: &[f64], spec: &ContourSpec) -> f64 {
    if let Some(r) = &spec.radius {
        return q_to_f64(r);
    }
    match case {
        CaseId::C => rates[1..ell.max(1)].iter().fold(0.0f64, |a, &b| a.max(b.abs())) + 1.0,
        _ => rates[..ell].iter().fold(f64::INFINITY, |a, &b| a.min(b.abs())) / 2.0,
    }
}

fn matrix(case: CaseId, t: f64, mu: &[i64], lambda: &[i64], rates: &[f64], spec: &ContourSpec) -> Result<Vec<Vec<f64>>> {
    let ell = lambda.len();
    let r = radius(case, ell, rates, spec);
    let ex = exp_series(t);
    let mut m = vec![vec![0.0; ell]; ell];
    for i in 1..=ell {
        for j in 1..=ell {
            let d = (lambda[i - 1] - i as i64) - (mu[j - 1] - j as i64);
            let ig = entry(case, i, j, d, rates)?;
            m[i - 1][j - 1] = match spec.mode {
                ContourMode::Quadrature => adaptive_trapezoid(&ig, r, spec.points, t)?.0,
                ContourMode::Residue => {
                    ig.check_radius(r)?;
                    ig.residues(&ex)
                }
                ContourMode::Series => {
                    return Err(Error::Usage("continuous kernels use residue or quadrature mode".into()))
                }
            };
        }
    }
    Ok(m)
}

fn prefactor(t: f64, mu: &[i64], lambda: &[i64], rates: &[f64]) -> f64 {
    let ell = lambda.len();
    let decay: f64 = rates[..ell].iter().map(|p| (-p * t).exp()).product();
    let boxes: f64 = (0..ell).map(|i| rates[i].powi((lambda[i] - mu[i]) as i32)).product();
    decay * boxes
}

/// P(G(t) = λ | G(0) = μ) for the continuous-time limit of Case A or C.
pub fn continuous_kernel(
    case: CaseId,
    t: f64,
    mu: &[i64],
    lambda: &[i64],
    rates: &[f64],
    contour: Option<&ContourSpec>,
) -> Result<f64> {
    check(case, t, mu, lambda, rates)?;
    let spec = contour.cloned().unwrap_or_else(ContourSpec::residue);
    let m = matrix(case, t, mu, lambda, rates, &spec)?;
    Ok(prefactor(t, mu, lambda, rates) * det_f64(&m))
}

/// Kernel values for every λ ⊇ μ (componentwise) with λ_1 ≤ max_first.
pub fn continuous_distribution(
    case: CaseId,
    t: f64,
    mu: &Partition,
    ell: usize,
    rates: &[f64],
    max_first: u32,
) -> Result<BTreeMap<Partition, f64>> {
    let m: Vec<i64> = mu.padded(ell).into_iter().map(i64::from).collect();
    let mut out = BTreeMap::new();
    for lam in crate::partitions::partitions_in_box(ell, max_first) {
        if !lam.contains(mu) {
            continue;
        }
        let l: Vec<i64> = lam.padded(ell).into_iter().map(i64::from).collect();
        out.insert(lam, continuous_kernel(case, t, &m, &l, rates, None)?);
    }
    Ok(out)
}

/// |dP/dt − (−Σ_s π_s P(λ) + Σ_s π_s P(λ − ε_s))| by central differences.
pub fn master_residual(case: CaseId, t: f64, mu: &[i64], lambda: &[i64], rates: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0 && h < t) {
        return Err(Error::Usage(format!("step h = {} must lie in (0, t)", h)));
    }
    let p = |tt: f64, l: &[i64]| continuous_kernel(case, tt, mu, l, rates, None);
    let deriv = (p(t + h, lambda)? - p(t - h, lambda)?) / (2.0 * h);
    let here = p(t, lambda)?;
    let mut rhs = 0.0;
    for s in 0..lambda.len() {
        let mut l = lambda.to_vec();
        l[s] -= 1;
        rhs += rates[s] * (p(t, &l)? - here);
    }
    Ok((deriv - rhs).abs())
}

/// The boundary condition folded into one determinant by multilinearity
/// (s is 1-based, λ_s = λ_{s+1} required):
/// C: π_s P(λ − ε_s) − π_{s+1} P(λ); A: π_s P(λ + ε_{s+1}) − π_{s+1} P(λ).
pub fn boundary_determinant(case: CaseId, t: f64, mu: &[i64], lambda: &[i64], s: usize, rates: &[f64]) -> Result<f64> {
    check(case, t, mu, lambda, rates)?;
    let ell = lambda.len();
    if s == 0 || s >= ell || lambda[s - 1] != lambda[s] {
        return Err(Error::Usage(format!("boundary condition needs lambda_{} = lambda_{}", s, s + 1)));
    }
    let spec = ContourSpec::residue();
    let base = matrix(case, t, mu, lambda, rates, &spec)?;
    let mut moved = lambda.to_vec();
    let row = if case == CaseId::C {
        moved[s - 1] -= 1;
        s - 1
    } else {
        moved[s] += 1;
        s
    };
    let shifted = matrix(case, t, mu, &moved, rates, &spec)?;
    let mut m = base.clone();
    // C: π_s·π^{(λ−ε_s)/μ} = π^{λ/μ}; A: π_s·π^{(λ+ε_{s+1})/μ} = π_s π_{s+1} π^{λ/μ}
    let (a, b, scale) = if case == CaseId::C {
        (1.0, rates[s], 1.0)
    } else {
        (rates[s - 1], 1.0, rates[s])
    };
    for j in 0..ell {
        m[row][j] = a * shifted[row][j] - b * base[row][j];
    }
    Ok(scale * prefactor(t, mu, lambda, rates) * det_f64(&m))
}
