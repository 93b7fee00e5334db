//! Exact n-step transition kernels for the four TASEP variants and the two
//! canonical processes, by three independent routes: tableau generating
//! functions, operator dynamics, and chained single-step closed forms.

use crate::error::{Error, Result};
use crate::exactalg::{LaurentPoly, Params, RationalFn, Ring, Scalar, VarId};
use crate::operators::{Engine, OpKind, OpParams, PartitionVector};
use crate::partitions::{interval, partitions_up_to, Partition, SkewShape};
use crate::tableaux::{canonical_g_ds, dual_g, dual_j, IndexConvention, DEFAULT_CONVENTION};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseId {
    /// geometric jumps, pushing
    A,
    /// Bernoulli jumps, blocking
    B,
    /// geometric jumps, blocking
    C,
    /// Bernoulli jumps, pushing
    D,
    /// geometric blocking with position-dependent jump law (α)
    CanonicalC,
    /// Bernoulli blocking with position-dependent jump law (β)
    CanonicalB,
}

pub const ALL_CASES: [CaseId; 6] = [
    CaseId::A,
    CaseId::B,
    CaseId::C,
    CaseId::D,
    CaseId::CanonicalC,
    CaseId::CanonicalB,
];

impl CaseId {
    pub fn is_geometric(self) -> bool {
        matches!(self, CaseId::A | CaseId::C | CaseId::CanonicalC)
    }

    pub fn is_pushing(self) -> bool {
        matches!(self, CaseId::A | CaseId::D)
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseId::A => "A",
            CaseId::B => "B",
            CaseId::C => "C",
            CaseId::D => "D",
            CaseId::CanonicalC => "canonical-C",
            CaseId::CanonicalB => "canonical-B",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => CaseId::A,
            "b" => CaseId::B,
            "c" => CaseId::C,
            "d" => CaseId::D,
            "canonical-c" | "canonicalc" | "cc" => CaseId::CanonicalC,
            "canonical-b" | "canonicalb" | "cb" => CaseId::CanonicalB,
            _ => return Err(Error::Usage(format!("unknown case {:?}", s))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    Tableau,
    Operator,
    ClosedFormChain,
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "tableau" => Route::Tableau,
            "operator" => Route::Operator,
            "chain" | "closed-form" | "closedformchain" => Route::ClosedFormChain,
            _ => return Err(Error::Usage(format!("unknown route {:?}", s))),
        })
    }
}

/// Order in which particles attempt their jumps within one time step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpdateOrder {
    /// particle 1 first
    LeaderFirst,
    /// particle ℓ first
    TrailerFirst,
}

impl UpdateOrder {
    /// Geometric cases update the last particle first, Bernoulli cases the first.
    pub fn default_for(case: CaseId) -> Self {
        if case.is_geometric() {
            UpdateOrder::TrailerFirst
        } else {
            UpdateOrder::LeaderFirst
        }
    }

    pub fn sequence(self, ell: usize) -> Vec<usize> {
        match self {
            UpdateOrder::LeaderFirst => (1..=ell).collect(),
            UpdateOrder::TrailerFirst => (1..=ell).rev().collect(),
        }
    }
}

/// Parameters: `x` per time step, `rate` holds π_j (geometric) or ρ_j
/// (Bernoulli), `alpha` the position field of canonical C (α_0 at index 0),
/// `beta` the position field of canonical B.
#[derive(Clone, Debug)]
pub struct KernelQuery<'a, S> {
    pub case: CaseId,
    pub n: usize,
    pub mu: Partition,
    pub lambda: Partition,
    pub ell: usize,
    pub params: &'a Params<S>,
    pub route: Route,
    pub conv: IndexConvention,
}

impl<'a, S: Scalar> KernelQuery<'a, S> {
    pub fn new(case: CaseId, n: usize, mu: Partition, lambda: Partition, ell: usize, params: &'a Params<S>) -> Self {
        KernelQuery {
            case,
            n,
            mu,
            lambda,
            ell,
            params,
            route: Route::ClosedFormChain,
            conv: DEFAULT_CONVENTION,
        }
    }

    pub fn route(mut self, r: Route) -> Self {
        self.route = r;
        self
    }

    pub fn convention(mut self, c: IndexConvention) -> Self {
        self.conv = c;
        self
    }
}

fn check_shape(ell: usize, mu: &Partition, lam: &Partition) -> Result<()> {
    if mu.len() > ell || lam.len() > ell {
        return Err(Error::Constraint(format!(
            "partitions need at most {} rows, got {} and {}",
            ell, mu, lam
        )));
    }
    Ok(())
}

/// Exact n-step kernel P(λ | μ) along the requested route.
pub fn kernel<S: Scalar + 'static>(q: &KernelQuery<'_, S>) -> Result<S> {
    check_shape(q.ell, &q.mu, &q.lambda)?;
    if q.n == 0 {
        return Ok(if q.mu == q.lambda { S::one() } else { S::zero() });
    }
    if q.params.n() < q.n {
        return Err(Error::Usage(format!(
            "{} steps need {} time parameters, got {}",
            q.n,
            q.n,
            q.params.n()
        )));
    }
    // rates vanish beyond the ℓ particles present
    let mut params = q.params.clone();
    params.rate.truncate(q.ell);
    let q = &KernelQuery {
        params: &params,
        ..q.clone()
    };
    match q.route {
        Route::Tableau => kernel_tableau(q),
        Route::Operator => kernel_operator(q),
        Route::ClosedFormChain => {
            let cap = q.lambda.first().max(q.mu.first());
            let t = chain(q.case, q.n, &q.mu, q.params, q.ell, cap)?;
            Ok(t.prob(&q.lambda))
        }
    }
}

fn rate_power<S: Scalar>(p: &Params<S>, mu: &Partition, lam: &Partition) -> S {
    let mut w = S::one();
    for j in 1..=lam.len() {
        let d = lam.part(j) - mu.part(j);
        if d > 0 {
            w = w * p.rate(j).pow(d);
        }
    }
    w
}

/// ∏ over boxes (r, c) of λ/μ of (f(c−1) + rate_r).
fn box_power<S: Scalar>(p: &Params<S>, mu: &Partition, lam: &Partition, field: impl Fn(usize) -> S) -> S {
    let mut w = S::one();
    for (r, c) in SkewShape::new(lam.clone(), mu.clone()).map(|s| s.cells()).unwrap_or_default() {
        w = w * (field(c as usize - 1) + p.rate(r));
    }
    w
}

fn kernel_tableau<S: Scalar>(q: &KernelQuery<'_, S>) -> Result<S> {
    let (mu, lam, ell) = (&q.mu, &q.lambda, q.ell);
    if !lam.contains(mu) {
        return Ok(S::zero());
    }
    let p = q.params.truncate_time(q.n);
    let xs: Vec<S> = p.x.clone();
    let one = S::one();
    let plain = |x: Vec<S>, alpha: Vec<S>, beta: Vec<S>| Params {
        x,
        rate: Vec::new(),
        alpha,
        beta,
    };
    let shifted = |from: usize| -> Vec<S> {
        let mut v = vec![S::zero()];
        v.extend((1..=ell).map(|j| p.rate(j + from)));
        v
    };
    Ok(match q.case {
        CaseId::A => {
            let mut beta = vec![S::zero()];
            for j in 1..=ell {
                let r = p.rate(j);
                if r.is_zero() {
                    return Err(Error::Constraint(format!("pi_{} must be nonzero", j)));
                }
                beta.push(r.inv());
            }
            let mut pre = rate_power(&p, mu, lam);
            for x in &xs {
                for j in 1..=ell {
                    pre = pre * (one.clone() - p.rate(j) * x.clone());
                }
            }
            let shape = SkewShape::new(lam.clone(), mu.clone())?;
            pre * dual_g(&shape, &plain(xs.clone(), Vec::new(), beta))
        }
        CaseId::C | CaseId::CanonicalC => {
            let alpha = if q.case == CaseId::C {
                Vec::new()
            } else {
                if !p.alpha(0).is_zero() {
                    return Err(Error::Usage(
                        "the tableau route needs alpha_0 = 0; use the chain route".into(),
                    ));
                }
                p.alpha.clone()
            };
            let mut pre = if q.case == CaseId::C {
                rate_power(&p, mu, lam)
            } else {
                box_power(&p, mu, lam, |k| p.alpha(k))
            };
            for x in &xs {
                pre = pre * (one.clone() - p.rate(1) * x.clone());
            }
            pre * canonical_g_ds(lam, mu, &plain(xs.clone(), alpha, shifted(1)), q.conv)
        }
        CaseId::B | CaseId::CanonicalB => {
            if !SkewShape::new(lam.clone(), mu.clone())?.is_vertical_strip() && q.n == 1 {
                return Ok(S::zero());
            }
            let beta = if q.case == CaseId::B {
                Vec::new()
            } else {
                p.beta.clone()
            };
            let mut pre = if q.case == CaseId::B {
                rate_power(&p, mu, lam)
            } else {
                box_power(&p, mu, lam, |k| p.beta(k))
            };
            for x in &xs {
                pre = pre / (one.clone() + p.rate(1) * x.clone());
            }
            let g = canonical_g_ds(
                &lam.conjugate(),
                &mu.conjugate(),
                &plain(xs.clone(), shifted(1), beta),
                q.conv,
            );
            pre * g
        }
        CaseId::D => {
            let mut alpha = vec![S::zero()];
            for j in 1..=ell {
                let r = p.rate(j);
                if r.is_zero() {
                    return Err(Error::Constraint(format!("rho_{} must be nonzero", j)));
                }
                alpha.push(r.inv());
            }
            let mut pre = rate_power(&p, mu, lam);
            for x in &xs {
                for j in 1..=ell {
                    pre = pre / (one.clone() + p.rate(j) * x.clone());
                }
            }
            let shape = SkewShape::new(lam.conjugate(), mu.conjugate())?;
            pre * dual_j(&shape, &plain(xs.clone(), alpha, Vec::new()))
        }
    })
}

/// (1 − xU_j)^{-1} on a vector, U = U^{(α,β)}; rows with no blocking neighbour
/// are truncated at `size_cap`.
pub fn resolvent_blocking<S: Scalar + 'static>(
    j: usize,
    v: &PartitionVector<S>,
    x: &S,
    op: &OpParams<S>,
    size_cap: u32,
) -> PartitionVector<S> {
    let one = S::one();
    let mut out = PartitionVector::zero();
    for (lam, c0) in v.terms() {
        let mut cur = lam.clone();
        let mut c = c0.clone();
        loop {
            if cur.size() > size_cap {
                break;
            }
            if cur.is_addable(j) {
                let a = op.alpha(cur.part(j) as usize);
                c = c / (one.clone() + x.clone() * a);
                out.add_term(cur.clone(), c.clone());
                c = c * x.clone();
                cur = cur.add_box(j).expect("addable");
            } else {
                let b = op.beta(j - 1);
                c = c / (one.clone() - x.clone() * b);
                out.add_term(cur.clone(), c);
                break;
            }
        }
    }
    out
}

/// (1 − xu_j)^{-1} = Σ_k x^k u_j^k, truncated at `size_cap`.
fn resolvent_pushing<S: Scalar + 'static>(
    e: &mut Engine<S>,
    j: usize,
    v: &PartitionVector<S>,
    x: &S,
) -> PartitionVector<S> {
    let mut out = v.clone();
    let mut cur = v.clone();
    loop {
        cur = e.apply_op(OpKind::Pushing, j, &cur).scale(x);
        if cur.is_empty() {
            break;
        }
        out = out + cur.clone();
    }
    out
}

fn kernel_operator<S: Scalar + 'static>(q: &KernelQuery<'_, S>) -> Result<S> {
    let (mu, lam, ell) = (&q.mu, &q.lambda, q.ell);
    if !lam.contains(mu) {
        return Ok(S::zero());
    }
    let table = operator_table(q.case, q.n, mu, q.params, ell, lam.size())?;
    Ok(table.coeff(lam))
}

/// Operator-route kernel values for every λ with |λ| ≤ size_cap.
pub fn operator_table<S: Scalar + 'static>(
    case: CaseId,
    n: usize,
    mu: &Partition,
    p: &Params<S>,
    ell: usize,
    size_cap: u32,
) -> Result<PartitionVector<S>> {
    let one = S::one();
    let rates = |f: &dyn Fn(usize) -> Result<S>| -> Result<Vec<S>> {
        let mut v = vec![S::zero()];
        for j in 1..=ell {
            v.push(f(j)?);
        }
        Ok(v)
    };
    let inv_rate = |j: usize| {
        let r = p.rate(j);
        if r.is_zero() {
            Err(Error::Constraint(format!("rate {} must be nonzero", j)))
        } else {
            Ok(r.inv())
        }
    };
    let next_rate = |j: usize| Ok(p.rate(j + 1));
    let op = match case {
        CaseId::A | CaseId::D => OpParams::bound(Vec::new(), rates(&inv_rate)?),
        CaseId::B | CaseId::C => OpParams::bound(Vec::new(), rates(&next_rate)?),
        CaseId::CanonicalC => OpParams::bound(p.alpha.clone(), rates(&next_rate)?),
        CaseId::CanonicalB => OpParams::bound(p.beta.clone(), rates(&next_rate)?),
    };
    let mut v = PartitionVector::basis(mu.clone());
    let mut engine = Engine::new(op.clone(), Some(size_cap));
    for i in 1..=n {
        let x = p.x(i);
        match case {
            CaseId::A => {
                // (1 − xu_1)^{-1} ⋯ (1 − xu_ℓ)^{-1}, rightmost first
                for j in (1..=ell).rev() {
                    v = resolvent_pushing(&mut engine, j, &v, &x);
                }
            }
            CaseId::C | CaseId::CanonicalC => {
                for j in (1..=ell).rev() {
                    v = resolvent_blocking(j, &v, &x, &op, size_cap);
                }
            }
            CaseId::B | CaseId::CanonicalB | CaseId::D => {
                // (1 + xτ_ℓ) ⋯ (1 + xτ_1), τ_1 first
                let kind = if case == CaseId::D {
                    OpKind::Pushing
                } else {
                    OpKind::Blocking
                };
                for j in 1..=ell {
                    let step = engine.apply_op(kind, j, &v).scale(&x);
                    v = v + step.truncate(size_cap);
                }
            }
        }
        v = v.truncate(size_cap);
    }
    let mut out = PartitionVector::zero();
    for (lam, c) in v.terms() {
        if lam.len() > ell || !lam.contains(mu) {
            continue;
        }
        let mut pre = match case {
            CaseId::CanonicalC => box_power(p, mu, lam, |k| p.alpha(k)),
            CaseId::CanonicalB => box_power(p, mu, lam, |k| p.beta(k)),
            _ => rate_power(p, mu, lam),
        };
        for i in 1..=n {
            let x = p.x(i);
            for j in 1..=ell {
                let f = one.clone() + (if case.is_geometric() { -p.rate(j) } else { p.rate(j) }) * x.clone();
                pre = if case.is_geometric() { pre * f } else { pre / f };
            }
        }
        out.add_term(lam.clone(), pre * c.clone());
    }
    Ok(out)
}

/// One-step probability P(λ | μ) at time i, from the per-particle rules.
/// Unreachable λ gives zero.
pub fn single_step_closed_form<S: Scalar>(
    case: CaseId,
    mu: &Partition,
    lam: &Partition,
    i: usize,
    p: &Params<S>,
    ell: usize,
) -> S {
    let x = p.x(i);
    let one = S::one();
    let zero = S::zero();
    if !lam.contains(mu) || lam.len() > ell || mu.len() > ell {
        return zero;
    }
    let m = |j: usize| mu.part(j);
    let l = |j: usize| lam.part(j);
    match case {
        CaseId::A => {
            // new_j = max(μ_j, new_{j+1}) + w_j
            let mut w = one.clone();
            for j in 1..=ell {
                let base = m(j).max(l(j + 1));
                if l(j) < base {
                    return zero;
                }
                let pj = p.rate(j);
                w = w * (one.clone() - pj.clone() * x.clone()) * (pj * x.clone()).pow(l(j) - base);
            }
            w
        }
        CaseId::C | CaseId::CanonicalC => {
            // trailer first, capped by the old position of the particle ahead
            let mut w = one.clone();
            for j in 1..=ell {
                let pj = p.rate(j);
                let start = m(j);
                let end = l(j);
                let cap = if j == 1 { None } else { Some(m(j - 1)) };
                if let Some(c) = cap {
                    if end > c {
                        return zero;
                    }
                }
                let step = |k: u32| -> (S, S) {
                    // (advance, stop) probabilities at position k
                    if case == CaseId::C {
                        (pj.clone() * x.clone(), one.clone() - pj.clone() * x.clone())
                    } else {
                        let a = p.alpha(k as usize);
                        let d = one.clone() + a.clone() * x.clone();
                        ((a + pj.clone()) * x.clone() / d.clone(), (one.clone() - pj.clone() * x.clone()) / d)
                    }
                };
                let mut f = one.clone();
                for k in start..end {
                    f = f * step(k).0;
                }
                if cap != Some(end) {
                    f = f * step(end).1;
                }
                w = w * f;
            }
            w
        }
        CaseId::B | CaseId::CanonicalB => {
            // leader first; blocked when the particle ahead now sits on our site
            let mut w = one.clone();
            for j in 1..=ell {
                let d = l(j) - m(j);
                if d > 1 {
                    return zero;
                }
                let blocked = j > 1 && l(j - 1) == m(j);
                if blocked {
                    if d == 1 {
                        return zero;
                    }
                    continue;
                }
                let rj = p.rate(j);
                let num = match case {
                    CaseId::B => rj.clone() * x.clone(),
                    _ => (rj.clone() + p.beta(m(j) as usize)) * x.clone(),
                };
                let den = one.clone() + rj * x.clone();
                w = w * if d == 1 { num / den } else { (den.clone() - num) / den };
            }
            w
        }
        CaseId::D => {
            // blocks of equal μ; within a block only a top run of r rows moves
            let mut w = one.clone();
            for j in 1..=ell {
                w = w / (one.clone() + p.rate(j) * x.clone());
            }
            let mut a = 1;
            while a <= ell {
                let mut b = a;
                while b < ell && m(b + 1) == m(a) {
                    b += 1;
                }
                let mut r = 0;
                for j in a..=b {
                    match l(j) - m(j) {
                        0 => {}
                        1 if r == j - a => r += 1,
                        _ => return zero,
                    }
                }
                if r > 0 {
                    let top = a + r - 1;
                    w = w * p.rate(top) * x.clone();
                    for i2 in a..top {
                        w = w * (one.clone() + p.rate(i2) * x.clone());
                    }
                }
                a = b + 1;
            }
            w
        }
    }
}

/// Candidate one-step targets with λ_1 ≤ cap.
pub fn successors(case: CaseId, mu: &Partition, ell: usize, cap: u32) -> Vec<Partition> {
    let top = match case {
        CaseId::B | CaseId::D | CaseId::CanonicalB => (mu.first() + 1).min(cap.max(mu.first())),
        _ => cap,
    };
    let outer = Partition::from_sorted(vec![top; ell]);
    interval(mu, &outer)
        .into_iter()
        .filter(|l| match case {
            CaseId::B | CaseId::D | CaseId::CanonicalB => (1..=ell).all(|j| l.part(j) <= mu.part(j) + 1),
            CaseId::C | CaseId::CanonicalC => (2..=ell).all(|j| l.part(j) <= mu.part(j - 1)),
            CaseId::A => true,
        })
        .collect()
}

/// Distribution over λ with λ_1 ≤ cap. For geometric cases the mass beyond the
/// cap is `tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable<S> {
    pub case: CaseId,
    pub n: usize,
    pub mu: Partition,
    pub ell: usize,
    pub cap: u32,
    pub probs: BTreeMap<Partition, S>,
    pub tail: S,
}

impl<S: Scalar> KernelTable<S> {
    pub fn prob(&self, lam: &Partition) -> S {
        self.probs.get(lam).cloned().unwrap_or_else(S::zero)
    }

    pub fn total(&self) -> S {
        self.probs.values().fold(S::zero(), |a, b| a + b.clone())
    }
}

/// n-fold composition of single-step tables, restricted to λ_1 ≤ cap.
/// Positions never decrease, so every retained entry is exact.
pub fn chain<S: Scalar>(
    case: CaseId,
    n: usize,
    mu: &Partition,
    p: &Params<S>,
    ell: usize,
    cap: u32,
) -> Result<KernelTable<S>> {
    if cap < mu.first() {
        return Err(Error::Usage(format!(
            "cap {} is below mu_1 = {}",
            cap,
            mu.first()
        )));
    }
    if mu.len() > ell {
        return Err(Error::Constraint(format!("mu {} has more than {} rows", mu, ell)));
    }
    let mut dist: BTreeMap<Partition, S> = BTreeMap::new();
    dist.insert(mu.clone(), S::one());
    for i in 1..=n {
        let mut next: BTreeMap<Partition, S> = BTreeMap::new();
        for (nu, w) in &dist {
            for lam in successors(case, nu, ell, cap) {
                let pr = single_step_closed_form(case, nu, &lam, i, p, ell);
                if pr.is_zero() {
                    continue;
                }
                let e = next.entry(lam).or_insert_with(S::zero);
                *e = e.clone() + w.clone() * pr;
            }
        }
        next.retain(|_, v| !v.is_zero());
        dist = next;
    }
    let total = dist.values().fold(S::zero(), |a, b| a + b.clone());
    Ok(KernelTable {
        case,
        n,
        mu: mu.clone(),
        ell,
        cap,
        probs: dist,
        tail: S::one() - total,
    })
}

/// Σ_λ G_{λ\\μ}(x_1..x_n; β) π^λ − π^μ ∏_i 1/(1 − π_1 x_i), with β_j = π_{j+1},
/// both sides through x-degree `cap`. Exact; zero when the identity holds.
pub fn normalization_identity(mu: &Partition, n: usize, cap: u32) -> Result<LaurentPoly> {
    let is_x = |v: VarId| v.family == crate::exactalg::Family::X;
    let d = cap as i64;
    let pvar = |j: usize| RationalFn::var(VarId::p(j as u32));
    let xs: Vec<RationalFn> = (1..=n).map(|i| RationalFn::var(VarId::x(i as u32))).collect();
    let len = mu.len() + cap as usize;
    let params = Params {
        x: xs.clone(),
        rate: Vec::new(),
        alpha: Vec::new(),
        beta: (0..=len).map(|j| if j == 0 { RationalFn::zero() } else { pvar(j + 1) }).collect(),
    };
    let mut lhs = LaurentPoly::zero();
    for lam in partitions_up_to(mu.size() + cap, len) {
        if !lam.contains(mu) {
            continue;
        }
        let g = canonical_g_ds(&lam, mu, &params, DEFAULT_CONVENTION);
        let g = g
            .as_poly()
            .ok_or_else(|| Error::Validation("G with alpha = 0 should be a polynomial".into()))?
            .clone();
        let mut pl = LaurentPoly::int(1);
        for j in 1..=lam.len() {
            pl = &pl * &LaurentPoly::var_pow(VarId::p(j as u32), lam.part(j) as i32);
        }
        lhs = &lhs + &(&g * &pl).truncate(is_x, d);
    }
    // π^μ Σ_k π_1^k h_k(x)
    let mut pm = LaurentPoly::int(1);
    for j in 1..=mu.len() {
        pm = &pm * &LaurentPoly::var_pow(VarId::p(j as u32), mu.part(j) as i32);
    }
    let xp: Vec<LaurentPoly> = (1..=n)
        .map(|i| &LaurentPoly::var(VarId::x(i as u32)) * &LaurentPoly::var(VarId::p(1)))
        .collect();
    let mut rhs = LaurentPoly::zero();
    for k in 0..=cap as i64 {
        rhs = &rhs + &crate::exactalg::h_k(k, &xp);
    }
    let rhs = (&rhs * &pm).truncate(is_x, d);
    Ok((&lhs - &rhs).truncate(is_x, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q, qi, Q};
    use crate::part;
    use crate::partitions::partitions_in_box;

    fn sym(n: usize, ell: usize) -> Params<RationalFn> {
        Params::<RationalFn>::symbolic(n, ell + 1, ell + 4, ell + 4)
    }

    fn r(v: VarId) -> RationalFn {
        RationalFn::var(v)
    }

    fn numeric(n: usize, ell: usize, seed: u64) -> Params<Q> {
        // small admissible rationals, deterministic in `seed`
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = |lo: i64, hi: i64| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            lo + ((s >> 33) as i64).rem_euclid(hi - lo + 1)
        };
        let x = (0..n).map(|_| q(next(1, 5), 10)).collect();
        let rate = (0..ell).map(|_| q(next(1, 9), 10)).collect();
        let alpha = (0..ell + 6).map(|k| if k == 0 { qi(0) } else { q(next(-3, 6), 10) }).collect();
        let beta = (0..ell + 6).map(|k| if k == 0 { qi(0) } else { q(next(0, 6), 10) }).collect();
        Params::new(x, rate).with_alpha(alpha).with_beta(beta)
    }

    #[test]
    fn small_kernel_examples() {
        let p = sym(1, 3);
        let x = r(VarId::x(1));
        let pi = |j| r(VarId::p(j));
        let one = RationalFn::one();
        let norm: RationalFn = (1..=3).fold(one.clone(), |a, j| a * (one.clone() - pi(j) * x.clone()));
        for route in [Route::Tableau, Route::Operator, Route::ClosedFormChain] {
            let qa = KernelQuery::new(CaseId::A, 1, part![1, 1], part![2, 2], 3, &p).route(route);
            assert_eq!(kernel(&qa).unwrap(), pi(2) * x.clone() * norm.clone(), "{:?}", route);
            let nb: RationalFn = (1..=3).fold(one.clone(), |a, j| a * (one.clone() + pi(j) * x.clone()));
            let qb = KernelQuery::new(CaseId::B, 1, part![1, 1], part![2, 2], 3, &p).route(route);
            assert_eq!(kernel(&qb).unwrap(), pi(1) * x.clone() * pi(2) * x.clone() / nb.clone());
            let qb2 = KernelQuery::new(CaseId::B, 1, part![1, 1], part![2, 1], 3, &p).route(route);
            assert_eq!(kernel(&qb2).unwrap(), pi(1) * x.clone() / nb);
            let qc = KernelQuery::new(CaseId::C, 1, part![1, 1], part![1, 1], 3, &p).route(route);
            assert_eq!(
                kernel(&qc).unwrap(),
                (one.clone() - pi(1) * x.clone()) * (one.clone() - pi(3) * x.clone())
            );
            let qa0 = KernelQuery::new(CaseId::A, 1, part![], part![2, 1], 3, &p).route(route);
            assert_eq!(
                kernel(&qa0).unwrap(),
                pi(1) * pi(2) * x.clone().pow(2) * norm.clone()
            );
        }
    }

    #[test]
    fn canonical_c_example_with_alpha0() {
        let p = sym(1, 3).with_free_alpha0();
        let x = r(VarId::x(1));
        let a = |k| r(VarId::a(k));
        let pi = |j| r(VarId::p(j));
        let one = RationalFn::one();
        let d = |k| one.clone() + a(k) * x.clone();
        let base = (one.clone() - pi(1) * x.clone()) * (one.clone() - pi(3) * x.clone());
        let k = |lam: Partition| {
            kernel(&KernelQuery::new(CaseId::CanonicalC, 1, part![1, 1], lam, 3, &p)).unwrap()
        };
        assert_eq!(k(part![1, 1]), base.clone() / (d(0) * d(1)));
        assert_eq!(
            k(part![2, 1]),
            (a(1) + pi(1)) * x.clone() * base.clone() / (d(0) * d(1) * d(2))
        );
        assert_eq!(
            k(part![1, 1, 1]),
            (a(0) + pi(3)) * x.clone() * (one.clone() - pi(1) * x.clone()) / (d(0) * d(1))
        );
        assert_eq!(
            k(part![3, 1]),
            (a(1) + pi(1)) * (a(2) + pi(1)) * x.clone() * x.clone() * base / (d(0) * d(1) * d(2) * d(3))
        );
        assert_eq!(
            k(part![2, 1, 1]),
            (a(1) + pi(1)) * (a(0) + pi(3)) * x.clone() * x.clone() * (one.clone() - pi(1) * x.clone())
                / (d(0) * d(1) * d(2))
        );
    }

    #[test]
    fn routes_agree_symbolic_small() {
        let ell = 2;
        let p = sym(2, ell);
        for case in [CaseId::A, CaseId::B, CaseId::C, CaseId::D, CaseId::CanonicalB, CaseId::CanonicalC] {
            for mu in partitions_in_box(ell, 2) {
                for lam in partitions_in_box(ell, 3) {
                    if !lam.contains(&mu) {
                        continue;
                    }
                    for n in 1..=2 {
                        let base = KernelQuery::new(case, n, mu.clone(), lam.clone(), ell, &p);
                        let c = kernel(&base.clone().route(Route::ClosedFormChain)).unwrap();
                        let t = kernel(&base.clone().route(Route::Tableau)).unwrap();
                        let o = kernel(&base.clone().route(Route::Operator)).unwrap();
                        assert_eq!(c, t, "{} tableau n={} {} -> {}", case, n, mu, lam);
                        assert_eq!(c, o, "{} operator n={} {} -> {}", case, n, mu, lam);
                    }
                }
            }
        }
    }

    #[test]
    fn routes_agree_numeric_ell3() {
        let ell = 3;
        for seed in 0..2 {
            let p = numeric(2, ell, seed);
            for case in ALL_CASES {
                for mu in partitions_in_box(ell, 2) {
                    for lam in partitions_in_box(ell, 3) {
                        if !lam.contains(&mu) {
                            continue;
                        }
                        let base = KernelQuery::new(case, 2, mu.clone(), lam.clone(), ell, &p);
                        let c = kernel(&base.clone().route(Route::ClosedFormChain)).unwrap();
                        let t = kernel(&base.clone().route(Route::Tableau)).unwrap();
                        let o = kernel(&base.clone().route(Route::Operator)).unwrap();
                        assert_eq!(c, t, "{} tableau {} -> {}", case, mu, lam);
                        assert_eq!(c, o, "{} operator {} -> {}", case, mu, lam);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_steps_and_bernoulli_totals() {
        let p = numeric(2, 3, 9);
        let q0 = KernelQuery::new(CaseId::B, 0, part![2, 1], part![2, 1], 3, &p);
        assert_eq!(kernel(&q0).unwrap(), qi(1));
        for case in [CaseId::B, CaseId::D, CaseId::CanonicalB] {
            let t = chain(case, 2, &part![1, 1], &p, 3, 10).unwrap();
            assert_eq!(t.total(), qi(1));
            assert_eq!(t.tail, qi(0));
        }
        assert!(chain(CaseId::C, 1, &part![3], &p, 3, 2).is_err());
    }

    #[test]
    fn ell_independence() {
        // the particles beyond the rate vector never move
        let p = numeric(2, 3, 3);
        for case in [CaseId::B, CaseId::C] {
            for (mu, lam) in [(part![1], part![2, 1]), (part![1, 1], part![2, 2, 1])] {
                let t = kernel(&KernelQuery::new(case, 2, mu.clone(), lam.clone(), 3, &p).route(Route::Tableau)).unwrap();
                for ell in 3..=5 {
                    let c = kernel(&KernelQuery::new(case, 2, mu.clone(), lam.clone(), ell, &p)).unwrap();
                    assert_eq!(c, t, "{} ell={}", case, ell);
                }
            }
        }
    }

    #[test]
    fn markov_property() {
        let p = numeric(3, 3, 4);
        let p1 = p.truncate_time(1);
        for case in [CaseId::B, CaseId::D] {
            let t2 = chain(case, 2, &part![1], &p, 3, 6).unwrap();
            let a = chain(case, 1, &part![1], &p1, 3, 6).unwrap();
            for (lam, v) in &t2.probs {
                let mut s = qi(0);
                for (nu, w) in &a.probs {
                    let step = Params {
                        x: vec![p.x(2)],
                        ..p.clone()
                    };
                    s = s + w.clone() * single_step_closed_form(case, nu, lam, 1, &step, 3);
                }
                assert_eq!(&s, v);
            }
        }
    }

    #[test]
    fn pieri_normalization() {
        for (mu, cap) in [(part![], 4), (part![1], 4), (part![1], 0), (part![2, 1], 3)] {
            let res = normalization_identity(&mu, 1, cap).unwrap();
            assert!(res.is_zero(), "{} cap {}: {}", mu, cap, res);
        }
        assert!(normalization_identity(&part![], 2, 3).unwrap().is_zero());
    }
}
