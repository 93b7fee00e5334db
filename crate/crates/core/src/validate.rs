//! Cross-validation: a brute-force enumeration oracle for single steps,
//! route-agreement drivers, Monte Carlo against exact kernels, convention
//! arbitration, and trajectory decoding from tableaux.

use crate::error::{Error, Result};
use crate::exactalg::{q, q_to_f64, qi, Params, Scalar, Q};
use crate::kernels::{chain, kernel, operator_table, CaseId, KernelQuery, Route, UpdateOrder, ALL_CASES};
use crate::partitions::{partitions_in_box, Partition};
use crate::multipoint::continuous_distribution;
use crate::simulate::{final_state, rng_for, run_continuous_many, Behavior, BiasedRng, Field, SimConfig};
use crate::tableaux::{IndexConvention, DEFAULT_CONVENTION};
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::BTreeMap;

/// Distribution over λ with λ_1 ≤ cap; mass that leaves the window is `escape`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleDist<S> {
    pub probs: BTreeMap<Partition, S>,
    pub escape: S,
}

impl<S: Scalar> OracleDist<S> {
    pub fn prob(&self, lam: &Partition) -> S {
        self.probs.get(lam).cloned().unwrap_or_else(S::zero)
    }

    pub fn total(&self) -> S {
        self.probs.values().fold(self.escape.clone(), |a, b| a + b.clone())
    }
}

/// Per-particle jump law at time i: (P(W = w), P(W ≥ w)) from position `pos`,
/// and the largest possible jump (None for unbounded).
struct JumpLaw<'a, S> {
    case: CaseId,
    p: &'a Params<S>,
    x: S,
    /// positions past the cap merge into the site cap + 1
    absorbing: bool,
}

impl<S: Scalar> JumpLaw<'_, S> {
    fn max_jump(&self) -> Option<u32> {
        if self.case.is_geometric() {
            None
        } else {
            Some(1)
        }
    }

    /// success probability of one more site from site k
    fn success(&self, j: usize, k: u32) -> S {
        let one = S::one();
        let r = self.p.rate(j);
        match self.case {
            CaseId::A | CaseId::C => r * self.x.clone(),
            CaseId::CanonicalC => {
                let a = self.p.alpha(k as usize);
                (a.clone() + r) * self.x.clone() / (one + a * self.x.clone())
            }
            CaseId::B | CaseId::D => r.clone() * self.x.clone() / (one + r * self.x.clone()),
            CaseId::CanonicalB => (r.clone() + self.p.beta(k as usize)) * self.x.clone() / (one + r * self.x.clone()),
        }
    }

    fn survival(&self, j: usize, pos: u32, w: u32) -> S {
        if let Some(m) = self.max_jump() {
            if w > m {
                return S::zero();
            }
        }
        (pos..pos + w).fold(S::one(), |acc, k| acc * self.success(j, k))
    }

    fn pmf(&self, j: usize, pos: u32, w: u32) -> S {
        let stop = match self.max_jump() {
            Some(m) if w == m => S::one(),
            _ => S::one() - self.success(j, pos + w),
        };
        self.survival(j, pos, w) * stop
    }
}

/// Every single-step outcome: list of (final positions, mass). Outcomes that
/// would carry a particle past `cap` are merged into one escape entry (None).
fn enumerate_outcomes<S: Scalar>(
    case: CaseId,
    order: UpdateOrder,
    mu: &[u32],
    law: &JumpLaw<'_, S>,
    cap: u32,
) -> Vec<(Option<Vec<u32>>, S)> {
    let seq = order.sequence(mu.len());
    let mut out = Vec::new();
    fn rec<S: Scalar>(
        k: usize,
        seq: &[usize],
        case: CaseId,
        pos: Vec<u32>,
        mass: S,
        law: &JumpLaw<'_, S>,
        cap: u32,
        out: &mut Vec<(Option<Vec<u32>>, S)>,
    ) {
        if mass.is_zero() {
            return;
        }
        if k == seq.len() {
            out.push((Some(pos), mass));
            return;
        }
        let j = seq[k];
        let idx = j - 1;
        let here = pos[idx];
        if here > cap {
            rec(k + 1, seq, case, pos, mass, law, cap, out);
            return;
        }
        let block = if !case.is_pushing() && idx > 0 { Some(pos[idx - 1] - here) } else { None };
        let room = cap - here;
        let block = block.map(|b| if law.absorbing { b.min(room + 1) } else { b });
        let bound = match (block, law.max_jump()) {
            (Some(b), _) => b,
            (None, Some(m)) => m.min(room + 1),
            (None, None) => room + 1,
        };
        for w in 0..=bound {
            // the last slot aggregates all jumps ≥ bound
            let m = if w == bound {
                law.survival(j, here, w)
            } else {
                law.pmf(j, here, w)
            };
            if m.is_zero() {
                continue;
            }
            if here + w > cap {
                if !law.absorbing {
                    out.push((None, mass.clone() * m));
                    continue;
                }
                // everything past the window collapses onto the far site
                let mut next = pos.clone();
                for a in 0..=idx {
                    if case.is_pushing() || a == idx {
                        next[a] = next[a].max(cap + 1);
                    }
                }
                rec(k + 1, seq, case, next, mass.clone() * m, law, cap, out);
                continue;
            }
            let mut next = pos.clone();
            next[idx] = here + w;
            if case.is_pushing() {
                for a in (0..idx).rev() {
                    if next[a] < here + w {
                        next[a] = here + w;
                    }
                }
            }
            rec(k + 1, seq, case, next, mass.clone() * m, law, cap, out);
        }
    }
    rec(0, &seq, case, mu.to_vec(), S::one(), law, cap, &mut out);
    out
}

/// Exact one-step distribution at time `i` by enumerating all jump outcomes.
pub fn brute_force_single_step<S: Scalar>(
    case: CaseId,
    mu: &Partition,
    i: usize,
    p: &Params<S>,
    ell: usize,
    cap: u32,
    order: UpdateOrder,
) -> Result<OracleDist<S>> {
    single_step(case, mu, i, p, ell, cap, order, false)
}

#[allow(clippy::too_many_arguments)]
fn single_step<S: Scalar>(
    case: CaseId,
    mu: &Partition,
    i: usize,
    p: &Params<S>,
    ell: usize,
    cap: u32,
    order: UpdateOrder,
    absorbing: bool,
) -> Result<OracleDist<S>> {
    if cap < mu.first() && !(absorbing && mu.first() == cap + 1) {
        return Err(Error::Usage(format!("cap {} cannot hold mu = {}", cap, mu)));
    }
    if mu.len() > ell {
        return Err(Error::Constraint(format!("mu {} has more than {} rows", mu, ell)));
    }
    let mut rates = p.clone();
    rates.rate.truncate(ell);
    let law = JumpLaw {
        case,
        p: &rates,
        x: p.x(i),
        absorbing,
    };
    let mut probs: BTreeMap<Partition, S> = BTreeMap::new();
    let mut escape = S::zero();
    for (state, m) in enumerate_outcomes(case, order, &mu.padded(ell), &law, cap) {
        match state {
            Some(s) => {
                let e = probs.entry(Partition::from_sorted(s)).or_insert_with(S::zero);
                *e = e.clone() + m;
            }
            None => escape = escape + m,
        }
    }
    probs.retain(|_, v| !v.is_zero());
    Ok(OracleDist { probs, escape })
}

/// n-step composition of the oracle.
pub fn brute_force_chain<S: Scalar>(
    case: CaseId,
    n: usize,
    mu: &Partition,
    p: &Params<S>,
    ell: usize,
    cap: u32,
    order: UpdateOrder,
) -> Result<OracleDist<S>> {
    chain_with(case, n, mu, p, ell, cap, order, false)
}

#[allow(clippy::too_many_arguments)]
fn chain_with<S: Scalar>(
    case: CaseId,
    n: usize,
    mu: &Partition,
    p: &Params<S>,
    ell: usize,
    cap: u32,
    order: UpdateOrder,
    absorbing: bool,
) -> Result<OracleDist<S>> {
    let mut dist = OracleDist {
        probs: BTreeMap::from([(mu.clone(), S::one())]),
        escape: S::zero(),
    };
    for i in 1..=n {
        let mut next = OracleDist {
            probs: BTreeMap::new(),
            escape: dist.escape.clone(),
        };
        for (nu, w) in &dist.probs {
            let step = single_step(case, nu, i, p, ell, cap, order, absorbing)?;
            next.escape = next.escape + w.clone() * step.escape;
            for (lam, v) in step.probs {
                let e = next.probs.entry(lam).or_insert_with(S::zero);
                *e = e.clone() + w.clone() * v;
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// P(every λ_i ≤ t_i) (`at_most`) or P(every λ_i ≥ t_i) after n steps from
/// `start`, exact. Positions beyond max(t_1, start_1) are lumped into one
/// absorbing far site, which no event can tell apart.
pub fn brute_force_event<S: Scalar>(
    case: CaseId,
    at_most: bool,
    start: &Partition,
    thresholds: &Partition,
    n: usize,
    p: &Params<S>,
    ell: usize,
) -> Result<S> {
    let cap = thresholds.first().max(start.first());
    let d = chain_with(case, n, start, p, ell, cap, UpdateOrder::default_for(case), true)?;
    let mut acc = S::zero();
    for (lam, v) in &d.probs {
        let hit = (1..=ell).all(|i| {
            if at_most {
                lam.part(i) <= thresholds.part(i)
            } else {
                lam.part(i) >= thresholds.part(i)
            }
        });
        if hit {
            acc = acc + v.clone();
        }
    }
    Ok(acc)
}

/// Bernoulli outcome table: (jump draws per particle, weight ∏ (ρ_j x)^{w_j}
/// before normalization, resulting state).
pub fn outcome_table<S: Scalar>(
    case: CaseId,
    mu: &Partition,
    p: &Params<S>,
    ell: usize,
) -> Result<Vec<(Vec<u32>, S, Partition)>> {
    if case.is_geometric() {
        return Err(Error::Usage("outcome tables are for Bernoulli cases".into()));
    }
    let order = UpdateOrder::default_for(case);
    let mut out = Vec::new();
    for mask in 0u32..(1 << ell) {
        let draws: Vec<u32> = (0..ell).map(|j| (mask >> j) & 1).collect();
        let mut d = |j: usize, _: u32, lim: Option<u32>| {
            let w = draws[j - 1];
            lim.map_or(w, |l| w.min(l))
        };
        let end = crate::simulate::step_with_draws(case, order, &mu.padded(ell), &mut d);
        let mut w = S::one();
        for j in 1..=ell {
            if draws[j - 1] == 1 {
                w = w * p.rate(j) * p.x(1);
            }
        }
        out.push((draws, w, Partition::from_sorted(end)));
    }
    Ok(out)
}

/// Small admissible rational parameters for `case`.
pub fn random_binding<R: Rng + ?Sized>(case: CaseId, ell: usize, n: usize, rng: &mut R) -> Params<Q> {
    let x: Vec<Q> = (0..n).map(|_| q(rng.random_range(1..=5), 10)).collect();
    let rate: Vec<Q> = (0..ell).map(|_| q(rng.random_range(1..=9), 10)).collect();
    let min_rate = rate.iter().min().cloned().unwrap_or_else(|| qi(0));
    let mut p = Params::new(x, rate);
    let sites = 3 * n + 8;
    if case == CaseId::CanonicalC {
        // α_k > −min π keeps every success probability in (0, 1) and every
        // α_k + π_i away from the poles of the multi-point prefactor
        let lo = 1 - (q_to_f64(&min_rate) * 10.0).floor() as i64;
        p.alpha = (0..sites)
            .map(|k| if k == 0 { qi(0) } else { q(rng.random_range(lo..=6), 10) })
            .collect();
    }
    if case == CaseId::CanonicalB {
        p.beta = (0..sites)
            .map(|k| if k == 0 { qi(0) } else { q(rng.random_range(0..=6), 10) })
            .collect();
    }
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub case: String,
    pub ell: usize,
    pub n: usize,
    pub mu: Partition,
    pub lambda: Partition,
    pub route: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub points: usize,
    pub comparisons: usize,
    pub mismatches: Vec<Mismatch>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.comparisons > 0
    }
}

#[derive(Clone, Debug)]
pub struct GridSpec {
    pub cases: Vec<CaseId>,
    pub ells: Vec<usize>,
    pub ns: Vec<usize>,
    /// μ and λ range over partitions in a `rows × cols` box
    pub rows: usize,
    pub cols: u32,
    pub bindings: usize,
    pub seed: u64,
    pub conv: IndexConvention,
    pub order: Option<UpdateOrder>,
}

impl GridSpec {
    /// μ ⊆ λ ⊆ (3,3,3), ℓ ≤ 4, n ≤ 2, five bindings.
    pub fn desk(seed: u64) -> Self {
        GridSpec {
            cases: ALL_CASES.to_vec(),
            ells: vec![1, 2, 3, 4],
            ns: vec![1, 2],
            rows: 3,
            cols: 3,
            bindings: 5,
            seed,
            conv: DEFAULT_CONVENTION,
            order: None,
        }
    }

    pub fn smoke(seed: u64) -> Self {
        GridSpec {
            ells: vec![2],
            rows: 2,
            cols: 2,
            bindings: 1,
            ..GridSpec::desk(seed)
        }
    }
}

/// Tableau, operator and chain routes against the oracle, exact, over a grid.
pub fn route_agreement(spec: &GridSpec) -> Result<GridReport> {
    let mut points = Vec::new();
    for &case in &spec.cases {
        for &ell in &spec.ells {
            for b in 0..spec.bindings {
                for mu in partitions_in_box(spec.rows.min(ell), spec.cols) {
                    points.push((case, ell, b, mu));
                }
            }
        }
    }
    let nmax = spec.ns.iter().copied().max().unwrap_or(0);
    let results: Vec<Result<(usize, Vec<Mismatch>)>> = points
        .par_iter()
        .map(|(case, ell, b, mu)| {
            let mut rng = rng_for(spec.seed, (*b as u64) << 8 | *ell as u64);
            // bindings depend on (case, ell, b) only
            for _ in 0..ALL_CASES.iter().position(|c| c == case).unwrap() {
                rng.next_u64();
            }
            let p = random_binding(*case, *ell, nmax, &mut rng);
            let order = spec.order.unwrap_or(UpdateOrder::default_for(*case));
            let lambdas: Vec<Partition> = partitions_in_box(spec.rows.min(*ell), spec.cols)
                .into_iter()
                .filter(|l| l.contains(mu))
                .collect();
            let cap = spec.cols;
            let mut count = 0;
            let mut bad = Vec::new();
            for &n in &spec.ns {
                let pn = p.truncate_time(n);
                let oracle = brute_force_chain(*case, n, mu, &pn, *ell, cap, order)?;
                let chained = chain(*case, n, mu, &pn, *ell, cap)?;
                let ops = operator_table(*case, n, mu, &restrict(&pn, *ell), *ell, (spec.rows as u32) * cap)?;
                for lam in &lambdas {
                    let want = oracle.prob(lam);
                    let tab = kernel(
                        &KernelQuery::new(*case, n, mu.clone(), lam.clone(), *ell, &pn)
                            .route(Route::Tableau)
                            .convention(spec.conv),
                    )?;
                    let got = [
                        ("tableau", tab),
                        ("operator", ops.coeff(lam)),
                        ("chain", chained.prob(lam)),
                    ];
                    for (route, v) in got {
                        count += 1;
                        if v != want {
                            bad.push(Mismatch {
                                case: case.to_string(),
                                ell: *ell,
                                n,
                                mu: mu.clone(),
                                lambda: lam.clone(),
                                route: route.into(),
                                expected: crate::exactalg::q_to_string(&want),
                                got: crate::exactalg::q_to_string(&v),
                            });
                        }
                    }
                }
            }
            Ok((count, bad))
        })
        .collect();
    let mut report = GridReport {
        points: points.len(),
        comparisons: 0,
        mismatches: Vec::new(),
    };
    for r in results {
        let (c, m) = r?;
        report.comparisons += c;
        report.mismatches.extend(m);
    }
    Ok(report)
}

fn restrict(p: &Params<Q>, ell: usize) -> Params<Q> {
    let mut p = p.clone();
    p.rate.truncate(ell);
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub convention: String,
    pub order: String,
    pub mismatches: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Arbitration {
    pub candidates: Vec<Candidate>,
    pub convention: String,
    pub order: String,
}

/// Runs the smoke-scale grid under each index convention and each update
/// order rule; exactly one pair must make every route match the oracle.
pub fn arbitrate_conventions(seed: u64) -> Result<Arbitration> {
    let convs = [IndexConvention::BetaRowAlphaCol, IndexConvention::AlphaRowBetaCol];
    let mut cands = Vec::new();
    let mut winners = Vec::new();
    for conv in convs {
        for reversed in [false, true] {
            let mut mismatches = 0;
            for case in ALL_CASES {
                let default = UpdateOrder::default_for(case);
                let order = if reversed {
                    match default {
                        UpdateOrder::LeaderFirst => UpdateOrder::TrailerFirst,
                        UpdateOrder::TrailerFirst => UpdateOrder::LeaderFirst,
                    }
                } else {
                    default
                };
                let spec = GridSpec {
                    cases: vec![case],
                    ells: vec![3],
                    ns: vec![1],
                    rows: 3,
                    cols: 2,
                    bindings: 1,
                    seed,
                    conv,
                    order: Some(order),
                };
                mismatches += route_agreement(&spec)?.mismatches.len();
            }
            let order = if reversed { "reversed" } else { "geometric trailer-first, Bernoulli leader-first" };
            cands.push(Candidate {
                convention: conv.name().into(),
                order: order.into(),
                mismatches,
            });
            if mismatches == 0 {
                winners.push((conv.name().to_string(), order.to_string()));
            }
        }
    }
    if winners.len() != 1 {
        return Err(Error::Validation(format!(
            "arbitration needs exactly one surviving convention, got {}: {}",
            winners.len(),
            serde_json::to_string(&cands).unwrap_or_default()
        )));
    }
    let (convention, order) = winners.pop().unwrap();
    Ok(Arbitration {
        candidates: cands,
        convention,
        order,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StateStat {
    /// None stands for every state beyond the exact window
    pub state: Option<Partition>,
    pub empirical: f64,
    pub exact: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatReport {
    pub samples: usize,
    pub states: Vec<StateStat>,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub tv: f64,
}

impl StatReport {
    pub fn passes(&self, tv_max: f64, p_min: f64) -> bool {
        self.tv < tv_max && self.p_value > p_min
    }
}

#[derive(Clone, Debug)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    pub threads: usize,
    /// u ↦ u^bias on every uniform draw; None for a healthy generator
    pub bias: Option<f64>,
}

const CHUNKS: u64 = 64;

/// Empirical law of the n-step state against the exact kernel.
pub fn mc_vs_exact(case: CaseId, mu: &Partition, n: usize, p: &Params<Q>, ell: usize, opts: &McOptions) -> Result<StatReport> {
    if opts.samples == 0 {
        return Err(Error::Usage("samples must be positive".into()));
    }
    let cap = mu.first() + if case.is_geometric() { 14 } else { n as u32 };
    let exact = chain(case, n, mu, p, ell, cap)?;
    let cfg = SimConfig::new(case, ell, n, opts.seed).with_params(&p.to_f64()).start(mu.clone());
    cfg.validate()?;
    let per = opts.samples.div_ceil(CHUNKS as usize);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let parts: Vec<BTreeMap<Partition, u64>> = pool.install(|| {
        (0..CHUNKS)
            .into_par_iter()
            .map(|c| {
                let m = per.min(opts.samples.saturating_sub(c as usize * per));
                let mut h = BTreeMap::new();
                let mut base = rng_for(opts.seed, c);
                let mut biased = opts.bias.map(|power| BiasedRng { inner: rng_for(opts.seed, c), power });
                for _ in 0..m {
                    let lam = match biased.as_mut() {
                        Some(b) => final_state(&cfg, b),
                        None => final_state(&cfg, &mut base),
                    };
                    *h.entry(lam).or_insert(0u64) += 1;
                }
                h
            })
            .collect()
    });
    let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
    for h in parts {
        for (k, v) in h {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    let total = opts.samples as f64;
    let mut states = Vec::new();
    let mut outside = 0u64;
    for (lam, &c) in &counts {
        if !exact.probs.contains_key(lam) {
            outside += c;
        }
    }
    for (lam, pr) in &exact.probs {
        states.push(StateStat {
            state: Some(lam.clone()),
            empirical: counts.get(lam).copied().unwrap_or(0) as f64 / total,
            exact: q_to_f64(pr),
        });
    }
    states.push(StateStat {
        state: None,
        empirical: outside as f64 / total,
        exact: q_to_f64(&exact.tail).max(0.0),
    });
    report(opts.samples, states)
}

fn report(samples: usize, states: Vec<StateStat>) -> Result<StatReport> {
    let tv = states.iter().map(|s| (s.empirical - s.exact).abs()).sum::<f64>() / 2.0;
    let (chi_square, dof) = pooled_chi_square(&states, samples as f64);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64)
            .map_err(|e| Error::Validation(e.to_string()))?
            .cdf(chi_square)
    };
    Ok(StatReport {
        samples,
        states,
        chi_square,
        dof,
        p_value,
        tv,
    })
}

/// Continuous-time sampler from the empty start against the determinant
/// kernel (C for blocking, A for pushing) on states with λ_1 ≤ max_first;
/// everything else is pooled into one bin.
#[allow(clippy::too_many_arguments)]
pub fn continuous_vs_kernel(
    behavior: Behavior,
    ell: usize,
    t: f64,
    rates: &[f64],
    samples: usize,
    seed: u64,
    threads: usize,
    max_first: u32,
) -> Result<StatReport> {
    if samples == 0 {
        return Err(Error::Usage("samples must be positive".into()));
    }
    let case = match behavior {
        Behavior::Block => CaseId::C,
        Behavior::Push => CaseId::A,
    };
    let exact = continuous_distribution(case, t, &Partition::empty(), ell, rates, max_first)?;
    let r = rates.to_vec();
    let field: Field = std::sync::Arc::new(move |j: i64| r.get(j as usize - 1).copied().unwrap_or(0.0));
    let summary = run_continuous_many(ell, t, field, behavior, seed, samples, threads)?;
    let total = samples as f64;
    let mut states = Vec::new();
    let mut seen = 0u64;
    let mut mass = 0.0;
    for (lam, &pr) in &exact {
        let c = summary.counts.get(lam).copied().unwrap_or(0);
        seen += c;
        mass += pr;
        states.push(StateStat {
            state: Some(lam.clone()),
            empirical: c as f64 / total,
            exact: pr,
        });
    }
    states.push(StateStat {
        state: None,
        empirical: (samples as u64 - seen) as f64 / total,
        exact: (1.0 - mass).max(0.0),
    });
    report(samples, states)
}

/// Pearson statistic over bins with expected count ≥ 5; the rest share one bin.
fn pooled_chi_square(states: &[StateStat], total: f64) -> (f64, usize) {
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pe, mut po) = (0.0, 0.0);
    for s in states {
        let e = s.exact * total;
        let o = s.empirical * total;
        if e >= 5.0 {
            bins.push((o, e));
        } else {
            pe += e;
            po += o;
        }
    }
    if pe >= 5.0 || (bins.is_empty() && pe > 0.0) {
        bins.push((po, pe));
    } else if pe > 0.0 || po > 0.0 {
        let k = bins
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(k, _)| k)
            .unwrap();
        bins[k].0 += po;
        bins[k].1 += pe;
    }
    let stat = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, bins.len().saturating_sub(1))
}

/// A filling: cell (row, column) to its entries, 1-based.
pub type Filling = BTreeMap<(usize, u32), Vec<u8>>;

/// Particle positions after each of the n time steps. Case A reads a
/// reverse plane partition of λ/μ (entry = arrival time); Case C reads
/// min(T) of a set-valued tableau; Cases B and D read a tableau of λ'/μ'.
pub fn decode_trajectory(case: CaseId, mu: &Partition, t: &Filling, n: usize) -> Result<Vec<Partition>> {
    let mismatch = |why: &str| Error::Usage(format!("tableau does not fit case {}: {}", case, why));
    let cells: BTreeMap<(usize, u32), u8> = t
        .iter()
        .map(|(&(r, c), v)| {
            let m = *v.iter().min().ok_or_else(|| mismatch("empty cell"))?;
            let cell = if case.is_geometric() { (r, c) } else { (c as usize, r as u32) };
            Ok((cell, m))
        })
        .collect::<Result<_>>()?;
    if case == CaseId::A && t.values().any(|v| v.len() != 1) {
        return Err(mismatch("reverse plane partitions hold one entry per cell"));
    }
    let get = |r: usize, c: u32| cells.get(&(r, c)).copied();
    for (&(r, c), &v) in &cells {
        if mu.contains_cell(r, c) {
            return Err(mismatch("cell inside mu"));
        }
        if v as usize > n || v == 0 {
            return Err(mismatch("entry out of range"));
        }
        let (right, below) = (get(r, c + 1), get(r + 1, c));
        let ok = match case {
            CaseId::A => right.is_none_or(|w| w >= v) && below.is_none_or(|w| w >= v),
            CaseId::B | CaseId::D | CaseId::CanonicalB => right.is_none_or(|w| w > v) && below.is_none_or(|w| w >= v),
            _ => right.is_none_or(|w| w >= v) && below.is_none_or(|w| w > v),
        };
        if !ok {
            return Err(mismatch("entries out of order"));
        }
    }
    let mut traj = Vec::with_capacity(n + 1);
    for time in 0..=n {
        let mut rows = mu.padded(cells.keys().map(|k| k.0).max().unwrap_or(0).max(mu.len()));
        for (&(r, _), &v) in &cells {
            if v as usize <= time {
                rows[r - 1] += 1;
            }
        }
        let lam = Partition::new(rows).map_err(|_| mismatch("snapshot is not a partition"))?;
        traj.push(lam);
    }
    Ok(traj)
}

/// Inverse of `decode_trajectory` for Case A and for min(T) in Case C: each
/// cell of the final shape gets the first time it is occupied.
pub fn encode_trajectory(case: CaseId, traj: &[Partition]) -> Result<Filling> {
    if !matches!(case, CaseId::A | CaseId::C) {
        return Err(Error::Usage(format!("encoding is defined for Cases A and C, not {}", case)));
    }
    let first = traj.first().ok_or_else(|| Error::Usage("empty trajectory".into()))?;
    let mut out = Filling::new();
    for w in traj.windows(2) {
        if !w[1].contains(&w[0]) {
            return Err(Error::Usage(format!("positions decrease from {} to {}", w[0], w[1])));
        }
    }
    for (time, lam) in traj.iter().enumerate().skip(1) {
        for (r, c) in lam.cells() {
            if !first.contains_cell(r, c) {
                out.entry((r, c)).or_insert_with(|| vec![time as u8]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{RationalFn, VarId};
    use crate::part;
    use crate::tableaux::{list_rpp, list_set_valued};
    use crate::SkewShape;

    fn sym(ell: usize) -> Params<RationalFn> {
        Params::<RationalFn>::symbolic(1, ell, ell + 3, ell + 3)
    }

    #[test]
    fn case_d_outcomes() {
        let p = sym(3);
        let t = outcome_table(CaseId::D, &part![1, 1], &p, 3).unwrap();
        assert_eq!(t.len(), 8);
        let r = |j| RationalFn::var(VarId::p(j)) * RationalFn::var(VarId::x(1));
        let weight_of = |lam: Partition| -> RationalFn {
            t.iter().filter(|e| e.2 == lam).fold(RationalFn::int(0), |a, e| a + e.1.clone())
        };
        assert_eq!(weight_of(part![2, 2, 1]), r(1) * r(2) * r(3) + r(2) * r(3));
        assert_eq!(weight_of(part![2, 2]), r(1) * r(2) + r(2));
        assert_eq!(weight_of(part![1, 1, 1]), r(3));
        assert_eq!(weight_of(part![2, 1, 1]), r(1) * r(3));
    }

    #[test]
    fn case_b_blocked_attempts() {
        let p = sym(3);
        let t = outcome_table(CaseId::B, &part![1, 1], &p, 3).unwrap();
        let r = |j| RationalFn::var(VarId::p(j)) * RationalFn::var(VarId::x(1));
        let ws: Vec<RationalFn> = t.iter().filter(|e| e.2 == part![1, 1]).map(|e| e.1.clone()).collect();
        assert_eq!(ws.len(), 2);
        assert!(ws.contains(&RationalFn::int(1)) && ws.contains(&r(2)));
        let ws: Vec<RationalFn> = t.iter().filter(|e| e.2 == part![1, 1, 1]).map(|e| e.1.clone()).collect();
        assert!(ws.contains(&r(3)) && ws.contains(&(r(2) * r(3))));
    }

    #[test]
    fn oracle_totals_and_zero_rates() {
        for case in ALL_CASES {
            let p = random_binding(case, 3, 2, &mut rng_for(5, 0));
            let d = brute_force_chain(case, 2, &part![1, 1], &p, 3, 6, UpdateOrder::default_for(case)).unwrap();
            assert_eq!(d.total(), qi(1), "{}", case);
            let zero = Params::new(vec![q(1, 2)], vec![qi(0); 3]);
            let d = brute_force_single_step(case, &part![2, 1], 1, &zero, 3, 4, UpdateOrder::default_for(case)).unwrap();
            assert_eq!(d.probs.len(), 1);
            assert_eq!(d.prob(&part![2, 1]), qi(1));
        }
        assert!(brute_force_single_step(CaseId::A, &part![5], 1, &sym(2), 2, 4, UpdateOrder::TrailerFirst).is_err());
    }

    #[test]
    fn oracle_matches_symbolic_kernel() {
        let p = sym(3);
        let x = RationalFn::var(VarId::x(1));
        let pi = |j| RationalFn::var(VarId::p(j));
        let one = RationalFn::int(1);
        let d = brute_force_single_step(CaseId::C, &part![1, 1], 1, &p, 3, 4, UpdateOrder::TrailerFirst).unwrap();
        assert_eq!(
            d.prob(&part![1, 1]),
            (one.clone() - pi(1) * x.clone()) * (one - pi(3) * x)
        );
    }

    #[test]
    fn smoke_grid_agrees() {
        let r = route_agreement(&GridSpec::smoke(7)).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches.first());
    }

    #[test]
    fn arbitration_is_unique() {
        let a = arbitrate_conventions(3).unwrap();
        assert_eq!(a.convention, DEFAULT_CONVENTION.name());
        assert_eq!(a.candidates.iter().filter(|c| c.mismatches == 0).count(), 1);
    }

    #[test]
    fn continuous_sampler_matches_kernel() {
        for b in [Behavior::Block, Behavior::Push] {
            let r = continuous_vs_kernel(b, 2, 1.0, &[1.0, 1.0], 20_000, 5, 2, 5).unwrap();
            assert!(r.tv < 0.03 && r.p_value > 1e-4, "{:?}: tv {} p {}", b, r.tv, r.p_value);
        }
    }

    #[test]
    fn monte_carlo_and_fault_injection() {
        let p = random_binding(CaseId::C, 3, 1, &mut rng_for(1, 0));
        let opts = McOptions {
            samples: 20_000,
            seed: 9,
            threads: 2,
            bias: None,
        };
        let good = mc_vs_exact(CaseId::C, &part![1, 1], 1, &p, 3, &opts).unwrap();
        assert!(good.passes(0.02, 0.001), "{:?}", good);
        let bad = mc_vs_exact(CaseId::C, &part![1, 1], 1, &p, 3, &McOptions { bias: Some(1.3), ..opts.clone() }).unwrap();
        assert!(!bad.passes(0.02, 0.001));
        assert!(mc_vs_exact(CaseId::C, &part![1, 1], 1, &p, 3, &McOptions { samples: 0, ..opts }).is_err());
    }

    #[test]
    fn decode_case_a_table() {
        let shape = SkewShape::straight(part![3, 1]);
        let rpps = list_rpp(&shape, 2);
        assert_eq!(rpps.len(), 7);
        let t: Filling = BTreeMap::from([((1, 1), vec![1]), ((1, 2), vec![1]), ((1, 3), vec![1]), ((2, 1), vec![2])]);
        let traj = decode_trajectory(CaseId::A, &part![], &t, 2).unwrap();
        assert_eq!(traj, vec![part![], part![3], part![3, 1]]);
        for r in rpps {
            let f: Filling = r.into_iter().map(|(k, v)| (k, vec![v])).collect();
            let traj = decode_trajectory(CaseId::A, &part![], &f, 2).unwrap();
            assert_eq!(encode_trajectory(CaseId::A, &traj).unwrap(), f);
        }
        assert_eq!(decode_trajectory(CaseId::A, &part![2], &Filling::new(), 3).unwrap(), vec![part![2]; 4]);
    }

    #[test]
    fn decode_case_c_min_tableau() {
        let rows: [&[u8]; 3] = [&[1, 1, 1, 2, 4, 5], &[2, 4, 4], &[4]];
        let mut t = Filling::new();
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                t.insert((r + 1, c as u32 + 1), vec![v]);
            }
        }
        // extra entries do not change the motion
        t.get_mut(&(1, 4)).unwrap().push(3);
        let traj = decode_trajectory(CaseId::C, &part![], &t, 5).unwrap();
        assert_eq!(
            traj,
            vec![part![], part![3], part![4, 1], part![4, 1], part![5, 3, 1], part![6, 3, 1]]
        );
        let svt = list_set_valued(&SkewShape::straight(part![2, 1]), 2);
        assert!(!svt.is_empty());
        let t: Filling = BTreeMap::from([((1, 1), vec![1, 2])]);
        assert!(decode_trajectory(CaseId::A, &part![], &t, 2).is_err());
    }

    #[test]
    fn decode_case_b_columns() {
        // λ'/μ' for B: column j of λ holds particle j's arrival times
        let t: Filling = BTreeMap::from([((1, 1), vec![1]), ((1, 2), vec![2]), ((2, 1), vec![2])]);
        let traj = decode_trajectory(CaseId::B, &part![], &t, 2).unwrap();
        assert_eq!(traj, vec![part![], part![1], part![2, 1]]);
    }

    proptest::proptest! {
        #[test]
        fn encode_decode_round_trip(steps in proptest::collection::vec(proptest::collection::vec(0u32..3, 3), 1..6)) {
            // random monotone chains of partitions with at most 3 rows
            let mut traj = vec![Partition::empty()];
            for add in &steps {
                let last = traj.last().unwrap().padded(3);
                let mut next = last.clone();
                for j in 0..3 {
                    next[j] += add[j];
                    if j > 0 && next[j] > next[j - 1] {
                        next[j] = next[j - 1].max(last[j]);
                    }
                }
                traj.push(Partition::from_sorted(next));
            }
            let n = traj.len() - 1;
            let f = encode_trajectory(CaseId::A, &traj).unwrap();
            proptest::prop_assert_eq!(decode_trajectory(CaseId::A, &part![], &f, n).unwrap(), traj);
        }
    }
}
