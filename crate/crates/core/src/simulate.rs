//! Seeded Monte Carlo samplers for the discrete cases, the canonical
//! processes and the continuous-time limit.
//!
//! Each run draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `run`,
//! so batches come out the same whatever the thread count.

use crate::error::{Error, Result};
use crate::exactalg::Params;
use crate::kernels::{CaseId, UpdateOrder};
use crate::partitions::Partition;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;
use std::sync::Arc;

/// A real field over an integer index: time step, particle or position.
pub type Field = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

pub fn constant(v: f64) -> Field {
    Arc::new(move |_| v)
}

/// Field from a list, 1-based for times/particles (`offset = 1`) or 0-based
/// for positions (`offset = 0`); zero outside.
pub fn from_list(v: Vec<f64>, offset: i64) -> Field {
    Arc::new(move |i| {
        let k = i - offset;
        if k >= 0 && (k as usize) < v.len() {
            v[k as usize]
        } else {
            0.0
        }
    })
}

/// Which coordinate indexes the position field α (or β).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AlphaIndex {
    /// λ_j, the bosonic position
    #[default]
    Bosonic,
    /// λ_j − j + 1
    Fermionic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Picture {
    #[default]
    Bosonic,
    Fermionic,
}

#[derive(Clone)]
pub struct SimConfig {
    pub case: CaseId,
    pub ell: usize,
    pub steps: usize,
    pub x: Field,
    pub rate: Field,
    pub alpha: Field,
    pub beta: Field,
    pub start: Partition,
    pub seed: u64,
    pub alpha_index: AlphaIndex,
    pub order: UpdateOrder,
    pub picture: Picture,
    /// keep every k-th snapshot in `run`
    pub record_every: usize,
}

impl std::fmt::Debug for SimConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimConfig")
            .field("case", &self.case)
            .field("ell", &self.ell)
            .field("steps", &self.steps)
            .field("start", &self.start)
            .field("seed", &self.seed)
            .finish()
    }
}

impl SimConfig {
    pub fn new(case: CaseId, ell: usize, steps: usize, seed: u64) -> Self {
        SimConfig {
            case,
            ell,
            steps,
            x: constant(0.5),
            rate: constant(0.5),
            alpha: constant(0.0),
            beta: constant(0.0),
            start: Partition::empty(),
            seed,
            alpha_index: AlphaIndex::Bosonic,
            order: UpdateOrder::default_for(case),
            picture: Picture::Bosonic,
            record_every: 1,
        }
    }

    /// Uses the list entries of `p`; rates beyond the list are zero.
    pub fn with_params(mut self, p: &Params<f64>) -> Self {
        self.x = from_list(p.x.clone(), 1);
        self.rate = from_list(p.rate.clone(), 1);
        self.alpha = from_list(p.alpha.clone(), 0);
        self.beta = from_list(p.beta.clone(), 0);
        self
    }

    pub fn x(mut self, f: Field) -> Self {
        self.x = f;
        self
    }

    pub fn rate(mut self, f: Field) -> Self {
        self.rate = f;
        self
    }

    pub fn alpha(mut self, f: Field) -> Self {
        self.alpha = f;
        self
    }

    pub fn beta(mut self, f: Field) -> Self {
        self.beta = f;
        self
    }

    pub fn start(mut self, mu: Partition) -> Self {
        self.start = mu;
        self
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k.max(1);
        self
    }

    /// Checks the admissibility inequalities for every time step, particle
    /// and (for position fields) the first few thousand sites.
    pub fn validate(&self) -> Result<()> {
        if self.start.len() > self.ell {
            return Err(Error::Constraint(format!(
                "start {} has more than ell = {} rows",
                self.start, self.ell
            )));
        }
        let sites = self.start.first() as i64 + 4096;
        for i in 1..=self.steps as i64 {
            let x = (self.x)(i);
            for j in 1..=self.ell as i64 {
                let r = (self.rate)(j);
                let px = r * x;
                if self.case.is_geometric() {
                    if !(px > 0.0 && px < 1.0) {
                        return Err(Error::Constraint(format!(
                            "pi_j x_i in (0,1) fails at j={}, i={}: {}",
                            j, i, px
                        )));
                    }
                } else if !(px > 0.0) {
                    return Err(Error::Constraint(format!("rho_j x_i > 0 fails at j={}, i={}: {}", j, i, px)));
                }
            }
            // position fields are checked once for constant x
            if i > 1 && (self.x)(i) == (self.x)(1) {
                continue;
            }
            match self.case {
                CaseId::CanonicalC => {
                    for k in 0..sites {
                        let a = (self.alpha)(k);
                        if a * x <= -1.0 {
                            return Err(Error::Constraint(format!(
                                "alpha_k x_i > -1 fails at k={}, i={}",
                                k, i
                            )));
                        }
                        for j in 1..=self.ell as i64 {
                            if a + (self.rate)(j) < 0.0 {
                                return Err(Error::Constraint(format!(
                                    "alpha_k + pi_j >= 0 fails at k={}, j={}",
                                    k, j
                                )));
                            }
                        }
                    }
                }
                CaseId::CanonicalB => {
                    for k in 0..sites {
                        for j in 1..=self.ell as i64 {
                            let pr = ((self.rate)(j) + (self.beta)(k)) * x / (1.0 + (self.rate)(j) * x);
                            if !(0.0..=1.0).contains(&pr) {
                                return Err(Error::Constraint(format!(
                                    "0 <= (rho_j + beta_k) x_i <= 1 + rho_j x_i fails at k={}, j={}",
                                    k, j
                                )));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn position_index(&self, pos: u32, j: usize) -> i64 {
        match self.alpha_index {
            AlphaIndex::Bosonic => pos as i64,
            AlphaIndex::Fermionic => pos as i64 - j as i64 + 1,
        }
    }
}

/// Homogeneous geometric jump, P(W ≥ w) = q^w, by inverse transform.
pub fn sample_geometric<R: Rng + ?Sized>(q: f64, limit: Option<u32>, rng: &mut R) -> u32 {
    if q <= 0.0 || limit == Some(0) {
        return 0;
    }
    let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let w = (u.ln() / q.ln()).floor();
    let w = if w.is_finite() && w < u32::MAX as f64 { w as u32 } else { u32::MAX };
    match limit {
        Some(l) => w.min(l),
        None => w,
    }
}

/// Jump from `start` in the inhomogeneous geometric law: a run of Bernoulli
/// successes with probability (α_k + π)x / (1 + α_k x) at site k.
pub fn sample_inhom_geometric<R: Rng + ?Sized>(
    alpha: &dyn Fn(i64) -> f64,
    pi: f64,
    x: f64,
    start: i64,
    limit: Option<u32>,
    rng: &mut R,
) -> u32 {
    let mut k = start;
    let mut w = 0u32;
    while limit.is_none_or(|l| w < l) {
        let a = alpha(k);
        let s = (a + pi) * x / (1.0 + a * x);
        if rng.random::<f64>() < s {
            k += 1;
            w += 1;
        } else {
            break;
        }
    }
    w
}

/// Probabilities of jumps 0..=maxval − start from `start`.
pub fn get_distribution(alpha: &dyn Fn(i64) -> f64, pi: f64, x: f64, maxval: i64, start: i64) -> Vec<f64> {
    let mut ret = vec![(1.0 - pi * x) / (1.0 + alpha(start) * x)];
    for k in start..maxval {
        let last = *ret.last().unwrap();
        ret.push(last * (alpha(k) + pi) * x / (1.0 + alpha(k + 1) * x));
    }
    ret
}

/// One synchronous round. `draw(j, pos, limit)` returns particle j's jump
/// from `pos`, already clipped to `limit` when blocking applies.
pub fn step_with_draws(
    case: CaseId,
    order: UpdateOrder,
    state: &[u32],
    draw: &mut dyn FnMut(usize, u32, Option<u32>) -> u32,
) -> Vec<u32> {
    let mut pos = state.to_vec();
    for j in order.sequence(pos.len()) {
        let idx = j - 1;
        if case.is_pushing() {
            let w = draw(j, pos[idx], None);
            if w == 0 {
                continue;
            }
            pos[idx] += w;
            let p = pos[idx];
            for k in (0..idx).rev() {
                if pos[k] < p {
                    pos[k] = p;
                } else {
                    break;
                }
            }
        } else {
            let limit = if idx == 0 { None } else { Some(pos[idx - 1] - pos[idx]) };
            let w = draw(j, pos[idx], limit);
            pos[idx] += limit.map_or(w, |l| w.min(l));
        }
    }
    pos
}

/// One time step `i` (1-based) of the configured process.
pub fn step_discrete<R: Rng + ?Sized>(cfg: &SimConfig, state: &[u32], i: usize, rng: &mut R) -> Vec<u32> {
    let x = (cfg.x)(i as i64);
    let mut draw = |j: usize, pos: u32, limit: Option<u32>| -> u32 {
        let r = (cfg.rate)(j as i64);
        match cfg.case {
            CaseId::A | CaseId::C => sample_geometric(r * x, limit, rng),
            CaseId::CanonicalC => {
                let off = cfg.position_index(pos, j) - pos as i64;
                let alpha = |k: i64| (cfg.alpha)(k + off);
                sample_inhom_geometric(&alpha, r, x, pos as i64, limit, rng)
            }
            CaseId::B | CaseId::D => (rng.random::<f64>() < r * x / (1.0 + r * x)) as u32,
            CaseId::CanonicalB => {
                let b = (cfg.beta)(cfg.position_index(pos, j));
                (rng.random::<f64>() < (r + b) * x / (1.0 + r * x)) as u32
            }
        }
    };
    step_with_draws(cfg.case, cfg.order, state, &mut draw)
}

pub fn rng_for(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, Partition)>,
}

impl Trajectory {
    pub fn last(&self) -> &Partition {
        &self.snapshots.last().expect("nonempty trajectory").1
    }

    /// CSV with a `step` column then one column per particle.
    pub fn to_csv(&self, ell: usize, picture: Picture) -> String {
        let mut s = String::from("step");
        for j in 1..=ell {
            let _ = write!(s, ",p{}", j);
        }
        s.push('\n');
        for (t, lam) in &self.snapshots {
            let _ = write!(s, "{}", t);
            for j in 1..=ell {
                let v = lam.part(j) as i64;
                let v = match picture {
                    Picture::Bosonic => v,
                    Picture::Fermionic => v - j as i64,
                };
                let _ = write!(s, ",{}", v);
            }
            s.push('\n');
        }
        s
    }
}

fn to_partition(pos: &[u32]) -> Partition {
    Partition::from_sorted(pos.to_vec())
}

/// Run `run_index` of the configured process.
pub fn run_indexed(cfg: &SimConfig, run_index: u64) -> Trajectory {
    let mut rng = rng_for(cfg.seed, run_index);
    let mut state = cfg.start.padded(cfg.ell);
    let mut snaps = vec![(0.0, to_partition(&state))];
    for i in 1..=cfg.steps {
        state = step_discrete(cfg, &state, i, &mut rng);
        if i % cfg.record_every == 0 || i == cfg.steps {
            snaps.push((i as f64, to_partition(&state)));
        }
    }
    Trajectory { snapshots: snaps }
}

pub fn run(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    Ok(run_indexed(cfg, 0))
}

/// Final state only, without storing the trajectory.
pub fn final_state<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Partition {
    let mut state = cfg.start.padded(cfg.ell);
    for i in 1..=cfg.steps {
        state = step_discrete(cfg, &state, i, rng);
    }
    to_partition(&state)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Summary {
    pub runs: usize,
    pub mean_positions: Vec<f64>,
    pub counts: BTreeMap<Partition, u64>,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {}", e)))
}

/// Final states of `count` runs, one substream per run.
pub fn run_many(cfg: &SimConfig, count: usize, threads: usize) -> Result<Summary> {
    cfg.validate()?;
    let finals: Vec<Partition> = pool(threads)?.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|r| final_state(cfg, &mut rng_for(cfg.seed, r)))
            .collect()
    });
    Ok(summarize(cfg.ell, finals))
}

fn summarize(ell: usize, finals: Vec<Partition>) -> Summary {
    let mut sums = vec![0.0; ell];
    let mut counts = BTreeMap::new();
    for lam in &finals {
        for (j, s) in sums.iter_mut().enumerate() {
            *s += lam.part(j + 1) as f64;
        }
        *counts.entry(lam.clone()).or_insert(0u64) += 1;
    }
    let n = finals.len().max(1) as f64;
    Summary {
        runs: finals.len(),
        mean_positions: sums.into_iter().map(|s| s / n).collect(),
        counts,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Behavior {
    Block,
    Push,
}

#[derive(PartialEq)]
struct Event(f64, usize);

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Event {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
    }
}

/// Continuous-time TASEP from the step initial condition. Every particle
/// carries an exponential clock of rate π_j; a min-heap holds the next ring
/// of each clock and only the fired clock is redrawn.
pub fn run_continuous<R: Rng + ?Sized>(ell: usize, t: f64, rate: &dyn Fn(i64) -> f64, rng: &mut R, behavior: Behavior) -> Partition {
    let mut pos = vec![0u32; ell];
    let mut heap = BinaryHeap::new();
    let clocks: Vec<Option<Exp<f64>>> = (1..=ell).map(|j| Exp::new(rate(j as i64)).ok().filter(|_| rate(j as i64) > 0.0)).collect();
    for (j, c) in clocks.iter().enumerate() {
        if let Some(e) = c {
            let s = e.sample(rng);
            if s <= t {
                heap.push(Reverse(Event(s, j)));
            }
        }
    }
    while let Some(Reverse(Event(now, j))) = heap.pop() {
        match behavior {
            Behavior::Block => {
                if j == 0 || pos[j] < pos[j - 1] {
                    pos[j] += 1;
                }
            }
            Behavior::Push => {
                pos[j] += 1;
                let p = pos[j];
                for k in (0..j).rev() {
                    if pos[k] < p {
                        pos[k] = p;
                    } else {
                        break;
                    }
                }
            }
        }
        let next = now + clocks[j].as_ref().expect("scheduled clock").sample(rng);
        if next <= t {
            heap.push(Reverse(Event(next, j)));
        }
    }
    to_partition(&pos)
}

pub fn run_continuous_many(
    ell: usize,
    t: f64,
    rate: Field,
    behavior: Behavior,
    seed: u64,
    count: usize,
    threads: usize,
) -> Result<Summary> {
    if !(t >= 0.0) {
        return Err(Error::Constraint(format!("t >= 0 fails: {}", t)));
    }
    let finals: Vec<Partition> = pool(threads)?.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|r| run_continuous(ell, t, &*rate, &mut rng_for(seed, r), behavior))
            .collect()
    });
    Ok(summarize(ell, finals))
}

/// Skews every uniform draw towards 0 by `u ↦ u^power`; used to check that
/// statistical tests notice a broken generator.
pub struct BiasedRng<R> {
    pub inner: R,
    pub power: f64,
}

impl<R: RngCore> RngCore for BiasedRng<R> {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let u = (self.inner.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let v = u.powf(self.power);
        ((v * (1u64 << 53) as f64) as u64) << 11
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let b = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&b[..chunk.len()]);
        }
    }
}

/// Height function of a fermionic configuration: number of particles at
/// sites ≥ k, for k from `lo` to `hi`.
pub fn height_profile(lam: &Partition, ell: usize, lo: i64, hi: i64) -> Vec<(i64, usize)> {
    let sites: Vec<i64> = (1..=ell).map(|j| lam.part(j) as i64 - j as i64).collect();
    (lo..=hi).map(|k| (k, sites.iter().filter(|&&s| s >= k).count())).collect()
}

fn profile_csv(columns: &[(&str, &Partition)], ell: usize) -> String {
    let hi = columns.iter().map(|(_, l)| l.first() as i64).max().unwrap_or(0);
    let lo = -(ell as i64);
    let mut s = String::from("site");
    for (name, _) in columns {
        let _ = write!(s, ",{}", name);
    }
    s.push('\n');
    let profiles: Vec<Vec<(i64, usize)>> = columns.iter().map(|(_, l)| height_profile(l, ell, lo, hi)).collect();
    for (r, k) in (lo..=hi).enumerate() {
        let _ = write!(s, "{}", k);
        for p in &profiles {
            let _ = write!(s, ",{}", p[r].1);
        }
        s.push('\n');
    }
    s
}

/// Continuous samples under blocking and pushing, `ell` particles, rate 1.
pub fn figure_continuous(ell: usize, t: f64, seed: u64) -> String {
    let one = |_: i64| 1.0;
    let b = run_continuous(ell, t, &one, &mut rng_for(seed, 0), Behavior::Block);
    let p = run_continuous(ell, t, &one, &mut rng_for(seed, 1), Behavior::Push);
    profile_csv(&[("block", &b), ("push", &p)], ell)
}

/// Discrete geometric samples with π = 1 and x = p over ⌊t/p⌋ steps, Case C
/// (blocking) and Case A (pushing).
pub fn figure_discrete(ell: usize, t: f64, p: f64, seed: u64) -> Result<String> {
    let n = (t / p).floor() as usize;
    let mk = |case| SimConfig::new(case, ell, n, seed).x(constant(p)).rate(constant(1.0));
    let b = final_state(&mk(CaseId::C), &mut rng_for(seed, 0));
    let a = final_state(&mk(CaseId::A), &mut rng_for(seed, 1));
    mk(CaseId::C).validate()?;
    Ok(profile_csv(&[("block", &b), ("push", &a)], ell))
}

/// The two canonical blocking regimes: constant α = −1/2 with π = 1,
/// x = 1/100, and α_k = sin(k/50)^6 / 2 with π = 1/2, x = 1/5.
pub fn figure_canonical(ell: usize, n: usize, seed: u64) -> Result<String> {
    let left = SimConfig::new(CaseId::CanonicalC, ell, n, seed)
        .x(constant(0.01))
        .rate(constant(1.0))
        .alpha(constant(-0.5));
    let right = SimConfig::new(CaseId::CanonicalC, ell, n, seed)
        .x(constant(0.2))
        .rate(constant(0.5))
        .alpha(sine_field(0.5, 50.0, 6));
    left.validate()?;
    right.validate()?;
    let l = final_state(&left, &mut rng_for(seed, 0));
    let r = final_state(&right, &mut rng_for(seed, 1));
    Ok(profile_csv(&[("left", &l), ("right", &r)], ell))
}

/// α_k = amp · sin(k / period)^power
pub fn sine_field(amp: f64, period: f64, power: i32) -> Field {
    Arc::new(move |k| amp * (k as f64 / period).sin().powi(power))
}

/// α_k = 1 − k e^{−k/2}
pub fn decay_field() -> Field {
    Arc::new(|k| 1.0 - k as f64 * (-(k as f64) / 2.0).exp())
}

/// Empirical jump-length frequencies of `draws` samples next to the exact law.
pub fn figure_jump_law(alpha: &Field, pi: f64, x: f64, draws: usize, seed: u64, threads: usize) -> Result<(String, f64)> {
    let chunks = 64usize;
    let per = draws.div_ceil(chunks);
    let hist: Vec<Vec<u64>> = pool(threads)?.install(|| {
        (0..chunks as u64)
            .into_par_iter()
            .map(|c| {
                let mut rng = rng_for(seed, c);
                let mut h = Vec::new();
                let m = per.min(draws.saturating_sub(c as usize * per));
                for _ in 0..m {
                    let w = sample_inhom_geometric(&**alpha, pi, x, 0, None, &mut rng) as usize;
                    if h.len() <= w {
                        h.resize(w + 1, 0);
                    }
                    h[w] += 1;
                }
                h
            })
            .collect()
    });
    let mut counts: Vec<u64> = Vec::new();
    for h in hist {
        if counts.len() < h.len() {
            counts.resize(h.len(), 0);
        }
        for (i, c) in h.into_iter().enumerate() {
            counts[i] += c;
        }
    }
    let maxval = (counts.len() as i64 + 20).max(60);
    let exact = get_distribution(&**alpha, pi, x, maxval, 0);
    let mut tv = 0.0;
    let mut s = String::from("k,empirical,exact,geometric\n");
    for (k, e) in exact.iter().enumerate() {
        let emp = counts.get(k).copied().unwrap_or(0) as f64 / draws as f64;
        tv += (emp - e).abs();
        let geo = (1.0 - pi * x) * (pi * x).powi(k as i32);
        let _ = writeln!(s, "{},{:.6},{:.6},{:.6}", k, emp, e, geo);
    }
    let tail: f64 = 1.0 - exact.iter().sum::<f64>();
    let beyond: f64 = counts.iter().skip(exact.len()).sum::<u64>() as f64 / draws as f64;
    tv += (beyond - tail).abs();
    Ok((s, tv / 2.0))
}
