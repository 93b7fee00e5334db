//! Multi-point distributions P(G(i,n) ≤ λ_i ∀i) and P(G(i,n) ≥ ν_i ∀i) as
//! ℓ×ℓ determinants, and the continuous-time kernels. Entries are contour
//! integrals; they can be evaluated as (super)symmetric series, by exact
//! residues, or by the trapezoid rule on a circle.

pub mod continuous;
pub mod contour;

pub use continuous::{boundary_determinant, continuous_distribution, continuous_kernel, master_residual};
pub use contour::{adaptive_trapezoid, Factor, Integrand};

use crate::error::{Error, Result};
use crate::exactalg::{
    det, e_k, q_to_f64, supersym_e, supersym_h, theta_h_super, theta_tail_bound, LaurentPoly, Params, Ring, Scalar,
    VarId, Q,
};
use crate::kernels::CaseId;
use crate::partitions::{subpartitions, Partition, SkewShape};
use crate::tableaux::{gen_flagged_schur, gen_g};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// every G(i,n) ≤ λ_i (pushing cases)
    Le,
    /// every G(i,n) ≥ ν_i (blocking cases)
    Ge,
}

impl Direction {
    pub fn for_case(case: CaseId) -> Direction {
        if case.is_pushing() {
            Direction::Le
        } else {
            Direction::Ge
        }
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "le" | "<=" => Ok(Direction::Le),
            "ge" | ">=" => Ok(Direction::Ge),
            _ => Err(Error::Usage(format!("direction {:?}: expected le or ge", s))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourMode {
    Residue,
    Series,
    Quadrature,
}

impl fmt::Display for ContourMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContourMode::Residue => "residue",
            ContourMode::Series => "series",
            ContourMode::Quadrature => "quadrature",
        })
    }
}

impl FromStr for ContourMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residue" => Ok(ContourMode::Residue),
            "series" => Ok(ContourMode::Series),
            "quadrature" => Ok(ContourMode::Quadrature),
            _ => Err(Error::Usage(format!("contour mode {:?}", s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    /// circle radius; None picks the midpoint of the admissible annulus
    pub radius: Option<Q>,
    /// starting node count for quadrature
    pub points: usize,
    pub mode: ContourMode,
}

impl ContourSpec {
    pub fn residue() -> Self {
        ContourSpec {
            radius: None,
            points: 256,
            mode: ContourMode::Residue,
        }
    }

    pub fn series() -> Self {
        ContourSpec {
            mode: ContourMode::Series,
            ..Self::residue()
        }
    }

    pub fn quadrature(radius: Option<Q>, points: usize) -> Self {
        ContourSpec {
            radius,
            points,
            mode: ContourMode::Quadrature,
        }
    }
}

impl FromStr for ContourSpec {
    type Err = Error;

    /// "r=3,q=256" (quadrature) with an optional "mode=residue|series|quadrature".
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = ContourSpec::quadrature(None, 256);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("contour option {:?} is not key=value", part)))?;
            match k.trim() {
                "r" => {
                    let r = crate::exactalg::parse_q(v.trim())
                        .ok_or_else(|| Error::Usage(format!("contour radius {:?}", v)))?;
                    spec.radius = Some(r);
                }
                "q" => {
                    spec.points = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Usage(format!("quadrature points {:?}", v)))?;
                }
                "mode" => spec.mode = v.trim().parse()?,
                other => return Err(Error::Usage(format!("unknown contour option {:?}", other))),
            }
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct MultiPointQuery<'a> {
    pub case: CaseId,
    pub direction: Direction,
    pub n: usize,
    pub thresholds: Partition,
    pub start: Partition,
    pub ell: usize,
    pub params: &'a Params<Q>,
}

impl<'a> MultiPointQuery<'a> {
    /// Direction follows the case; ℓ is the longer of the two vectors.
    pub fn new(case: CaseId, thresholds: Partition, start: Partition, n: usize, params: &'a Params<Q>) -> Self {
        let ell = thresholds.len().max(start.len());
        MultiPointQuery {
            case,
            direction: Direction::for_case(case),
            n,
            thresholds,
            start,
            ell,
            params,
        }
    }

    pub fn ell(mut self, ell: usize) -> Self {
        self.ell = ell;
        self
    }

    pub fn direction(mut self, d: Direction) -> Self {
        self.direction = d;
        self
    }

    fn check(&self) -> Result<Params<Q>> {
        if self.direction != Direction::for_case(self.case) {
            return Err(Error::Usage(format!(
                "case {} has a {} multi-point formula",
                self.case,
                if self.case.is_pushing() { "le" } else { "ge" }
            )));
        }
        if self.thresholds.len() > self.ell || self.start.len() > self.ell {
            return Err(Error::Usage(format!("vectors longer than ell = {}", self.ell)));
        }
        if self.params.n() < self.n {
            return Err(Error::Usage(format!(
                "{} time variables bound, {} steps requested",
                self.params.n(),
                self.n
            )));
        }
        let p = self.params.truncate_time(self.n);
        for j in 1..=self.ell {
            if p.rate(j) == Q::from_integer(0.into()) {
                return Err(Error::Pole(format!("rate {} is zero", j)));
            }
        }
        Ok(p)
    }
}

/// A determinant value with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MpValue {
    /// exact value when the mode produces one
    #[serde(skip)]
    pub exact: Option<Q>,
    pub value: f64,
    /// bound on |value − true value| from truncation or quadrature
    pub error_bound: f64,
    pub mode: ContourMode,
    /// series truncation degree or quadrature node count (0 if unused)
    pub resolution: usize,
}

impl MpValue {
    fn exact(v: Q, mode: ContourMode) -> Self {
        MpValue {
            value: q_to_f64(&v),
            exact: Some(v),
            error_bound: 0.0,
            mode,
            resolution: 0,
        }
    }
}

/// Shape of a determinant entry.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    /// h_m(X / Y), X = xs ⊔ yp, Y = ym
    SuperH,
    /// e_m(X / Y)
    SuperE,
    /// Σ_b h_{m+b}(xs) h_b(yp / ym)
    ThetaH,
    /// Σ_b e_{m+b}(xs) h_b(yp / ym)
    ThetaE,
}

#[derive(Clone, Debug)]
struct Entry {
    kind: Kind,
    m: i64,
    xs: Vec<Q>,
    yp: Vec<Q>,
    ym: Vec<Q>,
}

impl Entry {
    /// The integrand whose ∮ · dw/(2πi) is this entry.
    fn integrand(&self) -> Result<Integrand<Q>> {
        let one = Q::from_integer(1.into());
        let mut ig = Integrand::new(one);
        match self.kind {
            Kind::SuperH => {
                for a in self.xs.iter().chain(&self.yp) {
                    ig = ig.one_minus_over_w(a.clone(), -1)?;
                }
                for b in &self.ym {
                    ig = ig.one_minus_over_w(b.clone(), 1)?;
                }
                ig.w_pow(self.m as i32 - 1)
            }
            Kind::SuperE => {
                for a in self.xs.iter().chain(&self.yp) {
                    ig = ig.one_minus_over_w(-a.clone(), 1)?;
                }
                for b in &self.ym {
                    ig = ig.one_minus_over_w(-b.clone(), -1)?;
                }
                ig.w_pow(self.m as i32 - 1)
            }
            Kind::ThetaH | Kind::ThetaE => {
                let p = if self.kind == Kind::ThetaH { -1 } else { 1 };
                for x in &self.xs {
                    let x = if p == 1 { -x.clone() } else { x.clone() };
                    ig = ig.one_minus_times_w(x, p)?;
                }
                for a in &self.yp {
                    ig = ig.one_minus_over_w(a.clone(), -1)?;
                }
                for b in &self.ym {
                    ig = ig.one_minus_over_w(b.clone(), 1)?;
                }
                ig.w_pow(-(self.m as i32) - 1)
            }
        }
    }

    /// Series value with a bound on the dropped tail.
    fn series(&self, trunc: usize) -> Result<(Q, f64)> {
        Ok(match self.kind {
            Kind::SuperH => {
                let x: Vec<Q> = self.xs.iter().chain(&self.yp).cloned().collect();
                (supersym_h(self.m, &x, &self.ym), 0.0)
            }
            Kind::SuperE => {
                let x: Vec<Q> = self.xs.iter().chain(&self.yp).cloned().collect();
                (supersym_e(self.m, &x, &self.ym), 0.0)
            }
            Kind::ThetaE => {
                let mut acc = <Q as Ring>::zero();
                for a in self.m.max(0)..=self.xs.len() as i64 {
                    acc = acc + e_k(a, &self.xs) * supersym_h(a - self.m, &self.yp, &self.ym);
                }
                (acc, 0.0)
            }
            Kind::ThetaH => {
                let v = theta_h_super(self.m, &self.xs, &self.yp, &self.ym, trunc)?;
                let r = self.xs.iter().map(|x| q_to_f64(x).abs()).fold(0.0, f64::max);
                let q = self.yp.iter().chain(&self.ym).map(|y| q_to_f64(y).abs()).fold(0.0, f64::max);
                let s = self.yp.len() + self.ym.len();
                (v, theta_tail_bound(self.m, self.xs.len(), r, s, q, trunc))
            }
        })
    }
}

/// |det(A + E) − det(A)| ≤ per(|A| + |E|) − per(|A|), accumulated as a sum
/// of nonnegative terms so tiny perturbations do not cancel away.
fn det_perturbation(abs: &[Vec<f64>], err: &[Vec<f64>]) -> f64 {
    let n = abs.len();
    // per[mask] over |A|, diff[mask] = per over |A| + |E| minus per[mask]
    let mut per = vec![0.0; 1 << n];
    let mut diff = vec![0.0; 1 << n];
    per[0] = 1.0;
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        for c in (0..n).filter(|c| mask & (1 << c) != 0) {
            let prev = mask ^ (1 << c);
            let (a, e) = (abs[row][c], err[row][c]);
            per[mask] += a * per[prev];
            diff[mask] += (a + e) * diff[prev] + e * per[prev];
        }
    }
    diff[(1 << n) - 1]
}

fn radius_for(entries: &[Vec<Entry>], spec: &ContourSpec) -> Result<(f64, Vec<Vec<Integrand<f64>>>)> {
    let igs: Vec<Vec<Integrand<f64>>> = entries
        .iter()
        .map(|row| row.iter().map(|e| Ok(e.integrand()?.map(q_to_f64))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for ig in igs.iter().flatten() {
        let (a, b) = ig.pole_gap();
        lo = lo.max(a);
        hi = hi.min(b);
    }
    let r = match &spec.radius {
        Some(r) => q_to_f64(r),
        None => {
            if lo >= hi {
                return Err(Error::Constraint(format!(
                    "no circle separates the poles: inside up to {}, outside from {}",
                    lo, hi
                )));
            }
            if hi.is_finite() {
                (lo + hi) / 2.0
            } else {
                lo * 1.5 + 0.5
            }
        }
    };
    for ig in igs.iter().flatten() {
        ig.check_radius(r)?;
    }
    Ok((r, igs))
}

/// Series truncation: smallest degree whose tail bound is below 1e-15 per entry.
fn pick_trunc(entries: &[Vec<Entry>]) -> Result<usize> {
    let mmax = entries.iter().flatten().map(|e| e.m.max(0) as usize).max().unwrap_or(0);
    let mut t = mmax + 8;
    loop {
        let worst = entries
            .iter()
            .flatten()
            .filter(|e| e.kind == Kind::ThetaH)
            .map(|e| tail_only(e, t))
            .fold(0.0, f64::max);
        if worst < 1e-15 {
            return Ok(t);
        }
        if t > 4000 || !worst.is_finite() {
            return Err(Error::Constraint(
                "series mode needs |pi_j x_i| < 1 (and |alpha x| < 1); tail bound does not converge".into(),
            ));
        }
        t += 8;
    }
}

fn tail_only(e: &Entry, trunc: usize) -> f64 {
    let r = e.xs.iter().map(|x| q_to_f64(x).abs()).fold(0.0, f64::max);
    let q = e.yp.iter().chain(&e.ym).map(|y| q_to_f64(y).abs()).fold(0.0, f64::max);
    theta_tail_bound(e.m, e.xs.len(), r, e.yp.len() + e.ym.len(), q, trunc)
}

/// prefactor × det[entries] in the requested mode.
fn evaluate(pref: &Q, entries: Vec<Vec<Entry>>, spec: &ContourSpec) -> Result<MpValue> {
    let pabs = q_to_f64(pref).abs();
    match spec.mode {
        ContourMode::Series => {
            let trunc = if entries.iter().flatten().any(|e| e.kind == Kind::ThetaH) {
                pick_trunc(&entries)?
            } else {
                0
            };
            let vals: Vec<Vec<(Q, f64)>> = entries
                .par_iter()
                .map(|row| row.iter().map(|e| e.series(trunc)).collect::<Result<_>>())
                .collect::<Result<_>>()?;
            let m: Vec<Vec<Q>> = vals.iter().map(|r| r.iter().map(|v| v.0.clone()).collect()).collect();
            let abs: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| q_to_f64(v).abs()).collect()).collect();
            let err: Vec<Vec<f64>> = vals.iter().map(|r| r.iter().map(|v| v.1).collect()).collect();
            let v = pref.clone() * det(&m);
            let bound = pabs * det_perturbation(&abs, &err);
            if err.iter().flatten().all(|&e| e == 0.0) {
                return Ok(MpValue::exact(v, ContourMode::Series));
            }
            Ok(MpValue {
                value: q_to_f64(&v),
                exact: None,
                error_bound: bound,
                mode: ContourMode::Series,
                resolution: trunc,
            })
        }
        ContourMode::Residue => {
            let m: Vec<Vec<Q>> = entries
                .par_iter()
                .map(|row| {
                    row.iter()
                        .map(|e| Ok(e.integrand()?.residues(&contour::unit::<Q>)))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            Ok(MpValue::exact(pref.clone() * det(&m), ContourMode::Residue))
        }
        ContourMode::Quadrature => {
            let (r, igs) = radius_for(&entries, spec)?;
            let vals: Vec<Vec<(f64, usize, f64)>> = igs
                .par_iter()
                .map(|row| row.iter().map(|ig| adaptive_trapezoid(ig, r, spec.points, 0.0)).collect::<Result<_>>())
                .collect::<Result<_>>()?;
            let m: Vec<Vec<f64>> = vals.iter().map(|r| r.iter().map(|v| v.0).collect()).collect();
            let abs: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();
            let err: Vec<Vec<f64>> = vals.iter().map(|r| r.iter().map(|v| v.2 + 1e-15).collect()).collect();
            let nodes = vals.iter().flatten().map(|v| v.1).max().unwrap_or(0);
            Ok(MpValue {
                value: q_to_f64(pref) * crate::exactalg::det_f64(&m),
                exact: None,
                error_bound: pabs * det_perturbation(&abs, &err),
                mode: ContourMode::Quadrature,
                resolution: nodes,
            })
        }
    }
}

fn part_i64(p: &Partition, ell: usize) -> Vec<i64> {
    p.padded(ell).into_iter().map(i64::from).collect()
}

fn rate_power(p: &Params<Q>, lam: &[i64], mu: &[i64]) -> Q {
    (0..lam.len()).fold(Q::from_integer(1.into()), |acc, i| acc * p.rate(i + 1).powi((lam[i] - mu[i]) as i32))
}

fn x_product(p: &Params<Q>, ell: usize, f: impl Fn(&Q, &Q) -> Q) -> Q {
    let mut acc = Q::from_integer(1.into());
    for j in 1..=ell {
        for x in &p.x {
            acc = acc * f(&p.rate(j), x);
        }
    }
    acc
}

/// P_≤ for Cases A and D, exact.
pub fn mp_pushing(q: &MultiPointQuery<'_>, contour: Option<&ContourSpec>) -> Result<MpValue> {
    if !q.case.is_pushing() {
        return Err(Error::Usage(format!("case {} is not a pushing case", q.case)));
    }
    let p = q.check()?;
    let ell = q.ell;
    if !q.thresholds.contains(&q.start) {
        let mode = contour.map_or(ContourMode::Series, |c| c.mode);
        return Ok(MpValue::exact(<Q as Ring>::zero(), mode));
    }
    let lam = part_i64(&q.thresholds, ell);
    let nu = part_i64(&q.start, ell);
    let one = Q::from_integer(1.into());
    let inv: Vec<Q> = (1..=ell).map(|k| p.rate(k).inv()).collect();
    let neg_inv: Vec<Q> = inv.iter().map(|v| -v.clone()).collect();
    let (pref, kind, up, down): (Q, Kind, &Vec<Q>, &Vec<Q>) = match q.case {
        CaseId::A => (
            rate_power(&p, &lam, &nu) * x_product(&p, ell, |r, x| one.clone() - r.clone() * x.clone()),
            Kind::SuperH,
            &inv,
            &inv,
        ),
        _ => (
            rate_power(&p, &lam, &nu) / x_product(&p, ell, |r, x| one.clone() + r.clone() * x.clone()),
            Kind::SuperE,
            &neg_inv,
            &neg_inv,
        ),
    };
    let mut entries = Vec::with_capacity(ell);
    for i in 1..=ell {
        let mut row = Vec::with_capacity(ell);
        for j in 1..=ell {
            let m = lam[i - 1] - nu[j - 1] + j as i64 - i as i64;
            // A: h(x ⊔ π_{1..i}^{-1} / π_{1..j−1}^{-1}); D: e(x ⊔ −ρ_{<j}^{-1} / −ρ_{≤i}^{-1})
            let (yp, ym) = if q.case == CaseId::A {
                (up[..i].to_vec(), down[..j - 1].to_vec())
            } else {
                (up[..j - 1].to_vec(), down[..i].to_vec())
            };
            row.push(Entry {
                kind,
                m,
                xs: p.x.clone(),
                yp,
                ym,
            });
        }
        entries.push(row);
    }
    evaluate(&pref, entries, contour.unwrap_or(&ContourSpec::series()))
}

/// P_≥ for Cases B and C. Series mode by default.
pub fn mp_blocking(q: &MultiPointQuery<'_>, contour: Option<&ContourSpec>) -> Result<MpValue> {
    if !matches!(q.case, CaseId::B | CaseId::C) {
        return Err(Error::Usage(format!("case {} is not B or C", q.case)));
    }
    let p = q.check()?;
    let ell = q.ell;
    let nu = part_i64(&q.thresholds, ell);
    let mu = part_i64(&q.start, ell);
    let one = Q::from_integer(1.into());
    let rates: Vec<Q> = (1..=ell).map(|k| p.rate(k)).collect();
    let (pref, kind) = if q.case == CaseId::C {
        (
            x_product(&p, ell, |r, x| one.clone() - r.clone() * x.clone()) * rate_power(&p, &nu, &mu),
            Kind::ThetaH,
        )
    } else {
        (
            rate_power(&p, &nu, &mu) / x_product(&p, ell, |r, x| one.clone() + r.clone() * x.clone()),
            Kind::ThetaE,
        )
    };
    let mut entries = Vec::with_capacity(ell);
    for i in 1..=ell {
        let row = (1..=ell)
            .map(|j| Entry {
                kind,
                m: nu[i - 1] - mu[j - 1] - i as i64 + j as i64,
                xs: p.x.clone(),
                yp: rates[..j].to_vec(),
                ym: rates[..i - 1].to_vec(),
            })
            .collect();
        entries.push(row);
    }
    evaluate(&pref, entries, contour.unwrap_or(&ContourSpec::series()))
}

/// P_≥ for the canonical geometric process (position-dependent α).
pub fn mp_canonical(q: &MultiPointQuery<'_>, contour: Option<&ContourSpec>) -> Result<MpValue> {
    if q.case != CaseId::CanonicalC {
        return Err(Error::Usage(format!(
            "canonical multi-point is implemented for canonical-C, not {}",
            q.case
        )));
    }
    let p = q.check()?;
    let ell = q.ell;
    let nu = part_i64(&q.thresholds, ell);
    let mu = part_i64(&q.start, ell);
    let one = Q::from_integer(1.into());
    let rates: Vec<Q> = (1..=ell).map(|k| p.rate(k)).collect();
    let mut pref = x_product(&p, ell, |r, x| one.clone() - r.clone() * x.clone());
    for i in 1..=ell {
        // ∏_{c = μ_i+1}^{ν_i} (α_{c−1} + π_i), inverted when ν_i < μ_i
        let (a, b) = (mu[i - 1].min(nu[i - 1]), mu[i - 1].max(nu[i - 1]));
        let mut f = one.clone();
        for c in a + 1..=b {
            f = f * (p.alpha((c - 1) as usize) + p.rate(i));
        }
        if nu[i - 1] < mu[i - 1] {
            if f == <Q as Ring>::zero() {
                return Err(Error::Pole(format!("alpha + pi_{} vanishes in the box weight", i)));
            }
            f = f.inv();
        }
        pref = pref * f;
    }
    let neg_alpha = |k: i64| -p.alpha(k as usize);
    let mut entries = Vec::with_capacity(ell);
    for i in 1..=ell {
        let mut row = Vec::with_capacity(ell);
        for j in 1..=ell {
            let (ni, mj) = (nu[i - 1], mu[j - 1]);
            let mut yp = rates[..j].to_vec();
            let mut ym = rates[..i - 1].to_vec();
            yp.extend((mj..ni).map(neg_alpha));
            ym.extend((ni..mj).map(neg_alpha));
            row.push(Entry {
                kind: Kind::ThetaH,
                m: ni - mj - i as i64 + j as i64,
                xs: p.x.clone(),
                yp,
                ym,
            });
        }
        entries.push(row);
    }
    evaluate(&pref, entries, contour.unwrap_or(&ContourSpec::series()))
}

/// Dispatch on the case.
pub fn multipoint(q: &MultiPointQuery<'_>, contour: Option<&ContourSpec>) -> Result<MpValue> {
    match q.case {
        CaseId::A | CaseId::D => mp_pushing(q, contour),
        CaseId::B | CaseId::C => mp_blocking(q, contour),
        CaseId::CanonicalC => mp_canonical(q, contour),
        CaseId::CanonicalB => Err(Error::Usage("no multi-point formula for canonical-B".into())),
    }
}

/// The Case C entries written literally from the β-form of the contour
/// determinant (β_k = π_{k+1}); row 1 carries 1/(1 − π_1/w).
pub fn mp_case_c_alt(q: &MultiPointQuery<'_>, contour: &ContourSpec) -> Result<MpValue> {
    if q.case != CaseId::C {
        return Err(Error::Usage("the alternative contour form is for case C".into()));
    }
    let p = q.check()?;
    let ell = q.ell;
    let nu = part_i64(&q.thresholds, ell);
    let mu = part_i64(&q.start, ell);
    let one = Q::from_integer(1.into());
    let beta = |k: usize| p.rate(k + 1);
    let pref = x_product(&p, ell, |r, x| one.clone() - r.clone() * x.clone()) * rate_power(&p, &nu, &mu);
    let mut m = vec![vec![<Q as Ring>::zero(); ell]; ell];
    let mut mf = vec![vec![0.0; ell]; ell];
    let mut errs = vec![vec![0.0; ell]; ell];
    let mut nodes = 0;
    for i in 1..=ell {
        for j in 1..=ell {
            let mut ig = Integrand::new(one.clone());
            if i == 1 {
                ig = ig.one_minus_over_w(p.rate(1), -1)?;
            } else {
                for k in 1..=i - 2 {
                    ig = ig.one_minus_over_w(beta(k), 1)?;
                }
            }
            for k in 1..j {
                ig = ig.one_minus_over_w(beta(k), -1)?;
            }
            for x in &p.x {
                ig = ig.one_minus_times_w(x.clone(), -1)?;
            }
            let e = nu[i - 1] - mu[j - 1] - i as i64 + j as i64;
            ig = ig.w_pow(-(e as i32) - 1)?;
            match contour.mode {
                ContourMode::Quadrature => {
                    let f = ig.map(q_to_f64);
                    let r = match &contour.radius {
                        Some(r) => q_to_f64(r),
                        None => {
                            let (lo, hi) = f.pole_gap();
                            if hi.is_finite() {
                                (lo + hi) / 2.0
                            } else {
                                lo * 1.5 + 0.5
                            }
                        }
                    };
                    let (v, n, d) = adaptive_trapezoid(&f, r, contour.points, 0.0)?;
                    mf[i - 1][j - 1] = v;
                    errs[i - 1][j - 1] = d + 1e-15;
                    nodes = nodes.max(n);
                }
                _ => m[i - 1][j - 1] = ig.residues(&contour::unit::<Q>),
            }
        }
    }
    if contour.mode == ContourMode::Quadrature {
        let abs: Vec<Vec<f64>> = mf.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();
        return Ok(MpValue {
            value: q_to_f64(&pref) * crate::exactalg::det_f64(&mf),
            exact: None,
            error_bound: q_to_f64(&pref).abs() * det_perturbation(&abs, &errs),
            mode: ContourMode::Quadrature,
            resolution: nodes,
        });
    }
    Ok(MpValue::exact(pref * det(&m), ContourMode::Residue))
}

/// Σ_{μ⊆λ} β^{λ−μ} g_μ(x_n; β) − s_{λ,φ}(x_n, β_ℓ) with row i flagged by
/// β_1..β_i; zero when the branching identity holds.
pub fn flagged_branching_gap(lam: &Partition, n: usize) -> Result<LaurentPoly> {
    let flags: Vec<usize> = (1..=lam.len()).collect();
    let lhs = gen_flagged_schur(lam, n, &flags)?;
    let mut rhs = LaurentPoly::zero();
    for mu in subpartitions(lam) {
        let mut w = LaurentPoly::one();
        for i in 1..=lam.len() {
            let e = lam.part(i) - mu.part(i);
            for _ in 0..e {
                w = &w * &LaurentPoly::var(VarId::b(i as u32));
            }
        }
        rhs += &(&w * &gen_g(&SkewShape::straight(mu), n, true));
    }
    Ok(&rhs - &lhs)
}

#[cfg(test)]
mod tests;
