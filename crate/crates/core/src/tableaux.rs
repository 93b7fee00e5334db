//! Tableau generating functions: canonical (hook-valued) G and its set-valued
//! and multiset-valued specializations, reverse plane partitions (g), valued-set
//! tableaux (j), and flagged semistandard tableaux.
//!
//! Everything runs through one row-major transfer over a profile of per-column
//! maxima, so polynomials are exact and never sampled.

use crate::error::{Error, Result};
use crate::exactalg::{LaurentPoly, Params, RationalFn, Ring, Scalar, VarId};
use crate::partitions::{Partition, SkewShape};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Which box coordinate indexes α and β in hook weights and corner factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexConvention {
    /// β_row, α_col. Agrees with the particle dynamics.
    BetaRowAlphaCol,
    /// α_row, β_col, the literal reading of the definition.
    AlphaRowBetaCol,
}

pub const DEFAULT_CONVENTION: IndexConvention = IndexConvention::BetaRowAlphaCol;

impl IndexConvention {
    /// (α index, β index) for the box (r, c).
    pub fn indices(self, r: usize, c: u32) -> (usize, usize) {
        match self {
            IndexConvention::BetaRowAlphaCol => (c as usize, r),
            IndexConvention::AlphaRowBetaCol => (r, c as usize),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexConvention::BetaRowAlphaCol => "beta-row/alpha-col",
            IndexConvention::AlphaRowBetaCol => "alpha-row/beta-col",
        }
    }
}

/// One cell of a hook-valued tableau.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HookEntry {
    pub corner: u8,
    /// weakly increasing, each ≥ corner
    pub arm: Vec<u8>,
    /// strictly increasing, each > corner
    pub leg: Vec<u8>,
}

impl HookEntry {
    pub fn is_valid(&self) -> bool {
        self.arm.windows(2).all(|w| w[0] <= w[1])
            && self.leg.windows(2).all(|w| w[0] < w[1])
            && self.arm.first().map_or(true, |&a| a >= self.corner)
            && self.leg.first().map_or(true, |&b| b > self.corner)
    }

    pub fn min(&self) -> u8 {
        self.corner
    }

    pub fn max(&self) -> u8 {
        let a = self.arm.last().copied().unwrap_or(0);
        let b = self.leg.last().copied().unwrap_or(0);
        self.corner.max(a).max(b)
    }
}

/// A filling by hooks, checked against the local row and column conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct HookTableau {
    pub shape: SkewShape,
    pub cells: BTreeMap<(usize, u32), HookEntry>,
}

impl HookTableau {
    pub fn is_valid(&self) -> bool {
        for (r, c) in self.shape.cells() {
            let Some(e) = self.cells.get(&(r, c)) else {
                return false;
            };
            if !e.is_valid() {
                return false;
            }
            if let Some(left) = self.cells.get(&(r, c.wrapping_sub(1))) {
                if left.max() > e.min() {
                    return false;
                }
            }
            if r > 1 {
                if let Some(up) = self.cells.get(&(r - 1, c)) {
                    if up.max() >= e.min() {
                        return false;
                    }
                }
            }
        }
        self.cells.len() == self.shape.cells().len()
    }

    /// Signed weight ∏ (−α)^{arm} (−β)^{leg} x^{entries}.
    pub fn weight<S: Scalar>(&self, p: &Params<S>, conv: IndexConvention) -> S {
        let mut w = S::one();
        for (&(r, c), e) in &self.cells {
            let (ai, bi) = conv.indices(r, c);
            w = w * p.x(e.corner as usize);
            for &u in &e.arm {
                w = w * -(p.alpha(ai) * p.x(u as usize));
            }
            for &u in &e.leg {
                w = w * -(p.beta(bi) * p.x(u as usize));
            }
        }
        w
    }
}

/// Per-cell choices: (stored maximum, weight). `left` and `above` are the
/// stored maxima of the neighbours, 0 when the neighbour is outside the shape.
pub type CellOptions<'a, S> = dyn Fn(usize, u32, u8, u8) -> Vec<(u8, S)> + 'a;

/// Row-major transfer over the cells of `shape`.
pub fn transfer<S: Ring>(shape: &SkewShape, opts: &CellOptions<'_, S>) -> S {
    let width = shape.outer.first() as usize;
    let mut states: BTreeMap<Vec<u8>, S> = BTreeMap::new();
    states.insert(vec![0; width], S::one());
    for r in 1..=shape.outer.len() {
        let lo = shape.inner.part(r);
        let hi = shape.outer.part(r);
        // forget columns the new row cannot see
        let mut reset: BTreeMap<Vec<u8>, S> = BTreeMap::new();
        for (mut prof, w) in states {
            for (c, v) in prof.iter_mut().enumerate() {
                let col = c as u32 + 1;
                if col <= lo || col > hi {
                    *v = 0;
                }
            }
            accumulate(&mut reset, prof, w);
        }
        states = reset;
        for c in lo + 1..=hi {
            let mut cache: HashMap<(u8, u8), Vec<(u8, S)>> = HashMap::new();
            let mut next: BTreeMap<Vec<u8>, S> = BTreeMap::new();
            for (prof, w) in states {
                let left = if c > lo + 1 { prof[c as usize - 2] } else { 0 };
                let above = prof[c as usize - 1];
                let choices = cache
                    .entry((left, above))
                    .or_insert_with(|| opts(r, c, left, above));
                for (m, cw) in choices.iter() {
                    let mut np = prof.clone();
                    np[c as usize - 1] = *m;
                    accumulate(&mut next, np, w.clone() * cw.clone());
                }
            }
            states = next;
        }
    }
    states.into_values().fold(S::zero(), |a, b| a + b)
}

fn accumulate<S: Ring>(map: &mut BTreeMap<Vec<u8>, S>, k: Vec<u8>, w: S) {
    if w.is_zero() {
        return;
    }
    match map.get_mut(&k) {
        Some(v) => {
            let s = v.clone() + w;
            if s.is_zero() {
                map.remove(&k);
            } else {
                *v = s;
            }
        }
        None => {
            map.insert(k, w);
        }
    }
}

fn hook_options<S: Scalar>(
    p: &Params<S>,
    conv: IndexConvention,
    r: usize,
    c: u32,
    left: u8,
    above: u8,
) -> Vec<(u8, S)> {
    let n = p.n();
    let (ai, bi) = conv.indices(r, c);
    let a = p.alpha(ai);
    let b = p.beta(bi);
    let lo = (left as usize).max(above as usize + 1).max(1);
    let mut out: BTreeMap<u8, S> = BTreeMap::new();
    for v in lo..=n {
        // arm multisets grouped by their maximum, resummed per letter
        let mut arm = vec![S::zero(); n + 1];
        if a.is_zero() {
            arm[v] = S::one();
        } else {
            let w = |u: usize| -(a.clone() * p.x(u)) / (S::one() + a.clone() * p.x(u));
            let mut run = S::one();
            for (m, slot) in arm.iter_mut().enumerate().skip(v) {
                let wm = w(m);
                *slot = if m == v {
                    S::one() + wm.clone()
                } else {
                    wm.clone() * run.clone()
                };
                run = run * (S::one() + wm);
            }
        }
        let mut leg = vec![S::zero(); n + 1];
        leg[v] = S::one();
        if !b.is_zero() {
            let mut run = S::one();
            for (m, slot) in leg.iter_mut().enumerate().skip(v + 1) {
                let lm = -(b.clone() * p.x(m));
                *slot = lm.clone() * run.clone();
                run = run * (S::one() + lm);
            }
        }
        let xv = p.x(v);
        for m1 in v..=n {
            if arm[m1].is_zero() {
                continue;
            }
            for m2 in v..=n {
                if leg[m2].is_zero() {
                    continue;
                }
                let m = m1.max(m2) as u8;
                let t = xv.clone() * arm[m1].clone() * leg[m2].clone();
                let e = out.entry(m).or_insert_with(S::zero);
                *e = e.clone() + t;
            }
        }
    }
    out.into_iter().filter(|(_, w)| !w.is_zero()).collect()
}

/// Canonical G_{λ/μ}(x_1..x_n; α, β) with n = p.x.len(). When μ ⊄ λ the
/// skew function is ∏_{μ/λ}(α+β) · G_{λ/(λ∩μ)}.
pub fn canonical_g<S: Scalar>(outer: &Partition, inner: &Partition, p: &Params<S>, conv: IndexConvention) -> S {
    let meet = outer.intersection(inner);
    let mut pre = S::one();
    for (r, c) in inner.cells() {
        if c > outer.part(r) {
            let (ai, bi) = conv.indices(r, c);
            pre = pre * (p.alpha(ai) + p.beta(bi));
        }
    }
    if pre.is_zero() {
        return pre;
    }
    let shape = SkewShape {
        outer: outer.clone(),
        inner: meet,
    };
    if shape.size() as usize > 0 && p.n() > 255 {
        panic!("too many variables");
    }
    pre * transfer(&shape, &|r, c, l, a| hook_options(p, conv, r, c, l, a))
}

/// G_{λ\\μ}: sum over removals of corner subsets of μ, each removed corner
/// contributing −(α + β).
pub fn canonical_g_ds<S: Scalar>(outer: &Partition, inner: &Partition, p: &Params<S>, conv: IndexConvention) -> S {
    let corners = inner.corners();
    let mut acc = S::zero();
    for mask in 0u32..(1 << corners.len()) {
        let mut nu: Vec<u32> = inner.parts().to_vec();
        let mut f = S::one();
        for (k, &(r, c)) in corners.iter().enumerate() {
            if mask & (1 << k) != 0 {
                nu[r - 1] -= 1;
                let (ai, bi) = conv.indices(r, c);
                f = f * -(p.alpha(ai) + p.beta(bi));
            }
        }
        if f.is_zero() {
            continue;
        }
        let nu = Partition::from_sorted(nu);
        acc = acc + f * canonical_g(outer, &nu, p, conv);
    }
    acc
}

/// Dual Grothendieck g_{λ/μ}(x; β): reverse plane partitions, an equal
/// vertical pair counts as one merged entry with weight β_{upper row}.
pub fn dual_g<S: Ring>(shape: &SkewShape, p: &Params<S>) -> S {
    let n = p.n();
    transfer(shape, &|r, _c, left, above| {
        let lo = (left.max(above) as usize).max(1);
        (lo..=n)
            .filter_map(|v| {
                let w = if above > 0 && v == above as usize {
                    p.beta(r - 1)
                } else {
                    p.x(v)
                };
                (!w.is_zero()).then_some((v as u8, w))
            })
            .collect()
    })
}

/// Dual weak Grothendieck j_{λ/μ}(x; α): semistandard fillings in which an
/// equal horizontal pair may be merged, with weight α_{left column}.
pub fn dual_j<S: Ring>(shape: &SkewShape, p: &Params<S>) -> S {
    let n = p.n();
    transfer(shape, &|_r, c, left, above| {
        let lo = (left as usize).max(above as usize + 1);
        let mut out = Vec::new();
        for v in lo..=n {
            let mut w = p.x(v);
            if left > 0 && v == left as usize {
                w = w + p.alpha(c as usize - 1);
            }
            if !w.is_zero() {
                out.push((v as u8, w));
            }
        }
        out
    })
}

/// Flagged semistandard tableaux of shape λ over x_1 < … < x_n < b_1 < b_2 < …,
/// where row i may use b_1..b_{flags[i-1]}. Letter b_k has weight `b[k]`.
pub fn flagged_schur<S: Ring>(lam: &Partition, x: &[S], flags: &[usize], b: &[S]) -> S {
    let n = x.len();
    let shape = SkewShape::straight(lam.clone());
    transfer(&shape, &|r, _c, left, above| {
        let f = flags.get(r - 1).copied().unwrap_or(0);
        let lo = (left as usize).max(above as usize + 1).max(1);
        (lo..=n + f)
            .filter_map(|v| {
                let w = if v <= n {
                    x[v - 1].clone()
                } else {
                    b.get(v - n).cloned().unwrap_or_else(S::zero)
                };
                (!w.is_zero()).then_some((v as u8, w))
            })
            .collect()
    })
}

/// Plain semistandard count-weighted Schur function s_{λ/μ}(x).
pub fn schur_skew<S: Ring>(shape: &SkewShape, x: &[S]) -> S {
    let n = x.len();
    transfer(shape, &|_r, _c, left, above| {
        let lo = (left as usize).max(above as usize + 1).max(1);
        (lo..=n).map(|v| (v as u8, x[v - 1].clone())).collect()
    })
}

// Symbolic wrappers over the variable families X, A, B.

fn symbolic_params(n: usize, alpha_on: bool, beta_on: bool, k: usize) -> Params<RationalFn> {
    Params::symbolic(n, 0, if alpha_on { k } else { 0 }, if beta_on { k } else { 0 })
}

fn shape_width(shape: &SkewShape) -> usize {
    shape.outer.len().max(shape.outer.first() as usize).max(shape.inner.len()).max(shape.inner.first() as usize) + 1
}

/// Symbolic canonical G_{λ/μ} in x_1..x_n with α_k = a_k, β_j = b_j.
#[allow(non_snake_case)]
pub fn gen_G(shape: &SkewShape, n: usize, alpha_on: bool, beta_on: bool, conv: IndexConvention) -> RationalFn {
    let p = symbolic_params(n, alpha_on, beta_on, shape_width(shape));
    canonical_g(&shape.outer, &shape.inner, &p, conv)
}

/// Symbolic G_{λ\\μ}; μ need not be contained in λ.
#[allow(non_snake_case)]
pub fn gen_G_doubleslash(
    outer: &Partition,
    inner: &Partition,
    n: usize,
    alpha_on: bool,
    beta_on: bool,
    conv: IndexConvention,
) -> RationalFn {
    let w = outer.len().max(outer.first() as usize).max(inner.len()).max(inner.first() as usize) + 1;
    let p = symbolic_params(n, alpha_on, beta_on, w);
    canonical_g_ds(outer, inner, &p, conv)
}

fn poly_params(n: usize, fam_alpha: bool, k: usize) -> Params<LaurentPoly> {
    let x = (1..=n).map(|i| LaurentPoly::var(VarId::x(i as u32))).collect();
    let mut p = Params::new(x, Vec::new());
    let vars: Vec<LaurentPoly> = (0..=k)
        .map(|j| {
            if j == 0 {
                LaurentPoly::zero()
            } else if fam_alpha {
                LaurentPoly::var(VarId::a(j as u32))
            } else {
                LaurentPoly::var(VarId::b(j as u32))
            }
        })
        .collect();
    if fam_alpha {
        p.alpha = vars;
    } else {
        p.beta = vars;
    }
    p
}

/// Symbolic g_{λ/μ}(x_n; β). Unrefined collapses every β_j to b_1.
pub fn gen_g(shape: &SkewShape, n: usize, refined: bool) -> LaurentPoly {
    let mut p = poly_params(n, false, shape_width(shape));
    if !refined {
        let b1 = LaurentPoly::var(VarId::b(1));
        for (j, v) in p.beta.iter_mut().enumerate() {
            if j > 0 {
                *v = b1.clone();
            }
        }
    }
    dual_g(shape, &p)
}

/// Symbolic j_{λ/μ}(x_n; α). Unrefined collapses every α_k to a_1.
pub fn gen_j(shape: &SkewShape, n: usize, refined: bool) -> LaurentPoly {
    let mut p = poly_params(n, true, shape_width(shape));
    if !refined {
        let a1 = LaurentPoly::var(VarId::a(1));
        for (j, v) in p.alpha.iter_mut().enumerate() {
            if j > 0 {
                *v = a1.clone();
            }
        }
    }
    dual_j(shape, &p)
}

/// Symbolic flagged Schur function with flag letters b_k.
pub fn gen_flagged_schur(lam: &Partition, n: usize, flags: &[usize]) -> Result<LaurentPoly> {
    if flags.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Usage("flags must be weakly increasing".into()));
    }
    let x: Vec<LaurentPoly> = (1..=n).map(|i| LaurentPoly::var(VarId::x(i as u32))).collect();
    let fmax = flags.iter().copied().max().unwrap_or(0);
    let b: Vec<LaurentPoly> = (0..=fmax)
        .map(|k| {
            if k == 0 {
                LaurentPoly::zero()
            } else {
                LaurentPoly::var(VarId::b(k as u32))
            }
        })
        .collect();
    Ok(flagged_schur(lam, &x, flags, &b))
}

// Identity checks: each returns left side minus right side.

/// Symbolic parameters in x_1, x_2 plus the one-variable slices x_1 and x_2.
fn split_params(w: usize, alpha_on: bool) -> (Params<RationalFn>, Params<RationalFn>, Params<RationalFn>) {
    let both = symbolic_params(2, alpha_on, true, w);
    let mut first = both.clone();
    first.x.truncate(1);
    let mut second = both.clone();
    second.x = vec![both.x[1].clone()];
    (both, first, second)
}

/// G_{λ/μ}(x, y) − Σ_{ν ⊆ λ} G_{λ\\ν}(y) G_{ν/μ}(x) with one x and one y.
pub fn branching_gap_single(lam: &Partition, mu: &Partition, conv: IndexConvention) -> RationalFn {
    let w = lam.len().max(lam.first() as usize).max(mu.len()).max(mu.first() as usize) + 1;
    let (both, x, y) = split_params(w, true);
    let mut acc = canonical_g(lam, mu, &both, conv);
    for nu in crate::partitions::subpartitions(lam) {
        acc = acc - canonical_g_ds(lam, &nu, &y, conv) * canonical_g(&nu, mu, &x, conv);
    }
    acc
}

/// G_{λ\\μ}(x, y) − Σ_{μ ⊆ ν ⊆ λ} G_{λ\\ν}(y) G_{ν\\μ}(x).
pub fn branching_gap_double(lam: &Partition, mu: &Partition, conv: IndexConvention) -> RationalFn {
    let w = lam.len().max(lam.first() as usize) + 1;
    let (both, x, y) = split_params(w, true);
    let mut acc = canonical_g_ds(lam, mu, &both, conv);
    for nu in crate::partitions::interval(mu, lam) {
        acc = acc - canonical_g_ds(lam, &nu, &y, conv) * canonical_g_ds(&nu, mu, &x, conv);
    }
    acc
}

/// g_{λ/μ}(x, y) − Σ_{μ ⊆ ν ⊆ λ} g_{λ/ν}(y) g_{ν/μ}(x).
pub fn branching_gap_dual(lam: &Partition, mu: &Partition) -> Result<LaurentPoly> {
    let w = lam.len().max(lam.first() as usize) + 1;
    let both = poly_params(2, false, w);
    let mut x = both.clone();
    x.x.truncate(1);
    let mut y = both.clone();
    y.x = vec![both.x[1].clone()];
    let mut acc = dual_g(&SkewShape::new(lam.clone(), mu.clone())?, &both);
    for nu in crate::partitions::interval(mu, lam) {
        let outer = dual_g(&SkewShape::new(lam.clone(), nu.clone())?, &y);
        let inner = dual_g(&SkewShape::new(nu, mu.clone())?, &x);
        acc = &acc - &(&outer * &inner);
    }
    Ok(acc)
}

/// ω g_{λ/μ}(x; β) = j_{λ'/μ'}(x; β), compared as Schur expansions in n
/// variables (terms that vanish in n variables dropped on both sides).
pub fn omega_duality_holds(shape: &SkewShape, n: usize) -> Result<bool> {
    use crate::exactalg::{omega_on_expansion, schur_expand, Family, Monomial};
    let d = shape.size() as usize + 1;
    let fits = |k: &Partition| k.len() <= n && k.first() as usize <= n;
    let g = schur_expand(&gen_g(shape, n, true), n, d)?;
    let j = schur_expand(&gen_j(&shape.conjugate(), n, true), n, d)?;
    let a_to_b = |m: &Monomial| {
        Monomial::from_pairs(m.exps().iter().map(|&(v, e)| {
            let w = if v.family == Family::A { VarId::b(v.index) } else { v };
            (w, e)
        }))
    };
    let lhs: BTreeMap<Partition, LaurentPoly> = g.coeffs.into_iter().filter(|(k, _)| fits(k)).collect();
    let rhs: BTreeMap<Partition, LaurentPoly> = omega_on_expansion(&j)
        .coeffs
        .into_iter()
        .map(|(k, v)| (k, v.map_monomials(a_to_b)))
        .filter(|(k, _)| fits(k))
        .collect();
    Ok(lhs == rhs)
}

fn as_poly(f: &RationalFn) -> Result<LaurentPoly> {
    f.as_poly()
        .cloned()
        .ok_or_else(|| Error::Usage(format!("expected a polynomial, got {}", f)))
}

/// Skew Cauchy identity at α = 0 in one x (x_1) and one y (x_2), both sides
/// truncated to total x-degree `degree`:
/// Σ_λ G_{λ\\μ}(x) g_{λ/ν}(y) − (1 − xy)^{-1} Σ_η G_{ν\\η}(x) g_{μ/η}(y).
pub fn skew_cauchy_gap(mu: &Partition, nu: &Partition, degree: u32, conv: IndexConvention) -> Result<LaurentPoly> {
    let is_x = |v: VarId| v.family == crate::exactalg::Family::X;
    let top = mu.size().max(nu.size()) + degree;
    let rows = mu.len().max(nu.len()) + degree as usize;
    let w = rows.max(top as usize) + 1;
    let (_, gx, _) = split_params(w, false);
    let mut gy = poly_params(2, false, w);
    gy.x.remove(0);
    let mut lhs = LaurentPoly::zero();
    for lam in crate::partitions::partitions_up_to(top, rows) {
        if !lam.contains(nu) || lam.size() > mu.size() + degree {
            continue;
        }
        let big = as_poly(&canonical_g_ds(&lam, mu, &gx, conv))?;
        if big.is_zero() {
            continue;
        }
        let small = dual_g(&SkewShape::new(lam, nu.clone())?, &gy);
        lhs += &(&big * &small).truncate(is_x, degree as i64);
    }
    let mut inner = LaurentPoly::zero();
    for eta in crate::partitions::subpartitions(&mu.intersection(nu)) {
        let big = as_poly(&canonical_g_ds(nu, &eta, &gx, conv))?;
        let small = dual_g(&SkewShape::new(mu.clone(), eta)?, &gy);
        inner += &(&big * &small);
    }
    let xy = &LaurentPoly::var(VarId::x(1)) * &LaurentPoly::var(VarId::x(2));
    let mut geo = LaurentPoly::zero();
    for k in 0..=degree / 2 {
        geo += &xy.pow_u(k);
    }
    let rhs = (&geo * &inner).truncate(is_x, degree as i64);
    Ok(&lhs.truncate(is_x, degree as i64) - &rhs)
}

// Explicit enumeration, for listings and trajectory decoding.

/// All fillings produced by per-cell choices, in row-major cell order.
pub fn enumerate<T: Clone>(
    shape: &SkewShape,
    opts: &dyn Fn(usize, u32, u8, u8) -> Vec<(u8, T)>,
    limit: usize,
) -> Vec<Vec<((usize, u32), T)>> {
    let cells = shape.cells();
    let mut out = Vec::new();
    let mut stored: HashMap<(usize, u32), u8> = HashMap::new();
    let mut cur: Vec<((usize, u32), T)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec<T: Clone>(
        k: usize,
        cells: &[(usize, u32)],
        shape: &SkewShape,
        opts: &dyn Fn(usize, u32, u8, u8) -> Vec<(u8, T)>,
        stored: &mut HashMap<(usize, u32), u8>,
        cur: &mut Vec<((usize, u32), T)>,
        out: &mut Vec<Vec<((usize, u32), T)>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if k == cells.len() {
            out.push(cur.clone());
            return;
        }
        let (r, c) = cells[k];
        let left = if shape.contains_cell(r, c.wrapping_sub(1)) {
            stored[&(r, c - 1)]
        } else {
            0
        };
        let above = if r > 1 && shape.contains_cell(r - 1, c) {
            stored[&(r - 1, c)]
        } else {
            0
        };
        for (m, t) in opts(r, c, left, above) {
            stored.insert((r, c), m);
            cur.push(((r, c), t));
            rec(k + 1, cells, shape, opts, stored, cur, out, limit);
            cur.pop();
        }
        stored.remove(&(r, c));
    }
    rec(0, &cells, shape, opts, &mut stored, &mut cur, &mut out, limit);
    out
}

/// Reverse plane partitions with entries ≤ n, classical form.
pub fn list_rpp(shape: &SkewShape, n: usize) -> Vec<BTreeMap<(usize, u32), u8>> {
    enumerate(
        shape,
        &|_r, _c, left, above| {
            let lo = left.max(above).max(1);
            (lo..=n as u8).map(|v| (v, v)).collect()
        },
        usize::MAX,
    )
    .into_iter()
    .map(|f| f.into_iter().collect())
    .collect()
}

/// Semistandard tableaux with entries ≤ n.
pub fn list_ssyt(shape: &SkewShape, n: usize) -> Vec<BTreeMap<(usize, u32), u8>> {
    enumerate(
        shape,
        &|_r, _c, left, above| {
            let lo = left.max(above + 1).max(1);
            (lo..=n as u8).map(|v| (v, v)).collect()
        },
        usize::MAX,
    )
    .into_iter()
    .map(|f| f.into_iter().collect())
    .collect()
}

/// Set-valued tableaux with entries ≤ n; each cell holds a nonempty set.
pub fn list_set_valued(shape: &SkewShape, n: usize) -> Vec<BTreeMap<(usize, u32), Vec<u8>>> {
    enumerate(
        shape,
        &|_r, _c, left, above| {
            let lo = left.max(above + 1).max(1);
            let mut out = Vec::new();
            for v in lo..=n as u8 {
                let rest: Vec<u8> = (v + 1..=n as u8).collect();
                for mask in 0u32..(1 << rest.len()) {
                    let mut set = vec![v];
                    for (k, &u) in rest.iter().enumerate() {
                        if mask & (1 << k) != 0 {
                            set.push(u);
                        }
                    }
                    out.push((*set.last().unwrap(), set));
                }
            }
            out
        },
        usize::MAX,
    )
    .into_iter()
    .map(|f| f.into_iter().collect())
    .collect()
}
