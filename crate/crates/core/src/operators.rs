//! Noncommutative blocking (`U_i`) and pushing (`u_j`) operators on formal
//! combinations of partitions.

use crate::error::{Error, Result};
use crate::exactalg::{ParamBinding, RationalFn, Ring, Scalar, VarId, Q};
use crate::partitions::{partitions_in_box, Partition};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Finite linear combination of partitions. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct PartitionVector<S = RationalFn> {
    terms: BTreeMap<Partition, S>,
}

impl<S: Ring> Default for PartitionVector<S> {
    fn default() -> Self {
        PartitionVector {
            terms: BTreeMap::new(),
        }
    }
}

impl<S: Ring> PartitionVector<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(p: Partition) -> Self {
        let mut v = Self::zero();
        v.add_term(p, S::one());
        v
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Partition, S)>) -> Self {
        let mut v = Self::zero();
        for (p, c) in it {
            v.add_term(p, c);
        }
        v
    }

    pub fn add_term(&mut self, p: Partition, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&p) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(p, s);
                }
            }
            None => {
                self.terms.insert(p, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        if c.is_zero() {
            return;
        }
        for (p, v) in &other.terms {
            self.add_term(p.clone(), c.clone() * v.clone());
        }
    }

    pub fn terms(&self) -> &BTreeMap<Partition, S> {
        &self.terms
    }

    pub fn coeff(&self, p: &Partition) -> S {
        self.terms.get(p).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    /// Drops partitions with more than `cap` boxes.
    pub fn truncate(&self, cap: u32) -> Self {
        PartitionVector {
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| p.size() <= cap)
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_size(&self) -> Option<u32> {
        self.terms.keys().map(|p| p.size()).max()
    }

    pub fn min_size(&self) -> Option<u32> {
        self.terms.keys().map(|p| p.size()).min()
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> PartitionVector<T> {
        PartitionVector::from_terms(self.terms.iter().map(|(p, c)| (p.clone(), f(c))))
    }
}

impl PartitionVector<RationalFn> {
    pub fn eval(&self, b: &ParamBinding) -> Result<PartitionVector<Q>> {
        let mut out = PartitionVector::zero();
        for (p, c) in &self.terms {
            out.add_term(p.clone(), b.eval(c)?);
        }
        Ok(out)
    }
}

impl<S: Ring> std::ops::Add for PartitionVector<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (p, c) in rhs.terms {
            self.add_term(p, c);
        }
        self
    }
}

impl<S: Ring> std::ops::Sub for PartitionVector<S> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (p, c) in rhs.terms {
            self.add_term(p, -c);
        }
        self
    }
}

impl<S: Ring + fmt::Display> fmt::Display for PartitionVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (p, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{:?}", c, p.parts())?;
        }
        Ok(())
    }
}

impl<S: Ring + fmt::Display> fmt::Debug for PartitionVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as `[{"partition": [..], "coef": "..."}]`, largest partition first.
impl<S: Ring + fmt::Display> Serialize for PartitionVector<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            partition: &'a Partition,
            coef: String,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (p, c) in self.terms.iter().rev() {
            seq.serialize_element(&Term {
                partition: p,
                coef: c.to_string(),
            })?;
        }
        seq.end()
    }
}

type Seq<S> = Arc<dyn Fn(usize) -> S + Send + Sync>;

/// The two parameter sequences α_k, β_j. α_0 is always 0.
#[derive(Clone)]
pub struct OpParams<S> {
    alpha: Seq<S>,
    beta: Seq<S>,
    /// true when every α_k (k ≥ 1) is known to vanish
    alpha_zero: bool,
}

impl<S: Ring + 'static> OpParams<S> {
    pub fn from_fns(
        alpha: impl Fn(usize) -> S + Send + Sync + 'static,
        beta: impl Fn(usize) -> S + Send + Sync + 'static,
    ) -> Self {
        OpParams {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            alpha_zero: false,
        }
    }

    /// `alpha[k]` is α_k and `beta[j]` is β_j; entries past the end are zero.
    pub fn bound(alpha: Vec<S>, beta: Vec<S>) -> Self {
        let zero = alpha.iter().skip(1).all(|a| a.is_zero());
        let get = |v: Vec<S>| move |k: usize| v.get(k).cloned().unwrap_or_else(S::zero);
        OpParams {
            alpha: Arc::new(get(alpha)),
            beta: Arc::new(get(beta)),
            alpha_zero: zero,
        }
    }

    /// Same β, all α set to zero.
    pub fn without_alpha(&self) -> Self {
        OpParams {
            alpha: Arc::new(|_| S::zero()),
            beta: self.beta.clone(),
            alpha_zero: true,
        }
    }

    pub fn alpha(&self, k: usize) -> S {
        if k == 0 || self.alpha_zero {
            S::zero()
        } else {
            (self.alpha)(k)
        }
    }

    pub fn beta(&self, j: usize) -> S {
        (self.beta)(j)
    }
}

impl OpParams<RationalFn> {
    /// Free variables α_k = a_k and β_j = b_j.
    pub fn symbolic() -> Self {
        OpParams::from_fns(
            |k| RationalFn::var(VarId::a(k as u32)),
            |j| RationalFn::var(VarId::b(j as u32)),
        )
    }

    /// α = 0 and β_j = b_j.
    pub fn symbolic_beta() -> Self {
        OpParams::symbolic().without_alpha()
    }

    /// Pushing specialization α = 0, β_j = 1/π_j.
    pub fn pushing_rates() -> Self {
        OpParams::from_fns(
            |_| RationalFn::zero(),
            |j| RationalFn::var(VarId::p(j as u32)).inv(),
        )
        .without_alpha()
    }

    /// Blocking specialization α = 0, β_j = ρ_{j+1}.
    pub fn blocking_rates() -> Self {
        OpParams::from_fns(
            |_| RationalFn::zero(),
            |j| RationalFn::var(VarId::p(j as u32 + 1)),
        )
        .without_alpha()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OpKind {
    /// blocking U_i
    Blocking,
    /// pushing u_j
    Pushing,
}

impl OpKind {
    fn letter(self) -> char {
        match self {
            OpKind::Blocking => 'U',
            OpKind::Pushing => 'u',
        }
    }
}

/// A product of operators, written left to right and applied right to left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorWord(pub Vec<(OpKind, usize)>);

impl OperatorWord {
    pub fn new(kind: OpKind, rows: &[usize]) -> Self {
        OperatorWord(rows.iter().map(|&r| (kind, r)).collect())
    }

    pub fn has_pushing(&self) -> bool {
        self.0.iter().any(|(k, _)| *k == OpKind::Pushing)
    }
}

impl FromStr for OperatorWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*' || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let mut chars = tok.chars();
            let kind = match chars.next() {
                Some('U') => OpKind::Blocking,
                Some('u') => OpKind::Pushing,
                _ => return Err(Error::Usage(format!("bad operator {:?}", tok))),
            };
            let rest = chars.as_str().trim_start_matches('_');
            let row: usize = rest
                .parse()
                .map_err(|_| Error::Usage(format!("bad operator {:?}", tok)))?;
            if row == 0 {
                return Err(Error::Usage("operator rows start at 1".into()));
            }
            out.push((kind, row));
        }
        Ok(OperatorWord(out))
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .0
            .iter()
            .map(|(k, r)| format!("{}{}", k.letter(), r))
            .collect();
        write!(f, "{}", s.join(" "))
    }
}

/// Applies operators with a per-evaluation memo on (operator, partition).
/// `cap` bounds the size of retained partitions; it matters only for u.
pub struct Engine<S> {
    params: OpParams<S>,
    cap: Option<u32>,
    memo_u: HashMap<(usize, Partition), PartitionVector<S>>,
    memo_big: HashMap<(usize, Partition), PartitionVector<S>>,
}

impl<S: Ring + 'static> Engine<S> {
    pub fn new(params: OpParams<S>, cap: Option<u32>) -> Self {
        Engine {
            params,
            cap,
            memo_u: HashMap::new(),
            memo_big: HashMap::new(),
        }
    }

    pub fn params(&self) -> &OpParams<S> {
        &self.params
    }

    fn fits(&self, size: u32) -> bool {
        self.cap.is_none_or(|c| size <= c)
    }

    /// U_i on a basis partition.
    pub fn big_u_basis(&mut self, i: usize, lam: &Partition) -> PartitionVector<S> {
        assert!(i >= 1, "rows are 1-based");
        let key = (i, lam.clone());
        if let Some(v) = self.memo_big.get(&key) {
            return v.clone();
        }
        let mut out = PartitionVector::zero();
        let li = lam.part(i);
        let free = i == 1 || li < lam.part(i - 1);
        if free {
            if let Some(up) = lam.add_box(i) {
                if self.fits(up.size()) {
                    out.add_term(up, S::one());
                }
            }
            out.add_term(lam.clone(), -self.params.alpha(li as usize));
        } else {
            out.add_term(lam.clone(), self.params.beta(i - 1));
        }
        self.memo_big.insert(key, out.clone());
        out
    }

    /// u_j on a basis partition, truncated at the cap.
    pub fn small_u_basis(&mut self, j: usize, mu: &Partition) -> PartitionVector<S> {
        assert!(j >= 1, "rows are 1-based");
        let key = (j, mu.clone());
        if let Some(v) = self.memo_u.get(&key) {
            return v.clone();
        }
        let (nu, pushed) = mu.push_closure(j);
        let mut out = PartitionVector::zero();
        if !self.fits(nu.size()) {
            self.memo_u.insert(key, out.clone());
            return out;
        }
        let k = pushed.first().copied().unwrap_or(j);
        let p = &self.params;
        let beta_run = |from: usize, to: usize| {
            (from..to).fold(S::one(), |acc, a| acc * p.beta(a))
        };
        out.add_term(nu.clone(), beta_run(k, j));
        let a = p.alpha(mu.part(j) as usize + 1);
        if !a.is_zero() && self.fits(nu.size() + 1) {
            let mut pre = S::one();
            let mut coeffs = Vec::new();
            for i in k..=j {
                coeffs.push((i, a.clone() * pre.clone() * beta_run(i, j)));
                pre = pre * (a.clone() + p.beta(i));
            }
            for (i, c) in coeffs {
                let sub = self.small_u_basis(i, &nu);
                out.add_scaled(&sub, &c);
            }
        }
        self.memo_u.insert(key, out.clone());
        out
    }

    pub fn apply_op(&mut self, kind: OpKind, row: usize, v: &PartitionVector<S>) -> PartitionVector<S> {
        let mut out = PartitionVector::zero();
        for (p, c) in v.terms() {
            let img = match kind {
                OpKind::Blocking => self.big_u_basis(row, p),
                OpKind::Pushing => self.small_u_basis(row, p),
            };
            out.add_scaled(&img, c);
        }
        out
    }

    /// Rightmost letter first.
    pub fn apply_word(&mut self, w: &OperatorWord, v: &PartitionVector<S>) -> PartitionVector<S> {
        let mut cur = v.clone();
        for &(k, r) in w.0.iter().rev() {
            if cur.is_empty() {
                break;
            }
            cur = self.apply_op(k, r, &cur);
        }
        cur
    }
}

fn check_cap<S: Ring>(v: &PartitionVector<S>, cap: u32) -> Result<()> {
    if let Some(m) = v.max_size() {
        if cap <= m + 1 {
            return Err(Error::Usage(format!(
                "degree cap {} must exceed |mu|+1 = {}",
                cap,
                m + 1
            )));
        }
    }
    Ok(())
}

#[allow(non_snake_case)]
pub fn apply_U<S: Ring + 'static>(i: usize, v: &PartitionVector<S>, params: &OpParams<S>) -> PartitionVector<S> {
    Engine::new(params.clone(), None).apply_op(OpKind::Blocking, i, v)
}

pub fn apply_u<S: Ring + 'static>(
    j: usize,
    v: &PartitionVector<S>,
    params: &OpParams<S>,
    cap: u32,
) -> Result<PartitionVector<S>> {
    check_cap(v, cap)?;
    Ok(Engine::new(params.clone(), Some(cap)).apply_op(OpKind::Pushing, j, v))
}

/// Applies a word; `cap` is required when the word contains a pushing operator.
pub fn apply_word<S: Ring + 'static>(
    w: &OperatorWord,
    v: &PartitionVector<S>,
    params: &OpParams<S>,
    cap: Option<u32>,
) -> Result<PartitionVector<S>> {
    if w.has_pushing() {
        let c = cap.ok_or_else(|| Error::Usage("words with u operators need a degree cap".into()))?;
        check_cap(v, c)?;
    }
    let mut e = Engine::new(params.clone(), cap);
    Ok(e.apply_word(w, v))
}

/// Strictly increasing index sets of size k in 1..=ell.
fn subsets(ell: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, ell: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=ell {
            cur.push(i);
            go(i + 1, ell, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, ell, k, &mut Vec::new(), &mut out);
    out
}

/// Weakly increasing index multisets of size k in 1..=ell.
fn multisets(ell: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, ell: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=ell {
            cur.push(i);
            go(i, ell, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, ell, k, &mut Vec::new(), &mut out);
    out
}

/// Words of e_k over the first `ell` operators: τ_{j_k} ⋯ τ_{j_1}, j_1 < ⋯ < j_k,
/// so the smallest index acts first.
pub fn e_words(kind: OpKind, ell: usize, k: usize) -> Vec<OperatorWord> {
    subsets(ell, k)
        .into_iter()
        .map(|mut s| {
            s.reverse();
            OperatorWord::new(kind, &s)
        })
        .collect()
}

/// Words of h_k: τ_{j_1} ⋯ τ_{j_k} with j_1 ≤ ⋯ ≤ j_k, so the largest index acts first.
pub fn h_words(kind: OpKind, ell: usize, k: usize) -> Vec<OperatorWord> {
    multisets(ell, k)
        .into_iter()
        .map(|s| OperatorWord::new(kind, &s))
        .collect()
}

fn sum_words<S: Ring + 'static>(
    words: &[OperatorWord],
    v: &PartitionVector<S>,
    params: &OpParams<S>,
    cap: Option<u32>,
) -> Result<PartitionVector<S>> {
    if words.iter().any(|w| w.has_pushing()) {
        let c = cap.ok_or_else(|| Error::Usage("u operators need a degree cap".into()))?;
        check_cap(v, c)?;
    }
    let mut e = Engine::new(params.clone(), cap);
    let mut out = PartitionVector::zero();
    for w in words {
        out = out + e.apply_word(w, v);
    }
    Ok(out)
}

/// e_k(τ_1, …, τ_ell) · v.
pub fn noncomm_e<S: Ring + 'static>(
    k: usize,
    kind: OpKind,
    ell: usize,
    v: &PartitionVector<S>,
    params: &OpParams<S>,
    cap: Option<u32>,
) -> Result<PartitionVector<S>> {
    if k == 0 {
        return Ok(v.clone());
    }
    sum_words(&e_words(kind, ell, k), v, params, cap)
}

/// h_k(τ_1, …, τ_ell) · v.
pub fn noncomm_h<S: Ring + 'static>(
    k: usize,
    kind: OpKind,
    ell: usize,
    v: &PartitionVector<S>,
    params: &OpParams<S>,
    cap: Option<u32>,
) -> Result<PartitionVector<S>> {
    if k == 0 {
        return Ok(v.clone());
    }
    sum_words(&h_words(kind, ell, k), v, params, cap)
}

/// s_λ(τ_1, …, τ_ell) · v through the Jacobi–Trudi expansion in the h_k.
/// Only meaningful when the h_k commute, e.g. under the weak Knuth relations.
pub fn noncomm_schur<S: Ring + 'static>(
    lam: &Partition,
    kind: OpKind,
    ell: usize,
    v: &PartitionVector<S>,
    params: &OpParams<S>,
    cap: Option<u32>,
) -> Result<PartitionVector<S>> {
    if kind == OpKind::Pushing {
        let c = cap.ok_or_else(|| Error::Usage("u operators need a degree cap".into()))?;
        check_cap(v, c)?;
    }
    let n = lam.len();
    let mut e = Engine::new(params.clone(), cap);
    let mut out = PartitionVector::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        // h_{λ_1 - 1 + σ(1)} ⋯ h_{λ_n - n + σ(n)}, rightmost acting first
        let degs: Option<Vec<usize>> = (0..n)
            .map(|r| {
                let d = lam.part(r + 1) as i64 - r as i64 + perm[r] as i64;
                (d >= 0).then_some(d as usize)
            })
            .collect();
        if let Some(degs) = degs {
            let mut cur = v.clone();
            for &d in degs.iter().rev() {
                let mut next = PartitionVector::zero();
                for w in h_words(kind, ell, d) {
                    next = next + e.apply_word(&w, &cur);
                }
                if d == 0 {
                    next = cur;
                }
                cur = next;
            }
            let sign = if inversions(&perm) % 2 == 0 { S::one() } else { -S::one() };
            out.add_scaled(&cur, &sign);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn inversions(p: &[usize]) -> usize {
    let mut c = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                c += 1;
            }
        }
    }
    c
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One violated relation instance on one basis partition.
#[derive(Clone, Debug, Serialize)]
pub struct KnuthFailure {
    pub relation: String,
    pub start: Partition,
    pub lhs: String,
    pub rhs: String,
    /// lhs − rhs, rendered
    pub difference: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KnuthReport {
    pub kind: OpKind,
    pub strong: bool,
    pub max_index: usize,
    pub starts: usize,
    pub instances: usize,
    pub failures: Vec<KnuthFailure>,
}

impl KnuthReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A relation as two sums of words that should act identically.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub lhs: Vec<OperatorWord>,
    pub rhs: Vec<OperatorWord>,
}

/// Relation instances with indices in 1..=n. With `strong` the i − k ≥ 2
/// restriction is dropped.
pub fn knuth_relations(kind: OpKind, n: usize, strong: bool) -> Vec<Relation> {
    let w = |r: &[usize]| OperatorWord::new(kind, r);
    let far = |i: usize, k: usize| strong || i >= k + 2;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                if i >= j && j > k && far(i, k) {
                    out.push(Relation {
                        name: format!("right(i={},j={},k={})", i, j, k),
                        lhs: vec![w(&[j, i, k])],
                        rhs: vec![w(&[j, k, i])],
                    });
                }
                if i > j && j >= k && far(i, k) {
                    out.push(Relation {
                        name: format!("left(i={},j={},k={})", i, j, k),
                        lhs: vec![w(&[i, k, j])],
                        rhs: vec![w(&[k, i, j])],
                    });
                }
            }
        }
    }
    for i in 1..n {
        out.push(Relation {
            name: format!("weak(i={})", i),
            lhs: vec![w(&[i, i + 1, i]), w(&[i + 1, i + 1, i])],
            rhs: vec![w(&[i + 1, i, i]), w(&[i + 1, i, i + 1])],
        });
    }
    out
}

/// Non-local commutativity τ_iτ_j = τ_jτ_i for |i − j| ≥ 2.
pub fn commutation_relations(kind: OpKind, n: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 2..=n {
            out.push(Relation {
                name: format!("commute(i={},j={})", i, j),
                lhs: vec![OperatorWord::new(kind, &[i, j])],
                rhs: vec![OperatorWord::new(kind, &[j, i])],
            });
        }
    }
    out
}

/// Checks relations on every partition of the `rows × cols` box. Indices run
/// over 1..=rows+1 so the first empty row is exercised too.
pub fn check_relations<S: Ring + fmt::Display + 'static>(
    relations: &[Relation],
    kind: OpKind,
    strong: bool,
    rows: usize,
    cols: u32,
    params: &OpParams<S>,
    cap: Option<u32>,
) -> Result<KnuthReport> {
    let starts = partitions_in_box(rows, cols);
    let mut failures = Vec::new();
    let mut e = Engine::new(params.clone(), cap);
    let mut count = 0;
    for rel in relations {
        for mu in &starts {
            let v = PartitionVector::basis(mu.clone());
            if kind == OpKind::Pushing {
                let c = cap.ok_or_else(|| Error::Usage("u operators need a degree cap".into()))?;
                if c <= mu.size() + 1 {
                    continue;
                }
            }
            let side = |e: &mut Engine<S>, ws: &[OperatorWord]| {
                ws.iter()
                    .fold(PartitionVector::zero(), |acc, w| acc + e.apply_word(w, &v))
            };
            let l = side(&mut e, &rel.lhs);
            let r = side(&mut e, &rel.rhs);
            count += 1;
            if l != r {
                let d = l - r;
                failures.push(KnuthFailure {
                    relation: rel.name.clone(),
                    start: mu.clone(),
                    lhs: join_words(&rel.lhs),
                    rhs: join_words(&rel.rhs),
                    difference: d.to_string(),
                });
            }
        }
    }
    Ok(KnuthReport {
        kind,
        strong,
        max_index: rows + 1,
        starts: starts.len(),
        instances: count,
        failures,
    })
}

fn join_words(ws: &[OperatorWord]) -> String {
    ws.iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Weak (or, with `strong`, full) Knuth relations over the box.
pub fn check_weak_knuth<S: Ring + fmt::Display + 'static>(
    kind: OpKind,
    rows: usize,
    cols: u32,
    params: &OpParams<S>,
    cap: Option<u32>,
    strong: bool,
) -> Result<KnuthReport> {
    let rels = knuth_relations(kind, rows + 1, strong);
    check_relations(&rels, kind, strong, rows, cols, params, cap)
}
