use super::{q_to_f64, Family, LaurentPoly, Q, RationalFn, Ring, Scalar, VarId};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Assignment of variables to exact rationals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamBinding {
    values: BTreeMap<VarId, Q>,
}

impl ParamBinding {
    pub fn new() -> Self {
        ParamBinding::default()
    }

    pub fn set(&mut self, v: VarId, value: Q) -> &mut Self {
        self.values.insert(v, value);
        self
    }

    pub fn with(mut self, v: VarId, value: Q) -> Self {
        self.values.insert(v, value);
        self
    }

    pub fn get(&self, v: VarId) -> Option<&Q> {
        self.values.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Q)> {
        self.values.iter()
    }

    pub fn eval(&self, f: &RationalFn) -> Result<Q> {
        f.eval_with(&|v| self.values.get(&v).cloned())
    }

    pub fn eval_poly(&self, f: &LaurentPoly) -> Result<Q> {
        f.eval_with(&|v| self.values.get(&v).cloned())
    }

    /// Float evaluation; not authoritative, exact mode is.
    pub fn eval_f64(&self, f: &RationalFn) -> Result<f64> {
        f.eval_with(&|v| self.values.get(&v).map(q_to_f64))
    }

    /// Binding that makes `Params::symbolic` evaluate to `p`.
    pub fn from_params(p: &Params<Q>) -> Self {
        let mut b = ParamBinding::new();
        for (i, v) in p.x.iter().enumerate() {
            b.set(VarId::x(i as u32 + 1), v.clone());
        }
        for (i, v) in p.rate.iter().enumerate() {
            b.set(VarId::p(i as u32 + 1), v.clone());
        }
        for (i, v) in p.alpha.iter().enumerate() {
            b.set(VarId::a(i as u32), v.clone());
        }
        for (i, v) in p.beta.iter().enumerate() {
            b.set(VarId::b(i as u32), v.clone());
        }
        b
    }
}

/// Parameter families in a coefficient type S. Out-of-range reads are zero,
/// which is also how α_0 = β_0 = 0 enters.
#[derive(Clone, Debug, PartialEq)]
pub struct Params<S> {
    /// x_1.. stored from index 0
    pub x: Vec<S>,
    /// π_j (or ρ_j), j = 1.. stored from index 0
    pub rate: Vec<S>,
    /// α_k, k = 0.. stored at index k
    pub alpha: Vec<S>,
    /// β_j, j = 0.. stored at index j
    pub beta: Vec<S>,
}

impl<S: Ring> Params<S> {
    pub fn new(x: Vec<S>, rate: Vec<S>) -> Self {
        Params {
            x,
            rate,
            alpha: Vec::new(),
            beta: Vec::new(),
        }
    }

    pub fn with_alpha(mut self, alpha: Vec<S>) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: Vec<S>) -> Self {
        self.beta = beta;
        self
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self, i: usize) -> S {
        get1(&self.x, i)
    }

    pub fn rate(&self, j: usize) -> S {
        get1(&self.rate, j)
    }

    pub fn alpha(&self, k: usize) -> S {
        self.alpha.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn beta(&self, j: usize) -> S {
        self.beta.get(j).cloned().unwrap_or_else(S::zero)
    }

    /// Keeps only the first `n` time variables.
    pub fn truncate_time(&self, n: usize) -> Self {
        let mut p = self.clone();
        p.x.truncate(n);
        p
    }

    /// Single time slice x_i as its own parameter set.
    pub fn time_slice(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.x = vec![self.x(i)];
        p
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Params<T> {
        Params {
            x: self.x.iter().map(&f).collect(),
            rate: self.rate.iter().map(&f).collect(),
            alpha: self.alpha.iter().map(&f).collect(),
            beta: self.beta.iter().map(&f).collect(),
        }
    }

    pub fn try_map<T: Ring>(&self, f: impl Fn(&S) -> Result<T>) -> Result<Params<T>> {
        let m = |v: &Vec<S>| v.iter().map(&f).collect::<Result<Vec<T>>>();
        Ok(Params {
            x: m(&self.x)?,
            rate: m(&self.rate)?,
            alpha: m(&self.alpha)?,
            beta: m(&self.beta)?,
        })
    }
}

fn get1<S: Ring>(v: &[S], i: usize) -> S {
    if i == 0 {
        return S::zero();
    }
    v.get(i - 1).cloned().unwrap_or_else(S::zero)
}

impl Params<RationalFn> {
    /// Fresh variables x_1..x_n, π_1..π_r, α_1..α_na (α_0 = 0), β_1..β_nb (β_0 = 0).
    pub fn symbolic(n: usize, r: usize, na: usize, nb: usize) -> Self {
        let var = |f: Family, i: usize| RationalFn::var(VarId::new(f, i as u32));
        let mut alpha = vec![RationalFn::zero()];
        alpha.extend((1..=na).map(|k| var(Family::A, k)));
        let mut beta = vec![RationalFn::zero()];
        beta.extend((1..=nb).map(|k| var(Family::B, k)));
        Params {
            x: (1..=n).map(|i| var(Family::X, i)).collect(),
            rate: (1..=r).map(|j| var(Family::P, j)).collect(),
            alpha: if na == 0 { Vec::new() } else { alpha },
            beta: if nb == 0 { Vec::new() } else { beta },
        }
    }

    /// Makes α_0 a free variable instead of 0.
    pub fn with_free_alpha0(mut self) -> Self {
        if self.alpha.is_empty() {
            self.alpha.push(RationalFn::zero());
        }
        self.alpha[0] = RationalFn::var(VarId::a(0));
        self
    }

    pub fn eval(&self, b: &ParamBinding) -> Result<Params<Q>> {
        self.try_map(|f| b.eval(f))
    }
}

impl Params<Q> {
    pub fn to_f64(&self) -> Params<f64> {
        self.map(q_to_f64)
    }
}

/// Checks π_j x_i ∈ (0,1) for j ≤ ell.
pub fn check_geometric<S: Scalar + PartialOrd>(p: &Params<S>, ell: usize) -> Result<()> {
    for i in 1..=p.n() {
        for j in 1..=ell {
            let v = p.rate(j) * p.x(i);
            if !(v > S::zero() && v < S::one()) {
                return Err(Error::Constraint(format!(
                    "pi_{} x_{} must lie in (0,1), got {:?}",
                    j, i, v
                )));
            }
        }
    }
    Ok(())
}

/// Checks ρ_j x_i > 0 for j ≤ ell.
pub fn check_bernoulli<S: Scalar + PartialOrd>(p: &Params<S>, ell: usize) -> Result<()> {
    for i in 1..=p.n() {
        for j in 1..=ell {
            let v = p.rate(j) * p.x(i);
            if !(v > S::zero()) {
                return Err(Error::Constraint(format!(
                    "rho_{} x_{} must be positive, got {:?}",
                    j, i, v
                )));
            }
        }
    }
    Ok(())
}
