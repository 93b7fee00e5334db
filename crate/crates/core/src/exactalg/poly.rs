use super::{q_to_string, Q, Ring, VarId};
use crate::error::{Error, Result};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Sparse exponent vector, sorted by variable, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, i32)>) -> Self {
        let mut m = Monomial::one();
        for (v, e) in pairs {
            m = m.mul(&Monomial::var(v, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exps(&self) -> &[(VarId, i32)] {
        &self.0
    }

    pub fn exp(&self, v: VarId) -> i32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let e = a[i]
                    .1
                    .checked_add(b[j].1)
                    .expect("exponent overflow in monomial product");
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    /// Total degree in the variables selected by `pred`.
    pub fn degree_in(&self, pred: impl Fn(VarId) -> bool) -> i64 {
        self.0.iter().filter(|(v, _)| pred(*v)).map(|&(_, e)| e as i64).sum()
    }

    /// Splits into (part in selected variables, rest).
    pub fn split(&self, pred: impl Fn(VarId) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| pred(*v));
        (Monomial(a), Monomial(b))
    }

    pub fn substitute_var(&self, from: VarId, to: VarId) -> Monomial {
        Monomial::from_pairs(
            self.0
                .iter()
                .map(|&(v, e)| (if v == from { to } else { v }, e)),
        )
    }

    pub fn swap_vars(&self, a: VarId, b: VarId) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| {
            let w = if v == a {
                b
            } else if v == b {
                a
            } else {
                v
            };
            (w, e)
        }))
    }
}

// Dense lexicographic order on exponent vectors; compatible with products.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(&eb),
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Sparse Laurent polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        LaurentPoly::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        LaurentPoly::constant(super::qi(c))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn var(v: VarId) -> Self {
        LaurentPoly::term(Q::one(), Monomial::var(v, 1))
    }

    pub fn var_pow(v: VarId, e: i32) -> Self {
        LaurentPoly::term(Q::one(), Monomial::var(v, e))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn min_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next()
    }

    /// Some((c, m)) when the polynomial is a single term.
    pub fn as_term(&self) -> Option<(Q, Monomial)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), m.clone()))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        match self.as_term() {
            Some((c, m)) if m.is_one() => Some(c),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &Q, mono: &Monomial) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self
            .terms
            .keys()
            .flat_map(|m| m.exps().iter().map(|(v, _)| *v))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Keeps terms whose degree in the selected variables is at most `d`.
    pub fn truncate(&self, pred: impl Fn(VarId) -> bool + Copy, d: i64) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(pred) <= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Monomial) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(f(m), c.clone());
        }
        out
    }

    pub fn swap_vars(&self, a: VarId, b: VarId) -> LaurentPoly {
        self.map_monomials(|m| m.swap_vars(a, b))
    }

    /// Replaces each variable by a polynomial (Laurent powers need invertible images).
    pub fn substitute(&self, f: &dyn Fn(VarId) -> Option<LaurentPoly>) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = LaurentPoly::constant(c.clone());
            for &(v, e) in m.exps() {
                let img = match f(v) {
                    Some(p) => p,
                    None => LaurentPoly::var(v),
                };
                let base = if e < 0 {
                    match img.as_term() {
                        Some((c, m)) => LaurentPoly::term(Q::one() / c, m.inv()),
                        None => {
                            return Err(Error::Constraint(format!(
                                "negative power of non-monomial image for {}",
                                v
                            )))
                        }
                    }
                } else {
                    img
                };
                acc = &acc * &base.pow_u(e.unsigned_abs());
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    pub fn pow_u(&self, e: u32) -> LaurentPoly {
        Ring::pow(self, e)
    }

    /// Evaluates with every variable looked up in `val`.
    pub fn eval_with<S: super::Scalar>(&self, val: &dyn Fn(VarId) -> Option<S>) -> Result<S> {
        let mut cache: HashMap<VarId, S> = HashMap::new();
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_q(c);
            for &(v, e) in m.exps() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = val(v).ok_or_else(|| Error::Unbound(v.to_string()))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                if e < 0 && x.is_zero() {
                    return Err(Error::Pole(format!("{} = 0 under a negative power", v)));
                }
                t = t * x.powi(e);
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Collects coefficients by the monomial in the selected variables.
    pub fn collect_by(&self, pred: impl Fn(VarId) -> bool + Copy) -> BTreeMap<Monomial, LaurentPoly> {
        let mut out: BTreeMap<Monomial, LaurentPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest) = m.split(pred);
            out.entry(sel).or_default().add_term(rest, c.clone());
        }
        out
    }
}

impl Ring for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::int(1)
    }
    fn from_q(q: &Q) -> Self {
        LaurentPoly::constant(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Q::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{}", q_to_string(&a))?;
            } else if a == <Q as Ring>::one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", q_to_string(&a), m)?;
            }
        }
        Ok(())
    }
}

struct TermRef<'a>(&'a Monomial, &'a Q);

impl Serialize for TermRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mono: Vec<(String, i32)> =
            self.0.exps().iter().map(|(v, e)| (v.to_string(), *e)).collect();
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("coef", &q_to_string(self.1))?;
        st.serialize_field("mono", &mono)?;
        st.end()
    }
}

/// Canonical JSON: a term list ordered by exponent vector.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&TermRef(m, c))?;
        }
        seq.end()
    }
}
