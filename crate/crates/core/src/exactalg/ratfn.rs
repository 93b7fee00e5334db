use super::{LaurentPoly, Monomial, Q, Ring, Scalar, VarId};
use crate::error::{Error, Result};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Numerator over a product of normalized factors. Factors are never
/// multiplied out and no gcds are taken; equality cross-multiplies.
#[derive(Clone, Default)]
pub struct RationalFn {
    num: LaurentPoly,
    den: BTreeMap<LaurentPoly, u32>,
}

/// Divides `f` by its smallest term so the normal form is unique up to
/// scalar-monomial multiples. Returns (normalized factor, the term removed).
fn normalize_factor(f: &LaurentPoly) -> (LaurentPoly, Q, Monomial) {
    let (m, c) = f.min_term().expect("zero factor");
    let (m, c) = (m.clone(), c.clone());
    let inv = Q::one() / &c;
    (f.mul_term(&inv, &m.inv()), c, m)
}

impl RationalFn {
    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFn {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn var(v: VarId) -> Self {
        RationalFn::from_poly(LaurentPoly::var(v))
    }

    pub fn constant(c: Q) -> Self {
        RationalFn::from_poly(LaurentPoly::constant(c))
    }

    pub fn int(c: i64) -> Self {
        RationalFn::from_poly(LaurentPoly::int(c))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> impl Iterator<Item = (&LaurentPoly, u32)> {
        self.den.iter().map(|(f, &k)| (f, k))
    }

    /// The polynomial, when the denominator is trivial.
    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        if self.den.is_empty() || self.num.is_zero() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Divides by `f^k`, keeping the factor unexpanded.
    pub fn div_factor(mut self, f: &LaurentPoly, k: u32) -> Self {
        assert!(!f.is_zero(), "division by zero polynomial");
        if k == 0 || self.num.is_zero() {
            return self;
        }
        let (g, c, m) = normalize_factor(f);
        let s = Q::one() / Ring::pow(&c, k);
        self.num = self.num.mul_term(&s, &m.inv().pow_mono(k));
        if g != LaurentPoly::int(1) {
            *self.den.entry(g).or_insert(0) += k;
        }
        self
    }

    pub fn eval_with<S: Scalar>(&self, val: &dyn Fn(VarId) -> Option<S>) -> Result<S> {
        let mut d = S::one();
        for (f, k) in &self.den {
            let v = f.eval_with(val)?;
            if v.is_zero() {
                return Err(Error::Pole(f.to_string()));
            }
            d = d * v.pow(*k);
        }
        Ok(self.num.eval_with(val)? / d)
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v = self.num.vars();
        for f in self.den.keys() {
            v.extend(f.vars());
        }
        v.sort();
        v.dedup();
        v
    }

    fn den_product(fs: &BTreeMap<LaurentPoly, u32>) -> LaurentPoly {
        let mut p = LaurentPoly::int(1);
        for (f, k) in fs {
            p = &p * &f.pow_u(*k);
        }
        p
    }
}

trait MonoPow {
    fn pow_mono(&self, k: u32) -> Monomial;
}

impl MonoPow for Monomial {
    fn pow_mono(&self, k: u32) -> Monomial {
        let mut out = Monomial::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        // cancel shared factors before cross-multiplying
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        for (f, &k) in &other.den {
            let j = self.den.get(f).copied().unwrap_or(0);
            if k > j {
                left.insert(f.clone(), k - j);
            }
        }
        for (f, &k) in &self.den {
            let j = other.den.get(f).copied().unwrap_or(0);
            if k > j {
                right.insert(f.clone(), k - j);
            }
        }
        let l = &self.num * &RationalFn::den_product(&left);
        let r = &other.num * &RationalFn::den_product(&right);
        l == r
    }
}

impl Ring for RationalFn {
    fn zero() -> Self {
        RationalFn::default()
    }
    fn one() -> Self {
        RationalFn::int(1)
    }
    fn from_q(q: &Q) -> Self {
        RationalFn::constant(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl Scalar for RationalFn {}

impl Add for RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: RationalFn) -> RationalFn {
        if self.num.is_zero() {
            return rhs;
        }
        if rhs.num.is_zero() {
            return self;
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if num.is_zero() {
                return RationalFn::zero();
            }
            return RationalFn { num, den: self.den };
        }
        // common denominator: factorwise maximum multiplicity
        let mut den = self.den.clone();
        for (f, &k) in &rhs.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(k);
        }
        let lift = |r: &RationalFn| {
            let mut missing = BTreeMap::new();
            for (f, &k) in &den {
                let have = r.den.get(f).copied().unwrap_or(0);
                if k > have {
                    missing.insert(f.clone(), k - have);
                }
            }
            &r.num * &RationalFn::den_product(&missing)
        };
        let num = &lift(&self) + &lift(&rhs);
        if num.is_zero() {
            return RationalFn::zero();
        }
        RationalFn { num, den }
    }
}

impl Sub for RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: RationalFn) -> RationalFn {
        self + (-rhs)
    }
}

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: RationalFn) -> RationalFn {
        let num = &self.num * &rhs.num;
        if num.is_zero() {
            return RationalFn::zero();
        }
        let mut den = self.den;
        for (f, k) in rhs.den {
            *den.entry(f).or_insert(0) += k;
        }
        RationalFn { num, den }
    }
}

impl Div for RationalFn {
    type Output = RationalFn;
    fn div(self, rhs: RationalFn) -> RationalFn {
        assert!(!rhs.num.is_zero(), "division by zero rational function");
        if self.num.is_zero() {
            return self;
        }
        let mut out = self;
        // rhs denominator moves up; cancel against our own factors first
        for (f, k) in rhs.den {
            let have = out.den.get(&f).copied().unwrap_or(0);
            let c = have.min(k);
            if c > 0 {
                if have == c {
                    out.den.remove(&f);
                } else {
                    out.den.insert(f.clone(), have - c);
                }
            }
            if k > c {
                out.num = &out.num * &f.pow_u(k - c);
            }
        }
        let (g, c, m) = normalize_factor(&rhs.num);
        out.num = out.num.mul_term(&(Q::one() / c), &m.inv());
        if g != LaurentPoly::int(1) {
            if out.num == g {
                out.num = LaurentPoly::int(1);
            } else {
                *out.den.entry(g).or_insert(0) += 1;
            }
        }
        out
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        for (k, (g, e)) in self.den.iter().enumerate() {
            if k > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "({})", g)?;
            } else {
                write!(f, "({})^{}", g, e)?;
            }
        }
        write!(f, ")")
    }
}

impl Serialize for RationalFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let den: Vec<(&LaurentPoly, u32)> = self.den.iter().map(|(f, &k)| (f, k)).collect();
        let mut st = s.serialize_struct("RationalFn", 2)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &den)?;
        st.end()
    }
}

impl From<LaurentPoly> for RationalFn {
    fn from(p: LaurentPoly) -> Self {
        RationalFn::from_poly(p)
    }
}
