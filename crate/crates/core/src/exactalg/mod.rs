//! Exact arithmetic: rationals, Laurent polynomials, rational functions with
//! factored denominators, and the symmetric-function helpers built on them.

pub mod binding;
pub mod poly;
pub mod ratfn;
pub mod symfun;
pub mod var;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub use binding::{ParamBinding, Params};
pub use poly::{LaurentPoly, Monomial};
pub use ratfn::RationalFn;
pub use symfun::{
    det, det_f64, e_k, h_k, jacobi_trudi, omega_on_expansion, schur_expand, schur_poly,
    supersym_e, supersym_h, theta_e_super, theta_h, theta_h_super, theta_tail_bound, SchurExpansion,
};
pub use var::{Family, VarId};

pub type Q = BigRational;

/// Commutative ring operations shared by every coefficient type.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn is_zero(&self) -> bool;

    fn from_i64(v: i64) -> Self {
        Self::from_q(&Q::from_integer(BigInt::from(v)))
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// A field (or field of fractions) in which kernels are evaluated.
pub trait Scalar: Ring + Div<Output = Self> {
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    fn powi(&self, e: i32) -> Self {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inv().pow(e.unsigned_abs())
        }
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}
impl Scalar for Q {}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}
impl Scalar for f64 {}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(v: &Q) -> f64 {
    match (v.numer().to_f64(), v.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down to avoid overflow on huge operands
            let shift = v.numer().bits().max(v.denom().bits()).saturating_sub(1000);
            let n = (v.numer() >> shift as usize).to_f64().unwrap_or(0.0);
            let d = (v.denom() >> shift as usize).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact rational from a float (binary expansion, no rounding).
pub fn f64_to_q(v: f64) -> Option<Q> {
    BigRational::from_float(v)
}

/// Parses "p/q", an integer, or a decimal literal into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(Q::from_integer(n));
    }
    // decimal literal, read exactly in base ten
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    let digits = format!("{}{}", ip, fp);
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = Q::from_integer(n);
    if scale >= 0 {
        v *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -v } else { v })
}

pub fn q_to_string(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn q_abs(v: &Q) -> Q {
    v.abs()
}
