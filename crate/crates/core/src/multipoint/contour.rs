//! Contour integrals ∮ scale · ∏ (w − c)^p · dw/(2πi) over a circle |w| = r,
//! either as a finite residue sum (exact in the coefficient type) or by the
//! trapezoid rule on the circle.

use crate::error::{Error, Result};
use crate::exactalg::Scalar;
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Factor<S> {
    pub root: S,
    pub power: i32,
    /// whether the root sits inside the contour
    pub inside: bool,
}

/// scale · ∏ (w − root)^power. Equal roots are merged on insertion.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrand<S> {
    pub scale: S,
    pub factors: Vec<Factor<S>>,
}

impl<S: Scalar> Integrand<S> {
    pub fn new(scale: S) -> Self {
        Integrand {
            scale,
            factors: Vec::new(),
        }
    }

    /// Multiplies by (w − root)^power.
    pub fn factor(mut self, root: S, power: i32, inside: bool) -> Result<Self> {
        if power == 0 {
            return Ok(self);
        }
        if let Some(f) = self.factors.iter_mut().find(|f| f.root == root) {
            if f.inside != inside {
                return Err(Error::Constraint(format!(
                    "root {:?} is claimed on both sides of the contour",
                    root
                )));
            }
            f.power += power;
        } else {
            self.factors.push(Factor { root, power, inside });
        }
        self.factors.retain(|f| f.power != 0);
        Ok(self)
    }

    pub fn w_pow(self, k: i32) -> Result<Self> {
        self.factor(S::zero(), k, true)
    }

    /// (1 − a/w)^p, with a inside the contour.
    pub fn one_minus_over_w(self, a: S, p: i32) -> Result<Self> {
        if a.is_zero() {
            return Ok(self);
        }
        self.factor(a, p, true)?.w_pow(-p)
    }

    /// (1 − x w)^p, with 1/x outside the contour.
    pub fn one_minus_times_w(mut self, x: S, p: i32) -> Result<Self> {
        if x.is_zero() {
            return Ok(self);
        }
        self.scale = self.scale * (-x.clone()).powi(p);
        self.factor(x.inv(), p, false)
    }

    /// (1 − w/a)^p, with a outside the contour.
    pub fn one_minus_w_over(mut self, a: S, p: i32) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Pole("1 - w/a at a = 0".into()));
        }
        self.scale = self.scale * (-a.inv()).powi(p);
        self.factor(a, p, false)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Integrand<T> {
        Integrand {
            scale: f(&self.scale),
            factors: self
                .factors
                .iter()
                .map(|g| Factor {
                    root: f(&g.root),
                    power: g.power,
                    inside: g.inside,
                })
                .collect(),
        }
    }

    /// Sum of residues at the inside poles. `extra(c, k)` gives the first k
    /// Taylor coefficients at c of an entire factor multiplying the integrand.
    pub fn residues(&self, extra: &dyn Fn(&S, usize) -> Vec<S>) -> S {
        let mut total = S::zero();
        for (idx, f) in self.factors.iter().enumerate() {
            if !f.inside || f.power >= 0 {
                continue;
            }
            let k = (-f.power) as usize;
            let mut series = extra(&f.root, k);
            series.resize(k, S::zero());
            for (jdx, g) in self.factors.iter().enumerate() {
                if jdx == idx {
                    continue;
                }
                let d = f.root.clone() - g.root.clone();
                series = mul_trunc(&series, &binomial_series(&d, g.power, k), k);
            }
            total = total + series[k - 1].clone();
        }
        self.scale.clone() * total
    }
}

/// (d + s)^p as a power series in s, first k terms.
fn binomial_series<S: Scalar>(d: &S, p: i32, k: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(k);
    let mut c = d.powi(p);
    for n in 0..k {
        out.push(c.clone());
        let num = S::from_i64(p as i64 - n as i64);
        c = c * num / (S::from_i64(n as i64 + 1) * d.clone());
    }
    out
}

fn mul_trunc<S: Scalar>(a: &[S], b: &[S], k: usize) -> Vec<S> {
    let mut out = vec![S::zero(); k];
    for (i, x) in a.iter().enumerate().take(k) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(k - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// No extra factor.
pub fn unit<S: Scalar>(_c: &S, k: usize) -> Vec<S> {
    let mut v = vec![S::zero(); k];
    if k > 0 {
        v[0] = S::one();
    }
    v
}

/// Taylor coefficients of e^{t w} at w = c.
pub fn exp_series(t: f64) -> impl Fn(&f64, usize) -> Vec<f64> {
    move |c, k| {
        let mut v = Vec::with_capacity(k);
        let mut a = (t * c).exp();
        for n in 0..k {
            v.push(a);
            a *= t / (n as f64 + 1.0);
        }
        v
    }
}

impl Integrand<f64> {
    /// Errors unless every inside root has |c| < r and every outside root |c| > r.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        if r.is_nan() || r <= 0.0 {
            return Err(Error::Constraint(format!("contour radius {} must be positive", r)));
        }
        for f in &self.factors {
            if f.power >= 0 {
                continue;
            }
            let a = f.root.abs();
            if f.inside && a >= r {
                return Err(Error::Constraint(format!(
                    "contour radius {} must exceed |{}| (pole inside)",
                    r, f.root
                )));
            }
            if !f.inside && a <= r {
                return Err(Error::Constraint(format!(
                    "contour radius {} must stay below |{}| (pole outside)",
                    r, f.root
                )));
            }
        }
        Ok(())
    }

    /// (largest inside pole modulus, smallest outside pole modulus)
    pub fn pole_gap(&self) -> (f64, f64) {
        let mut lo: f64 = 0.0;
        let mut hi = f64::INFINITY;
        for f in self.factors.iter().filter(|f| f.power < 0) {
            if f.inside {
                lo = lo.max(f.root.abs());
            } else {
                hi = hi.min(f.root.abs());
            }
        }
        (lo, hi)
    }

    pub fn eval(&self, w: Complex64, t: f64) -> Complex64 {
        let mut v = Complex64::new(self.scale, 0.0);
        for f in &self.factors {
            v *= (w - f.root).powi(f.power);
        }
        if t != 0.0 {
            v *= (w * t).exp();
        }
        v
    }

    /// Trapezoid rule with `points` nodes on |w| = r, times e^{tw}.
    pub fn trapezoid(&self, r: f64, points: usize, t: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..points {
            let th = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
            let w = Complex64::from_polar(r, th);
            acc += self.eval(w, t) * w;
        }
        acc.re / points as f64
    }
}

/// Doubles the node count from `start` until two successive values agree to
/// 1e-12 (relative to max(1, |value|)) or 2^14 nodes are reached.
/// Returns (value, nodes used, last change).
pub fn adaptive_trapezoid(ig: &Integrand<f64>, r: f64, start: usize, t: f64) -> Result<(f64, usize, f64)> {
    ig.check_radius(r)?;
    let mut n = start.max(4);
    let mut prev = ig.trapezoid(r, n, t);
    loop {
        let next_n = n * 2;
        let v = ig.trapezoid(r, next_n, t);
        let diff = (v - prev).abs();
        if diff <= 1e-12 * v.abs().max(1.0) || next_n >= 1 << 14 {
            return Ok((v, next_n, diff));
        }
        prev = v;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q, Q};

    #[test]
    fn geometric_coefficient() {
        // ∮ w^{-3} / (1 − w/2) dw/(2πi w) = 2^{-3}
        let ig = Integrand::new(q(1, 1))
            .one_minus_w_over(q(2, 1), -1)
            .unwrap()
            .w_pow(-4)
            .unwrap();
        assert_eq!(ig.residues(&unit), q(1, 8));
        let f = ig.map(crate::exactalg::q_to_f64);
        let (v, _, _) = adaptive_trapezoid(&f, 1.0, 64, 0.0).unwrap();
        assert!((v - 0.125).abs() < 1e-13);
        assert!(f.check_radius(3.0).is_err());
    }

    #[test]
    fn repeated_inside_roots() {
        // ∮ w^2/(w − 1/2)^3 dw/(2πi): residue = (1/2)·2/2! ... = 1
        let ig = Integrand::new(q(1, 1))
            .factor(q(1, 2), -3, true)
            .unwrap()
            .w_pow(2)
            .unwrap();
        assert_eq!(ig.residues(&unit::<Q>), q(1, 1));
        let (v, _, _) = adaptive_trapezoid(&ig.map(crate::exactalg::q_to_f64), 1.0, 64, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_factor() {
        // ∮ e^{tw} w^{-3} dw/(2πi) = t²/2
        let ig: Integrand<f64> = Integrand::new(1.0).w_pow(-3).unwrap();
        let t = 1.7;
        assert!((ig.residues(&exp_series(t)) - t * t / 2.0).abs() < 1e-14);
        let (v, _, _) = adaptive_trapezoid(&ig, 1.0, 64, t).unwrap();
        assert!((v - t * t / 2.0).abs() < 1e-12);
    }
}
