use super::{Family, LaurentPoly, Ring, VarId};
use crate::error::{Error, Result};
use crate::partitions::Partition;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// Complete homogeneous h_k of a finite alphabet.
pub fn h_k<R: Ring>(k: i64, xs: &[R]) -> R {
    if k < 0 {
        return R::zero();
    }
    let k = k as usize;
    let mut dp = vec![R::zero(); k + 1];
    dp[0] = R::one();
    for x in xs {
        for d in 1..=k {
            let add = x.clone() * dp[d - 1].clone();
            dp[d] = dp[d].clone() + add;
        }
    }
    dp.pop().unwrap()
}

/// Elementary e_k of a finite alphabet.
pub fn e_k<R: Ring>(k: i64, xs: &[R]) -> R {
    if k < 0 || k as usize > xs.len() {
        return if k == 0 { R::one() } else { R::zero() };
    }
    let k = k as usize;
    let mut dp = vec![R::zero(); k + 1];
    dp[0] = R::one();
    for x in xs {
        for d in (1..=k).rev() {
            let add = x.clone() * dp[d - 1].clone();
            dp[d] = dp[d].clone() + add;
        }
    }
    dp.pop().unwrap()
}

fn sign<R: Ring>(v: R, odd: bool) -> R {
    if odd {
        -v
    } else {
        v
    }
}

/// h_m(x/y) = Σ_k h_k(x) (−1)^{m−k} e_{m−k}(y).
pub fn supersym_h<R: Ring>(m: i64, xs: &[R], ys: &[R]) -> R {
    if m < 0 {
        return R::zero();
    }
    let mut acc = R::zero();
    for k in 0..=m {
        let e = e_k(m - k, ys);
        if e.is_zero() {
            continue;
        }
        acc = acc + sign(h_k(k, xs) * e, (m - k) % 2 == 1);
    }
    acc
}

/// e_m(x/y) = Σ_k e_k(x) (−1)^{m−k} h_{m−k}(y).
pub fn supersym_e<R: Ring>(m: i64, xs: &[R], ys: &[R]) -> R {
    if m < 0 {
        return R::zero();
    }
    let mut acc = R::zero();
    for k in 0..=m.min(xs.len() as i64) {
        acc = acc + sign(e_k(k, xs) * h_k(m - k, ys), (m - k) % 2 == 1);
    }
    acc
}

/// Truncated h_m[X ⊖ Y] = Σ_{a−b=m} h_a[X] h_b[Y] over max(a,b) ≤ trunc.
/// Returns the value with the truncation level used.
pub fn theta_h<R: Ring>(m: i64, xs: &[R], ys: &[R], trunc: usize) -> Result<(R, usize)> {
    Ok((theta_h_super(m, xs, ys, &[], trunc)?, trunc))
}

/// Σ_b h_{m+b}(X) h_b(Y⁺/Y⁻), truncated at max(m+b, b) ≤ trunc.
pub fn theta_h_super<R: Ring>(m: i64, xs: &[R], yp: &[R], ym: &[R], trunc: usize) -> Result<R> {
    if (trunc as i64) < m.max(0) {
        return Err(Error::Usage(format!(
            "truncation {} below required degree {}",
            trunc, m
        )));
    }
    let hx = h_series(xs, &[], trunc);
    let hy = h_series(yp, ym, trunc);
    let mut acc = R::zero();
    for b in 0..=trunc as i64 {
        let a = m + b;
        if a < 0 || a > trunc as i64 {
            continue;
        }
        let ha = &hx[a as usize];
        if ha.is_zero() {
            continue;
        }
        acc = acc + ha.clone() * hy[b as usize].clone();
    }
    Ok(acc)
}

/// h_0..h_k of x/y at once: coefficients of ∏(1 − y w) / ∏(1 − x w).
fn h_series<R: Ring>(xs: &[R], ys: &[R], k: usize) -> Vec<R> {
    let mut c = vec![R::zero(); k + 1];
    c[0] = R::one();
    for x in xs {
        for d in 1..=k {
            let add = x.clone() * c[d - 1].clone();
            c[d] = c[d].clone() + add;
        }
    }
    for y in ys {
        for d in (1..=k).rev() {
            let sub = y.clone() * c[d - 1].clone();
            c[d] = c[d].clone() - sub;
        }
    }
    c
}

/// Σ_b e_{m+b}(X) e_b(Y⁺/Y⁻); finite since e_a(X) = 0 for a > |X|.
pub fn theta_e_super<R: Ring>(m: i64, xs: &[R], yp: &[R], ym: &[R]) -> R {
    let mut acc = R::zero();
    for a in m.max(0)..=xs.len() as i64 {
        let b = a - m;
        acc = acc + e_k(a, xs) * supersym_e(b, yp, ym);
    }
    acc
}

/// Upper bound on the dropped tail of `theta_h_super` given |x_i| ≤ r (n of
/// them) and |y| ≤ q (s of them in total). Requires r q < 1.
pub fn theta_tail_bound(m: i64, n: usize, r: f64, s: usize, q: f64, trunc: usize) -> f64 {
    if n == 0 || (r * q >= 1.0 && s > 0) {
        return if n == 0 { 0.0 } else { f64::INFINITY };
    }
    let binom = |top: i64, k: usize| -> f64 {
        if k == 0 {
            return 1.0;
        }
        let mut v = 1.0;
        for i in 0..k {
            v *= (top - i as i64) as f64 / (i + 1) as f64;
        }
        v
    };
    let mut tail = 0.0;
    let start = (trunc as i64 - m.max(0)).max(0) + 1;
    let mut b = start;
    loop {
        let a = m + b;
        if a >= 0 {
            let ta = binom(a + n as i64 - 1, n - 1) * r.powi(a as i32);
            let tb = if s == 0 {
                if b == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                binom(b + s as i64 - 1, s - 1) * q.powi(b as i32)
            };
            let t = ta * tb;
            tail += t;
            if (t < 1e-40 && b > start + 10) || b > start + 100_000 {
                break;
            }
        }
        if s == 0 && b > start {
            break;
        }
        b += 1;
    }
    tail
}

/// Determinant by subset-memoized Laplace expansion (division free).
pub fn det<R: Ring>(m: &[Vec<R>]) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    assert!(n <= 20, "determinant too large for Laplace expansion");
    // dp[mask] = det of rows 0..|mask| restricted to columns in mask
    let mut dp: Vec<Option<R>> = vec![None; 1 << n];
    dp[0] = Some(R::one());
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = R::zero();
        for c in 0..n {
            if mask & (1 << c) == 0 {
                continue;
            }
            // sign from the column's rank within the mask
            let rank = (mask & ((1 << c) - 1)).count_ones() as usize;
            let sub = dp[mask ^ (1 << c)].as_ref().unwrap();
            if m[row][c].is_zero() || sub.is_zero() {
                continue;
            }
            let t = m[row][c].clone() * sub.clone();
            acc = acc + sign(t, (row + rank) % 2 == 1);
        }
        dp[mask] = Some(acc);
    }
    dp[(1 << n) - 1].take().unwrap()
}

/// Partial-pivot Gaussian elimination in floats.
pub fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    d
}

/// s_λ via det[h_{λ_i − i + j}].
pub fn jacobi_trudi<R: Ring>(lam: &Partition, xs: &[R]) -> R {
    let l = lam.len();
    let mat: Vec<Vec<R>> = (1..=l)
        .map(|i| {
            (1..=l)
                .map(|j| h_k(lam.part(i) as i64 - i as i64 + j as i64, xs))
                .collect()
        })
        .collect();
    det(&mat)
}

/// Schur polynomial s_λ(x_1..x_n) in the X variables.
pub fn schur_poly(lam: &Partition, n: usize) -> LaurentPoly {
    if lam.len() > n {
        return LaurentPoly::zero();
    }
    let xs: Vec<LaurentPoly> = (1..=n).map(|i| LaurentPoly::var(VarId::x(i as u32))).collect();
    jacobi_trudi(lam, &xs)
}

fn is_x(v: VarId) -> bool {
    v.family == Family::X
}

/// Coefficients c_λ with Σ c_λ s_λ(x_1..x_n) equal to the input through x-degree D.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurExpansion {
    pub n: usize,
    pub coeffs: BTreeMap<Partition, LaurentPoly>,
}

impl SchurExpansion {
    pub fn reconstruct(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (lam, c) in &self.coeffs {
            out += &(c * &schur_poly(lam, self.n));
        }
        out
    }

    pub fn coeff(&self, lam: &Partition) -> LaurentPoly {
        self.coeffs.get(lam).cloned().unwrap_or_default()
    }
}

impl Serialize for SchurExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(&Partition, &LaurentPoly)> = self.coeffs.iter().collect();
        let mut st = s.serialize_struct("SchurExpansion", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Greedy expansion: peel off the lex-leading x-monomial (a partition by
/// symmetry) until nothing is left.
pub fn schur_expand(f: &LaurentPoly, n: usize, d: usize) -> Result<SchurExpansion> {
    let max_var = f
        .vars()
        .into_iter()
        .filter(|v| is_x(*v))
        .map(|v| v.index as usize)
        .max()
        .unwrap_or(0);
    if max_var > n {
        return Err(Error::Constraint(format!(
            "x{} present but expansion taken in {} variables",
            max_var, n
        )));
    }
    let mut rest = f.truncate(is_x, d as i64);
    for i in 1..n {
        let sw = rest.swap_vars(VarId::x(i as u32), VarId::x(i as u32 + 1));
        if sw != rest {
            return Err(Error::NotSymmetric(i, i + 1));
        }
    }
    let mut coeffs = BTreeMap::new();
    while !rest.is_zero() {
        let groups = rest.collect_by(is_x);
        let (lead, c) = groups.into_iter().next_back().unwrap();
        let mut parts = Vec::with_capacity(n);
        for i in 1..=n {
            let e = lead.exp(VarId::x(i as u32));
            if e < 0 {
                return Err(Error::Constraint("negative x exponent".into()));
            }
            parts.push(e as u32);
        }
        let lam = Partition::new(parts).map_err(|_| Error::NotSymmetric(1, 2))?;
        let s = schur_poly(&lam, n).truncate(is_x, d as i64);
        rest = &rest - &(&c * &s);
        coeffs.insert(lam, c);
    }
    Ok(SchurExpansion { n, coeffs })
}

/// ω on the Schur basis: λ ↦ λ'.
pub fn omega_on_expansion(e: &SchurExpansion) -> SchurExpansion {
    SchurExpansion {
        n: e.n,
        coeffs: e
            .coeffs
            .iter()
            .map(|(l, c)| (l.conjugate(), c.clone()))
            .collect(),
    }
}
