//! Integer partitions and skew shapes.
//!
//! A partition doubles as a bosonic particle configuration: `part(j)` is the
//! position of particle `j`, particle 1 being the rightmost. All public
//! indexing is 1-based.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Usage(format!("not weakly decreasing: {:?}", parts)));
        }
        Ok(Self::from_sorted(parts))
    }

    /// Caller guarantees the parts are weakly decreasing.
    pub fn from_sorted(mut parts: Vec<u32>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// ℓ(λ), the number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// λ_i with λ_i = 0 past the length. `i` is 1-based.
    pub fn part(&self, i: usize) -> u32 {
        assert!(i >= 1, "rows are 1-based");
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn first(&self) -> u32 {
        self.part(1)
    }

    pub fn conjugate(&self) -> Self {
        let m = self.first() as usize;
        let mut out = vec![0u32; m];
        for &p in &self.0 {
            for c in out.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Partition(out)
    }

    pub fn contains(&self, inner: &Partition) -> bool {
        inner.0.len() <= self.0.len() && inner.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Removable boxes (i, λ_i) with λ_i > λ_{i+1}, ascending rows.
    pub fn corners(&self) -> Vec<(usize, u32)> {
        (1..=self.len())
            .filter(|&i| self.part(i) > self.part(i + 1))
            .map(|i| (i, self.part(i)))
            .collect()
    }

    /// Row `i` can take one more box (row 1 always can).
    pub fn is_addable(&self, i: usize) -> bool {
        i == 1 || self.part(i) < self.part(i - 1)
    }

    pub fn add_box(&self, i: usize) -> Option<Partition> {
        if !self.is_addable(i) {
            return None;
        }
        let mut v = self.0.clone();
        if v.len() < i {
            v.resize(i, 0);
        }
        v[i - 1] += 1;
        Some(Partition(v))
    }

    pub fn remove_box(&self, i: usize) -> Option<Partition> {
        if self.part(i) == 0 || self.part(i) <= self.part(i + 1) {
            return None;
        }
        let mut v = self.0.clone();
        v[i - 1] -= 1;
        Some(Self::from_sorted(v))
    }

    /// Adds a box to row `j` and to every row above it that would otherwise
    /// break the partition condition. Returns the rows that were pushed.
    pub fn push_closure(&self, j: usize) -> (Partition, Vec<usize>) {
        assert!(j >= 1);
        let pj = self.part(j);
        let mut k = j;
        while k > 1 && self.part(k - 1) == pj {
            k -= 1;
        }
        let mut v = self.0.clone();
        if v.len() < j {
            v.resize(j, 0);
        }
        for r in k..=j {
            v[r - 1] += 1;
        }
        (Partition(v), (k..j).collect())
    }

    /// Parts padded with zeros to at least `len` entries.
    pub fn padded(&self, len: usize) -> Vec<u32> {
        let mut v = self.0.clone();
        v.resize(len.max(v.len()), 0);
        v
    }

    pub fn contains_cell(&self, r: usize, c: u32) -> bool {
        c >= 1 && self.part(r) >= c
    }

    /// Cells (row, col) of the diagram, row-major.
    pub fn cells(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (i, &p) in self.0.iter().enumerate() {
            for c in 1..=p {
                out.push((i + 1, c));
            }
        }
        out
    }

    /// Componentwise union (max of parts).
    pub fn union(&self, other: &Partition) -> Partition {
        let n = self.len().max(other.len());
        Partition::from_sorted((1..=n).map(|i| self.part(i).max(other.part(i))).collect())
    }

    /// Componentwise intersection (min of parts).
    pub fn intersection(&self, other: &Partition) -> Partition {
        let n = self.len().min(other.len());
        Partition::from_sorted((1..=n).map(|i| self.part(i).min(other.part(i))).collect())
    }

    /// Fermionic display positions λ_j − j for j = 1..ell.
    pub fn fermionic(&self, ell: usize) -> Vec<i64> {
        (1..=ell).map(|j| self.part(j) as i64 - j as i64).collect()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Partition::new(v).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<u32> = serde_json::from_str(s.trim())
            .map_err(|e| Error::Usage(format!("bad partition {:?}: {}", s, e)))?;
        Partition::new(v)
    }
}

#[macro_export]
macro_rules! part {
    () => { $crate::partitions::Partition::empty() };
    ($($x:expr),+ $(,)?) => {
        $crate::partitions::Partition::new(vec![$($x),+]).expect("partition literal")
    };
}

/// λ/μ with μ ⊆ λ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkewShape {
    pub outer: Partition,
    pub inner: Partition,
}

impl SkewShape {
    pub fn new(outer: Partition, inner: Partition) -> Result<Self> {
        if !outer.contains(&inner) {
            return Err(Error::Constraint(format!("{} does not contain {}", outer, inner)));
        }
        Ok(SkewShape { outer, inner })
    }

    pub fn straight(outer: Partition) -> Self {
        SkewShape { outer, inner: Partition::empty() }
    }

    pub fn cells(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for i in 1..=self.outer.len() {
            for c in self.inner.part(i) + 1..=self.outer.part(i) {
                out.push((i, c));
            }
        }
        out
    }

    pub fn size(&self) -> u32 {
        self.outer.size() - self.inner.size()
    }

    pub fn contains_cell(&self, r: usize, c: u32) -> bool {
        r >= 1 && c >= 1 && c > self.inner.part(r) && c <= self.outer.part(r)
    }

    pub fn is_vertical_strip(&self) -> bool {
        (1..=self.outer.len()).all(|i| self.outer.part(i) - self.inner.part(i) <= 1)
    }

    pub fn is_horizontal_strip(&self) -> bool {
        self.conjugate().is_vertical_strip()
    }

    pub fn conjugate(&self) -> SkewShape {
        SkewShape { outer: self.outer.conjugate(), inner: self.inner.conjugate() }
    }

    /// Number of distinct columns touched.
    pub fn column_count(&self) -> usize {
        let mut cols: Vec<u32> = self.cells().into_iter().map(|(_, c)| c).collect();
        cols.sort_unstable();
        cols.dedup();
        cols.len()
    }
}

impl fmt::Display for SkewShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.outer, self.inner)
    }
}

/// All partitions fitting in a `rows × cols` box, in sorted order.
pub fn partitions_in_box(rows: usize, cols: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rows: usize, maxp: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        out.push(Partition::from_sorted(cur.clone()));
        if cur.len() == rows {
            return;
        }
        for p in 1..=maxp {
            cur.push(p);
            rec(rows, p, cur, out);
            cur.pop();
        }
    }
    rec(rows, cols, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

/// All partitions contained in `outer`.
pub fn subpartitions(outer: &Partition) -> Vec<Partition> {
    partitions_in_box(outer.len(), outer.first())
        .into_iter()
        .filter(|p| outer.contains(p))
        .collect()
}

/// All partitions with size at most `max_size`, length at most `max_len`.
pub fn partitions_up_to(max_size: u32, max_len: usize) -> Vec<Partition> {
    partitions_in_box(max_len, max_size)
        .into_iter()
        .filter(|p| p.size() <= max_size)
        .collect()
}

/// Partitions ν with μ ⊆ ν ⊆ λ.
pub fn interval(inner: &Partition, outer: &Partition) -> Vec<Partition> {
    subpartitions(outer).into_iter().filter(|p| p.contains(inner)).collect()
}
