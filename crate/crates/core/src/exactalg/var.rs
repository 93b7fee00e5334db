use serde::{Deserialize, Serialize};
use std::fmt;

/// Variable families: x_i (time), π_j / ρ_j (particle), α_k (position), β_j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    X,
    P,
    A,
    B,
}

impl Family {
    pub fn symbol(self) -> &'static str {
        match self {
            Family::X => "x",
            Family::P => "p",
            Family::A => "a",
            Family::B => "b",
        }
    }
}

/// β_j and π_{j+1} are distinct variables even when a kernel identifies them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId {
    pub family: Family,
    pub index: u32,
}

impl VarId {
    pub const fn new(family: Family, index: u32) -> Self {
        VarId { family, index }
    }
    pub const fn x(i: u32) -> Self {
        VarId::new(Family::X, i)
    }
    pub const fn p(i: u32) -> Self {
        VarId::new(Family::P, i)
    }
    pub const fn a(i: u32) -> Self {
        VarId::new(Family::A, i)
    }
    pub const fn b(i: u32) -> Self {
        VarId::new(Family::B, i)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.symbol(), self.index)
    }
}

impl std::str::FromStr for VarId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let fam = match s.chars().next() {
            Some('x') => Family::X,
            Some('p') => Family::P,
            Some('a') => Family::A,
            Some('b') => Family::B,
            _ => return Err(format!("bad variable {:?}", s)),
        };
        let idx = s[1..].parse().map_err(|_| format!("bad variable {:?}", s))?;
        Ok(VarId::new(fam, idx))
    }
}
