//! Exact sparse linear algebra over ℤ, ℚ and ℤ/p.

mod field;
mod lift;
pub mod ring;
mod smith;
mod sparse;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{rank_fraction_free, rank_kernel, rank_kernel_over, rank_over, Echelon, KernelBasis};
pub use lift::lift_and_divide;
pub use ring::{CheckedIntegers, CheckedRationals, Field, Integers, PrimeField, Rationals, Ring, TruncatedPadic};
pub use smith::{prime_power_factors, smith_normal_form, smith_normal_form_with_transforms, SmithDecomposition};
pub use sparse::{DenseMat, SparseMat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("operation needs a field, got the integers")]
    IntegersNotAField,
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("entry {row} of d·lift(x) is not divisible by {p}^{r}")]
    NotDivisible { row: usize, p: u64, r: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("torsion coefficient {0} too large to factor")]
    TorsionTooLarge(String),
    #[error("unknown ring `{0}` (use Z, Q or Z<p>)")]
    UnknownRing(String),
}

/// The coefficient ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RingTag {
    Integers,
    Rationals,
    ModP(u32),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl RingTag {
    pub fn mod_p(p: u64) -> Result<Self, LinalgError> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(RingTag::ModP(p as u32))
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, RingTag::Integers)
    }

    /// 0 for ℤ and ℚ.
    pub fn characteristic(&self) -> u64 {
        match self {
            RingTag::ModP(p) => u64::from(*p),
            _ => 0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            RingTag::Integers => "Z".to_string(),
            RingTag::Rationals => "Q".to_string(),
            RingTag::ModP(p) => format!("Z{p}"),
        }
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for RingTag {
    type Err = LinalgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "Z" | "ZZ" | "integers" => return Ok(RingTag::Integers),
            "Q" | "QQ" | "rationals" => return Ok(RingTag::Rationals),
            _ => {}
        }
        let digits = t
            .strip_prefix("Z_")
            .or_else(|| t.strip_prefix('Z'))
            .or_else(|| t.strip_prefix("GF"))
            .ok_or_else(|| LinalgError::UnknownRing(s.to_string()))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| LinalgError::UnknownRing(s.to_string()))?;
        RingTag::mod_p(p)
    }
}

impl From<RingTag> for String {
    fn from(t: RingTag) -> String {
        t.label()
    }
}

impl TryFrom<String> for RingTag {
    type Error = LinalgError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
