//! Multiplication and comultiplication tables on A = R[X]/(X²) and its deformations.
//!
//! A label is `false` for 1 and `true` for X. All structure constants are 1.

use serde::{Deserialize, Serialize};

use crate::linalg::RingTag;

use super::ComplexError;

/// One homogeneous piece of a total differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// m, Δ; polynomial degree jump 0.
    Khovanov,
    /// m_T(X⊗X)=X, Δ_T(1)=1⊗1; jump 2.
    Turner,
    /// m_L(X⊗X)=1, Δ_L(X)=1⊗1; jump 4.
    Lee,
}

impl Part {
    pub fn jump(&self) -> i32 {
        match self {
            Part::Khovanov => 0,
            Part::Turner => 2,
            Part::Lee => 4,
        }
    }

    pub fn multiply(&self, a: bool, b: bool) -> Option<bool> {
        match (self, a, b) {
            (Part::Khovanov, false, false) => Some(false),
            (Part::Khovanov, true, false) | (Part::Khovanov, false, true) => Some(true),
            (Part::Turner, true, true) => Some(true),
            (Part::Lee, true, true) => Some(false),
            _ => None,
        }
    }

    pub fn comultiply(&self, a: bool) -> &'static [(bool, bool)] {
        match (self, a) {
            (Part::Khovanov, false) => &[(false, true), (true, false)],
            (Part::Khovanov, true) => &[(true, true)],
            (Part::Turner, false) => &[(false, false)],
            (Part::Lee, true) => &[(false, false)],
            _ => &[],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrobeniusTheory {
    Khovanov,
    Lee,
    Turner,
    #[serde(rename = "BARNATAN_F2")]
    BarNatanF2,
}

impl FrobeniusTheory {
    /// Pieces of the total differential, Khovanov first.
    pub fn parts(&self) -> &'static [Part] {
        match self {
            FrobeniusTheory::Khovanov => &[Part::Khovanov],
            FrobeniusTheory::Lee => &[Part::Khovanov, Part::Lee],
            FrobeniusTheory::Turner | FrobeniusTheory::BarNatanF2 => &[Part::Khovanov, Part::Turner],
        }
    }

    /// Polynomial jump of the perturbation (0 for Khovanov).
    pub fn jump(&self) -> i32 {
        self.parts().last().map_or(0, Part::jump)
    }

    pub fn is_filtered(&self) -> bool {
        self.parts().len() > 1
    }

    pub fn check_ring(&self, ring: RingTag) -> Result<(), ComplexError> {
        let ok = match self {
            FrobeniusTheory::Khovanov => true,
            FrobeniusTheory::Lee => match ring {
                RingTag::Rationals => true,
                RingTag::ModP(p) => p != 2,
                RingTag::Integers => false,
            },
            FrobeniusTheory::Turner | FrobeniusTheory::BarNatanF2 => ring == RingTag::ModP(2),
        };
        if ok {
            return Ok(());
        }
        let hint = match (self, ring) {
            (FrobeniusTheory::Lee, RingTag::ModP(2)) => "Lee theory needs Q or an odd prime; over Z2 use TURNER",
            (FrobeniusTheory::Lee, _) => "Lee theory needs Q or an odd prime",
            _ => "Turner and Bar-Natan theories need Z2",
        };
        Err(ComplexError::RingMismatch {
            theory: *self,
            ring,
            hint,
        })
    }
}

impl std::fmt::Display for FrobeniusTheory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FrobeniusTheory::Khovanov => "KHOVANOV",
            FrobeniusTheory::Lee => "LEE",
            FrobeniusTheory::Turner => "TURNER",
            FrobeniusTheory::BarNatanF2 => "BARNATAN_F2",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: bool = false;
    const X: bool = true;

    #[test]
    fn khovanov_tables() {
        let k = Part::Khovanov;
        assert_eq!(k.multiply(ONE, ONE), Some(ONE));
        assert_eq!(k.multiply(ONE, X), Some(X));
        assert_eq!(k.multiply(X, ONE), Some(X));
        assert_eq!(k.multiply(X, X), None);
        assert_eq!(k.comultiply(ONE), &[(ONE, X), (X, ONE)]);
        assert_eq!(k.comultiply(X), &[(X, X)]);
    }

    #[test]
    fn deformation_tables() {
        assert_eq!(Part::Turner.multiply(X, X), Some(X));
        assert_eq!(Part::Turner.multiply(ONE, X), None);
        assert_eq!(Part::Turner.comultiply(ONE), &[(ONE, ONE)]);
        assert!(Part::Turner.comultiply(X).is_empty());
        assert_eq!(Part::Lee.multiply(X, X), Some(ONE));
        assert_eq!(Part::Lee.comultiply(X), &[(ONE, ONE)]);
        assert!(Part::Lee.comultiply(ONE).is_empty());
    }

    #[test]
    fn degree_jumps_match_labels() {
        // j(label) = (#1 - #X); merge adds a crossing's +1 in h, so m preserves j when
        // deg(out) = deg(a) + deg(b) - 1, Δ when deg(l)+deg(r) = deg(a) - 1.
        let deg = |x: bool| if x { -1 } else { 1 };
        for part in [Part::Khovanov, Part::Turner, Part::Lee] {
            for a in [ONE, X] {
                for b in [ONE, X] {
                    if let Some(c) = part.multiply(a, b) {
                        assert_eq!(deg(c) - deg(a) - deg(b) + 1, part.jump());
                    }
                }
                for &(l, r) in part.comultiply(a) {
                    assert_eq!(deg(l) + deg(r) - deg(a) + 1, part.jump());
                }
            }
        }
    }

    #[test]
    fn ring_constraints() {
        use FrobeniusTheory::*;
        assert!(Khovanov.check_ring(RingTag::Integers).is_ok());
        assert!(Lee.check_ring(RingTag::Rationals).is_ok());
        assert!(Lee.check_ring(RingTag::ModP(3)).is_ok());
        let err = Lee.check_ring(RingTag::ModP(2)).unwrap_err();
        assert!(err.to_string().contains("TURNER"));
        assert!(Lee.check_ring(RingTag::Integers).is_err());
        assert!(Turner.check_ring(RingTag::ModP(2)).is_ok());
        assert!(BarNatanF2.check_ring(RingTag::Rationals).is_err());
    }
}
