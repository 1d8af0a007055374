//! Braid words, the half twist, Murasugi's 3-braid classes and closure combinatorics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("a braid needs at least one strand")]
    NoStrands,
    #[error("generator {letter} is out of range for {strands} strands")]
    GeneratorOutOfRange { letter: i32, strands: usize },
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("{kind} expects {expected}")]
    Arity {
        kind: MurasugiKind,
        expected: &'static str,
    },
    #[error("exponents must be positive, got {0}")]
    NonPositiveExponent(i64),
    #[error("twist parameter must be non-negative here, got {0}")]
    NegativeTwist(i64),
    #[error("phi is only defined on 3 strands, got {0}")]
    PhiNeedsThreeStrands(usize),
    #[error("cannot concatenate braids on {0} and {1} strands")]
    StrandMismatch(usize, usize),
}

/// A word in the braid group generators. Letter `k > 0` is σ_k, `k < 0` is σ_k⁻¹.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        for &letter in &letters {
            let k = letter.unsigned_abs() as usize;
            if letter == 0 || k >= strands {
                return Err(BraidError::GeneratorOutOfRange { letter, strands });
            }
        }
        Ok(Self { strands, letters })
    }

    /// The trivial braid.
    pub fn identity(strands: usize) -> Result<Self, BraidError> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Δ^power, expanded literally as |power| copies of Δ or Δ⁻¹.
    pub fn half_twist(strands: usize, power: i64) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        let mut delta = Vec::new();
        for top in (1..strands as i32).rev() {
            delta.extend(1..=top);
        }
        let unit: Vec<i32> = if power < 0 {
            delta.iter().rev().map(|k| -k).collect()
        } else {
            delta
        };
        let mut letters = Vec::with_capacity(unit.len() * power.unsigned_abs() as usize);
        for _ in 0..power.unsigned_abs() {
            letters.extend_from_slice(&unit);
        }
        Ok(Self { strands, letters })
    }

    pub fn concat(&self, other: &BraidWord) -> Result<Self, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self {
            strands: self.strands,
            letters,
        })
    }

    /// Appends `gen^exp` (negative exponents give inverse letters).
    pub fn push_power(&mut self, generator: i32, exp: i64) -> Result<(), BraidError> {
        let g = generator.abs();
        if g == 0 || g as usize >= self.strands {
            return Err(BraidError::GeneratorOutOfRange {
                letter: generator,
                strands: self.strands,
            });
        }
        let letter = if exp < 0 { -g } else { g };
        self.letters
            .extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        Ok(())
    }

    /// Every letter inverted, order kept.
    pub fn mirror(&self) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.iter().map(|k| -k).collect(),
        }
    }

    /// Swaps σ₁ and σ₂ on 3 strands.
    pub fn phi_swap(&self) -> Result<Self, BraidError> {
        if self.strands != 3 {
            return Err(BraidError::PhiNeedsThreeStrands(self.strands));
        }
        let letters = self
            .letters
            .iter()
            .map(|&k| k.signum() * (3 - k.abs()))
            .collect();
        Ok(Self {
            strands: 3,
            letters,
        })
    }

    pub fn closure_permutation(&self) -> ClosurePermutation {
        // at[pos] = strand currently at position pos
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &k in &self.letters {
            let k = k.unsigned_abs() as usize;
            at.swap(k - 1, k);
        }
        let mut image = vec![0; self.strands];
        for (end, &start) in at.iter().enumerate() {
            image[start] = end;
        }
        let mut seen = vec![false; self.strands];
        let mut components = 0;
        for s in 0..self.strands {
            if seen[s] {
                continue;
            }
            components += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = image[x];
            }
        }
        ClosurePermutation { image, components }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Where each strand position ends up after one pass through the braid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosurePermutation {
    /// `image[p]` is the end position of the strand starting at position `p` (0-based).
    pub image: Vec<usize>,
    pub components: usize,
}

impl ClosurePermutation {
    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Nontrivial cycles written 1-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for s in 0..self.image.len() {
            if seen[s] || self.image[s] == s {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.image[x];
            }
            out.push(cycle);
        }
        out
    }
}

/// Parses `word := token+ ; token := signed-int | "D" | "D^" int`.
///
/// An empty or blank text is the trivial braid.
pub fn parse_braid_word(text: &str, strands: usize) -> Result<BraidWord, BraidError> {
    if strands == 0 {
        return Err(BraidError::NoStrands);
    }
    let mut word = BraidWord::identity(strands)?;
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        if let Some(rest) = token.strip_prefix('D') {
            let power = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .and_then(|p| p.parse::<i64>().ok())
                    .ok_or_else(|| BraidError::MalformedToken(token.to_string()))?
            };
            word = word.concat(&BraidWord::half_twist(strands, power)?)?;
            continue;
        }
        let letter: i32 = token
            .parse()
            .map_err(|_| BraidError::MalformedToken(token.to_string()))?;
        if letter == 0 || letter.unsigned_abs() as usize >= strands {
            return Err(BraidError::GeneratorOutOfRange { letter, strands });
        }
        word.letters.push(letter);
    }
    Ok(word)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MurasugiKind {
    Omega0,
    Omega1,
    Omega2,
    Omega3,
    Omega4,
    Omega5,
    Omega6,
}

impl fmt::Display for MurasugiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = match self {
            MurasugiKind::Omega0 => 0,
            MurasugiKind::Omega1 => 1,
            MurasugiKind::Omega2 => 2,
            MurasugiKind::Omega3 => 3,
            MurasugiKind::Omega4 => 4,
            MurasugiKind::Omega5 => 5,
            MurasugiKind::Omega6 => 6,
        };
        write!(f, "Ω{idx}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Mirror,
    Phi,
}

/// A representative of one of Murasugi's conjugacy classes of 3-braids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MurasugiClass {
    pub kind: MurasugiKind,
    pub n: i64,
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    /// Ω₆′: zero exponents allowed.
    pub extended: bool,
}

/// Result of moving a class to a non-negative twist parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub class: MurasugiClass,
    /// Applied in order to the original word.
    pub transforms: Vec<Transform>,
    /// Set when the image needed zero exponents, i.e. left Ω₆ proper.
    pub leaves_omega6: bool,
}

impl MurasugiClass {
    pub fn new(kind: MurasugiKind, n: i64, p: Vec<i64>, q: Vec<i64>) -> Result<Self, BraidError> {
        let class = Self {
            kind,
            n,
            p,
            q,
            extended: false,
        };
        class.validate()?;
        Ok(class)
    }

    pub fn simple(kind: MurasugiKind, n: i64) -> Result<Self, BraidError> {
        Self::new(kind, n, Vec::new(), Vec::new())
    }

    /// Ω₆′ member, zero exponents permitted.
    pub fn extended_omega6(n: i64, p: Vec<i64>, q: Vec<i64>) -> Result<Self, BraidError> {
        let class = Self {
            kind: MurasugiKind::Omega6,
            n,
            p,
            q,
            extended: true,
        };
        class.validate()?;
        Ok(class)
    }

    fn validate(&self) -> Result<(), BraidError> {
        use MurasugiKind::*;
        let arity = |expected| BraidError::Arity {
            kind: self.kind,
            expected,
        };
        match self.kind {
            Omega0 | Omega1 | Omega2 | Omega3 => {
                if !self.p.is_empty() || !self.q.is_empty() {
                    return Err(arity("no exponents"));
                }
            }
            Omega4 => {
                if self.p.len() != 1 || !self.q.is_empty() {
                    return Err(arity("exactly one p exponent"));
                }
            }
            Omega5 => {
                if self.q.len() != 1 || !self.p.is_empty() {
                    return Err(arity("exactly one q exponent"));
                }
            }
            Omega6 => {
                if self.p.is_empty() || self.p.len() != self.q.len() {
                    return Err(arity("equal-length, nonempty p and q lists"));
                }
            }
        }
        for &e in self.p.iter().chain(&self.q) {
            if e < 0 || (e == 0 && !self.extended) {
                return Err(BraidError::NonPositiveExponent(e));
            }
        }
        Ok(())
    }

    /// Literal representative word on 3 strands. Needs n ≥ 0.
    pub fn word(&self) -> Result<BraidWord, BraidError> {
        use MurasugiKind::*;
        if self.n < 0 {
            return Err(BraidError::NegativeTwist(self.n));
        }
        self.validate()?;
        let mut w = if self.kind == Omega3 {
            BraidWord::half_twist(3, 2 * self.n + 1)?
        } else {
            BraidWord::half_twist(3, 2 * self.n)?
        };
        match self.kind {
            Omega0 | Omega3 => {}
            Omega1 => w.letters.extend([1, 2]),
            Omega2 => w.letters.extend([1, 2, 1, 2]),
            Omega4 => w.push_power(1, -self.p[0])?,
            Omega5 => w.push_power(2, self.q[0])?,
            Omega6 => {
                for (&p, &q) in self.p.iter().zip(&self.q) {
                    w.push_power(1, -p)?;
                    w.push_power(2, q)?;
                }
            }
        }
        Ok(w)
    }

    /// Moves the class to a non-negative twist parameter using mirror and φ.
    /// Classes with n ≥ 0 come back unchanged with an empty trace.
    pub fn reduce_to_nonneg(&self) -> Reduction {
        use MurasugiKind::*;
        if self.n >= 0 {
            return Reduction {
                class: self.clone(),
                transforms: Vec::new(),
                leaves_omega6: false,
            };
        }
        let k = -self.n;
        let simple = |kind, n| MurasugiClass {
            kind,
            n,
            p: Vec::new(),
            q: Vec::new(),
            extended: false,
        };
        let mirror_only = vec![Transform::Mirror];
        let both = vec![Transform::Mirror, Transform::Phi];
        match self.kind {
            Omega0 => Reduction {
                class: simple(Omega0, k),
                transforms: mirror_only,
                leaves_omega6: false,
            },
            Omega1 => Reduction {
                class: simple(Omega2, k - 1),
                transforms: mirror_only,
                leaves_omega6: false,
            },
            Omega2 => Reduction {
                class: simple(Omega1, k - 1),
                transforms: mirror_only,
                leaves_omega6: false,
            },
            Omega3 => Reduction {
                class: simple(Omega3, k - 1),
                transforms: mirror_only,
                leaves_omega6: false,
            },
            Omega4 => Reduction {
                class: MurasugiClass {
                    kind: Omega5,
                    n: k,
                    p: Vec::new(),
                    q: self.p.clone(),
                    extended: false,
                },
                transforms: both,
                leaves_omega6: false,
            },
            Omega5 => Reduction {
                class: MurasugiClass {
                    kind: Omega4,
                    n: k,
                    p: self.q.clone(),
                    q: Vec::new(),
                    extended: false,
                },
                transforms: both,
                leaves_omega6: false,
            },
            Omega6 => {
                // mφ(σ₁^{-p}σ₂^{q}) = σ₂^{p}σ₁^{-q}; regroup as σ₁^{-0}σ₂^{p₁}σ₁^{-q₁}…σ₂^{0}
                let mut p = vec![0];
                p.extend(self.q.iter().copied());
                let mut q = self.p.clone();
                q.push(0);
                Reduction {
                    class: MurasugiClass {
                        kind: Omega6,
                        n: k,
                        p,
                        q,
                        extended: true,
                    },
                    transforms: both,
                    leaves_omega6: true,
                }
            }
        }
    }
}

/// Applies a transform trace to a word.
pub fn apply_transforms(w: &BraidWord, transforms: &[Transform]) -> Result<BraidWord, BraidError> {
    let mut out = w.clone();
    for t in transforms {
        out = match t {
            Transform::Mirror => out.mirror(),
            Transform::Phi => out.phi_swap()?,
        };
    }
    Ok(out)
}

/// (σ₁σ₂)^q on 3 strands, a word for the torus link T(3,q).
pub fn torus_word(q: usize) -> BraidWord {
    let mut letters = Vec::with_capacity(2 * q);
    for _ in 0..q {
        letters.extend([1, 2]);
    }
    BraidWord { strands: 3, letters }
}

#[cfg(test)]
mod tests {
    use super::*;
    use MurasugiKind::*;

    #[test]
    fn parses_plain_letters() {
        assert_eq!(parse_braid_word("1 2 1", 3).unwrap().letters(), &[1, 2, 1]);
        assert_eq!(parse_braid_word("  -1\t2 ", 3).unwrap().letters(), &[-1, 2]);
        assert!(parse_braid_word("", 2).unwrap().is_empty());
    }

    #[test]
    fn parses_half_twists() {
        assert_eq!(parse_braid_word("D", 3).unwrap().letters(), &[1, 2, 1]);
        assert_eq!(
            parse_braid_word("D^2", 3).unwrap().letters(),
            &[1, 2, 1, 1, 2, 1]
        );
        assert_eq!(
            parse_braid_word("D^-1 2", 3).unwrap().letters(),
            &[-1, -2, -1, 2]
        );
        assert_eq!(parse_braid_word("D", 4).unwrap().letters(), &[1, 2, 3, 1, 2, 1]);
        assert!(parse_braid_word("D^0", 3).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_tokens() {
        assert_eq!(
            parse_braid_word("3", 3),
            Err(BraidError::GeneratorOutOfRange { letter: 3, strands: 3 })
        );
        assert_eq!(
            parse_braid_word("0", 3),
            Err(BraidError::GeneratorOutOfRange { letter: 0, strands: 3 })
        );
        assert!(matches!(
            parse_braid_word("x", 3),
            Err(BraidError::MalformedToken(_))
        ));
        assert!(matches!(
            parse_braid_word("D^", 3),
            Err(BraidError::MalformedToken(_))
        ));
        assert!(matches!(
            parse_braid_word("D2", 3),
            Err(BraidError::MalformedToken(_))
        ));
        assert_eq!(parse_braid_word("1", 0), Err(BraidError::NoStrands));
    }

    #[test]
    fn murasugi_words() {
        assert_eq!(MurasugiClass::simple(Omega1, 0).unwrap().word().unwrap().letters(), &[1, 2]);
        assert_eq!(MurasugiClass::simple(Omega3, 0).unwrap().word().unwrap().letters(), &[1, 2, 1]);
        let w = MurasugiClass::new(Omega4, 1, vec![5], vec![]).unwrap().word().unwrap();
        assert_eq!(w.letters(), &[1, 2, 1, 1, 2, 1, -1, -1, -1, -1, -1]);
        let w = MurasugiClass::new(Omega6, 2, vec![2, 1], vec![1, 3]).unwrap().word().unwrap();
        assert_eq!(w.len(), 12 + 7);
        assert_eq!(&w.letters()[12..], &[-1, -1, 2, -1, 2, 2, 2]);
    }

    #[test]
    fn murasugi_arity() {
        assert!(MurasugiClass::new(Omega4, 0, vec![], vec![]).is_err());
        assert!(MurasugiClass::new(Omega5, 0, vec![1], vec![]).is_err());
        assert!(MurasugiClass::new(Omega6, 0, vec![1], vec![1, 2]).is_err());
        assert!(MurasugiClass::new(Omega6, 0, vec![], vec![]).is_err());
        assert!(MurasugiClass::new(Omega0, 0, vec![1], vec![]).is_err());
        assert_eq!(
            MurasugiClass::new(Omega4, 0, vec![0], vec![]),
            Err(BraidError::NonPositiveExponent(0))
        );
        assert_eq!(
            MurasugiClass::simple(Omega0, -1).unwrap().word(),
            Err(BraidError::NegativeTwist(-1))
        );
        assert!(MurasugiClass::extended_omega6(0, vec![0, 1], vec![1, 0]).is_ok());
    }

    #[test]
    fn mirror_and_phi() {
        let w = BraidWord::new(3, vec![1, 2, 1]).unwrap();
        assert_eq!(w.mirror().letters(), &[-1, -2, -1]);
        assert_eq!(w.phi_swap().unwrap().letters(), &[2, 1, 2]);
        let v = BraidWord::new(3, vec![-1, 2]).unwrap();
        assert_eq!(v.mirror().letters(), &[1, -2]);
        assert_eq!(v.mirror().mirror(), v);
        let u = BraidWord::new(3, vec![1, -2, 1, 1]).unwrap();
        assert_eq!(u.phi_swap().unwrap().phi_swap().unwrap(), u);
        assert_eq!(
            BraidWord::new(3, vec![-1]).unwrap().phi_swap().unwrap().letters(),
            &[-2]
        );
        assert_eq!(
            BraidWord::new(2, vec![1]).unwrap().phi_swap(),
            Err(BraidError::PhiNeedsThreeStrands(2))
        );
        assert!(BraidWord::identity(3).unwrap().mirror().is_empty());
    }

    #[test]
    fn reductions() {
        let r = MurasugiClass::simple(Omega0, -2).unwrap().reduce_to_nonneg();
        assert_eq!((r.class.kind, r.class.n), (Omega0, 2));
        assert_eq!(r.transforms, vec![Transform::Mirror]);

        let r = MurasugiClass::simple(Omega1, -1).unwrap().reduce_to_nonneg();
        assert_eq!((r.class.kind, r.class.n), (Omega2, 0));
        assert_eq!(r.transforms, vec![Transform::Mirror]);

        let r = MurasugiClass::new(Omega5, -1, vec![], vec![3]).unwrap().reduce_to_nonneg();
        assert_eq!((r.class.kind, r.class.n, r.class.p.clone()), (Omega4, 1, vec![3]));
        assert_eq!(r.transforms, vec![Transform::Mirror, Transform::Phi]);
        assert_eq!(
            r.class.word().unwrap().letters(),
            &[1, 2, 1, 1, 2, 1, -1, -1, -1]
        );

        let r = MurasugiClass::new(Omega6, -1, vec![2], vec![3]).unwrap().reduce_to_nonneg();
        assert!(r.leaves_omega6);
        assert_eq!(r.class.p, vec![0, 3]);
        assert_eq!(r.class.q, vec![2, 0]);
    }

    #[test]
    fn reduced_words_match_transformed_words_up_to_delta_squared() {
        // For Ω₄/Ω₅ the letter lists agree once the central Δ^{±2} blocks are dropped.
        let orig = MurasugiClass::new(Omega4, -1, vec![2], vec![]).unwrap();
        let r = orig.reduce_to_nonneg();
        let mut w = BraidWord::half_twist(3, -2).unwrap();
        w.push_power(1, -2).unwrap();
        let image = apply_transforms(&w, &r.transforms).unwrap();
        assert_eq!(&image.letters()[6..], &r.class.word().unwrap().letters()[6..]);
    }

    #[test]
    fn closure_permutations() {
        let delta = BraidWord::new(3, vec![1, 2, 1]).unwrap();
        let cp = delta.closure_permutation();
        assert_eq!(cp.components, 2);
        assert_eq!(cp.cycles(), vec![vec![1, 3]]);

        let full = BraidWord::half_twist(3, 2).unwrap().closure_permutation();
        assert!(full.is_identity());
        assert_eq!(full.components, 3);

        let one = BraidWord::new(2, vec![1]).unwrap().closure_permutation();
        assert_eq!(one.cycles(), vec![vec![1, 2]]);
        assert_eq!(one.components, 1);

        assert_eq!(BraidWord::identity(4).unwrap().closure_permutation().components, 4);
    }

    #[test]
    fn family_component_counts() {
        for n in 0..4 {
            let c = |k| {
                MurasugiClass::simple(k, n)
                    .unwrap()
                    .word()
                    .unwrap()
                    .closure_permutation()
                    .components
            };
            assert_eq!(c(Omega0), 3);
            assert_eq!(c(Omega1), 1);
            assert_eq!(c(Omega2), 1);
            assert_eq!(c(Omega3), 2);
        }
    }

    #[test]
    fn display_round_trips() {
        let w = parse_braid_word("D -1 2", 3).unwrap();
        assert_eq!(parse_braid_word(&w.to_string(), 3).unwrap(), w);
    }

    #[test]
    fn torus_words() {
        assert_eq!(torus_word(2).letters(), &[1, 2, 1, 2]);
        assert_eq!(torus_word(5).closure_permutation().components, 1);
        assert_eq!(torus_word(3).closure_permutation().components, 3);
    }
}
