//! Lee, Turner and Bockstein spectral sequences and maps induced on homology.

mod induced;
mod pages;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use induced::{
    bockstein_torsion_check, d_b1, d_l_star, d_t_star, nu_acyclicity, nu_star, tbv_check, HomologyBasis, InducedMap,
    MapKind, NuAcyclicityReport, TbvReport, TorsionCountMismatch,
};
pub use pages::{bockstein_pages, filtered_pages, sequence_pages, total_homology_by_i};

use crate::complex::{ComplexError, FrobeniusTheory};
use crate::diagram::PlanarDiagram;
use crate::homology::{Bigrading, FieldTable, HomologyError};
use crate::linalg::{LinalgError, RingTag};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("no spectral sequence for {theory} over {ring}")]
    NotASequence { theory: FrobeniusTheory, ring: RingTag },
    #[error("total homology needs a field")]
    NeedsField,
    #[error("{map} needs coefficients in {needs}, got {ring}")]
    MapRing {
        map: MapKind,
        needs: &'static str,
        ring: RingTag,
    },
    #[error("bases are over different fields")]
    BasisMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Which spectral sequence a page belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sequence {
    Lee(RingTag),
    Turner,
    Bockstein(u64),
}

impl Sequence {
    /// Bidegree of d_r.
    pub fn bidegree(&self, r: usize) -> Bigrading {
        let r = r as i32;
        match self {
            Sequence::Lee(_) => (1, 4 * r),
            Sequence::Turner => (1, 2 * r),
            Sequence::Bockstein(_) => (1, 0),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Lee(r) => write!(f, "LEE({})", r.label()),
            Sequence::Turner => f.write_str("TURNER"),
            Sequence::Bockstein(p) => write!(f, "BOCKSTEIN({p})"),
        }
    }
}

impl FromStr for Sequence {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "TURNER" {
            return Ok(Sequence::Turner);
        }
        let inner = |prefix: &str| s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'));
        if let Some(r) = inner("LEE(") {
            return r.parse::<RingTag>().map(Sequence::Lee).map_err(|e| e.to_string());
        }
        if let Some(p) = inner("BOCKSTEIN(") {
            return p.parse().map(Sequence::Bockstein).map_err(|_| format!("bad prime in {s}"));
        }
        Err(format!("unknown sequence {s}"))
    }
}

impl Serialize for Sequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Sequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Page r: dimensions of E_r and ranks of d_r out of each bigrading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PageJson", try_from = "PageJson")]
pub struct SpectralPage {
    pub sequence: Sequence,
    pub r: usize,
    pub bidegree: Bigrading,
    pub table: FieldTable,
    pub ranks: BTreeMap<Bigrading, usize>,
}

#[derive(Serialize, Deserialize)]
struct RankJson {
    i: i32,
    j: i32,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
struct PageJson {
    sequence: Sequence,
    r: usize,
    bidegree: [i32; 2],
    table: FieldTable,
    ranks: Vec<RankJson>,
}

impl From<SpectralPage> for PageJson {
    fn from(p: SpectralPage) -> Self {
        PageJson {
            sequence: p.sequence,
            r: p.r,
            bidegree: [p.bidegree.0, p.bidegree.1],
            table: p.table,
            ranks: p.ranks.into_iter().map(|((i, j), rank)| RankJson { i, j, rank }).collect(),
        }
    }
}

impl TryFrom<PageJson> for SpectralPage {
    type Error = String;
    fn try_from(p: PageJson) -> Result<Self, String> {
        if p.bidegree != [p.sequence.bidegree(p.r).0, p.sequence.bidegree(p.r).1] {
            return Err(format!("bidegree {:?} does not fit {} page {}", p.bidegree, p.sequence, p.r));
        }
        Ok(SpectralPage {
            sequence: p.sequence,
            r: p.r,
            bidegree: (p.bidegree[0], p.bidegree[1]),
            table: p.table,
            ranks: p.ranks.into_iter().map(|x| ((x.i, x.j), x.rank)).collect(),
        })
    }
}

impl SpectralPage {
    pub fn new(sequence: Sequence, r: usize, table: FieldTable, ranks: BTreeMap<Bigrading, usize>) -> Self {
        Self {
            sequence,
            r,
            bidegree: sequence.bidegree(r),
            table,
            ranks,
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_terminal(&self) -> bool {
        self.ranks.is_empty()
    }

    /// E_{r+1} from the rank recursion.
    pub fn next_table(&self) -> FieldTable {
        let (di, dj) = self.bidegree;
        let mut dims = BTreeMap::new();
        for ((i, j), d) in self.table.iter() {
            let out = self.ranks.get(&(i, j)).copied().unwrap_or(0);
            let inc = self.ranks.get(&(i - di, j - dj)).copied().unwrap_or(0);
            dims.insert((i, j), d - out - inc);
        }
        FieldTable::from_dims(self.table.field, dims)
    }

    /// Positions where d_r lands outside the support of E_r, or is too big for it.
    pub fn bidegree_violations(&self) -> Vec<Bigrading> {
        let (di, dj) = self.bidegree;
        self.ranks
            .iter()
            .filter(|(&(i, j), &r)| r > self.table.get(i, j) || r > self.table.get(i + di, j + dj))
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Checks that consecutive pages satisfy dim E_{r+1} = dim E_r − rank out − rank in.
pub fn pages_consistent(pages: &[SpectralPage]) -> bool {
    pages.windows(2).all(|w| w[0].next_table() == w[1].table) && pages.iter().all(|p| p.bidegree_violations().is_empty())
}

/// Predicted per-i dimensions of Lee homology (equivalently filtered Bar-Natan
/// homology): one generator per subset E of components, at 2·Σ lk(E, Eᶜ).
pub fn infinity_predictions(d: &PlanarDiagram) -> BTreeMap<i32, usize> {
    let lk = d.linking_numbers();
    let k = d.components;
    let mut out = BTreeMap::new();
    for mask in 0u64..(1 << k) {
        let mut s = 0i64;
        for l in 0..k {
            for m in 0..k {
                if mask >> l & 1 == 1 && mask >> m & 1 == 0 {
                    s += lk[l][m];
                }
            }
        }
        *out.entry((2 * s) as i32).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid_word;
    use crate::complex::CubeComplex;
    use crate::diagram::{braid_closure, SignConvention};
    use crate::homology::{field_homology, integral_homology};

    fn diagram(text: &str, s: usize) -> PlanarDiagram {
        braid_closure(&parse_braid_word(text, s).unwrap(), SignConvention::Standard)
    }

    #[test]
    fn predictions() {
        assert_eq!(infinity_predictions(&diagram("", 1)), BTreeMap::from([(0, 2)]));
        assert_eq!(infinity_predictions(&diagram("D", 3)), BTreeMap::from([(0, 2), (-2, 2)]));
        assert_eq!(infinity_predictions(&diagram("D^2", 3)), BTreeMap::from([(0, 2), (-4, 6)]));
    }

    #[test]
    fn lee_on_trefoil() {
        let d = diagram("1 2 1 2", 3);
        let pages = sequence_pages(&d, FrobeniusTheory::Lee, RingTag::Rationals).unwrap();
        assert_eq!(pages[0].table.total(), 4);
        assert_eq!(pages[0].ranks, BTreeMap::from([((-3, -9), 1)]));
        assert_eq!(pages[0].bidegree, (1, 4));
        assert_eq!(pages.last().unwrap().table.total(), 2);
        assert!(pages_consistent(&pages));
        let kh = CubeComplex::build(&d, FrobeniusTheory::Khovanov, RingTag::Rationals).unwrap();
        assert_eq!(pages[0].table, field_homology(&kh, RingTag::Rationals).unwrap());
    }

    #[test]
    fn turner_on_full_twist() {
        let d = diagram("D^2", 3);
        let pages = sequence_pages(&d, FrobeniusTheory::Turner, RingTag::ModP(2)).unwrap();
        assert!(pages_consistent(&pages));
        assert_eq!(pages.last().unwrap().table.totals_by_i(), BTreeMap::from([(0, 2), (-4, 6)]));
        let bn = CubeComplex::build(&d, FrobeniusTheory::BarNatanF2, RingTag::ModP(2)).unwrap();
        assert_eq!(total_homology_by_i(&bn).unwrap(), BTreeMap::from([(0, 2), (-4, 6)]));
    }

    #[test]
    fn bockstein_on_trefoil() {
        let d = diagram("1 2 1 2", 3);
        let c = CubeComplex::build(&d, FrobeniusTheory::Khovanov, RingTag::Integers).unwrap();
        let pages = bockstein_pages(&c, 2).unwrap();
        assert_eq!(pages[0].table.total(), 6);
        assert_eq!(pages[0].total_rank(), 1);
        assert_eq!(pages.len(), 2);
        assert_eq!(pages[1].table.total(), 4);
        let z = integral_homology(&c).unwrap();
        assert_eq!(pages[1].table, z.field_table(RingTag::Rationals).with_field(RingTag::ModP(2)));
        assert!(pages_consistent(&pages));
        let three = bockstein_pages(&c, 3).unwrap();
        assert_eq!(three.len(), 1);
    }

    #[test]
    fn page_json() {
        let d = diagram("1 2 1 2", 3);
        let pages = sequence_pages(&d, FrobeniusTheory::Lee, RingTag::Rationals).unwrap();
        let s = serde_json::to_string(&pages[0]).unwrap();
        assert!(s.starts_with(r#"{"sequence":"LEE(Q)","r":1,"bidegree":[1,4],"table":{"field":"Q""#), "{s}");
        let back: SpectralPage = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pages[0]);
        assert_eq!("BOCKSTEIN(3)".parse::<Sequence>().unwrap(), Sequence::Bockstein(3));
    }
}
