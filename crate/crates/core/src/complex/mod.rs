//! The cube of resolutions and its chain complexes.

mod frobenius;
mod reduction;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{PlanarDiagram, UnionFind, BL, BR, TL, TR};
use crate::linalg::{RingTag, SparseMat};

pub use frobenius::{FrobeniusTheory, Part};
pub use reduction::{CancelStep, ReducibleComplex};

/// Beyond this the vertex count alone is unreasonable.
pub const MAX_CROSSINGS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("{theory} over {ring}: {hint}")]
    RingMismatch {
        theory: FrobeniusTheory,
        ring: RingTag,
        hint: &'static str,
    },
    #[error("{0} crossings exceed the supported maximum of {MAX_CROSSINGS}")]
    TooManyCrossings(usize),
    #[error("a state has {0} circles; at most 63 are supported")]
    TooManyCircles(usize),
    #[error("{0} generators exceed the 32-bit index space")]
    TooManyGenerators(u64),
    #[error("the vertical map needs Khovanov theory over Z2")]
    NuNeedsZ2,
}

#[derive(Clone, Copy, Debug)]
enum EdgeKind {
    /// Circles `a`, `b` of the source merge into circle `m` of the target.
    Merge { a: u8, b: u8, m: u8 },
    /// Circle `a` of the source splits into circles `b`, `c` of the target.
    Split { a: u8, b: u8, c: u8 },
}

/// One edge of the cube, with the relabelling of untouched circles.
#[derive(Clone, Debug)]
struct EdgeMap {
    target: usize,
    sign: i64,
    kind: EdgeKind,
    keep: Vec<(u8, u8)>,
}

/// Memory and size figures for a built cube.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeStats {
    pub crossings: usize,
    pub vertices: usize,
    pub generators: u64,
    pub blocks: usize,
    pub largest_block: usize,
    pub bytes: usize,
}

/// Bigraded free module on (vertex, labelling) pairs with its differentials.
///
/// Generators are numbered lexicographically by (vertex as integer, label as integer);
/// bit r of a vertex is the choice at active crossing r, bit c of a label marks X on circle c.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    diagram: PlanarDiagram,
    theory: FrobeniusTheory,
    ring: RingTag,
    n: usize,
    n_plus: i32,
    n_minus: i32,
    arcs: usize,
    circles: Vec<u8>,
    arc_circle: Vec<u8>,
    reps: Vec<u8>,
    max_circles: usize,
    offsets: Vec<u64>,
    blocks: BTreeMap<(i32, i32), Vec<u32>>,
    position: Vec<u32>,
}

impl CubeComplex {
    pub fn build(diagram: &PlanarDiagram, theory: FrobeniusTheory, ring: RingTag) -> Result<Self, ComplexError> {
        theory.check_ring(ring)?;
        let n = diagram.crossing_count();
        if n > MAX_CROSSINGS {
            return Err(ComplexError::TooManyCrossings(n));
        }
        let arcs = diagram.arcs.len();
        let vertices = 1usize << n;
        let mut circles = vec![0u8; vertices];
        let mut arc_circle = vec![0u8; vertices * arcs];
        let mut uf = UnionFind::new(arcs);
        let mut max_circles = 0;
        for v in 0..vertices {
            let c = diagram.resolve_bits_into(v as u64, &mut uf, &mut arc_circle[v * arcs..(v + 1) * arcs]);
            if c > 63 {
                return Err(ComplexError::TooManyCircles(c));
            }
            circles[v] = c as u8;
            max_circles = max_circles.max(c);
        }
        let mut reps = vec![0u8; vertices * max_circles];
        for v in 0..vertices {
            let mut seen = 0u64;
            for a in 0..arcs {
                let c = arc_circle[v * arcs + a] as usize;
                if seen >> c & 1 == 0 {
                    seen |= 1 << c;
                    reps[v * max_circles + c] = a as u8;
                }
            }
        }
        let mut offsets = Vec::with_capacity(vertices + 1);
        let mut total = 0u64;
        for &c in &circles {
            offsets.push(total);
            total += 1u64 << c;
        }
        offsets.push(total);
        if total > u64::from(u32::MAX) {
            return Err(ComplexError::TooManyGenerators(total));
        }
        let mut cube = Self {
            diagram: diagram.clone(),
            theory,
            ring,
            n,
            n_plus: diagram.n_plus as i32,
            n_minus: diagram.n_minus as i32,
            arcs,
            circles,
            arc_circle,
            reps,
            max_circles,
            offsets,
            blocks: BTreeMap::new(),
            position: vec![0; total as usize],
        };
        let mut blocks: BTreeMap<(i32, i32), Vec<u32>> = BTreeMap::new();
        for g in 0..total as usize {
            let gr = cube.grading(g);
            let list = blocks.entry(gr).or_default();
            cube.position[g] = list.len() as u32;
            list.push(g as u32);
        }
        cube.blocks = blocks;
        Ok(cube)
    }

    pub fn diagram(&self) -> &PlanarDiagram {
        &self.diagram
    }

    pub fn theory(&self) -> FrobeniusTheory {
        self.theory
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    /// Same cube, different theory or ring.
    pub fn with_theory(&self, theory: FrobeniusTheory, ring: RingTag) -> Result<Self, ComplexError> {
        theory.check_ring(ring)?;
        let mut c = self.clone();
        c.theory = theory;
        c.ring = ring;
        Ok(c)
    }

    pub fn crossings(&self) -> usize {
        self.n
    }

    pub fn n_plus(&self) -> i32 {
        self.n_plus
    }

    pub fn n_minus(&self) -> i32 {
        self.n_minus
    }

    pub fn vertex_count(&self) -> usize {
        self.circles.len()
    }

    pub fn circles_at(&self, vertex: usize) -> usize {
        self.circles[vertex] as usize
    }

    pub fn generator_count(&self) -> usize {
        self.position.len()
    }

    /// (vertex, label) of a generator.
    pub fn decode(&self, g: usize) -> (usize, u64) {
        let v = self.offsets.partition_point(|&o| o <= g as u64) - 1;
        (v, g as u64 - self.offsets[v])
    }

    pub fn encode(&self, vertex: usize, label: u64) -> usize {
        (self.offsets[vertex] + label) as usize
    }

    pub fn grading_of(&self, vertex: usize, label: u64) -> (i32, i32) {
        let h = vertex.count_ones() as i32;
        let c = self.circles[vertex] as i32;
        let x = label.count_ones() as i32;
        (h - self.n_minus, c - 2 * x + h + self.n_plus - 2 * self.n_minus)
    }

    pub fn grading(&self, g: usize) -> (i32, i32) {
        let (v, l) = self.decode(g);
        self.grading_of(v, l)
    }

    /// Generators of bigrading (i,j) in ascending order.
    pub fn block(&self, i: i32, j: i32) -> &[u32] {
        self.blocks.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    pub fn bigradings(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.blocks.keys().copied()
    }

    /// Index of a generator inside its bigrading block.
    pub fn position(&self, g: usize) -> usize {
        self.position[g] as usize
    }

    /// Distinct polynomial gradings, ascending.
    pub fn j_values(&self) -> Vec<i32> {
        let mut js: Vec<i32> = self.blocks.keys().map(|k| k.1).collect();
        js.sort_unstable();
        js.dedup();
        js
    }

    pub fn stats(&self) -> CubeStats {
        CubeStats {
            crossings: self.n,
            vertices: self.circles.len(),
            generators: self.position.len() as u64,
            blocks: self.blocks.len(),
            largest_block: self.blocks.values().map(Vec::len).max().unwrap_or(0),
            bytes: self.circles.len()
                + self.arc_circle.len()
                + self.reps.len()
                + self.offsets.len() * 8
                + self.position.len() * 8,
        }
    }

    fn edge_map(&self, v: usize, r: usize) -> EdgeMap {
        let target = v | 1 << r;
        let sign = if (v & ((1 << r) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
        let slots = self.diagram.active_crossing(r).slots;
        let src = &self.arc_circle[v * self.arcs..(v + 1) * self.arcs];
        let dst = &self.arc_circle[target * self.arcs..(target + 1) * self.arcs];
        let (cs, ct) = (self.circles[v], self.circles[target]);
        let pair = |side: &[u8]| {
            let a = side[slots[BL]];
            let b = [slots[BR], slots[TL], slots[TR]]
                .iter()
                .map(|&s| side[s])
                .find(|&x| x != a)
                .expect("two circles meet at the crossing");
            (a.min(b), a.max(b))
        };
        let (kind, touched) = if ct < cs {
            let (a, b) = pair(src);
            (EdgeKind::Merge { a, b, m: dst[slots[BL]] }, [a, b])
        } else {
            let (b, c) = pair(dst);
            let a = src[slots[BL]];
            (EdgeKind::Split { a, b, c }, [a, a])
        };
        let reps = &self.reps[v * self.max_circles..];
        let keep = (0..cs)
            .filter(|x| !touched.contains(x))
            .map(|x| (x, dst[reps[x as usize] as usize]))
            .collect();
        EdgeMap {
            target,
            sign,
            kind,
            keep,
        }
    }

    fn apply(em: &EdgeMap, label: u64, part: Part, mut f: impl FnMut(u64, i64)) {
        let mut base = 0u64;
        for &(x, y) in &em.keep {
            base |= (label >> x & 1) << y;
        }
        match em.kind {
            EdgeKind::Merge { a, b, m } => {
                if let Some(out) = part.multiply(label >> a & 1 == 1, label >> b & 1 == 1) {
                    f(base | u64::from(out) << m, em.sign);
                }
            }
            EdgeKind::Split { a, b, c } => {
                for &(l, r) in part.comultiply(label >> a & 1 == 1) {
                    f(base | u64::from(l) << b | u64::from(r) << c, em.sign);
                }
            }
        }
    }

    /// Calls `f(target, coefficient)` for every term of `part` applied to generator `g`.
    pub fn for_each_term(&self, g: usize, part: Part, mut f: impl FnMut(usize, i64)) {
        let (v, label) = self.decode(g);
        for r in 0..self.n {
            if v >> r & 1 == 1 {
                continue;
            }
            let em = self.edge_map(v, r);
            let base = self.offsets[em.target];
            Self::apply(&em, label, part, |l, s| f((base + l) as usize, s));
        }
    }

    /// Terms of one piece of the differential on `g`, sorted by target.
    pub fn component(&self, g: usize, part: Part) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        self.for_each_term(g, part, |t, s| out.push((t, s)));
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// Terms of the theory's total differential on `g`.
    pub fn differential(&self, g: usize) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for &part in self.theory.parts() {
            self.for_each_term(g, part, |t, s| out.push((t, s)));
        }
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// Matrix of `part` from bigrading (i,j) to (i+1, j+jump), rows and columns in block order.
    pub fn component_block(&self, part: Part, i: i32, j: i32) -> SparseMat {
        let src = self.block(i, j);
        let dst = self.block(i + 1, j + part.jump());
        let mut m = SparseMat::new(dst.len(), src.len());
        for (col, &g) in src.iter().enumerate() {
            self.for_each_term(g as usize, part, |t, s| {
                m.add_to(self.position[t] as usize, col, &BigInt::from(s));
            });
        }
        m
    }

    /// The Khovanov block for Khovanov theory; for the filtered theories the
    /// perturbation block, landing in (i+1, j+jump).
    pub fn differential_block(&self, i: i32, j: i32) -> SparseMat {
        let part = *self.theory.parts().last().expect("nonempty");
        self.component_block(part, i, j)
    }

    /// ν on generator `g`: every way of turning one X into 1.
    pub fn nu_terms(&self, g: usize) -> Vec<usize> {
        let (v, label) = self.decode(g);
        let base = self.offsets[v];
        (0..self.circles[v])
            .filter(|c| label >> c & 1 == 1)
            .map(|c| (base + (label & !(1 << c))) as usize)
            .collect()
    }

    /// Matrices of ν from (i,j) to (i,j+2); needs Khovanov theory over ℤ₂.
    pub fn nu_chain_map(&self) -> Result<BTreeMap<(i32, i32), SparseMat>, ComplexError> {
        if self.theory != FrobeniusTheory::Khovanov || self.ring != RingTag::ModP(2) {
            return Err(ComplexError::NuNeedsZ2);
        }
        let mut out = BTreeMap::new();
        for (&(i, j), src) in &self.blocks {
            let dst = self.block(i, j + 2);
            let mut m = SparseMat::new(dst.len(), src.len());
            for (col, &g) in src.iter().enumerate() {
                for t in self.nu_terms(g as usize) {
                    m.add_to(self.position[t] as usize, col, &BigInt::from(1));
                }
            }
            out.insert((i, j), m);
        }
        Ok(out)
    }

    /// Fills a reducible complex with the given parts on the generators of `gens`
    /// (global indices, any order); terms leaving the set are dropped.
    pub fn reducible<R: crate::linalg::Ring>(
        &self,
        ring: R,
        gens: &[u32],
        parts: &[Part],
    ) -> ReducibleComplex<R> {
        let mut local = std::collections::HashMap::with_capacity(gens.len());
        for (k, &g) in gens.iter().enumerate() {
            local.insert(g, k as u32);
        }
        let gradings = gens.iter().map(|&g| self.grading(g as usize)).collect();
        let mut rc = ReducibleComplex::new(ring, gradings);
        for (k, &g) in gens.iter().enumerate() {
            for &part in parts {
                self.for_each_term(g as usize, part, |t, s| {
                    if let Some(&lt) = local.get(&(t as u32)) {
                        let c = rc.ring().from_i64(s);
                        rc.add_entry(k as u32, lt, &c);
                    }
                });
            }
        }
        rc
    }

    /// All generators with polynomial grading `j`, by homological grading then block order.
    pub fn generators_in_j(&self, j: i32) -> Vec<u32> {
        self.blocks
            .iter()
            .filter(|(k, _)| k.1 == j)
            .flat_map(|(_, v)| v.iter().copied())
            .collect()
    }

    /// Khovanov-part reducible complex on one polynomial grading, indexed
    /// without a hash map (block positions are contiguous).
    pub fn reducible_in_j<R: crate::linalg::Ring>(&self, ring: R, j: i32) -> ReducibleComplex<R> {
        let mut start: BTreeMap<i32, u32> = BTreeMap::new();
        let mut gens = Vec::new();
        for (&(i, jj), list) in &self.blocks {
            if jj == j {
                start.insert(i, gens.len() as u32);
                gens.extend_from_slice(list);
            }
        }
        let gradings = gens.iter().map(|&g| self.grading(g as usize)).collect();
        let mut rc = ReducibleComplex::new(ring, gradings);
        let one = rc.ring().one();
        let minus = rc.ring().neg(&one);
        for (k, &g) in gens.iter().enumerate() {
            let (i, _) = self.grading(g as usize);
            let Some(&base) = start.get(&(i + 1)) else { continue };
            self.for_each_term(g as usize, Part::Khovanov, |t, s| {
                let lt = base + self.position[t];
                rc.add_entry(k as u32, lt, if s > 0 { &one } else { &minus });
            });
        }
        rc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid_word;
    use crate::diagram::{braid_closure, SignConvention};
    use num_traits::Zero;

    fn cube(text: &str, s: usize, t: FrobeniusTheory, ring: RingTag) -> CubeComplex {
        let d = braid_closure(&parse_braid_word(text, s).unwrap(), SignConvention::Standard);
        CubeComplex::build(&d, t, ring).unwrap()
    }

    fn compose(c: &CubeComplex, p: Part, q: Part, g: usize) -> BTreeMap<usize, i64> {
        let mut acc = BTreeMap::new();
        for (t, s) in c.component(g, p) {
            for (u, s2) in c.component(t, q) {
                *acc.entry(u).or_insert(0) += s * s2;
            }
        }
        acc
    }

    #[test]
    fn unknot_generators() {
        let c = cube("", 1, FrobeniusTheory::Khovanov, RingTag::Integers);
        assert_eq!(c.generator_count(), 2);
        assert_eq!(c.block(0, 1).len(), 1);
        assert_eq!(c.block(0, -1).len(), 1);
        assert!(c.differential(0).is_empty());
        assert!(c.differential_block(0, 1).is_zero());
    }

    #[test]
    fn single_crossing_gradings() {
        let c = cube("1", 2, FrobeniusTheory::Khovanov, RingTag::Integers);
        // n_minus = 1: vertex 0 has one circle, vertex 1 has two.
        assert_eq!(c.generator_count(), 6);
        let mut c0: Vec<i32> = (0..6).filter(|&g| c.grading(g).0 == -1).map(|g| c.grading(g).1).collect();
        let mut c1: Vec<i32> = (0..6).filter(|&g| c.grading(g).0 == 0).map(|g| c.grading(g).1).collect();
        c0.sort();
        c1.sort();
        assert_eq!(c0, vec![-3, -1]);
        assert_eq!(c1, vec![-3, -1, -1, 1]);
        // Vertex 0 splits: 1 ↦ 1⊗X + X⊗1.
        let m = c.differential_block(-1, -1);
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn flipped_single_crossing_merges() {
        let d = braid_closure(&parse_braid_word("1", 2).unwrap(), SignConvention::Flipped);
        let c = CubeComplex::build(&d, FrobeniusTheory::Khovanov, RingTag::Integers).unwrap();
        // The middle generators 1⊗X, X⊗1 at (0,1) both map to X at (1,1).
        let m = c.differential_block(0, 1);
        assert_eq!((m.rows(), m.cols()), (1, 2));
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn generator_count_is_state_sum() {
        let c = cube("D^2", 3, FrobeniusTheory::Khovanov, RingTag::Integers);
        let expect: usize = (0..c.vertex_count()).map(|v| 1usize << c.circles_at(v)).sum();
        assert_eq!(c.generator_count(), expect);
        let blocks: usize = c.bigradings().map(|(i, j)| c.block(i, j).len()).sum();
        assert_eq!(blocks, expect);
    }

    #[test]
    fn d_squared_vanishes_and_parts_anticommute() {
        for (text, s) in [("D^2", 3), ("1 -2 1 -2", 3), ("1 2 -3 2 1", 4)] {
            let c = cube(text, s, FrobeniusTheory::Khovanov, RingTag::Integers);
            for g in 0..c.generator_count() {
                let sum = |p: Part, q: Part| {
                    let mut acc = compose(&c, p, q, g);
                    if p != q {
                        for (u, v) in compose(&c, q, p, g) {
                            *acc.entry(u).or_insert(0) += v;
                        }
                    }
                    acc
                };
                let exact = |m: BTreeMap<usize, i64>| m.values().all(|v| v.is_zero());
                let even = |m: BTreeMap<usize, i64>| m.values().all(|v| v % 2 == 0);
                assert!(exact(sum(Part::Khovanov, Part::Khovanov)), "{text}: d² at {g}");
                assert!(exact(sum(Part::Lee, Part::Lee)), "{text}: d_L² at {g}");
                assert!(exact(sum(Part::Khovanov, Part::Lee)), "{text}: d d_L + d_L d at {g}");
                assert!(even(sum(Part::Turner, Part::Turner)), "{text}: d_T² at {g}");
                assert!(even(sum(Part::Khovanov, Part::Turner)), "{text}: d d_T + d_T d at {g}");
            }
        }
    }

    #[test]
    fn bidegrees_are_exact() {
        let c = cube("1 2 1 2", 3, FrobeniusTheory::Khovanov, RingTag::Integers);
        for g in 0..c.generator_count() {
            let (i, j) = c.grading(g);
            for part in [Part::Khovanov, Part::Turner, Part::Lee] {
                for (t, s) in c.component(g, part) {
                    assert_eq!(c.grading(t), (i + 1, j + part.jump()));
                    assert!(s == 1 || s == -1);
                }
            }
            for t in c.nu_terms(g) {
                assert_eq!(c.grading(t), (i, j + 2));
            }
        }
    }

    #[test]
    fn nu_examples() {
        let c = cube("", 3, FrobeniusTheory::Khovanov, RingTag::ModP(2));
        // X⊗X⊗X is label 0b111.
        let g = c.encode(0, 0b111);
        let mut t = c.nu_terms(g);
        t.sort();
        assert_eq!(t, vec![c.encode(0, 0b011), c.encode(0, 0b101), c.encode(0, 0b110)]);
        let c2 = cube("", 2, FrobeniusTheory::Khovanov, RingTag::ModP(2));
        assert!(c2.nu_terms(c2.encode(0, 0)).is_empty());
        assert!(cube("", 1, FrobeniusTheory::Khovanov, RingTag::Integers).nu_chain_map().is_err());
    }

    #[test]
    fn nu_is_a_square_zero_chain_map_mod_two() {
        let c = cube("D", 3, FrobeniusTheory::Khovanov, RingTag::ModP(2));
        for g in 0..c.generator_count() {
            let mut nn: BTreeMap<usize, i64> = BTreeMap::new();
            for t in c.nu_terms(g) {
                for u in c.nu_terms(t) {
                    *nn.entry(u).or_insert(0) += 1;
                }
            }
            assert!(nn.values().all(|v| v % 2 == 0));
            let mut comm: BTreeMap<usize, i64> = BTreeMap::new();
            for t in c.nu_terms(g) {
                for (u, s) in c.component(t, Part::Khovanov) {
                    *comm.entry(u).or_insert(0) += s;
                }
            }
            for (t, s) in c.component(g, Part::Khovanov) {
                for u in c.nu_terms(t) {
                    *comm.entry(u).or_insert(0) += s;
                }
            }
            assert!(comm.values().all(|v| v % 2 == 0));
        }
    }

    #[test]
    fn theory_checks_at_build() {
        let d = braid_closure(&parse_braid_word("1", 2).unwrap(), SignConvention::Standard);
        assert!(CubeComplex::build(&d, FrobeniusTheory::Lee, RingTag::ModP(2)).is_err());
        assert!(CubeComplex::build(&d, FrobeniusTheory::Turner, RingTag::ModP(2)).is_ok());
    }
}
