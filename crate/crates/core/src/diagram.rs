//! Oriented planar diagrams of braid closures and their Kauffman states.
//!
//! The closure of a word with `L` letters on `s` strands has nodes `(t, p)` for
//! levels `t < L` and positions `p < s`; level `L` is glued back to level 0.
//! Letter `t` acting on positions `k, k+1` owns four slots:
//! bottom-left `(t,k)`, bottom-right `(t,k+1)`, top-left `(t+1,k)`, top-right `(t+1,k+1)`.
//! One strand runs bottom-left to top-right, the other bottom-right to top-left.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::BraidWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("vertex has {got} entries but the diagram has {expected} crossings")]
    VertexLength { expected: usize, got: usize },
    #[error("crossing {index} out of range ({count} active crossings)")]
    CrossingOutOfRange { index: usize, count: usize },
    #[error("too many crossings ({0}) for a bit-packed vertex")]
    TooManyCrossings(usize),
}

/// Which crossing picture a positive letter produces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Letter k>0 closes to a negative crossing.
    #[default]
    Standard,
    /// Letter k>0 closes to a positive crossing.
    Flipped,
}

impl SignConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignConvention::Standard => "standard",
            SignConvention::Flipped => "flipped",
        }
    }
}

impl std::str::FromStr for SignConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(SignConvention::Standard),
            "flipped" => Ok(SignConvention::Flipped),
            other => Err(format!("unknown sign convention `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    /// Joins bottom-left to top-left and bottom-right to top-right.
    Vertical,
    /// Joins the two bottom slots and the two top slots.
    Horizontal,
}

pub const BL: usize = 0;
pub const BR: usize = 1;
pub const TL: usize = 2;
pub const TR: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    /// Braid letter that produced the crossing.
    pub letter: i32,
    pub level: usize,
    /// Arc indices at bottom-left, bottom-right, top-left, top-right.
    pub slots: [usize; 4],
    /// Sign with every strand oriented upward.
    pub base_sign: i8,
    /// Sign under the diagram's actual orientation.
    pub sign: i8,
    /// Set for crossings that have already been smoothed away.
    pub fixed: Option<Smoothing>,
}

impl Crossing {
    /// The 0-smoothing: vertical for positive crossing pictures, horizontal otherwise.
    pub fn zero_smoothing(&self) -> Smoothing {
        if self.base_sign > 0 {
            Smoothing::Vertical
        } else {
            Smoothing::Horizontal
        }
    }

    pub fn smoothing(&self, bit: bool) -> Smoothing {
        match (self.zero_smoothing(), bit) {
            (s, false) => s,
            (Smoothing::Vertical, true) => Smoothing::Horizontal,
            (Smoothing::Horizontal, true) => Smoothing::Vertical,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub component: usize,
    /// Travels upward under the chosen orientation.
    pub upward: bool,
    /// True for positions no crossing ever touches.
    pub free_loop: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarDiagram {
    pub strands: usize,
    pub convention: SignConvention,
    pub arcs: Vec<Arc>,
    pub crossings: Vec<Crossing>,
    /// Indices into `crossings` of the crossings that are still crossings.
    pub active: Vec<usize>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub components: usize,
}

/// Union-find with path compression and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.size.fill(1);
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// A complete smoothing of every active crossing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KauffmanState {
    pub vertex: Vec<bool>,
    pub circles: usize,
    /// Circle index of each arc; circles are numbered by their smallest arc.
    pub arc_circle: Vec<usize>,
}

impl KauffmanState {
    pub fn height(&self) -> usize {
        self.vertex.iter().filter(|&&b| b).count()
    }
}

/// The oriented closure of `w`, every strand running upward.
pub fn braid_closure(w: &BraidWord, convention: SignConvention) -> PlanarDiagram {
    let s = w.strands();
    let letters = w.letters();
    let l = letters.len();
    if l == 0 {
        let arcs = (0..s)
            .map(|c| Arc {
                component: c,
                upward: true,
                free_loop: true,
            })
            .collect();
        return PlanarDiagram {
            strands: s,
            convention,
            arcs,
            crossings: Vec::new(),
            active: Vec::new(),
            n_plus: 0,
            n_minus: 0,
            components: s,
        };
    }
    let node = |t: usize, p: usize| (t % l) * s + p;
    let mut uf = UnionFind::new(l * s);
    for (t, &letter) in letters.iter().enumerate() {
        let k = letter.unsigned_abs() as usize - 1;
        for q in (0..s).filter(|&q| q != k && q != k + 1) {
            uf.union(node(t, q), node(t + 1, q));
        }
    }
    // Arcs numbered by their minimal node.
    let mut arc_of_root = vec![usize::MAX; l * s];
    let mut arc_of_node = vec![0; l * s];
    let mut arc_count = 0;
    for x in 0..l * s {
        let r = uf.find(x);
        if arc_of_root[r] == usize::MAX {
            arc_of_root[r] = arc_count;
            arc_count += 1;
        }
        arc_of_node[x] = arc_of_root[r];
    }
    let mut free = vec![true; arc_count];
    let crossings: Vec<Crossing> = letters
        .iter()
        .enumerate()
        .map(|(t, &letter)| {
            let k = letter.unsigned_abs() as usize - 1;
            let slots = [
                arc_of_node[node(t, k)],
                arc_of_node[node(t, k + 1)],
                arc_of_node[node(t + 1, k)],
                arc_of_node[node(t + 1, k + 1)],
            ];
            for &a in &slots {
                free[a] = false;
            }
            let positive_picture = match convention {
                SignConvention::Standard => letter < 0,
                SignConvention::Flipped => letter > 0,
            };
            let base_sign = if positive_picture { 1 } else { -1 };
            Crossing {
                letter,
                level: t,
                slots,
                base_sign,
                sign: base_sign,
                fixed: None,
            }
        })
        .collect();
    let arcs = free
        .into_iter()
        .map(|free_loop| Arc {
            component: 0,
            upward: true,
            free_loop,
        })
        .collect();
    let mut d = PlanarDiagram {
        strands: s,
        convention,
        arcs,
        active: (0..crossings.len()).collect(),
        crossings,
        n_plus: 0,
        n_minus: 0,
        components: 0,
    };
    d.orient();
    d
}

impl PlanarDiagram {
    /// Number of crossings that still carry a 0/1 choice.
    pub fn crossing_count(&self) -> usize {
        self.active.len()
    }

    pub fn active_crossing(&self, index: usize) -> &Crossing {
        &self.crossings[self.active[index]]
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Recomputes orientation, components and signs from the fixed smoothings.
    fn orient(&mut self) {
        let n = self.arcs.len();
        // (other arc, same direction?)
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        let mut link = |a: usize, b: usize, same: bool| {
            adj[a].push((b, same));
            adj[b].push((a, same));
        };
        for c in &self.crossings {
            let s = c.slots;
            match c.fixed {
                None => {
                    link(s[BL], s[TR], true);
                    link(s[BR], s[TL], true);
                }
                Some(Smoothing::Vertical) => {
                    link(s[BL], s[TL], true);
                    link(s[BR], s[TR], true);
                }
                Some(Smoothing::Horizontal) => {
                    link(s[BL], s[BR], false);
                    link(s[TL], s[TR], false);
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut up = vec![true; n];
        let mut components = 0;
        for root in 0..n {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = components;
            let mut stack = vec![root];
            while let Some(a) = stack.pop() {
                for &(b, same) in &adj[a] {
                    if comp[b] == usize::MAX {
                        comp[b] = components;
                        up[b] = if same { up[a] } else { !up[a] };
                        stack.push(b);
                    }
                }
            }
            components += 1;
        }
        for (a, arc) in self.arcs.iter_mut().enumerate() {
            arc.component = comp[a];
            arc.upward = up[a];
        }
        self.components = components;
        let (mut plus, mut minus) = (0, 0);
        for &ci in &self.active {
            let c = &mut self.crossings[ci];
            let d1 = if up[c.slots[BL]] { 1 } else { -1 };
            let d2 = if up[c.slots[BR]] { 1 } else { -1 };
            c.sign = c.base_sign * d1 * d2;
            if c.sign > 0 {
                plus += 1;
            } else {
                minus += 1;
            }
        }
        self.n_plus = plus;
        self.n_minus = minus;
    }

    /// The diagram with active crossing `index` replaced by its `bit`-smoothing,
    /// re-oriented consistently with the surviving strands.
    pub fn smoothed(&self, index: usize, bit: bool) -> Result<PlanarDiagram, DiagramError> {
        if index >= self.active.len() {
            return Err(DiagramError::CrossingOutOfRange {
                index,
                count: self.active.len(),
            });
        }
        let mut d = self.clone();
        let ci = d.active.remove(index);
        let smoothing = d.crossings[ci].smoothing(bit);
        d.crossings[ci].fixed = Some(smoothing);
        d.orient();
        Ok(d)
    }

    /// Fills `out[arc]` with canonical circle ids for the vertex encoded in `bits`
    /// (bit r = choice at active crossing r) and returns the circle count.
    pub fn resolve_bits_into(&self, bits: u64, uf: &mut UnionFind, out: &mut [u8]) -> usize {
        uf.reset();
        for c in &self.crossings {
            if let Some(s) = c.fixed {
                Self::join(uf, c, s);
            }
        }
        for (r, &ci) in self.active.iter().enumerate() {
            let c = &self.crossings[ci];
            Self::join(uf, c, c.smoothing(bits >> r & 1 == 1));
        }
        let mut label = vec![u8::MAX; self.arcs.len()];
        let mut count = 0usize;
        for a in 0..self.arcs.len() {
            let r = uf.find(a);
            if label[r] == u8::MAX {
                label[r] = count as u8;
                count += 1;
            }
            out[a] = label[r];
        }
        count
    }

    fn join(uf: &mut UnionFind, c: &Crossing, s: Smoothing) {
        let sl = c.slots;
        match s {
            Smoothing::Vertical => {
                uf.union(sl[BL], sl[TL]);
                uf.union(sl[BR], sl[TR]);
            }
            Smoothing::Horizontal => {
                uf.union(sl[BL], sl[BR]);
                uf.union(sl[TL], sl[TR]);
            }
        }
    }

    pub fn resolve(&self, vertex: &[bool]) -> Result<KauffmanState, DiagramError> {
        if vertex.len() != self.active.len() {
            return Err(DiagramError::VertexLength {
                expected: self.active.len(),
                got: vertex.len(),
            });
        }
        if vertex.len() > 63 {
            return Err(DiagramError::TooManyCrossings(vertex.len()));
        }
        let bits = vertex
            .iter()
            .enumerate()
            .fold(0u64, |acc, (r, &b)| acc | (u64::from(b) << r));
        let mut uf = UnionFind::new(self.arcs.len());
        let mut out = vec![0u8; self.arcs.len()];
        let circles = self.resolve_bits_into(bits, &mut uf, &mut out);
        Ok(KauffmanState {
            vertex: vertex.to_vec(),
            circles,
            arc_circle: out.into_iter().map(usize::from).collect(),
        })
    }

    /// lk between components; diagonal is zero.
    pub fn linking_numbers(&self) -> Vec<Vec<i64>> {
        let k = self.components;
        let mut twice = vec![vec![0i64; k]; k];
        for &ci in &self.active {
            let c = &self.crossings[ci];
            let a = self.arcs[c.slots[BL]].component;
            let b = self.arcs[c.slots[BR]].component;
            if a != b {
                twice[a][b] += i64::from(c.sign);
                twice[b][a] += i64::from(c.sign);
            }
        }
        twice
            .into_iter()
            .map(|row| row.into_iter().map(|v| v / 2).collect())
            .collect()
    }
}
