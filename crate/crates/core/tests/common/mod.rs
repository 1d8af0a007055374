//! Independent oracles: arc tracing, Kauffman bracket, dense Khovanov complex
//! with dense Smith normal form, and brute-force Bockstein lifts.
//!
//! Nothing here calls into the library; words are plain letter lists and the
//! smoothing calibration is restated locally (letter k > 0 is a negative
//! crossing, whose 0-smoothing is horizontal).

#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// True when the smoothing chosen by `bit` at `letter` is the cup/cap pair.
pub fn horizontal(letter: i32, bit: bool) -> bool {
    (letter > 0) != bit
}

/// A point of the closed braid: bottom of level `t`, strand `s`.
type Node = (usize, usize);

/// Walks every circle of the smoothing of the closure of `letters` at `vertex`.
/// Returns, for each node, the index of its circle; circles are numbered in
/// order of discovery.
pub fn trace(letters: &[i32], strands: usize, vertex: &[bool]) -> (usize, HashMap<Node, usize>) {
    let len = letters.len();
    if len == 0 {
        let ids = (0..strands).map(|s| ((0, s), s)).collect();
        return (strands, ids);
    }
    let cap_at = |t: usize, s: usize| -> Option<usize> {
        let a = letters[t].unsigned_abs() as usize - 1;
        if !horizontal(letters[t], vertex[t]) {
            return None;
        }
        if s == a {
            Some(a + 1)
        } else if s == a + 1 {
            Some(a)
        } else {
            None
        }
    };
    let mut circle = HashMap::new();
    let mut count = 0;
    for t0 in 0..len {
        for s0 in 0..strands {
            if circle.contains_key(&(t0, s0)) {
                continue;
            }
            let (mut t, mut s, mut up) = (t0, s0, true);
            loop {
                circle.insert((t, s), count);
                if up {
                    match cap_at(t, s) {
                        Some(o) => {
                            s = o;
                            up = false;
                        }
                        None => t = (t + 1) % len,
                    }
                } else {
                    let below = (t + len - 1) % len;
                    match cap_at(below, s) {
                        Some(o) => {
                            s = o;
                            up = true;
                        }
                        None => t = below,
                    }
                }
                if (t, s) == (t0, s0) {
                    break;
                }
            }
            count += 1;
        }
    }
    (count, circle)
}

pub fn circle_count(letters: &[i32], strands: usize, vertex: &[bool]) -> usize {
    trace(letters, strands, vertex).0
}

fn bits(v: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| v >> k & 1 == 1).collect()
}

fn add_term(p: &mut BTreeMap<i32, i64>, e: i32, c: i64) {
    let v = p.entry(e).or_insert(0);
    *v += c;
    if *v == 0 {
        p.remove(&e);
    }
}

fn poly_mul(a: &BTreeMap<i32, i64>, b: &BTreeMap<i32, i64>) -> BTreeMap<i32, i64> {
    let mut out = BTreeMap::new();
    for (&ea, &ca) in a {
        for (&eb, &cb) in b {
            add_term(&mut out, ea + eb, ca * cb);
        }
    }
    out
}

/// Unnormalized Jones polynomial in q from the Kauffman bracket state sum:
/// ⟨D⟩ = Σ A^{#A−#B} (−A²−A⁻²)^{circles−1}, V = (−A³)^{−w}⟨D⟩, then
/// A² = −q⁻¹ and multiplication by q + q⁻¹.
pub fn kauffman_jones(letters: &[i32], strands: usize) -> BTreeMap<i32, i64> {
    let n = letters.len();
    let loop_value: BTreeMap<i32, i64> = [(2, -1), (-2, -1)].into_iter().collect();
    let mut bracket = BTreeMap::new();
    for v in 0..1usize << n {
        let vertex = bits(v, n);
        let b = vertex.iter().filter(|&&x| x).count() as i32;
        let a = n as i32 - b;
        let circles = circle_count(letters, strands, &vertex);
        let mut term: BTreeMap<i32, i64> = [(a - b, 1)].into_iter().collect();
        for _ in 1..circles {
            term = poly_mul(&term, &loop_value);
        }
        for (e, c) in term {
            add_term(&mut bracket, e, c);
        }
    }
    let writhe: i32 = letters.iter().map(|&l| if l > 0 { -1 } else { 1 }).sum();
    let sign = if writhe % 2 == 0 { 1 } else { -1 };
    let mut v = BTreeMap::new();
    for (e, c) in bracket {
        add_term(&mut v, e - 3 * writhe, sign * c);
    }
    let mut in_q = BTreeMap::new();
    for (e, c) in v {
        assert!(e % 2 == 0, "odd power of A in a link polynomial");
        let m = e / 2;
        let s = if m % 2 == 0 { 1 } else { -1 };
        add_term(&mut in_q, -m, s * c);
    }
    let unknot: BTreeMap<i32, i64> = [(1, 1), (-1, 1)].into_iter().collect();
    poly_mul(&in_q, &unknot)
}

/// Signed crossing count between closure components.
pub fn linking_matrix(letters: &[i32], strands: usize) -> Vec<Vec<i64>> {
    let mut perm: Vec<usize> = (0..strands).collect();
    for &l in letters {
        let a = l.unsigned_abs() as usize - 1;
        perm.swap(a, a + 1);
    }
    // perm[p] = starting strand now at position p; components are cycles of the closure map.
    let mut comp = vec![usize::MAX; strands];
    let mut next = 0;
    for s in 0..strands {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut x = s;
        while comp[x] == usize::MAX {
            comp[x] = next;
            x = perm.iter().position(|&y| y == x).unwrap();
        }
        next += 1;
    }
    let mut lk2 = vec![vec![0i64; next]; next];
    let mut at: Vec<usize> = (0..strands).collect();
    for &l in letters {
        let a = l.unsigned_abs() as usize - 1;
        let (x, y) = (comp[at[a]], comp[at[a + 1]]);
        let sign = if l > 0 { -1 } else { 1 };
        if x != y {
            lk2[x][y] += sign;
            lk2[y][x] += sign;
        }
        at.swap(a, a + 1);
    }
    lk2.iter().map(|r| r.iter().map(|v| v / 2).collect()).collect()
}

/// One generator: vertex and the x-labelled circles (bitmask over circle indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Gen {
    vertex: usize,
    xs: u32,
}

/// Dense Khovanov complex of the closure, graded by (i, j).
pub struct DenseComplex {
    gens: Vec<Gen>,
    grading: Vec<(i32, i32)>,
    /// d as (target, source, coefficient).
    entries: Vec<(usize, usize, i64)>,
}

impl DenseComplex {
    pub fn build(letters: &[i32], strands: usize) -> Self {
        let n = letters.len();
        let n_minus = letters.iter().filter(|&&l| l > 0).count() as i32;
        let n_plus = n as i32 - n_minus;
        let states: Vec<(usize, HashMap<Node, usize>)> = (0..1usize << n).map(|v| trace(letters, strands, &bits(v, n))).collect();
        let mut gens = Vec::new();
        let mut grading = Vec::new();
        let mut index = HashMap::new();
        for (v, (circles, _)) in states.iter().enumerate() {
            let h = v.count_ones() as i32;
            for xs in 0..1u32 << circles {
                let x = xs.count_ones() as i32;
                index.insert(Gen { vertex: v, xs }, gens.len());
                gens.push(Gen { vertex: v, xs });
                grading.push((h - n_minus, *circles as i32 - 2 * x + h + n_plus - 2 * n_minus));
            }
        }
        let mut entries = Vec::new();
        for (src, g) in gens.iter().enumerate() {
            let v = g.vertex;
            let (_, map) = &states[v];
            for k in 0..n {
                if v >> k & 1 == 1 {
                    continue;
                }
                let w = v | 1 << k;
                let sign = if (v & ((1 << k) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                let (wc, wmap) = &states[w];
                // Every node lies on exactly one circle before and after.
                let mut to_new: HashMap<usize, Vec<usize>> = HashMap::new();
                let mut to_old: HashMap<usize, Vec<usize>> = HashMap::new();
                for (node, &c) in map {
                    let d = wmap[node];
                    let e = to_new.entry(c).or_default();
                    if !e.contains(&d) {
                        e.push(d);
                    }
                    let e = to_old.entry(d).or_default();
                    if !e.contains(&c) {
                        e.push(c);
                    }
                }
                let label = |c: usize| g.xs >> c & 1 == 1;
                let mut base: u32 = 0;
                let mut merged: Option<(Vec<usize>, usize)> = None;
                let mut split: Option<(usize, Vec<usize>)> = None;
                for (&c, ds) in &to_new {
                    if ds.len() == 2 {
                        split = Some((c, ds.clone()));
                    } else if to_old[&ds[0]].len() == 2 {
                        merged = Some((to_old[&ds[0]].clone(), ds[0]));
                    } else if label(c) {
                        base |= 1 << ds[0];
                    }
                }
                let mut push = |xs: u32| {
                    let tgt = index[&Gen { vertex: w, xs }];
                    entries.push((tgt, src, sign));
                };
                debug_assert!(*wc < 32);
                match (merged, split) {
                    (Some((olds, new)), None) => match (label(olds[0]), label(olds[1])) {
                        (false, false) => push(base),
                        (true, true) => {}
                        _ => push(base | 1 << new),
                    },
                    (None, Some((old, news))) => {
                        if label(old) {
                            push(base | 1 << news[0] | 1 << news[1]);
                        } else {
                            push(base | 1 << news[0]);
                            push(base | 1 << news[1]);
                        }
                    }
                    _ => panic!("edge neither merges nor splits"),
                }
            }
        }
        Self { gens, grading, entries }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    /// d∘d as a list of nonzero (target, source, coefficient) entries.
    pub fn square_defects(&self) -> Vec<(usize, usize, i64)> {
        let mut by_src: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
        for &(t, s, c) in &self.entries {
            by_src.entry(s).or_default().push((t, c));
        }
        let mut out = Vec::new();
        for s in 0..self.len() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(m, c1) in by_src.get(&s).map_or(&[][..], Vec::as_slice) {
                for &(t, c2) in by_src.get(&m).map_or(&[][..], Vec::as_slice) {
                    *acc.entry(t).or_insert(0) += c1 * c2;
                }
            }
            out.extend(acc.into_iter().filter(|e| e.1 != 0).map(|(t, c)| (t, s, c)));
        }
        out
    }

    /// Integral homology: (i, j) → (rank, sorted primary torsion).
    pub fn homology(&self) -> BTreeMap<(i32, i32), (usize, Vec<u64>)> {
        let mut cells: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
        for (g, &k) in self.grading.iter().enumerate() {
            cells.entry(k).or_default().push(g);
        }
        let mut matrices: BTreeMap<(i32, i32), Vec<Vec<BigInt>>> = BTreeMap::new();
        let pos: HashMap<usize, usize> = cells.values().flat_map(|v| v.iter().enumerate().map(|(k, &g)| (g, k))).collect();
        for &(t, s, c) in &self.entries {
            let (i, j) = self.grading[s];
            let rows = cells.get(&(i + 1, j)).map_or(0, Vec::len);
            let cols = cells[&(i, j)].len();
            let m = matrices.entry((i, j)).or_insert_with(|| vec![vec![BigInt::zero(); cols]; rows]);
            m[pos[&t]][pos[&s]] += c;
        }
        let mut snf: BTreeMap<(i32, i32), Vec<BigInt>> = BTreeMap::new();
        for (k, m) in matrices {
            snf.insert(k, dense_smith(m));
        }
        let mut out = BTreeMap::new();
        for (&(i, j), g) in &cells {
            let out_rank = snf.get(&(i, j)).map_or(0, Vec::len);
            let incoming = snf.get(&(i - 1, j)).cloned().unwrap_or_default();
            let rank = g.len() - out_rank - incoming.len();
            let mut torsion: Vec<u64> = incoming.iter().filter(|d| !d.is_one_abs()).flat_map(primary_parts).collect();
            torsion.sort_unstable();
            if rank > 0 || !torsion.is_empty() {
                out.insert((i, j), (rank, torsion));
            }
        }
        out
    }
}

trait OneAbs {
    fn is_one_abs(&self) -> bool;
}

impl OneAbs for BigInt {
    fn is_one_abs(&self) -> bool {
        self.abs() == BigInt::from(1)
    }
}

/// Prime-power factors of a positive integer by trial division.
pub fn primary_parts(d: &BigInt) -> Vec<u64> {
    let mut n: u64 = d.abs().try_into().expect("small invariant factor");
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Nonzero diagonal of a diagonalization by elementary integer row and column
/// operations. The multiset of primary parts is that of the Smith form.
pub fn dense_smith(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut top = 0;
    while top < rows.min(cols) {
        let Some((pr, pc)) = (top..rows)
            .flat_map(|r| (top..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| !m[r][c].is_zero())
            .min_by_key(|&(r, c)| m[r][c].abs())
        else {
            break;
        };
        m.swap(top, pr);
        for row in m.iter_mut() {
            row.swap(top, pc);
        }
        loop {
            let p = m[top][top].clone();
            let mut clean = true;
            for r in top + 1..rows {
                let q = m[r][top].div_floor(&p);
                if !q.is_zero() {
                    for c in top..cols {
                        let v = &m[top][c] * &q;
                        m[r][c] -= v;
                    }
                }
                clean &= m[r][top].is_zero();
            }
            for c in top + 1..cols {
                let q = m[top][c].div_floor(&p);
                if !q.is_zero() {
                    for r in top..rows {
                        let v = &m[r][top] * &q;
                        m[r][c] -= v;
                    }
                }
                clean &= m[top][c].is_zero();
            }
            if clean {
                break;
            }
            // A smaller remainder appeared; move it to the pivot.
            let (r, c) = (top..rows)
                .map(|r| (r, top))
                .chain((top..cols).map(|c| (top, c)))
                .filter(|&(r, c)| !m[r][c].is_zero())
                .min_by_key(|&(r, c)| m[r][c].abs())
                .unwrap();
            m.swap(top, r);
            for row in m.iter_mut() {
                row.swap(top, c);
            }
        }
        diag.push(m[top][top].abs());
        top += 1;
    }
    diag
}

/// Brute-force Bockstein step: the unique y ∈ [0, p)^rows with
/// p^r·y ≡ d·lift(x) (mod p^{r+1}), or None when d·lift(x) is not divisible by p^r.
pub fn brute_lift(x: &[u64], d: &[Vec<i64>], p: u64, r: u32) -> Option<Vec<u64>> {
    let pr = p.pow(r) as i64;
    let modulus = pr * p as i64;
    let image: Vec<i64> = d
        .iter()
        .map(|row| row.iter().zip(x).map(|(a, &b)| a * b as i64).sum::<i64>())
        .collect();
    let rows = d.len();
    let total = (p as usize).pow(rows as u32);
    for code in 0..total {
        let y: Vec<u64> = (0..rows).map(|k| (code / (p as usize).pow(k as u32) % p as usize) as u64).collect();
        if y.iter().zip(&image).all(|(&yk, &ik)| (pr * yk as i64 - ik).rem_euclid(modulus) == 0) {
            return Some(y);
        }
    }
    None
}
