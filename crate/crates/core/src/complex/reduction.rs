//! Chain complexes simplified by Gaussian elimination of invertible entries.
//!
//! Cancelling an entry `a → b` with coefficient `u` deletes both generators and
//! replaces every `x → y` by `x → y − (x → b)·u⁻¹·(a → y)`; the result is chain
//! homotopy equivalent to the input.

use std::collections::BTreeMap;

use crate::linalg::{Ring, SparseMat};

type Bigrading = (i32, i32);

#[derive(Clone, Debug)]
pub struct ReducibleComplex<R: Ring> {
    ring: R,
    grading: Vec<Bigrading>,
    alive: Vec<bool>,
    alive_count: usize,
    out: Vec<Vec<(u32, R::Elem)>>,
    /// Possible sources of entries into each generator. May hold stale or repeated
    /// ids; `out` is authoritative.
    inc: Vec<Vec<u32>>,
    mark: Vec<u32>,
    log: Option<Vec<CancelStep<R::Elem>>>,
}

/// A recorded cancellation of `a → b` with coefficient `u`, together with the
/// other entries into `b` and out of `a` at that moment.
#[derive(Clone, Debug)]
pub struct CancelStep<E> {
    pub a: u32,
    pub b: u32,
    pub u: E,
    pub sources: Vec<(u32, E)>,
    pub targets: Vec<(u32, E)>,
}

impl<R: Ring> ReducibleComplex<R> {
    pub fn new(ring: R, grading: Vec<Bigrading>) -> Self {
        let n = grading.len();
        Self {
            ring,
            alive: vec![true; n],
            alive_count: n,
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            mark: vec![0; n],
            log: None,
            grading,
        }
    }

    /// Start recording every later cancellation.
    pub fn record_cancellations(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn take_log(&mut self) -> Vec<CancelStep<R::Elem>> {
        self.log.take().unwrap_or_default()
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.grading.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grading.is_empty()
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, g: usize) -> bool {
        self.alive[g]
    }

    pub fn grading(&self, g: usize) -> Bigrading {
        self.grading[g]
    }

    pub fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&g| self.alive[g])
    }

    pub fn entry_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_entries(&self, g: usize) -> &[(u32, R::Elem)] {
        &self.out[g]
    }

    /// Adds `c` to the coefficient of `src → tgt`.
    pub fn add_entry(&mut self, src: u32, tgt: u32, c: &R::Elem) {
        if self.ring.is_zero(c) {
            return;
        }
        let row = &mut self.out[src as usize];
        if let Some(k) = row.iter().position(|e| e.0 == tgt) {
            let v = self.ring.add(&row[k].1, c);
            if self.ring.is_zero(&v) {
                row.swap_remove(k);
            } else {
                row[k].1 = v;
            }
        } else {
            row.push((tgt, c.clone()));
            self.inc[tgt as usize].push(src);
        }
    }

    /// Live entries into `b` from generators other than `skip`, each source once.
    fn live_sources(&mut self, b: usize, skip: usize) -> Vec<(u32, R::Elem)> {
        let ids = std::mem::take(&mut self.inc[b]);
        let mut found = Vec::new();
        let mut kept = Vec::new();
        for &x in &ids {
            let xs = x as usize;
            if !self.alive[xs] || self.mark[xs] != 0 {
                continue;
            }
            self.mark[xs] = 1;
            if let Some(e) = self.out[xs].iter().find(|e| e.0 as usize == b) {
                kept.push(x);
                if xs != skip {
                    found.push((x, e.1.clone()));
                }
            }
        }
        for &x in &ids {
            self.mark[x as usize] = 0;
        }
        self.inc[b] = kept;
        found
    }

    fn detach(&mut self, g: usize) {
        let g32 = g as u32;
        self.out[g].clear();
        for x in std::mem::take(&mut self.inc[g]) {
            let list = &mut self.out[x as usize];
            if let Some(k) = list.iter().position(|e| e.0 == g32) {
                list.swap_remove(k);
            }
        }
    }

    /// Adds `f·(a → y)` to `x → y` for every target `y`, in one pass over the row of `x`.
    fn merge_row(&mut self, x: u32, f: &R::Elem, targets: &[(u32, R::Elem)]) {
        let mut row = std::mem::take(&mut self.out[x as usize]);
        for (k, e) in row.iter().enumerate() {
            self.mark[e.0 as usize] = k as u32 + 1;
        }
        for (y, day) in targets {
            let c = self.ring.mul(f, day);
            if self.ring.is_zero(&c) {
                continue;
            }
            match self.mark[*y as usize] {
                0 => {
                    row.push((*y, c));
                    self.mark[*y as usize] = row.len() as u32;
                    self.inc[*y as usize].push(x);
                }
                k => {
                    let e = &mut row[k as usize - 1];
                    e.1 = self.ring.add(&e.1, &c);
                }
            }
        }
        for e in &row {
            self.mark[e.0 as usize] = 0;
        }
        row.retain(|e| !self.ring.is_zero(&e.1));
        self.out[x as usize] = row;
    }

    /// Cancels the invertible entry `a → b`.
    pub fn cancel(&mut self, a: usize, b: usize) {
        let u = self.out[a]
            .iter()
            .find(|e| e.0 as usize == b)
            .map(|e| e.1.clone())
            .expect("cancelled entry exists");
        let sources = self.live_sources(b, a);
        let targets: Vec<(u32, R::Elem)> = self.out[a].iter().filter(|e| e.0 as usize != b).cloned().collect();
        self.detach(a);
        self.detach(b);
        self.alive[a] = false;
        self.alive[b] = false;
        self.alive_count -= 2;
        for (x, dxb) in &sources {
            let f = self.ring.neg(&self.ring.quotient(dxb, &u));
            self.merge_row(*x, &f, &targets);
        }
        if let Some(log) = &mut self.log {
            log.push(CancelStep {
                a: a as u32,
                b: b as u32,
                u,
                sources,
                targets,
            });
        }
    }

    /// Repeatedly cancels entries accepted by `eligible(source grading, target grading, coeff)`
    /// until none remain, preferring pivots with little fill-in. `on_cancel` sees the
    /// source grading of every cancelled pair. Returns the number of cancellations.
    pub fn reduce_where(
        &mut self,
        eligible: impl Fn(&R, Bigrading, Bigrading, &R::Elem) -> bool,
        mut on_cancel: impl FnMut(Bigrading),
    ) -> usize {
        let mut count = 0;
        loop {
            let mut progress = false;
            for a in 0..self.len() {
                if !self.alive[a] {
                    continue;
                }
                let ga = self.grading[a];
                let fan_out = self.out[a].len().saturating_sub(1);
                let mut best: Option<(usize, usize)> = None;
                for (b, c) in &self.out[a] {
                    let b = *b as usize;
                    if !eligible(&self.ring, ga, self.grading[b], c) {
                        continue;
                    }
                    let cost = self.inc[b].len().saturating_sub(1) * fan_out;
                    if best.is_none_or(|(_, bc)| cost < bc) {
                        best = Some((b, cost));
                        if cost == 0 {
                            break;
                        }
                    }
                }
                if let Some((b, _)) = best {
                    self.cancel(a, b);
                    on_cancel(ga);
                    count += 1;
                    progress = true;
                }
            }
            if !progress {
                return count;
            }
        }
    }

    /// Cancels every unit entry.
    pub fn reduce_units(&mut self) -> usize {
        self.reduce_where(|r, _, _, c| r.is_unit(c), |_| {})
    }

    /// Surviving generators per bigrading.
    pub fn alive_table(&self) -> BTreeMap<Bigrading, usize> {
        let mut t = BTreeMap::new();
        for g in self.alive() {
            *t.entry(self.grading[g]).or_insert(0) += 1;
        }
        t
    }

    /// Surviving generators grouped by bigrading, ascending.
    pub fn alive_by_grading(&self) -> BTreeMap<Bigrading, Vec<usize>> {
        let mut t: BTreeMap<Bigrading, Vec<usize>> = BTreeMap::new();
        for g in self.alive() {
            t.entry(self.grading[g]).or_default().push(g);
        }
        t
    }

    /// The residual map between two lists of surviving generators, as an integer
    /// matrix via `lift` (rows = `targets`, cols = `sources`).
    pub fn residual_matrix(
        &self,
        sources: &[usize],
        targets: &[usize],
        lift: impl Fn(&R::Elem) -> num_bigint::BigInt,
    ) -> SparseMat {
        let row_of: BTreeMap<usize, usize> = targets.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let mut m = SparseMat::new(targets.len(), sources.len());
        for (col, &s) in sources.iter().enumerate() {
            for (t, c) in &self.out[s] {
                if let Some(&row) = row_of.get(&(*t as usize)) {
                    m.add_to(row, col, &lift(c));
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Integers, PrimeField};
    use num_bigint::BigInt;

    #[test]
    fn cancelling_a_square() {
        // a → c (1), a → d (1), b → c (1), b → d (-1)... over Z: a square with one 2.
        let mut rc = ReducibleComplex::new(Integers, vec![(0, 0), (0, 0), (1, 0), (1, 0)]);
        let one = BigInt::from(1);
        rc.add_entry(0, 2, &one);
        rc.add_entry(0, 3, &one);
        rc.add_entry(1, 2, &one);
        rc.add_entry(1, 3, &BigInt::from(-1));
        let n = rc.reduce_units();
        assert_eq!(n, 1);
        assert_eq!(rc.alive_count(), 2);
        let survivors: Vec<usize> = rc.alive().collect();
        let m = rc.residual_matrix(&survivors[..1], &survivors[1..], |c| c.clone());
        assert_eq!(m.get(0, 0).magnitude(), &num_bigint::BigUint::from(2u32));
    }

    #[test]
    fn field_cancellation_leaves_homology() {
        let f = PrimeField::new(2);
        let mut rc = ReducibleComplex::new(f, vec![(0, 0), (0, 0), (1, 0), (1, 0)]);
        rc.add_entry(0, 2, &1);
        rc.add_entry(0, 3, &1);
        rc.add_entry(1, 2, &1);
        rc.add_entry(1, 3, &1);
        rc.reduce_units();
        // Rank 1 map between 2-dimensional spaces: homology 1 + 1.
        assert_eq!(rc.alive_count(), 2);
        assert_eq!(rc.entry_count(), 0);
    }

    #[test]
    fn entries_cancel_to_zero() {
        let mut rc = ReducibleComplex::new(Integers, vec![(0, 0), (1, 0)]);
        rc.add_entry(0, 1, &BigInt::from(3));
        rc.add_entry(0, 1, &BigInt::from(-3));
        assert_eq!(rc.entry_count(), 0);
    }
}
