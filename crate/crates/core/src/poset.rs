//! Backtracking isomorphism search for small graded posets.

use std::collections::{BTreeSet, VecDeque};
use std::ops::ControlFlow;

/// A finite graded poset given by element ranks and the strict order relation.
#[derive(Clone, Debug)]
pub struct GradedPoset {
    rank: Vec<usize>,
    /// `above[x]`: all `y` with `x < y`.
    above: Vec<BTreeSet<usize>>,
    below: Vec<BTreeSet<usize>>,
    covers_up: Vec<Vec<usize>>,
    covers_down: Vec<Vec<usize>>,
}

/// Rank, then `(rank, count)` histograms of the elements above and below.
type Signature = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

impl GradedPoset {
    /// Builds the poset from ranks and cover relations `(lower, upper)`;
    /// the order is their transitive closure.
    pub fn from_covers(rank: Vec<usize>, covers: &[(usize, usize)]) -> Self {
        let n = rank.len();
        let mut covers_up = vec![Vec::new(); n];
        let mut covers_down = vec![Vec::new(); n];
        for &(lo, hi) in covers {
            covers_up[lo].push(hi);
            covers_down[hi].push(lo);
        }
        for v in covers_up.iter_mut().chain(covers_down.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        // Process by increasing rank so that lower sets are complete.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| rank[x]);
        let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &x in &order {
            let mut acc = BTreeSet::new();
            for &y in &covers_down[x] {
                acc.insert(y);
                acc.extend(below[y].iter().copied());
            }
            below[x] = acc;
        }
        let mut above: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (x, set) in below.iter().enumerate() {
            for &y in set {
                above[y].insert(x);
            }
        }
        GradedPoset { rank, above, below, covers_up, covers_down }
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, x: usize) -> usize {
        self.rank[x]
    }

    pub fn less(&self, x: usize, y: usize) -> bool {
        self.above[x].contains(&y)
    }

    pub fn above(&self, x: usize) -> &BTreeSet<usize> {
        &self.above[x]
    }

    pub fn below(&self, x: usize) -> &BTreeSet<usize> {
        &self.below[x]
    }

    /// Per-element invariant: rank plus counts of elements above and below per
    /// rank. Isomorphisms preserve it.
    fn signature(&self, x: usize) -> Signature {
        let hist = |set: &BTreeSet<usize>| {
            let mut h: std::collections::BTreeMap<usize, usize> = Default::default();
            for &y in set {
                *h.entry(self.rank[y]).or_default() += 1;
            }
            h.into_iter().collect::<Vec<_>>()
        };
        (self.rank[x], hist(&self.above[x]), hist(&self.below[x]))
    }

    pub fn rank_profile(&self) -> Vec<usize> {
        let max = self.rank.iter().copied().max().map_or(0, |m| m + 1);
        let mut counts = vec![0; max];
        for &r in &self.rank {
            counts[r] += 1;
        }
        counts
    }
}

/// Calls `visit` with every isomorphism `a -> b` (as a vector `f[x_a] = x_b`)
/// until it returns `ControlFlow::Break`. Returns the break value, if any.
pub fn for_each_isomorphism<B>(
    a: &GradedPoset,
    b: &GradedPoset,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    if a.len() != b.len() || a.rank_profile() != b.rank_profile() {
        return None;
    }
    let sig_a: Vec<_> = (0..a.len()).map(|x| a.signature(x)).collect();
    let sig_b: Vec<_> = (0..b.len()).map(|x| b.signature(x)).collect();
    let mut ms_a = sig_a.clone();
    let mut ms_b = sig_b.clone();
    ms_a.sort();
    ms_b.sort();
    if ms_a != ms_b {
        return None;
    }
    let order = search_order(a, &sig_a);
    let mut state = Search {
        a,
        b,
        sig_a: &sig_a,
        sig_b: &sig_b,
        order: &order,
        map: vec![usize::MAX; a.len()],
        used: vec![false; b.len()],
    };
    match state.extend(0, &mut visit) {
        ControlFlow::Break(v) => Some(v),
        ControlFlow::Continue(()) => None,
    }
}

/// Breadth-first order over the Hasse diagram, starting each component from
/// an element whose signature class is smallest.
fn search_order<S: Ord>(a: &GradedPoset, sig: &[S]) -> Vec<usize> {
    let n = a.len();
    let mut class_size = vec![0usize; n];
    for x in 0..n {
        class_size[x] = (0..n).filter(|&y| sig[y] == sig[x]).count();
    }
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&x| (class_size[x], a.rank(x), x));
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in seeds {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in a.covers_up[x].iter().chain(&a.covers_down[x]) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

struct Search<'a, S> {
    a: &'a GradedPoset,
    b: &'a GradedPoset,
    sig_a: &'a [S],
    sig_b: &'a [S],
    order: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl<S: PartialEq> Search<'_, S> {
    fn extend<B>(&mut self, depth: usize, visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>) -> ControlFlow<B> {
        if depth == self.order.len() {
            return visit(&self.map);
        }
        let x = self.order[depth];
        for y in self.candidates(x) {
            if self.used[y] || self.sig_a[x] != self.sig_b[y] || !self.consistent(x, y) {
                continue;
            }
            self.map[x] = y;
            self.used[y] = true;
            self.extend(depth + 1, visit)?;
            self.used[y] = false;
            self.map[x] = usize::MAX;
        }
        ControlFlow::Continue(())
    }

    fn candidates(&self, x: usize) -> Vec<usize> {
        // Prefer the neighbourhood of an already mapped Hasse neighbour.
        for &p in &self.a.covers_down[x] {
            if self.map[p] != usize::MAX {
                return self.b.covers_up[self.map[p]].clone();
            }
        }
        for &p in &self.a.covers_up[x] {
            if self.map[p] != usize::MAX {
                return self.b.covers_down[self.map[p]].clone();
            }
        }
        (0..self.b.len()).collect()
    }

    fn consistent(&self, x: usize, y: usize) -> bool {
        self.order.iter().all(|&z| {
            let fz = self.map[z];
            fz == usize::MAX || (self.a.less(z, x) == self.b.less(fz, y) && self.a.less(x, z) == self.b.less(y, fz))
        })
    }
}

/// First isomorphism found, if any.
pub fn find_isomorphism(a: &GradedPoset, b: &GradedPoset) -> Option<Vec<usize>> {
    for_each_isomorphism(a, b, |f| ControlFlow::Break(f.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Boolean lattice on subsets of [k] truncated at size <= t.
    fn boolean(k: usize, t: usize) -> GradedPoset {
        let subsets: Vec<u32> = (0u32..1 << k).filter(|s| s.count_ones() as usize <= t).collect();
        let rank = subsets.iter().map(|s| s.count_ones() as usize).collect();
        let mut covers = Vec::new();
        for (i, &s) in subsets.iter().enumerate() {
            for (j, &u) in subsets.iter().enumerate() {
                if s & u == s && u.count_ones() == s.count_ones() + 1 {
                    covers.push((i, j));
                }
            }
        }
        GradedPoset::from_covers(rank, &covers)
    }

    #[test]
    fn automorphisms_of_truncated_boolean_lattice() {
        let p = boolean(4, 2);
        let mut count = 0;
        let r: Option<()> = for_each_isomorphism(&p, &p, |_| {
            count += 1;
            ControlFlow::Continue(())
        });
        assert!(r.is_none());
        // Symmetric group on 4 atoms.
        assert_eq!(count, 24);
    }

    #[test]
    fn non_isomorphic_posets() {
        // Chain of length 2 vs. antichain-with-top of the same profile.
        let chain = GradedPoset::from_covers(vec![0, 1, 1], &[(0, 1)]);
        let vee = GradedPoset::from_covers(vec![0, 1, 1], &[(0, 1), (0, 2)]);
        assert!(find_isomorphism(&chain, &vee).is_none());
        assert!(find_isomorphism(&vee, &vee).is_some());
    }
}
