//! Boundaried state algebras, one per property.
//!
//! A state summarizes a fragment as seen from an ordered list of boundary
//! vertices. Every fragment operation reduces to four primitives: disjoint
//! union, adding an edge, identifying two boundary vertices, and forgetting
//! boundary vertices. Only marked edges count toward the property.

use std::collections::BTreeSet;

use super::Property;

/// Largest boundary a state may carry during composition.
pub const MAX_BOUNDARY: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    /// Per boundary vertex: smallest vertex of its marked component and parity
    /// relative to it. `None` once an odd marked cycle exists.
    Bipartite(Option<Vec<(usize, bool)>>),
    /// Per boundary vertex: smallest vertex of its marked component. `None`
    /// once a marked cycle exists.
    Acyclic(Option<Vec<usize>>),
    /// Sorted boundary subsets that can be matched while every forgotten
    /// vertex is matched.
    Matching(Vec<u128>),
    /// Vertex count is odd.
    Parity(bool),
}

fn bit(i: usize) -> u128 {
    1u128 << i
}

fn canon_blocks(blocks: &[usize]) -> Vec<usize> {
    let mut first = std::collections::HashMap::new();
    blocks.iter().enumerate().map(|(i, b)| *first.entry(*b).or_insert(i)).collect()
}

fn canon_parity(entries: &[(usize, bool)]) -> Vec<(usize, bool)> {
    let mut first = std::collections::HashMap::new();
    entries
        .iter()
        .enumerate()
        .map(|(i, &(b, p))| {
            let &mut (rep, rp) = first.entry(b).or_insert((i, p));
            (rep, p ^ rp)
        })
        .collect()
}

impl State {
    pub fn empty(p: Property) -> Self {
        match p {
            Property::Bipartite => State::Bipartite(Some(Vec::new())),
            Property::Acyclic => State::Acyclic(Some(Vec::new())),
            Property::PerfectMatching => State::Matching(vec![0]),
            Property::EvenOrder => State::Parity(false),
        }
    }

    pub fn vertex(p: Property) -> Self {
        match p {
            Property::Bipartite => State::Bipartite(Some(vec![(0, false)])),
            Property::Acyclic => State::Acyclic(Some(vec![0])),
            Property::PerfectMatching => State::Matching(vec![0]),
            Property::EvenOrder => State::Parity(true),
        }
    }

    pub fn property(&self) -> Property {
        match self {
            State::Bipartite(_) => Property::Bipartite,
            State::Acyclic(_) => Property::Acyclic,
            State::Matching(_) => Property::PerfectMatching,
            State::Parity(_) => Property::EvenOrder,
        }
    }

    /// Disjoint union; `other`'s boundary follows `self`'s, which has `n` vertices.
    pub fn union(&self, n: usize, other: &State) -> State {
        match (self, other) {
            (State::Bipartite(a), State::Bipartite(b)) => State::Bipartite(a.as_ref().zip(b.as_ref()).map(|(a, b)| {
                a.iter().copied().chain(b.iter().map(|&(r, p)| (r + n, p))).collect()
            })),
            (State::Acyclic(a), State::Acyclic(b)) => {
                State::Acyclic(a.as_ref().zip(b.as_ref()).map(|(a, b)| a.iter().copied().chain(b.iter().map(|r| r + n)).collect()))
            }
            (State::Matching(a), State::Matching(b)) => {
                let set: BTreeSet<u128> = a.iter().flat_map(|&x| b.iter().map(move |&y| x | y << n)).collect();
                State::Matching(set.into_iter().collect())
            }
            (State::Parity(a), State::Parity(b)) => State::Parity(a ^ b),
            _ => panic!("union of states from different properties"),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, marked: bool) {
        if !marked {
            return;
        }
        match self {
            State::Bipartite(s) => unify_parity(s, u, v, true),
            State::Acyclic(s) => link(s, u, v),
            State::Matching(s) => {
                let mut set: BTreeSet<u128> = s.iter().copied().collect();
                set.extend(s.iter().filter(|&&m| m & (bit(u) | bit(v)) == 0).map(|&m| m | bit(u) | bit(v)));
                *s = set.into_iter().collect();
            }
            State::Parity(_) => {}
        }
    }

    /// Merges boundary vertex `v` into `u` and removes `v` from the boundary.
    pub fn identify(&mut self, u: usize, v: usize) {
        debug_assert_ne!(u, v);
        match self {
            State::Bipartite(s) => {
                unify_parity(s, u, v, false);
                if let Some(s) = s {
                    s.remove(v);
                }
            }
            State::Acyclic(s) => {
                link(s, u, v);
                if let Some(s) = s {
                    s.remove(v);
                }
            }
            State::Matching(s) => {
                let set: BTreeSet<u128> = s
                    .iter()
                    .filter(|&&m| m & bit(u) == 0 || m & bit(v) == 0)
                    .map(|&m| {
                        let m = if m & bit(v) != 0 { m | bit(u) } else { m };
                        remove_bit(m, v)
                    })
                    .collect();
                *s = set.into_iter().collect();
            }
            State::Parity(p) => *p = !*p,
        }
    }

    /// Keeps boundary vertices `keep` in that order and forgets the rest.
    pub fn project(&self, n: usize, keep: &[usize]) -> State {
        match self {
            State::Bipartite(s) => State::Bipartite(s.as_ref().map(|s| keep.iter().map(|&i| s[i]).collect())),
            State::Acyclic(s) => State::Acyclic(s.as_ref().map(|s| keep.iter().map(|&i| s[i]).collect())),
            State::Matching(s) => {
                let kept: u128 = keep.iter().map(|&i| bit(i)).fold(0, |a, b| a | b);
                let all = if n == 128 { u128::MAX } else { bit(n) - 1 };
                let forgotten = all & !kept;
                let set: BTreeSet<u128> = s
                    .iter()
                    .filter(|&&m| m & forgotten == forgotten)
                    .map(|&m| keep.iter().enumerate().filter(|&(_, &i)| m & bit(i) != 0).map(|(j, _)| bit(j)).fold(0, |a, b| a | b))
                    .collect();
                State::Matching(set.into_iter().collect())
            }
            State::Parity(p) => State::Parity(*p),
        }
        .canonical()
    }

    pub fn canonical(self) -> State {
        match self {
            State::Bipartite(s) => State::Bipartite(s.map(|s| canon_parity(&s))),
            State::Acyclic(s) => State::Acyclic(s.map(|s| canon_blocks(&s))),
            other => other,
        }
    }

    /// Whether a fragment with this state and `n` boundary vertices, taken as
    /// the whole graph, has the property.
    pub fn accepts(&self, n: usize) -> bool {
        match self {
            State::Bipartite(s) => s.is_some(),
            State::Acyclic(s) => s.is_some(),
            State::Matching(s) => {
                let all = if n == 128 { u128::MAX } else { bit(n) - 1 };
                s.binary_search(&all).is_ok()
            }
            State::Parity(p) => !p,
        }
    }

    /// Whether this is the canonical form of a state over `n` boundary vertices.
    pub fn is_canonical(&self, n: usize) -> bool {
        match self {
            State::Bipartite(Some(s)) => s.len() == n && canon_parity(s) == *s,
            State::Acyclic(Some(s)) => s.len() == n && canon_blocks(s) == *s,
            State::Matching(s) => {
                let limit = if n == 128 { u128::MAX } else { bit(n) - 1 };
                s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|&m| m <= limit)
            }
            _ => true,
        }
    }
}

fn remove_bit(m: u128, v: usize) -> u128 {
    let low = m & (bit(v) - 1);
    let high = if v + 1 >= 128 { 0 } else { m >> (v + 1) << v };
    low | high
}

fn unify_parity(s: &mut Option<Vec<(usize, bool)>>, u: usize, v: usize, odd: bool) {
    let Some(e) = s else { return };
    let ((bu, pu), (bv, pv)) = (e[u], e[v]);
    if bu == bv {
        if pu ^ pv != odd {
            *s = None;
        }
        return;
    }
    let flip = pu ^ pv ^ odd;
    for x in e.iter_mut().filter(|x| x.0 == bv) {
        *x = (bu, x.1 ^ flip);
    }
}

fn link(s: &mut Option<Vec<usize>>, u: usize, v: usize) {
    let Some(e) = s else { return };
    let (bu, bv) = (e[u], e[v]);
    if bu == bv {
        *s = None;
        return;
    }
    for x in e.iter_mut().filter(|x| **x == bv) {
        *x = bu;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(p: Property, n: usize, edges: &[(usize, usize)], keep: &[usize]) -> State {
        let mut s = State::empty(p);
        for i in 0..n {
            s = s.union(i, &State::vertex(p));
        }
        for &(u, v) in edges {
            s.add_edge(u, v, true);
        }
        s.project(n, keep)
    }

    #[test]
    fn single_edge_bipartite_state() {
        assert_eq!(build(Property::Bipartite, 2, &[(0, 1)], &[0, 1]), State::Bipartite(Some(vec![(0, false), (0, true)])));
        assert_eq!(build(Property::Bipartite, 2, &[(0, 1)], &[1, 0]), State::Bipartite(Some(vec![(0, false), (0, true)])));
    }

    #[test]
    fn three_path_matching_state() {
        assert_eq!(build(Property::PerfectMatching, 3, &[(0, 1), (1, 2)], &[0, 1, 2]), State::Matching(vec![0b000, 0b011, 0b110]));
    }

    #[test]
    fn triangle_is_rejected_by_cycle_properties() {
        let tri = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(build(Property::Bipartite, 3, &tri, &[0]), State::Bipartite(None));
        assert_eq!(build(Property::Acyclic, 3, &tri, &[0]), State::Acyclic(None));
        assert!(build(Property::EvenOrder, 3, &tri, &[]).eq(&State::Parity(true)));
    }

    #[test]
    fn identify_closes_a_cycle() {
        let mut s = build(Property::Acyclic, 3, &[(0, 1), (1, 2)], &[0, 2]);
        s.identify(0, 1);
        assert_eq!(s, State::Acyclic(None));
        let mut m = build(Property::PerfectMatching, 2, &[], &[0, 1]);
        m.identify(0, 1);
        assert_eq!(m, State::Matching(vec![0]));
    }

    #[test]
    fn forgetting_requires_matched() {
        let s = build(Property::PerfectMatching, 3, &[(0, 1), (1, 2)], &[1]);
        assert_eq!(s, State::Matching(vec![]));
        let s = build(Property::PerfectMatching, 3, &[(0, 1), (1, 2)], &[0]);
        assert_eq!(s, State::Matching(vec![0]));
    }

    #[test]
    fn remove_bit_shifts_higher_bits() {
        assert_eq!(remove_bit(0b1011, 1), 0b101);
        assert_eq!(remove_bit(1 << 127, 127), 0);
        assert_eq!(remove_bit(1 << 127 | 1, 0), 1 << 126);
    }
}
