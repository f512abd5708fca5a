#![allow(dead_code)]

use std::collections::HashSet;

use lanecert::graph::Graph;
use lanecert::lane_recursive::{Op, OpSequence};
use proptest::prelude::*;

/// Decodes raw choices into a valid sequence. A choice either inserts a fresh
/// vertex on a lane or joins two lane tails; joins that would repeat an edge
/// are dropped.
pub fn ops_from_choices(k: usize, choices: &[(bool, u8, u8)]) -> OpSequence {
    let mut tails: Vec<usize> = (0..k).collect();
    let mut edges: HashSet<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
    let mut next = k;
    let mut ops = Vec::new();
    for &(join, a, b) in choices {
        let a = a as usize % k;
        if join && k >= 2 {
            let b = (a + 1 + b as usize % (k - 1)) % k;
            if edges.insert((tails[a].min(tails[b]), tails[a].max(tails[b]))) {
                ops.push(Op::EInsert { a: a + 1, b: b + 1 });
            }
        } else {
            ops.push(Op::VInsert { lane: a + 1, vertex: next });
            edges.insert((tails[a], next));
            tails[a] = next;
            next += 1;
        }
    }
    OpSequence::new(k, ops)
}

pub fn op_sequences(max_k: usize, max_ops: usize) -> impl Strategy<Value = OpSequence> {
    (1..=max_k).prop_flat_map(move |k| {
        prop::collection::vec((any::<bool>(), any::<u8>(), any::<u8>()), 0..=max_ops).prop_map(move |c| ops_from_choices(k, &c))
    })
}

/// Random spanning tree plus extra chords.
pub fn connected_graphs(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let parents = prop::collection::vec(any::<u16>(), n.saturating_sub(1));
        let chords = prop::collection::vec((0..n, 0..n), 0..=n);
        (parents, chords).prop_map(move |(parents, chords)| {
            let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p as usize % (i + 1), i + 1)).collect();
            for (a, b) in chords {
                let e = (a.min(b), a.max(b));
                if a != b && !edges.contains(&e) {
                    edges.push(e);
                }
            }
            Graph::new(n, edges).expect("simple graph")
        })
    })
}

pub fn bipartite(g: &Graph) -> bool {
    let mut color = vec![None; g.n()];
    for s in 0..g.n() {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                match color[y] {
                    None => {
                        color[y] = Some(!color[x].unwrap());
                        queue.push_back(y);
                    }
                    Some(c) if c == color[x].unwrap() => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

pub fn acyclic(g: &Graph) -> bool {
    let mut root: Vec<usize> = (0..g.n()).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    g.edges().iter().all(|&(u, v)| {
        let (a, b) = (find(&mut root, u), find(&mut root, v));
        root[a] = b;
        a != b
    })
}

/// Exhaustive search: match the lowest free vertex with each free neighbour.
pub fn has_perfect_matching(g: &Graph) -> bool {
    fn go(g: &Graph, used: &mut Vec<bool>) -> bool {
        let Some(v) = used.iter().position(|&u| !u) else {
            return true;
        };
        used[v] = true;
        for &w in g.neighbors(v) {
            if !used[w] {
                used[w] = true;
                if go(g, used) {
                    return true;
                }
                used[w] = false;
            }
        }
        used[v] = false;
        false
    }
    g.n().is_multiple_of(2) && go(g, &mut vec![false; g.n()])
}

pub fn holds(g: &Graph, p: lanecert::homomorphism::Property) -> bool {
    use lanecert::homomorphism::Property;
    match p {
        Property::Bipartite => bipartite(g),
        Property::Acyclic => acyclic(g),
        Property::PerfectMatching => has_perfect_matching(g),
        Property::EvenOrder => g.n().is_multiple_of(2),
    }
}
