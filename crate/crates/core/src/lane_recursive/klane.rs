//! k-lane graphs: fragments of one host graph with per-lane in/out terminals.
//!
//! Fragments share vertex ids with the host, so identifying a child's
//! in-terminal with a parent's out-terminal means the two ids coincide.

use std::collections::{BTreeMap, BTreeSet};

use super::{Lane, LaneError};
use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KLaneGraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<(VertexId, VertexId)>,
    /// Lane → (in-terminal, out-terminal).
    pub terminals: BTreeMap<Lane, (VertexId, VertexId)>,
}

fn canon(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

impl KLaneGraph {
    pub fn vertex(lane: Lane, v: VertexId) -> Self {
        Self { vertices: BTreeSet::from([v]), edges: BTreeSet::new(), terminals: BTreeMap::from([(lane, (v, v))]) }
    }

    pub fn edge(lane: Lane, tin: VertexId, tout: VertexId) -> Self {
        Self {
            vertices: BTreeSet::from([tin, tout]),
            edges: BTreeSet::from([canon(tin, tout)]),
            terminals: BTreeMap::from([(lane, (tin, tout))]),
        }
    }

    /// Path `path[0] – … – path[k-1]` on lanes `1..=k`, in = out per lane.
    pub fn path(path: &[VertexId]) -> Self {
        Self {
            vertices: path.iter().copied().collect(),
            edges: path.windows(2).map(|w| canon(w[0], w[1])).collect(),
            terminals: path.iter().enumerate().map(|(i, &v)| (i + 1, (v, v))).collect(),
        }
    }

    pub fn lanes(&self) -> BTreeSet<Lane> {
        self.terminals.keys().copied().collect()
    }

    pub fn tin(&self, lane: Lane) -> Option<VertexId> {
        self.terminals.get(&lane).map(|t| t.0)
    }

    pub fn tout(&self, lane: Lane) -> Option<VertexId> {
        self.terminals.get(&lane).map(|t| t.1)
    }

    /// Lanes non-empty, terminals injective per direction and inside the fragment.
    pub fn is_well_formed(&self) -> bool {
        let ins: BTreeSet<_> = self.terminals.values().map(|t| t.0).collect();
        let outs: BTreeSet<_> = self.terminals.values().map(|t| t.1).collect();
        !self.terminals.is_empty()
            && ins.len() == self.terminals.len()
            && outs.len() == self.terminals.len()
            && ins.iter().chain(&outs).all(|v| self.vertices.contains(v))
            && self.edges.iter().all(|(u, v)| self.vertices.contains(u) && self.vertices.contains(v))
    }

    /// Connectivity of the fragment's own vertices and edges.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else { return true };
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in adj.get(&x).into_iter().flatten() {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// Union of lane-disjoint `g1`, `g2` plus the edge joining `out_i(g1)` and `out_j(g2)`.
pub fn bridge_merge(g1: &KLaneGraph, g2: &KLaneGraph, i: Lane, j: Lane) -> Result<KLaneGraph, LaneError> {
    if g1.terminals.keys().any(|l| g2.terminals.contains_key(l)) {
        return Err(LaneError::LaneOverlap);
    }
    let a = g1.tout(i).ok_or(LaneError::MissingLane(i))?;
    let b = g2.tout(j).ok_or(LaneError::MissingLane(j))?;
    if let Some(&v) = g1.vertices.intersection(&g2.vertices).next() {
        return Err(LaneError::VertexClash(v));
    }
    let mut out = g1.clone();
    out.vertices.extend(&g2.vertices);
    out.edges.extend(&g2.edges);
    out.edges.insert(canon(a, b));
    out.terminals.extend(&g2.terminals);
    Ok(out)
}

/// Glues child `g1` under parent `g2`: each in-terminal of `g1` must be the
/// parent's out-terminal on the same lane, and no edge may be shared.
pub fn parent_merge(g1: &KLaneGraph, g2: &KLaneGraph) -> Result<KLaneGraph, LaneError> {
    if !g1.terminals.keys().all(|l| g2.terminals.contains_key(l)) {
        return Err(LaneError::NotContained);
    }
    for (&l, &(tin, _)) in &g1.terminals {
        if g2.tout(l) != Some(tin) {
            return Err(LaneError::TerminalMismatch(l));
        }
    }
    if let Some(&(u, v)) = g1.edges.intersection(&g2.edges).next() {
        return Err(LaneError::EdgeIdentified(u, v));
    }
    let glued: BTreeSet<VertexId> = g1.terminals.values().map(|t| t.0).collect();
    if let Some(&v) = g1.vertices.intersection(&g2.vertices).find(|v| !glued.contains(v)) {
        return Err(LaneError::VertexClash(v));
    }
    let mut out = g2.clone();
    out.vertices.extend(&g1.vertices);
    out.edges.extend(&g1.edges);
    for (&l, &(_, tout)) in &g1.terminals {
        out.terminals.get_mut(&l).expect("lane contained").1 = tout;
    }
    Ok(out)
}

/// Rooted tree of fragments; `parent[root]` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTree {
    pub nodes: Vec<KLaneGraph>,
    pub parent: Vec<Option<usize>>,
}

impl MergeTree {
    fn root(&self) -> Result<usize, LaneError> {
        let roots: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.parent[i].is_none()).collect();
        match roots[..] {
            [r] if self.parent.len() == self.nodes.len() => Ok(r),
            _ => Err(LaneError::BadTree),
        }
    }

    /// Lane containment along edges, lane-disjoint siblings, acyclic parents.
    fn check(&self) -> Result<(), LaneError> {
        let root = self.root()?;
        let n = self.nodes.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (c, p) in self.parent.iter().enumerate() {
            match *p {
                Some(p) if p < n => children[p].push(c),
                Some(_) => return Err(LaneError::BadTree),
                None => {}
            }
        }
        // Every node reachable from the root means no parent cycles.
        let mut stack = vec![root];
        let mut reached = 0;
        while let Some(x) = stack.pop() {
            reached += 1;
            stack.extend(&children[x]);
        }
        if reached != n {
            return Err(LaneError::BadTree);
        }
        let mut used: BTreeMap<usize, BTreeSet<Lane>> = BTreeMap::new();
        for c in 0..n {
            if let Some(p) = self.parent[c] {
                let lanes = self.nodes[c].lanes();
                if !lanes.is_subset(&self.nodes[p].lanes()) {
                    return Err(LaneError::NotContained);
                }
                let seen = used.entry(p).or_default();
                if !seen.is_disjoint(&lanes) {
                    return Err(LaneError::LaneOverlap);
                }
                seen.extend(lanes);
            }
        }
        Ok(())
    }
}

/// Identifies every node's in-terminals with its tree parent's out-terminals at
/// once. Equivalent to contracting the tree edges in any order.
pub fn tree_merge(t: &MergeTree) -> Result<KLaneGraph, LaneError> {
    t.check()?;
    let root = t.root()?;
    let n = t.nodes.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut glue: BTreeMap<VertexId, usize> = BTreeMap::new();
    for c in 0..n {
        if let Some(p) = t.parent[c] {
            children[p].push(c);
            for (&l, &(tin, _)) in &t.nodes[c].terminals {
                if t.nodes[p].tout(l) != Some(tin) {
                    return Err(LaneError::TerminalMismatch(l));
                }
                *glue.entry(tin).or_insert(0) += 1;
            }
        }
    }
    let mut out = KLaneGraph::default();
    let mut seen: BTreeMap<VertexId, usize> = BTreeMap::new();
    for node in &t.nodes {
        for &v in &node.vertices {
            *seen.entry(v).or_insert(0) += 1;
        }
        for &e in &node.edges {
            if !out.edges.insert(e) {
                return Err(LaneError::EdgeIdentified(e.0, e.1));
            }
        }
    }
    if let Some((&v, _)) = seen.iter().find(|(v, &c)| c != 1 + glue.get(v).copied().unwrap_or(0)) {
        return Err(LaneError::VertexClash(v));
    }
    out.vertices = seen.into_keys().collect();
    for (&l, &(tin, _)) in &t.nodes[root].terminals {
        let mut at = root;
        while let Some(&c) = children[at].iter().find(|&&c| t.nodes[c].terminals.contains_key(&l)) {
            at = c;
        }
        out.terminals.insert(l, (tin, t.nodes[at].tout(l).expect("lane present")));
    }
    Ok(out)
}

/// Contracts the edge above each listed child, in the listed order. Every non-root
/// node must be listed exactly once.
pub fn tree_merge_in_order(t: &MergeTree, children: &[usize]) -> Result<KLaneGraph, LaneError> {
    t.check()?;
    let n = t.nodes.len();
    let mut listed = vec![false; n];
    for &c in children {
        if c >= n || t.parent[c].is_none() || std::mem::replace(&mut listed[c], true) {
            return Err(LaneError::BadTree);
        }
    }
    if listed.iter().zip(&t.parent).any(|(&l, p)| !l && p.is_some()) {
        return Err(LaneError::BadTree);
    }
    // `absorbed[i]` is the node that now carries node i's fragment.
    let mut absorbed: Vec<usize> = (0..n).collect();
    let mut current: Vec<Option<KLaneGraph>> = t.nodes.iter().cloned().map(Some).collect();
    let find = |absorbed: &Vec<usize>, mut i: usize| {
        while absorbed[i] != i {
            i = absorbed[i];
        }
        i
    };
    for &c in children {
        let p = find(&absorbed, t.parent[c].expect("listed nodes have parents"));
        let child = current[c].take().ok_or(LaneError::BadTree)?;
        let parent = current[p].take().ok_or(LaneError::BadTree)?;
        current[p] = Some(parent_merge(&child, &parent)?);
        absorbed[c] = p;
    }
    current[t.root()?].take().ok_or(LaneError::BadTree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridge_of_two_vertices_is_an_edge() {
        let g = bridge_merge(&KLaneGraph::vertex(1, 10), &KLaneGraph::vertex(2, 11), 1, 2).unwrap();
        assert_eq!(g.edges, BTreeSet::from([(10, 11)]));
        assert_eq!(g.lanes(), BTreeSet::from([1, 2]));
        assert!(g.is_well_formed() && g.is_connected());
        let clash = bridge_merge(&KLaneGraph::vertex(1, 10), &KLaneGraph::vertex(1, 11), 1, 1);
        assert_eq!(clash, Err(LaneError::LaneOverlap));
        let missing = bridge_merge(&KLaneGraph::vertex(1, 10), &KLaneGraph::vertex(2, 11), 2, 2);
        assert_eq!(missing, Err(LaneError::MissingLane(2)));
    }

    #[test]
    fn bridge_keeps_side_terminals() {
        let left = KLaneGraph::edge(1, 0, 5);
        let right = parent_merge(&KLaneGraph::edge(3, 2, 6), &KLaneGraph::path(&[1, 2]).clone_relabel(&[2, 3])).unwrap();
        let b = bridge_merge(&left, &right, 1, 3).unwrap();
        assert!(b.edges.contains(&(5, 6)));
        assert_eq!(b.terminals[&1], (0, 5));
        assert_eq!(b.terminals[&2], (1, 1));
        assert_eq!(b.terminals[&3], (2, 6));
    }

    #[test]
    fn parent_merge_extends_lane() {
        let p = KLaneGraph::path(&[0, 1, 2]);
        let e = KLaneGraph::edge(1, 0, 3);
        let g = parent_merge(&e, &p).unwrap();
        assert_eq!(g.terminals[&1], (0, 3));
        assert_eq!(g.terminals[&2], (1, 1));
        assert_eq!(g.edges.len(), 3);
        assert_eq!(parent_merge(&p, &e), Err(LaneError::NotContained));
    }

    #[test]
    fn parent_merge_rejects_edge_identification() {
        let up = KLaneGraph::edge(1, 4, 7);
        let down = KLaneGraph::edge(1, 7, 4);
        assert_eq!(parent_merge(&down, &up), Err(LaneError::EdgeIdentified(4, 7)));
        let elsewhere = KLaneGraph::edge(1, 5, 8);
        assert_eq!(parent_merge(&elsewhere, &up), Err(LaneError::TerminalMismatch(1)));
    }

    #[test]
    fn tree_merge_single_node_and_orders() {
        let single = MergeTree { nodes: vec![KLaneGraph::path(&[0, 1])], parent: vec![None] };
        assert_eq!(tree_merge(&single).unwrap(), KLaneGraph::path(&[0, 1]));

        let t = MergeTree {
            nodes: vec![
                KLaneGraph::path(&[0, 1, 2]),
                KLaneGraph::edge(1, 0, 3),
                KLaneGraph::edge(1, 3, 4),
                KLaneGraph::edge(3, 2, 5),
            ],
            parent: vec![None, Some(0), Some(1), Some(0)],
        };
        let a = tree_merge(&t).unwrap();
        let b = tree_merge_in_order(&t, &[1, 3, 2]).unwrap();
        let c = tree_merge_in_order(&t, &[3, 2, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.terminals[&1], (0, 4));
        assert_eq!(a.terminals[&3], (2, 5));

        let siblings = MergeTree {
            nodes: vec![KLaneGraph::path(&[0, 1]), KLaneGraph::edge(1, 0, 2), KLaneGraph::edge(1, 0, 3)],
            parent: vec![None, Some(0), Some(0)],
        };
        assert_eq!(tree_merge(&siblings), Err(LaneError::LaneOverlap));
    }

    impl KLaneGraph {
        /// Same fragment with lanes renumbered by position in `lanes`.
        fn clone_relabel(&self, lanes: &[Lane]) -> KLaneGraph {
            let mut out = self.clone();
            out.terminals = self.terminals.values().zip(lanes).map(|(&t, &l)| (l, t)).collect();
            out
        }
    }
}
