//! Bounded-depth hierarchical decompositions built online from an op sequence.
//!
//! The construction keeps a top-level merge tree whose contraction is the
//! graph built so far. A vertex insert hangs an E-node below the lowest node
//! holding the lane's current out-terminal. An edge insert hangs a B-node
//! below the two holders' lowest common ancestor, wrapping whole subtrees into
//! T-nodes when a holder sits strictly below it.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{apply_op_sequence, bridge_merge, tree_merge, KLaneGraph, Lane, LaneError, MergeTree, Op, OpSequence};
use crate::graph::VertexId;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    V,
    E,
    P,
    /// Bridge between lane `i` of the left child and lane `j` of the right child.
    B { i: Lane, j: Lane },
    T,
}

impl NodeKind {
    pub fn letter(self) -> char {
        match self {
            NodeKind::V => 'V',
            NodeKind::E => 'E',
            NodeKind::P => 'P',
            NodeKind::B { .. } => 'B',
            NodeKind::T => 'T',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompNode {
    pub kind: NodeKind,
    pub fragment: KLaneGraph,
    /// B: `[left, right]`. T: the merge-tree members, parents before children.
    pub children: Vec<NodeId>,
    /// Parent in the enclosing T-node's merge tree.
    pub tree_parent: Option<NodeId>,
    /// Parent in the decomposition.
    pub parent: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchicalDecomposition {
    pub k: usize,
    pub nodes: Vec<DecompNode>,
    pub root: NodeId,
}

struct Proto {
    kind: NodeKind,
    base: Option<KLaneGraph>,
    lanes: BTreeSet<Lane>,
    children: Vec<NodeId>,
    tree_parent: Option<NodeId>,
    tree_children: Vec<NodeId>,
    depth: usize,
}

struct Builder {
    nodes: Vec<Proto>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, base: Option<KLaneGraph>, lanes: BTreeSet<Lane>) -> NodeId {
        self.nodes.push(Proto {
            kind,
            base,
            lanes,
            children: Vec::new(),
            tree_parent: None,
            tree_children: Vec::new(),
            depth: 0,
        });
        self.nodes.len() - 1
    }

    fn attach(&mut self, child: NodeId, parent: NodeId) {
        self.nodes[child].tree_parent = Some(parent);
        self.nodes[child].depth = self.nodes[parent].depth + 1;
        self.nodes[parent].tree_children.push(child);
    }

    fn vnode(&mut self, lane: Lane, v: VertexId) -> NodeId {
        self.push(NodeKind::V, Some(KLaneGraph::vertex(lane, v)), BTreeSet::from([lane]))
    }

    fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while a != b {
            if self.nodes[a].depth >= self.nodes[b].depth {
                a = self.nodes[a].tree_parent.expect("walk stays below the root");
            } else {
                b = self.nodes[b].tree_parent.expect("walk stays below the root");
            }
        }
        a
    }

    /// Child of `top` on the tree path down to `below`.
    fn child_toward(&self, top: NodeId, mut below: NodeId) -> NodeId {
        while self.nodes[below].tree_parent != Some(top) {
            below = self.nodes[below].tree_parent.expect("top is an ancestor");
        }
        below
    }

    /// Detaches the subtree rooted at `c` and wraps it into a new T-node.
    fn wrap_subtree(&mut self, c: NodeId) -> NodeId {
        let p = self.nodes[c].tree_parent.take().expect("subtree root has a parent");
        self.nodes[p].tree_children.retain(|&x| x != c);
        let lanes = self.nodes[c].lanes.clone();
        let t = self.push(NodeKind::T, None, lanes);
        self.nodes[t].children = preorder(&self.nodes, c);
        t
    }
}

fn preorder(nodes: &[Proto], root: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        out.push(x);
        stack.extend(nodes[x].tree_children.iter().rev());
    }
    out
}

pub fn build_hierarchical_decomposition(s: &OpSequence) -> Result<HierarchicalDecomposition, LaneError> {
    apply_op_sequence(s)?;
    let k = s.k;
    let mut b = Builder { nodes: Vec::new() };
    let p = b.push(NodeKind::P, Some(KLaneGraph::path(&s.initial)), (1..=k).collect());
    let mut holder = vec![p; k + 1];
    let mut tau: Vec<VertexId> = std::iter::once(usize::MAX).chain(s.initial.iter().copied()).collect();

    for op in &s.ops {
        match *op {
            Op::VInsert { lane, vertex } => {
                let e = b.push(NodeKind::E, Some(KLaneGraph::edge(lane, tau[lane], vertex)), BTreeSet::from([lane]));
                b.attach(e, holder[lane]);
                holder[lane] = e;
                tau[lane] = vertex;
            }
            Op::EInsert { a: i, b: j } => {
                let (gi, gj) = (holder[i], holder[j]);
                let top = b.lca(gi, gj);
                let left = if gi == top {
                    b.vnode(i, tau[i])
                } else {
                    let c = b.child_toward(top, gi);
                    b.wrap_subtree(c)
                };
                let right = if gj == top {
                    b.vnode(j, tau[j])
                } else {
                    let c = b.child_toward(top, gj);
                    b.wrap_subtree(c)
                };
                let lanes: BTreeSet<Lane> = b.nodes[left].lanes.union(&b.nodes[right].lanes).copied().collect();
                let node = b.push(NodeKind::B { i, j }, None, lanes.clone());
                b.nodes[node].children = vec![left, right];
                b.attach(node, top);
                for l in lanes {
                    holder[l] = node;
                }
            }
        }
    }
    let root = b.push(NodeKind::T, None, (1..=k).collect());
    b.nodes[root].children = preorder(&b.nodes, p);
    finish(b, root, k)
}

/// Computes every fragment bottom-up and records decomposition parents.
fn finish(b: Builder, root: NodeId, k: usize) -> Result<HierarchicalDecomposition, LaneError> {
    let protos = b.nodes;
    let mut parent = vec![None; protos.len()];
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        order.push(x);
        for &c in &protos[x].children {
            parent[c] = Some(x);
            stack.push(c);
        }
    }
    let mut frags: Vec<Option<KLaneGraph>> = vec![None; protos.len()];
    for &x in order.iter().rev() {
        let pr = &protos[x];
        let frag = match pr.kind {
            NodeKind::V | NodeKind::E | NodeKind::P => pr.base.clone().expect("leaf kinds carry a base fragment"),
            NodeKind::B { i, j } => {
                let (l, r) = (pr.children[0], pr.children[1]);
                bridge_merge(frags[l].as_ref().expect("child done"), frags[r].as_ref().expect("child done"), i, j)?
            }
            NodeKind::T => {
                let local: std::collections::HashMap<NodeId, usize> =
                    pr.children.iter().enumerate().map(|(a, &c)| (c, a)).collect();
                let tree = MergeTree {
                    nodes: pr.children.iter().map(|&c| frags[c].clone().expect("child done")).collect(),
                    parent: pr.children.iter().map(|&c| protos[c].tree_parent.map(|p| local[&p])).collect(),
                };
                tree_merge(&tree)?
            }
        };
        frags[x] = Some(frag);
    }
    let nodes = protos
        .into_iter()
        .zip(frags)
        .zip(parent)
        .map(|((pr, frag), parent)| DecompNode {
            kind: pr.kind,
            fragment: frag.unwrap_or_default(),
            children: pr.children,
            tree_parent: pr.tree_parent,
            parent,
        })
        .collect();
    Ok(HierarchicalDecomposition { k, nodes, root })
}

impl HierarchicalDecomposition {
    pub fn root_fragment(&self) -> &KLaneGraph {
        &self.nodes[self.root].fragment
    }

    /// Nodes from `x` up to the root, inclusive.
    pub fn path_to_root(&self, mut x: NodeId) -> Vec<NodeId> {
        let mut out = vec![x];
        while let Some(p) = self.nodes[x].parent {
            out.push(p);
            x = p;
        }
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].children.is_empty() && self.is_live(x))
    }

    /// Whether `x` is reachable from the root.
    fn is_live(&self, x: NodeId) -> bool {
        x == self.root || self.nodes[x].parent.is_some()
    }

    /// Longest root-to-leaf path, in nodes.
    pub fn max_path_len(&self) -> usize {
        self.leaves().map(|x| self.path_to_root(x).len()).max().unwrap_or(0)
    }

    pub fn max_bnodes_on_path(&self) -> usize {
        self.leaves()
            .map(|x| self.path_to_root(x).iter().filter(|&&y| matches!(self.nodes[y].kind, NodeKind::B { .. })).count())
            .max()
            .unwrap_or(0)
    }

    /// Merge-tree children of a T-node member.
    pub fn tree_children(&self, x: NodeId) -> Vec<NodeId> {
        match self.nodes[x].parent {
            Some(t) => self.nodes[t].children.iter().copied().filter(|&c| self.nodes[c].tree_parent == Some(x)).collect(),
            None => Vec::new(),
        }
    }

    /// The node that owns each edge: an E- or P-node, or the B-node whose bridge it is.
    pub fn edge_owner(&self, e: (VertexId, VertexId)) -> Option<NodeId> {
        let e = (e.0.min(e.1), e.0.max(e.1));
        (0..self.nodes.len()).filter(|&x| self.is_live(x)).find(|&x| self.own_edges(x).contains(&e))
    }

    /// Edges introduced by this node itself rather than by its children.
    pub fn own_edges(&self, x: NodeId) -> Vec<(VertexId, VertexId)> {
        let node = &self.nodes[x];
        match node.kind {
            NodeKind::E | NodeKind::P => node.fragment.edges.iter().copied().collect(),
            NodeKind::B { i, j } => {
                let a = self.nodes[node.children[0]].fragment.tout(i).expect("left holds lane i");
                let b = self.nodes[node.children[1]].fragment.tout(j).expect("right holds lane j");
                vec![(a.min(b), a.max(b))]
            }
            NodeKind::V | NodeKind::T => Vec::new(),
        }
    }

    /// Indented text: one node per line with kind, lanes and terminals.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let mut stack = vec![(self.root, 0usize)];
        while let Some((x, depth)) = stack.pop() {
            let node = &self.nodes[x];
            let lanes: Vec<String> = node.fragment.terminals.keys().map(|l| l.to_string()).collect();
            let ins: Vec<String> = node.fragment.terminals.values().map(|t| t.0.to_string()).collect();
            let outs: Vec<String> = node.fragment.terminals.values().map(|t| t.1.to_string()).collect();
            let _ = write!(s, "{:indent$}{}", "", node.kind.letter(), indent = depth * 2);
            if let NodeKind::B { i, j } = node.kind {
                let _ = write!(s, "({i},{j})");
            }
            let _ = write!(s, " #{x} lanes={{{}}} in=[{}] out=[{}]", lanes.join(","), ins.join(","), outs.join(","));
            if let Some(tp) = node.tree_parent {
                let _ = write!(s, " under=#{tp}");
            }
            s.push('\n');
            for &c in node.children.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        s
    }
}
