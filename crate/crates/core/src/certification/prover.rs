//! The honest prover: witness, lane partition, completion, decomposition,
//! evaluation, then one certificate per completion edge and one route
//! section per hop of every virtual edge.

use std::collections::{BTreeMap, HashMap};

use crate::bits::{id_width, BitString, BitWriter};
use crate::graph::{exact_pathwidth, Graph, VertexId, DEFAULT_PATHWIDTH_LIMIT};
use crate::homomorphism::{brute_force_property_with_limit, eval_property, Evaluation, Plugin, Property, MAX_LANES};
use crate::interval::IntervalRepresentation;
use crate::lane_partition::{build_lane_partition, completion, lane_bounds};
use crate::lane_recursive::{build_hierarchical_decomposition, completion_to_op_sequence, HierarchicalDecomposition, KLaneGraph, NodeId, NodeKind};

use super::label::{route_payload, write_section, BasicInfo, BridgePart, EdgeCert, EdgeSide, KidInfo, Level, Member, MemberData, SectionKind};
use super::pointer::{bfs_arcs, PointerLabel, TreeArc};
use super::{LabelAssignment, ProveError, Scheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStats {
    pub interval_width: usize,
    pub lanes: usize,
    pub congestion: usize,
    pub virtual_edges: usize,
    /// Most nodes on a root-to-leaf path of the decomposition.
    pub depth: usize,
    /// Most levels in one completion-edge certificate.
    pub max_levels: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub labels: LabelAssignment,
    pub stats: ProofStats,
}

/// Greedy vertex-separation order: each step places the frontier vertex that
/// keeps the set of placed-but-unfinished vertices smallest.
pub fn heuristic_intervals(g: &Graph) -> IntervalRepresentation {
    let n = g.n();
    let mut placed = vec![false; n];
    let mut unplaced_deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut candidates = std::collections::BTreeSet::new();
    let mut order = Vec::with_capacity(n);
    let start_of = |placed: &[bool]| (0..n).filter(|&v| !placed[v]).min_by_key(|&v| (g.degree(v), v));
    while order.len() < n {
        let next = if candidates.is_empty() {
            start_of(&placed).expect("unplaced vertex remains")
        } else {
            *candidates
                .iter()
                .min_by_key(|&&v| {
                    let closes = g.neighbors(v).iter().filter(|&&u| placed[u] && unplaced_deg[u] == 1).count();
                    let opens = usize::from(unplaced_deg[v] > g.neighbors(v).iter().filter(|&&u| placed[u]).count());
                    (opens as isize - closes as isize, v)
                })
                .expect("non-empty")
        };
        candidates.remove(&next);
        placed[next] = true;
        order.push(next);
        for &u in g.neighbors(next) {
            unplaced_deg[u] -= 1;
            if !placed[u] {
                candidates.insert(u);
            }
        }
    }
    let w = crate::graph::PathwidthWitness { width: 0, order };
    IntervalRepresentation::from_pairs(w.spans(g).into_iter().map(|(a, b)| (a as i64, b as i64))).expect("spans are ordered")
}

/// Interval representation of width at most `k + 1`, exact for small graphs.
fn find_intervals(g: &Graph, k: usize) -> Result<IntervalRepresentation, ProveError> {
    if g.n() <= DEFAULT_PATHWIDTH_LIMIT {
        let w = exact_pathwidth(g)?;
        if w.width > k {
            return Err(ProveError::PathwidthExceeded { found: w.width, k });
        }
        return Ok(IntervalRepresentation::from_pairs(w.spans(g).into_iter().map(|(a, b)| (a as i64, b as i64)))?);
    }
    let ir = heuristic_intervals(g);
    if ir.width() > k + 1 {
        return Err(ProveError::NoWitness { width: ir.width(), k });
    }
    Ok(ir)
}

pub fn prove(g: &Graph, property: Property, k: usize) -> Result<Proof, ProveError> {
    prove_with_witness(g, property, k, None)
}

pub fn prove_with_witness(g: &Graph, property: Property, k: usize, witness: Option<&IntervalRepresentation>) -> Result<Proof, ProveError> {
    prove_inner(g, property, k, witness, true)
}

/// The honest pipeline without the final refusal when the property fails.
/// The labels then carry a rejecting root class; soundness tests start from them.
pub fn prove_unchecked(g: &Graph, property: Property, k: usize, witness: Option<&IntervalRepresentation>) -> Result<Proof, ProveError> {
    prove_inner(g, property, k, witness, false)
}

fn prove_inner(g: &Graph, property: Property, k: usize, witness: Option<&IntervalRepresentation>, check: bool) -> Result<Proof, ProveError> {
    let scheme = Scheme::new(property, k)?;
    if g.n() == 0 || !g.is_connected() {
        return Err(ProveError::Disconnected);
    }
    if let Some(t) = (0..g.n()).map(|v| g.vertex_input(v)).chain((0..g.m()).map(|e| g.edge_input(e))).find(|&t| t != 0) {
        return Err(ProveError::UnsupportedInput(t));
    }
    if g.n() == 1 {
        if check && !brute_force_property_with_limit(g, property, 1)? {
            return Err(ProveError::PropertyFails);
        }
        let stats = ProofStats { interval_width: 1, lanes: 1, congestion: 0, virtual_edges: 0, depth: 0, max_levels: 0 };
        return Ok(Proof { labels: LabelAssignment { edges: Vec::new(), labels: Vec::new() }, stats });
    }
    let ir = match witness {
        Some(ir) => {
            ir.validate(g)?;
            if ir.width() > k + 1 {
                return Err(ProveError::NoWitness { width: ir.width(), k });
            }
            ir.clone()
        }
        None => find_intervals(g, k)?,
    };
    let (lp, emb) = build_lane_partition(g, &ir)?;
    let kl = lp.k();
    if kl > scheme.lane_bound() {
        return Err(ProveError::TooManyLanes(kl));
    }
    let congestion = crate::lane_partition::measure_congestion(&emb);
    let h_bound = lane_bounds(ir.width())?.h as usize;
    assert!(congestion <= h_bound, "embedding congestion {congestion} exceeds {h_bound}");
    let comp = completion(g, &ir, &lp, false)?;
    let ops = completion_to_op_sequence(g, &ir, &lp)?;
    let h = build_hierarchical_decomposition(&ops)?;
    debug_assert_eq!(h.root_fragment().edges.iter().copied().collect::<Vec<_>>(), comp.graph.edges());
    let ev = eval_property(&h, Plugin { property, marked: true }, g)?;
    if check && !ev.accepted {
        return Err(ProveError::PropertyFails);
    }
    let certs = CertBuilder::new(g, &h, &ev, kl).build();
    let max_levels = certs.values().map(|c| c.levels.len()).max().unwrap_or(0);
    assert!(max_levels <= kl, "certificate depth {max_levels} exceeds {kl} levels");
    let bits: HashMap<(VertexId, VertexId), BitString> = certs.iter().map(|(&e, c)| (e, c.to_bits())).collect();

    let mut routes_on: HashMap<(VertexId, VertexId), Vec<BitString>> = HashMap::new();
    for route in &emb.routes {
        let (a, b) = route.edge;
        let key = (a.min(b), a.max(b));
        let p = &route.path;
        debug_assert!(p.first() == Some(&a) && p.last() == Some(&b) && p.len() >= 3);
        let len = (p.len() - 1) as u64;
        for (i, w) in p.windows(2).enumerate() {
            let hop = (w[0].min(w[1]), w[0].max(w[1]));
            let payload = route_payload(&certs[&key], p[0] == key.0, i as u64 + 1, len - i as u64);
            routes_on.entry(hop).or_default().push(payload);
        }
    }
    let labels = g
        .edges()
        .iter()
        .map(|e| {
            let mut w = BitWriter::new();
            write_section(&mut w, SectionKind::Own, &bits[e]);
            for payload in routes_on.get(e).into_iter().flatten() {
                write_section(&mut w, SectionKind::Route, payload);
            }
            w.finish()
        })
        .collect();
    let stats = ProofStats {
        interval_width: ir.width(),
        lanes: kl,
        congestion,
        virtual_edges: emb.routes.len(),
        depth: h.max_path_len(),
        max_levels,
    };
    Ok(Proof { labels: LabelAssignment { edges: g.edges().to_vec(), labels }, stats })
}

struct CertBuilder<'a> {
    g: &'a Graph,
    h: &'a HierarchicalDecomposition,
    ev: &'a Evaluation,
    kl: usize,
    width: u32,
    tree_children: Vec<Vec<NodeId>>,
    depth: Vec<u64>,
    sub_terms: Vec<BTreeMap<usize, (VertexId, VertexId)>>,
    members: HashMap<NodeId, Member>,
    /// Per T-node: pointer target and the BFS arcs towards it.
    tptr: HashMap<NodeId, (u64, ArcMap)>,
    vptr: HashMap<NodeId, Vec<ArcMap>>,
}

/// Tree arcs keyed by canonical edge.
type ArcMap = HashMap<(VertexId, VertexId), TreeArc>;

fn info(class: &crate::homomorphism::HomClass, terms: &BTreeMap<usize, (VertexId, VertexId)>) -> BasicInfo {
    BasicInfo {
        class: class.clone(),
        tin: terms.values().map(|t| t.0 as u64).collect(),
        tout: terms.values().map(|t| t.1 as u64).collect(),
    }
}

fn edge_list(frag: &KLaneGraph) -> Vec<(VertexId, VertexId)> {
    frag.edges.iter().copied().collect()
}

impl<'a> CertBuilder<'a> {
    fn new(g: &'a Graph, h: &'a HierarchicalDecomposition, ev: &'a Evaluation, kl: usize) -> Self {
        let n = h.nodes.len();
        let mut tree_children = vec![Vec::new(); n];
        let mut depth = vec![0u64; n];
        let mut sub_terms = vec![BTreeMap::new(); n];
        for t in (0..n).filter(|&t| matches!(h.nodes[t].kind, NodeKind::T) && (t == h.root || h.nodes[t].parent.is_some())) {
            let members = &h.nodes[t].children;
            for &m in members {
                if let Some(p) = h.nodes[m].tree_parent {
                    tree_children[p].push(m);
                    depth[m] = depth[p] + 1;
                }
            }
            for &m in members.iter().rev() {
                let mut terms = h.nodes[m].fragment.terminals.clone();
                for &c in &tree_children[m] {
                    for (&l, &(_, out)) in &sub_terms[c] {
                        terms.get_mut(&l).expect("kid lanes are contained").1 = out;
                    }
                }
                sub_terms[m] = terms;
            }
        }
        for kids in &mut tree_children {
            kids.sort_by_key(|&c| h.nodes[c].fragment.terminals.keys().next().copied());
        }
        CertBuilder {
            g,
            h,
            ev,
            kl,
            width: id_width(g.n()),
            tree_children,
            depth,
            sub_terms,
            members: HashMap::new(),
            tptr: HashMap::new(),
            vptr: HashMap::new(),
        }
    }

    fn node_info(&self, x: NodeId) -> BasicInfo {
        info(self.ev.node[x].as_ref().expect("live node"), &self.h.nodes[x].fragment.terminals)
    }

    fn part(&self, x: NodeId) -> BridgePart {
        let node = &self.h.nodes[x];
        match node.kind {
            NodeKind::V => {
                let &(v, _) = node.fragment.terminals.values().next().expect("one lane");
                BridgePart::Vertex { id: v as u64 }
            }
            _ => BridgePart::Tree(self.node_info(x)),
        }
    }

    fn member(&mut self, m: NodeId) -> Member {
        if let Some(found) = self.members.get(&m) {
            return found.clone();
        }
        let node = &self.h.nodes[m];
        let data = match node.kind {
            NodeKind::E => {
                let (&lane, &(a, b)) = node.fragment.terminals.iter().next().expect("one lane");
                MemberData::E { lane, tin: a as u64, tout: b as u64 }
            }
            NodeKind::P => {
                let path: Vec<u64> = node.fragment.terminals.values().map(|t| t.0 as u64).collect();
                let marks = path.windows(2).map(|w| self.g.has_edge(w[0] as usize, w[1] as usize)).collect();
                MemberData::P { path, marks }
            }
            NodeKind::B { i, j } => {
                let (a, b) = self.h.own_edges(m)[0];
                MemberData::B {
                    i,
                    j,
                    left: self.part(node.children[0]),
                    right: self.part(node.children[1]),
                    bridge_marked: self.g.has_edge(a, b),
                }
            }
            NodeKind::V | NodeKind::T => unreachable!("merge-tree members are E, P or B nodes"),
        };
        let kids = self.tree_children[m]
            .iter()
            .map(|&c| {
                let class = self.ev.subtree[c].clone().expect("member evaluated");
                let tout = self.sub_terms[c].values().map(|&(a, b)| (a != b).then_some(b as u64)).collect();
                KidInfo { class, tout }
            })
            .collect();
        let member = Member { data, depth: self.depth[m], kids };
        self.members.insert(m, member.clone());
        member
    }

    fn t_pointer(&mut self, t: NodeId, e: (VertexId, VertexId)) -> PointerLabel {
        let h = self.h;
        let (target, arcs) = self.tptr.entry(t).or_insert_with(|| {
            let root_member = h.nodes[t].children[0];
            let target = *h.nodes[root_member].fragment.terminals.values().next().map(|(a, _)| a).expect("lanes");
            (target as u64, bfs_arcs(&edge_list(&h.nodes[t].fragment), target))
        });
        PointerLabel { target: *target, arc: arcs.get(&e).copied() }
    }

    fn v_pointers(&mut self, b: NodeId, e: (VertexId, VertexId)) -> Vec<Option<TreeArc>> {
        let h = self.h;
        let tables = self.vptr.entry(b).or_insert_with(|| {
            let edges = edge_list(&h.nodes[b].fragment);
            h.nodes[b]
                .children
                .iter()
                .filter(|&&c| matches!(h.nodes[c].kind, NodeKind::V))
                .map(|&c| bfs_arcs(&edges, *h.nodes[c].fragment.vertices.iter().next().expect("one vertex")))
                .collect()
        });
        tables.iter().map(|t| t.get(&e).copied()).collect()
    }

    fn build(mut self) -> BTreeMap<(VertexId, VertexId), EdgeCert> {
        let h = self.h;
        let mut owner: HashMap<(VertexId, VertexId), NodeId> = HashMap::new();
        for x in 0..h.nodes.len() {
            if x == h.root || h.nodes[x].parent.is_some() {
                for e in h.own_edges(x) {
                    owner.insert(e, x);
                }
            }
        }
        let root = self.node_info(h.root);
        let mut out = BTreeMap::new();
        for (&e, &o) in &owner {
            let mut path = h.path_to_root(o);
            path.reverse();
            let mut levels = Vec::new();
            let mut i = 0;
            while i < path.len() {
                let (t, m) = (path[i], path[i + 1]);
                debug_assert!(matches!(h.nodes[t].kind, NodeKind::T));
                let ptr = self.t_pointer(t, e);
                let member = self.member(m);
                let (side, vptr) = if let NodeKind::B { .. } = h.nodes[m].kind {
                    let side = match path.get(i + 2) {
                        None => EdgeSide::Bridge,
                        Some(&c) if c == h.nodes[m].children[0] => EdgeSide::Left,
                        Some(_) => EdgeSide::Right,
                    };
                    (Some(side), self.v_pointers(m, e))
                } else {
                    (None, Vec::new())
                };
                levels.push(Level { ptr, member, side, vptr });
                i += 2;
            }
            out.insert(e, EdgeCert { width: self.width, lanes: self.kl, lo: e.0 as u64, hi: e.1 as u64, root: root.clone(), levels });
        }
        debug_assert!(self.kl <= MAX_LANES);
        out
    }
}
