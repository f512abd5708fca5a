//! Edge-labeled certification of "property holds and pathwidth is bounded".
//!
//! The prover labels each host edge with its own completion-edge certificate
//! plus the certificates of virtual edges routed through it. The verifier at
//! a vertex sees only its id and its incident labels.

pub mod label;
pub mod pointer;
mod prover;
mod verifier;

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::{BitString, DecodeError};
use crate::graph::{degeneracy_orientation, edge_labels_to_vertex_labels, reconstruct_incident_labels, Graph, GraphError, InputTag, TransformError, VertexId};
use crate::homomorphism::{HomError, Property, MAX_LANES};
use crate::interval::IntervalError;
use crate::lane_partition::{lane_bounds, PartitionError};
use crate::lane_recursive::LaneError;

pub use prover::{heuristic_intervals, prove, prove_unchecked, prove_with_witness, Proof, ProofStats};
pub use verifier::verify_vertex;

/// Why a vertex rejects. Each variant has a stable short code for reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RejectReason {
    #[error("nonzero input tag")]
    UnsupportedInput,
    #[error("label does not decode: {0}")]
    Decode(String),
    #[error("edge carries no own certificate or more than one")]
    OwnCount,
    #[error("edge carries too many route sections")]
    TooManyRoutes,
    #[error("certificate endpoints do not include this vertex")]
    Endpoint,
    #[error("route sections of one virtual edge disagree")]
    RouteMismatch,
    #[error("route end does not match the virtual edge")]
    RouteEnd,
    #[error("two incident edges lead to the same neighbor")]
    DuplicateNeighbor,
    #[error("isolated vertex but the property fails on a single vertex")]
    SingleVertex,
    #[error("certificates disagree on global fields")]
    GlobalMismatch,
    #[error("id does not fit the declared width")]
    IdRange,
    #[error("lane count outside the allowed range")]
    LaneBound,
    #[error("root fragment is not accepted")]
    RootRejects,
    #[error("certificate ends before the edge's owner")]
    MissingLevel,
    #[error("pointer targets disagree")]
    PointerTarget,
    #[error("pointer target has a parent edge")]
    PointerRootHasParent,
    #[error("vertex has no pointer parent")]
    PointerNoParent,
    #[error("vertex has several pointer parents")]
    PointerManyParents,
    #[error("pointer distances disagree")]
    PointerDistance,
    #[error("member fragment does not match its incident edges")]
    MemberEdges,
    #[error("member data is malformed")]
    MemberShape,
    #[error("claimed class or terminals differ from the recomputed ones")]
    ClassMismatch,
    #[error("merge-tree links at this vertex are inconsistent")]
    Linkage,
    #[error("bridge edge is inconsistent")]
    Bridge,
    #[error("class algebra failed: {0}")]
    Algebra(String),
}

impl RejectReason {
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::UnsupportedInput => "unsupported-input",
            RejectReason::Decode(_) => "decode",
            RejectReason::OwnCount => "own-count",
            RejectReason::TooManyRoutes => "too-many-routes",
            RejectReason::Endpoint => "endpoint",
            RejectReason::RouteMismatch => "route-mismatch",
            RejectReason::RouteEnd => "route-end",
            RejectReason::DuplicateNeighbor => "duplicate-neighbor",
            RejectReason::SingleVertex => "single-vertex",
            RejectReason::GlobalMismatch => "global-mismatch",
            RejectReason::IdRange => "id-range",
            RejectReason::LaneBound => "lane-bound",
            RejectReason::RootRejects => "root-rejects",
            RejectReason::MissingLevel => "missing-level",
            RejectReason::PointerTarget => "pointer-target",
            RejectReason::PointerRootHasParent => "pointer-root-parent",
            RejectReason::PointerNoParent => "pointer-no-parent",
            RejectReason::PointerManyParents => "pointer-many-parents",
            RejectReason::PointerDistance => "pointer-distance",
            RejectReason::MemberEdges => "member-edges",
            RejectReason::MemberShape => "member-shape",
            RejectReason::ClassMismatch => "class-mismatch",
            RejectReason::Linkage => "linkage",
            RejectReason::Bridge => "bridge",
            RejectReason::Algebra(_) => "algebra",
        }
    }
}

impl From<HomError> for RejectReason {
    fn from(e: HomError) -> Self {
        match e {
            HomError::Decode(d) => RejectReason::Decode(d.to_string()),
            HomError::NonCanonical | HomError::TooManyLanes(_) => RejectReason::Decode(e.to_string()),
            other => RejectReason::Algebra(other.to_string()),
        }
    }
}

impl From<DecodeError> for RejectReason {
    fn from(e: DecodeError) -> Self {
        RejectReason::Decode(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("input graph is empty or disconnected")]
    Disconnected,
    #[error("input tag {0} is not supported")]
    UnsupportedInput(InputTag),
    #[error("the property does not hold")]
    PropertyFails,
    #[error("pathwidth {found} exceeds the bound {k}")]
    PathwidthExceeded { found: usize, k: usize },
    #[error("no interval representation of width at most {} found (best {width})", k + 1)]
    NoWitness { width: usize, k: usize },
    #[error("{0} lanes exceed the supported maximum")]
    TooManyLanes(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Lane(#[from] LaneError),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// What the verifier checks: `property` holds and the graph has a lane
/// partition within the bound derived from pathwidth `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scheme {
    pub property: Property,
    pub k: usize,
    lane_bound: usize,
    route_bound: usize,
}

impl Scheme {
    pub fn new(property: Property, k: usize) -> Result<Self, ProveError> {
        let b = lane_bounds(k + 1)?;
        Ok(Scheme {
            property,
            k,
            lane_bound: (b.f as usize).min(MAX_LANES),
            route_bound: b.h as usize,
        })
    }

    /// Most lanes a certificate may declare.
    pub fn lane_bound(&self) -> usize {
        self.lane_bound
    }

    /// Most route sections one edge may carry.
    pub fn route_bound(&self) -> usize {
        self.route_bound
    }

    /// Whether the property holds on a single vertex.
    pub fn single_vertex_accepts(&self) -> bool {
        matches!(self.property, Property::Bipartite | Property::Acyclic)
    }
}

/// Everything a vertex sees in the edge-labeled model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalView {
    pub id: u64,
    pub input: InputTag,
    /// Input tag and label of each incident edge, in any order.
    pub edges: Vec<(InputTag, BitString)>,
}

/// One label per host edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    pub edges: Vec<(VertexId, VertexId)>,
    pub labels: Vec<BitString>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("labels do not match the graph's edges")]
    EdgeMismatch,
}

impl LabelAssignment {
    /// One `u v LEN:HEX` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&(u, v), l) in self.edges.iter().zip(&self.labels) {
            let _ = writeln!(s, "{u} {v} {}", l.to_hex());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LabelFileError> {
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| LabelFileError::Parse { line: i + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [u, v, hex] = parts[..] else {
                return Err(err("expected `u v LEN:HEX`".into()));
            };
            let u: VertexId = u.parse().map_err(|_| err(format!("bad vertex {u:?}")))?;
            let v: VertexId = v.parse().map_err(|_| err(format!("bad vertex {v:?}")))?;
            edges.push((u.min(v), u.max(v)));
            labels.push(BitString::from_hex(hex).map_err(|e| err(e.to_string()))?);
        }
        Ok(LabelAssignment { edges, labels })
    }

    /// Labels reordered to `g.edges()`.
    pub fn aligned(&self, g: &Graph) -> Result<Vec<BitString>, LabelFileError> {
        if self.edges.len() != g.m() {
            return Err(LabelFileError::EdgeMismatch);
        }
        let mut out = vec![None; g.m()];
        for (&(u, v), l) in self.edges.iter().zip(&self.labels) {
            let e = g.edge_index(u, v).ok_or(LabelFileError::EdgeMismatch)?;
            if out[e].replace(l.clone()).is_some() {
                return Err(LabelFileError::EdgeMismatch);
            }
        }
        Ok(out.into_iter().map(|l| l.expect("every edge labeled once")).collect())
    }

    /// Local views of every vertex; labels must already be aligned to `g.edges()`.
    pub fn views(g: &Graph, aligned: &[BitString]) -> Vec<LocalView> {
        (0..g.n())
            .map(|v| LocalView {
                id: v as u64,
                input: g.vertex_input(v),
                edges: g
                    .neighbors(v)
                    .iter()
                    .map(|&u| {
                        let e = g.edge_index(u, v).expect("neighbor edge");
                        (g.edge_input(e), aligned[e].clone())
                    })
                    .collect(),
            })
            .collect()
    }
}

/// Runs the verifier at every vertex concurrently.
pub fn verify_all(scheme: &Scheme, g: &Graph, labels: &LabelAssignment) -> Result<Vec<Result<(), RejectReason>>, LabelFileError> {
    let aligned = labels.aligned(g)?;
    Ok(verify_views(scheme, &LabelAssignment::views(g, &aligned)))
}

pub fn verify_views(scheme: &Scheme, views: &[LocalView]) -> Vec<Result<(), RejectReason>> {
    views.par_iter().map(|view| verify_vertex(scheme, view)).collect()
}

/// `id accept` or `id reject code` per vertex.
pub fn verdict_report(verdicts: &[Result<(), RejectReason>]) -> String {
    let mut s = String::new();
    for (v, r) in verdicts.iter().enumerate() {
        let _ = match r {
            Ok(()) => writeln!(s, "{v} accept"),
            Err(e) => writeln!(s, "{v} reject {}", e.code()),
        };
    }
    s
}

/// Per-assignment label sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabelStats {
    pub edges: usize,
    pub max_bits: usize,
    pub mean_bits: f64,
    /// Largest own-certificate section, framing included.
    pub max_own_bits: usize,
    /// Largest total of route sections on one edge, framing included.
    pub max_route_bits: usize,
    pub max_routes: usize,
}

pub fn label_size_stats(labels: &[BitString]) -> Result<LabelStats, DecodeError> {
    let mut st = LabelStats { edges: labels.len(), ..LabelStats::default() };
    let mut total = 0usize;
    for l in labels {
        total += l.len();
        st.max_bits = st.max_bits.max(l.len());
        let (mut own, mut route, mut routes) = (0, 0, 0);
        for (kind, payload) in label::read_sections(l)? {
            let size = payload.len() + label::framing_bits(payload.len());
            match kind {
                label::SectionKind::Own => own += size,
                label::SectionKind::Route => {
                    route += size;
                    routes += 1;
                }
            }
        }
        st.max_own_bits = st.max_own_bits.max(own);
        st.max_route_bits = st.max_route_bits.max(route);
        st.max_routes = st.max_routes.max(routes);
    }
    if !labels.is_empty() {
        st.mean_bits = total as f64 / labels.len() as f64;
    }
    Ok(st)
}

/// Moves edge labels to vertices along a degeneracy orientation.
pub fn to_vertex_labels(g: &Graph, labels: &LabelAssignment) -> Result<Vec<BitString>, LabelFileError> {
    let aligned = labels.aligned(g)?;
    Ok(edge_labels_to_vertex_labels(g, &degeneracy_orientation(g), &aligned))
}

/// Vertex-model verification: rebuild incident edge labels from the vertex's
/// own label and its neighbors' labels, then run the edge-model verifier.
pub fn verify_vertex_model(scheme: &Scheme, id: VertexId, input: InputTag, own: &BitString, neighbors: &[&BitString]) -> Result<(), RejectReason> {
    let edges = reconstruct_incident_labels(id, own, neighbors).map_err(|e: TransformError| RejectReason::Decode(e.to_string()))?;
    verify_vertex(scheme, &LocalView { id: id as u64, input, edges: edges.into_iter().map(|(_, l)| (0, l)).collect() })
}

pub fn verify_all_vertex_model(scheme: &Scheme, g: &Graph, vertex_labels: &[BitString]) -> Vec<Result<(), RejectReason>> {
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let nbrs: Vec<&BitString> = g.neighbors(v).iter().map(|&u| &vertex_labels[u]).collect();
            verify_vertex_model(scheme, v, g.vertex_input(v), &vertex_labels[v], &nbrs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{complete, cycle, path, star};

    fn accepts_everywhere(g: &Graph, p: Property, k: usize) -> Vec<Result<(), RejectReason>> {
        let proof = prove(g, p, k).unwrap_or_else(|e| panic!("prover failed: {e}"));
        verify_all(&Scheme::new(p, k).unwrap(), g, &proof.labels).unwrap()
    }

    fn assert_all_accept(g: &Graph, p: Property, k: usize) {
        let verdicts = accepts_everywhere(g, p, k);
        let bad: Vec<_> = verdicts.iter().enumerate().filter(|(_, r)| r.is_err()).collect();
        assert!(bad.is_empty(), "{p} on {g:?}: {bad:?}");
    }

    #[test]
    fn small_families_are_accepted() {
        assert_all_accept(&path(2), Property::Acyclic, 1);
        assert_all_accept(&path(6), Property::PerfectMatching, 1);
        assert_all_accept(&cycle(6), Property::Bipartite, 2);
        assert_all_accept(&cycle(8), Property::EvenOrder, 2);
        assert_all_accept(&star(5), Property::Acyclic, 1);
        assert_all_accept(&complete(4), Property::EvenOrder, 3);
    }

    fn random_connected(rng: &mut impl rand::Rng, n: usize, extra: usize) -> Graph {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        for _ in 0..extra {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && !edges.contains(&(a.min(b), a.max(b))) {
                edges.push((a.min(b), a.max(b)));
            }
        }
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn random_small_graphs_are_accepted_whenever_the_property_holds() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut proved = 0;
        for round in 0..300 {
            let n = 2 + round % 9;
            let g = random_connected(&mut rng, n, round % 4);
            let k = crate::graph::exact_pathwidth(&g).unwrap().width;
            for p in Property::ALL {
                if crate::homomorphism::brute_force_property(&g, p).unwrap() {
                    assert_all_accept(&g, p, k);
                    proved += 1;
                } else {
                    assert_eq!(prove(&g, p, k), Err(ProveError::PropertyFails));
                }
            }
        }
        assert!(proved > 300);
    }

    #[test]
    fn unchecked_labels_of_a_no_instance_are_rejected() {
        let g = cycle(7);
        let proof = prove_unchecked(&g, Property::Bipartite, 2, None).unwrap();
        let verdicts = verify_all(&Scheme::new(Property::Bipartite, 2).unwrap(), &g, &proof.labels).unwrap();
        assert!(verdicts.iter().all(|r| *r == Err(RejectReason::RootRejects)));
    }

    #[test]
    fn replayed_labels_from_an_even_cycle_are_rejected() {
        // Labels of C8 on the 7-cycle obtained by contracting edge {6, 7}.
        let yes = cycle(8);
        let proof = prove(&yes, Property::Bipartite, 2).unwrap();
        let g = cycle(7);
        let labels = LabelAssignment {
            edges: g.edges().to_vec(),
            labels: g.edges().iter().map(|&(u, v)| proof.labels.labels[yes.edge_index(u, v).unwrap_or(0)].clone()).collect(),
        };
        let verdicts = verify_all(&Scheme::new(Property::Bipartite, 2).unwrap(), &g, &labels).unwrap();
        assert!(verdicts.iter().any(Result::is_err));
    }

    #[test]
    fn single_bit_flips_never_turn_a_no_instance_into_all_accept() {
        let g = cycle(5);
        let scheme = Scheme::new(Property::Bipartite, 2).unwrap();
        let base = prove_unchecked(&g, Property::Bipartite, 2, None).unwrap().labels;
        for e in 0..base.labels.len() {
            for i in 0..base.labels[e].len() {
                let mut labels = base.clone();
                labels.labels[e].flip(i);
                let verdicts = verify_all(&scheme, &g, &labels).unwrap();
                assert!(verdicts.iter().any(Result::is_err), "flip {e}:{i}");
            }
        }
    }

    #[test]
    fn vertex_model_agrees_with_edge_model() {
        let g = cycle(10);
        let scheme = Scheme::new(Property::Bipartite, 2).unwrap();
        let proof = prove(&g, Property::Bipartite, 2).unwrap();
        let vl = to_vertex_labels(&g, &proof.labels).unwrap();
        assert!(verify_all_vertex_model(&scheme, &g, &vl).iter().all(Result::is_ok));
        let mut broken = vl.clone();
        let last = broken[3].len() - 1;
        broken[3].flip(last);
        assert!(verify_all_vertex_model(&scheme, &g, &broken).iter().any(Result::is_err));
    }

    #[test]
    fn label_file_round_trips() {
        let g = cycle(6);
        let proof = prove(&g, Property::EvenOrder, 2).unwrap();
        let text = proof.labels.to_text();
        assert_eq!(LabelAssignment::from_text(&text).unwrap(), proof.labels);
        assert!(verdict_report(&[Ok(()), Err(RejectReason::Linkage)]).ends_with("1 reject linkage\n"));
    }

    #[test]
    fn single_vertex_graphs() {
        let g = Graph::new(1, []).unwrap();
        assert!(prove(&g, Property::Acyclic, 0).unwrap().labels.labels.is_empty());
        assert_eq!(prove(&g, Property::PerfectMatching, 0), Err(ProveError::PropertyFails));
        let view = LocalView { id: 0, input: 0, edges: vec![] };
        assert_eq!(verify_vertex(&Scheme::new(Property::PerfectMatching, 0).unwrap(), &view), Err(RejectReason::SingleVertex));
    }
}
