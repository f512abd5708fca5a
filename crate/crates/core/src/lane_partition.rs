//! Lane partitions, completions and the recursive low-congestion embedding.
//!
//! The construction picks a dominating chain `S` along a shortest path `P`
//! between the leftmost and rightmost intervals, splits it into two lanes,
//! recurses into the components left over, and stitches component lanes
//! together through attachment edges into `S` and subpaths of `P`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::interval::{greedy_lane_split, width_of, Interval, IntervalError, IntervalRepresentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("lane count parameter must be at least 1, got {0}")]
    BadK(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("lane {0} is empty")]
    EmptyLane(usize),
    #[error("vertex {0} is missing from the partition or listed twice")]
    NotAPartition(VertexId),
    #[error("lane {lane}: interval of {prev} does not precede interval of {next}")]
    Unordered { lane: usize, prev: VertexId, next: VertexId },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The three recurrences bounding lane count, weak congestion and full congestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneBounds {
    pub f: u64,
    pub g: u64,
    pub h: u64,
}

pub fn lane_bounds(k: usize) -> Result<LaneBounds, PartitionError> {
    if k == 0 {
        return Err(PartitionError::BadK(k));
    }
    let (mut f, mut g) = (1u64, 0u64);
    for k in 2..=k as u64 {
        g = 2 + g + 2 * k * f;
        f = 2 + 2 * (k - 1) * f;
    }
    Ok(LaneBounds { f, g, h: g + f - 1 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanePartition {
    lanes: Vec<Vec<VertexId>>,
    lane_of: Vec<(usize, usize)>,
}

impl LanePartition {
    /// Checks that the lanes are non-empty and partition `0..n`.
    pub fn new(lanes: Vec<Vec<VertexId>>, n: usize) -> Result<Self, PartitionError> {
        let mut lane_of = vec![(usize::MAX, 0); n];
        for (i, lane) in lanes.iter().enumerate() {
            if lane.is_empty() {
                return Err(PartitionError::EmptyLane(i));
            }
            for (p, &v) in lane.iter().enumerate() {
                if v >= n || lane_of[v].0 != usize::MAX {
                    return Err(PartitionError::NotAPartition(v));
                }
                lane_of[v] = (i, p);
            }
        }
        if let Some(v) = lane_of.iter().position(|&(l, _)| l == usize::MAX) {
            return Err(PartitionError::NotAPartition(v));
        }
        Ok(Self { lanes, lane_of })
    }

    pub fn lanes(&self) -> &[Vec<VertexId>] {
        &self.lanes
    }

    pub fn k(&self) -> usize {
        self.lanes.len()
    }

    /// Number of vertices partitioned.
    pub fn n(&self) -> usize {
        self.lane_of.len()
    }

    /// `(lane, position)` of a vertex, both 0-based.
    pub fn lane_of(&self, v: VertexId) -> (usize, usize) {
        self.lane_of[v]
    }

    pub fn heads(&self) -> Vec<VertexId> {
        self.lanes.iter().map(|l| l[0]).collect()
    }

    /// Every lane is a `≺`-chain under `ir`.
    pub fn check_ordered(&self, ir: &IntervalRepresentation) -> Result<(), PartitionError> {
        for (i, lane) in self.lanes.iter().enumerate() {
            if let Some(w) = lane.windows(2).find(|w| !ir.get(w[0]).precedes(ir.get(w[1]))) {
                return Err(PartitionError::Unordered { lane: i, prev: w[0], next: w[1] });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        self.lanes.iter().map(|l| l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n").collect()
    }

    pub fn from_text(text: &str, n: usize) -> Result<Self, PartitionError> {
        let lanes = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.split_whitespace()
                    .map(|x| x.parse::<VertexId>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| PartitionError::Parse { line: i + 1, msg: "bad vertex id".into() })
            })
            .collect::<Result<_, _>>()?;
        Self::new(lanes, n)
    }
}

/// The host graph plus lane chains (`E1`) and, unless weak, the lane-head chain (`E2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub e1: Vec<(VertexId, VertexId)>,
    pub e2: Vec<(VertexId, VertexId)>,
    /// `E2` edges that are already host edges.
    pub e2_present: Vec<(VertexId, VertexId)>,
    pub graph: Graph,
}

fn canon(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

pub fn completion(
    g: &Graph,
    ir: &IntervalRepresentation,
    lp: &LanePartition,
    weak: bool,
) -> Result<Completion, PartitionError> {
    ir.validate(g)?;
    if lp.n() != g.n() {
        return Err(PartitionError::NotAPartition(lp.n().min(g.n())));
    }
    lp.check_ordered(ir)?;
    let e1: Vec<_> = lp.lanes.iter().flat_map(|l| l.windows(2).map(|w| (w[0], w[1]))).collect();
    let e2: Vec<_> = if weak { Vec::new() } else { lp.lanes.windows(2).map(|w| (w[0][0], w[1][0])).collect() };
    let e2_present: Vec<_> = e2.iter().copied().filter(|&(u, v)| g.has_edge(u, v)).collect();
    // Lane neighbours have disjoint intervals, so E1 never meets E.
    debug_assert!(e1.iter().all(|&(u, v)| !g.has_edge(u, v)));
    let mut all: Vec<(VertexId, VertexId)> = g.edges().to_vec();
    all.extend(e1.iter().map(|&(u, v)| canon(u, v)));
    all.extend(e2.iter().map(|&(u, v)| canon(u, v)).filter(|&(u, v)| !g.has_edge(u, v)));
    let graph = Graph::new(g.n(), all)?;
    Ok(Completion { e1, e2, e2_present, graph })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VirtualKind {
    /// Consecutive members of one lane.
    LaneChain,
    /// Heads of consecutive lanes.
    HeadChain,
}

/// A host path standing in for a virtual edge `edge.0 – edge.1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub edge: (VertexId, VertexId),
    pub kind: VirtualKind,
    pub path: Vec<VertexId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Embedding {
    pub routes: Vec<Route>,
}

impl Embedding {
    /// Number of routes through each host edge, optionally restricted to one kind.
    pub fn congestion_map(&self, only: Option<VirtualKind>) -> HashMap<(VertexId, VertexId), usize> {
        let mut load = HashMap::new();
        for r in self.routes.iter().filter(|r| only.is_none_or(|k| r.kind == k)) {
            let edges: HashSet<_> = r.path.windows(2).map(|w| canon(w[0], w[1])).collect();
            for e in edges {
                *load.entry(e).or_insert(0) += 1;
            }
        }
        load
    }

    pub fn weak_congestion(&self) -> usize {
        self.congestion_map(Some(VirtualKind::LaneChain)).into_values().max().unwrap_or(0)
    }

    /// Every route is a host path joining its virtual edge's endpoints.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        self.routes.iter().all(|r| {
            r.path.first() == Some(&r.edge.0)
                && r.path.last() == Some(&r.edge.1)
                && r.path.windows(2).all(|w| g.has_edge(w[0], w[1]))
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.routes {
            let path: Vec<String> = r.path.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{} {} : {}", r.edge.0, r.edge.1, path.join(" "));
        }
        s
    }
}

pub fn measure_congestion(e: &Embedding) -> usize {
    e.congestion_map(None).into_values().max().unwrap_or(0)
}

/// Lane partition and an embedding of its full completion.
pub fn build_lane_partition(
    g: &Graph,
    ir: &IntervalRepresentation,
) -> Result<(LanePartition, Embedding), PartitionError> {
    ir.validate(g)?;
    if g.n() == 0 {
        return Err(PartitionError::Graph(GraphError::Disconnected));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let all: Vec<VertexId> = (0..g.n()).collect();
    let built = Builder { g, ir }.build(&all);
    let lp = LanePartition::new(built.lanes, g.n())?;
    let mut routes = built.routes;
    for w in lp.lanes.windows(2) {
        let (a, b) = (w[0][0], w[1][0]);
        if !g.has_edge(a, b) {
            let path = local_bfs(g, a, b, |_| true).expect("graph is connected");
            routes.push(Route { edge: (a, b), kind: VirtualKind::HeadChain, path });
        }
    }
    Ok((lp, Embedding { routes }))
}

struct Built {
    lanes: Vec<Vec<VertexId>>,
    routes: Vec<Route>,
}

struct Builder<'a> {
    g: &'a Graph,
    ir: &'a IntervalRepresentation,
}

/// Shortest path preferring smaller ids, staying inside `inside`.
fn local_bfs(g: &Graph, src: VertexId, dst: VertexId, inside: impl Fn(VertexId) -> bool) -> Option<Vec<VertexId>> {
    let mut parent: HashMap<VertexId, VertexId> = HashMap::from([(src, src)]);
    let mut q = VecDeque::from([src]);
    while let Some(x) = q.pop_front() {
        if x == dst {
            break;
        }
        for &y in g.neighbors(x) {
            if inside(y) && !parent.contains_key(&y) {
                parent.insert(y, x);
                q.push_back(y);
            }
        }
    }
    parent.get(&dst)?;
    let mut path = vec![dst];
    while path[path.len() - 1] != src {
        path.push(parent[&path[path.len() - 1]]);
    }
    path.reverse();
    Some(path)
}

/// Cuts out every cycle of a walk, keeping the first arrival at each vertex.
fn loop_erase(walk: &[VertexId]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = Vec::with_capacity(walk.len());
    let mut at: HashMap<VertexId, usize> = HashMap::new();
    for &v in walk {
        if let Some(&i) = at.get(&v) {
            for u in out.drain(i + 1..) {
                at.remove(&u);
            }
        } else {
            at.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

impl Builder<'_> {
    fn iv(&self, v: VertexId) -> Interval {
        self.ir.get(v)
    }

    /// `u` is connected in the host graph and sorted.
    fn build(&self, u: &[VertexId]) -> Built {
        if u.len() == 1 {
            return Built { lanes: vec![vec![u[0]]], routes: Vec::new() };
        }
        let g = self.g;
        let members: HashSet<VertexId> = u.iter().copied().collect();
        let width = width_of(u.iter().map(|&v| self.iv(v)));
        let v_st = *u.iter().min_by_key(|&&v| (self.iv(v).lo(), v)).expect("non-empty");
        let v_ed = *u.iter().min_by_key(|&&v| (-self.iv(v).hi(), v)).expect("non-empty");
        let p = local_bfs(g, v_st, v_ed, |x| members.contains(&x)).expect("component is connected");
        let r_end = self.iv(v_ed).hi();

        let mut s_pos = vec![0usize];
        while self.iv(p[*s_pos.last().expect("non-empty")]).hi() < r_end {
            let cur = *s_pos.last().expect("non-empty");
            let here = self.iv(p[cur]);
            let next = (cur + 1..p.len())
                .filter(|&t| self.iv(p[t]).intersects(here))
                .min_by_key(|&t| (-self.iv(p[t]).hi(), t))
                .expect("a path cannot skip over its own intervals");
            s_pos.push(next);
        }
        let s: Vec<VertexId> = s_pos.iter().map(|&t| p[t]).collect();
        debug_assert!(s.windows(2).all(|w| self.iv(w[0]).hi() < self.iv(w[1]).hi()));
        debug_assert!(s.windows(3).all(|w| self.iv(w[0]).precedes(self.iv(w[2]))));
        debug_assert_eq!(
            s.iter().map(|&v| self.iv(v)).reduce(Interval::hull),
            u.iter().map(|&v| self.iv(v)).reduce(Interval::hull)
        );

        let s1: Vec<VertexId> = s.iter().step_by(2).copied().collect();
        let s2: Vec<VertexId> = s.iter().skip(1).step_by(2).copied().collect();
        let side: HashMap<VertexId, usize> =
            s1.iter().map(|&v| (v, 0)).chain(s2.iter().map(|&v| (v, 1))).collect();
        let pos_on_p: HashMap<VertexId, usize> = p.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let mut routes = Vec::new();
        for lane in [&s1, &s2] {
            for w in lane.windows(2) {
                let (a, b) = (pos_on_p[&w[0]], pos_on_p[&w[1]]);
                routes.push(Route { edge: (w[0], w[1]), kind: VirtualKind::LaneChain, path: p[a..=b].to_vec() });
            }
        }

        let comps = components_of(g, u.iter().copied().filter(|v| !side.contains_key(v)));
        let spans: Vec<Interval> = comps
            .iter()
            .map(|c| c.iter().map(|&v| self.iv(v)).reduce(Interval::hull).expect("non-empty"))
            .collect();
        let class = greedy_lane_split(&spans);
        debug_assert!(class.iter().all(|&c| c + 1 < width.max(2)), "component classes exceed width - 1");

        struct Comp {
            members: HashSet<VertexId>,
            span: Interval,
            class: usize,
            attach: (VertexId, VertexId),
            built: Built,
        }
        let comps: Vec<Comp> = comps
            .into_iter()
            .enumerate()
            .map(|(ci, c)| {
                let attach_to = |j: usize| {
                    c.iter().find_map(|&x| {
                        g.neighbors(x).iter().find(|y| side.get(y) == Some(&j)).map(|&y| (x, y))
                    })
                };
                let (j, attach) = match attach_to(0) {
                    Some(a) => (0, a),
                    None => (1, attach_to(1).expect("component touches S")),
                };
                let built = self.build(&c);
                Comp { members: c.into_iter().collect(), span: spans[ci], class: class[ci] * 2 + j, attach, built }
            })
            .collect();

        // Lanes keyed by (class, side, lane index within the component).
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (ci, c) in comps.iter().enumerate() {
            for l in 0..c.built.lanes.len() {
                groups.entry((c.class, l)).or_default().push(ci);
            }
        }
        let mut lanes = vec![s1, s2];
        for ((_, l), mut members) in groups {
            members.sort_by_key(|&ci| (comps[ci].span.lo(), ci));
            let mut lane = Vec::new();
            for w in members.windows(2) {
                let (c, d) = (&comps[w[0]], &comps[w[1]]);
                let x = *c.built.lanes[l].last().expect("non-empty lane");
                let y = d.built.lanes[l][0];
                let (pc, pd) = (pos_on_p[&c.attach.1], pos_on_p[&d.attach.1]);
                debug_assert!(pc <= pd, "attachment points follow the path order");
                let mut walk = local_bfs(g, x, c.attach.0, |v| c.members.contains(&v)).expect("component connected");
                walk.extend_from_slice(&p[pc..=pd]);
                walk.extend(local_bfs(g, d.attach.0, y, |v| d.members.contains(&v)).expect("component connected"));
                routes.push(Route { edge: (x, y), kind: VirtualKind::LaneChain, path: loop_erase(&walk) });
            }
            for ci in members {
                lane.extend_from_slice(&comps[ci].built.lanes[l]);
            }
            lanes.push(lane);
        }
        for c in comps {
            routes.extend(c.built.routes);
        }
        lanes.retain(|l| !l.is_empty());
        Built { lanes, routes }
    }
}

/// Connected components of the subgraph induced by `vs`, ordered by minimum id.
fn components_of(g: &Graph, vs: impl Iterator<Item = VertexId>) -> Vec<Vec<VertexId>> {
    let mut left: std::collections::BTreeSet<VertexId> = vs.collect();
    let mut out = Vec::new();
    while let Some(s) = left.pop_first() {
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            i += 1;
            for &y in g.neighbors(x) {
                if left.remove(&y) {
                    comp.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::interval::{decomposition_to_intervals, PathDecomposition};

    /// Direct recursive evaluation, independent of the iterative one above.
    fn bounds_oracle(k: u64) -> (u64, u64, u64) {
        fn f(k: u64) -> u64 {
            if k == 1 { 1 } else { 2 + 2 * (k - 1) * f(k - 1) }
        }
        fn g(k: u64) -> u64 {
            if k == 1 { 0 } else { 2 + g(k - 1) + 2 * k * f(k - 1) }
        }
        (f(k), g(k), g(k) + f(k) - 1)
    }

    #[test]
    fn lane_bounds_values() {
        assert_eq!(lane_bounds(1).unwrap(), LaneBounds { f: 1, g: 0, h: 0 });
        assert_eq!(lane_bounds(2).unwrap(), LaneBounds { f: 4, g: 6, h: 9 });
        assert_eq!(lane_bounds(3).unwrap(), LaneBounds { f: 18, g: 32, h: 49 });
        assert_eq!(lane_bounds(4).unwrap().f, 110);
        for k in 1..8 {
            let b = lane_bounds(k).unwrap();
            assert_eq!((b.f, b.g, b.h), bounds_oracle(k as u64));
        }
        assert_eq!(lane_bounds(0), Err(PartitionError::BadK(0)));
    }

    fn c6() -> (Graph, IntervalRepresentation) {
        let pd = PathDecomposition::new(vec![vec![0, 1, 5], vec![1, 2, 5], vec![2, 5, 4], vec![2, 3, 4]]);
        (cycle(6), decomposition_to_intervals(&pd, 6).unwrap())
    }

    #[test]
    fn completion_examples() {
        let g = Graph::new(3, []).unwrap();
        let ir = IntervalRepresentation::from_pairs([(0, 0), (1, 1), (2, 2)]).unwrap();
        let one_lane = LanePartition::new(vec![vec![0, 1, 2]], 3).unwrap();
        let c = completion(&g, &ir, &one_lane, false).unwrap();
        assert_eq!(c.e1, vec![(0, 1), (1, 2)]);
        assert!(c.e2.is_empty());

        let singles = LanePartition::new(vec![vec![0], vec![1], vec![2]], 3).unwrap();
        let c = completion(&g, &ir, &singles, false).unwrap();
        assert!(c.e1.is_empty());
        assert_eq!(c.e2, vec![(0, 1), (1, 2)]);
        let weak = completion(&g, &ir, &singles, true).unwrap();
        assert!(weak.e2.is_empty());

        let overlapping = IntervalRepresentation::from_pairs([(0, 1), (1, 1), (2, 2)]).unwrap();
        assert!(completion(&g, &overlapping, &one_lane, false).is_err());
    }

    #[test]
    fn single_vertex_is_one_lane() {
        let g = Graph::new(1, []).unwrap();
        let ir = IntervalRepresentation::from_pairs([(0, 0)]).unwrap();
        let (lp, emb) = build_lane_partition(&g, &ir).unwrap();
        assert_eq!(lp.lanes(), &[vec![0]]);
        assert_eq!(measure_congestion(&emb), 0);
    }

    #[test]
    fn cycle_fixture_within_bounds() {
        let (g, ir) = c6();
        let (lp, emb) = build_lane_partition(&g, &ir).unwrap();
        let b = lane_bounds(3).unwrap();
        assert!(lp.k() as u64 <= b.f);
        lp.check_ordered(&ir).unwrap();
        assert!(emb.is_valid_for(&g));
        assert!(emb.weak_congestion() as u64 <= b.g);
        assert!(measure_congestion(&emb) as u64 <= b.h);
        let c = completion(&g, &ir, &lp, false).unwrap();
        let routed: HashSet<_> = emb.routes.iter().map(|r| canon(r.edge.0, r.edge.1)).collect();
        let needed: HashSet<_> = c.e1.iter().chain(&c.e2).map(|&(u, v)| canon(u, v)).filter(|&(u, v)| !g.has_edge(u, v)).collect();
        assert_eq!(routed, needed);
    }

    #[test]
    fn staggered_path_within_bounds() {
        let n = 12;
        let g = path(n);
        let ir = IntervalRepresentation::from_pairs((0..n as i64).map(|v| (v, v + 1))).unwrap();
        let (lp, emb) = build_lane_partition(&g, &ir).unwrap();
        assert!(lp.k() <= 4);
        assert!(measure_congestion(&emb) <= 9);
        assert_eq!(lp.lanes(), &[(0..n).step_by(2).collect::<Vec<_>>(), (1..n).step_by(2).collect::<Vec<_>>()]);
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = Graph::new(2, []).unwrap();
        let ir = IntervalRepresentation::from_pairs([(0, 0), (1, 1)]).unwrap();
        assert_eq!(build_lane_partition(&g, &ir), Err(PartitionError::Graph(GraphError::Disconnected)));
    }

    #[test]
    fn congestion_counts_shared_edges() {
        assert_eq!(measure_congestion(&Embedding::default()), 0);
        let e = Embedding {
            routes: vec![
                Route { edge: (0, 2), kind: VirtualKind::LaneChain, path: vec![0, 1, 2] },
                Route { edge: (1, 3), kind: VirtualKind::LaneChain, path: vec![1, 2, 3] },
            ],
        };
        assert_eq!(e.congestion_map(None)[&(1, 2)], 2);
        assert_eq!(measure_congestion(&e), 2);
    }

    #[test]
    fn loop_erasure_yields_simple_path() {
        assert_eq!(loop_erase(&[0, 1, 2, 1, 3]), vec![0, 1, 3]);
        assert_eq!(loop_erase(&[0, 1, 2, 3, 0, 4]), vec![0, 4]);
        assert_eq!(loop_erase(&[5]), vec![5]);
    }

    #[test]
    fn partition_text_round_trip() {
        let lp = LanePartition::new(vec![vec![0, 2], vec![1]], 3).unwrap();
        assert_eq!(LanePartition::from_text(&lp.to_text(), 3).unwrap(), lp);
        assert!(LanePartition::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(LanePartition::new(vec![vec![0]], 2).is_err());
    }
}
