//! Undirected simple graphs with stable ids `0..n`.
//!
//! Edges are stored canonically as `(u, v)` with `u < v`, sorted
//! lexicographically; edge indices refer to that order.

mod orientation;
mod pathwidth;

pub use orientation::{
    degeneracy_orientation, edge_labels_to_vertex_labels, reconstruct_incident_labels,
    vertex_label_bound, vertex_labels_to_edge_labels, Orientation, TransformError,
};
pub use pathwidth::{exact_pathwidth, exact_pathwidth_with_limit, PathwidthWitness, DEFAULT_PATHWIDTH_LIMIT};

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

pub type VertexId = usize;

/// Small input tag attached to a vertex or an edge; 0 means "no input".
pub type InputTag = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("endpoint {v} out of range for {n} vertices")]
    OutOfRange { v: VertexId, n: usize },
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("no edge {{{0}, {1}}}")]
    MissingEdge(VertexId, VertexId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("instance has {n} vertices, limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<VertexId>>,
    vertex_inputs: Vec<InputTag>,
    edge_inputs: Vec<InputTag>,
}

impl Graph {
    /// Builds a graph; pairs are normalized to `(min, max)` before duplicate detection.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self, GraphError> {
        let mut canon = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::OutOfRange { v: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let m = canon.len();
        Ok(Self { n, edges: canon, adj, vertex_inputs: vec![0; n], edge_inputs: vec![0; m] })
    }

    pub fn with_vertex_input(mut self, v: VertexId, tag: InputTag) -> Result<Self, GraphError> {
        if v >= self.n {
            return Err(GraphError::OutOfRange { v, n: self.n });
        }
        self.vertex_inputs[v] = tag;
        Ok(self)
    }

    pub fn with_edge_input(mut self, u: VertexId, v: VertexId, tag: InputTag) -> Result<Self, GraphError> {
        let e = self.edge_index(u, v).ok_or(GraphError::MissingEdge(u, v))?;
        self.edge_inputs[e] = tag;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn vertex_input(&self, v: VertexId) -> InputTag {
        self.vertex_inputs[v]
    }

    pub fn edge_input(&self, e: usize) -> InputTag {
        self.edge_inputs[e]
    }

    pub fn has_inputs(&self) -> bool {
        self.vertex_inputs.iter().chain(&self.edge_inputs).any(|&t| t != 0)
    }

    pub fn edge_index(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// Components ordered by minimum id, each sorted ascending.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        self.components_within(&vec![true; self.n])
    }

    /// Components of the subgraph induced by `allowed`, ordered by minimum id.
    pub fn components_within(&self, allowed: &[bool]) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if !allowed[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in &self.adj[x] {
                    if allowed[y] && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// BFS distances from `src` inside `allowed`; `usize::MAX` marks unreachable.
    pub fn bfs_distances(&self, src: VertexId, allowed: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x] {
                if allowed[y] && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    /// Shortest path from `src` to `dst` inside `allowed`, preferring smaller ids.
    pub fn bfs_path(&self, src: VertexId, dst: VertexId, allowed: &[bool]) -> Option<Vec<VertexId>> {
        let mut parent = vec![usize::MAX; self.n];
        parent[src] = src;
        let mut q = VecDeque::from([src]);
        while let Some(x) = q.pop_front() {
            if x == dst {
                break;
            }
            for &y in &self.adj[x] {
                if allowed[y] && parent[y] == usize::MAX {
                    parent[y] = x;
                    q.push_back(y);
                }
            }
        }
        if parent[dst] == usize::MAX {
            return None;
        }
        let mut path = vec![dst];
        while *path.last()? != src {
            path.push(parent[*path.last()?]);
        }
        path.reverse();
        Some(path)
    }

    /// Canonical text: header `n m`, edges, then nonzero input tags.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        for (v, &t) in self.vertex_inputs.iter().enumerate().filter(|(_, t)| **t != 0) {
            let _ = writeln!(s, "#input {v} {t}");
        }
        for (e, &t) in self.edge_inputs.iter().enumerate().filter(|(_, t)| **t != 0) {
            let (u, v) = self.edges[e];
            let _ = writeln!(s, "#einput {u} {v} {t}");
        }
        s
    }
}

fn parse_fields<T: FromStr>(line: usize, fields: &[&str]) -> Result<Vec<T>, GraphError> {
    fields
        .iter()
        .map(|f| f.parse::<T>().map_err(|_| GraphError::Parse { line, msg: format!("bad number `{f}`") }))
        .collect()
}

impl FromStr for Graph {
    type Err = GraphError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
        let head: Vec<usize> = parse_fields(hl, &header.split_whitespace().collect::<Vec<_>>())?;
        let [n, m] = head[..] else {
            return Err(GraphError::Parse { line: hl, msg: "header must be `n m`".into() });
        };
        let mut edges = Vec::with_capacity(m);
        let mut vinputs = Vec::new();
        let mut einputs = Vec::new();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "#input" if fields.len() == 3 => {
                    let v: Vec<usize> = parse_fields(ln, &fields[1..2])?;
                    let t: Vec<InputTag> = parse_fields(ln, &fields[2..3])?;
                    vinputs.push((v[0], t[0]));
                }
                "#einput" if fields.len() == 4 => {
                    let uv: Vec<usize> = parse_fields(ln, &fields[1..3])?;
                    let t: Vec<InputTag> = parse_fields(ln, &fields[3..4])?;
                    einputs.push((uv[0], uv[1], t[0]));
                }
                f if f.starts_with('#') => {
                    return Err(GraphError::Parse { line: ln, msg: format!("unknown directive `{f}`") })
                }
                _ if fields.len() == 2 => {
                    let uv: Vec<usize> = parse_fields(ln, &fields)?;
                    edges.push((uv[0], uv[1]));
                }
                _ => return Err(GraphError::Parse { line: ln, msg: "expected `u v`".into() }),
            }
        }
        if edges.len() != m {
            return Err(GraphError::Parse { line: hl, msg: format!("header says {m} edges, found {}", edges.len()) });
        }
        let mut g = Graph::new(n, edges)?;
        for (v, t) in vinputs {
            g = g.with_vertex_input(v, t)?;
        }
        for (u, v, t) in einputs {
            g = g.with_edge_input(u, v, t)?;
        }
        Ok(g)
    }
}

/// Common small graphs used by tests, generators and examples.
pub mod families {
    use super::{Graph, VertexId};

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<(VertexId, VertexId)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star is simple")
    }
}
