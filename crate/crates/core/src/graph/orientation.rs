//! Degeneracy orientations and the edge-label to vertex-label transform.
//!
//! A vertex label is `[id width: 6][owner id][count: varint]` followed by
//! `count` entries `[tail id][head id][len: varint][edge label]`, one per
//! edge oriented away from the owner.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Graph, VertexId};
use crate::bits::{id_width, varint_bits, BitReader, BitString, BitWriter, DecodeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    /// `(tail, head)` per edge index of the graph.
    pub arcs: Vec<(VertexId, VertexId)>,
    /// Maximum outdegree.
    pub d: usize,
}

impl Orientation {
    pub fn outdegrees(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for &(t, _) in &self.arcs {
            out[t] += 1;
        }
        out
    }

    /// Kahn's algorithm over the arcs.
    pub fn is_acyclic(&self, n: usize) -> bool {
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(t, h) in &self.arcs {
            indeg[h] += 1;
            succ[t].push(h);
        }
        let mut stack: Vec<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &h in &succ[v] {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
        seen == n
    }
}

/// Repeatedly peels a minimum-degree vertex (smallest id on ties) and orients its
/// remaining edges away from it. The resulting `d` is the degeneracy.
pub fn degeneracy_orientation(g: &Graph) -> Orientation {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queue: BTreeSet<(usize, VertexId)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut removed = vec![false; n];
    let mut arcs = vec![(0, 0); g.m()];
    let mut d = 0;
    while let Some((dv, v)) = queue.pop_first() {
        removed[v] = true;
        d = d.max(dv);
        for &u in g.neighbors(v) {
            if removed[u] {
                continue;
            }
            let e = g.edge_index(u, v).expect("adjacency is consistent");
            arcs[e] = (v, u);
            queue.remove(&(deg[u], u));
            deg[u] -= 1;
            queue.insert((deg[u], u));
        }
    }
    Orientation { arcs, d }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("label owner {found} does not match vertex {expected}")]
    WrongOwner { expected: u64, found: u64 },
    #[error("entry tail {0} is not the label owner")]
    ForeignEntry(u64),
    #[error("edge to {0} has {1} stored labels, expected exactly one")]
    EntryCount(u64, usize),
    #[error("two neighbor labels claim owner {0}")]
    DuplicateNeighbor(u64),
    #[error("stored entry points to non-neighbor {0}")]
    DanglingEntry(u64),
    #[error("inconsistent id widths")]
    IdWidth,
    #[error("trailing bits after label")]
    Trailing,
}

struct DecodedVertexLabel {
    width: u32,
    owner: u64,
    entries: Vec<(u64, u64, BitString)>,
}

fn decode_vertex_label(label: &BitString) -> Result<DecodedVertexLabel, TransformError> {
    let mut r = BitReader::new(label);
    let width = r.bits(6)? as u32;
    if width == 0 {
        return Err(TransformError::IdWidth);
    }
    let owner = r.bits(width)?;
    let count = r.varint()?;
    let mut entries = Vec::new();
    for _ in 0..count {
        let tail = r.bits(width)?;
        let head = r.bits(width)?;
        let len = r.varint()? as usize;
        entries.push((tail, head, r.bitstring(len)?));
    }
    if !r.is_at_end() {
        return Err(TransformError::Trailing);
    }
    Ok(DecodedVertexLabel { width, owner, entries })
}

/// Stores each edge's label at its tail, tagged with both endpoint ids.
pub fn edge_labels_to_vertex_labels(g: &Graph, o: &Orientation, el: &[BitString]) -> Vec<BitString> {
    let width = id_width(g.n());
    let mut per_tail: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (e, &(t, _)) in o.arcs.iter().enumerate() {
        per_tail[t].push(e);
    }
    per_tail
        .iter()
        .enumerate()
        .map(|(v, es)| {
            let mut w = BitWriter::new();
            w.bits(u64::from(width), 6);
            w.bits(v as u64, width);
            w.varint(es.len() as u64);
            for &e in es {
                let (t, h) = o.arcs[e];
                w.bits(t as u64, width);
                w.bits(h as u64, width);
                w.varint(el[e].len() as u64);
                w.bitstring(&el[e]);
            }
            w.finish()
        })
        .collect()
}

/// Size bound on a transformed label given outdegree `d` and the longest edge label.
pub fn vertex_label_bound(n: usize, d: usize, max_edge_bits: usize) -> usize {
    let width = id_width(n) as usize;
    let entry = max_edge_bits + 2 * width + varint_bits(max_edge_bits as u64);
    6 + width + varint_bits(d as u64) + d * entry
}

/// Local reconstruction at vertex `own_id`: returns the label of the edge to each
/// neighbor, in the order the neighbor labels are given, with the neighbor ids.
pub fn reconstruct_incident_labels(
    own_id: VertexId,
    own: &BitString,
    neighbors: &[&BitString],
) -> Result<Vec<(u64, BitString)>, TransformError> {
    let me = decode_vertex_label(own)?;
    if me.owner != own_id as u64 {
        return Err(TransformError::WrongOwner { expected: own_id as u64, found: me.owner });
    }
    if let Some(&(t, _, _)) = me.entries.iter().find(|(t, _, _)| *t != me.owner) {
        return Err(TransformError::ForeignEntry(t));
    }
    let mut out = Vec::with_capacity(neighbors.len());
    let mut owners = BTreeSet::new();
    for nb in neighbors {
        let other = decode_vertex_label(nb)?;
        if other.width != me.width {
            return Err(TransformError::IdWidth);
        }
        if other.owner == me.owner || !owners.insert(other.owner) {
            return Err(TransformError::DuplicateNeighbor(other.owner));
        }
        let mine = me.entries.iter().filter(|(_, h, _)| *h == other.owner).map(|(_, _, l)| l);
        let theirs = other.entries.iter().filter(|(t, h, _)| *t == other.owner && *h == me.owner).map(|(_, _, l)| l);
        let found: Vec<&BitString> = mine.chain(theirs).collect();
        if found.len() != 1 {
            return Err(TransformError::EntryCount(other.owner, found.len()));
        }
        out.push((other.owner, found[0].clone()));
    }
    if let Some(&(_, h, _)) = me.entries.iter().find(|(_, h, _)| !owners.contains(h)) {
        return Err(TransformError::DanglingEntry(h));
    }
    Ok(out)
}

/// Inverse of the transform over the whole graph.
pub fn vertex_labels_to_edge_labels(g: &Graph, vl: &[BitString]) -> Result<Vec<BitString>, TransformError> {
    let mut out = vec![BitString::new(); g.m()];
    for v in 0..g.n() {
        let nbrs: Vec<&BitString> = g.neighbors(v).iter().map(|&u| &vl[u]).collect();
        for (u, label) in reconstruct_incident_labels(v, &vl[v], &nbrs)? {
            let e = g.edge_index(u as usize, v).expect("neighbor owners are neighbor ids");
            out[e] = label;
        }
    }
    Ok(out)
}
