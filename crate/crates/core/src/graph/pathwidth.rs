//! Exact pathwidth through vertex separation over all vertex subsets.

use super::{Graph, GraphError, VertexId};

pub const DEFAULT_PATHWIDTH_LIMIT: usize = 16;

/// Pathwidth together with the vertex order that attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathwidthWitness {
    pub width: usize,
    pub order: Vec<VertexId>,
}

impl PathwidthWitness {
    /// Per-vertex `[first, last]` positions: a vertex is live from its own position
    /// to the position of its last neighbor.
    pub fn spans(&self, g: &Graph) -> Vec<(usize, usize)> {
        let mut pos = vec![0; g.n()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        (0..g.n())
            .map(|v| {
                let last = g.neighbors(v).iter().map(|&u| pos[u]).max().unwrap_or(pos[v]);
                (pos[v], last.max(pos[v]))
            })
            .collect()
    }

    /// One bag per position in the order.
    pub fn bags(&self, g: &Graph) -> Vec<Vec<VertexId>> {
        let spans = self.spans(g);
        (0..g.n())
            .map(|i| (0..g.n()).filter(|&v| spans[v].0 <= i && i <= spans[v].1).collect())
            .collect()
    }
}

pub fn exact_pathwidth(g: &Graph) -> Result<PathwidthWitness, GraphError> {
    exact_pathwidth_with_limit(g, DEFAULT_PATHWIDTH_LIMIT)
}

/// `best[S]` is the least possible maximum boundary over orders whose prefixes end at `S`.
pub fn exact_pathwidth_with_limit(g: &Graph, limit: usize) -> Result<PathwidthWitness, GraphError> {
    let n = g.n();
    if n > limit || n > 24 {
        return Err(GraphError::TooLarge { n, limit: limit.min(24) });
    }
    if n == 0 {
        return Ok(PathwidthWitness { width: 0, order: Vec::new() });
    }
    let nbr: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = vec![u8::MAX; 1 << n];
    let mut choice = vec![0u8; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let boundary = (0..n).filter(|&v| s >> v & 1 == 1 && nbr[v] & !s & full != 0).count() as u8;
        let mut inner = u8::MAX;
        let mut arg = 0;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let cand = best[(s & !(1 << v)) as usize];
            if cand < inner {
                inner = cand;
                arg = v as u8;
            }
        }
        best[s as usize] = inner.max(boundary);
        choice[s as usize] = arg;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize];
        order.push(v as VertexId);
        s &= !(1 << v);
    }
    order.reverse();
    Ok(PathwidthWitness { width: best[full as usize] as usize, order })
}
