//! Exhaustive property checks for small graphs, independent of the state algebras.

use super::{HomError, Property};
use crate::graph::Graph;

pub const DEFAULT_BRUTE_LIMIT: usize = 10;

pub fn brute_force_property(g: &Graph, p: Property) -> Result<bool, HomError> {
    brute_force_property_with_limit(g, p, DEFAULT_BRUTE_LIMIT)
}

pub fn brute_force_property_with_limit(g: &Graph, p: Property, limit: usize) -> Result<bool, HomError> {
    if g.n() > limit || g.n() > 24 {
        return Err(HomError::TooLarge { n: g.n(), limit: limit.min(24) });
    }
    Ok(match p {
        Property::Bipartite => two_colorable(g),
        Property::Acyclic => !has_cycle(g),
        Property::PerfectMatching => perfect_matching(g, 0),
        Property::EvenOrder => g.n().is_multiple_of(2),
    })
}

/// Tries every coloring.
fn two_colorable(g: &Graph) -> bool {
    (0u32..1 << g.n()).any(|c| g.edges().iter().all(|&(u, v)| (c >> u & 1) != (c >> v & 1)))
}

/// Depth-first search for a non-tree edge.
fn has_cycle(g: &Graph) -> bool {
    let mut seen = vec![false; g.n()];
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, usize::MAX)];
        while let Some((x, from)) = stack.pop() {
            for &y in g.neighbors(x) {
                if y == from {
                    continue;
                }
                if seen[y] {
                    return true;
                }
                seen[y] = true;
                stack.push((y, x));
            }
        }
    }
    false
}

/// Matches the lowest unmatched vertex with each free neighbor in turn.
fn perfect_matching(g: &Graph, matched: u32) -> bool {
    let Some(x) = (0..g.n()).find(|&x| matched >> x & 1 == 0) else { return true };
    g.neighbors(x).iter().any(|&y| matched >> y & 1 == 0 && perfect_matching(g, matched | 1 << x | 1 << y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{complete, cycle, path, star};

    #[test]
    fn acyclicity() {
        assert!(!brute_force_property(&cycle(6), Property::Acyclic).unwrap());
        assert!(brute_force_property(&star(5), Property::Acyclic).unwrap());
        assert!(brute_force_property(&path(7), Property::Acyclic).unwrap());
    }

    #[test]
    fn bipartiteness_and_matching() {
        assert!(brute_force_property(&cycle(6), Property::Bipartite).unwrap());
        assert!(!brute_force_property(&cycle(5), Property::Bipartite).unwrap());
        assert!(brute_force_property(&path(4), Property::PerfectMatching).unwrap());
        assert!(!brute_force_property(&path(3), Property::PerfectMatching).unwrap());
        assert!(!brute_force_property(&star(3), Property::PerfectMatching).unwrap());
        assert!(brute_force_property(&complete(6), Property::PerfectMatching).unwrap());
    }

    #[test]
    fn size_limit() {
        assert!(matches!(brute_force_property(&path(11), Property::EvenOrder), Err(HomError::TooLarge { .. })));
    }
}
