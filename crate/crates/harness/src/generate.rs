//! Seeded instance generators. Every instance ships with a witness the
//! prover can use directly, so no pathwidth search is needed at scale.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use lanecert::graph::families::{cycle, path};
use lanecert::graph::{Graph, GraphError};
use lanecert::interval::{Interval, IntervalError, IntervalRepresentation};
use lanecert::lane_recursive::{applied_graph_intervals, apply_op_sequence, LaneError, Op, OpSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Lane(#[from] LaneError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Path,
    Cycle,
    /// A spine where every spine vertex carries `legs` leaves (the last one
    /// may carry fewer so the vertex count comes out exact).
    Caterpillar { legs: usize },
    /// Random V-/E-insert sequence over `k` lanes; `density` is the chance
    /// that a step tries an E-insert instead of a V-insert.
    RandomOps { k: usize, density: f64 },
    /// Random interval model of width at most `k + 1` with edges between
    /// overlapping intervals.
    RandomPathwidth { k: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path => f.write_str("path"),
            Family::Cycle => f.write_str("cycle"),
            Family::Caterpillar { legs } => write!(f, "caterpillar({legs})"),
            Family::RandomOps { k, density } => write!(f, "random-ops({k},{density})"),
            Family::RandomPathwidth { k } => write!(f, "random-pathwidth({k})"),
        }
    }
}

impl FromStr for Family {
    type Err = GenError;

    /// Accepts `path`, `cycle`, `caterpillar(L)`, `random-ops(K,D)` and
    /// `random-pathwidth(K)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenError::Invalid(format!("unknown family `{s}`"));
        let (name, args) = match s.split_once('(') {
            Some((name, rest)) => (name, rest.strip_suffix(')').ok_or_else(bad)?.split(',').map(str::trim).collect::<Vec<_>>()),
            None => (s, Vec::new()),
        };
        let num = |i: usize| -> Result<usize, GenError> { args.get(i).and_then(|a| a.parse().ok()).ok_or_else(bad) };
        match (name, args.len()) {
            ("path", 0) => Ok(Family::Path),
            ("cycle", 0) => Ok(Family::Cycle),
            ("caterpillar", 0) => Ok(Family::Caterpillar { legs: 1 }),
            ("caterpillar", 1) => Ok(Family::Caterpillar { legs: num(0)? }),
            ("random-ops", 2) => Ok(Family::RandomOps { k: num(0)?, density: args[1].parse().map_err(|_| bad())? }),
            ("random-pathwidth", 1) => Ok(Family::RandomPathwidth { k: num(0)? }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Intervals(IntervalRepresentation),
    Ops(OpSequence),
}

impl Witness {
    pub fn intervals(&self) -> Result<IntervalRepresentation, LaneError> {
        match self {
            Witness::Intervals(ir) => Ok(ir.clone()),
            Witness::Ops(s) => applied_graph_intervals(s),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Witness::Intervals(ir) => ir.to_text(),
            Witness::Ops(s) => s.to_text(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: GeneratorSpec,
    pub graph: Graph,
    pub witness: Witness,
}

impl Instance {
    /// Pathwidth bound certified by the witness.
    pub fn pathwidth_bound(&self) -> Result<usize, LaneError> {
        Ok(self.witness.intervals()?.width().saturating_sub(1))
    }
}

fn iv(lo: i64, hi: i64) -> Interval {
    Interval::new(lo, hi).expect("lo <= hi by construction")
}

pub fn generate(spec: GeneratorSpec) -> Result<Instance, GenError> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (graph, witness) = match spec.family {
        Family::Path => {
            if n == 0 {
                return Err(GenError::Invalid("path needs n >= 1".into()));
            }
            let ir = IntervalRepresentation::new((0..n as i64).map(|v| iv(v, v + 1)).collect());
            (path(n), Witness::Intervals(ir))
        }
        Family::Cycle => {
            if n < 3 {
                return Err(GenError::Invalid("cycle needs n >= 3".into()));
            }
            // Vertex 0 spans everything; the rest form a chain of unit steps.
            let ir = IntervalRepresentation::new(
                std::iter::once(iv(0, n as i64 - 1)).chain((1..n as i64).map(|v| iv(v - 1, v))).collect(),
            );
            (cycle(n), Witness::Intervals(ir))
        }
        Family::Caterpillar { legs } => caterpillar(n, legs)?,
        Family::RandomOps { k, density } => {
            if k == 0 || n < k || !(0.0..=1.0).contains(&density) {
                return Err(GenError::Invalid("random-ops needs 1 <= k <= n and density in [0, 1]".into()));
            }
            let s = random_ops(&mut rng, k, n, density);
            (apply_op_sequence(&s)?.graph, Witness::Ops(s))
        }
        Family::RandomPathwidth { k } => {
            if k == 0 || n == 0 {
                return Err(GenError::Invalid("random-pathwidth needs k >= 1 and n >= 1".into()));
            }
            random_pathwidth(&mut rng, k, n)?
        }
    };
    Ok(Instance { spec, graph, witness })
}

fn caterpillar(n: usize, legs: usize) -> Result<(Graph, Witness), GenError> {
    if n == 0 {
        return Err(GenError::Invalid("caterpillar needs n >= 1".into()));
    }
    let spine = n.div_ceil(legs + 1);
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
    let mut intervals = vec![iv(0, 0); n];
    let (mut next, mut t) = (spine, 0i64);
    for s in 0..spine {
        // Leaves take private points inside their spine vertex's interval;
        // consecutive spine intervals share exactly one endpoint.
        let lo = t;
        for _ in 0..legs.min(n - next) {
            t += 1;
            intervals[next] = iv(t, t);
            edges.push((s, next));
            next += 1;
        }
        t += 1;
        intervals[s] = iv(lo, t);
    }
    Ok((Graph::new(n, edges)?, Witness::Intervals(IntervalRepresentation::new(intervals))))
}

fn random_ops(rng: &mut impl Rng, k: usize, n: usize, density: f64) -> OpSequence {
    let mut tails: Vec<usize> = (0..k).collect();
    let mut edges: HashSet<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
    let mut ops = Vec::new();
    let mut next = k;
    while next < n {
        if k >= 2 && rng.gen_bool(density) {
            let a = rng.gen_range(0..k);
            let b = (a + rng.gen_range(1..k)) % k;
            let e = (tails[a].min(tails[b]), tails[a].max(tails[b]));
            if edges.insert(e) {
                ops.push(Op::EInsert { a: a + 1, b: b + 1 });
            }
        } else {
            let lane = rng.gen_range(0..k);
            edges.insert((tails[lane], next));
            ops.push(Op::VInsert { lane: lane + 1, vertex: next });
            tails[lane] = next;
            next += 1;
        }
    }
    OpSequence::new(k, ops)
}

fn random_pathwidth(rng: &mut impl Rng, k: usize, n: usize) -> Result<(Graph, Witness), GenError> {
    // Vertex v starts at point v and lives for 1..=k further points, so at
    // most k + 1 intervals cover any point and v - 1 is alive when v starts.
    let ends: Vec<usize> = (0..n).map(|v| v + rng.gen_range(1..=k)).collect();
    let mut edges = Vec::new();
    for v in 1..n {
        let alive: Vec<usize> = (v.saturating_sub(k)..v).filter(|&u| ends[u] >= v).collect();
        let parent = alive[rng.gen_range(0..alive.len())];
        edges.push((parent, v));
        edges.extend(alive.into_iter().filter(|&u| u != parent && rng.gen_bool(0.3)).map(|u| (u, v)));
    }
    let ir = IntervalRepresentation::new((0..n).map(|v| iv(v as i64, ends[v] as i64)).collect());
    Ok((Graph::new(n, edges)?, Witness::Intervals(ir)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lanecert::graph::exact_pathwidth;

    fn spec(family: Family, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec { family, n, seed }
    }

    #[test]
    fn witnesses_validate() {
        let families = [
            Family::Path,
            Family::Cycle,
            Family::Caterpillar { legs: 0 },
            Family::Caterpillar { legs: 3 },
            Family::RandomOps { k: 3, density: 0.4 },
            Family::RandomPathwidth { k: 2 },
        ];
        for family in families {
            for n in [3, 4, 17, 200] {
                let inst = generate(spec(family, n, 5)).unwrap();
                assert_eq!(inst.graph.n(), n, "{family}");
                assert!(inst.graph.is_connected(), "{family}");
                inst.witness.intervals().unwrap().validate(&inst.graph).unwrap();
            }
        }
    }

    #[test]
    fn path_and_cycle_witness_widths() {
        let p = generate(spec(Family::Path, 100, 0)).unwrap();
        assert_eq!(p.pathwidth_bound().unwrap(), 1);
        let c = generate(spec(Family::Cycle, 100, 0)).unwrap();
        assert_eq!(c.pathwidth_bound().unwrap(), 2);
    }

    #[test]
    fn random_ops_replay_is_deterministic() {
        let s = spec(Family::RandomOps { k: 3, density: 0.3 }, 50, 7);
        let (a, b) = (generate(s).unwrap(), generate(s).unwrap());
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.witness, b.witness);
        let Witness::Ops(ops) = &a.witness else { panic!("ops witness expected") };
        assert_eq!(ops.k, 3);
        assert_eq!(apply_op_sequence(ops).unwrap().graph, a.graph);
        assert_ne!(generate(GeneratorSpec { seed: 8, ..s }).unwrap().graph, a.graph);
    }

    #[test]
    fn random_pathwidth_respects_its_bound() {
        for seed in 0..20 {
            let inst = generate(spec(Family::RandomPathwidth { k: 2 }, 12, seed)).unwrap();
            assert!(inst.pathwidth_bound().unwrap() <= 2);
            assert!(exact_pathwidth(&inst.graph).unwrap().width <= 2);
        }
    }

    #[test]
    fn family_names_parse() {
        for f in [Family::Path, Family::Caterpillar { legs: 2 }, Family::RandomOps { k: 2, density: 0.5 }, Family::RandomPathwidth { k: 3 }] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("random-ops(2)".parse::<Family>().is_err());
    }

    #[test]
    fn bad_specs_are_refused() {
        assert!(generate(spec(Family::Cycle, 2, 0)).is_err());
        assert!(generate(spec(Family::RandomOps { k: 4, density: 0.1 }, 3, 0)).is_err());
    }
}
