//! Interval representations, path decompositions and greedy lane splitting.
//!
//! Endpoints are inclusive integers. `a ≺ b` holds when `a` ends strictly
//! before `b` starts.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("empty interval [{0}, {1}]")]
    Empty(i64, i64),
    #[error("representation has {found} intervals for {expected} vertices")]
    CountMismatch { expected: usize, found: usize },
    #[error("intervals of edge {{{0}, {1}}} do not intersect")]
    Violation(VertexId, VertexId),
    #[error("vertex {0} appears in non-consecutive bags")]
    NotContiguous(VertexId),
    #[error("vertex {0} appears in no bag")]
    Uncovered(VertexId),
    #[error("edge {{{0}, {1}}} is in no bag")]
    EdgeUncovered(VertexId, VertexId),
    #[error("bag mentions vertex {0} outside the graph")]
    OutOfRange(VertexId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: i64,
    hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::Empty(lo, hi));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(t: i64) -> Self {
        Self { lo: t, hi: t }
    }

    pub fn lo(self) -> i64 {
        self.lo
    }

    pub fn hi(self) -> i64 {
        self.hi
    }

    pub fn contains(self, t: i64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn intersects(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `self ≺ other`.
    pub fn precedes(self, other: Interval) -> bool {
        self.hi < other.lo
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }
}

/// Maximum number of intervals sharing a point.
pub fn width_of(intervals: impl IntoIterator<Item = Interval>) -> usize {
    let mut events: Vec<(i64, i32)> = Vec::new();
    for iv in intervals {
        events.push((iv.lo, 1));
        events.push((iv.hi + 1, -1));
    }
    // Closings at a coordinate sort before openings there.
    events.sort_unstable();
    let mut cur = 0i32;
    let mut best = 0i32;
    for (_, d) in events {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// Sweeps by `(lo, hi, index)` and puts each interval in the smallest lane whose
/// last interval precedes it. Returns a 0-based lane per input interval.
pub fn greedy_lane_split(intervals: &[Interval]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by_key(|&i| (intervals[i].lo, intervals[i].hi, i));
    let mut last_hi: Vec<i64> = Vec::new();
    let mut lane = vec![0; intervals.len()];
    for i in order {
        let iv = intervals[i];
        match last_hi.iter().position(|&h| h < iv.lo) {
            Some(l) => {
                last_hi[l] = iv.hi;
                lane[i] = l;
            }
            None => {
                lane[i] = last_hi.len();
                last_hi.push(iv.hi);
            }
        }
    }
    lane
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalRepresentation {
    intervals: Vec<Interval>,
}

impl IntervalRepresentation {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self { intervals }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, i64)>) -> Result<Self, IntervalError> {
        Ok(Self::new(pairs.into_iter().map(|(l, h)| Interval::new(l, h)).collect::<Result<_, _>>()?))
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Interval {
        self.intervals[v]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// First edge (canonical order) whose endpoint intervals are disjoint.
    pub fn validate(&self, g: &Graph) -> Result<(), IntervalError> {
        if self.intervals.len() != g.n() {
            return Err(IntervalError::CountMismatch { expected: g.n(), found: self.intervals.len() });
        }
        match g.edges().iter().find(|&&(u, v)| !self.intervals[u].intersects(self.intervals[v])) {
            Some(&(u, v)) => Err(IntervalError::Violation(u, v)),
            None => Ok(()),
        }
    }

    pub fn width(&self) -> usize {
        width_of(self.intervals.iter().copied())
    }

    /// Restriction to `vs`, in the given order.
    pub fn restrict(&self, vs: &[VertexId]) -> Vec<Interval> {
        vs.iter().map(|&v| self.intervals[v]).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (v, iv) in self.intervals.iter().enumerate() {
            let _ = writeln!(s, "{v} {} {}", iv.lo, iv.hi);
        }
        s
    }

    /// Lines `v lo hi`; every vertex `0..n` must appear exactly once.
    pub fn from_text(text: &str) -> Result<Self, IntervalError> {
        let mut rows: Vec<Option<Interval>> = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |msg: &str| IntervalError::Parse { line: i + 1, msg: msg.to_string() };
            let f: Vec<i64> = line
                .split_whitespace()
                .map(|x| x.parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad("bad number"))?;
            let [v, lo, hi] = f[..] else { return Err(bad("expected `v lo hi`")) };
            let v = usize::try_from(v).map_err(|_| bad("negative vertex"))?;
            if v >= rows.len() {
                rows.resize(v + 1, None);
            }
            if rows[v].replace(Interval::new(lo, hi)?).is_some() {
                return Err(bad("vertex listed twice"));
            }
        }
        let intervals = rows
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or(IntervalError::Uncovered(v)))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(intervals))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<Vec<VertexId>>,
}

impl PathDecomposition {
    /// Bags are stored sorted and deduplicated.
    pub fn new(bags: Vec<Vec<VertexId>>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        Self { bags }
    }

    pub fn bags(&self) -> &[Vec<VertexId>] {
        &self.bags
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Edge coverage and bag contiguity against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), IntervalError> {
        let ir = decomposition_to_intervals(self, g.n())?;
        match g.edges().iter().find(|&&(u, v)| !ir.get(u).intersects(ir.get(v))) {
            Some(&(u, v)) => Err(IntervalError::EdgeUncovered(u, v)),
            None => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        self.bags.iter().map(|b| b.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n").collect()
    }

    pub fn from_text(text: &str) -> Result<Self, IntervalError> {
        let bags = text
            .lines()
            .enumerate()
            .map(|(i, line)| {
                line.split_whitespace()
                    .map(|x| x.parse::<VertexId>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| IntervalError::Parse { line: i + 1, msg: "bad vertex id".into() })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self::new(bags))
    }
}

/// Bags are numbered from 1; each vertex gets the range of bags containing it.
pub fn decomposition_to_intervals(pd: &PathDecomposition, n: usize) -> Result<IntervalRepresentation, IntervalError> {
    let mut first: Vec<Option<usize>> = vec![None; n];
    let mut last = vec![0usize; n];
    let mut count = vec![0usize; n];
    for (i, bag) in pd.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(IntervalError::OutOfRange(v));
            }
            first[v].get_or_insert(i + 1);
            last[v] = i + 1;
            count[v] += 1;
        }
    }
    let intervals = (0..n)
        .map(|v| {
            let f = first[v].ok_or(IntervalError::Uncovered(v))?;
            if last[v] - f + 1 != count[v] {
                return Err(IntervalError::NotContiguous(v));
            }
            Interval::new(f as i64, last[v] as i64)
        })
        .collect::<Result<_, _>>()?;
    Ok(IntervalRepresentation::new(intervals))
}

/// One bag per distinct left endpoint, holding every interval covering that point.
pub fn intervals_to_decomposition(ir: &IntervalRepresentation) -> PathDecomposition {
    let mut points: Vec<i64> = ir.intervals.iter().map(|iv| iv.lo).collect();
    points.sort_unstable();
    points.dedup();
    let bags = points
        .iter()
        .map(|&t| (0..ir.len()).filter(|&v| ir.intervals[v].contains(t)).collect())
        .collect();
    PathDecomposition::new(bags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn c6_bags() -> PathDecomposition {
        PathDecomposition::new(vec![vec![0, 1, 5], vec![1, 2, 5], vec![2, 5, 4], vec![2, 3, 4]])
    }

    #[test]
    fn validate_reports_first_violation() {
        let ir = IntervalRepresentation::from_pairs([(0, 0), (2, 3)]).unwrap();
        assert_eq!(ir.validate(&path(2)), Err(IntervalError::Violation(0, 1)));
        let single = IntervalRepresentation::from_pairs([(5, 9)]).unwrap();
        assert_eq!(single.validate(&Graph::new(1, []).unwrap()), Ok(()));
        assert!(Interval::new(3, 2).is_err());
    }

    #[test]
    fn cycle_fixture_has_width_three() {
        let ir = decomposition_to_intervals(&c6_bags(), 6).unwrap();
        let expected = [(1, 1), (1, 2), (2, 4), (4, 4), (3, 4), (1, 3)];
        assert_eq!(ir, IntervalRepresentation::from_pairs(expected).unwrap());
        assert_eq!(ir.validate(&cycle(6)), Ok(()));
        assert_eq!(ir.width(), 3);
        assert_eq!(intervals_to_decomposition(&ir), c6_bags());
    }

    #[test]
    fn width_examples() {
        assert_eq!(width_of([iv(1, 3), iv(2, 5), iv(4, 6)]), 2);
        assert_eq!(width_of([iv(0, 0), iv(1, 1), iv(2, 2)]), 1);
        assert_eq!(width_of([iv(0, 0), iv(0, 4), iv(-2, 0)]), 3);
        assert_eq!(width_of([]), 0);
    }

    #[test]
    fn bags_to_intervals_small() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let ir = decomposition_to_intervals(&pd, 3).unwrap();
        assert_eq!(ir, IntervalRepresentation::from_pairs([(1, 1), (1, 2), (2, 2)]).unwrap());
        assert_eq!(pd.width() + 1, ir.width());
        let broken = PathDecomposition::new(vec![vec![0], vec![1], vec![0]]);
        assert_eq!(decomposition_to_intervals(&broken, 2), Err(IntervalError::NotContiguous(0)));
    }

    #[test]
    fn greedy_split_examples() {
        assert_eq!(greedy_lane_split(&[iv(1, 3), iv(2, 5), iv(4, 6)]), vec![0, 1, 0]);
        assert_eq!(greedy_lane_split(&[iv(0, 0), iv(2, 2), iv(1, 1)]), vec![0, 0, 0]);
        assert_eq!(greedy_lane_split(&[iv(0, 3), iv(-1, 0), iv(0, 0)]), vec![2, 0, 1]);
    }

    #[test]
    fn text_formats_round_trip() {
        let ir = IntervalRepresentation::from_pairs([(1, 1), (1, 2), (2, 2)]).unwrap();
        assert_eq!(IntervalRepresentation::from_text(&ir.to_text()).unwrap(), ir);
        assert_eq!(PathDecomposition::from_text(&c6_bags().to_text()).unwrap(), c6_bags());
        assert!(IntervalRepresentation::from_text("0 1 1\n0 2 2\n").is_err());
    }
}
