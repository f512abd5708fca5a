//! The local verifier.
//!
//! First the host view: split labels into sections, pair up route sections
//! into virtual edges, and recover the completion edges at this vertex. Then
//! the completion view: walk the certificate levels, recompute each member's
//! class and terminals from what the vertex sees, and check that the members
//! meeting at this vertex are glued the way their parents claim.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::homomorphism::{compose_bridge, compose_parent, HomClass, Property};
use crate::lane_recursive::{KLaneGraph, Lane};

use super::label::{decode_own, decode_route, read_sections, BasicInfo, BridgePart, EdgeCert, EdgeSide, Member, MemberData, RouteSection, SectionKind};
use super::pointer::check_arcs;
use super::{LocalView, RejectReason, Scheme};

/// A completion edge at this vertex.
struct Incident {
    cert: EdgeCert,
    other: u64,
    /// Whether it is a host edge.
    marked: bool,
}

struct Group<'a> {
    member: &'a Member,
    edges: Vec<&'a Incident>,
    own: BasicInfo,
    kids: Vec<BasicInfo>,
    sub: BasicInfo,
}

fn ensure(cond: bool, reason: RejectReason) -> Result<(), RejectReason> {
    if cond {
        Ok(())
    } else {
        Err(reason)
    }
}

pub fn verify_vertex(scheme: &Scheme, view: &LocalView) -> Result<(), RejectReason> {
    ensure(view.input == 0 && view.edges.iter().all(|(t, _)| *t == 0), RejectReason::UnsupportedInput)?;
    if view.edges.is_empty() {
        return ensure(scheme.single_vertex_accepts(), RejectReason::SingleVertex);
    }
    let incident = completion_edges(scheme, view)?;
    let mut seen = HashSet::new();
    ensure(incident.iter().all(|e| seen.insert(e.other)), RejectReason::DuplicateNeighbor)?;

    let first = &incident[0].cert;
    ensure(
        incident.iter().all(|e| e.cert.width == first.width && e.cert.lanes == first.lanes && e.cert.root == first.root),
        RejectReason::GlobalMismatch,
    )?;
    ensure(first.width < 64 && view.id >> first.width == 0, RejectReason::IdRange)?;
    let kl = first.lanes;
    ensure((2..=scheme.lane_bound()).contains(&kl), RejectReason::LaneBound)?;
    let root = &first.root;
    ensure(root.lanes().iter().copied().eq(1..=kl) && root.is_consistent(), RejectReason::MemberShape)?;
    ensure(root.class.accepts(), RejectReason::RootRejects)?;
    let ctx = Ctx { id: view.id, p: scheme.property, kl };
    let refs: Vec<&Incident> = incident.iter().collect();
    ctx.check_level(&refs, 0, root)
}

/// Own certificates plus virtual edges ending here.
fn completion_edges(scheme: &Scheme, view: &LocalView) -> Result<Vec<Incident>, RejectReason> {
    let (id, p) = (view.id, scheme.property);
    let mut incident = Vec::new();
    let mut routes: BTreeMap<(u64, u64), Vec<(usize, RouteSection)>> = BTreeMap::new();
    for (ei, (_, label)) in view.edges.iter().enumerate() {
        let sections = read_sections(label)?;
        let mut own = sections.iter().filter(|(k, _)| *k == SectionKind::Own);
        let (Some((_, payload)), None) = (own.next(), own.next()) else {
            return Err(RejectReason::OwnCount);
        };
        let route_count = sections.len() - 1;
        ensure(route_count <= scheme.route_bound(), RejectReason::TooManyRoutes)?;
        let cert = decode_own(payload, p)?;
        ensure(cert.lo < cert.hi && (cert.lo == id || cert.hi == id), RejectReason::Endpoint)?;
        let other = if cert.lo == id { cert.hi } else { cert.lo };
        let (width, lanes) = (cert.width, cert.lanes);
        incident.push(Incident { cert, other, marked: true });
        for (_, payload) in sections.iter().filter(|(k, _)| *k == SectionKind::Route) {
            let rs = decode_route(payload, p, width, lanes)?;
            routes.entry((rs.cert.lo, rs.cert.hi)).or_default().push((ei, rs));
        }
    }
    for ((lo, hi), secs) in routes {
        ensure(lo < hi, RejectReason::Endpoint)?;
        match secs.as_slice() {
            [(_, s)] => {
                // An end of the route: exactly one rank is 1, and it names this vertex.
                ensure((s.fwd == 1) != (s.bwd == 1), RejectReason::RouteEnd)?;
                let (start, end) = if s.from_lo { (lo, hi) } else { (hi, lo) };
                let (me, other) = if s.fwd == 1 { (start, end) } else { (end, start) };
                ensure(me == id, RejectReason::RouteEnd)?;
                let cert = s.cert.clone();
                incident.push(Incident { cert, other, marked: false });
            }
            [(ea, a), (eb, b)] => {
                let consecutive = |x: &RouteSection, y: &RouteSection| x.fwd + 1 == y.fwd && x.bwd == y.bwd + 1;
                ensure(
                    ea != eb
                        && a.cert == b.cert
                        && a.from_lo == b.from_lo
                        && (consecutive(a, b) || consecutive(b, a))
                        && id != lo
                        && id != hi,
                    RejectReason::RouteMismatch,
                )?;
            }
            _ => return Err(RejectReason::RouteMismatch),
        }
    }
    Ok(incident)
}

struct Ctx {
    id: u64,
    p: Property,
    kl: usize,
}

fn vertex_info(p: Property, lane: Lane, id: u64) -> Result<BasicInfo, RejectReason> {
    let class = HomClass::of_fragment(p, &KLaneGraph::vertex(lane, id as usize), &|_, _| true)?;
    Ok(BasicInfo { class, tin: vec![id], tout: vec![id] })
}

fn distinct(ids: &[u64]) -> bool {
    let mut seen = HashSet::new();
    ids.iter().all(|v| seen.insert(*v))
}

impl Ctx {
    /// Checks the edges at this vertex that lie in one T-node at certificate
    /// level `l`, whose claimed terminals and class are `t`.
    fn check_level(&self, edges: &[&Incident], l: usize, t: &BasicInfo) -> Result<(), RejectReason> {
        ensure(edges.iter().all(|e| e.cert.levels.len() > l), RejectReason::MissingLevel)?;
        let target = edges[0].cert.levels[l].ptr.target;
        ensure(edges.iter().all(|e| e.cert.levels[l].ptr.target == target), RejectReason::PointerTarget)?;
        // The pointer names the first in-terminal of the T-node.
        ensure(t.tin.first() == Some(&target), RejectReason::PointerTarget)?;
        check_arcs(self.id, target, edges.iter().map(|e| &e.cert.levels[l].ptr.arc))?;

        let mut grouped: Vec<(&Member, Vec<&Incident>)> = Vec::new();
        for &e in edges {
            let m = &e.cert.levels[l].member;
            match grouped.iter_mut().find(|(g, _)| *g == m) {
                Some((_, list)) => list.push(e),
                None => grouped.push((m, vec![e])),
            }
        }
        let mut groups = Vec::with_capacity(grouped.len());
        for (member, list) in grouped {
            groups.push(self.check_member(member, list, l)?);
        }
        for g in groups.iter().filter(|g| g.member.depth == 0) {
            ensure(g.sub == *t, RejectReason::ClassMismatch)?;
        }
        self.check_links(&groups)?;
        if self.id == target {
            ensure(groups.iter().any(|g| g.member.depth == 0), RejectReason::PointerNoParent)?;
        }
        for g in &groups {
            if let MemberData::B { left, right, .. } = &g.member.data {
                for (side, part) in [(EdgeSide::Left, left), (EdgeSide::Right, right)] {
                    let inner: Vec<&Incident> = g.edges.iter().copied().filter(|e| e.cert.levels[l].side == Some(side)).collect();
                    if inner.is_empty() {
                        continue;
                    }
                    let BridgePart::Tree(info) = part else {
                        return Err(RejectReason::Bridge);
                    };
                    self.check_level(&inner, l + 1, info)?;
                }
            }
        }
        Ok(())
    }

    /// Recomputes a member's own fragment data from its incident edges here,
    /// then its merge subtree from the listed kids.
    fn check_member<'a>(&self, member: &'a Member, edges: Vec<&'a Incident>, l: usize) -> Result<Group<'a>, RejectReason> {
        let (id, p) = (self.id, self.p);
        let last = |e: &Incident| e.cert.levels.len() == l + 1;
        let own = match &member.data {
            MemberData::E { lane, tin, tout } => {
                let [e] = edges[..] else {
                    return Err(RejectReason::MemberEdges);
                };
                let ends = (id == *tin && e.other == *tout) || (id == *tout && e.other == *tin);
                ensure(tin != tout && ends && last(e), RejectReason::MemberEdges)?;
                let marked = e.marked;
                let class = HomClass::of_fragment(p, &KLaneGraph::edge(*lane, *tin as usize, *tout as usize), &|_, _| marked)?;
                BasicInfo { class, tin: vec![*tin], tout: vec![*tout] }
            }
            MemberData::P { path, marks } => {
                ensure(l == 0 && member.depth == 0 && path.len() == self.kl && distinct(path), RejectReason::MemberShape)?;
                let pos = path.iter().position(|&v| v == id).ok_or(RejectReason::MemberEdges)?;
                let expected: Vec<(u64, bool)> = [pos.checked_sub(1), Some(pos + 1).filter(|&q| q < path.len())]
                    .into_iter()
                    .flatten()
                    .map(|q| (path[q], marks[q.min(pos)]))
                    .collect();
                ensure(
                    edges.len() == expected.len()
                        && edges.iter().all(|e| last(e) && expected.contains(&(e.other, e.marked))),
                    RejectReason::MemberEdges,
                )?;
                let frag = KLaneGraph::path(&path.iter().map(|&v| v as usize).collect::<Vec<_>>());
                let mark_of: HashMap<(usize, usize), bool> =
                    path.windows(2).zip(marks).map(|(w, &m)| ((w[0].min(w[1]) as usize, w[0].max(w[1]) as usize), m)).collect();
                let class = HomClass::of_fragment(p, &frag, &|u, v| mark_of[&(u.min(v), u.max(v))])?;
                BasicInfo { class, tin: path.clone(), tout: path.clone() }
            }
            MemberData::B { i, j, left, right, bridge_marked } => self.check_bridge(&edges, l, (*i, *j), (left, right), *bridge_marked)?,
        };
        ensure(own.is_consistent(), RejectReason::MemberShape)?;

        let mut kids = Vec::with_capacity(member.kids.len());
        let mut covered = HashSet::new();
        let mut acc = own.class.clone();
        let mut sub_tout = own.tout.clone();
        for kid in &member.kids {
            let mut tin = Vec::new();
            for &lane in kid.class.lanes() {
                ensure(covered.insert(lane), RejectReason::MemberShape)?;
                tin.push(own.tout_of(lane).ok_or(RejectReason::MemberShape)?);
            }
            let tout = kid.tout.iter().zip(&tin).map(|(o, &a)| o.unwrap_or(a)).collect();
            let info = BasicInfo { class: kid.class.clone(), tin, tout };
            ensure(info.is_consistent(), RejectReason::MemberShape)?;
            acc = compose_parent(&info.class, &acc)?;
            for (&lane, &o) in info.lanes().iter().zip(&info.tout) {
                sub_tout[own.index(lane).expect("covered lane")] = o;
            }
            kids.push(info);
        }
        let sub = BasicInfo { class: acc, tin: own.tin.clone(), tout: sub_tout };
        ensure(sub.is_consistent(), RejectReason::ClassMismatch)?;
        Ok(Group { member, edges, own, kids, sub })
    }

    fn check_bridge(
        &self,
        edges: &[&Incident],
        l: usize,
        (i, j): (Lane, Lane),
        (left, right): (&BridgePart, &BridgePart),
        bridge_marked: bool,
    ) -> Result<BasicInfo, RejectReason> {
        let id = self.id;
        let part_info = |part: &BridgePart, lane: Lane| -> Result<BasicInfo, RejectReason> {
            match part {
                BridgePart::Vertex { id } => vertex_info(self.p, lane, *id),
                BridgePart::Tree(info) => {
                    ensure(info.is_consistent(), RejectReason::MemberShape)?;
                    Ok(info.clone())
                }
            }
        };
        let (li, ri) = (part_info(left, i)?, part_info(right, j)?);
        ensure(i != j && li.lanes().iter().all(|x| ri.index(*x).is_none()), RejectReason::MemberShape)?;
        let a = li.tout_of(i).ok_or(RejectReason::MemberShape)?;
        let b = ri.tout_of(j).ok_or(RejectReason::MemberShape)?;
        let mut tin = BTreeMap::new();
        let mut tout = BTreeMap::new();
        for info in [&li, &ri] {
            for (k, &lane) in info.lanes().iter().enumerate() {
                tin.insert(lane, info.tin[k]);
                tout.insert(lane, info.tout[k]);
            }
        }
        let class = compose_bridge(&li.class, &ri.class, i, j, bridge_marked)?;

        let side = |e: &Incident| e.cert.levels[l].side;
        let bridges: Vec<&&Incident> = edges.iter().filter(|e| side(e) == Some(EdgeSide::Bridge)).collect();
        let has_left = edges.iter().any(|e| side(e) == Some(EdgeSide::Left));
        let has_right = edges.iter().any(|e| side(e) == Some(EdgeSide::Right));
        ensure(!(has_left && has_right) && bridges.len() <= 1, RejectReason::Bridge)?;
        for e in &bridges {
            let ends = (id == a && e.other == b) || (id == b && e.other == a);
            ensure(ends && e.marked == bridge_marked && e.cert.levels.len() == l + 1, RejectReason::Bridge)?;
        }
        if id == a {
            ensure(bridges.len() == 1 && !has_right, RejectReason::Bridge)?;
        } else if id == b {
            ensure(bridges.len() == 1 && !has_left, RejectReason::Bridge)?;
        } else {
            ensure(bridges.is_empty(), RejectReason::Bridge)?;
        }
        // Each single-vertex side is proven present by its own pointer instance.
        let vertex_ids: Vec<u64> = [left, right]
            .into_iter()
            .filter_map(|part| match part {
                BridgePart::Vertex { id, .. } => Some(*id),
                BridgePart::Tree(_) => None,
            })
            .collect();
        for (q, &vid) in vertex_ids.iter().enumerate() {
            check_arcs(id, vid, edges.iter().map(|e| &e.cert.levels[l].vptr[q]))?;
        }
        Ok(BasicInfo { class, tin: tin.into_values().collect(), tout: tout.into_values().collect() })
    }

    /// Every member meeting this vertex is either where the vertex enters
    /// the T-node (exactly one such) or glued under a parent listed here.
    fn check_links(&self, groups: &[Group<'_>]) -> Result<(), RejectReason> {
        let id = self.id;
        let ins = |g: &Group<'_>| -> Vec<Lane> { g.own.lanes().iter().copied().filter(|&x| g.own.tin_of(x) == Some(id)).collect() };
        let tops = groups.iter().filter(|g| g.member.depth == 0 || ins(g).is_empty()).count();
        ensure(tops == 1, RejectReason::Linkage)?;
        for g in groups.iter().filter(|g| g.member.depth > 0 && !ins(g).is_empty()) {
            let lane = ins(g)[0];
            let parent = groups
                .iter()
                .find(|pg| pg.member.depth + 1 == g.member.depth && pg.own.tout_of(lane) == Some(id))
                .ok_or(RejectReason::Linkage)?;
            let glued = g.own.lanes().iter().all(|&x| parent.own.tout_of(x) == g.own.tin_of(x));
            ensure(glued && parent.kids.contains(&g.sub), RejectReason::Linkage)?;
        }
        for pg in groups {
            for kid in &pg.kids {
                let Some(&lane) = kid.lanes().iter().find(|&&x| kid.tin_of(x) == Some(id)) else {
                    continue;
                };
                let found = groups
                    .iter()
                    .any(|g| g.member.depth == pg.member.depth + 1 && g.own.tin_of(lane) == Some(id) && g.sub == *kid);
                ensure(found, RejectReason::Linkage)?;
            }
        }
        Ok(())
    }
}
