//! Certificate contents and their bit layout.
//!
//! A completion-edge certificate lists, from the top-level T-node down, one
//! level per T-node containing the edge: the T-node's root pointer and the
//! merge-tree member holding the edge. A host edge's label is a sequence of
//! self-delimiting sections: its own certificate (if it is a completion edge,
//! which every host edge is) and one route section per virtual edge routed
//! through it.

use crate::bits::{BitReader, BitString, BitWriter, DecodeError};
use crate::homomorphism::{HomClass, HomError, Property, MAX_LANES};
use crate::lane_recursive::Lane;

use super::pointer::{decode_arc, encode_arc, PointerLabel, TreeArc};

/// Lane set, class and terminal ids of a fragment. `tout` repeats `tin` on
/// lanes whose terminals coincide.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasicInfo {
    pub class: HomClass,
    pub tin: Vec<u64>,
    pub tout: Vec<u64>,
}

impl BasicInfo {
    pub fn lanes(&self) -> &[Lane] {
        self.class.lanes()
    }

    pub fn index(&self, l: Lane) -> Option<usize> {
        self.lanes().binary_search(&l).ok()
    }

    pub fn tin_of(&self, l: Lane) -> Option<u64> {
        self.index(l).map(|i| self.tin[i])
    }

    pub fn tout_of(&self, l: Lane) -> Option<u64> {
        self.index(l).map(|i| self.tout[i])
    }

    /// Coincidence bits agree with the ids and ids are injective per direction.
    pub fn is_consistent(&self) -> bool {
        let n = self.lanes().len();
        let distinct = |v: &[u64]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        self.tin.len() == n
            && self.tout.len() == n
            && self.lanes().iter().enumerate().all(|(i, &l)| self.class.same(l) == Some(self.tin[i] == self.tout[i]))
            && distinct(&self.tin)
            && distinct(&self.tout)
    }

    fn encode(&self, w: &mut BitWriter, k: usize, width: u32) {
        self.class.encode(w, k);
        self.encode_ids(w, width);
    }

    fn encode_ids(&self, w: &mut BitWriter, width: u32) {
        for i in 0..self.tin.len() {
            w.bits(self.tin[i], width);
            if self.tin[i] != self.tout[i] {
                w.bits(self.tout[i], width);
            }
        }
    }

    fn decode(r: &mut BitReader<'_>, p: Property, k: usize, width: u32) -> Result<Self, HomError> {
        let class = HomClass::decode(r, p, k)?;
        Self::decode_ids(r, class, width)
    }

    /// The root spans every lane, so its lane mask is left out.
    fn encode_root(&self, w: &mut BitWriter, width: u32) {
        self.class.encode_without_lanes(w);
        self.encode_ids(w, width);
    }

    fn decode_root(r: &mut BitReader<'_>, p: Property, k: usize, width: u32) -> Result<Self, HomError> {
        let class = HomClass::decode_with_lanes(r, p, (1..=k).collect())?;
        Self::decode_ids(r, class, width)
    }

    fn decode_ids(r: &mut BitReader<'_>, class: HomClass, width: u32) -> Result<Self, HomError> {
        let mut tin = Vec::new();
        let mut tout = Vec::new();
        for &l in class.lanes() {
            let same = class.same(l).expect("own lane");
            let a = r.bits(width)?;
            tin.push(a);
            tout.push(if same { a } else { r.bits(width)? });
        }
        Ok(BasicInfo { class, tin, tout })
    }
}

/// One side of a bridge: a single vertex or a T-node. A single vertex sits
/// on the bridge's lane for its side, so only its id is stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BridgePart {
    Vertex { id: u64 },
    Tree(BasicInfo),
}

// Short-lived decode results; boxing the bridge variant buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MemberData {
    E { lane: Lane, tin: u64, tout: u64 },
    /// Path vertex ids in lane order and whether each path edge is a host edge.
    P { path: Vec<u64>, marks: Vec<bool> },
    B { i: Lane, j: Lane, left: BridgePart, right: BridgePart, bridge_marked: bool },
}

/// Merge-tree children are stored by class and out-ids; their in-ids are the
/// member's out-ids on their lanes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KidInfo {
    pub class: HomClass,
    /// Out-id per kid lane; `None` where the kid's terminals coincide.
    pub tout: Vec<Option<u64>>,
}

/// The part of a level shared by every edge of one merge-tree member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Member {
    pub data: MemberData,
    /// Depth in the enclosing merge tree; the root member has depth 0.
    pub depth: u64,
    pub kids: Vec<KidInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSide {
    Bridge,
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    /// The T-node's pointer to a vertex of its root member.
    pub ptr: PointerLabel,
    pub member: Member,
    /// For a B member: where the edge sits.
    pub side: Option<EdgeSide>,
    /// For a B member: one pointer arc per single-vertex side, left first.
    pub vptr: Vec<Option<TreeArc>>,
}

/// Certificate of one completion edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeCert {
    pub width: u32,
    pub lanes: usize,
    pub lo: u64,
    pub hi: u64,
    pub root: BasicInfo,
    pub levels: Vec<Level>,
}

fn check_len(count: u64, remaining: usize) -> Result<usize, HomError> {
    if count as usize > remaining {
        return Err(DecodeError::Eof(remaining).into());
    }
    Ok(count as usize)
}

fn decode_lane(r: &mut BitReader<'_>, k: usize) -> Result<Lane, HomError> {
    let l = r.gamma()? as usize + 1;
    if l > k {
        return Err(HomError::MissingLane(l));
    }
    Ok(l)
}

impl BridgePart {
    pub fn is_vertex(&self) -> bool {
        matches!(self, BridgePart::Vertex { .. })
    }

    fn encode(&self, w: &mut BitWriter, k: usize, width: u32) {
        match self {
            BridgePart::Vertex { id } => {
                w.bit(false);
                w.bits(*id, width);
            }
            BridgePart::Tree(info) => {
                w.bit(true);
                info.encode(w, k, width);
            }
        }
    }

    fn decode(r: &mut BitReader<'_>, p: Property, k: usize, width: u32) -> Result<Self, HomError> {
        if r.bit()? {
            Ok(BridgePart::Tree(BasicInfo::decode(r, p, k, width)?))
        } else {
            Ok(BridgePart::Vertex { id: r.bits(width)? })
        }
    }
}

impl Member {
    fn encode(&self, w: &mut BitWriter, k: usize, width: u32) {
        match &self.data {
            MemberData::E { lane, tin, tout } => {
                w.bits(0, 2);
                w.gamma(*lane as u64 - 1);
                w.bits(*tin, width);
                w.bits(*tout, width);
            }
            MemberData::P { path, marks } => {
                w.bits(1, 2);
                for &v in path {
                    w.bits(v, width);
                }
                for &m in marks {
                    w.bit(m);
                }
            }
            MemberData::B { i, j, left, right, bridge_marked } => {
                w.bits(2, 2);
                w.gamma(*i as u64 - 1);
                w.gamma(*j as u64 - 1);
                left.encode(w, k, width);
                right.encode(w, k, width);
                w.bit(*bridge_marked);
            }
        }
        w.gamma(self.depth);
        w.gamma(self.kids.len() as u64);
        for kid in &self.kids {
            kid.class.encode(w, k);
            for o in kid.tout.iter().flatten() {
                w.bits(*o, width);
            }
        }
    }

    fn decode(r: &mut BitReader<'_>, p: Property, k: usize, width: u32) -> Result<Self, HomError> {
        let data = match r.bits(2)? {
            0 => {
                let lane = decode_lane(r, k)?;
                let tin = r.bits(width)?;
                MemberData::E { lane, tin, tout: r.bits(width)? }
            }
            1 => {
                let path = (0..k).map(|_| r.bits(width)).collect::<Result<Vec<_>, _>>()?;
                let marks = (1..k).map(|_| r.bit()).collect::<Result<Vec<_>, _>>()?;
                MemberData::P { path, marks }
            }
            2 => {
                let i = decode_lane(r, k)?;
                let j = decode_lane(r, k)?;
                let left = BridgePart::decode(r, p, k, width)?;
                let right = BridgePart::decode(r, p, k, width)?;
                MemberData::B { i, j, left, right, bridge_marked: r.bit()? }
            }
            _ => return Err(HomError::NonCanonical),
        };
        let depth = r.gamma()?;
        let count = check_len(r.gamma()?, r.remaining())?;
        let mut kids = Vec::with_capacity(count);
        for _ in 0..count {
            let class = HomClass::decode(r, p, k)?;
            let mut tout = Vec::new();
            for &l in class.lanes() {
                tout.push(if class.same(l).expect("own lane") { None } else { Some(r.bits(width)?) });
            }
            kids.push(KidInfo { class, tout });
        }
        Ok(Member { data, depth, kids })
    }
}

impl EdgeCert {
    pub fn encode(&self, w: &mut BitWriter) {
        w.bits(u64::from(self.width), 6);
        w.gamma(self.lanes as u64 - 1);
        self.encode_body(w);
    }

    /// Everything but the id width and lane count, which a route section
    /// takes from the own certificate of the edge carrying it.
    pub fn encode_body(&self, w: &mut BitWriter) {
        let (k, width) = (self.lanes, self.width);
        w.bits(self.lo, width);
        w.bits(self.hi, width);
        self.root.encode_root(w, width);
        w.gamma(self.levels.len() as u64);
        for level in &self.levels {
            level.ptr.encode(w, width);
            level.member.encode(w, k, width);
            if let MemberData::B { .. } = level.member.data {
                let side = level.side.expect("B levels carry a side");
                w.bits(side as u64, 2);
                for arc in &level.vptr {
                    encode_arc(w, *arc, width);
                }
            }
        }
    }

    pub fn to_bits(&self) -> BitString {
        let mut w = BitWriter::new();
        self.encode(&mut w);
        w.finish()
    }

    pub fn decode(r: &mut BitReader<'_>, p: Property) -> Result<Self, HomError> {
        let width = r.bits(6)? as u32;
        if width == 0 {
            return Err(HomError::NonCanonical);
        }
        let k = r.gamma()? as usize + 1;
        if k > MAX_LANES {
            return Err(HomError::TooManyLanes(k));
        }
        Self::decode_body(r, p, width, k)
    }

    pub fn decode_body(r: &mut BitReader<'_>, p: Property, width: u32, k: usize) -> Result<Self, HomError> {
        let lo = r.bits(width)?;
        let hi = r.bits(width)?;
        let root = BasicInfo::decode_root(r, p, k, width)?;
        let count = check_len(r.gamma()?, r.remaining())?;
        let mut levels = Vec::with_capacity(count);
        for _ in 0..count {
            let ptr = PointerLabel::decode(r, width)?;
            let member = Member::decode(r, p, k, width)?;
            let (side, vptr) = match &member.data {
                MemberData::B { left, right, .. } => {
                    let side = match r.bits(2)? {
                        0 => EdgeSide::Bridge,
                        1 => EdgeSide::Left,
                        2 => EdgeSide::Right,
                        _ => return Err(HomError::NonCanonical),
                    };
                    let vs = usize::from(left.is_vertex()) + usize::from(right.is_vertex());
                    let vptr = (0..vs).map(|_| decode_arc(r, width)).collect::<Result<Vec<_>, _>>()?;
                    (Some(side), vptr)
                }
                _ => (None, Vec::new()),
            };
            levels.push(Level { ptr, member, side, vptr });
        }
        Ok(EdgeCert { width, lanes: k, lo, hi, root, levels })
    }
}

/// A virtual edge's certificate as carried by one host edge of its route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteSection {
    pub cert: EdgeCert,
    /// Whether forward ranks count from the virtual edge's smaller endpoint.
    pub from_lo: bool,
    pub fwd: u64,
    pub bwd: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectionKind {
    Own = 1,
    Route = 2,
}

impl SectionKind {
    pub fn name(self) -> &'static str {
        match self {
            SectionKind::Own => "own",
            SectionKind::Route => "route",
        }
    }
}

/// Section framing: an 8-bit type, a varint payload length, the payload.
pub fn write_section(w: &mut BitWriter, kind: SectionKind, payload: &BitString) {
    w.bits(kind as u64, 8);
    w.varint(payload.len() as u64);
    w.bitstring(payload);
}

pub fn route_payload(cert: &EdgeCert, from_lo: bool, fwd: u64, bwd: u64) -> BitString {
    let mut w = BitWriter::new();
    cert.encode_body(&mut w);
    w.bit(from_lo);
    w.gamma(fwd - 1);
    w.gamma(bwd - 1);
    w.finish()
}

/// Splits a label into typed payloads.
pub fn read_sections(label: &BitString) -> Result<Vec<(SectionKind, BitString)>, DecodeError> {
    let mut r = BitReader::new(label);
    let mut out = Vec::new();
    while !r.is_at_end() {
        let kind = match r.bits(8)? {
            1 => SectionKind::Own,
            2 => SectionKind::Route,
            other => return Err(DecodeError::Hex(format!("unknown section type {other}"))),
        };
        let len = r.varint()?;
        if len > r.remaining() as u64 {
            return Err(DecodeError::Eof(r.position()));
        }
        out.push((kind, r.bitstring(len as usize)?));
    }
    Ok(out)
}

pub fn decode_own(payload: &BitString, p: Property) -> Result<EdgeCert, HomError> {
    let mut r = BitReader::new(payload);
    let cert = EdgeCert::decode(&mut r, p)?;
    if !r.is_at_end() {
        return Err(HomError::NonCanonical);
    }
    Ok(cert)
}

/// Decodes a route section under the id width and lane count of the
/// carrying edge's own certificate.
pub fn decode_route(payload: &BitString, p: Property, width: u32, k: usize) -> Result<RouteSection, HomError> {
    let mut r = BitReader::new(payload);
    let cert = EdgeCert::decode_body(&mut r, p, width, k)?;
    let from_lo = r.bit()?;
    let fwd = r.gamma()?.saturating_add(1);
    let bwd = r.gamma()?.saturating_add(1);
    if !r.is_at_end() {
        return Err(HomError::NonCanonical);
    }
    Ok(RouteSection { cert, from_lo, fwd, bwd })
}

/// Framing overhead of one section around a payload of `len` bits.
pub fn framing_bits(len: usize) -> usize {
    8 + crate::bits::varint_bits(len as u64)
}
