//! Soundness fuzzing: start from the honest pipeline's labels on a
//! no-instance, mutate them, and look for a labeling every vertex accepts.
//!
//! The mutation menu is fixed: bit flips, section deletion, section swap
//! between edges, replay of honest labels from other instances, route-rank
//! perturbation, and a consistent rewrite of the root class on every edge.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use lanecert::bits::{BitString, BitWriter};
use lanecert::certification::label::{decode_own, decode_route, read_sections, route_payload, write_section, EdgeCert, SectionKind};
use lanecert::certification::{prove_unchecked, prove_with_witness, verify_all_vertex_model, verify_views, LabelAssignment, ProveError, Scheme};
use lanecert::graph::{degeneracy_orientation, edge_labels_to_vertex_labels, Graph};
use lanecert::homomorphism::{HomClass, Property};
use lanecert::interval::IntervalRepresentation;
use lanecert::lane_recursive::{bridge_merge, KLaneGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    BitFlip,
    SectionDelete,
    SectionSwap,
    Replay,
    RoutePerturb,
    RootForge,
}

impl Mutation {
    pub const ALL: [Mutation; 6] =
        [Mutation::BitFlip, Mutation::SectionDelete, Mutation::SectionSwap, Mutation::Replay, Mutation::RoutePerturb, Mutation::RootForge];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::BitFlip => "bit-flip",
            Mutation::SectionDelete => "section-delete",
            Mutation::SectionSwap => "section-swap",
            Mutation::Replay => "replay",
            Mutation::RoutePerturb => "route-perturb",
            Mutation::RootForge => "root-forge",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub mutations: Vec<Mutation>,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MutationTally {
    pub trials: u64,
    pub rejects: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub property: String,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    /// Whether the property holds; counterexamples only exist when it does not.
    pub holds: bool,
    /// Vertices rejecting the unmutated honest labels.
    pub baseline_rejects: usize,
    pub trials: u64,
    /// Trials in which at least one vertex rejected.
    pub rejects: u64,
    pub by_mutation: BTreeMap<Mutation, MutationTally>,
    /// Trials where the vertex-label model disagreed with the edge model at some vertex.
    pub model_disagreements: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub trials: u64,
    pub seed: u64,
    /// Also run every mutated labeling through the vertex-label model.
    pub compare_vertex_model: bool,
}

struct Campaign<'a> {
    g: &'a Graph,
    scheme: Scheme,
    base: Vec<BitString>,
    donors: Vec<Vec<BitString>>,
    forged_root: Option<HomClass>,
}

pub fn fuzz_soundness(
    g: &Graph,
    property: Property,
    k: usize,
    witness: Option<&IntervalRepresentation>,
    cfg: FuzzConfig,
) -> Result<FuzzReport, ProveError> {
    let scheme = Scheme::new(property, k)?;
    let holds = match prove_with_witness(g, property, k, witness) {
        Ok(_) => true,
        Err(ProveError::PropertyFails) => false,
        Err(e) => return Err(e),
    };
    let proof = prove_unchecked(g, property, k, witness)?;
    let base = proof.labels.aligned(g).expect("prover labels every edge");
    let campaign = Campaign { g, scheme, donors: donors(g, property, k, witness), forged_root: forged_root(property, proof.stats.lanes), base };
    let baseline_rejects = campaign.verdicts(&campaign.base).iter().filter(|ok| !**ok).count();

    let outcomes: Vec<Outcome> = (0..cfg.trials).into_par_iter().map(|t| campaign.trial(cfg, t)).collect();
    let mut report = FuzzReport {
        property: property.name().to_string(),
        k,
        n: g.n(),
        seed: cfg.seed,
        holds,
        baseline_rejects,
        trials: cfg.trials,
        rejects: 0,
        by_mutation: BTreeMap::new(),
        model_disagreements: 0,
        counterexamples: Vec::new(),
    };
    for (t, o) in outcomes.into_iter().enumerate() {
        report.rejects += u64::from(o.rejected);
        report.model_disagreements += u64::from(o.disagreement);
        let mut kinds = o.mutations.clone();
        kinds.sort_unstable();
        kinds.dedup();
        for m in kinds {
            let tally = report.by_mutation.entry(m).or_default();
            tally.trials += 1;
            tally.rejects += u64::from(o.rejected);
        }
        if !o.rejected && !holds {
            report.counterexamples.push(Counterexample {
                trial: t as u64,
                mutations: o.mutations,
                labels: o.labels.iter().map(|l| format!("{}:{}", l.len(), l.to_hex())).collect(),
            });
        }
    }
    Ok(report)
}

struct Outcome {
    mutations: Vec<Mutation>,
    rejected: bool,
    disagreement: bool,
    labels: Vec<BitString>,
}

impl Campaign<'_> {
    fn verdicts(&self, labels: &[BitString]) -> Vec<bool> {
        verify_views(&self.scheme, &LabelAssignment::views(self.g, labels)).iter().map(Result::is_ok).collect()
    }

    fn trial(&self, cfg: FuzzConfig, t: u64) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t);
        let mut labels = self.base.clone();
        let count = rng.gen_range(1..=3);
        let mutations: Vec<Mutation> = (0..count).map(|_| *Mutation::ALL.choose(&mut rng).expect("menu is non-empty")).collect();
        for &m in &mutations {
            self.apply(m, &mut labels, &mut rng);
        }
        let verdicts = self.verdicts(&labels);
        let disagreement = cfg.compare_vertex_model && {
            let vl = edge_labels_to_vertex_labels(self.g, &degeneracy_orientation(self.g), &labels);
            let vertex: Vec<bool> = verify_all_vertex_model(&self.scheme, self.g, &vl).iter().map(Result::is_ok).collect();
            vertex != verdicts
        };
        let rejected = verdicts.iter().any(|ok| !ok);
        Outcome { mutations, rejected, disagreement, labels: if rejected { Vec::new() } else { labels } }
    }

    fn apply(&self, m: Mutation, labels: &mut [BitString], rng: &mut ChaCha8Rng) {
        if labels.is_empty() {
            return;
        }
        let e = rng.gen_range(0..labels.len());
        match m {
            Mutation::BitFlip => {
                for _ in 0..rng.gen_range(1..=3) {
                    if !labels[e].is_empty() {
                        let i = rng.gen_range(0..labels[e].len());
                        labels[e].flip(i);
                    }
                }
            }
            Mutation::SectionDelete => {
                let Some(mut secs) = sections(&labels[e]) else { return };
                if !secs.is_empty() {
                    secs.remove(rng.gen_range(0..secs.len()));
                    labels[e] = join(&secs);
                }
            }
            Mutation::SectionSwap => {
                let f = rng.gen_range(0..labels.len());
                let (Some(mut a), Some(mut b)) = (sections(&labels[e]), sections(&labels[f])) else { return };
                if e == f || a.is_empty() || b.is_empty() {
                    return;
                }
                let (i, j) = (rng.gen_range(0..a.len()), rng.gen_range(0..b.len()));
                std::mem::swap(&mut a[i], &mut b[j]);
                labels[e] = join(&a);
                labels[f] = join(&b);
            }
            Mutation::Replay => {
                let Some(donor) = self.donors.choose(rng) else { return };
                if rng.gen_bool(0.5) {
                    labels.clone_from_slice(donor);
                } else {
                    // Splice a contiguous run of edges from the donor.
                    let len = rng.gen_range(1..=labels.len());
                    let start = rng.gen_range(0..=labels.len() - len);
                    labels[start..start + len].clone_from_slice(&donor[start..start + len]);
                }
            }
            Mutation::RoutePerturb => {
                let Some(mut secs) = sections(&labels[e]) else { return };
                let Some(own) = secs.iter().find(|s| s.0 == SectionKind::Own).and_then(|s| decode_own(&s.1, self.scheme.property).ok()) else { return };
                let routes: Vec<usize> = (0..secs.len()).filter(|&i| secs[i].0 == SectionKind::Route).collect();
                let Some(&i) = routes.choose(rng) else { return };
                let Ok(mut r) = decode_route(&secs[i].1, self.scheme.property, own.width, own.lanes) else { return };
                match rng.gen_range(0..4) {
                    0 => r.fwd += 1,
                    1 => r.fwd = r.fwd.saturating_sub(1).max(1),
                    2 => r.bwd += 1,
                    _ => r.from_lo = !r.from_lo,
                }
                secs[i].1 = route_payload(&r.cert, r.from_lo, r.fwd, r.bwd);
                labels[e] = join(&secs);
            }
            Mutation::RootForge => {
                let Some(class) = &self.forged_root else { return };
                for l in labels.iter_mut() {
                    if let Some(forged) = forge_root(l, class, self.scheme.property) {
                        *l = forged;
                    }
                }
            }
        }
    }
}

fn sections(label: &BitString) -> Option<Vec<(SectionKind, BitString)>> {
    read_sections(label).ok()
}

fn join(secs: &[(SectionKind, BitString)]) -> BitString {
    let mut w = BitWriter::new();
    for (kind, payload) in secs {
        write_section(&mut w, *kind, payload);
    }
    w.finish()
}

/// Replaces the root class inside every certificate carried by `label`.
fn forge_root(label: &BitString, class: &HomClass, p: Property) -> Option<BitString> {
    let mut secs = sections(label)?;
    let own: EdgeCert = secs.iter().find(|s| s.0 == SectionKind::Own).and_then(|s| decode_own(&s.1, p).ok())?;
    for (kind, payload) in secs.iter_mut() {
        *payload = match kind {
            SectionKind::Own => {
                let mut cert = own.clone();
                cert.root.class = class.clone();
                cert.to_bits()
            }
            SectionKind::Route => {
                let mut r = decode_route(payload, p, own.width, own.lanes).ok()?;
                r.cert.root.class = class.clone();
                route_payload(&r.cert, r.from_lo, r.fwd, r.bwd)
            }
        };
    }
    Some(join(&secs))
}

/// An accepting class on lanes `1..=lanes`: one edge per lane, consecutive
/// lanes joined by a bridge. It is a tree with a perfect matching and an
/// even number of vertices, so every supported property accepts it.
fn forged_root(p: Property, lanes: usize) -> Option<HomClass> {
    let mut frag = KLaneGraph::edge(1, 0, 1);
    for l in 2..=lanes {
        frag = bridge_merge(&frag, &KLaneGraph::edge(l, 2 * l - 2, 2 * l - 1), l - 1, l).ok()?;
    }
    HomClass::of_fragment(p, &frag, &|_, _| true).ok().filter(HomClass::accepts)
}

/// Honest labels from related yes-instances, aligned to the edges of `g`:
/// the same graph under every other property that holds, and a BFS spanning
/// tree of `g` whose labels fill the tree edges (other edges borrow labels
/// round-robin).
fn donors(g: &Graph, property: Property, k: usize, witness: Option<&IntervalRepresentation>) -> Vec<Vec<BitString>> {
    let mut out = Vec::new();
    for p in Property::ALL.into_iter().filter(|&p| p != property) {
        if let Ok(proof) = prove_with_witness(g, p, k, witness) {
            out.push(proof.labels.aligned(g).expect("prover labels every edge"));
        }
    }
    let tree = bfs_tree(g);
    let tree_witness = witness.filter(|ir| ir.validate(&tree).is_ok());
    let tree_proof = Property::ALL
        .into_iter()
        .filter_map(|p| prove_with_witness(&tree, p, k, tree_witness).ok())
        .next();
    if let Some(proof) = tree_proof.filter(|pr| !pr.labels.labels.is_empty()) {
        let on_tree = proof.labels.aligned(&tree).expect("prover labels every edge");
        let mut spare = on_tree.iter().cycle();
        out.push(
            g.edges()
                .iter()
                .map(|&(u, v)| match tree.edge_index(u, v) {
                    Some(i) => on_tree[i].clone(),
                    None => spare.next().expect("tree has edges").clone(),
                })
                .collect(),
        );
    }
    out
}

fn bfs_tree(g: &Graph) -> Graph {
    let mut seen = vec![false; g.n()];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                edges.push((x, y));
                queue.push_back(y);
            }
        }
    }
    Graph::new(g.n(), edges).expect("tree edges are simple")
}
