use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lanecert::certification::{
    heuristic_intervals, label_size_stats, prove_with_witness, to_vertex_labels, verdict_report, verify_all, verify_all_vertex_model,
    LabelAssignment, ProveError, Scheme,
};
use lanecert::graph::{exact_pathwidth, Graph};
use lanecert::homomorphism::Property;
use lanecert::interval::IntervalRepresentation;
use lanecert::lane_partition::{build_lane_partition, measure_congestion};
use lanecert::lane_recursive::{applied_graph_intervals, build_hierarchical_decomposition, completion_to_op_sequence, OpSequence};
use lanecert_harness::bench::bench_label_size;
use lanecert_harness::fuzz::{fuzz_soundness, FuzzConfig};
use lanecert_harness::generate::{generate, Family, GeneratorSpec};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lanecert", version, about = "Local certification of properties of bounded-pathwidth graphs")]
struct Cli {
    /// Seed for generators and fuzzing.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    property: Property,
    /// Pathwidth bound of the scheme.
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance and its witness.
    Gen {
        /// path, cycle, caterpillar(L), random-ops(K,D) or random-pathwidth(K).
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the witness (interval representation or op sequence).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Find an interval representation and report the lane structure built on it.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Where to write the interval representation.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Produce edge labels for a yes-instance.
    Prove {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the local verifier at every vertex.
    Verify {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        labels: PathBuf,
        /// Move labels onto vertices first and verify in the vertex model.
        #[arg(long)]
        vertex_model: bool,
    },
    /// Label size statistics of a label file.
    Stats {
        #[arg(long)]
        labels: PathBuf,
    },
    /// Mutate honest labels and search for an all-accept labeling of a no-instance.
    Fuzz {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Label size against log2 n over a size sweep.
    Bench {
        #[arg(long)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_values_t = [100, 1000, 10000])]
        sizes: Vec<usize>,
        #[arg(long)]
        property: Property,
        #[arg(long)]
        k: usize,
    },
}

/// Exit 1: a verifier rejected, a counterexample was found, or the property fails.
const REJECT: u8 = 1;
/// Exit 2: bad arguments or unreadable input.
const USAGE: u8 = 2;

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    USAGE
}

fn read(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), u8> {
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, u8> {
    read(path)?.parse().map_err(|e| fail(format!("{}: {e}", path.display())))
}

/// A witness file holds either intervals (`v lo hi` lines) or an op sequence.
fn load_witness(path: &Path) -> Result<IntervalRepresentation, u8> {
    let text = read(path)?;
    IntervalRepresentation::from_text(&text)
        .or_else(|_| OpSequence::from_text(&text).map_err(|e| e.to_string()).and_then(|s| applied_graph_intervals(&s).map_err(|e| e.to_string())))
        .map_err(|e| fail(format!("{}: not an interval representation or op sequence ({e})", path.display())))
}

fn load_optional_witness(path: &Option<PathBuf>) -> Result<Option<IntervalRepresentation>, u8> {
    path.as_deref().map(load_witness).transpose()
}

fn prove_code(e: &ProveError) -> u8 {
    if matches!(e, ProveError::PropertyFails) {
        eprintln!("error: {e}");
        REJECT
    } else {
        fail(e)
    }
}

fn print(json: bool, value: serde_json::Value, text: String) {
    if json {
        println!("{value}");
    } else {
        print!("{text}");
    }
}

fn run(cli: Cli) -> Result<u8, u8> {
    let version = env!("CARGO_PKG_VERSION");
    match cli.cmd {
        Cmd::Gen { family, n, out, witness } => {
            let spec = GeneratorSpec { family, n, seed: cli.seed };
            let inst = generate(spec).map_err(fail)?;
            write(&out, &inst.graph.to_text())?;
            if let Some(w) = witness {
                write(&w, &inst.witness.to_text())?;
            }
            let bound = inst.pathwidth_bound().map_err(fail)?;
            print(
                cli.json,
                json!({ "spec": spec, "version": version, "n": inst.graph.n(), "m": inst.graph.m(), "pathwidth_bound": bound }),
                format!("{family} n={} m={} seed={} pathwidth<={bound}\n", inst.graph.n(), inst.graph.m(), cli.seed),
            );
        }
        Cmd::Decompose { graph, witness, out } => {
            let g = load_graph(&graph)?;
            let ir = match load_optional_witness(&witness)? {
                Some(ir) => ir,
                None if g.n() <= 16 => {
                    let w = exact_pathwidth(&g).map_err(fail)?;
                    IntervalRepresentation::from_pairs(w.spans(&g).into_iter().map(|(a, b)| (a as i64, b as i64))).map_err(fail)?
                }
                None => heuristic_intervals(&g),
            };
            ir.validate(&g).map_err(fail)?;
            let (lp, emb) = build_lane_partition(&g, &ir).map_err(fail)?;
            let ops = completion_to_op_sequence(&g, &ir, &lp).map_err(fail)?;
            let h = build_hierarchical_decomposition(&ops).map_err(fail)?;
            if let Some(out) = out {
                write(&out, &ir.to_text())?;
            }
            let (width, lanes, cong) = (ir.width(), lp.k(), measure_congestion(&emb));
            let (depth, bnodes) = (h.max_path_len(), h.max_bnodes_on_path());
            print(
                cli.json,
                json!({ "interval_width": width, "lanes": lanes, "congestion": cong, "weak_congestion": emb.weak_congestion(),
                        "depth": depth, "max_bnodes_on_path": bnodes, "version": version }),
                format!("interval width {width}\nlanes {lanes}\ncongestion {cong}\ndepth {depth}\nbridge nodes per path {bnodes}\n"),
            );
        }
        Cmd::Prove { target, out, witness } => {
            let g = load_graph(&target.graph)?;
            let ir = load_optional_witness(&witness)?;
            let proof = prove_with_witness(&g, target.property, target.k, ir.as_ref()).map_err(|e| prove_code(&e))?;
            write(&out, &proof.labels.to_text())?;
            let st = label_size_stats(&proof.labels.labels).map_err(fail)?;
            let s = proof.stats;
            print(
                cli.json,
                json!({ "property": target.property.name(), "k": target.k, "edges": st.edges, "max_bits": st.max_bits,
                        "mean_bits": st.mean_bits, "lanes": s.lanes, "congestion": s.congestion, "depth": s.depth, "version": version }),
                format!("{} edges labelled, max {} bits, {} lanes, congestion {}\n", st.edges, st.max_bits, s.lanes, s.congestion),
            );
        }
        Cmd::Verify { target, labels, vertex_model } => {
            let g = load_graph(&target.graph)?;
            let la = LabelAssignment::from_text(&read(&labels)?).map_err(fail)?;
            let scheme = Scheme::new(target.property, target.k).map_err(fail)?;
            let verdicts = if vertex_model {
                let vl = to_vertex_labels(&g, &la).map_err(fail)?;
                verify_all_vertex_model(&scheme, &g, &vl)
            } else {
                verify_all(&scheme, &g, &la).map_err(fail)?
            };
            let rejects = verdicts.iter().filter(|v| v.is_err()).count();
            let rows: Vec<_> = verdicts
                .iter()
                .enumerate()
                .map(|(v, r)| json!({ "id": v, "accept": r.is_ok(), "reason": r.as_ref().err().map(|e| e.code()) }))
                .collect();
            print(cli.json, json!({ "verdicts": rows, "rejects": rejects }), verdict_report(&verdicts));
            return Ok(if rejects == 0 { 0 } else { REJECT });
        }
        Cmd::Stats { labels } => {
            let la = LabelAssignment::from_text(&read(&labels)?).map_err(fail)?;
            let st = label_size_stats(&la.labels).map_err(fail)?;
            print(
                cli.json,
                json!({ "edges": st.edges, "max_bits": st.max_bits, "mean_bits": st.mean_bits, "max_own_bits": st.max_own_bits,
                        "max_route_bits": st.max_route_bits, "max_routes": st.max_routes }),
                format!(
                    "edges {}\nmax bits {}\nmean bits {:.1}\nmax own section {}\nmax route sections {} ({} bits)\n",
                    st.edges, st.max_bits, st.mean_bits, st.max_own_bits, st.max_routes, st.max_route_bits
                ),
            );
        }
        Cmd::Fuzz { target, trials, witness } => {
            let g = load_graph(&target.graph)?;
            let ir = load_optional_witness(&witness)?;
            let cfg = FuzzConfig { trials, seed: cli.seed, compare_vertex_model: false };
            let r = fuzz_soundness(&g, target.property, target.k, ir.as_ref(), cfg).map_err(fail)?;
            let mut text = format!(
                "{} on n={} (holds: {}), {} trials, {} rejected, {} counterexamples\n",
                r.property,
                r.n,
                r.holds,
                r.trials,
                r.rejects,
                r.counterexamples.len()
            );
            for (m, t) in &r.by_mutation {
                text += &format!("  {m}: {} trials, {} rejected\n", t.trials, t.rejects);
            }
            let found = !r.counterexamples.is_empty();
            print(cli.json, json!({ "report": r, "version": version }), text);
            return Ok(if found { REJECT } else { 0 });
        }
        Cmd::Bench { family, sizes, property, k } => {
            let t = bench_label_size(family, &sizes, property, k, cli.seed).map_err(fail)?;
            let spread = t.spread();
            print(cli.json, json!({ "table": t, "spread": spread, "version": version }), format!("{}spread {spread:.3}\n", t.to_csv()));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli).unwrap_or_else(|code| code))
}
