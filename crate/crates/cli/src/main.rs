//! `chordtd`: canonical tree-decompositions of chordal graphs and folded
//! graph-decompositions of periodic covers, from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use chordtd::chordal::{is_chordal, is_r_locally_chordal, maximal_cliques, Chordality};
use chordtd::covers::{
    fold_presentation, r_acyclic_check, theorem3_pipeline, verify_graph_decomposition, GraphDecomposition,
    VoltagePresentation,
};
use chordtd::generators::{self, DEFAULT_SEED};
use chordtd::graph::Graph;
use chordtd::nested::{ConstructOptions, NestedError};
use chordtd::pipeline::{canonical_td, maximal_td, permutation_json, reproduce_example_51, PipelineError, SCHEMA};
use chordtd::treedec::{classify_td, verify_td, OrbitOrder, TreeDecError, TreeDecomposition};

#[derive(Parser)]
#[command(name = "chordtd", version, about = "Canonical tree-decompositions into cliques")]
struct Cli {
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Graph as JSON: {"vertices": [...], "edges": [[u, v], ...]}.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args, Default)]
struct Export {
    /// Write the decomposition as DOT.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Write the decomposition as GraphML.
    #[arg(long, value_name = "FILE")]
    graphml: Option<PathBuf>,
    /// Write the decomposition as JSON (readable by verify-td / verify-gd).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitOrderArg {
    Canonical,
    Input,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    /// Every tree edge is its own orbit.
    Trivial,
    /// Edge orbits under the automorphism group.
    Automorphisms,
}

#[derive(Subcommand)]
enum Command {
    /// Decide chordality; prints a perfect elimination ordering or a hole.
    CheckChordal(Input),
    /// List the maximal cliques of a chordal graph.
    MaxCliques(Input),
    /// Build N(G) and its tree-decomposition, and verify canonicity.
    CanonicalTd {
        #[command(flatten)]
        input: Input,
        /// Keep efficient distinguishers that are not tight.
        #[arg(long)]
        beta_include_nontight: bool,
        #[command(flatten)]
        export: Export,
    },
    /// Contract the canonical decomposition into one into maximal cliques.
    MaximalTd {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "canonical")]
        orbit_order: OrbitOrderArg,
        #[arg(long, value_enum, default_value = "trivial")]
        group: Group,
        #[command(flatten)]
        export: Export,
    },
    /// Whether every ball of radius r/2 is chordal. With --voltage, also fold
    /// the cover and compare the verdicts.
    LocalChordal {
        #[arg(long = "in", value_name = "FILE", required_unless_present = "voltage")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        voltage: Option<PathBuf>,
        #[arg(short, default_value_t = 3)]
        r: usize,
        /// Window radius in the cover.
        #[arg(short = 'L', default_value_t = 6)]
        radius: usize,
    },
    /// Fold the canonical decomposition of a cover window into a
    /// graph-decomposition of the base.
    Fold {
        #[arg(long, value_name = "FILE")]
        voltage: PathBuf,
        #[arg(short = 'L', default_value_t = 6)]
        radius: usize,
        /// Continue on non-chordal windows.
        #[arg(long)]
        relaxed: bool,
        #[command(flatten)]
        export: Export,
    },
    /// Check T1/T2 for a tree-decomposition given as JSON.
    VerifyTd {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        td: PathBuf,
    },
    /// Check H1/H2 for a graph-decomposition given as JSON.
    VerifyGd {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        gd: PathBuf,
    },
    /// Whether unions of up to r co-parts are acyclic.
    RAcyclic {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "FILE")]
        gd: PathBuf,
        #[arg(short)]
        r: usize,
        /// Maximum number of subsets to examine.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u128,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Reproduce a worked example.
    Reproduce {
        #[command(subcommand)]
        which: Reproduce,
    },
    /// Generate an instance as graph JSON.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        /// Vertex count, leaf count or cycle length.
        #[arg(short, default_value_t = 10)]
        n: usize,
        /// Width of a k-tree or clique bound of a random chordal graph.
        #[arg(short, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Reproduce {
    /// No canonical tree-decomposition of K_{1,t} into maximal cliques.
    #[command(name = "example-5.1")]
    Example51 {
        #[arg(short, default_value_t = 3)]
        t: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Star,
    Path,
    Cycle,
    Ktree,
    RandomChordal,
    TwoTriangles,
    Wheel,
}

/// Input or usage problem: exit 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_graph(input: &Input) -> Result<Graph, Failure> {
    Ok(Graph::from_json_str(&read(&input.input)?)?)
}

fn load_voltage(path: &Path) -> Result<VoltagePresentation, Failure> {
    Ok(VoltagePresentation::from_json_str(&read(path)?)?)
}

fn write(path: &Option<PathBuf>, content: impl FnOnce() -> String) -> Result<(), Failure> {
    if let Some(p) = path {
        fs::write(p, content()).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn export_td(g: &Graph, td: &TreeDecomposition, export: &Export) -> Result<(), Failure> {
    write(&export.dot, || td.to_dot(g))?;
    write(&export.graphml, || GraphDecomposition::from_tree(g, td).to_graphml(g))?;
    write(&export.out, || pretty(&td.to_json(g)))
}

fn export_gd(g: &Graph, gd: &GraphDecomposition, export: &Export) -> Result<(), Failure> {
    write(&export.dot, || gd.to_dot(g))?;
    write(&export.graphml, || gd.to_graphml(g))?;
    write(&export.out, || pretty(&gd.to_json(g)))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise") + "\n"
}

fn emit(json_mode: bool, report: Value, text: impl FnOnce() -> String) {
    if json_mode {
        let mut report = report;
        report["schema"] = json!(SCHEMA);
        print!("{}", pretty(&report));
    } else {
        println!("{}", text());
    }
}

fn names(g: &Graph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| g.name(v).to_string()).collect()
}

fn bag_text(g: &Graph, td: &TreeDecomposition) -> String {
    let mut out = String::new();
    for (i, b) in td.bags.iter().enumerate() {
        out += &format!("  node {i}: {:?}\n", g.set_names(b));
    }
    for (s, t) in td.edges() {
        out += &format!("  edge {s}-{t}\n");
    }
    out
}

fn check_chordal(cli: &Cli, input: &Input) -> Outcome {
    let g = load_graph(input)?;
    match is_chordal(&g) {
        Chordality::Chordal(peo) => {
            emit(cli.json, json!({"chordal": true, "peo": names(&g, &peo)}), || {
                format!("chordal: true\nperfect elimination ordering: {:?}", names(&g, &peo))
            });
            Ok(true)
        }
        Chordality::Hole(hole) => {
            emit(cli.json, json!({"chordal": false, "hole": names(&g, &hole)}), || {
                format!("chordal: false\nhole: {:?}", names(&g, &hole))
            });
            Ok(false)
        }
    }
}

fn max_cliques(cli: &Cli, input: &Input) -> Outcome {
    let g = load_graph(input)?;
    if !is_chordal(&g).is_chordal() {
        return Ok(report_hole(cli, &g));
    }
    let cliques: Vec<Vec<String>> = maximal_cliques(&g)?.iter().map(|c| g.set_names(c)).collect();
    emit(cli.json, json!({"chordal": true, "cliques": cliques}), || {
        cliques.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join("\n")
    });
    Ok(true)
}

/// Prints the hole of a non-chordal graph; always a false verdict.
fn report_hole(cli: &Cli, g: &Graph) -> bool {
    if let Chordality::Hole(hole) = is_chordal(g) {
        let hole = names(g, &hole);
        emit(cli.json, json!({"chordal": false, "hole": hole}), || format!("not chordal\nhole: {hole:?}"));
    }
    false
}

fn construct_options(include_nontight: bool) -> ConstructOptions {
    let mut opts = ConstructOptions::default();
    opts.beta.include_nontight = include_nontight;
    opts
}

fn canonical(cli: &Cli, input: &Input, nontight: bool, export: &Export) -> Outcome {
    let g = load_graph(input)?;
    let c = match canonical_td(&g, construct_options(nontight)) {
        Ok(c) => c,
        Err(PipelineError::Nested(NestedError::NotChordal)) => return Ok(report_hole(cli, &g)),
        Err(e) => return Err(e.into()),
    };
    export_td(&g, &c.td, export)?;
    let ok = c.ok();
    emit(cli.json, c.to_json(&g), || {
        let mut out = format!("tree-decomposition with {} nodes\n", c.td.len());
        out += &bag_text(&g, &c.td);
        out += &format!(
            "valid: {}\nregular: {}\ninto cliques: {}\ninto maximal cliques: {}\n",
            c.td_report.valid(),
            c.classification.regular,
            c.classification.into_cliques,
            c.classification.into_maximal_cliques
        );
        out += &format!(
            "nested: {}\ntight with clique separators: {}\ninvariant: {}\nrealises N: {}\n",
            c.nested_report.nested(),
            c.nested_report.tight_with_clique_separators(),
            c.nested_report.invariant(),
            c.realises_n
        );
        out += &format!("automorphism group order: {}\ncanonical: {}", c.aut.group_order, c.canonicity.canonical);
        if !c.canonicity.canonical {
            for (a, p) in c.canonicity.actions.iter().zip(&c.aut.generators) {
                if a.tree_map.is_none() {
                    out += &format!("\nno tree action for generator {}", permutation_json(&g, p));
                }
            }
        }
        out
    });
    Ok(ok)
}

fn maximal(cli: &Cli, input: &Input, order: OrbitOrderArg, group: Group, export: &Export) -> Outcome {
    let g = load_graph(input)?;
    let order = match order {
        OrbitOrderArg::Canonical => OrbitOrder::Canonical,
        OrbitOrderArg::Input => OrbitOrder::Input,
    };
    let canonical = matches!(group, Group::Automorphisms);
    match maximal_td(&g, ConstructOptions::default(), canonical, order) {
        Ok((_, td)) => {
            export_td(&g, &td, export)?;
            let cls = classify_td(&g, &td);
            let valid = verify_td(&g, &td)?.valid();
            emit(
                cli.json,
                json!({"decomposition": td.to_json(&g), "valid": valid, "classification": cls}),
                || {
                    format!(
                        "tree-decomposition with {} nodes\n{}valid: {valid}\ninto maximal cliques: {}",
                        td.len(),
                        bag_text(&g, &td),
                        cls.into_maximal_cliques
                    )
                },
            );
            Ok(valid && cls.into_maximal_cliques)
        }
        Err(PipelineError::TreeDec(TreeDecError::OrbitNotMatching(orbit))) => {
            emit(cli.json, json!({"orbit_not_matching": orbit}), || {
                format!("edge orbit is not a matching: {orbit:?}")
            });
            Ok(false)
        }
        Err(PipelineError::Nested(NestedError::NotChordal)) => Ok(report_hole(cli, &g)),
        Err(e) => Err(e.into()),
    }
}

fn local_chordal(cli: &Cli, input: &Option<PathBuf>, voltage: &Option<PathBuf>, r: usize, radius: usize) -> Outcome {
    if let Some(v) = voltage {
        let pres = load_voltage(v)?;
        let (report, _) = theorem3_pipeline(&pres, r, radius)?;
        let verdict = report.locally_chordal;
        emit(cli.json, serde_json::to_value(&report)?, || {
            let mut out = report.to_string();
            if let Some((c, h)) = &report.local_hole {
                out += &format!("\nhole around {c}: {h:?}");
            }
            out
        });
        return Ok(verdict);
    }
    let path = input.as_ref().expect("clap requires --in or --voltage");
    let g = Graph::from_json_str(&read(path)?)?;
    let (ok, hole) = is_r_locally_chordal(&g, r);
    let witness = hole.map(|h| (g.name(h.center).to_string(), names(&g, &h.hole)));
    emit(cli.json, json!({"r": r, "locally_chordal": ok, "witness": witness}), || match &witness {
        None => format!("{r}-locally chordal: true"),
        Some((c, h)) => format!("{r}-locally chordal: false\nhole around {c}: {h:?}"),
    });
    Ok(ok)
}

fn fold(cli: &Cli, voltage: &Path, radius: usize, relaxed: bool, export: &Export) -> Outcome {
    let pres = load_voltage(voltage)?;
    let g = &pres.base;
    let (pn, f) = fold_presentation(&pres, radius, relaxed)?;
    export_gd(g, &f.gd, export)?;
    let rep = verify_graph_decomposition(g, &f.gd);
    let ok = rep.h1() && rep.h2();
    let orbits: Vec<String> = pn.representatives.iter().map(|r| pn.describe(r)).collect();
    emit(
        cli.json,
        json!({
            "decomposition": f.gd.to_json(g),
            "report": rep,
            "stable": pn.stable,
            "window_chordal": pn.chordal,
            "orbits": orbits,
        }),
        || {
            let mut out = format!(
                "model: {} nodes, {} edges\n",
                f.gd.model.n(),
                f.gd.model.edge_count()
            );
            for (i, b) in f.gd.bags.iter().enumerate() {
                out += &format!("  node {i}: {:?}\n", g.set_names(b));
            }
            for (s, t) in f.gd.model.edges() {
                out += &format!("  edge {s}-{t}\n");
            }
            out += &format!(
                "H1: {}\nH2: {}\ninto cliques: {}\ninto maximal cliques: {}\nstable: {}",
                rep.h1(),
                rep.h2(),
                rep.into_cliques,
                rep.into_maximal_cliques,
                pn.stable
            );
            out
        },
    );
    Ok(ok)
}

fn verify_td_cmd(cli: &Cli, input: &Input, td: &Path) -> Outcome {
    let g = load_graph(input)?;
    let td = TreeDecomposition::from_json_str(&g, &read(td)?)?;
    let rep = verify_td(&g, &td)?;
    let cls = classify_td(&g, &td);
    let uncovered: Vec<(String, String)> =
        rep.uncovered_edges.iter().map(|&(u, v)| (g.name(u).to_string(), g.name(v).to_string())).collect();
    let missing = names(&g, &rep.uncovered_vertices);
    let split = names(&g, &rep.disconnected);
    emit(
        cli.json,
        json!({
            "valid": rep.valid(), "t1": rep.t1(), "t2": rep.t2(),
            "uncovered_edges": uncovered, "uncovered_vertices": missing, "disconnected": split,
            "classification": cls,
        }),
        || {
            let mut out = format!("T1: {}\nT2: {}", rep.t1(), rep.t2());
            if !uncovered.is_empty() || !missing.is_empty() {
                out += &format!("\nuncovered vertices: {missing:?}\nuncovered edges: {uncovered:?}");
            }
            if !split.is_empty() {
                out += &format!("\nvertices with disconnected node sets: {split:?}");
            }
            out + &format!("\ninto cliques: {}\ninto maximal cliques: {}", cls.into_cliques, cls.into_maximal_cliques)
        },
    );
    Ok(rep.valid())
}

fn verify_gd_cmd(cli: &Cli, input: &Input, gd: &Path) -> Outcome {
    let g = load_graph(input)?;
    let gd = GraphDecomposition::from_json_str(&g, &read(gd)?)?;
    let rep = verify_graph_decomposition(&g, &gd);
    emit(cli.json, serde_json::to_value(&rep)?, || {
        let mut out = format!("H1: {}\nH2: {}", rep.h1(), rep.h2());
        if !rep.h1() {
            out += &format!(
                "\nuncovered vertices: {:?}\nuncovered edges: {:?}",
                rep.uncovered_vertices, rep.uncovered_edges
            );
        }
        if !rep.h2() {
            out += &format!(
                "\ndisconnected co-bags: {:?}\nbad co-parts: {:?}",
                rep.disconnected_cobags, rep.bad_coparts
            );
        }
        out + &format!("\ninto cliques: {}\ninto maximal cliques: {}", rep.into_cliques, rep.into_maximal_cliques)
    });
    Ok(rep.h1() && rep.h2())
}

fn r_acyclic(cli: &Cli, input: &Input, gd: &Path, r: usize, budget: u128, seed: u64) -> Outcome {
    let g = load_graph(input)?;
    let gd = GraphDecomposition::from_json_str(&g, &read(gd)?)?;
    eprintln!("seed: {seed}");
    let rep = r_acyclic_check(&g, &gd, r, budget, seed, false)?;
    emit(cli.json, json!({"r": r, "seed": seed, "report": rep}), || {
        let mode = if rep.exhaustive { "exhaustive" } else { "sampled" };
        let mut out = format!("{r}-acyclic: {} ({mode}, {} subsets)", rep.acyclic, rep.subsets_checked);
        if let Some((xs, cycle)) = &rep.witness {
            out += &format!("\nco-parts of {xs:?} contain the cycle {cycle:?}");
        }
        out
    });
    Ok(rep.acyclic)
}

fn reproduce(cli: &Cli, which: &Reproduce) -> Outcome {
    let Reproduce::Example51 { t } = which;
    let rep = reproduce_example_51(*t)?;
    emit(
        cli.json,
        json!({
            "t": rep.t,
            "candidate_trees": rep.candidate_trees,
            "valid": rep.valid,
            "canonical": rep.canonical,
            "star_canonical": rep.star_canonical,
            "star_into_maximal_cliques": rep.star_into_maximal_cliques,
            "star_centre_bag": rep.star_centre_bag,
            "summary": rep.summary(),
        }),
        || rep.summary(),
    );
    Ok(rep.canonical == 0 && rep.star_canonical)
}

fn gen(kind: Kind, n: usize, k: usize, seed: u64) -> Outcome {
    eprintln!("seed: {seed}");
    let g = match kind {
        Kind::Star => generators::star(n),
        Kind::Path => generators::path(n),
        Kind::Cycle => generators::cycle(n),
        Kind::Ktree => generators::ktree(n, k, seed),
        Kind::RandomChordal => generators::random_chordal(n, k, seed),
        Kind::TwoTriangles => generators::two_triangles(),
        Kind::Wheel => generators::wheel(n),
    };
    print!("{}", pretty(&serde_json::to_value(g.to_json())?));
    Ok(true)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::CheckChordal(input) => check_chordal(cli, input),
        Command::MaxCliques(input) => max_cliques(cli, input),
        Command::CanonicalTd {
            input,
            beta_include_nontight,
            export,
        } => canonical(cli, input, *beta_include_nontight, export),
        Command::MaximalTd {
            input,
            orbit_order,
            group,
            export,
        } => maximal(cli, input, *orbit_order, *group, export),
        Command::LocalChordal { input, voltage, r, radius } => local_chordal(cli, input, voltage, *r, *radius),
        Command::Fold {
            voltage,
            radius,
            relaxed,
            export,
        } => fold(cli, voltage, *radius, *relaxed, export),
        Command::VerifyTd { input, td } => verify_td_cmd(cli, input, td),
        Command::VerifyGd { input, gd } => verify_gd_cmd(cli, input, gd),
        Command::RAcyclic {
            input,
            gd,
            r,
            budget,
            seed,
        } => r_acyclic(cli, input, gd, *r, *budget, *seed),
        Command::Reproduce { which } => reproduce(cli, which),
        Command::Gen { kind, n, k, seed } => gen(*kind, *n, *k, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
