use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use assur_kit::assur::{
    classify_drivers, drive_propagate, is_d_assur, vertex_removal_moving_set, DriveOutcome,
};
use assur_kit::corpus::{self, INSTANCES};
use assur_kit::counts::{pinned_laman_check_2d, subgraph_counts_bruteforce, top_count, BRUTE_FORCE_COUNTS_CAP};
use assur_kit::decomposition::scc_decompose;
use assur_kit::field::{f64_to_rational, rational_to_f64, rational_to_string, Rationals, Reals, ScalarMode};
use assur_kit::io::{GraphDocument, OrientationDocument};
use assur_kit::orientation::find_d_orientation;
use assur_kit::report::{analyze, AnalysisOptions};
use assur_kit::rigidity::{
    build_matrix, generic_rank_report, is_pinned_isostatic, nullspace, nullspace_float, sample_generic_configuration,
    trial_seed, Configuration, MotionVector,
};
use assur_kit::{EdgeId, Error, PinnedGraph, VertexId};

#[derive(Parser)]
#[command(name = "assur-kit", version, about = "Assur decomposition of pinned bar-and-joint frameworks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Expected dimension; must match the input file.
    #[arg(long, global = true)]
    dimension: Option<usize>,
    /// Seed for generic configurations and primes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Arithmetic for motions and drives. Rank decisions are always exact.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Relative tolerance in float mode.
    #[arg(long, global = true, default_value_t = assur_kit::field::DEFAULT_TOL)]
    tol: f64,
    /// Independent generic configurations per decision.
    #[arg(long, global = true, default_value_t = assur_kit::rigidity::DEFAULT_TRIALS)]
    trials: usize,
    /// Remove edges joining two pins instead of rejecting the input.
    #[arg(long, global = true)]
    drop_pin_pin: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

impl Mode {
    fn motion_mode(self) -> ScalarMode {
        match self {
            Mode::Exact => ScalarMode::PrimeField,
            Mode::Float => ScalarMode::Float64,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: counts, orientation, decomposition, rank, verdicts, drivers.
    Analyze { input: PathBuf },
    /// Isostatic and Assur verdicts.
    Check {
        input: PathBuf,
        /// Report the Assur verdict with each route's answer.
        #[arg(long)]
        assur: bool,
        /// Also run the strong test (every edge removal moves every vertex).
        #[arg(long)]
        strong: bool,
    },
    /// Necessary subgraph counts; exact plane test in dimension 2.
    CheckCounts { input: PathBuf },
    /// A d-directed orientation, or a witness that none exists.
    Orient { input: PathBuf },
    /// Strongly connected decomposition and its linear orders.
    Decompose {
        input: PathBuf,
        /// Use this orientation instead of computing one.
        #[arg(long)]
        orientation: Option<PathBuf>,
        /// Number of linear orders to list.
        #[arg(long, default_value_t = 1)]
        extensions: usize,
    },
    /// Generic rank with an exact isostatic certificate.
    Rank {
        input: PathBuf,
        /// Write the rigidity matrix as CSV.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Infinitesimal motions at the given (or a sampled) configuration.
    Nullspace {
        input: PathBuf,
        #[arg(long)]
        remove_edge: Option<String>,
        #[arg(long)]
        remove_vertex: Option<String>,
    },
    /// Regular and weak drivers with the inclusion order of moving sets.
    Drivers { input: PathBuf },
    /// Which inner vertices move after deleting one.
    VertexRemoval {
        input: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Velocities when one bottom-component edge becomes an actuator.
    Drive {
        input: PathBuf,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
    },
    /// Condensation DAG as Graphviz DOT.
    ExportDot {
        input: PathBuf,
        /// Include the oriented graph with components as clusters.
        #[arg(long)]
        full: bool,
    },
    /// Pin release and re-pinning.
    #[command(subcommand)]
    Surgery(Surgery),
    /// Bundled example instances.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Subcommand)]
enum Surgery {
    /// Make a pin inner and tie it to `d` pinned anchors.
    Release {
        input: PathBuf,
        #[arg(long)]
        pin: String,
        #[arg(long, value_delimiter = ',')]
        anchors: Vec<String>,
    },
    /// Turn an inner vertex into a pin.
    Repin {
        input: PathBuf,
        #[arg(long)]
        vertex: String,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    List,
    /// Write `<name>.json` and `<name>.expected.json`.
    Emit {
        /// Instance names; all instances when empty.
        names: Vec<String>,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::CrossCheck(_)) { 2 } else { 1 };
        let message = match &e {
            Error::ValidationFailed(v) => format!(
                "{e}\n{}",
                serde_json::to_string_pretty(v).unwrap_or_default()
            ),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn user_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(global: &Global, text: &str) -> Result<(), Failure> {
    match &global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::from(Error::Io(e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(global: &Global, value: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    emit(global, &s)
}

fn load(global: &Global, path: &Path) -> Result<GraphDocument, Failure> {
    let mut doc = GraphDocument::read(path)?;
    if let Some(d) = global.dimension {
        if d != doc.graph.dimension {
            return Err(Error::WrongDimension {
                expected: d,
                got: doc.graph.dimension,
            }
            .into());
        }
    }
    if global.drop_pin_pin {
        let (g, dropped) = doc.graph.drop_pin_pin_edges();
        for e in &dropped {
            eprintln!("warning: dropped pin-pin edge `{}`", e.id);
        }
        doc.graph = g;
    }
    doc.graph.ensure_valid()?;
    Ok(doc)
}

/// Configuration from the file, or a sampled one for the chosen arithmetic.
fn configuration(global: &Global, doc: &GraphDocument, graph: &PinnedGraph) -> Result<Configuration, Failure> {
    if let Some(c) = doc.configuration()? {
        return Ok(c);
    }
    let mode = match global.mode {
        Mode::Exact => ScalarMode::ExactRational,
        Mode::Float => ScalarMode::Float64,
    };
    Ok(sample_generic_configuration(graph, trial_seed(global.seed, 0), mode))
}

fn rational_motion(m: &MotionVector<BigRational>) -> BTreeMap<VertexId, Vec<String>> {
    m.velocities
        .iter()
        .map(|(v, u)| (v.clone(), u.iter().map(rational_to_string).collect()))
        .collect()
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { input } => {
            let doc = load(g, input)?;
            let opts = AnalysisOptions {
                seed: g.seed,
                trials: g.trials,
                motion_mode: g.mode.motion_mode(),
                skip_drivers: false,
            };
            let report = analyze(&doc.graph, doc.name.clone(), &opts)?;
            emit_json(g, &report)?;
            if !report.is_consistent() {
                return Err(Failure {
                    code: 2,
                    message: format!("internal cross-check failed: {:?}", report.inconsistencies),
                });
            }
        }
        Command::Check { input, assur, strong } => {
            let doc = load(g, input)?;
            let cert = is_pinned_isostatic(&doc.graph, g.seed);
            let mut out = json!({ "isostatic": cert.isostatic, "certificate": cert });
            if *assur || *strong {
                let v = is_d_assur(&doc.graph, g.seed)?;
                out["assur"] = json!(v.is_assur);
                out["route_agreement"] = json!(v.route_agreement);
                if *strong {
                    out["strongly_assur"] = json!(v.is_strongly_assur);
                }
                if !v.route_agreement.agree() {
                    emit_json(g, &out)?;
                    return Err(Failure {
                        code: 2,
                        message: "Assur routes disagree".to_owned(),
                    });
                }
            }
            emit_json(g, &out)?;
        }
        Command::CheckCounts { input } => {
            let doc = load(g, input)?;
            let graph = &doc.graph;
            let violations = if graph.inner.len() <= BRUTE_FORCE_COUNTS_CAP {
                Some(subgraph_counts_bruteforce(graph)?)
            } else {
                None
            };
            let laman = if graph.dimension == 2 {
                Some(pinned_laman_check_2d(graph)?)
            } else {
                None
            };
            let top = top_count(graph);
            let pass = violations.as_ref().map(|v| top && v.is_empty()).or(laman);
            emit_json(
                g,
                &json!({ "top_count": top, "violations": violations, "pinned_laman": laman, "pass": pass }),
            )?;
        }
        Command::Orient { input } => {
            let doc = load(g, input)?;
            match find_d_orientation(&doc.graph) {
                Ok(o) => emit_json(g, &OrientationDocument::new(o))?,
                Err(inf) => {
                    emit_json(g, &json!({ "infeasible": inf }))?;
                    return Err(user_error(inf.to_string()));
                }
            }
        }
        Command::Decompose {
            input,
            orientation,
            extensions,
        } => {
            let doc = load(g, input)?;
            let o = match orientation {
                Some(path) => OrientationDocument::parse(&std::fs::read_to_string(path).map_err(Error::Io)?)?.tails,
                None => find_d_orientation(&doc.graph).map_err(Error::from)?,
            };
            let d = scc_decompose(&doc.graph, &o)?;
            let orders = d.linear_extensions(*extensions);
            emit_json(g, &json!({ "format": assur_kit::io::FORMAT, "decomposition": d, "linear_extensions": orders }))?;
        }
        Command::Rank { input, dump_matrix } => {
            let doc = load(g, input)?;
            let report = generic_rank_report(&doc.graph, g.trials, g.seed);
            let cert = is_pinned_isostatic(&doc.graph, g.seed);
            if let Some(path) = dump_matrix {
                let config = configuration(g, &doc, &doc.graph)?;
                let m = build_matrix(&doc.graph, &config, &Rationals)?;
                let csv = match g.mode {
                    Mode::Exact => m.to_csv(rational_to_string),
                    Mode::Float => m.to_csv(|q| format!("{:e}", rational_to_f64(q))),
                };
                std::fs::write(path, csv).map_err(Error::Io)?;
            }
            emit_json(g, &json!({ "rank": report, "certificate": cert }))?;
        }
        Command::Nullspace {
            input,
            remove_edge,
            remove_vertex,
        } => {
            let doc = load(g, input)?;
            let config = configuration(g, &doc, &doc.graph)?;
            let mut graph = doc.graph.clone();
            if let Some(e) = remove_edge {
                graph = graph.without_edge(&EdgeId::from(e.as_str()))?;
            }
            if let Some(v) = remove_vertex {
                graph = graph.without_inner_vertex(&VertexId::from(v.as_str()))?;
            }
            let basis = match g.mode {
                Mode::Exact => nullspace(&graph, &config, &Rationals)?
                    .iter()
                    .map(|m| json!(rational_motion(m)))
                    .collect::<Vec<_>>(),
                Mode::Float => nullspace_float(&graph, &config, g.tol)?
                    .iter()
                    .map(|m| json!(m.velocities))
                    .collect(),
            };
            emit_json(g, &json!({ "dimension": basis.len(), "basis": basis }))?;
        }
        Command::Drivers { input } => {
            let doc = load(g, input)?;
            let c = classify_drivers(&doc.graph, g.trials, g.seed, g.mode.motion_mode())?;
            for w in &c.warnings {
                eprintln!("warning: {w}");
            }
            emit_json(g, &c)?;
        }
        Command::VertexRemoval { input, vertex } => {
            let doc = load(g, input)?;
            let r = vertex_removal_moving_set(
                &doc.graph,
                &VertexId::from(vertex.as_str()),
                g.trials,
                g.seed,
                g.mode.motion_mode(),
            )?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            emit_json(g, &r)?;
        }
        Command::Drive { input, edge, rate } => {
            let doc = load(g, input)?;
            let o = find_d_orientation(&doc.graph).map_err(Error::from)?;
            let decomp = scc_decompose(&doc.graph, &o)?;
            let config = configuration(g, &doc, &doc.graph)?;
            let edge = EdgeId::from(edge.as_str());
            match g.mode {
                Mode::Exact => {
                    let r = f64_to_rational(*rate).ok_or_else(|| user_error("rate must be finite"))?;
                    let out: DriveOutcome<BigRational> =
                        drive_propagate(&doc.graph, &decomp, &config, &edge, &r, &Rationals)?;
                    emit_json(g, &json!({ "driver": edge, "rate": rate, "velocities": rational_motion(&out.motion) }))?;
                }
                Mode::Float => {
                    let out = drive_propagate(&doc.graph, &decomp, &config, &edge, rate, &Reals { tol: g.tol })?;
                    emit_json(
                        g,
                        &json!({
                            "driver": edge,
                            "rate": rate,
                            "velocities": out.motion.velocities,
                            "max_discrepancy": out.max_discrepancy,
                        }),
                    )?;
                }
            }
        }
        Command::ExportDot { input, full } => {
            let doc = load(g, input)?;
            let o = find_d_orientation(&doc.graph).map_err(Error::from)?;
            let d = scc_decompose(&doc.graph, &o)?;
            let dot = d.to_dot(full.then_some((&doc.graph, &o)));
            emit(g, &dot)?;
        }
        Command::Surgery(s) => {
            let (doc, graph) = match s {
                Surgery::Release { input, pin, anchors } => {
                    let doc = load(g, input)?;
                    let anchors: Vec<VertexId> = anchors.iter().map(|a| VertexId::from(a.as_str())).collect();
                    let graph = doc.graph.release_pin(&VertexId::from(pin.as_str()), &anchors)?;
                    (doc, graph)
                }
                Surgery::Repin { input, vertex } => {
                    let doc = load(g, input)?;
                    let (graph, dropped) = doc.graph.repin_vertex(&VertexId::from(vertex.as_str()))?;
                    for e in &dropped {
                        eprintln!("warning: dropped pin-pin edge `{}`", e.id);
                    }
                    (doc, graph)
                }
            };
            let mut out = GraphDocument::new(graph);
            out.name = doc.name;
            emit(g, &out.to_json())?;
        }
        Command::Corpus(CorpusCommand::List) => {
            let mut text = String::new();
            for inst in INSTANCES {
                text.push_str(&format!("{:<22} {}\n", inst.name, inst.description));
            }
            emit(g, &text)?;
        }
        Command::Corpus(CorpusCommand::Emit { names, dir }) => {
            let chosen: Vec<&corpus::Instance> = if names.is_empty() {
                INSTANCES.iter().collect()
            } else {
                names.iter().map(|n| corpus::instance(n)).collect::<Result<_, _>>()?
            };
            std::fs::create_dir_all(dir).map_err(Error::Io)?;
            for inst in chosen {
                let graph_path = dir.join(format!("{}.json", inst.name));
                let expected_path = dir.join(format!("{}.expected.json", inst.name));
                std::fs::write(&graph_path, inst.document().to_json()).map_err(Error::Io)?;
                std::fs::write(&expected_path, inst.expected().to_json()).map_err(Error::Io)?;
                eprintln!("wrote {}", graph_path.display());
            }
        }
    }
    Ok(())
}
