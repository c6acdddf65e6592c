//! `sdyn`: scripted access to the succinct-dyn library. Every command prints one JSON
//! document; exit status 0 means success, 1 a failed verification, 2 a usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use succinct_dyn::annet::{expand_dynamics_with, lookup_table_network, Kind, NetworkDescriptor, DEFAULT_EXPANSION_BOUND};
use succinct_dyn::arith::{find_solutions, geometric_sequence, periodicity, Padding};
use succinct_dyn::graph::{delta, glue, parse_word};
use succinct_dyn::logic::{chi, ef_equiv, evaluate, parse_formula, random_corpus, Formula};
use succinct_dyn::par::Exec;
use succinct_dyn::pump::{
    assemble_gadgets, find_pump_multi, verify_pump, AssembledGadgets, ContextFamily, PumpFixture, PumpTriple,
};
use succinct_dyn::reduce::demos::Demo;
use succinct_dyn::reduce::{compile_reduction, verify_reduction, Mode, Orientation, PropFormula, ReductionOutput, Settings};
use succinct_dyn::treedec::{glue_td, is_valid_decomposition, width, TreeDecomp};
use succinct_dyn::{Digraph, GadgetFamily, PortedGraph};

#[derive(Parser)]
#[command(name = "sdyn", version, about = "Automata network dynamics, MSO checking, gluing and reduction compiling")]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for commands that draw random corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Network dynamics.
    #[command(subcommand)]
    Dyn(DynCmd),
    /// Model checking and EF games.
    #[command(subcommand)]
    Mc(McCmd),
    /// Glue k-graph files left to right, or a family along a word.
    Glue(GlueArgs),
    /// Tree decompositions.
    #[command(subcommand)]
    Td(TdCmd),
    /// Solutions of a·K + b = q^N.
    #[command(subcommand)]
    Arith(ArithCmd),
    /// Pump search, verification and gadget assembly.
    #[command(subcommand)]
    Pump(PumpCmd),
    /// The reduction compiler.
    #[command(subcommand)]
    Reduce(ReduceCmd),
}

#[derive(Subcommand)]
enum DynCmd {
    /// Expand a descriptor into its dynamics graph.
    Expand {
        #[arg(long)]
        descriptor: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_BOUND)]
        bound: u64,
    },
    /// A descriptor whose dynamics is the given graph, vertex i being configuration i.
    Lookup {
        #[arg(long)]
        graph: PathBuf,
        /// Alphabet sizes, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        alphabet: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum McCmd {
    /// Evaluate a closed formula on a graph.
    Check {
        /// Formula file, or the formula text itself.
        #[arg(long)]
        psi: String,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Whether duplicator wins the m-round MSO game on two graphs.
    Ef {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
    },
    /// A seeded corpus of random closed formulas.
    Corpus {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

#[derive(Args)]
struct GlueArgs {
    /// k-graph files glued in order.
    files: Vec<PathBuf>,
    /// Gadget family file, used with `--word`.
    #[arg(long, requires = "word", conflicts_with = "files")]
    family: Option<PathBuf>,
    #[arg(long)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum TdCmd {
    /// Check that a decomposition covers a graph.
    Validate {
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Glue decompositions left to right.
    Glue { files: Vec<PathBuf> },
}

#[derive(Subcommand)]
enum ArithCmd {
    Solve {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 20)]
        nmax: u32,
    },
}

#[derive(Subcommand)]
enum PumpCmd {
    /// Search a decomposed model for a pumpable triple.
    Find {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        psi: String,
        /// Non-port vertices of the exhaustive context family.
        #[arg(long, default_value_t = 1)]
        extra: usize,
        /// Also require equivalence under χ, so the triple pumps functional graphs.
        #[arg(long)]
        functional: bool,
        /// Write the triple to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a pump fixture directory, or a triple file against a formula.
    Verify {
        #[arg(long, conflicts_with_all = ["triple", "psi"])]
        fixture: Option<PathBuf>,
        #[arg(long, requires = "psi")]
        triple: Option<PathBuf>,
        #[arg(long)]
        psi: Option<String>,
        #[arg(long, default_value_t = 8)]
        lmax: usize,
        #[arg(long)]
        functional: bool,
    },
    /// Assemble G0..G4 from a triple and a saturating graph.
    Assemble {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long)]
        omega: PathBuf,
        /// Round alpha up to a power of q.
        #[arg(long)]
        q: Option<u64>,
        /// Gadget file or directory (then `gadgets.json` inside it).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    An,
    Nan,
}

#[derive(Clone, Copy, ValueEnum)]
enum PaddingArg {
    Formula,
    Minimal,
}

#[derive(Args)]
struct GadgetSource {
    /// Gadget file or directory holding `gadgets.json`.
    #[arg(long, conflicts_with = "demo")]
    gadgets: Option<PathBuf>,
    /// Built-in gadgets: fixed-point, tautology, pumped or q-uniform.
    #[arg(long)]
    demo: Option<Demo>,
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Compile gadgets and a propositional formula into a network.
    Build {
        #[command(flatten)]
        source: GadgetSource,
        /// Propositional formula file or text, e.g. `x1 & !x2`.
        #[arg(long)]
        formula: Option<String>,
        /// Variable count; defaults to the largest index in the formula.
        #[arg(long)]
        vars: Option<u32>,
        /// `boolean` or `q:<q>`.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        orient: Option<Orientation>,
        #[arg(long, value_enum)]
        padding: Option<PaddingArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a compiled output against its gadgets and a formula.
    Verify {
        #[arg(long)]
        output: PathBuf,
        /// Defaults to the demo's formula when the output came from a demo.
        #[arg(long)]
        psi: Option<String>,
    },
}

/// Failures that are the caller's fault; reported on stderr with exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Res<T> = Result<T, UsageError>;

/// Result document plus whether the command's check succeeded.
struct Report {
    doc: Value,
    ok: bool,
}

impl Report {
    fn ok(doc: Value) -> Self {
        Report { doc, ok: true }
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Res<T> {
    serde_json::from_str(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// An existing file's contents, otherwise the argument itself.
fn text_or_file(arg: &str) -> Res<String> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(read(p)?.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn formula(arg: &str) -> Res<Formula> {
    Ok(parse_formula(&text_or_file(arg)?)?)
}

fn gadget_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("gadgets.json")
    } else {
        path.to_path_buf()
    }
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Res<()> {
    let path = gadget_file(path);
    fs::write(&path, serde_json::to_string_pretty(v)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Big integers as JSON numbers when they fit, decimal strings otherwise.
fn big(x: impl ToString) -> Value {
    let s = x.to_string();
    s.parse::<u64>().map_or(Value::String(s), Value::from)
}

fn run(cli: &Cli) -> Res<Report> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match &cli.command {
        Command::Dyn(DynCmd::Expand { descriptor, bound }) => {
            let d: NetworkDescriptor = load(descriptor)?;
            Ok(Report::ok(serde_json::to_value(expand_dynamics_with(&d, exec, *bound)?)?))
        }
        Command::Dyn(DynCmd::Lookup { graph, alphabet }) => {
            let g: Digraph = load(graph)?;
            Ok(Report::ok(serde_json::to_value(lookup_table_network(&g, alphabet)?)?))
        }
        Command::Mc(McCmd::Check { psi, graph }) => {
            let g: Digraph = load(graph)?;
            Ok(Report::ok(json!({ "result": evaluate(&formula(psi)?, &g)? })))
        }
        Command::Mc(McCmd::Ef { left, right, rounds }) => {
            let (g, h): (Digraph, Digraph) = (load(left)?, load(right)?);
            Ok(Report::ok(json!({ "equivalent": ef_equiv(&g, &h, *rounds)?, "rounds": rounds })))
        }
        Command::Mc(McCmd::Corpus { count, rank }) => {
            let corpus: Vec<String> = random_corpus(cli.seed, *count, *rank).iter().map(ToString::to_string).collect();
            Ok(Report::ok(json!({ "seed": cli.seed, "formulas": corpus })))
        }
        Command::Glue(args) => glue_cmd(args),
        Command::Td(TdCmd::Validate { decomp, graph }) => {
            let t: TreeDecomp = load(decomp)?;
            let g: Digraph = load(graph)?;
            let valid = is_valid_decomposition(&t, &g);
            Ok(Report { doc: json!({ "valid": valid, "width": width(&t) }), ok: valid })
        }
        Command::Td(TdCmd::Glue { files }) => {
            let (first, rest) = files.split_first().ok_or_else(|| UsageError("no decompositions given".into()))?;
            let mut t: TreeDecomp = load(first)?;
            for f in rest {
                t = glue_td(&t, &load(f)?)?;
            }
            Ok(Report::ok(serde_json::to_value(t)?))
        }
        Command::Arith(ArithCmd::Solve { a, b, q, nmax }) => {
            if *a == 0 || *q < 2 {
                return Err(UsageError("need a ≥ 1 and q ≥ 2".into()));
            }
            let witnesses: Vec<Value> =
                find_solutions(*a, *b, *q, *nmax).into_iter().map(|w| json!({ "k": big(w.k), "n": w.n })).collect();
            let seq = geometric_sequence(*a, *b, *q).map(|s| json!({ "n0": s.n0, "mu": s.mu }));
            let per = periodicity(*a, *b, *q).map(|(mu, kappa)| json!({ "mu": mu, "kappa": big(kappa) }));
            Ok(Report::ok(json!({ "witnesses": witnesses, "geometric_sequence": seq, "periodicity": per })))
        }
        Command::Pump(cmd) => pump_cmd(cmd),
        Command::Reduce(cmd) => reduce_cmd(cmd),
    }
}

fn glue_cmd(args: &GlueArgs) -> Res<Report> {
    let out = match (&args.family, &args.word) {
        (Some(family), Some(word)) => {
            let fam: GadgetFamily = load(family)?;
            delta(&fam, &parse_word(word))?
        }
        _ => {
            let (first, rest) = args.files.split_first().ok_or_else(|| UsageError("no graphs given".into()))?;
            let mut g: PortedGraph = load(first)?;
            for f in rest {
                g = glue(&g, &load(f)?)?;
            }
            g
        }
    };
    Ok(Report::ok(serde_json::to_value(out)?))
}

fn pump_cmd(cmd: &PumpCmd) -> Res<Report> {
    match cmd {
        PumpCmd::Find { model, decomp, psi, extra, functional, output } => {
            let g: Digraph = load(model)?;
            let t: TreeDecomp = load(decomp)?;
            if t.bag_size() + extra > 4 {
                return Err(UsageError("bag size plus --extra must be at most 4".into()));
            }
            let ctx = ContextFamily::exhaustive(t.bag_size(), *extra);
            let mut psis = vec![formula(psi)?];
            if *functional {
                psis.push(chi());
            }
            match find_pump_multi(&g, &t, &psis, &ctx)? {
                Some(triple) => {
                    if let Some(path) = output {
                        write_json(path, &triple)?;
                    }
                    Ok(Report::ok(json!({ "found": true, "triple": triple })))
                }
                None => Ok(Report { doc: json!({ "found": false }), ok: false }),
            }
        }
        PumpCmd::Verify { fixture: Some(dir), .. } => {
            let fx = PumpFixture::load(dir)?;
            let got = verify_pump(&fx.triple, &fx.psi, fx.expected.l_max, fx.expected.require_functional)?;
            let ok = got == fx.expected.verdict;
            Ok(Report { doc: json!({ "verdict": got, "expected": fx.expected.verdict, "l_max": fx.expected.l_max }), ok })
        }
        PumpCmd::Verify { triple: Some(path), psi: Some(psi), lmax, functional, .. } => {
            let t: PumpTriple = load(path)?;
            let got = verify_pump(&t, &formula(psi)?, *lmax, *functional)?;
            Ok(Report { doc: json!({ "verdict": got, "l_max": lmax }), ok: got })
        }
        PumpCmd::Verify { .. } => Err(UsageError("give --fixture DIR or --triple FILE --psi FORMULA".into())),
        PumpCmd::Assemble { triple, omega, q, output } => {
            let t: PumpTriple = load(triple)?;
            let omega: Digraph = load(omega)?;
            let g = assemble_gadgets(&t, &omega, *q)?;
            if let Some(path) = output {
                write_json(path, &g)?;
            }
            Ok(Report::ok(json!({ "alpha": g.alpha, "a": g.a, "b": g.b, "k": g.k(), "gadgets": g })))
        }
    }
}

fn reduce_cmd(cmd: &ReduceCmd) -> Res<Report> {
    match cmd {
        ReduceCmd::Build { source, formula, vars, mode, kind, orient, padding, output } => {
            let (gadgets, defaults, demo) = match (&source.gadgets, source.demo) {
                (Some(path), None) => {
                    let g: AssembledGadgets = load(&gadget_file(path))?;
                    let kind = match kind {
                        Some(KindArg::An) => Kind::Deterministic,
                        Some(KindArg::Nan) => Kind::Nondeterministic,
                        None => return Err(UsageError("--kind an|nan is required with --gadgets".into())),
                    };
                    let settings =
                        Settings { kind, mode: Mode::Boolean, padding: Padding::Formula, orientation: Orientation::Sat };
                    (g, settings, None)
                }
                (None, Some(demo)) => (demo.gadgets()?, demo.settings(), Some(demo)),
                _ => return Err(UsageError("give exactly one of --gadgets and --demo".into())),
            };
            let s = match (formula, demo) {
                (Some(text), _) => PropFormula::parse(&text_or_file(text)?, *vars)?,
                (None, Some(demo)) => demo.default_formula(),
                (None, None) => return Err(UsageError("--formula is required with --gadgets".into())),
            };
            let settings = Settings {
                kind: match kind {
                    Some(KindArg::An) => Kind::Deterministic,
                    Some(KindArg::Nan) => Kind::Nondeterministic,
                    None => defaults.kind,
                },
                mode: mode.unwrap_or(defaults.mode),
                padding: match padding {
                    Some(PaddingArg::Formula) => Padding::Formula,
                    Some(PaddingArg::Minimal) => Padding::Minimal,
                    None => defaults.padding,
                },
                orientation: orient.unwrap_or(defaults.orientation),
            };
            let out = compile_reduction(&gadgets, &s, settings)?;
            let mut doc = serde_json::to_value(&out)?;
            doc["gadgets"] = serde_json::to_value(&gadgets)?;
            doc["demo"] = json!(demo.map(|d| d.name()));
            if let Some(path) = output {
                fs::write(path, serde_json::to_string(&doc)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
                let summary = json!({
                    "output": path.display().to_string(),
                    "n": out.descriptor.n(),
                    "configurations": out.layout.total,
                    "gates": out.descriptor.circuit().gate_count(),
                    "expected_word": out.expected_word,
                });
                return Ok(Report::ok(summary));
            }
            Ok(Report::ok(doc))
        }
        ReduceCmd::Verify { output, psi } => {
            let doc: Value = load(output)?;
            let out: ReductionOutput = serde_json::from_value(doc.clone())?;
            let gadgets: AssembledGadgets = serde_json::from_value(
                doc.get("gadgets").cloned().ok_or_else(|| UsageError("output has no embedded gadgets".into()))?,
            )?;
            let demo: Option<Demo> = doc.get("demo").and_then(Value::as_str).map(str::parse).transpose()?;
            let psi = match (psi, demo) {
                (Some(p), _) => formula(p)?,
                (None, Some(d)) => d.psi(),
                (None, None) => return Err(UsageError("--psi is required for outputs built from --gadgets".into())),
            };
            let report = verify_reduction(&out, &gadgets, &psi);
            Ok(Report { ok: report.passed(), doc: json!({ "passed": report.passed(), "report": report }) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = if cli.pretty { serde_json::to_string_pretty(&report.doc) } else { serde_json::to_string(&report.doc) };
            // A closed pipe downstream is not our failure.
            let _ = writeln!(std::io::stdout().lock(), "{}", text.expect("values serialise"));
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("sdyn: {msg}");
            ExitCode::from(2)
        }
    }
}
