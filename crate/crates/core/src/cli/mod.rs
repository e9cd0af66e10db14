//! The `derham` command line: subcommands, JSON input and output, exit codes.

mod suite;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::complexes::ChainComplex;
use crate::dalg::{
    circle_comparison, cotangent_complex, default_bound, free_crystalline_summands, free_crystalline_stub,
    graded_free_table, kahler, realize, theory_stub, AlgebraPresentation, TableFlavor, Theory,
};
use crate::dold_kan::{derived_power, lsym_total, PowerKind};
use crate::error::{Error, Result};
use crate::graded::FilteredStub;
use crate::linalg::RingSpec;

pub use suite::{paper_suite, CaseResult, SuiteReport, GOLDEN};

#[derive(Parser, Debug)]
#[command(name = "derham", version, about = "Exact computations with derived powers and filtered complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComplexInput {
    /// Chain complex JSON file.
    #[arg(long)]
    json_in: PathBuf,
    /// Ring to read the complex over, overriding the file.
    #[arg(long)]
    ring: Option<String>,
}

#[derive(Args, Debug)]
struct AlgebraInput {
    /// Named example: Fp-over-Z, Zx, Zxy, hypersurface-x2.
    #[arg(long, conflicts_with = "json_in")]
    preset: Option<String>,
    /// Presentation JSON file.
    #[arg(long)]
    json_in: Option<PathBuf>,
    /// The prime for `Fp-over-Z`.
    #[arg(long, default_value_t = 3)]
    p: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// `LSym^w` of a complex for each weight `w ≤ weight-cutoff`.
    Lsym {
        #[command(flatten)]
        input: ComplexInput,
        #[arg(long, default_value_t = 4)]
        weight_cutoff: usize,
        #[arg(long, default_value_t = 10)]
        degree_cutoff: usize,
    },
    /// A single derived power `LF^r` with `F` one of sym, ext, div, antisym.
    Power {
        #[command(flatten)]
        input: ComplexInput,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 10)]
        degree_cutoff: usize,
    },
    /// Kähler differentials and the cotangent complex of a presented algebra.
    Cotangent {
        #[command(flatten)]
        alg: AlgebraInput,
        /// Internal-degree bound for realizing over the ground ring.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Hodge-filtered de Rham stub.
    Derham(StubArgs),
    /// Infinitesimal (adic) stub.
    Inf(StubArgs),
    /// HKR-filtered Hochschild stub.
    Hh(StubArgs),
    /// The filtered circle stub and its dual-shear comparison.
    Circle {
        #[arg(long = "N", default_value_t = 4)]
        n: usize,
    },
    /// Values of a graded free algebra on a complex placed in weight `n`.
    GradedTable {
        #[command(flatten)]
        input: ComplexInput,
        /// N, B or Bs (strict B).
        #[arg(long)]
        flavor: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a: i32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        n: i32,
        #[arg(long, default_value_t = 4)]
        weight_cutoff: usize,
        #[arg(long, default_value_t = 10)]
        degree_cutoff: usize,
    },
    /// The free crystalline stub on a free module of rank `rank` in weight `i`.
    CrysStub {
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long = "N")]
        n: usize,
    },
    /// Runs every embedded example and compares with the golden values.
    PaperSuite {
        /// Golden JSON file replacing the embedded one.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct StubArgs {
    #[command(flatten)]
    alg: AlgebraInput,
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Internal-degree bound for presentations with variables.
    #[arg(long)]
    bound: Option<i64>,
}

/// Outcome of one invocation: exit code and the text for standard output.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, stdout: e.to_string() };
            }
            return Outcome { code: 2, stdout: render(&json!({"error": e.kind().to_string(), "detail": e.to_string()})) };
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::PaperSuite { golden } => run_suite(golden.as_ref()),
        other => dispatch(other).map(|v| (0, v)),
    };
    match result {
        Ok((code, v)) => {
            let text = render(&v);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    return failure(&Error::Io(e));
                }
                return Outcome { code, stdout: String::new() };
            }
            Outcome { code, stdout: text }
        }
        Err(e) => failure(&e),
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome { code: e.exit_code(), stdout: render(&json!({"error": e.to_string(), "exit_code": e.exit_code()})) }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn configure_threads() {
    let Ok(v) = std::env::var("DERHAM_THREADS") else { return };
    let Ok(n) = v.trim().parse::<usize>() else { return };
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn load_complex(input: &ComplexInput) -> Result<ChainComplex> {
    let v = read_json(&input.json_in)?;
    match &input.ring {
        Some(r) => ChainComplex::from_json_in(RingSpec::parse(r)?, &v),
        None => ChainComplex::from_json(&v),
    }
}

fn load_algebra(a: &AlgebraInput) -> Result<AlgebraPresentation> {
    match (&a.preset, &a.json_in) {
        (Some(name), _) => AlgebraPresentation::preset(name, a.p),
        (None, Some(path)) => AlgebraPresentation::from_json(&read_json(path)?),
        (None, None) => Err(Error::Parse("either --preset or --json-in is required".into())),
    }
}

fn stub_summary(stub: &FilteredStub) -> Result<Value> {
    let mut gr = Map::new();
    for (s, h) in stub.gr_homology()? {
        gr.insert(s.to_string(), h.to_json());
    }
    let levels: Map<String, Value> =
        (0..stub.n()).map(|s| (s.to_string(), stub.level(s).homology().to_json())).collect();
    Ok(json!({"N": stub.n(), "ring": stub.ring().to_string(), "gr": gr, "levels": levels, "stub": stub.to_json()}))
}

fn dispatch(cmd: &Command) -> Result<Value> {
    match cmd {
        Command::Lsym { input, weight_cutoff, degree_cutoff } => {
            let c = load_complex(input)?;
            let g = lsym_total(&c, *weight_cutoff, *degree_cutoff)?;
            Ok(json!({"ring": c.ring().to_string(), "degree_cutoff": degree_cutoff, "weights": g.homology_json()}))
        }
        Command::Power { input, kind, r, degree_cutoff } => {
            let c = load_complex(input)?;
            let k = PowerKind::parse(kind)?;
            let out = derived_power(k, *r, &c, *degree_cutoff)?;
            Ok(json!({"kind": k.name(), "r": r, "degree_cutoff": degree_cutoff, "homology": out.homology().to_json()}))
        }
        Command::Cotangent { alg, bound } => {
            let p = load_algebra(alg)?;
            let om = kahler(&p)?;
            let l = cotangent_complex(&p)?;
            let b = if l.coeffs.is_finite() { None } else { Some(bound.unwrap_or_else(|| default_bound(&p, 1))) };
            let realized = realize(&l, b)?;
            let jac: Vec<Vec<String>> = l
                .d
                .get(&1)
                .map(|cols| {
                    cols.iter()
                        .map(|col| {
                            let mut row = vec!["0".to_string(); l.rank(0)];
                            for (i, e) in col {
                                row[*i] = e.format(p.vars());
                            }
                            row
                        })
                        .collect()
                })
                .unwrap_or_default();
            Ok(json!({
                "presentation": p.to_json(),
                "kahler": om.to_json(),
                "kahler_display": om.to_string(),
                "cotangent": {"ranks": {"0": l.rank(0), "1": l.rank(1)}, "jacobian_columns": jac},
                "bound": b,
                "homology_over_ground_ring": realized.complex.homology().to_json(),
            }))
        }
        Command::Derham(a) | Command::Inf(a) | Command::Hh(a) => {
            let theory = match cmd {
                Command::Derham(_) => Theory::DeRham,
                Command::Inf(_) => Theory::Infinitesimal,
                _ => Theory::Hochschild,
            };
            let p = load_algebra(&a.alg)?;
            let stub = theory_stub(&p, theory, a.n, a.bound)?;
            let mut v = stub_summary(&stub)?;
            v["theory"] = json!(theory.as_str());
            v["presentation"] = p.to_json();
            Ok(v)
        }
        Command::Circle { n } => {
            let c = circle_comparison(*n)?;
            let table = |m: &BTreeMap<i32, crate::complexes::HomologyTable>| -> Map<String, Value> {
                m.iter().map(|(w, h)| (w.to_string(), h.to_json())).collect()
            };
            Ok(json!({
                "N": n,
                "total": c.total.to_json(),
                "gr": table(&c.gr),
                "sheared_dual": table(&c.sheared_dual),
                "expected": table(&c.expected),
                "agrees": c.agrees(),
            }))
        }
        Command::GradedTable { input, flavor, a, n, weight_cutoff, degree_cutoff } => {
            let c = load_complex(input)?;
            let f = TableFlavor::parse(flavor, *a)?;
            let g = graded_free_table(f, &c, *n, *weight_cutoff, *degree_cutoff)?;
            Ok(json!({"flavor": flavor, "a": a, "n": n, "weights": g.homology_json()}))
        }
        Command::CrysStub { ring, i, rank, n } => {
            let ring = RingSpec::parse(ring)?;
            let stub = free_crystalline_stub(ring, *i, *rank, *n)?;
            let summands: Vec<Value> = free_crystalline_summands(ring, *i, *rank, *n)?
                .iter()
                .map(|s| json!({"r": s.r, "weight": s.weight, "homology": s.complex.homology().to_json(), "coconnective": s.is_coconnective()}))
                .collect();
            let mut v = stub_summary(&stub)?;
            v["summands"] = json!(summands);
            Ok(v)
        }
        Command::PaperSuite { .. } => unreachable!("handled by run"),
    }
}

fn run_suite(golden: Option<&PathBuf>) -> Result<(i32, Value)> {
    let text = match golden {
        Some(p) => std::fs::read_to_string(p)?,
        None => GOLDEN.to_string(),
    };
    let report = paper_suite(&text)?;
    for c in &report.cases {
        eprintln!("{:<40} {:>6} ms  {}", c.name, c.millis, if c.pass { "ok" } else { "FAILED" });
    }
    let code = if report.all_pass() { 0 } else { 1 };
    Ok((code, report.to_json()))
}
