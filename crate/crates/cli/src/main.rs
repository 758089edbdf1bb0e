//! Command-line front end: structural reports, solvers, loop and
//! component enumeration, and instance generation, all speaking JSON
//! with exact rationals as strings.
//!
//! Exit codes: 0 success, 1 invalid input, 2 infeasible or violated
//! precondition, 3 cap or bound exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use goodsets::components::{
    check_union_maximal_good, quotient, related_components, relatively_full_components, MethodUsed,
    Partition, PartitionMethod, QuotientModel,
};
use goodsets::error::Error;
use goodsets::generator::{generate, GenKind, GeneratorSpec};
use goodsets::loops::{
    decompose_weak_loop, enumerate_loops, extend_from_maximal_good, maximal_good_subset,
    uperp_fundamental_basis, ConformalDecomposition, LoopCert, WeakLoopVector,
};
use goodsets::measures::{enumerate_extreme_points, uperp_dimension, Measure};
use goodsets::model::doc::{self, PointSetDoc, ValuesDoc};
use goodsets::model::PointSet;
use goodsets::structure::{
    is_good, solve_decomposition, structure_report, AnchorSet, StructureReport,
};
use goodsets::{format_rat, Rat};

#[derive(Parser)]
#[command(
    name = "goodsets",
    version,
    about = "Additive-decomposability toolkit for finite product-space point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full structural report: goodness, fullness, partitions, loops,
    /// annihilator basis, and extreme points.
    Analyze(AnalyzeArgs),
    /// Solve f = u_1 + ... + u_n with anchored values.
    Solve(SolveArgs),
    /// Extend a function on a maximal good subset to the whole set.
    Extend(ExtendArgs),
    /// Conformally decompose a marginal-free measure into scaled loops.
    Decompose(DecomposeArgs),
    /// Enumerate the loops contained in a set.
    Loops(LoopsArgs),
    /// Related and relatively full component partitions.
    Components(ComponentsArgs),
    /// Cross-section quotient of the related components.
    Quotient(QuotientArgs),
    /// Extreme points of the marginal-free unit ball.
    Extreme(ExtremeArgs),
    /// Generate full/good/random/loop instances.
    Generate(GenerateArgs),
    /// Check the union-of-maximal-good-subsets equivalence.
    UnionCheck(UnionCheckArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Input point-set document (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MethodArgs {
    /// Exhaustive oracle partitions only (the default); fails closed
    /// above the oracle bound.
    #[arg(long, conflicts_with_all = ["heuristic", "heuristic_fallback"])]
    oracle: bool,
    /// Merge-rule heuristic partitions only.
    #[arg(long, conflicts_with = "heuristic_fallback")]
    heuristic: bool,
    /// Degrade to the heuristic (flagged in the output) instead of
    /// failing when a bound is exceeded.
    #[arg(long)]
    heuristic_fallback: bool,
}

impl MethodArgs {
    fn method(&self) -> PartitionMethod {
        if self.heuristic {
            PartitionMethod::Heuristic
        } else if self.heuristic_fallback {
            PartitionMethod::Auto
        } else {
            PartitionMethod::Oracle
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Cap on the number of enumerated loops.
    #[arg(long, default_value_t = 1000)]
    cap: usize,
    /// Skip extreme-point enumeration.
    #[arg(long)]
    skip_extreme: bool,
    /// Include wall-clock timing (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Function document over the input set.
    #[arg(long)]
    function: PathBuf,
    /// Anchor document; defaults to the least label per axis.
    #[arg(long)]
    anchors: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Point-set document for the maximal good subset.
    #[arg(long)]
    subset: PathBuf,
    /// Function document over the subset.
    #[arg(long)]
    function: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Measure document (missing points carry zero).
    #[arg(long)]
    measure: PathBuf,
}

#[derive(Args)]
struct LoopsArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Cap on the number of enumerated loops.
    #[arg(long, default_value_t = 1000)]
    cap: usize,
}

#[derive(Args)]
struct ComponentsArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Args)]
struct QuotientArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Args)]
struct ExtremeArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct UnionCheckArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// full | good | random | loop.
    #[arg(long)]
    kind: String,
    /// Ambient dimension.
    #[arg(long)]
    n: usize,
    /// Number of points.
    #[arg(long)]
    size: usize,
    /// Per-axis label budgets: one integer, or a comma list of n.
    #[arg(long)]
    budgets: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((doc, output, code)) => {
            if let Err(e) = write_output(output.as_deref(), &doc) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(exit_code(&failure))
        }
    }
}

fn write_output(path: Option<&std::path::Path>, doc: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, doc),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Document(_)
        | Error::WrongArity { .. }
        | Error::DuplicatePoint(_)
        | Error::InvalidRational(_)
        | Error::ZeroDimension
        | Error::DimensionMismatch(_) => 1,
        Error::BoundExceeded { .. } | Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

type CmdResult = Result<(String, Option<PathBuf>, u8), Error>;

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Extend(args) => cmd_extend(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Loops(args) => cmd_loops(args),
        Command::Components(args) => cmd_components(args),
        Command::Quotient(args) => cmd_quotient(args),
        Command::Extreme(args) => cmd_extreme(args),
        Command::Generate(args) => cmd_generate(args),
        Command::UnionCheck(args) => cmd_union_check(args),
    }
}

fn read_set(path: &PathBuf) -> Result<PointSet, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Document(format!("{path:?}: {e}")))?;
    doc::parse_point_set(&text)
}

fn read_text(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Document(format!("{path:?}: {e}")))
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------
// Report documents.

#[derive(Serialize)]
struct PartitionDoc {
    method: String,
    parts: Vec<Vec<Vec<String>>>,
}

fn partition_doc(p: &Partition) -> PartitionDoc {
    PartitionDoc {
        method: match p.method {
            MethodUsed::Oracle => "oracle".into(),
            MethodUsed::Heuristic => "heuristic".into(),
        },
        parts: p
            .parts
            .iter()
            .map(|part| part.iter().map(|q| q.labels().to_vec()).collect())
            .collect(),
    }
}

#[derive(Serialize)]
struct LoopDoc {
    points: Vec<Vec<String>>,
    coeffs: Vec<String>,
}

fn loop_doc(cert: &LoopCert) -> LoopDoc {
    LoopDoc {
        points: cert.points().iter().map(|p| p.labels().to_vec()).collect(),
        coeffs: cert.coeffs().iter().map(|c| c.to_string()).collect(),
    }
}

fn measure_doc(set: &PointSet, mu: &Measure) -> ValuesDoc {
    doc::values_to_doc(set, mu.values())
}

#[derive(Serialize)]
struct StructureDoc {
    n: usize,
    size: usize,
    coordinates: usize,
    good: bool,
    full: Option<bool>,
    relatively_full: Option<bool>,
    rank: usize,
    kernel_dim: usize,
    excess: usize,
}

fn structure_doc(r: &StructureReport) -> StructureDoc {
    StructureDoc {
        n: r.n,
        size: r.size,
        coordinates: r.coordinates,
        good: r.good,
        full: r.full,
        relatively_full: r.relatively_full,
        rank: r.rank,
        kernel_dim: r.kernel_dim,
        excess: r.excess,
    }
}

// ---------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct AnalyzeReport {
    version: String,
    structure: StructureDoc,
    related_components: Option<PartitionDoc>,
    relatively_full_components: Option<PartitionDoc>,
    maximal_good_subset: Vec<Vec<String>>,
    loops: Option<LoopsReport>,
    uperp: UperpReport,
    extreme_points: Option<ExtremeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

#[derive(Serialize)]
struct LoopsReport {
    count: usize,
    loops: Vec<LoopDoc>,
}

#[derive(Serialize)]
struct UperpReport {
    dimension: usize,
    basis: Vec<ValuesDoc>,
}

#[derive(Serialize)]
struct ExtremeReport {
    count: usize,
    extreme_points: Vec<ValuesDoc>,
}

/// Runs a fallible section; with `--heuristic-fallback` a bound or cap
/// failure degrades to `None` instead of aborting the report.
fn section<T>(allow_skip: bool, result: Result<T, Error>) -> Result<Option<T>, Error> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(e @ (Error::BoundExceeded { .. } | Error::CapExceeded { .. })) if allow_skip => {
            eprintln!("note: section skipped: {e}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> CmdResult {
    let start = Instant::now();
    let set = read_set(&args.io.input)?;
    let fallback = args.method.heuristic_fallback;
    let structure = structure_report(&set);

    let related = if structure.good {
        section(fallback, related_components(&set, args.method.method()))?
    } else {
        None
    };
    let relatively_full = section(
        fallback,
        relatively_full_components(&set, args.method.method()),
    )?;

    let m = maximal_good_subset(&set);
    let loops = section(fallback, enumerate_loops(&set, args.cap))?.map(|certs| LoopsReport {
        count: certs.len(),
        loops: certs.iter().map(loop_doc).collect(),
    });
    let basis = uperp_fundamental_basis(&set, &m)?;
    let uperp = UperpReport {
        dimension: uperp_dimension(&set),
        basis: basis.iter().map(|mu| measure_doc(&set, mu)).collect(),
    };
    let extreme_points = if args.skip_extreme {
        None
    } else {
        section(fallback, enumerate_extreme_points(&set))?.map(|pts| ExtremeReport {
            count: pts.len(),
            extreme_points: pts.iter().map(|mu| measure_doc(&set, mu)).collect(),
        })
    };

    let report = AnalyzeReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        structure: structure_doc(&structure),
        related_components: related.as_ref().map(partition_doc),
        relatively_full_components: relatively_full.as_ref().map(partition_doc),
        maximal_good_subset: m.iter().map(|p| p.labels().to_vec()).collect(),
        loops,
        uperp,
        extreme_points,
        timing_ms: args.timing.then(|| start.elapsed().as_millis()),
    };
    Ok((render(&report), args.io.output, 0))
}

// ---------------------------------------------------------------------
// solve

#[derive(Deserialize)]
struct AnchorsFile {
    anchors: Vec<AnchorEntry>,
}

#[derive(Deserialize)]
struct AnchorEntry {
    axis: usize,
    label: String,
}

#[derive(Serialize)]
struct AxisValues {
    axis: usize,
    values: std::collections::BTreeMap<String, String>,
}

#[derive(Serialize)]
struct SolveReport {
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    freedom_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bundle: Option<Vec<AxisValues>>,
    /// A loop measure that pairs non-trivially with the function,
    /// certifying infeasibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    violated_measure: Option<ValuesDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairing: Option<String>,
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let f = doc::parse_function(&set, &read_text(&args.function)?)?;
    let anchors = match &args.anchors {
        None => AnchorSet::defaults(&set)?,
        Some(path) => {
            let file: AnchorsFile = serde_json::from_str(&read_text(path)?)
                .map_err(|e| Error::Document(e.to_string()))?;
            AnchorSet::new(
                &set,
                file.anchors
                    .into_iter()
                    .map(|a| (a.axis, a.label))
                    .collect(),
            )?
        }
    };
    match solve_decomposition(&set, &f, &anchors)? {
        Some(d) => {
            let bundle = (0..set.dim())
                .map(|axis| AxisValues {
                    axis,
                    values: d
                        .bundle
                        .axis(axis)
                        .iter()
                        .map(|(k, v)| (k.clone(), format_rat(v)))
                        .collect(),
                })
                .collect();
            let report = SolveReport {
                feasible: true,
                freedom_dim: Some(d.freedom_dim),
                bundle: Some(bundle),
                violated_measure: None,
                pairing: None,
            };
            Ok((render(&report), args.io.output, 0))
        }
        None => {
            // Surface a violated loop-measure certificate.
            let m = maximal_good_subset(&set);
            let mut witness = None;
            for mu in uperp_fundamental_basis(&set, &m)? {
                let pairing: Rat = mu.values().iter().zip(f.values()).map(|(a, b)| a * b).sum();
                if pairing != Rat::from_integer(0.into()) {
                    witness = Some((measure_doc(&set, &mu), format_rat(&pairing)));
                    break;
                }
            }
            let (violated_measure, pairing) = witness
                .map(|(m, p)| (Some(m), Some(p)))
                .unwrap_or((None, None));
            let report = SolveReport {
                feasible: false,
                freedom_dim: None,
                bundle: None,
                violated_measure,
                pairing,
            };
            Ok((render(&report), args.io.output, 2))
        }
    }
}

// ---------------------------------------------------------------------
// extend / decompose / loops / components / quotient / extreme

fn cmd_extend(args: ExtendArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let subset = read_set(&args.subset)?;
    let g = doc::parse_function(&subset, &read_text(&args.function)?)?;
    let f = extend_from_maximal_good(&set, &subset, &g)?;
    let out = doc::values_to_doc(&set, f.values());
    Ok((render(&out), args.io.output, 0))
}

#[derive(Serialize)]
struct DecomposeReport {
    pairs: Vec<ScaledLoopDoc>,
    input_l1: String,
    pairs_l1: String,
    pivot_count: usize,
}

#[derive(Serialize)]
struct ScaledLoopDoc {
    points: Vec<Vec<String>>,
    coeffs: Vec<String>,
    scale: String,
}

fn cmd_decompose(args: DecomposeArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let pairs = doc::parse_value_pairs(&set, &read_text(&args.measure)?)?;
    let mut values = vec![Rat::from_integer(0.into()); set.len()];
    for (p, v) in pairs {
        let i = set.index_of(&p).expect("validated point");
        values[i] = v;
    }
    let m = WeakLoopVector::new(&set, values)?;
    let d: ConformalDecomposition = decompose_weak_loop(&set, &m)?;
    let report = DecomposeReport {
        pairs: d
            .pairs
            .iter()
            .map(|(cert, scale)| {
                let ld = loop_doc(cert);
                ScaledLoopDoc {
                    points: ld.points,
                    coeffs: ld.coeffs,
                    scale: format_rat(scale),
                }
            })
            .collect(),
        input_l1: format_rat(&m.l1()),
        pairs_l1: format_rat(&d.scaled_l1()),
        pivot_count: d.pivot_count,
    };
    Ok((render(&report), args.io.output, 0))
}

#[derive(Serialize)]
struct LoopsOnlyReport {
    count: usize,
    loops: Vec<LoopDoc>,
}

fn cmd_loops(args: LoopsArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let certs = enumerate_loops(&set, args.cap)?;
    let report = LoopsOnlyReport {
        count: certs.len(),
        loops: certs.iter().map(loop_doc).collect(),
    };
    Ok((render(&report), args.io.output, 0))
}

#[derive(Serialize)]
struct ComponentsReport {
    related: Option<PartitionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    related_note: Option<String>,
    relatively_full: PartitionDoc,
}

fn cmd_components(args: ComponentsArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let (related, related_note) = if is_good(&set) {
        (Some(related_components(&set, args.method.method())?), None)
    } else {
        (
            None,
            Some("related components are defined for good sets only".to_string()),
        )
    };
    let relatively_full = relatively_full_components(&set, args.method.method())?;
    let report = ComponentsReport {
        related: related.as_ref().map(partition_doc),
        related_note,
        relatively_full: partition_doc(&relatively_full),
    };
    Ok((render(&report), args.io.output, 0))
}

#[derive(Serialize)]
struct QuotientReport {
    components: PartitionDoc,
    cross_section: Vec<Vec<String>>,
    /// Per axis: original label to class label.
    classes: Vec<std::collections::BTreeMap<String, String>>,
    image: PointSetDoc,
    full: bool,
    image_full: bool,
}

fn cmd_quotient(args: QuotientArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let q: QuotientModel = quotient(&set, args.method.method())?;
    let full = goodsets::structure::is_full(&set)?;
    let image_full = goodsets::structure::is_full(&q.image)?;
    let report = QuotientReport {
        components: partition_doc(&q.components),
        cross_section: q
            .cross_section
            .iter()
            .map(|p| p.labels().to_vec())
            .collect(),
        classes: q.class_labels.clone(),
        image: doc::point_set_to_doc(&q.image),
        full,
        image_full,
    };
    Ok((render(&report), args.io.output, 0))
}

fn cmd_extreme(args: ExtremeArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let pts = enumerate_extreme_points(&set)?;
    let report = ExtremeReport {
        count: pts.len(),
        extreme_points: pts.iter().map(|mu| measure_doc(&set, mu)).collect(),
    };
    Ok((render(&report), args.io.output, 0))
}

#[derive(Serialize)]
struct UnionCheckReport {
    partition: PartitionDoc,
    full_subsets: Vec<Vec<Vec<String>>>,
    union_is_maximal_good: bool,
    every_loop_in_one_part: bool,
    loop_count: usize,
}

fn cmd_union_check(args: UnionCheckArgs) -> CmdResult {
    let set = read_set(&args.io.input)?;
    let r = check_union_maximal_good(&set)?;
    let report = UnionCheckReport {
        partition: partition_doc(&r.partition),
        full_subsets: r
            .full_subsets
            .iter()
            .map(|f| f.iter().map(|p| p.labels().to_vec()).collect())
            .collect(),
        union_is_maximal_good: r.union_is_maximal_good,
        every_loop_in_one_part: r.every_loop_in_one_part,
        loop_count: r.loops.len(),
    };
    Ok((render(&report), args.io.output, 0))
}

// ---------------------------------------------------------------------
// generate

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    let kind = match args.kind.as_str() {
        "full" => GenKind::Full,
        "good" => GenKind::Good,
        "random" => GenKind::Random,
        "loop" => GenKind::Loop,
        other => {
            return Err(Error::Document(format!(
                "unknown generator kind {other:?} (expected full|good|random|loop)"
            )))
        }
    };
    let budgets = match &args.budgets {
        None => vec![],
        Some(text) => text
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Document(format!("bad budget {part:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let spec = GeneratorSpec::new(kind, args.n, args.size, budgets, args.seed)?;
    let set = generate(&spec)?;
    Ok((doc::write_point_set(&set), args.output, 0))
}
