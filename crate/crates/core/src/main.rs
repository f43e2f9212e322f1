use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mrc::bench::run_bench;
use mrc::generate::{generate_instance, GenConfig, Model};
use mrc::lp::LpConfig;
use mrc::pipeline::{oracle_summary, run_pipeline, SolveOptions, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK};
use mrc::rounding::{relaxed_thresholds, Mode};
use mrc::{parse_instance, serialize_instance, verify_cut, Instance, Removal, Semantics};

#[derive(Parser)]
#[command(
    name = "mrc",
    version,
    about = "Multi-route cut solver: LP relaxation, region-growing rounding, exact oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Solve an instance and print the run report.
    Solve(SolveArgs),
    /// Check a given cut against an instance.
    Verify(VerifyArgs),
    /// Exact optimum by exhaustive search.
    Oracle(OracleArgs),
    /// Run the fixed seeded suites and print the ratio table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Gnp,
    Grid,
    Multigraph,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Edge,
    Vertex,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeKind {
    Exact,
    Bicriteria,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Md,
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "gnp")]
    model: ModelKind,
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Edge probability for `gnp`.
    #[arg(long, default_value_t = 0.4)]
    p: f64,
    /// Edge count for `multigraph`.
    #[arg(long, default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    #[arg(long, default_value_t = 1)]
    cost_min: u32,
    #[arg(long, default_value_t = 10)]
    cost_max: u32,
    #[arg(long, default_value_t = 2)]
    demands: usize,
    #[arg(long, default_value_t = 1)]
    k_min: u32,
    #[arg(long, default_value_t = 2)]
    k_max: u32,
    #[arg(long, value_enum, default_value = "edge")]
    removal: Variant,
    #[arg(long, value_enum, default_value = "edge")]
    semantics: Variant,
    #[arg(long)]
    allow_vacuous: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeKind,
    /// Relaxation factor; thresholds become ceil(beta * k).
    #[arg(long)]
    beta: Option<f64>,
}

impl ModeArgs {
    fn mode(&self) -> Result<Mode, String> {
        match (self.mode, self.beta) {
            (ModeKind::Exact, None) => Ok(Mode::Exact),
            (ModeKind::Exact, Some(1.0)) => Ok(Mode::Exact),
            (ModeKind::Exact, Some(_)) => Err("--beta other than 1 needs --mode bicriteria".into()),
            (ModeKind::Bicriteria, None) => Err("--mode bicriteria needs --beta".into()),
            (ModeKind::Bicriteria, Some(beta)) if beta.is_finite() && beta >= 1.0 => Ok(Mode::Bicriteria { beta }),
            (ModeKind::Bicriteria, Some(beta)) => Err(format!("--beta must be at least 1, got {beta}")),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, default_value_t = 1e-6)]
    tol_sep: f64,
    #[arg(long, default_value_t = 10_000)]
    row_cap: usize,
    /// Run the oracle when the instance has at most this many items; 0 disables.
    #[arg(long, default_value_t = 20)]
    oracle_cap: usize,
    /// Leave timing fields out of the report.
    #[arg(long)]
    no_timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    /// Comma-separated removed edge ids (vertex ids for vertex removal).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    cut: Vec<usize>,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 20)]
    oracle_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Offset added to every suite's base seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    oracle_cap: usize,
    #[arg(long, value_enum, default_value = "md")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT as u8, message: message.to_string() }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn variant(v: Variant) -> (Removal, Semantics) {
    match v {
        Variant::Edge => (Removal::Edge, Semantics::EdgeDisjoint),
        Variant::Vertex => (Removal::Vertex, Semantics::VertexDisjoint),
    }
}

fn gen(args: GenArgs) -> Result<u8, Failure> {
    let model = match args.model {
        ModelKind::Gnp => Model::Gnp { n: args.n, p: args.p },
        ModelKind::Grid => Model::Grid { rows: args.rows, cols: args.cols },
        ModelKind::Multigraph => Model::Multigraph { n: args.n, m: args.m },
    };
    let config = GenConfig {
        model,
        seed: args.seed,
        cost_min: args.cost_min,
        cost_max: args.cost_max,
        demands: args.demands,
        k_min: args.k_min,
        k_max: args.k_max,
        removal: variant(args.removal).0,
        semantics: variant(args.semantics).1,
        allow_vacuous: args.allow_vacuous,
    };
    let instance = generate_instance(&config).map_err(input_error)?;
    let text = serialize_instance(&instance).map_err(input_error)?;
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK as u8)
}

fn solve(args: SolveArgs) -> Result<u8, Failure> {
    let mode = args.mode.mode().map_err(input_error)?;
    let instance = load(&args.input)?;
    let options = SolveOptions {
        mode,
        lp: LpConfig { eps_sep: args.tol_sep, row_cap: args.row_cap, ..LpConfig::default() },
        oracle_cap: args.oracle_cap,
    };
    let report = run_pipeline(&instance, &options).map_err(input_error)?;
    emit(args.out.as_deref(), &report.to_json(!args.no_timings))?;
    if let Some(err) = &report.error {
        eprintln!("mrc: {}: {}", err.code, err.message);
    }
    Ok(report.exit_code as u8)
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let mode = args.mode.mode().map_err(input_error)?;
    let instance = load(&args.input)?;
    let thresholds = relaxed_thresholds(&instance, mode.beta());
    let mut cut = args.cut;
    cut.sort_unstable();
    cut.dedup();
    let report = verify_cut(&instance, &cut, &thresholds).map_err(input_error)?;
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&report).expect("serializable"))?;
    Ok(if report.feasible { EXIT_OK } else { EXIT_INFEASIBLE } as u8)
}

fn oracle(args: OracleArgs) -> Result<u8, Failure> {
    let instance = load(&args.input)?;
    let summary = oracle_summary(&instance, args.oracle_cap);
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&summary).expect("serializable"))?;
    Ok(match summary {
        mrc::pipeline::OracleSummary::Optimal { .. } => EXIT_OK,
        mrc::pipeline::OracleSummary::Infeasible { .. } => EXIT_INFEASIBLE,
        mrc::pipeline::OracleSummary::Skipped { .. } => EXIT_INPUT,
    } as u8)
}

fn bench(args: BenchArgs) -> Result<u8, Failure> {
    let table = run_bench(args.seed, args.oracle_cap);
    let text = match args.format {
        TableFormat::Md => table.to_markdown(),
        TableFormat::Csv => table.to_csv(),
        TableFormat::Json => serde_json::to_string_pretty(&table).expect("serializable"),
    };
    emit(args.out.as_deref(), &text)?;
    let all_verified = table.rows.iter().all(|r| r.verified + r.infeasible == r.instances);
    Ok(if all_verified { EXIT_OK } else { EXIT_INFEASIBLE } as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT as u8 } else { EXIT_OK as u8 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mrc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
