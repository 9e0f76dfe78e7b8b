use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fairsched::conflict::{build_day_graph, build_overall_graph, to_dot};
use fairsched::format::{instance_to_json, parse_instance, parse_schedule, schedule_to_json};
use fairsched::gen::{random_instance_seeded, GenOptions};
use fairsched::ilp::{build_ilp, export, IlpOptions};
use fairsched::specialcase::dispatch::run_treewidth;
use fairsched::specialcase::{solve_any, solve_with, Algorithm, DispatchConfig};
use fairsched::transform::{self, Reduction};
use fairsched::treewidth::{compute_tree_decomposition, parse_pace, to_nice, to_pace};
use fairsched::{classify, verify_schedule, Answer, Error, Instance};
use serde::Serialize;
use sha2::{Digest, Sha256};

mod bench;

#[derive(Parser)]
#[command(name = "fairsched", version, about = "Fair repetitive interval scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a fair feasible schedule exists.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Verify {
        instance: PathBuf,
        schedule: PathBuf,
    },
    /// Print the structural class of an instance as JSON.
    Classify { instance: PathBuf },
    /// Write a random instance or a hardness gadget.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Rewrite an instance, or map a target schedule back to the source.
    Transform {
        #[command(subcommand)]
        op: TransformOp,
    },
    /// Write the scheduling ILP in CPLEX LP or JSON form.
    ExportIlp {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = IlpFormat::Lp)]
        format: IlpFormat,
        /// One type per day instead of grouping equal conflict graphs.
        #[arg(long)]
        per_day: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a conflict graph in Graphviz format.
    ExportDot {
        instance: PathBuf,
        /// 1-based day; the overall conflict graph when omitted.
        #[arg(long)]
        day: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a tree decomposition of the overall conflict graph (PACE .td).
    ExportTd {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Time solvers on a suite file or a generated family; CSV output.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum IlpFormat {
    Lp,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Trivial,
    Twosat,
    Matching,
    Daydue,
    Chromatic,
    Treewidth,
    Ilp,
    Oracle,
}

impl AlgorithmArg {
    fn algorithm(self) -> Option<Algorithm> {
        Some(match self {
            AlgorithmArg::Auto => return None,
            AlgorithmArg::Trivial => Algorithm::Trivial,
            AlgorithmArg::Twosat => Algorithm::TwoSat,
            AlgorithmArg::Matching => Algorithm::Matching,
            AlgorithmArg::Daydue => Algorithm::DayDue,
            AlgorithmArg::Chromatic => Algorithm::Chromatic,
            AlgorithmArg::Treewidth => Algorithm::Treewidth,
            AlgorithmArg::Ilp => Algorithm::Ilp,
            AlgorithmArg::Oracle => Algorithm::Oracle,
        })
    }
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Search-node budget for the exhaustive search and the ILP.
    #[arg(long, alias = "budget")]
    budget_nodes: Option<u64>,
    /// Cap on candidate sets per day (exhaustive search) or per day type (ILP).
    #[arg(long)]
    budget_daysets: Option<usize>,
    /// Run the treewidth DP when (width + 1) * m is at most this.
    #[arg(long)]
    treewidth_bits: Option<usize>,
    /// Run the exhaustive search when log2 of its search space is at most this.
    #[arg(long)]
    oracle_bits: Option<f64>,
}

impl BudgetArgs {
    fn config(&self) -> DispatchConfig {
        let mut config = DispatchConfig::default();
        if let Some(n) = self.budget_nodes {
            config.oracle_budget.max_nodes = n;
            config.ilp_max_nodes = n;
        }
        if let Some(d) = self.budget_daysets {
            config.oracle_budget.max_day_sets = d;
            config.ilp_options.max_sets_per_type = d;
        }
        if let Some(b) = self.treewidth_bits {
            config.treewidth_max_bits = b;
        }
        if let Some(b) = self.oracle_bits {
            config.oracle_max_bits = b;
        }
        config
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
    algorithm: AlgorithmArg,
    /// Tree decomposition (PACE .td) for the treewidth DP.
    #[arg(long)]
    td: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Where to write the schedule on YES.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the JSON run report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateKind {
    Random(RandomArgs),
    /// 3-day gadget from a DIMACS CNF with 2-3 literals per clause and at
    /// most 3 occurrences per variable.
    #[command(name = "from-3sat")]
    From3sat {
        cnf: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Client-role sidecar (JSON).
        #[arg(long)]
        roles: Option<PathBuf>,
    },
    /// Per-client gadget from a coloured regular graph (`v <id> <colour>`,
    /// `e <u> <v>` lines).
    FromMis {
        graph: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        roles: Option<PathBuf>,
        /// Double every edge when their number is odd.
        #[arg(long)]
        even: bool,
        /// Width-4 tree decomposition of the gadget (PACE .td).
        #[arg(long)]
        td: Option<PathBuf>,
    },
    /// Instance from just-in-time jobs on unrelated machines (JSON).
    FromRjit {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    max_p: u64,
    #[arg(long, default_value_t = 8)]
    max_d: u64,
    /// Drawn from 0..=m when omitted.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    unit_p: bool,
    #[arg(long)]
    day_independent_p: bool,
    #[arg(long)]
    day_independent_d: bool,
    #[arg(long)]
    agreeable: bool,
    /// Probability that a job is absent.
    #[arg(long, default_value_t = 0.0)]
    absent: f64,
    #[arg(long, default_value_t = 1)]
    machines: usize,
    #[arg(long, env = "FAIRSCHED_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TransformOp {
    Totalize(TransformArgs),
    PerClientToUniform(TransformArgs),
    AgreeableToDayIndependent(TransformArgs),
    MachinesToDays(TransformArgs),
    PadHardness {
        #[command(flatten)]
        common: TransformArgs,
        /// Conflict-free days to add (each raises k by one).
        #[arg(long, default_value_t = 0)]
        free_days: usize,
        /// Blocking layers to add (one client and one day each; needs k = 1).
        #[arg(long, default_value_t = 0)]
        blocking: usize,
    },
}

#[derive(Args)]
struct TransformArgs {
    instance: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Map this schedule of the target back to the source instead of
    /// writing the target.
    #[arg(long)]
    pull_back: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    fingerprint: String,
    n: usize,
    m: usize,
    class: fairsched::InstanceClass,
    algorithm: String,
    answer: Answer,
    route: Vec<String>,
    witness_path: Option<String>,
    witness_verified: Option<bool>,
    elapsed_ms: f64,
    stats: std::collections::BTreeMap<String, u64>,
    error: Option<String>,
}

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_ERROR: u8 = 4;

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<(Instance, String)> {
    let bytes = read(path)?;
    let inst = parse_instance(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok((inst, hex::encode(Sha256::digest(&bytes))))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => print_stdout(text),
    }
}

/// A closed pipe on stdout (`| head`) is not an error.
fn print_stdout(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn solve(args: &SolveArgs) -> anyhow::Result<u8> {
    let (inst, fingerprint) = match load_instance(&args.instance) {
        Ok(loaded) => loaded,
        Err(e) => {
            if let Some(p) = &args.report {
                let report = serde_json::json!({ "answer": null, "error": format!("{e:#}") });
                emit(Some(p), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            return Err(e);
        }
    };
    let config = args.budget.config();
    let forced = args.algorithm.algorithm();
    let result = match (&args.td, forced) {
        (Some(td), None | Some(Algorithm::Treewidth)) => {
            let text = String::from_utf8(read(td)?).context("decomposition is not UTF-8")?;
            let ntd = to_nice(&parse_pace(&text)?)?;
            run_treewidth(&inst, Some(&ntd), &config)
        }
        (Some(_), Some(a)) => return Err(anyhow!("--td only applies to the treewidth algorithm, not {a}")),
        (None, Some(a)) => solve_with(&inst, a, &config),
        (None, None) => solve_any(&inst, &config),
    };

    let class = classify(&inst);
    let mut report = RunReport {
        fingerprint,
        n: inst.n(),
        m: inst.m(),
        class,
        algorithm: forced.map_or("auto".into(), |a| a.to_string()),
        answer: Answer::Undecided,
        route: Vec::new(),
        witness_path: None,
        witness_verified: None,
        elapsed_ms: 0.0,
        stats: Default::default(),
        error: None,
    };
    let code = match result {
        Ok(out) => {
            report.algorithm = out.algorithm.to_string();
            report.answer = out.answer;
            report.route = out.route.clone();
            report.elapsed_ms = out.elapsed.as_secs_f64() * 1e3;
            report.stats = out.stats.clone();
            if let Some(w) = &out.witness {
                let verified = verify_schedule(&inst, w).ok();
                report.witness_verified = Some(verified);
                if !verified {
                    return Err(anyhow!("internal error: {} returned a schedule that does not verify", out.algorithm));
                }
                if let Some(p) = &args.out {
                    emit(Some(p), &schedule_to_json(w))?;
                    report.witness_path = Some(p.display().to_string());
                }
            }
            print_stdout(match out.answer {
                Answer::Yes => "YES\n",
                Answer::No => "NO\n",
                Answer::Undecided => "UNDECIDED\n",
            })?;
            match out.answer {
                Answer::Yes => EXIT_YES,
                Answer::No => EXIT_NO,
                Answer::Undecided => EXIT_UNDECIDED,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            report.error = Some(e.to_string());
            match e {
                Error::Budget(_) => EXIT_UNDECIDED,
                Error::Precondition { .. } => EXIT_PRECONDITION,
                _ => EXIT_ERROR,
            }
        }
    };
    if let Some(p) = &args.report {
        emit(Some(p), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(code)
}

fn verify(instance: &Path, schedule: &Path) -> anyhow::Result<u8> {
    let (inst, _) = load_instance(instance)?;
    let sched = parse_schedule(&read(schedule)?)?;
    let report = verify_schedule(&inst, &sched);
    print_stdout(&(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(if report.ok() { EXIT_YES } else { EXIT_NO })
}

fn generate(kind: &GenerateKind) -> anyhow::Result<u8> {
    match kind {
        GenerateKind::Random(a) => {
            let opts = GenOptions {
                n: a.n,
                m: a.m,
                max_p: a.max_p,
                max_d: a.max_d,
                k: a.k,
                unit_p: a.unit_p,
                day_independent_p: a.day_independent_p,
                day_independent_d: a.day_independent_d,
                agreeable: a.agreeable,
                absent: a.absent,
                machines: a.machines,
            };
            emit(a.out.as_deref(), &instance_to_json(&random_instance_seeded(&opts, a.seed)))?;
        }
        GenerateKind::From3sat { cnf, out, roles } => {
            let text = String::from_utf8(read(cnf)?).context("CNF is not UTF-8")?;
            let gadget = transform::gadget_from_3sat(&transform::parse_dimacs(&text)?)?;
            emit(out.as_deref(), &instance_to_json(&gadget.instance))?;
            if let Some(p) = roles {
                emit(Some(p), &gadget.roles_json())?;
            }
        }
        GenerateKind::FromMis { graph, out, roles, even, td } => {
            let text = String::from_utf8(read(graph)?).context("graph is not UTF-8")?;
            let mut g = transform::parse_colored_graph(&text)?;
            if *even {
                g = g.with_even_edges();
            }
            let gadget = transform::gadget_from_mis(&g)?;
            emit(out.as_deref(), &instance_to_json(&gadget.instance))?;
            if let Some(p) = roles {
                emit(Some(p), &gadget.roles_json())?;
            }
            if let Some(p) = td {
                emit(Some(p), &to_pace(&transform::mis_gadget_decomposition(&gadget)))?;
            }
        }
        GenerateKind::FromRjit { input, out } => {
            let jit = transform::parse_unrelated_jit(&read(input)?)?;
            emit(out.as_deref(), &instance_to_json(&transform::import_unrelated_jit(&jit)?))?;
        }
    }
    Ok(EXIT_YES)
}

fn run_transform(op: &TransformOp) -> anyhow::Result<u8> {
    type Build = Box<dyn Fn(&Instance) -> fairsched::Result<Reduction>>;
    let (common, build): (&TransformArgs, Build) = match op {
        TransformOp::Totalize(a) => (a, Box::new(transform::totalize)),
        TransformOp::PerClientToUniform(a) => (a, Box::new(transform::per_client_k_to_uniform)),
        TransformOp::AgreeableToDayIndependent(a) => (
            a,
            Box::new(|inst: &Instance| {
                let order = classify(inst).agreeable_order.ok_or_else(|| Error::Precondition {
                    algorithm: "agreeable_to_day_independent",
                    reason: "no client order has non-decreasing due dates on every day".into(),
                })?;
                transform::agreeable_to_day_independent(inst, &order)
            }),
        ),
        TransformOp::MachinesToDays(a) => (a, Box::new(transform::machines_to_days)),
        TransformOp::PadHardness {
            common,
            free_days,
            blocking,
        } => {
            let (a, b) = (*free_days, *blocking);
            (common, Box::new(move |inst: &Instance| transform::pad_hardness(inst, a, b)))
        }
    };
    let (inst, _) = load_instance(&common.instance)?;
    let red = match build(&inst) {
        Ok(r) => r,
        Err(e @ Error::Precondition { .. }) => {
            eprintln!("error: {e}");
            return Ok(EXIT_PRECONDITION);
        }
        Err(e) => return Err(e.into()),
    };
    eprintln!("{}: {}", red.kind, red.certificate);
    match &common.pull_back {
        Some(p) => {
            let sched = parse_schedule(&read(p)?)?;
            emit(common.out.as_deref(), &schedule_to_json(&red.pull_back(&sched)?))?;
        }
        None => emit(common.out.as_deref(), &instance_to_json(&red.target))?,
    }
    Ok(EXIT_YES)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Verify { instance, schedule } => verify(&instance, &schedule),
        Command::Classify { instance } => {
            let (inst, _) = load_instance(&instance)?;
            print_stdout(&(serde_json::to_string_pretty(&classify(&inst))? + "\n"))?;
            Ok(EXIT_YES)
        }
        Command::Generate { kind } => generate(&kind),
        Command::Transform { op } => run_transform(&op),
        Command::ExportIlp {
            instance,
            format,
            per_day,
            out,
        } => {
            let (inst, _) = load_instance(&instance)?;
            let options = IlpOptions {
                group_types: !per_day,
                ..Default::default()
            };
            let model = build_ilp(&inst, &options)?;
            let text = match format {
                IlpFormat::Lp => export::to_lp(&model),
                IlpFormat::Json => export::to_json(&model),
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_YES)
        }
        Command::ExportDot { instance, day, out } => {
            let (inst, _) = load_instance(&instance)?;
            let text = match day {
                Some(d) if d == 0 || d > inst.m() => return Err(anyhow!("day {d} is outside 1..={}", inst.m())),
                Some(d) => to_dot(&build_day_graph(&inst, d - 1).graph, &format!("day{d}")),
                None => to_dot(&build_overall_graph(&inst).graph, "overall"),
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_YES)
        }
        Command::ExportTd { instance, out } => {
            let (inst, _) = load_instance(&instance)?;
            let td = compute_tree_decomposition(&build_overall_graph(&inst).graph);
            emit(out.as_deref(), &to_pace(&td))?;
            Ok(EXIT_YES)
        }
        Command::Bench(args) => bench::run(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Precondition { .. }) => EXIT_PRECONDITION,
                Some(Error::Budget(_)) => EXIT_UNDECIDED,
                _ => EXIT_ERROR,
            };
            ExitCode::from(code)
        }
    }
}
