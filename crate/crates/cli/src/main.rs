use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dnacodex::clique::{self, Budget, DEFAULT_NODE_BUDGET};
use dnacodex::code::read_header;
use dnacodex::graph::read_dimacs;
use dnacodex::sls::{self, SlsParams, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MAX_STAGNATION};
use dnacodex::table::{self, Mode, TableBudget, BUDGET_ENV};
use dnacodex::{CodeParams, CodeSet, ConflictGraph, Error, GraphKind};

/// Design, verify and exactly optimise constant GC-content DNA codes.
#[derive(Parser)]
#[command(name = "dnacodex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a code with stochastic local search.
    Search(SearchArgs),
    /// Check a code file against the distance and GC constraints.
    Verify(VerifyArgs),
    /// Build a compatibility graph; print its statistics or write DIMACS.
    Graph(GraphArgs),
    /// Find a maximum clique (an optimal code) and optionally count them.
    Clique(CliqueArgs),
    /// Fill the table of A(n, d, n/2) and check it against recorded values.
    Table(TableArgs),
}

#[derive(Args)]
struct CodeFlags {
    /// Sequence length.
    #[arg(long)]
    n: usize,
    /// Minimum Hamming distance.
    #[arg(long)]
    d: usize,
    /// GC content of every sequence.
    #[arg(long)]
    w: usize,
}

impl CodeFlags {
    fn params(&self) -> Result<CodeParams, Error> {
        CodeParams::new(self.n, self.d, self.w)
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    code: CodeFlags,
    /// Stop as soon as a code of this size is found.
    #[arg(long)]
    target: Option<usize>,
    /// Halt after this many steps without improvement.
    #[arg(long, default_value_t = DEFAULT_MAX_STAGNATION)]
    max_stagnation: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs; the largest code wins, ties to the lowest seed.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Write the code file here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON run record.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Strong,
    Weak,
}

#[derive(Args)]
struct VerifyArgs {
    /// Code file to check.
    #[arg(long)]
    file: PathBuf,
    /// Parameters; default to the file's header.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long, value_enum, default_value_t = VerifyMode::Strong)]
    mode: VerifyMode,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindFlag {
    Gcrc,
    Gc,
}

impl From<KindFlag> for GraphKind {
    fn from(k: KindFlag) -> Self {
        match k {
            KindFlag::Gcrc => GraphKind::GcRc,
            KindFlag::Gc => GraphKind::GcOnly,
        }
    }
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    kind: KindFlag,
    #[command(flatten)]
    code: CodeFlags,
    /// Write the graph in DIMACS format.
    #[arg(long)]
    dimacs: Option<PathBuf>,
    /// Print statistics (the default unless --dimacs is given).
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct CliqueArgs {
    #[arg(long, value_enum, required_unless_present = "dimacs")]
    kind: Option<KindFlag>,
    #[arg(long, required_unless_present = "dimacs")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "dimacs")]
    d: Option<usize>,
    #[arg(long, required_unless_present = "dimacs")]
    w: Option<usize>,
    /// Solve a DIMACS graph instead of building one.
    #[arg(long, conflicts_with_all = ["kind", "n", "d", "w", "out"])]
    dimacs: Option<PathBuf>,
    /// Also count the distinct maximum cliques.
    #[arg(long)]
    count: bool,
    /// Write the witness code file here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Search node limit (overrides the budget variable).
    #[arg(long)]
    max_nodes: Option<u64>,
}

#[derive(Args)]
struct TableArgs {
    /// Largest sequence length to include.
    #[arg(long)]
    max_n: usize,
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Budget preset (tiny, default, large) or clique node count.
    #[arg(long)]
    budget: Option<String>,
    /// Print JSON instead of a Markdown table.
    #[arg(long)]
    json: bool,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParams(_)
            | Error::UnsupportedLength(_)
            | Error::LengthMismatch { .. }
            | Error::TooLarge { .. }
            | Error::IndexOutOfRange { .. } => 2,
            Error::Io(_)
            | Error::Json(_)
            | Error::Parse { .. }
            | Error::MissingHeader
            | Error::InvalidSymbol { .. }
            | Error::EmptyInput => 3,
            Error::Exhausted { .. } | Error::BudgetExceeded { .. } | Error::NotAClique { .. } => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| fail(3, format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| fail(3, format!("{}: {e}", path.display())))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn budget_from_env() -> Result<TableBudget, Failure> {
    TableBudget::from_env().map_err(|e| fail(2, format!("{BUDGET_ENV}: {e}")))
}

fn search(args: SearchArgs) -> Outcome {
    let params = SlsParams::new(args.code.params()?)
        .with_target(args.target)
        .with_max_stagnation(args.max_stagnation)
        .with_acceptance(args.alpha, args.beta)
        .with_seed(args.seed);
    let best = sls::run_multi(&params, args.runs)?;
    match &args.out {
        Some(path) => {
            let mut f = create(path)?;
            best.code.write(&mut f)?;
            f.flush()?;
        }
        None if !args.json => print!("{}", best.code.to_text()),
        None => {}
    }
    if args.json {
        print_json(&best.record(&params))?;
    } else {
        eprintln!(
            "size {} (seed {}, {} moves{})",
            best.code.len(),
            best.seed,
            best.total_moves,
            match args.target {
                Some(t) if !best.reached_target => format!(", target {t} not reached"),
                _ => String::new(),
            }
        );
    }
    Ok(0)
}

fn verify(args: VerifyArgs) -> Outcome {
    let text = std::fs::read_to_string(&args.file).map_err(|e| fail(3, format!("{}: {e}", args.file.display())))?;
    let header = read_header(&text);
    let params = match (args.n, args.d, args.w, header) {
        (Some(n), Some(d), Some(w), _) => CodeParams::new(n, d, w)?,
        (n, d, w, Some(h)) => CodeParams::new(n.unwrap_or(h.n), d.unwrap_or(h.d), w.unwrap_or(h.w))?,
        _ => return Err(fail(2, "--n, --d and --w are required when the file has no header")),
    };
    let code = CodeSet::read(params, text.as_bytes())?;
    let report = match args.mode {
        VerifyMode::Strong => code.verify_strong(),
        VerifyMode::Weak => code.verify_weak(),
    };
    if args.json {
        print_json(&report)?;
    } else if report.valid {
        println!("valid: {} sequences", code.len());
    } else {
        println!("invalid: {} violations", report.violations.len());
        for v in &report.violations {
            println!("{v}");
        }
    }
    Ok(if report.valid { 0 } else { 1 })
}

fn graph(args: GraphArgs) -> Outcome {
    let budget = budget_from_env()?;
    let g = ConflictGraph::build_with_limit(args.kind.into(), args.code.params()?, budget.max_vertices)?;
    if let Some(path) = &args.dimacs {
        let mut f = create(path)?;
        g.write_dimacs(&mut f)?;
        f.flush()?;
    }
    if args.stats || args.dimacs.is_none() {
        print_json(&g.stats())?;
    }
    Ok(0)
}

fn clique(args: CliqueArgs) -> Outcome {
    let env = budget_from_env()?;
    let nodes = args.max_nodes.unwrap_or(if std::env::var_os(BUDGET_ENV).is_some() {
        env.nodes
    } else {
        DEFAULT_NODE_BUDGET
    });
    let budget = Budget::nodes(nodes);

    if let Some(path) = &args.dimacs {
        let dimacs = read_dimacs(open(path)?)?;
        let mut result = clique::max_clique_with_budget(&dimacs.graph, budget);
        if let Some(labels) = dimacs.full_labels() {
            result = result.with_labels(&labels);
        }
        let count = (args.count && result.complete)
            .then(|| clique::count_max_cliques(&dimacs.graph, Some(result.size), budget));
        return report_clique(&result, count.as_ref());
    }

    let (Some(kind), Some(n), Some(d), Some(w)) = (args.kind, args.n, args.d, args.w) else {
        return Err(fail(2, "--kind, --n, --d and --w are required"));
    };
    let kind = GraphKind::from(kind);
    let g = ConflictGraph::build_with_limit(kind, CodeParams::new(n, d, w)?, env.max_vertices)?;
    let result = clique::max_clique_symmetric(&g, budget).with_labels(g.vertices());
    if let Some(path) = &args.out {
        let code = clique::clique_to_code(&g, &result.vertices)?;
        let mut f = create(path)?;
        code.write(&mut f)?;
        f.flush()?;
    }
    let count = (args.count && result.complete).then(|| clique::count_max_cliques(g.graph(), Some(result.size), budget));
    report_clique(&result, count.as_ref())
}

fn report_clique(result: &clique::CliqueResult, count: Option<&clique::CountResult>) -> Outcome {
    let mut value = serde_json::to_value(result).map_err(Error::from)?;
    if let Some(c) = count {
        value["count"] = c.count.into();
        value["count_exhausted"] = c.exhausted.into();
        value["count_nodes_explored"] = c.nodes_explored.into();
    }
    print_json(&value)?;
    if !result.complete {
        eprintln!(
            "search budget exhausted after {} nodes; size {} is only a lower bound",
            result.nodes_explored, result.size
        );
        return Ok(4);
    }
    if count.is_some_and(|c| !c.exhausted) {
        eprintln!("counting budget exhausted; count is partial");
        return Ok(4);
    }
    Ok(0)
}

fn table(args: TableArgs) -> Outcome {
    let mode: Mode = args.mode.parse().map_err(|e: Error| fail(2, e.to_string()))?;
    let budget = match &args.budget {
        Some(b) => b.parse().map_err(|e: Error| fail(2, e.to_string()))?,
        None => budget_from_env()?,
    };
    let report = table::compute(args.max_n, mode, budget)?;
    if args.json {
        print_json(&report)?;
    } else {
        print!("{}", report.to_markdown());
    }
    if !report.contradictions.is_empty() {
        for c in &report.contradictions {
            eprintln!("contradiction: {c}");
        }
        return Ok(4);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Search(a) => search(a),
        Command::Verify(a) => verify(a),
        Command::Graph(a) => graph(a),
        Command::Clique(a) => clique(a),
        Command::Table(a) => table(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
