use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use qfrac::cert::{parse_lines, verify_all};
use qfrac::fraction::eval;
use qfrac::scan::{
    conductor_from_args, ledger_path_for, scan, Engine, EngineConfig, Outcome, ScanBounds, Step, ESCALATION,
};
use qfrac::search::SearchBudget;
use qfrac::store::{CoverageLedger, Store, DEFAULT_STORE};
use qfrac::tables::{render_table1, render_table2, table1_fixture, table1_rows, table2_fixture, table2_rows};
use qfrac::{Conductor, Path, QfracError};

#[derive(Parser)]
#[command(name = "qfrac", version, about = "Loops, weights and certificates for c(q, m)")]
struct Cli {
    /// Certificate store (JSON lines, append-only).
    #[arg(long, global = true, env = "QFRAC_STORE", default_value = DEFAULT_STORE)]
    store: PathBuf,

    /// Coverage ledger; defaults to the store path with extension `ledger.json`.
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-verify every certificate of a file.
    Verify { file: PathBuf },
    /// Look for a loop of weight != 1 for q = a/b.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        a: BigInt,
        #[arg(long, allow_hyphen_values = true)]
        b: BigInt,
        /// Run only this method (1-4) instead of the escalation.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        method: Option<u8>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Certify every reduced a/b in a box, resumably.
    Scan {
        #[arg(long)]
        a_max: u64,
        #[arg(long)]
        b_max: u64,
        /// Only q < q_max (always q < 4).
        #[arg(long)]
        q_max: Option<BigRational>,
        /// Continue from the ledger instead of starting over.
        #[arg(long)]
        resume: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print the loop table (1) or the family table (2).
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        /// Use the bundled fixtures instead of the store.
        #[arg(long)]
        fixtures: bool,
        /// Print the certificates behind the rows as JSON lines.
        #[arg(long)]
        jsonl: bool,
    },
    /// Evaluate c(q, m) and the weight exactly.
    Eval {
        #[arg(long)]
        q: Conductor,
        #[arg(long, allow_hyphen_values = true)]
        path: Path,
    },
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Longest loop for Method 3.
    #[arg(long, default_value_t = 6)]
    max_length: usize,
    /// Restrict Method 3 to entries |m_j| <= B.
    #[arg(long)]
    entry_bound: Option<BigInt>,
    /// Beam width for Method 4.
    #[arg(long, default_value_t = 100_000)]
    beam: usize,
    /// Method 4 keeps prefixes with |c| < C.
    #[arg(long, default_value = "2")]
    value_bound: BigRational,
    /// Longest prefix for Method 4.
    #[arg(long, default_value_t = 32)]
    heuristic_length: usize,
    /// Solver nodes per length before Method 3 gives up.
    #[arg(long, default_value_t = 200_000_000)]
    node_limit: u64,
    /// Seconds per search call.
    #[arg(long)]
    time_limit: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl BudgetArgs {
    fn config(&self) -> EngineConfig {
        let mut budget = SearchBudget::default()
            .with_max_length(self.max_length)
            .with_beam(self.beam)
            .with_node_limit(self.node_limit);
        budget.entry_bound = self.entry_bound.clone();
        budget.value_bound = self.value_bound.clone();
        budget.time_limit = self.time_limit.map(Duration::from_secs);
        EngineConfig {
            budget,
            heuristic_length: self.heuristic_length,
            ..EngineConfig::default()
        }
    }

    fn init_threads(&self) -> Result<(), QfracError> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| QfracError::InvalidArgument(e.to_string()))?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, QfracError> {
    let ledger_path = cli.ledger.clone().unwrap_or_else(|| ledger_path_for(&cli.store));
    match &cli.command {
        Command::Verify { file } => verify(file),
        Command::Search { a, b, method, budget } => {
            budget.init_threads()?;
            let q = conductor_from_args(a, b)?;
            let steps: Vec<Step> = match method {
                Some(n) => vec![Step::from_method(*n).expect("checked by clap")],
                None => ESCALATION.to_vec(),
            };
            let mut store = Store::open(&cli.store)?;
            let mut engine = Engine::new(&mut store, budget.config());
            let out = engine.certify(&q, &steps)?;
            report(&out);
            let (a, b) = (small(q.a())?, small(q.b())?);
            let mut ledger = CoverageLedger::load(&ledger_path)?;
            match &out.certificate {
                Some(c) => ledger.mark_certified(a, b, c.kind, c.method),
                None => ledger.mark_open(a, b, out.exhaustive_upto),
            }
            ledger.save(&ledger_path)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            a_max,
            b_max,
            q_max,
            resume,
            budget,
        } => {
            budget.init_threads()?;
            if *a_max == 0 || *b_max == 0 {
                return Err(QfracError::InvalidArgument("bounds must be positive".into()));
            }
            let bounds = ScanBounds {
                a_max: *a_max,
                b_max: *b_max,
                q_max: q_max.clone(),
            };
            let mut store = Store::open(&cli.store)?;
            let mut engine = Engine::new(&mut store, budget.config());
            let mut ledger = if *resume {
                CoverageLedger::load(&ledger_path)?
            } else {
                CoverageLedger::default()
            };
            let summary = scan(&mut engine, &mut ledger, &ledger_path, &bounds, *resume, report)?;
            println!(
                "scan: {} certified, {} open, {} skipped (already in ledger)",
                summary.certified,
                summary.open.len(),
                summary.skipped
            );
            if summary.dropped > 0 {
                println!(
                    "dropped {} ledger entries without a verifying certificate",
                    summary.dropped
                );
            }
            for q in &summary.open {
                println!("OPEN {q}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Table { which, fixtures, jsonl } => {
            let certs = match (fixtures, which) {
                (true, 1) => table1_fixture()?,
                (true, _) => table2_fixture()?,
                (false, _) => Store::read(&cli.store)?,
            };
            if *which == 1 {
                let rows = table1_rows(&certs);
                if *jsonl {
                    for c in rows.iter().filter_map(|(_, c)| c.as_ref()) {
                        println!("{}", c.to_line());
                    }
                } else {
                    print!("{}", render_table1(&rows));
                }
            } else {
                let rows = table2_rows(&certs);
                if *jsonl {
                    for c in &rows {
                        println!("{}", c.to_line());
                    }
                } else {
                    print!("{}", render_table2(&rows));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { q, path } => {
            let e = eval(q, path);
            match (e.value(), &e.weight_sq) {
                (Some(v), Some(w)) => {
                    println!("c({q}, {path}) = {v}");
                    println!("w^2 = {w}  w = {}", w.display_root());
                    println!("loop: {}", e.is_loop());
                }
                _ => println!(
                    "{path} is not a path for q = {q}: c_{} = 0",
                    e.failed_at.expect("not a path") - 1
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn small(x: &BigInt) -> Result<u64, QfracError> {
    u64::try_from(x).map_err(|_| QfracError::InvalidArgument(format!("{x} does not fit the ledger")))
}

fn report(out: &Outcome) {
    match &out.certificate {
        Some(c) => {
            let what = match c.kind {
                qfrac::cert::CertKind::Closure => format!(
                    "closure of {}/{} by {}",
                    c.parent_a.clone().unwrap_or_default(),
                    c.parent_b.clone().unwrap_or_default(),
                    c.divisor.clone().unwrap_or_default()
                ),
                _ => format!(
                    "loop {} weight^2 {}/{} weight {}",
                    c.path().map(|p| p.to_string()).unwrap_or_default(),
                    c.weight_sq_num.clone().unwrap_or_default(),
                    c.weight_sq_den.clone().unwrap_or_default(),
                    c.weight.clone().unwrap_or_default()
                ),
            };
            println!("q = {}: method {} {what}", out.q, c.method);
            if let Some(k) = c.exhaustive_upto {
                println!("  no weight≠1 loop, lengths ≤ {k}, exhaustive");
            }
        }
        None => {
            println!("q = {}: open", out.q);
            if let Some(k) = out.exhaustive_upto {
                println!("  no weight≠1 loop, lengths ≤ {k}, exhaustive");
            }
        }
    }
}

fn verify(file: &FsPath) -> Result<ExitCode, QfracError> {
    let text = std::fs::read_to_string(file)?;
    let certs = match parse_lines(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(2));
        }
    };
    let mut failed = 0;
    for (i, (c, v)) in certs.iter().zip(verify_all(&certs)).enumerate() {
        let kind = format!("{:?}", c.kind).to_lowercase();
        match v {
            Ok(()) => println!("#{} {kind} {}/{}: OK", i + 1, c.a, c.b),
            Err(e) => {
                failed += 1;
                println!("#{} {kind} {}/{}: FAIL {e}", i + 1, c.a, c.b);
                println!("  {}", c.identity());
            }
        }
    }
    println!("{} certificate(s), {failed} failed", certs.len());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
