use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::info;

use ltqp::bench::{aggregate, emit_table, load_manifest, metrics_csv, run_entries, SuiteError, TableFormat};
use ltqp::engine::{parse_setups, Engine, EngineOptions, QueryMetrics, Setup};
use ltqp::fetch::{FetchConfig, FetchError, ResolverMode, RESOLVER_ENV};
use ltqp::fixturegen::{generate_web, WebSpec};
use ltqp::query::parse_query;

const EXIT_FAILURE: u8 = 1;
const EXIT_SYNTAX: u8 = 2;
const EXIT_RESOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "ltqp", version, about = "Link-traversal query execution over Linked Data")]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one query, printing solutions as they arrive.
    Query {
        file: PathBuf,
        #[arg(long, default_value = "base")]
        setup: String,
        /// Print the metrics as JSON instead of the footer line.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        fetch: FetchArgs,
    },
    /// Run a query suite under several setups and print the results table.
    Bench {
        /// Lines of `query-id <TAB> path`.
        manifest: PathBuf,
        #[arg(long, default_value = "all")]
        setups: String,
        /// csv, markdown or latex.
        #[arg(long, default_value = "markdown")]
        format: TableFormat,
        /// Table destination; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-query metrics CSV. Defaults to `<out>.raw.csv`, or
        /// `bench-raw.csv` when the table goes to standard output.
        #[arg(long)]
        raw: Option<PathBuf>,
        #[command(flatten)]
        fetch: FetchArgs,
    },
    /// Generate a seeded synthetic web with a query suite and ground truth.
    GenFixture {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        entities: usize,
        #[arg(long, default_value_t = 1)]
        docs_per_entity: usize,
        #[arg(long, default_value_t = 3)]
        sameas: usize,
        #[arg(long, default_value_t = 3)]
        seealso: usize,
        #[arg(long, default_value_t = 2)]
        vocab_depth: usize,
        #[arg(long, default_value_t = 3)]
        facts_per_doc: usize,
        #[arg(long, default_value_t = 2)]
        queries_per_class: usize,
        #[arg(long, default_value = "http://fixture.example/")]
        base: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a suite against the live web, archiving every exchange for replay.
    Record {
        manifest: PathBuf,
        #[arg(long)]
        archive: PathBuf,
        #[arg(long, default_value = "all")]
        setups: String,
        #[command(flatten)]
        fetch: FetchArgs,
    },
}

#[derive(Args)]
struct FetchArgs {
    /// live, fixture:DIR, replay:FILE or record:FILE.
    #[arg(long, env = RESOLVER_ENV, default_value = "live")]
    resolver: String,
    /// Per-lookup timeout in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
    /// Whole-query deadline in seconds.
    #[arg(long, default_value_t = 600)]
    deadline_s: u64,
    #[arg(long, default_value_t = 5)]
    redirect_limit: u32,
    #[arg(long, default_value_t = 2000)]
    max_lookups: u32,
    #[arg(long, default_value_t = 8)]
    parallel: u32,
    /// Minimum gap between requests to one host, in milliseconds.
    #[arg(long, default_value_t = 500)]
    politeness_ms: u64,
    /// Under the base rule, also dereference predicates of matching triples.
    #[arg(long)]
    deref_predicates: bool,
}

/// A failed command: its exit code and what to tell the user.
struct Failure(u8, String);

impl From<FetchError> for Failure {
    fn from(e: FetchError) -> Self {
        Failure(EXIT_RESOLVER, e.to_string())
    }
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        Failure(EXIT_SYNTAX, e.to_string())
    }
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure(EXIT_FAILURE, format!("{}: {e}", path.display()))
}

impl FetchArgs {
    fn engine(&self, override_resolver: Option<ResolverMode>) -> Result<Engine, Failure> {
        let resolver = match override_resolver {
            Some(r) => r,
            None => self.resolver.parse().map_err(|e: ltqp::fetch::ConfigError| Failure(EXIT_RESOLVER, e.to_string()))?,
        };
        let config = FetchConfig {
            lookup_timeout: Duration::from_millis(self.timeout_ms),
            query_deadline: Duration::from_secs(self.deadline_s),
            redirect_limit: self.redirect_limit,
            max_lookups: self.max_lookups,
            max_parallel: self.parallel,
            politeness: Duration::from_millis(self.politeness_ms),
            resolver,
        };
        let options = EngineOptions {
            deref_predicates: self.deref_predicates,
        };
        Ok(Engine::new(config)?.with_options(options))
    }
}

fn setups(list: &str) -> Result<Vec<Setup>, Failure> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Setup::ALL.to_vec());
    }
    let parsed = parse_setups(list).map_err(|e| Failure(EXIT_RESOLVER, e.to_string()))?;
    if parsed.is_empty() {
        return Err(Failure(EXIT_RESOLVER, "no setups selected".into()));
    }
    Ok(parsed)
}

fn footer(m: &QueryMetrics) -> String {
    let first = m.first_s.map_or_else(|| "-".to_owned(), |f| format!("{f:.3}"));
    let mut line = format!(
        "results={} time_s={:.3} first_s={first} http={} retrieved={} inferred={}",
        m.results, m.time_s, m.http, m.retrieved, m.inferred
    );
    if m.truncated {
        line.push_str(" truncated=true");
    }
    line
}

fn cmd_query(file: &Path, setup: &str, json: bool, fetch: &FetchArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(file).map_err(io_failure(file))?;
    let id = file.file_stem().map_or_else(|| "query".into(), |s| s.to_string_lossy().into_owned());
    let query = parse_query(&text, &id).map_err(|e| Failure(EXIT_SYNTAX, format!("{}: {e}", file.display())))?;
    let setup: Setup = setup.parse().map_err(|e: ltqp::engine::UnknownSetup| Failure(EXIT_RESOLVER, e.to_string()))?;
    let engine = fetch.engine(None)?;
    let run = engine.execute(&query, setup);
    let stdout = std::io::stdout();
    for solution in run.solutions().iter() {
        let line: Vec<String> = solution.values.iter().map(|(v, t)| format!("{v}={t}")).collect();
        let mut out = stdout.lock();
        // a closed pipe only stops the printing, not the query
        let _ = writeln!(out, "{}", line.join("\t")).and_then(|()| out.flush());
    }
    let outcome = run
        .join()
        .map_err(|_| Failure(EXIT_FAILURE, "query execution failed".into()))?;
    if json {
        println!("{}", serde_json::to_string(&outcome.metrics).expect("metrics serialize"));
    } else {
        println!("{}", footer(&outcome.metrics));
    }
    Ok(())
}

fn write_bench(rows: &[QueryMetrics], format: TableFormat, out: Option<&Path>, raw: Option<&Path>) -> Result<(), Failure> {
    let table = emit_table(&aggregate(rows), format);
    let raw_path = match (raw, out) {
        (Some(r), _) => r.to_path_buf(),
        (None, Some(o)) => o.with_extension("raw.csv"),
        (None, None) => PathBuf::from("bench-raw.csv"),
    };
    match out {
        Some(path) => std::fs::write(path, &table).map_err(io_failure(path))?,
        None => print!("{table}"),
    }
    std::fs::write(&raw_path, metrics_csv(rows)).map_err(io_failure(&raw_path))?;
    info!("per-query metrics written to {}", raw_path.display());
    Ok(())
}

fn run() -> Result<(), Failure> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    match cli.command {
        Command::Query { file, setup, json, fetch } => cmd_query(&file, &setup, json, &fetch),
        Command::Bench {
            manifest,
            setups: list,
            format,
            out,
            raw,
            fetch,
        } => {
            let setups = setups(&list)?;
            let entries = load_manifest(&manifest)?;
            let engine = fetch.engine(None)?;
            let rows = run_entries(&entries, &setups, &engine);
            write_bench(&rows, format, out.as_deref(), raw.as_deref())
        }
        Command::GenFixture {
            seed,
            entities,
            docs_per_entity,
            sameas,
            seealso,
            vocab_depth,
            facts_per_doc,
            queries_per_class,
            base,
            out,
        } => {
            let spec = WebSpec {
                seed,
                entities,
                docs_per_entity,
                sameas,
                seealso,
                vocab_depth,
                facts_per_doc,
                queries_per_class,
                base,
            };
            let web = generate_web(&spec, &out).map_err(|e| Failure(EXIT_FAILURE, e.to_string()))?;
            println!(
                "{} documents, {} queries written to {}",
                web.documents,
                web.queries.len(),
                out.display()
            );
            Ok(())
        }
        Command::Record {
            manifest,
            archive,
            setups: list,
            fetch,
        } => {
            let setups = setups(&list)?;
            let entries = load_manifest(&manifest)?;
            let engine = fetch.engine(Some(ResolverMode::Record(archive.clone())))?;
            let rows = run_entries(&entries, &setups, &engine);
            println!("{} runs recorded to {}", rows.len(), archive.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
