//! Command-line entry point. Exit codes: 0 success, 1 runtime failure,
//! 2 usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supplynet_core::analytics::{coverage_report, transparency_report, GroundTruth, GroupBy};
use supplynet_core::graph::Assertion;
use supplynet_core::matching::Threshold;
use supplynet_core::predict::{predict_suppliers, DEFAULT_K};
use supplynet_core::recognize::Gazetteer;
use supplynet_core::{CompanyId, SupplyGraph};

use crate::clock::SystemClock;
use crate::enrich::{enrich_all, FixtureMetadata, KnowledgeBaseClient, KnowledgeBaseConfig, MetadataClient};
use crate::extract::{PdfExtractor, PdftotextPdf, SidecarPdf};
use crate::fetch::{FixtureFetcher, Fetcher, HttpFetcher};
use crate::files::{load_snapshot, save_snapshot, SnapshotLock};
use crate::manifest::FixtureManifest;
use crate::pipeline::{run_pipeline, PipelineClients, PipelineOptions};
use crate::recognizer::{EntityRecognizer, GazetteerRecognizer, LlmRecognizer};
use crate::report::{coverage_table, pipeline_table, predictions_table, transparency_table, Format, Tabular};
use crate::search::{FixtureSearch, RemoteSearch, SearchClient};
use crate::seed::{load_seed_file, load_seed_registry};
use crate::service::config::ServiceConfig;
use crate::service::{serve, AppState};
use crate::store::IntermediateStore;

#[derive(Parser, Debug)]
#[command(name = "supplynet", version, about = "Supply-chain transparency platform")]
pub struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SnapshotArg {
    /// Graph snapshot file.
    #[arg(long, env = "SUPPLYNET_SNAPSHOT", default_value = "graph.dat")]
    pub snapshot: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Seed registry management.
    Seed {
        #[command(subcommand)]
        command: SeedCommand,
    },
    /// Collection pipeline.
    Pipeline {
        #[command(subcommand)]
        command: PipelineCommand,
    },
    /// Transparency and coverage reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
    /// Likely suppliers of a company from its industry and region peers.
    Predict(PredictArgs),
    /// Fill missing company metadata.
    Enrich(EnrichArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Subcommand, Debug)]
pub enum SeedCommand {
    /// Load a seed CSV into the snapshot, merging with existing companies.
    Load {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        snapshot: SnapshotArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RecognizerChoice {
    /// The language model when credentials are set, else the gazetteer.
    Auto,
    Gazetteer,
    Llm,
}

#[derive(Subcommand, Debug)]
pub enum PipelineCommand {
    /// Run every stage for every company, resuming from the store.
    Run {
        #[command(flatten)]
        snapshot: SnapshotArg,
        /// Fixture manifest serving search and fetch offline.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Intermediate store directory.
        #[arg(long, default_value = "store")]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t = RecognizerChoice::Auto)]
        recognizer: RecognizerChoice,
        /// Recompute stages that are already done.
        #[arg(long)]
        force: bool,
        /// Print per-company counters as well as the summary.
        #[arg(long)]
        details: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReportCommand {
    /// Share of companies with extracted suppliers, per group.
    Transparency {
        #[command(flatten)]
        snapshot: SnapshotArg,
        #[arg(long, default_value = "continent", value_parser = parse_group)]
        by: GroupBy,
    },
    /// Automatic extraction against a manually checked ground truth.
    Coverage {
        #[command(flatten)]
        snapshot: SnapshotArg,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = Threshold::DEFAULT.value())]
        threshold: f64,
    },
}

fn parse_group(s: &str) -> Result<GroupBy, String> {
    s.parse()
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub snapshot: SnapshotArg,
    #[arg(long)]
    pub company: String,
    #[arg(short, default_value_t = DEFAULT_K)]
    pub k: usize,
    /// Predict only for companies without extracted or manual suppliers.
    #[arg(long)]
    pub only_if_empty: bool,
    /// Store the predictions as predicted relations.
    #[arg(long)]
    pub upsert: bool,
}

#[derive(Args, Debug)]
pub struct EnrichArgs {
    #[command(flatten)]
    pub snapshot: SnapshotArg,
    /// Metadata CSV; without it the public knowledge base is queried.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub listen: Option<String>,
    #[arg(long, env = "SUPPLYNET_SNAPSHOT")]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .try_init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> CliResult {
    let format = if cli.json { Format::Json } else { cli.format };
    match cli.command {
        Command::Seed {
            command: SeedCommand::Load { file, snapshot },
        } => seed_load(&file, &snapshot.snapshot),
        Command::Pipeline {
            command:
                PipelineCommand::Run {
                    snapshot,
                    fixtures,
                    store,
                    recognizer,
                    force,
                    details,
                },
        } => pipeline_run(&snapshot.snapshot, fixtures.as_deref(), &store, recognizer, force, details, format),
        Command::Report {
            command: ReportCommand::Transparency { snapshot, by },
        } => {
            let graph = open_graph(&snapshot.snapshot)?;
            emit(&transparency_table(&transparency_report(&graph, by)), format);
            Ok(())
        }
        Command::Report {
            command: ReportCommand::Coverage {
                snapshot,
                truth,
                threshold,
            },
        } => {
            let threshold = Threshold::new(threshold).map_err(|e| CliError::usage(e.to_string()))?;
            let text = std::fs::read_to_string(&truth)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", truth.display())))?;
            let truth: GroundTruth = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("invalid ground truth {}: {e}", truth.display())))?;
            let graph = open_graph(&snapshot.snapshot)?;
            let rows = coverage_report(&graph, &truth, threshold).map_err(|e| CliError::usage(e.to_string()))?;
            emit(&coverage_table(&rows), format);
            Ok(())
        }
        Command::Predict(args) => predict(args, format),
        Command::Enrich(args) => enrich(args),
        Command::Serve(args) => run_serve(args),
    }
}

fn emit(table: &Tabular, format: Format) {
    print!("{}", table.render(format));
}

fn open_graph(path: &Path) -> CliResult<SupplyGraph> {
    if !path.exists() {
        return Err(CliError::usage(format!("snapshot {} does not exist", path.display())));
    }
    load_snapshot(path).map_err(|e| CliError::usage(e.to_string()))
}

fn lock(snapshot: &Path) -> CliResult<SnapshotLock> {
    SnapshotLock::acquire(snapshot).map_err(|e| CliError::runtime(e.to_string()))
}

fn save(graph: &SupplyGraph, path: &Path) -> CliResult {
    save_snapshot(graph, path).map_err(|e| CliError::runtime(e.to_string()))
}

fn seed_load(file: &Path, snapshot: &Path) -> CliResult {
    let _lock = lock(snapshot)?;
    let (graph, stats) = if snapshot.exists() {
        let mut graph = open_graph(snapshot)?;
        let stats = load_seed_file(&mut graph, file).map_err(|e| CliError::usage(e.to_string()))?;
        (graph, stats)
    } else {
        load_seed_registry(file).map_err(|e| CliError::usage(e.to_string()))?
    };
    save(&graph, snapshot)?;
    println!(
        "{} companies loaded from {} rows; {} merged into existing companies",
        stats.companies, stats.rows, stats.merged
    );
    Ok(())
}

fn pipeline_run(
    snapshot: &Path,
    fixtures: Option<&Path>,
    store: &Path,
    recognizer: RecognizerChoice,
    force: bool,
    details: bool,
    format: Format,
) -> CliResult {
    let _lock = lock(snapshot)?;
    let mut graph = open_graph(snapshot)?;
    let manifest = fixtures
        .map(|path| FixtureManifest::load(path).map_err(|e| CliError::usage(e.to_string())))
        .transpose()?;
    let store = IntermediateStore::open(store).map_err(|e| CliError::runtime(e.to_string()))?;

    let (search, fetcher, pdf): (Box<dyn SearchClient>, Box<dyn Fetcher>, Box<dyn PdfExtractor>) = match &manifest {
        Some(m) => (
            Box::new(FixtureSearch::new(m.clone())),
            Box::new(FixtureFetcher::new(m.clone())),
            Box::new(SidecarPdf::new(m.clone())),
        ),
        None => {
            let remote = RemoteSearch::from_env();
            if !remote.has_credentials() {
                return Err(CliError::usage(
                    "no --fixtures given and SEARCH_API_KEY is not set; pass a fixture manifest to run offline",
                ));
            }
            (
                Box::new(remote),
                Box::new(HttpFetcher::new(SystemClock)),
                Box::new(PdftotextPdf::default()),
            )
        }
    };
    let llm = LlmRecognizer::from_env();
    let recognizer: Box<dyn EntityRecognizer> = match recognizer {
        RecognizerChoice::Gazetteer => Box::new(GazetteerRecognizer(Gazetteer::new(graph.companies()))),
        RecognizerChoice::Llm if !llm.has_credentials() => {
            return Err(CliError::usage("--recognizer llm needs LLM_API_KEY"));
        }
        RecognizerChoice::Llm => Box::new(llm),
        RecognizerChoice::Auto if llm.has_credentials() => Box::new(llm),
        RecognizerChoice::Auto => {
            eprintln!("notice: LLM_API_KEY is not set; using the gazetteer recognizer");
            Box::new(GazetteerRecognizer(Gazetteer::new(graph.companies())))
        }
    };
    let clients = PipelineClients {
        search: search.as_ref(),
        fetcher: fetcher.as_ref(),
        pdf: pdf.as_ref(),
        recognizer: recognizer.as_ref(),
    };
    let options = PipelineOptions {
        force,
        snapshot_path: Some(snapshot.to_path_buf()),
        ..PipelineOptions::default()
    };
    let report = run_pipeline(&mut graph, &store, &clients, &options).map_err(|e| CliError::runtime(e.to_string()))?;
    if details {
        emit(&pipeline_table(&report), format);
    }
    println!("{}", report.summary());
    if report.all_skipped() {
        println!("all stages skipped");
    }
    Ok(())
}

fn predict(args: PredictArgs, format: Format) -> CliResult {
    let _lock = args.upsert.then(|| lock(&args.snapshot.snapshot)).transpose()?;
    let mut graph = open_graph(&args.snapshot.snapshot)?;
    let id = CompanyId::new(args.company.as_str()).map_err(|e| CliError::usage(e.to_string()))?;
    let links = predict_suppliers(&graph, &id, args.k, args.only_if_empty).map_err(|e| CliError::usage(e.to_string()))?;
    if args.upsert {
        for link in &links {
            graph
                .upsert_relation(
                    &link.customer,
                    &link.supplier,
                    Assertion::Predicted {
                        confidence: link.confidence,
                    },
                )
                .map_err(|e| CliError::runtime(e.to_string()))?;
        }
        save(&graph, &args.snapshot.snapshot)?;
    }
    emit(&predictions_table(&links), format);
    Ok(())
}

fn enrich(args: EnrichArgs) -> CliResult {
    let _lock = lock(&args.snapshot.snapshot)?;
    let mut graph = open_graph(&args.snapshot.snapshot)?;
    let client: Box<dyn MetadataClient> = match &args.metadata {
        Some(path) => Box::new(FixtureMetadata::load(path).map_err(|e| CliError::usage(e.to_string()))?),
        None => Box::new(KnowledgeBaseClient::new(KnowledgeBaseConfig::default())),
    };
    let report = enrich_all(&mut graph, client.as_ref()).map_err(|e| CliError::runtime(e.to_string()))?;
    save(&graph, &args.snapshot.snapshot)?;
    println!(
        "{} companies enriched; {} not found; {} ambiguous; {} failed",
        report.patched.len(),
        report.not_found.len(),
        report.ambiguous.len(),
        report.failed.len()
    );
    Ok(())
}

fn run_serve(args: ServeArgs) -> CliResult {
    let mut config = match &args.config {
        Some(path) => ServiceConfig::load(path).map_err(|e| CliError::usage(e.to_string()))?,
        None => ServiceConfig::default(),
    };
    config
        .apply_env(|k| std::env::var(k).ok())
        .map_err(|e| CliError::usage(e.to_string()))?;
    if let Some(port) = args.port {
        config.port = port;
    }
    if let Some(listen) = args.listen {
        config.listen = listen;
    }
    if let Some(snapshot) = args.snapshot {
        config.snapshot = Some(snapshot);
    }
    let snapshot = config
        .snapshot
        .clone()
        .ok_or_else(|| CliError::usage("serve needs --snapshot or a snapshot in the config"))?;
    let _lock = lock(&snapshot)?;
    let graph = open_graph(&snapshot)?;
    if config.smtp.is_none() {
        eprintln!("notice: no SMTP relay configured; notifications stay in the outbox");
    }
    let state = AppState::from_config(&config, graph).map_err(CliError::usage)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::runtime(e.to_string()))?;
    runtime
        .block_on(serve(Arc::new(state), &config.listen, config.port))
        .map_err(|e| CliError::runtime(format!("server: {e}")))
}
