use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use misl::config::Config;
use misl::pipeline;
use misl_core::acquire::DispatchTransport;
use misl_testkit::{CorpusSpec, FaultPlan, NoiseProfile};

#[derive(Parser)]
#[command(
    name = "misl",
    version,
    about = "Build and analyze a corpus of court judgment documents"
)]
struct Cli {
    /// Config file with flat `key = value` lines. Defaults to ./misl.conf
    /// when that file exists.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Corpus root directory.
    #[arg(long, global = true, value_name = "DIR")]
    root: Option<PathBuf>,
    /// Worker threads for fetch/convert/analyze (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Year splitting the pre/post segments of the share report.
    #[arg(long, global = true)]
    split_year: Option<i32>,
    /// Row count for the ranked report tables.
    #[arg(long, global = true)]
    top_k: Option<usize>,
    /// Exit nonzero if any indexed document misses converted text.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch and parse the index page, registering every listed document.
    Crawl,
    /// Download indexed documents. Dead links are terminal; transport
    /// errors stay indexed so a rerun retries them.
    Fetch,
    /// Convert fetched documents to text with the converter command.
    Convert,
    /// Extract facts from every document and build the aggregate statistics.
    Analyze,
    /// Render the report tables from the aggregate statistics.
    Report,
    /// Run crawl, fetch, convert, analyze, report in order.
    All,
    /// Show store counts, failure reasons, and completed stages.
    Status,
    /// Generate a synthetic corpus with known ground truth: a crawlable
    /// site with --site, otherwise a ready-made store at the corpus root.
    FixtureGen {
        /// Documents that survive to converted text.
        #[arg(long, default_value_t = 100)]
        docs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Per judge mention: misspell one letter of the name.
        #[arg(long, default_value_t = 0.0)]
        typo_rate: f64,
        /// Per title segment: write the long designator form.
        #[arg(long, default_value_t = 0.0)]
        variant_rate: f64,
        /// Per document: omit the release date everywhere.
        #[arg(long, default_value_t = 0.0)]
        missing_date_rate: f64,
        /// Extra index rows whose link resolves to nothing.
        #[arg(long, default_value_t = 0)]
        dead_links: usize,
        /// Extra sources that convert to predominantly non-Latin text.
        #[arg(long, default_value_t = 0)]
        non_latin: usize,
        /// Extra sources that convert to whitespace-only text.
        #[arg(long, default_value_t = 0)]
        corrupt: usize,
        #[arg(long, default_value_t = 2007)]
        year_min: i32,
        #[arg(long, default_value_t = 2014)]
        year_max: i32,
        /// Write a crawlable site (index.html + docs/) into this directory
        /// instead of a ready-made store.
        #[arg(long, value_name = "DIR")]
        site: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let file = cli.config.clone().or_else(|| {
        let default = PathBuf::from("misl.conf");
        default.exists().then_some(default)
    });
    let mut cfg = Config::load(file.as_deref())?;
    if let Some(root) = cli.root {
        cfg.root = root;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if let Some(year) = cli.split_year {
        cfg.split_year = year;
    }
    if let Some(k) = cli.top_k {
        cfg.top_k = k;
    }
    if cli.strict {
        cfg.failure_rate_threshold = 0.0;
    }
    if cfg.jobs > 0 {
        // Ignore the error: the global pool can only be sized once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    }

    let transport = || {
        DispatchTransport::new(
            Duration::from_millis(cfg.fetch_timeout_ms),
            Duration::from_millis(cfg.politeness_ms),
        )
    };

    match cli.command {
        Command::Crawl => println!("{}", pipeline::crawl(&cfg, &transport()?)?),
        Command::Fetch => println!("{}", pipeline::fetch_stage(&cfg, &transport()?)?),
        Command::Convert => println!("{}", pipeline::convert_stage(&cfg)?),
        Command::Analyze => println!("{}", pipeline::analyze_stage(&cfg)?),
        Command::Report => {
            let dir = pipeline::report_stage(&cfg)?;
            println!("report: wrote tables under {}", dir.display());
        }
        Command::Status => println!("{}", pipeline::status(&cfg)?),
        Command::All => {
            let stats = pipeline::run_all(&cfg, &transport()?)?;
            println!("{}", stats.crawl);
            println!("{}", stats.fetch);
            println!("{}", stats.convert);
            println!("{}", stats.analyze);
            println!("report: wrote tables under {}", stats.report_dir.display());
            println!("{}", stats.funnel);
            let rate = stats.funnel.failure_rate();
            if rate > cfg.failure_rate_threshold {
                eprintln!(
                    "failure rate {:.1}% exceeds threshold {:.1}%",
                    rate * 100.0,
                    cfg.failure_rate_threshold * 100.0
                );
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::FixtureGen {
            docs,
            seed,
            typo_rate,
            variant_rate,
            missing_date_rate,
            dead_links,
            non_latin,
            corrupt,
            year_min,
            year_max,
            site,
        } => {
            let mut spec = CorpusSpec::new(docs, seed);
            spec.noise = NoiseProfile {
                judge_typo_rate: typo_rate,
                title_variant_rate: variant_rate,
                date_missing_rate: missing_date_rate,
            };
            spec.faults = FaultPlan { dead_links, non_latin, corrupt };
            spec.year_min = year_min;
            spec.year_max = year_max;
            match site {
                Some(dir) => {
                    misl_testkit::generate_site(&spec, &dir)?;
                    println!(
                        "fixture: site with {} documents under {} (truth.jsonl alongside)",
                        docs,
                        dir.display()
                    );
                }
                None => {
                    misl_testkit::generate_corpus(&spec, &cfg.root)?;
                    // The store is already past acquisition; mark those
                    // stages so analyze/report run directly.
                    for stage in ["crawl", "fetch", "convert"] {
                        pipeline::write_marker(&cfg.root, stage)?;
                    }
                    println!(
                        "fixture: store with {} documents at {} (truth.jsonl alongside)",
                        docs,
                        cfg.root.display()
                    );
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
