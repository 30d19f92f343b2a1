//! End-to-end pipeline behavior over file-backed and scripted corpora:
//! stage ordering, rerun idempotence, retry semantics, fault accounting,
//! and date overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use misl::config::Config;
use misl::pipeline::{self, PipelineError};
use misl_core::acquire::{FileTransport, ScriptedTransport};
use misl_core::store::{CorpusStore, DocStatus};
use misl_testkit::{generate_site, CorpusSpec, FaultPlan};
use tempfile::TempDir;

fn site_config(root: PathBuf, site: &Path) -> Config {
    let mut cfg = Config::default();
    cfg.root = root;
    cfg.index_url = format!("file://{}/index.html", site.display());
    cfg.converter_cmd = "cp {in} {out}".to_string();
    cfg.politeness_ms = 0;
    cfg.fetch_backoff_ms = 0;
    cfg.fetch_retries = 1;
    cfg
}

#[test]
fn stages_refuse_to_run_out_of_order() {
    let dir = TempDir::new().unwrap();
    let mut cfg = Config::default();
    cfg.root = dir.path().join("corpus");

    let transport = FileTransport;
    match pipeline::fetch_stage(&cfg, &transport) {
        Err(PipelineError::StageOrder { attempted: "fetch", needed: "crawl", .. }) => {}
        other => panic!("expected stage-order error, got {other:?}"),
    }
    match pipeline::analyze_stage(&cfg) {
        Err(PipelineError::StageOrder { needed: "crawl", .. }) => {}
        other => panic!("expected stage-order error, got {other:?}"),
    }
    match pipeline::report_stage(&cfg) {
        Err(PipelineError::StageOrder { attempted: "report", needed: "analyze", .. }) => {}
        other => panic!("expected stage-order error, got {other:?}"),
    }

    // After crawl alone, convert still refuses: nothing has been fetched.
    let site = dir.path().join("site");
    generate_site(&CorpusSpec::new(4, 3), &site).unwrap();
    let cfg = site_config(dir.path().join("corpus"), &site);
    pipeline::crawl(&cfg, &transport).unwrap();
    match pipeline::convert_stage(&cfg) {
        Err(PipelineError::StageOrder { attempted: "convert", needed: "fetch", .. }) => {}
        other => panic!("expected stage-order error, got {other:?}"),
    }
}

fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = vec![
        "manifest.jsonl".to_string(),
        "index.csv".to_string(),
        "facts.jsonl".to_string(),
        "partial.json".to_string(),
    ];
    for entry in fs::read_dir(root.join("reports")).unwrap() {
        files.push(format!("reports/{}", entry.unwrap().file_name().to_string_lossy()));
    }
    files
        .into_iter()
        .map(|rel| {
            let bytes = fs::read(root.join(&rel)).unwrap();
            (rel, bytes)
        })
        .collect()
}

#[test]
fn rerunning_every_stage_rewrites_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let site = dir.path().join("site");
    let mut spec = CorpusSpec::new(25, 11);
    spec.faults = FaultPlan { dead_links: 2, non_latin: 1, corrupt: 1 };
    generate_site(&spec, &site).unwrap();

    let cfg = site_config(dir.path().join("corpus"), &site);
    let transport = FileTransport;
    pipeline::run_all(&cfg, &transport).unwrap();
    let before = snapshot(&cfg.root);

    let crawl = pipeline::crawl(&cfg, &transport).unwrap();
    assert_eq!(crawl.new_docs, 0, "rerun crawl registers nothing new");
    let fetch = pipeline::fetch_stage(&cfg, &transport).unwrap();
    assert_eq!(fetch.attempted, 0, "rerun fetch finds no indexed documents");
    let convert = pipeline::convert_stage(&cfg).unwrap();
    assert_eq!(convert.attempted, 0, "rerun convert finds no fetched documents");
    pipeline::analyze_stage(&cfg).unwrap();
    pipeline::report_stage(&cfg).unwrap();

    let after = snapshot(&cfg.root);
    assert_eq!(before.len(), after.len());
    for (rel, bytes) in &before {
        assert_eq!(Some(bytes), after.get(rel), "{rel} changed across rerun");
    }
}

#[test]
fn transport_errors_stay_indexed_and_retry_on_the_next_run() {
    let index_url = "x://host/index.html";
    let html = r#"<table>
      <tr><td><a href="x://host/a.pdf">C.A. 1 of 2010</a></td><td>01-01-2010</td><td>first</td></tr>
      <tr><td><a href="x://host/b.pdf">C.A. 2 of 2011</a></td><td>02-01-2011</td><td>second</td></tr>
    </table>"#;

    let transport = ScriptedTransport::new();
    transport.script_ok(index_url, html.as_bytes());
    transport.script_ok("x://host/a.pdf", b"JUDGMENT\nbody");
    // One failure per attempt: retries=1 means two attempts consume two
    // entries, then the rerun pops the success.
    transport.script_failure("x://host/b.pdf", "connection reset");
    transport.script_failure("x://host/b.pdf", "connection reset");
    transport.script_ok("x://host/b.pdf", b"JUDGMENT\nbody");

    let dir = TempDir::new().unwrap();
    let mut cfg = Config::default();
    cfg.root = dir.path().join("corpus");
    cfg.index_url = index_url.to_string();
    cfg.politeness_ms = 0;
    cfg.fetch_backoff_ms = 0;
    cfg.fetch_retries = 1;

    pipeline::crawl(&cfg, &transport).unwrap();
    let first = pipeline::fetch_stage(&cfg, &transport).unwrap();
    assert_eq!((first.fetched, first.transport_errors), (1, 1));

    let store = CorpusStore::open(&cfg.root).unwrap();
    let pending = store.scan(|d| matches!(d.status, DocStatus::Indexed));
    assert_eq!(pending.len(), 1, "failed document stays indexed");
    assert_eq!(pending[0].meta.link, "x://host/b.pdf");
    drop(store);

    let second = pipeline::fetch_stage(&cfg, &transport).unwrap();
    assert_eq!((second.fetched, second.transport_errors), (1, 0));
    let store = CorpusStore::open(&cfg.root).unwrap();
    assert_eq!(store.status_counts().fetched, 2);
}

#[test]
fn funnel_accounting_matches_the_fault_plan() {
    let dir = TempDir::new().unwrap();
    let site = dir.path().join("site");
    let mut spec = CorpusSpec::new(30, 9);
    spec.faults = FaultPlan { dead_links: 3, non_latin: 2, corrupt: 1 };
    generate_site(&spec, &site).unwrap();

    let cfg = site_config(dir.path().join("corpus"), &site);
    let stats = pipeline::run_all(&cfg, &FileTransport).unwrap();
    assert_eq!(stats.crawl.rows, 36);
    assert_eq!(stats.fetch.fetched, 33);
    assert_eq!(stats.fetch.dead_links, 3);
    assert_eq!(stats.convert.converted, 30);
    assert_eq!(stats.convert.non_latin, 2);
    assert_eq!(stats.convert.corrupt, 1);
    assert_eq!(stats.analyze.docs, 36);
    assert_eq!(stats.analyze.metadata_only, 6);
    let rate = stats.funnel.failure_rate();
    assert!((rate - 6.0 / 36.0).abs() < 1e-12, "failure rate {rate}");

    let status = pipeline::status(&cfg).unwrap();
    assert_eq!(status.failure_reasons.get("non_latin_script"), Some(&2));
    assert_eq!(status.failure_reasons.get("corrupt_source"), Some(&1));
    assert_eq!(status.stages_done, ["crawl", "fetch", "convert", "analyze", "report"]);
}

#[test]
fn date_overrides_replace_crawled_dates() {
    let dir = TempDir::new().unwrap();
    let site = dir.path().join("site");
    generate_site(&CorpusSpec::new(6, 21), &site).unwrap();

    let overrides = dir.path().join("overrides.csv");
    fs::write(&overrides, "docid,date\ncase-0002,1999-12-31\n").unwrap();

    let mut cfg = site_config(dir.path().join("corpus"), &site);
    cfg.overrides_path = Some(overrides);
    let stats = pipeline::crawl(&cfg, &FileTransport).unwrap();
    assert_eq!(stats.overridden_dates, 1);

    let store = CorpusStore::open(&cfg.root).unwrap();
    let doc = store
        .scan(|d| d.id.as_str() == "case-0002")
        .pop()
        .expect("case-0002 registered");
    assert_eq!(
        doc.meta.release_date,
        Some(chrono::NaiveDate::from_ymd_opt(1999, 12, 31).unwrap())
    );
}

#[test]
fn config_file_and_environment_reach_the_pipeline() {
    let dir = TempDir::new().unwrap();
    let site = dir.path().join("site");
    generate_site(&CorpusSpec::new(5, 17), &site).unwrap();

    let conf = dir.path().join("misl.conf");
    fs::write(
        &conf,
        format!(
            "root = {}\nindex_url = file://{}/index.html\nconverter_cmd = cp {{in}} {{out}}\npoliteness_ms = 0\nfetch.backoff_ms = 0\ntop_k = 4\n",
            dir.path().join("corpus").display(),
            site.display()
        ),
    )
    .unwrap();

    // Process environment beats the file. No other test reads this variable.
    std::env::set_var("MISL_TOP_K", "2");
    let cfg = Config::load(Some(&conf)).unwrap();
    std::env::remove_var("MISL_TOP_K");
    assert_eq!(cfg.top_k, 2);
    assert_eq!(cfg.root, dir.path().join("corpus"));

    pipeline::run_all(&cfg, &FileTransport).unwrap();
    let judges = fs::read_to_string(cfg.root.join("reports").join("top_judges.csv")).unwrap();
    // Header plus at most top_k ranked rows.
    assert!(judges.lines().count() <= 3, "top_k=2 not honored:\n{judges}");
}
