use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use hyperkube::index::MatchRule;
use hyperkube::keyword::{Dimension, KeywordSet, NodeId};
use hyperkube::ledger::load_fixture;
use hyperkube::network::Network;
use hyperkube::routing::{execute, Query};
use hyperkube::sim::{
    build_network, populate, run_cell, run_trial, write_results_csv, write_summary_csv, CellOutcome, ExperimentConfig,
    ObjectKeywords, SearchKind, SimError, SizeRange, Vocabulary,
};
use hyperkube::verify;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Failure, QueryArgs, RunArgs, SweepArgs, VerifyArgs, WorkloadArgs};

const RESULTS_FILE: &str = "results.csv";
const SUMMARY_FILE: &str = "summary.csv";
const METADATA_FILE: &str = "metadata.json";
const TRACES_FILE: &str = "traces.jsonl";

fn dimension(r: u32) -> Result<Dimension, Failure> {
    Dimension::new(r).map_err(|e| Failure::Usage(format!("--r: {e}")))
}

fn config_for(
    r: Dimension,
    objects: usize,
    search: SearchKind,
    w: &WorkloadArgs,
    seed: u64,
) -> Result<ExperimentConfig, Failure> {
    let mut c = ExperimentConfig::new(r, objects, search);
    c.query_count = w.queries;
    c.repetitions = w.reps;
    c.limit = w.limit;
    c.seed = seed;
    if let Some(size) = w.vocab {
        c.vocabulary = Vocabulary::Synthetic(size);
    }
    if w.kw_min.is_some() || w.kw_max.is_some() {
        let d = ExperimentConfig::DEFAULT_KEYWORD_RANGE;
        c.keywords_per_object =
            ObjectKeywords::Sized(SizeRange::new(w.kw_min.unwrap_or(d.min), w.kw_max.unwrap_or(d.max)));
    }
    c.query_keywords = SizeRange::new(w.qkw_min, w.qkw_max);
    c.match_bias = w.match_bias;
    c.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if c.repetitions < 2 {
        return Err(Failure::Usage("--reps must be at least 2".into()));
    }
    if r.get() > hyperkube::network::DEFAULT_MAX_DIMENSION {
        return Err(Failure::Usage(format!(
            "--r {r} exceeds the supported maximum {}",
            hyperkube::network::DEFAULT_MAX_DIMENSION
        )));
    }
    Ok(c)
}

fn sim_failure(e: SimError) -> Failure {
    match e {
        SimError::Config(msg) => Failure::Usage(msg),
        other => Failure::Io(other.into()),
    }
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    configs: &'a [ExperimentConfig],
}

fn write_metadata(dir: &Path, configs: &[ExperimentConfig]) -> anyhow::Result<()> {
    let mut out = create(dir, METADATA_FILE)?;
    let meta = Metadata {
        tool: "hyperkube",
        version: env!("CARGO_PKG_VERSION"),
        configs,
    };
    serde_json::to_writer_pretty(&mut out, &meta)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceLine<'a> {
    nodes: u64,
    objects: usize,
    search: SearchKind,
    repetition: usize,
    query: usize,
    results: usize,
    trace: &'a hyperkube::HopTrace,
}

fn write_traces<W: Write>(out: &mut W, config: &ExperimentConfig) -> anyhow::Result<()> {
    let mut net = build_network(config.r)?;
    let log = populate(&mut net, config)?;
    for repetition in 0..config.repetitions {
        for (query, result) in run_trial(&net, &log, config, repetition).iter().enumerate() {
            let line = TraceLine {
                nodes: config.r.node_count(),
                objects: config.object_count,
                search: config.search_kind,
                repetition,
                query,
                results: result.objects.len(),
                trace: &result.trace,
            };
            serde_json::to_writer(&mut *out, &line)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn report_cell(cell: &CellOutcome) {
    let row = cell.summary_row();
    eprintln!(
        "{:>6} nodes {:>6} objects {:<8} mean {:>7.2} sd {:>7.2} ci ({:.2},{:.2})",
        row.nodes, row.objects, row.search, row.mean, row.stddev, row.ci_low, row.ci_high
    );
}

pub fn run(args: RunArgs) -> Result<(), Failure> {
    let r = dimension(args.r)?;
    let seed = args.workload.seed.resolve();
    let config = config_for(r, args.objects, args.search, &args.workload, seed)?;
    let out_dir = &args.workload.out;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let cell = run_cell(&config).map_err(sim_failure)?;
    report_cell(&cell);

    let mut results = create(out_dir, RESULTS_FILE)?;
    write_results_csv(&mut results, cell.rows()).map_err(sim_failure)?;
    let mut summary = create(out_dir, SUMMARY_FILE)?;
    write_summary_csv(&mut summary, [&cell.summary_row()]).map_err(sim_failure)?;
    write_metadata(out_dir, std::slice::from_ref(&config))?;
    if args.workload.emit_traces {
        let mut traces = create(out_dir, TRACES_FILE)?;
        write_traces(&mut traces, &config)?;
        traces.flush().context("writing traces")?;
    }
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let dims = args
        .r_list
        .iter()
        .map(|&r| dimension(r))
        .collect::<Result<Vec<_>, _>>()?;
    if dims.is_empty() || args.objects_list.is_empty() {
        return Err(Failure::Usage("--r-list and --objects-list must be non-empty".into()));
    }
    let kinds = match args.search {
        Some(kind) => vec![kind],
        None => vec![SearchKind::Pin, SearchKind::Superset],
    };
    let seed = args.workload.seed.resolve();
    let mut configs = Vec::new();
    for &kind in &kinds {
        for &r in &dims {
            for &objects in &args.objects_list {
                configs.push(config_for(r, objects, kind, &args.workload, seed)?);
            }
        }
    }

    let out_dir = &args.workload.out;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_metadata(out_dir, &configs)?;

    // one CSV writer per file; rows are flushed after every cell
    let mut results = csv_writer(out_dir, RESULTS_FILE)?;
    let mut summary = csv_writer(out_dir, SUMMARY_FILE)?;
    let mut traces = match args.workload.emit_traces {
        true => Some(create(out_dir, TRACES_FILE)?),
        false => None,
    };
    for config in &configs {
        let cell = run_cell(config).map_err(sim_failure)?;
        report_cell(&cell);
        for row in cell.rows() {
            results.serialize(row).context("writing results")?;
        }
        summary.serialize(cell.summary_row()).context("writing summary")?;
        results.flush().context("writing results")?;
        summary.flush().context("writing summary")?;
        if let Some(out) = traces.as_mut() {
            write_traces(out, config)?;
            out.flush().context("writing traces")?;
        }
    }
    Ok(())
}

fn csv_writer(dir: &Path, name: &str) -> anyhow::Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(dir, name)?))
}

#[derive(Serialize)]
struct QueryOutput<'a> {
    search: SearchKind,
    keywords: &'a KeywordSet,
    start: NodeId,
    responsible: NodeId,
    objects: &'a [hyperkube::ObjectRef],
    trace: &'a hyperkube::HopTrace,
}

pub fn query(args: QueryArgs) -> Result<(), Failure> {
    let r = dimension(args.r)?;
    let keywords = KeywordSet::parse(&args.keywords).map_err(|e| Failure::Usage(format!("--keywords: {e}")))?;
    if args.limit == 0 {
        return Err(Failure::Usage("--limit must be at least 1".into()));
    }
    let pairs = load_fixture(&args.fixture).with_context(|| format!("loading fixture {}", args.fixture.display()))?;
    let mut net = Network::build(r).map_err(|e| Failure::Usage(e.to_string()))?;
    for (k, root) in pairs {
        net.publish(k, root).context("publishing fixture entry")?;
    }

    let start = match &args.start {
        Some(s) => {
            let id = NodeId::parse(s).map_err(|e| Failure::Usage(format!("--start: {e}")))?;
            if id.dim() != r {
                return Err(Failure::Usage(format!(
                    "--start {s} has {} bits, expected {r}",
                    id.dim()
                )));
            }
            id
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed.resolve());
            net.node(rng.gen_range(0..=r.mask())).expect("in range")
        }
    };
    let q = match args.search {
        SearchKind::Pin => Query::pin(keywords.clone(), start),
        SearchKind::Superset => {
            Query::superset(keywords.clone(), args.limit, start).map_err(|e| Failure::Usage(e.to_string()))?
        }
    };
    let result = execute(&net, &q);
    let output = QueryOutput {
        search: args.search,
        keywords: &keywords,
        start,
        responsible: net.owner(&keywords),
        objects: &result.objects,
        trace: &result.trace,
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, &output).context("writing output")?;
    writeln!(lock).context("writing output")?;
    Ok(())
}

pub fn verify(args: VerifyArgs) -> Result<(), Failure> {
    if !(1..=5).contains(&args.r) {
        return Err(Failure::Usage(
            "verify runs exhaustive checks; --r must be in 1..=5".into(),
        ));
    }
    if args.objects == 0 || args.queries == 0 {
        return Err(Failure::Usage("--objects and --queries must be at least 1".into()));
    }
    let r = dimension(args.r)?;
    let seed = args.seed.resolve();
    let rule = if args.mutate {
        MatchRule::Bits
    } else {
        MatchRule::Keywords
    };

    let mut reports = vec![
        verify::routing_length_law(r, 10_000, seed).map_err(sim_failure)?,
        verify::sbt_coverage(r),
    ];
    reports.extend(verify::oracle_equivalence(r, args.objects, args.queries, seed, rule).map_err(sim_failure)?);

    let mut all = true;
    for rep in &reports {
        all &= rep.passed;
        let status = if rep.passed { "PASS" } else { "FAIL" };
        if rep.detail.is_empty() {
            println!("{status} {} ({} checked)", rep.name, rep.checked);
        } else {
            println!("{status} {} ({} checked): {}", rep.name, rep.checked, rep.detail);
        }
    }
    if all {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}
