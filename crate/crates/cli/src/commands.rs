use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use codegraph::docs::{build_index, class_hierarchy, extract_docs, module_name, DocEntry, DocIndex};
use codegraph::eval::{corpus_coverage, coverage_table, fold_table, kfold_eval, CoverageReport};
use codegraph::frontend::{parse_source, SourceFile};
use codegraph::graph::ProgramGraph;
use codegraph::link::{
    build_post_index, corpus_labels, ingest_posts, link_path, link_posts, link_stats_with,
    sample_links, CountMode, ForumLink, ANNOTATION_SAMPLE, MAX_MATCHES,
};
use codegraph::serialize::{
    docs_to_nquads, forum_links_to_nquads, from_json_str, to_json_string, to_nquads,
};
use codegraph::suggest::{build_pathdb_with, suggest};
use codegraph::Execution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::RunConfig;
use crate::corpus::{collect_inputs, intake, process, Failure, Outcome};
use crate::error::CliError;
use crate::output::{read_text, write_json, write_jsonl, write_text, Layout};

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))
}

fn execution(cfg: &RunConfig) -> Execution {
    if cfg.workers > 1 {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunStats {
    pub files_seen: usize,
    pub duplicates_removed: usize,
    pub parse_failures: usize,
    pub analysis_failures: usize,
    pub analyzed: usize,
    /// `analyzed / (filesSeen - duplicatesRemoved)`; absent for no files.
    pub success_rate: Option<f64>,
    pub failure_codes: BTreeMap<String, usize>,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct GraphIndexEntry {
    digest: String,
    file: String,
    json: bool,
    nquads: bool,
}

/// Upper bucket bounds of the per-file wall-time histogram.
const TIMING_BUCKETS_MS: [u64; 6] = [10, 100, 1_000, 10_000, 60_000, u64::MAX];

enum FileStatus {
    Analyzed(BTreeSet<String>),
    ParseFailed(Failure),
    AnalysisFailed(Failure),
}

struct FileResult {
    digest: String,
    file: String,
    status: FileStatus,
    millis: u64,
}

fn analyze_one(f: &SourceFile, cfg: &RunConfig, dir: &Path) -> Result<FileResult, CliError> {
    let start = Instant::now();
    let status = match process(f, cfg.budget()) {
        Outcome::Analyzed {
            graph, libraries, ..
        } => match to_nquads(&graph) {
            Err(e) => FileStatus::AnalysisFailed(Failure {
                file: f.path().to_string_lossy().into_owned(),
                code: "E_INVALID".into(),
                message: e.to_string(),
            }),
            Ok(nq) => {
                if cfg.format.nquads() {
                    write_text(&dir.join(format!("{}.nq", f.digest())), &nq)?;
                }
                if cfg.format.json() {
                    write_text(&dir.join(format!("{}.json", f.digest())), &to_json_string(&graph))?;
                }
                FileStatus::Analyzed(libraries)
            }
        },
        Outcome::ParseFailed(e) => FileStatus::ParseFailed(e),
        Outcome::AnalysisFailed(e) => FileStatus::AnalysisFailed(e),
    };
    Ok(FileResult {
        digest: f.digest().to_owned(),
        file: f.path().to_string_lossy().into_owned(),
        status,
        millis: start.elapsed().as_millis() as u64,
    })
}

pub fn cmd_analyze(cfg: &RunConfig, layout: &Layout) -> Result<RunStats, CliError> {
    cfg.require_inputs()?;
    let intake = intake(&cfg.input_paths)?;
    let dir = layout.graphs();
    std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    let results: Vec<FileResult> = pool(cfg.workers)?.install(|| {
        intake
            .unique
            .par_iter()
            .map(|f| analyze_one(f, cfg, &dir))
            .collect::<Result<_, _>>()
    })?;

    let mut stats = RunStats {
        files_seen: intake.files_seen,
        duplicates_removed: intake.duplicates,
        parse_failures: intake.unreadable.len(),
        analysis_failures: 0,
        analyzed: 0,
        success_rate: None,
        failure_codes: BTreeMap::new(),
        failures: intake.unreadable.clone(),
    };
    let mut index = Vec::new();
    let mut libraries: BTreeMap<String, usize> = BTreeMap::new();
    let mut histogram = vec![0usize; TIMING_BUCKETS_MS.len()];
    for r in &results {
        let bucket = TIMING_BUCKETS_MS.iter().position(|&b| r.millis < b).unwrap_or(0);
        histogram[bucket] += 1;
        match &r.status {
            FileStatus::Analyzed(libs) => {
                stats.analyzed += 1;
                for l in libs {
                    *libraries.entry(l.clone()).or_default() += 1;
                }
                index.push(GraphIndexEntry {
                    digest: r.digest.clone(),
                    file: r.file.clone(),
                    json: cfg.format.json(),
                    nquads: cfg.format.nquads(),
                });
            }
            FileStatus::ParseFailed(f) => {
                stats.parse_failures += 1;
                stats.failures.push(f.clone());
            }
            FileStatus::AnalysisFailed(f) => {
                stats.analysis_failures += 1;
                stats.failures.push(f.clone());
            }
        }
    }
    for f in &stats.failures {
        *stats.failure_codes.entry(f.code.clone()).or_default() += 1;
    }
    let attempted = stats.files_seen - stats.duplicates_removed;
    stats.success_rate = (attempted > 0).then(|| stats.analyzed as f64 / attempted as f64);

    write_json(&dir.join("index.json"), &index)?;
    write_json(&layout.reports().join("analyze.json"), &stats)?;
    write_json(&layout.imports_report(), &libraries)?;
    let bounds: Vec<Option<u64>> = TIMING_BUCKETS_MS
        .iter()
        .map(|&b| (b != u64::MAX).then_some(b))
        .collect();
    write_json(
        &layout.reports().join("analyze_timing.json"),
        &json!({
            "wallTimePerFile": { "bucketUpperBoundsMs": bounds, "counts": histogram },
            "maxMs": results.iter().map(|r| r.millis).max().unwrap_or(0),
        }),
    )?;
    Ok(stats)
}

/// Graphs listed by the last `analyze` run, in index order.
pub fn load_graphs(layout: &Layout) -> Result<Vec<ProgramGraph>, CliError> {
    let index_path = layout.graphs().join("index.json");
    if !index_path.exists() {
        return Err(CliError::MissingArtifact("graphs (run `analyze` first)".into()));
    }
    let text = read_text(&index_path)?;
    let index: Vec<GraphIndexEntry> = serde_json::from_str(&text).map_err(|e| CliError::BadArtifact {
        path: index_path.clone(),
        message: e.to_string(),
    })?;
    let mut graphs = Vec::with_capacity(index.len());
    for entry in index {
        if !entry.json {
            return Err(CliError::MissingArtifact(
                "JSON graphs (run `analyze` with --format json or both)".into(),
            ));
        }
        let path = layout.graphs().join(format!("{}.json", entry.digest));
        let g = from_json_str(&read_text(&path)?).map_err(|e| CliError::BadArtifact {
            path: path.clone(),
            message: e.to_string(),
        })?;
        graphs.push(g);
    }
    Ok(graphs)
}

fn doc_index_path(cfg: &RunConfig, layout: &Layout) -> Result<PathBuf, CliError> {
    let path = cfg
        .doc_index_path
        .clone()
        .unwrap_or_else(|| layout.default_doc_index());
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact("docIndexPath".into()))
    }
}

fn load_doc_index(cfg: &RunConfig, layout: &Layout) -> Result<DocIndex, CliError> {
    let path = doc_index_path(cfg, layout)?;
    DocIndex::from_jsonl(&read_text(&path)?).map_err(|e| CliError::BadArtifact {
        path,
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DocsSummary {
    pub modules: usize,
    pub parse_failures: usize,
    pub skipped_libraries: Vec<String>,
    pub entries: usize,
    pub duplicates: usize,
    pub class_hierarchy_pairs: usize,
    pub unresolved_bases: usize,
}

pub fn cmd_docs(cfg: &RunConfig, layout: &Layout) -> Result<DocsSummary, CliError> {
    cfg.require_inputs()?;
    let import_counts: Option<BTreeMap<String, usize>> = if cfg.import_threshold == 0 {
        None
    } else {
        match std::fs::read_to_string(layout.imports_report()) {
            Ok(text) => serde_json::from_str(&text).ok(),
            Err(_) => None,
        }
    };
    let mut skipped = BTreeSet::new();
    let mut modules = Vec::new();
    for (abs, rel) in collect_inputs(&cfg.input_paths, &["py"])? {
        let Some(module) = module_name(&rel) else { continue };
        let library = module.components()[0].clone();
        if let Some(counts) = &import_counts {
            if counts.get(&library).copied().unwrap_or(0) < cfg.import_threshold {
                skipped.insert(library);
                continue;
            }
        }
        modules.push((abs, rel, module));
    }
    let per_module: Vec<Option<Vec<DocEntry>>> = pool(cfg.workers)?.install(|| {
        modules
            .par_iter()
            .map(|(abs, rel, module)| {
                let bytes = std::fs::read(abs).ok()?;
                let tree = parse_source(&SourceFile::new(rel, bytes)).ok()?;
                Some(extract_docs(module, &tree))
            })
            .collect()
    });
    let parse_failures = per_module.iter().filter(|m| m.is_none()).count();
    let index = build_index(per_module.into_iter().flatten().flatten());
    let hierarchy = class_hierarchy(index.entries());
    let docs = layout.dir("docs");
    write_text(&docs.join("index.jsonl"), &index.to_jsonl())?;
    if cfg.format.nquads() {
        write_text(&docs.join("docstrings.nq"), &docs_to_nquads(index.entries()))?;
    }
    let summary = DocsSummary {
        modules: modules.len(),
        parse_failures,
        skipped_libraries: skipped.into_iter().collect(),
        entries: index.len(),
        duplicates: index.duplicates(),
        class_hierarchy_pairs: hierarchy.pairs.len(),
        unresolved_bases: hierarchy.unresolved,
    };
    write_json(&layout.reports().join("docs.json"), &summary)?;
    Ok(summary)
}

pub fn cmd_link(cfg: &RunConfig, layout: &Layout) -> Result<serde_json::Value, CliError> {
    let index = load_doc_index(cfg, layout)?;
    let graphs = load_graphs(layout)?;
    let labels: BTreeSet<_> = corpus_labels(&graphs).into_iter().collect();
    write_jsonl(
        &layout.dir("links").join("doc_links.jsonl"),
        labels.iter().map(|l| link_path(l, &index)),
    )?;
    let unique = link_stats_with(&graphs, &index, CountMode::UniqueLabels);
    let occurrences = link_stats_with(&graphs, &index, CountMode::Occurrences);
    let report = json!({
        "graphs": graphs.len(),
        "uniqueLabels": { "byKind": unique, "total": unique.total() },
        "occurrences": { "byKind": occurrences, "total": occurrences.total() },
    });
    write_json(&layout.reports().join("link.json"), &report)?;
    Ok(report)
}

pub fn cmd_posts(cfg: &RunConfig, layout: &Layout) -> Result<serde_json::Value, CliError> {
    let dump = cfg
        .post_dump_path
        .clone()
        .ok_or_else(|| CliError::MissingArtifact("postDumpPath".into()))?;
    let index = load_doc_index(cfg, layout)?;
    let ingested = ingest_posts(&read_text(&dump)?).map_err(|e| CliError::BadArtifact {
        path: dump.clone(),
        message: e.to_string(),
    })?;
    let post_index = build_post_index(&ingested.posts);
    let names: Vec<_> = index.entries().map(|e| e.qualified_name.clone()).collect();
    let links: Vec<ForumLink> = pool(cfg.workers)?.install(|| {
        names
            .par_iter()
            .map(|n| link_posts(n, &post_index, MAX_MATCHES))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    write_jsonl(&layout.dir("posts").join("posts.jsonl"), &ingested.posts)?;
    write_jsonl(&layout.dir("links").join("forum_links.jsonl"), &links)?;
    write_jsonl(
        &layout.dir("links").join("annotation_sample.jsonl"),
        sample_links(&links, ANNOTATION_SAMPLE, cfg.seed),
    )?;
    if cfg.format.nquads() {
        write_text(
            &layout.dir("posts").join("forum.nq"),
            &forum_links_to_nquads(&links, &ingested.posts),
        )?;
    }
    let linked_names: BTreeSet<_> = links.iter().map(|l| &l.qualified_name).collect();
    let report = json!({
        "posts": ingested.posts.len(),
        "skippedRows": ingested.skipped,
        "queries": names.len(),
        "links": links.len(),
        "linkedNames": linked_names.len(),
    });
    write_json(&layout.reports().join("posts.json"), &report)?;
    Ok(report)
}

pub fn cmd_suggest(
    cfg: &RunConfig,
    layout: &Layout,
    prefix: &[String],
    top: usize,
) -> Result<serde_json::Value, CliError> {
    let graphs = load_graphs(layout)?;
    let db = pool(cfg.workers)?.install(|| build_pathdb_with(&graphs, cfg.path_max_len, execution(cfg)));
    write_text(&layout.dir("pathdb").join("pathdb.jsonl"), &db.to_jsonl())?;
    let mut report = json!({
        "graphs": graphs.len(),
        "maxLen": cfg.path_max_len,
        "paths": db.len(),
        "totalSuccessors": db.total_successors(),
        "programs": db.provenance().len(),
    });
    if !prefix.is_empty() {
        let ranked: Vec<_> = suggest(&db, prefix, top.max(1))
            .into_iter()
            .map(|(label, count)| json!({ "label": label, "count": count }))
            .collect();
        report["prefix"] = json!(prefix);
        report["suggestions"] = json!(ranked);
    }
    write_json(&layout.reports().join("suggest.json"), &report)?;
    Ok(report)
}

pub fn cmd_eval(cfg: &RunConfig, layout: &Layout) -> Result<serde_json::Value, CliError> {
    let graphs = load_graphs(layout)?;
    let reports = pool(cfg.workers)?
        .install(|| kfold_eval(&graphs, cfg.folds, cfg.path_max_len, cfg.seed, execution(cfg)))?;
    let report = json!({
        "graphs": graphs.len(),
        "folds": cfg.folds,
        "seed": cfg.seed,
        "byLength": reports,
    });
    write_json(&layout.reports().join("eval.json"), &report)?;
    write_text(&layout.reports().join("eval.txt"), &fold_table(&reports))?;
    Ok(report)
}

pub fn cmd_coverage(cfg: &RunConfig, layout: &Layout) -> Result<CoverageReport, CliError> {
    cfg.require_inputs()?;
    let intake = intake(&cfg.input_paths)?;
    let outcomes: Vec<Outcome> = pool(cfg.workers)?.install(|| {
        intake
            .unique
            .par_iter()
            .map(|f| process(f, cfg.budget()))
            .collect()
    });
    let pairs: Vec<_> = outcomes
        .iter()
        .filter_map(|o| match o {
            Outcome::Analyzed { tree, graph, .. } => Some((tree, graph)),
            _ => None,
        })
        .collect();
    let report = corpus_coverage(pairs);
    write_json(&layout.reports().join("coverage.json"), &report)?;
    write_text(&layout.reports().join("coverage.txt"), &coverage_table(&report))?;
    Ok(report)
}
