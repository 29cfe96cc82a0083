//! Evaluation protocols: k-fold path and successor statistics over a path
//! database, and AST call-site coverage of analysis graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::SyntaxTree;
use crate::graph::{NodeKind, ProgramGraph};
use crate::par::Execution;
use crate::suggest::{graph_pathdb, LabelPath, PathDb, MAX_PATH_LEN};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("{graphs} graphs cannot be split into {folds} folds")]
    TooFewGraphs { graphs: usize, folds: usize },
    #[error("need at least 2 folds, got {0}")]
    BadFoldCount(usize),
}

/// Statistics of one fold at one path length; `None` where the denominator
/// is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FoldStats {
    pub paths: usize,
    pub found: usize,
    pub with_successors: usize,
    pub found_fraction: Option<f64>,
    pub with_successors_fraction: Option<f64>,
    pub avg_successors: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FoldReport {
    pub path_length: usize,
    /// Means over the folds where the statistic is defined.
    pub found_fraction: Option<f64>,
    pub with_successors_fraction: Option<f64>,
    pub avg_successors: Option<f64>,
    pub per_fold: Vec<FoldStats>,
}

/// Fold index of every graph: a seeded shuffle of `0..n`, then position
/// modulo `k`.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &g) in order.iter().enumerate() {
        fold[g] = pos % k;
    }
    fold
}

fn mean(xs: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = xs.into_iter().flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn ratio(num: f64, den: usize) -> Option<f64> {
    (den > 0).then(|| num / den as f64)
}

fn fold_stats(test_paths: &BTreeSet<LabelPath>, db: &PathDb) -> FoldStats {
    let mut found = 0;
    let mut with_successors = 0;
    let mut successor_total = 0usize;
    for p in test_paths {
        if let Some(succ) = db.successors(p) {
            found += 1;
            if !succ.is_empty() {
                with_successors += 1;
                successor_total += succ.len();
            }
        }
    }
    FoldStats {
        paths: test_paths.len(),
        found,
        with_successors,
        found_fraction: ratio(found as f64, test_paths.len()),
        with_successors_fraction: ratio(with_successors as f64, found),
        avg_successors: ratio(successor_total as f64, with_successors),
    }
}

/// One report per path length `1..=max_len`. Each fold in turn is the test
/// set; the database is built from the other folds. A test path is found
/// when it is a database key; it has successors when its successor set is
/// nonempty; `avgSuccessors` counts distinct successor labels.
pub fn kfold_eval(
    graphs: &[ProgramGraph],
    k: usize,
    max_len: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<FoldReport>, EvalError> {
    if k < 2 {
        return Err(EvalError::BadFoldCount(k));
    }
    if graphs.len() < k {
        return Err(EvalError::TooFewGraphs {
            graphs: graphs.len(),
            folds: k,
        });
    }
    let max_len = max_len.clamp(1, MAX_PATH_LEN);
    let assignment = fold_assignment(graphs.len(), k, seed);
    let per_graph = exec.map(graphs, |g| graph_pathdb(g, max_len));
    let per_fold: Vec<Vec<FoldStats>> = exec.map_range(k, |f| {
        let mut db = PathDb::default();
        for (part, _) in per_graph.iter().zip(&assignment).filter(|(_, &a)| a != f) {
            db.merge(part.clone());
        }
        let mut by_len: BTreeMap<usize, BTreeSet<LabelPath>> = BTreeMap::new();
        for (db_g, _) in per_graph.iter().zip(&assignment).filter(|(_, &a)| a == f) {
            for (p, _) in db_g.entries() {
                by_len.entry(p.len()).or_default().insert(p.clone());
            }
        }
        (1..=max_len)
            .map(|l| fold_stats(by_len.get(&l).unwrap_or(&BTreeSet::new()), &db))
            .collect()
    });
    Ok((1..=max_len)
        .map(|l| {
            let rows: Vec<FoldStats> = per_fold.iter().map(|f| f[l - 1]).collect();
            FoldReport {
                path_length: l,
                found_fraction: mean(rows.iter().map(|r| r.found_fraction)),
                with_successors_fraction: mean(rows.iter().map(|r| r.with_successors_fraction)),
                avg_successors: mean(rows.iter().map(|r| r.avg_successors)),
                per_fold: rows,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FileCoverage {
    pub file: String,
    pub ast_call_count: usize,
    pub covered_call_count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageReport {
    pub per_file: Vec<FileCoverage>,
    pub mean: f64,
    pub stddev: f64,
}

/// Distinct call-expression start positions in the tree, and how many of
/// them are the start of some call node in the graph.
pub fn coverage_check(tree: &SyntaxTree, graph: &ProgramGraph) -> (usize, usize) {
    let sites: BTreeSet<(u32, u32)> = tree.call_sites().iter().map(|l| l.start()).collect();
    let nodes: BTreeSet<(u32, u32)> = graph
        .nodes()
        .filter(|n| n.kind == NodeKind::Call)
        .filter_map(|n| n.location.as_ref())
        .filter(|l| *l.file == **tree.file())
        .map(|l| l.start())
        .collect();
    let covered = sites.intersection(&nodes).count();
    (sites.len(), covered)
}

pub fn file_coverage(tree: &SyntaxTree, graph: &ProgramGraph) -> FileCoverage {
    let (total, covered) = coverage_check(tree, graph);
    FileCoverage {
        file: tree.file().to_string(),
        ast_call_count: total,
        covered_call_count: covered,
        fraction: if total == 0 { 1.0 } else { covered as f64 / total as f64 },
    }
}

/// Mean and population standard deviation of per-file fractions; both 0
/// for an empty corpus.
pub fn summarize_coverage(per_file: Vec<FileCoverage>) -> CoverageReport {
    let n = per_file.len() as f64;
    let (mean, stddev) = if per_file.is_empty() {
        (0.0, 0.0)
    } else {
        let mean = per_file.iter().map(|f| f.fraction).sum::<f64>() / n;
        let var = per_file.iter().map(|f| (f.fraction - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    CoverageReport {
        per_file,
        mean,
        stddev,
    }
}

pub fn corpus_coverage<'a>(
    pairs: impl IntoIterator<Item = (&'a SyntaxTree, &'a ProgramGraph)>,
) -> CoverageReport {
    summarize_coverage(pairs.into_iter().map(|(t, g)| file_coverage(t, g)).collect())
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"))
}

/// Aligned-column text table of fold reports.
pub fn fold_table(reports: &[FoldReport]) -> String {
    let mut out = format!(
        "{:>6}  {:>10}  {:>14}  {:>14}\n",
        "length", "found", "withSucc", "avgSucc"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:>6}  {:>10}  {:>14}  {:>14}",
            r.path_length,
            cell(r.found_fraction),
            cell(r.with_successors_fraction),
            cell(r.avg_successors)
        );
    }
    out
}

pub fn coverage_table(report: &CoverageReport) -> String {
    let width = report.per_file.iter().map(|f| f.file.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:>6}  {:>7}  {:>8}\n", "file", "calls", "covered", "fraction");
    for f in &report.per_file {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>7}  {:>8.4}",
            f.file, f.ast_call_count, f.covered_call_count, f.fraction
        );
    }
    let _ = writeln!(out, "mean {:.4}  stddev {:.4}", report.mean, report.stddev);
    out
}
