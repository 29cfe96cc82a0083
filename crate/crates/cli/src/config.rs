use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "codegraph", version, about = "Build, link and evaluate code knowledge graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze Python files and notebooks into per-program graphs.
    Analyze,
    /// Extract documentation from library source roots into an index.
    Docs,
    /// Link graph labels to the documentation index.
    Link,
    /// Ingest a forum dump and link documented names to posts.
    Posts,
    /// Build the path database and optionally query it.
    Suggest {
        /// Label path to query, one `--prefix` per label.
        #[arg(long = "prefix")]
        prefix: Vec<String>,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// k-fold path and successor statistics over the analyzed graphs.
    Eval,
    /// AST call-site coverage of the analysis.
    Coverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Nquads,
    Json,
    Both,
}

impl Format {
    pub fn nquads(self) -> bool {
        matches!(self, Format::Nquads | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input files or directories (repeatable).
    #[arg(long = "input", global = true)]
    pub input: Vec<PathBuf>,
    #[arg(long = "out", global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Per-file analysis budget in seconds.
    #[arg(long, global = true, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, global = true, env = "CODEGRAPH_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long = "import-threshold", global = true, default_value_t = 1000)]
    pub import_threshold: usize,
    #[arg(long = "path-max-len", global = true, default_value_t = 3)]
    pub path_max_len: usize,
    #[arg(long, global = true, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Forum post dump (XML or JSON lines).
    #[arg(long, global = true)]
    pub posts: Option<PathBuf>,
    /// Documentation index (JSON lines); defaults to `<out>/docs/index.jsonl`.
    #[arg(long = "doc-index", global = true)]
    pub doc_index: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub input_paths: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub format: Format,
    pub timeout_seconds: u64,
    pub workers: usize,
    pub import_threshold: usize,
    pub path_max_len: usize,
    pub folds: usize,
    pub seed: u64,
    pub post_dump_path: Option<PathBuf>,
    pub doc_index_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<RunConfig, CliError> {
        if a.timeout < 1 {
            return Err(CliError::Config("--timeout must be at least 1 second".into()));
        }
        if a.folds < 2 {
            return Err(CliError::Config("--folds must be at least 2".into()));
        }
        if !(1..=codegraph::suggest::MAX_PATH_LEN).contains(&a.path_max_len) {
            return Err(CliError::Config(format!(
                "--path-max-len must be in 1..={}",
                codegraph::suggest::MAX_PATH_LEN
            )));
        }
        let workers = match a.workers {
            Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunConfig {
            input_paths: a.input.clone(),
            output_dir: a.out.clone(),
            format: a.format,
            timeout_seconds: a.timeout,
            workers,
            import_threshold: a.import_threshold,
            path_max_len: a.path_max_len,
            folds: a.folds,
            seed: a.seed,
            post_dump_path: a.posts.clone(),
            doc_index_path: a.doc_index.clone(),
        })
    }

    pub fn budget(&self) -> Duration {
        Duration::from_secs(self.timeout_seconds)
    }

    pub fn require_inputs(&self) -> Result<(), CliError> {
        if self.input_paths.is_empty() {
            return Err(CliError::Config("at least one --input is required".into()));
        }
        for p in &self.input_paths {
            if !p.exists() {
                return Err(CliError::Config(format!("input {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
