mod commands;
mod config;
mod corpus;
mod error;
mod output;

use clap::Parser;
use serde::Serialize;

use config::{Cli, Command, RunConfig};
use error::CliError;
use output::Layout;

fn print<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("summaries serialize"));
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_args(&cli.run)?;
    let layout = Layout::new(&cfg.output_dir);
    let name = match &cli.command {
        Command::Analyze => {
            print(&commands::cmd_analyze(&cfg, &layout)?);
            "analyze"
        }
        Command::Docs => {
            print(&commands::cmd_docs(&cfg, &layout)?);
            "docs"
        }
        Command::Link => {
            print(&commands::cmd_link(&cfg, &layout)?);
            "link"
        }
        Command::Posts => {
            print(&commands::cmd_posts(&cfg, &layout)?);
            "posts"
        }
        Command::Suggest { prefix, top } => {
            print(&commands::cmd_suggest(&cfg, &layout, prefix, *top)?);
            "suggest"
        }
        Command::Eval => {
            print(&commands::cmd_eval(&cfg, &layout)?);
            "eval"
        }
        Command::Coverage => {
            let r = commands::cmd_coverage(&cfg, &layout)?;
            print(&serde_json::json!({ "files": r.per_file.len(), "mean": r.mean, "stddev": r.stddev }));
            "coverage"
        }
    };
    layout.record_manifest(name, &cfg)
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("codegraph: {e}");
        std::process::exit(e.exit_code());
    }
}
