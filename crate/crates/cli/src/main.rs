//! `pathwave` command-line front end.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pathwave_core::DEFAULT_TUPLE_BUDGET;

#[derive(Parser)]
#[command(
    name = "pathwave",
    version,
    about = "Cost-based evaluation of SPARQL property paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-label statistics as TSV.
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
    /// List the plan space with cost estimates, or render one plan as DOT.
    Explain {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate a path query and print `source\ttarget` rows.
    Query {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Run every plan of every query and report estimated vs actual cost.
    Bench {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
        tuple_budget: u64,
    },
}

#[derive(Args, Clone)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    path: String,
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long = "plan")]
    plan: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
    tuple_budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let result = match cli.command {
        Command::Stats { graph } => commands::stats(&graph),
        Command::Explain { query, format } => commands::explain(&query.into(), format.is_dot()),
        Command::Query { query, limit } => commands::query(&query.into(), limit),
        Command::Bench {
            graph,
            queries,
            repeat,
            tuple_budget,
        } => commands::bench(&graph, &queries, repeat, tuple_budget),
    };

    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stdout.flush();
            if !out.stderr.is_empty() {
                eprint!("{}", out.stderr);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<QueryArgs> for commands::QueryRequest {
    fn from(a: QueryArgs) -> Self {
        commands::QueryRequest {
            graph_path: a.graph,
            path_expr: a.path,
            source: a.source,
            target: a.target,
            plan_override: a.plan,
            tuple_budget: a.tuple_budget,
        }
    }
}

impl Format {
    fn is_dot(self) -> bool {
        matches!(self, Format::Dot)
    }
}
