//! `mql`: run MQL programs, start a REPL, or manage the model store.

mod print;
mod repl;

use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mql::planner::{Backend, MissingPolicy, Session};
use mql::result::OutputFormat;

#[derive(Parser)]
#[command(name = "mql", version, about = "Machine-learning queries over CSV tables")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Opts {
    /// Directory searched for `<table>.csv`.
    #[arg(long, global = true, default_value = ".")]
    data_dir: PathBuf,
    /// Where results, plots, wrangled tables and scripts are written [default: ./mql-out or $MQL_HOME/out].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Model store directory [default: ./mql-models or $MQL_HOME/models].
    #[arg(long, global = true)]
    model_store: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Missing::Zero)]
    missing: Missing,
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Native)]
    backend: BackendArg,
    /// Rendering of result sets on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run every statement in a file.
    Run { file: PathBuf },
    /// Read statements from standard input, one `;`-terminated statement at a time.
    Repl,
    /// Inspect or delete stored models.
    Models {
        #[command(subcommand)]
        action: ModelsCommand,
    },
}

#[derive(Subcommand)]
enum ModelsCommand {
    List,
    Delete { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Missing {
    Zero,
    Impute,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Native,
    Emit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => OutputFormat::Table,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

/// `$MQL_HOME/<sub>` when the variable is set, else `./<fallback>`.
fn home_default(sub: &str, fallback: &str) -> PathBuf {
    match std::env::var_os("MQL_HOME") {
        Some(h) if !h.is_empty() => PathBuf::from(h).join(sub),
        _ => PathBuf::from(fallback),
    }
}

fn session(o: &Opts) -> Session {
    let out = o.out_dir.clone().unwrap_or_else(|| home_default("out", "mql-out"));
    let store = o.model_store.clone().unwrap_or_else(|| home_default("models", "mql-models"));
    let mut s = Session::new(&o.data_dir, out, store);
    s.seed = o.seed;
    s.missing = match o.missing {
        Missing::Zero => MissingPolicy::Zero,
        Missing::Impute => MissingPolicy::Impute,
    };
    s.backend = match o.backend {
        BackendArg::Native => Backend::Native,
        BackendArg::Emit => Backend::Emit,
    };
    s
}

const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { 0 });
        }
    };
    let format = cli.opts.format.into();
    let mut s = session(&cli.opts);
    let mut out = io::stdout().lock();
    let ok = match cli.command {
        Command::Run { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("mql: cannot read {}: {e}", file.display());
                    eprintln!("usage: mql run <file.mql> [options]");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            let report = s.run_text(&text);
            let ok = print::report(&mut out, &report, format);
            print::artifacts(&mut out, &report.artifacts);
            ok
        }
        Command::Repl => {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            repl::run(&mut s, stdin.lock(), &mut out, format, prompt)
        }
        Command::Models { action } => match action {
            ModelsCommand::List => print::models(&mut out, &s),
            ModelsCommand::Delete { name } => match s.store.delete(&name) {
                Ok(()) => true,
                Err(e) => {
                    eprintln!("error: {e}");
                    false
                }
            },
        },
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
