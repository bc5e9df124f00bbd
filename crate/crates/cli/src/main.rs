use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pisotfactor::corpus;
use pisotfactor::pair_dynamics::Caps;
use pisotfactor::report::{self, AnalysisOptions, Which};
use pisotfactor::{Error, Result, Substitution};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pisotfactor", version, about = "Coincidence rank, factors and cohomology bounds of Pisot substitutions")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Maximum number of states in any pair-state closure.
    #[arg(long, global = true, env = "PISOTFACTOR_CAP_STATES", default_value_t = Caps::default().states)]
    cap_states: usize,
    /// Maximum breadth-first depth of any closure.
    #[arg(long, global = true, env = "PISOTFACTOR_CAP_DEPTH", default_value_t = Caps::default().depth)]
    cap_depth: usize,
    /// Largest tuple size tried for the coincidence rank.
    #[arg(long, global = true, env = "PISOTFACTOR_CAP_TUPLE", default_value_t = Caps::default().tuple)]
    cap_tuple: usize,
    /// Record stage errors in the report and carry on.
    #[arg(long, global = true, env = "PISOTFACTOR_KEEP_GOING")]
    keep_going: bool,
    /// Include stage timings in reports (output is then not reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full analysis report of one substitution.
    Analyze {
        /// JSON file or corpus name.
        input: String,
    },
    /// Built-in corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
    /// One factor substitution with its sidecar.
    Factor {
        input: String,
        #[arg(long, value_enum)]
        which: WhichArg,
    },
    /// Write the fiber overlap graph in DOT format.
    Graph {
        input: String,
        #[arg(long, env = "PISOTFACTOR_DOT_OUT")]
        dot_out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Analyse every matching item and print a summary table.
    Run {
        /// Regular expression on item names.
        #[arg(long)]
        filter: Option<String>,
        /// Also write the summary and all reports as JSON.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// List item names.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    S,
    Op,
    P,
}

impl From<WhichArg> for Which {
    fn from(w: WhichArg) -> Which {
        match w {
            WhichArg::S => Which::S,
            WhichArg::Op => Which::Op,
            WhichArg::P => Which::P,
        }
    }
}

fn load(input: &str) -> Result<Substitution> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{input}: {e}")))?;
        return Substitution::from_json_str(&text);
    }
    match corpus::lookup(input) {
        Some(c) => Ok(c.substitution()),
        None => Err(Error::Invalid(format!("`{input}` is neither a file nor a corpus item"))),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise")
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<()> {
    let caps = Caps {
        states: cli.opts.cap_states,
        depth: cli.opts.cap_depth,
        tuple: cli.opts.cap_tuple,
    };
    let opts = AnalysisOptions {
        caps,
        keep_going: cli.opts.keep_going,
        timings: cli.opts.timings,
    };
    match cli.cmd {
        Cmd::Analyze { input } => {
            let r = report::analyze(&load(&input)?, &opts)?;
            println!("{}", pretty(&r.json));
        }
        Cmd::Corpus { cmd: CorpusCmd::List } => {
            for c in corpus::CORPUS {
                println!("{}\t{}", c.name, c.description);
            }
        }
        Cmd::Corpus {
            cmd: CorpusCmd::Run { filter, json_out },
        } => {
            let items = corpus::filtered(filter.as_deref())?;
            let (reports, rows) = report::run_corpus(&items, &opts);
            print!("{}", report::summary_table(&rows));
            if let Some(path) = json_out {
                let j = json!({
                    "schema": report::SCHEMA,
                    "summary": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                    "reports": reports,
                });
                write(&path, &pretty(&j))?;
            }
        }
        Cmd::Factor { input, which } => {
            let v = report::factor_json(&load(&input)?, which.into(), &caps)?;
            println!("{}", pretty(&v));
        }
        Cmd::Graph { input, dot_out } => {
            let dot = report::fiber_dot(&load(&input)?, &caps)?;
            write(&dot_out, &dot)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
