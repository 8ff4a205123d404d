//! `forge`: command-line front end for forge-core.
//!
//! Every command prints a report (see `forge_core::report`) and exits with
//! 0 for certified/witness, 2 for inconclusive and 1 otherwise. Commands
//! that produce an artifact write it to `--out`; without `--out` the
//! artifact goes to stdout and the report to stderr.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use forge_core::report::{RunReport, Status};

#[derive(Parser, Debug)]
#[command(name = "forge", version, about = "Stallings graphs, presentation encodings, finite quotients and square complexes")]
struct Cli {
    /// Worker threads for the parallel searches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Graph file.
    pub graph: PathBuf,
    /// Base graph file; overrides the graph's `base` line.
    #[arg(long)]
    pub base: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fold a graph map into an immersion.
    Fold {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fold and trim to the core at the basepoint.
    Core {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Components of the fibre product of two immersions.
    Fibre {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Malnormal family check; with `--rotations`, the family of all
    /// cyclic relabelings of a single graph over a rose.
    Malnormal {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        rotations: bool,
    },
    /// Abelianization of a presentation.
    Abel { presentation: PathBuf },
    /// Free product of `n` copies of a presentation.
    Freepow {
        presentation: PathBuf,
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a presentation and a word; writes the JSON trace.
    Encode {
        presentation: PathBuf,
        #[arg(long)]
        word: String,
        /// Modulus of the finite cyclic quotient.
        #[arg(long = "N", default_value_t = forge_core::encoder::DEFAULT_MODULUS)]
        modulus: u32,
        /// Cap on candidate tuples examined by the word selection.
        #[arg(long)]
        budget: Option<u64>,
        /// Discrete-group variant.
        #[arg(long)]
        discrete: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for homomorphisms into symmetric groups.
    Quotients {
        presentation: PathBuf,
        #[arg(long)]
        max_degree: usize,
        /// Look for a quotient where this word survives.
        #[arg(long, conflicts_with = "orders")]
        word: Option<String>,
        /// `κ:e1,e2,...`: prescribed orders κ·eᵢ for the targets.
        #[arg(long)]
        orders: Option<String>,
        /// Comma-separated target words for `--orders` (default: the
        /// first generators).
        #[arg(long, requires = "orders")]
        targets: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Square complexes.
    Sqc {
        #[command(subcommand)]
        command: SqcCommand,
    },
    /// Encode, then search the result for a nontrivial finite quotient.
    Probe {
        presentation: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 5)]
        max_degree: usize,
        #[arg(long = "N", default_value_t = forge_core::encoder::DEFAULT_MODULUS)]
        modulus: u32,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Cap on search nodes across all degrees.
    #[arg(long, default_value_t = forge_core::quotients::SearchBudget::DEFAULT_NODES)]
    pub max_nodes: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum SqcCommand {
    /// Check the link condition.
    Check { complex: PathBuf },
    /// Build the square complex of a presentation.
    Build {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        complex: PathBuf,
        /// Edge loop in the complex, e.g. "a a" or "a b-".
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Presentation of the fundamental group.
    Pi1 {
        complex: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A finished command: its report and an optional artifact.
pub struct Outcome {
    pub report: RunReport,
    pub artifact: Option<(Option<PathBuf>, String)>,
}

fn dispatch(command: Command) -> anyhow::Result<Outcome> {
    use commands::*;
    match command {
        Command::Fold { input, out } => fold(&input, false, out),
        Command::Core { input, out } => fold(&input, true, out),
        Command::Fibre {
            first,
            second,
            base,
        } => fibre(&first, &second, base.as_deref()),
        Command::Malnormal {
            graphs,
            base,
            rotations,
        } => malnormal(&graphs, base.as_deref(), rotations),
        Command::Abel { presentation } => abel(&presentation),
        Command::Freepow {
            presentation,
            n,
            out,
        } => freepow(&presentation, n, out),
        Command::Encode {
            presentation,
            word,
            modulus,
            budget,
            discrete,
            out,
        } => encode(&presentation, &word, modulus, budget, discrete, out),
        Command::Quotients {
            presentation,
            max_degree,
            word,
            orders,
            targets,
            search,
        } => quotients(
            &presentation,
            max_degree,
            word.as_deref(),
            orders.as_deref(),
            targets.as_deref(),
            &search,
        ),
        Command::Sqc { command } => match command {
            SqcCommand::Check { complex } => sqc_check(&complex),
            SqcCommand::Build {
                pres,
                complex,
                gamma,
                out,
            } => sqc_build(&pres, &complex, &gamma, out),
            SqcCommand::Pi1 { complex, out } => sqc_pi1(&complex, out),
        },
        Command::Probe {
            presentation,
            word,
            max_degree,
            modulus,
            search,
        } => probe(&presentation, &word, max_degree, modulus, &search),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fold { .. } => "fold",
        Command::Core { .. } => "core",
        Command::Fibre { .. } => "fibre",
        Command::Malnormal { .. } => "malnormal",
        Command::Abel { .. } => "abel",
        Command::Freepow { .. } => "freepow",
        Command::Encode { .. } => "encode",
        Command::Quotients { .. } => "quotients",
        Command::Sqc { command } => match command {
            SqcCommand::Check { .. } => "sqc check",
            SqcCommand::Build { .. } => "sqc build",
            SqcCommand::Pi1 { .. } => "sqc pi1",
        },
        Command::Probe { .. } => "probe",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("warning: {e}");
        }
    }
    let name = command_name(&cli.command);
    let start = Instant::now();
    let outcome = dispatch(cli.command).and_then(|mut o| {
        if o.report.elapsed == Duration::ZERO {
            o.report.elapsed = start.elapsed();
        }
        match &o.artifact {
            Some((Some(path), text)) => std::fs::write(path, text)
                .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?,
            Some((None, text)) => print!("{text}"),
            None => {}
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            if matches!(o.artifact, Some((None, _))) {
                eprint!("{}", o.report);
            } else {
                print!("{}", o.report);
            }
            ExitCode::from(o.report.exit_code() as u8)
        }
        Err(e) => {
            let mut report = RunReport::new(name);
            report.status = Status::Error;
            report.detail("error", format!("{e:#}"));
            report.elapsed = start.elapsed();
            print!("{report}");
            ExitCode::from(1)
        }
    }
}
