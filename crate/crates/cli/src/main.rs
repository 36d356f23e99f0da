//! `qrev`: batch front end for the reversibility toolkit.
//!
//! Every command reads JSON inputs, runs one check and prints a report
//! envelope on stdout. Exit codes: 0 pass / Reversible, 1 fail /
//! NotReversible, 2 Unknown, 3 input error.

mod commands;
mod envelope;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrev_core::LogBase;

use envelope::{envelope, summary_table, Inputs, Settings};

const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qrev",
    version,
    about = "Reversibility checks for finite-dimensional quantum channels"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Numerical tolerance for pass/fail decisions.
    #[arg(long, env = "QREV_TOL", default_value_t = 1e-9, global = true)]
    tol: f64,
    /// Logarithm base for entropies and Holevo quantities.
    #[arg(long, value_enum, default_value_t = Base::Two, global = true)]
    log_base: Base,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Compact JSON on a single line (default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Aligned summary tables followed by indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Report `wall_time_ms` as 0 so that repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Subcommand)]
enum Command {
    /// Check trace preservation of a Kraus list.
    ValidateChannel {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Kraus operators of the complementary channel.
    Complement {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Petz recovery channel of a reference state.
    Petz {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Also report how well this state is recovered.
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Relative entropy and recovery verdicts on a pair of states.
    CheckPair {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Recovery of every member of an ensemble or pure-state family.
    CheckFamily {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        ensemble: Option<PathBuf>,
        /// Pure-state family, weighted uniformly unless --weights is given.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', requires = "family")]
        weights: Option<Vec<f64>>,
    },
    /// Orthogonal decomposition of a pure-state family into blocks.
    Ond {
        #[arg(long)]
        family: PathBuf,
    },
    /// Structural reversibility criterion for a channel on a family.
    Criterion {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Use the general criterion even for an orthonormal basis.
        #[arg(long)]
        general: bool,
    },
    /// Classical-quantum form of a channel.
    CqStructure {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Gram-matrix form of a channel reversible on a family.
    Gram {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Whether the Holevo capacity reaches the log of the input dimension.
    Capacity {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Holevo quantity of an ensemble and its loss under a channel or partial trace.
    Holevo {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long, conflicts_with = "dims")]
        channel: Option<PathBuf>,
        /// Bipartite dimensions `dA,dB` for a partial trace.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
        /// Subsystem kept by the partial trace.
        #[arg(long, value_enum, default_value_t = Keep::A, requires = "dims")]
        keep: Keep,
    },
    /// Strict Holevo decrease and strict concavity on a sampled ensemble.
    DemoStrict {
        /// Bipartite dimensions `dA,dB`.
        #[arg(long, value_parser = parse_dims, default_value = "2,3")]
        dims: (usize, usize),
        /// Number of ensemble members (at least dA·dB).
        #[arg(long)]
        members: Option<usize>,
    },
    /// Seeded random instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Keep {
    A,
    B,
}

#[derive(Subcommand)]
enum GenCommand {
    Channel {
        #[arg(long)]
        din: usize,
        #[arg(long)]
        dout: usize,
        #[arg(long)]
        kraus: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    State {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Family {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Ensemble {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_dims(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text
        .split_once([',', 'x'])
        .ok_or_else(|| format!("expected two dimensions such as 2,3, got {text:?}"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ValidateChannel { .. } => "validate-channel",
            Command::Complement { .. } => "complement",
            Command::Petz { .. } => "petz",
            Command::CheckPair { .. } => "check-pair",
            Command::CheckFamily { .. } => "check-family",
            Command::Ond { .. } => "ond",
            Command::Criterion { .. } => "criterion",
            Command::CqStructure { .. } => "cq-structure",
            Command::Gram { .. } => "gram",
            Command::Capacity { .. } => "capacity",
            Command::Holevo { .. } => "holevo",
            Command::DemoStrict { .. } => "demo-strict",
            Command::Gen(_) => "gen",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("qrev: {message}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let g = &cli.global;
    if !(g.tol.is_finite() && g.tol > 0.0) {
        return Err(format!("--tol must be a positive number, got {}", g.tol));
    }
    let settings = Settings {
        tolerance: g.tol,
        log_base: match g.log_base {
            Base::Two => LogBase::Bits,
            Base::E => LogBase::Nats,
        },
        seed: g.seed,
    };
    if let Command::Gen(gen) = &cli.command {
        let value = commands::generate(gen, g.seed.unwrap_or(0))?;
        let out = match gen {
            GenCommand::Channel { out, .. }
            | GenCommand::State { out, .. }
            | GenCommand::Family { out, .. }
            | GenCommand::Ensemble { out, .. } => out,
        };
        let text = render(&value, g.pretty);
        match out {
            Some(path) => std::fs::write(path, text + "\n")
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
            None => emit(&text),
        }
        return Ok(0);
    }
    let name = cli.command.name();
    let mut inputs = Inputs::new(name);
    let start = Instant::now();
    let outcome = commands::execute(&cli.command, &mut inputs, &settings)?;
    let elapsed = if g.no_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    let report = envelope(name, inputs.digest(), &outcome, &settings, elapsed);
    let mut text = String::new();
    if g.pretty {
        text.push_str(&summary_table(&report));
        text.push('\n');
    }
    text.push_str(&render(&report, g.pretty));
    emit(&text);
    Ok(outcome.status.exit_code() as u8)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{text}").and_then(|_| stdout.flush());
}

fn render(value: &serde_json::Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    } else {
        value.to_string()
    }
}
