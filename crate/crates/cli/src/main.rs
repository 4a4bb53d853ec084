use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cohfeed::commands::{run, Command, Context};
use cohfeed::config::ScenarioConfig;
use cohfeed::output::{write_atomic, Format};
use cohfeed::InputError;

#[derive(Parser, Debug)]
#[command(name = "cohfeed", version, about = "Coherent feedback control of optical qubits")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Scenario file with `key=value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files; without it the primary output goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides `seed=`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Table format (overrides `format=`).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// CS factors of `unitary=<file>` or of a scheme, as JSON.
    Decompose(Overrides),
    /// Netlist and verification report for a scheme or unitary.
    Compile(Overrides),
    /// Output amplitudes of a circuit for a 4-amplitude `initial` state.
    Simulate(Overrides),
    /// Fidelity trace of the iterated channel against the geometric law.
    Converge(Overrides),
    /// Filtered iteration with closed-form fidelities and required gain.
    Filter(Overrides),
    /// Time-bin ancilla pulse train.
    Timebin(Overrides),
    /// OAM ancilla modes with doubling losses.
    Oam(Overrides),
    /// Parametric amplifier gain.
    Gain(Overrides),
    /// Check `netlist=<file>` against `unitary=<file>`.
    Verify(Overrides),
}

#[derive(clap::Args, Debug)]
struct Overrides {
    /// `key=value` settings applied after the config file.
    settings: Vec<String>,
}

fn split(cmd: Cmd) -> (Command, Vec<String>) {
    match cmd {
        Cmd::Decompose(o) => (Command::Decompose, o.settings),
        Cmd::Compile(o) => (Command::Compile, o.settings),
        Cmd::Simulate(o) => (Command::Simulate, o.settings),
        Cmd::Converge(o) => (Command::Converge, o.settings),
        Cmd::Filter(o) => (Command::Filter, o.settings),
        Cmd::Timebin(o) => (Command::Timebin, o.settings),
        Cmd::Oam(o) => (Command::Oam, o.settings),
        Cmd::Gain(o) => (Command::Gain, o.settings),
        Cmd::Verify(o) => (Command::Verify, o.settings),
    }
}

fn context(cli: &Cli, overrides: &[String]) -> anyhow::Result<Context> {
    let (mut cfg, base) = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
            let cfg = ScenarioConfig::parse(&text).map_err(|e| e.in_file(p))?;
            let base = p.parent().map(PathBuf::from).unwrap_or_default();
            (cfg, base)
        }
        None => (ScenarioConfig::default(), PathBuf::new()),
    };
    cfg.apply_overrides(overrides).map_err(|e: InputError| anyhow::anyhow!(e))?;
    let mut ctx = Context::new(cfg, base);
    if let Some(s) = cli.seed {
        ctx.seed = s;
    }
    if let Some(f) = cli.format {
        ctx.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    Ok(ctx)
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    let (cmd, overrides) = split(std::mem::replace(&mut cli.command, Cmd::Gain(Overrides { settings: Vec::new() })));
    let ctx = match context(&cli, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run(cmd, &ctx) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {} failed: {e}", cmd.name());
            return ExitCode::from(1);
        }
    };
    let out_dir = cli.out.clone().or_else(|| ctx.cfg.out.clone());
    match out_dir {
        Some(dir) => {
            for d in &outcome.documents {
                let path = dir.join(&d.name);
                if let Err(e) = write_atomic(&path, &d.contents) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
        }
        None => {
            let mut docs = outcome.documents.iter();
            if let Some(first) = docs.next() {
                print!("{}", first.contents);
            }
            for d in docs {
                eprintln!("== {} ==", d.name);
                eprint!("{}", d.contents);
            }
        }
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
