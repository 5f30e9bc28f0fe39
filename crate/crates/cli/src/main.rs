use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use expgap_cli::{
    emit_report, run_experiment, CliError, Command, ConfigFile, ExperimentConfig, Format, Params, Status,
    EXIT_PROMISE_VIOLATED, EXIT_USAGE,
};
use expgap_core::BlockKind;

#[derive(Debug, Parser)]
#[command(name = "expgap", version, about = "Run reductions, spectra and verifier experiments")]
struct Cli {
    /// TOML experiment file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report path (stdout when absent)
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Closed-form against eigensolver spectrum of a path or cycle block
    Spectrum(ParamArgs),
    /// Exact determinant of an instance
    Det(ParamArgs),
    /// Configuration-graph reduction of a machine instance
    Reduce(ParamArgs),
    /// Gapped verifier on the best witness
    Verify(ParamArgs),
    /// Phase-estimation amplification of a verifier
    Amplify(ParamArgs),
    /// Clock Hamiltonian of a verifier
    Kitaev(ParamArgs),
    /// Ground energy by bisection
    Energy(ParamArgs),
}

#[derive(Debug, Default, clap::Args)]
struct ParamArgs {
    /// Instance file or inline JSON
    #[arg(long)]
    instance: Option<String>,
    /// Corpus verifier name or verifier file
    #[arg(long)]
    verifier: Option<String>,
    /// Block family: path or cycle
    #[arg(long, value_parser = parse_kind)]
    kind: Option<BlockKind>,
    #[arg(long)]
    ell: Option<usize>,
    /// Amplification trials
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    precision_bits: Option<usize>,
    /// Gap exponent override
    #[arg(long)]
    g: Option<u32>,
    /// Bisection precision in bits
    #[arg(long)]
    bits: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// best, random or basis:<index>
    #[arg(long)]
    witness: Option<String>,
    /// Where kitaev writes the instance JSON
    #[arg(long)]
    emit: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<BlockKind, expgap_core::Error> {
    s.parse()
}

impl From<ParamArgs> for Params {
    fn from(a: ParamArgs) -> Self {
        Params {
            instance: a.instance,
            verifier: a.verifier,
            kind: a.kind,
            ell: a.ell,
            r: a.r,
            precision_bits: a.precision_bits,
            g: a.g,
            bits: a.bits,
            seed: a.seed,
            witness: a.witness,
            emit: a.emit,
        }
    }
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let (command, args) = match cli.command {
        Some(Sub::Spectrum(a)) => (Some(Command::Spectrum), a),
        Some(Sub::Det(a)) => (Some(Command::Det), a),
        Some(Sub::Reduce(a)) => (Some(Command::Reduce), a),
        Some(Sub::Verify(a)) => (Some(Command::Verify), a),
        Some(Sub::Amplify(a)) => (Some(Command::Amplify), a),
        Some(Sub::Kitaev(a)) => (Some(Command::Kitaev), a),
        Some(Sub::Energy(a)) => (Some(Command::Energy), a),
        None => (None, ParamArgs::default()),
    };
    let cfg = ExperimentConfig::resolve(command, args.into(), cli.output, cli.format, file)?;
    let outcome = run_experiment(&cfg)?;
    emit_report(&outcome.report, cfg.format, cfg.output.as_deref())?;
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::PromiseViolated) => {
            eprintln!("expgap: promise violated: the median phase fell between the thresholds");
            ExitCode::from(EXIT_PROMISE_VIOLATED)
        }
        Err(e) => {
            eprintln!("expgap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
