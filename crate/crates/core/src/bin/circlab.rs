use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use circlab::experiment::{
    self, parse_usize_list, Command, ConfigOverrides, ExperimentConfig, RunRecord,
};
use circlab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "circlab",
    version,
    about = "Reverse and symmetric circulant random matrix experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectral distribution: KS distance, moments and histogram against the limit law.
    Lsd(Flags),
    /// Decay of the fourth central moment of ESD moments over an n ladder.
    M3(Flags),
    /// Trace formulas against direct matrix products in exact arithmetic.
    TraceVerify(Flags),
    /// Counting identities for constrained index vectors (--h is the half-length p).
    Combinatorics(Flags),
    /// Mixed moments of independent families against their limits.
    Joint(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// reverse, symmetric, or both.
    #[arg(long)]
    kind: Option<String>,
    /// Dimensions, e.g. `64,128` or `2..8`.
    #[arg(long)]
    n: Option<String>,
    /// Moment orders, e.g. `2,4,6` or `1..5`.
    #[arg(long)]
    h: Option<String>,
    /// gaussian, rademacher, uniform, integer or integer:v1,v2*w2,...
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    bins: Option<usize>,
    /// Main acceptance threshold of the command.
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<f64>,
    /// Word such as `1,2,2,1`; repeat for several.
    #[arg(long = "word")]
    words: Vec<String>,
}

impl Flags {
    fn overrides(self) -> Result<ConfigOverrides> {
        let flags = ConfigOverrides {
            kind: self.kind,
            n: self.n.as_deref().map(parse_usize_list).transpose()?,
            h: self
                .h
                .as_deref()
                .map(|s| parse_usize_list(s).map(|v| v.into_iter().map(|x| x as u32).collect()))
                .transpose()?,
            dist: self.dist,
            trials: self.trials,
            seed: self.seed,
            out: self.out,
            format: self.format,
            bins: self.bins,
            threshold: self.threshold,
            words: (!self.words.is_empty()).then_some(self.words),
        };
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        Ok(flags.or(file))
    }
}

fn emit(record: &RunRecord) -> Result<()> {
    let io_err = |e: io::Error| Error::Io(e.to_string());
    match &record.config.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            record.write_to(&mut w)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            record.write_to(&mut w)?;
            w.flush().map_err(io_err)
        }
    }
}

fn execute(cli: Cli) -> Result<RunRecord> {
    let (command, flags) = match cli.command {
        Cmd::Lsd(f) => (Command::Lsd, f),
        Cmd::M3(f) => (Command::M3, f),
        Cmd::TraceVerify(f) => (Command::TraceVerify, f),
        Cmd::Combinatorics(f) => (Command::Combinatorics, f),
        Cmd::Joint(f) => (Command::Joint, f),
    };
    let config = ExperimentConfig::resolve(command, flags.overrides()?)?;
    let record = experiment::run(config)?;
    emit(&record)?;
    Ok(record)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(record) => {
            eprintln!(
                "{} {}: {} rows in {:.2}s",
                record.tool,
                record.config.command,
                record.rows.len(),
                record.wall_time_s
            );
            for row in record.failures() {
                eprintln!(
                    "FAIL {} {} n={} {}: estimate {} target {:?} threshold {:?}",
                    row.metric,
                    row.kind.as_deref().unwrap_or("-"),
                    row.n.map_or("-".to_string(), |n| n.to_string()),
                    row.key,
                    row.estimate,
                    row.target,
                    row.threshold
                );
            }
            ExitCode::from(experiment::exit_code_for_record(&record) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiment::exit_code_for_error(&e) as u8)
        }
    }
}
