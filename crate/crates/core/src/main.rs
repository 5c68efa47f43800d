use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use slpgrep::stats::{Percentiles, SearchStats};
use slpgrep::{
    collect_stats, compile, compress, compression_report, count_stream, read_slp,
    report_matching_lines_with, write_slp, CompressError, FormatError, PatternError, ReportError,
    SlpError, SlpReader,
};

/// Regular-expression line search over grammar-compressed (ZSLP) files.
#[derive(Parser)]
#[command(name = "slpgrep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress bytes into a ZSLP grammar.
    Compress {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Expand a ZSLP grammar back into bytes.
    Decompress {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the number of lines containing a match.
    Count {
        #[arg(short = 'e', long = "regexp")]
        pattern: String,
        input: Option<PathBuf>,
    },
    /// Print the lines containing a match.
    Search {
        #[arg(short = 'e', long = "regexp")]
        pattern: String,
        input: Option<PathBuf>,
        #[arg(long, hide = true)]
        no_prune: bool,
    },
    /// Print per-rule and per-axiom-symbol operation counts.
    Stats {
        #[arg(short = 'e', long = "regexp")]
        pattern: String,
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Pattern(#[from] PatternError),
    #[error("format error: {0}")]
    Format(#[from] FormatError),
    #[error("compression error: {0}")]
    Compress(#[from] CompressError),
    #[error("invalid grammar: {0}")]
    Slp(#[from] SlpError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<ReportError> for CliError {
    fn from(err: ReportError) -> Self {
        match err {
            ReportError::Slp(e) => CliError::Slp(e),
            ReportError::Io(e) => CliError::Io(e),
        }
    }
}

enum Outcome {
    Done,
    Matched(bool),
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done | Outcome::Matched(true)) => ExitCode::SUCCESS,
        Ok(Outcome::Matched(false)) => ExitCode::from(1),
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Format(FormatError::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("slpgrep: {e}");
            ExitCode::from(2)
        }
    }
}

fn open_input(path: Option<&Path>) -> io::Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufReader::new(File::open(p)?)),
        _ => Box::new(io::stdin().lock()),
    })
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Compress { input, output } => {
            let mut text = Vec::new();
            open_input(input.as_deref())?.read_to_end(&mut text)?;
            let slp = compress(&text)?;
            let mut out = open_output(output.as_deref())?;
            write_slp(&slp, &mut out)?;
            out.flush()?;
            let r = compression_report(&slp, text.len())?;
            eprintln!(
                "rules {} axiom {} original {} B encoded {} B ratio {:.3}",
                r.rules, r.axiom_len, r.original_len, r.encoded_len, r.ratio
            );
            Ok(Outcome::Done)
        }
        Command::Decompress { input, output } => {
            let slp = read_slp(open_input(input.as_deref())?)?;
            let mut out = open_output(output.as_deref())?;
            let mut chunk = Vec::new();
            for &sym in &slp.axiom {
                chunk.clear();
                slp.expand_into(sym, &mut chunk)?;
                out.write_all(&chunk)?;
            }
            out.flush()?;
            Ok(Outcome::Done)
        }
        Command::Count { pattern, input } => {
            let fsa = compile(&pattern)?;
            let reader = SlpReader::new(open_input(input.as_deref())?)?;
            let n = count_stream(reader, &fsa)?;
            let mut out = io::stdout().lock();
            writeln!(out, "{n}")?;
            Ok(Outcome::Matched(n > 0))
        }
        Command::Search {
            pattern,
            input,
            no_prune,
        } => {
            let fsa = compile(&pattern)?;
            let slp = read_slp(open_input(input.as_deref())?)?;
            let out = BufWriter::new(io::stdout().lock());
            let n = report_matching_lines_with(&slp, &fsa, out, !no_prune)?;
            Ok(Outcome::Matched(n > 0))
        }
        Command::Stats {
            pattern,
            input,
            json,
        } => {
            let fsa = compile(&pattern)?;
            let slp = read_slp(open_input(input.as_deref())?)?;
            let stats = collect_stats(&slp, &fsa)?;
            let mut out = io::stdout().lock();
            if json {
                serde_json::to_writer_pretty(&mut out, &stats).map_err(io::Error::from)?;
                writeln!(out)?;
            } else {
                print_table(&mut out, &stats)?;
            }
            Ok(Outcome::Done)
        }
    }
}

fn print_table(out: &mut impl Write, stats: &SearchStats) -> io::Result<()> {
    writeln!(out, "states        {}", stats.s)?;
    writeln!(out, "rules         {}", stats.p)?;
    writeln!(out, "axiom length  {}", stats.axiom_len)?;
    writeln!(out, "deterministic {}", stats.deterministic)?;
    writeln!(
        out,
        "{:<14}{:>10}{:>10}{:>10}{:>10}{:>10}",
        "", "50%", "75%", "95%", "98%", "100%"
    )?;
    let row = |out: &mut dyn Write, name: &str, p: &Percentiles| {
        writeln!(
            out,
            "{:<14}{:>10}{:>10}{:>10}{:>10}{:>10}",
            name, p.p50, p.p75, p.p95, p.p98, p.p100
        )
    };
    row(out, "per rule", &stats.rule_percentiles)?;
    row(out, "per axiom sym", &stats.axiom_percentiles)?;
    writeln!(out, "s^3           {}", stats.s_cubed())?;
    writeln!(out, "s^2           {}", stats.s_squared())?;
    writeln!(
        out,
        "operations    {} (cost sum {})",
        stats.measured_operations,
        stats.rule_bound_total() + stats.axiom_bound_total()
    )
}
