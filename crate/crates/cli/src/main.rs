use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use njk_cli::{catalog_document, entry_dsl, parse_document, run_document, to_dsl, RunReport};
use njk_symexpr::{ModePreference, VerifyConfig};

/// Exact verification of Nijenhuis, algebroid and groupoid identities.
#[derive(Parser)]
#[command(name = "njk", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the tasks of a definition file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Verify a catalog entry (`name` or `name:param`).
    Catalog {
        /// Entry name; omit with --list.
        name: Option<String>,
        /// List the entry names.
        #[arg(long)]
        list: bool,
        /// Print the entry as a definition file instead of running it.
        #[arg(long)]
        dsl: bool,
        #[command(flatten)]
        flags: Flags,
    },
    /// Parse a definition file and print it in normal form.
    Parse { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sample,
    Auto,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ReportKind {
    Text,
    Machine,
    Both,
}

#[derive(Args)]
struct Flags {
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    /// Sample points per identity.
    #[arg(long, default_value_t = 25)]
    samples: usize,
    /// Sampling tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sampling seed; falls back to NJK_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Working precision in bits for transcendental evaluation.
    #[arg(long, default_value_t = 128)]
    precision: u32,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportKind,
    /// Write the machine report to this file; standard output then gets
    /// only the text report, if requested.
    #[arg(long)]
    output: Option<PathBuf>,
}

const INPUT_ERROR: u8 = 2;

fn config(f: &Flags) -> Result<VerifyConfig, String> {
    let seed = match f.seed {
        Some(s) => s,
        None => match std::env::var("NJK_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| format!("NJK_SEED=`{v}` is not an unsigned integer"))?,
            Err(_) => 0,
        },
    };
    if f.samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    if !(f.tol.is_finite() && f.tol > 0.0) {
        return Err("--tol must be a positive number".into());
    }
    if f.precision < 16 {
        return Err("--precision must be at least 16 bits".into());
    }
    let mode = match f.mode {
        Mode::Exact => ModePreference::Exact,
        Mode::Sample => ModePreference::Sample,
        Mode::Auto => ModePreference::Auto,
    };
    Ok(VerifyConfig { mode, samples: f.samples, tol: f.tol, seed, precision: f.precision })
}

fn emit(rep: &RunReport, f: &Flags) -> Result<(), String> {
    if matches!(f.report, ReportKind::Text | ReportKind::Both) {
        print!("{}", rep.text());
    }
    // --output always receives the machine report, whatever --report says
    if let Some(p) = &f.output {
        std::fs::write(p, rep.machine()).map_err(|e| format!("{}: {e}", p.display()))?;
    } else if matches!(f.report, ReportKind::Machine | ReportKind::Both) {
        if f.report == ReportKind::Both {
            println!();
        }
        print!("{}", rep.machine());
    }
    Ok(())
}

fn read(path: &PathBuf) -> Result<njk_cli::Document, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_document(&src).map_err(|e| format!("{}:{e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run { file, flags } => config(flags).and_then(|cfg| {
            let doc = read(file)?;
            let rep = run_document(&doc, &cfg, &file.display().to_string());
            emit(&rep, flags)?;
            Ok(rep.exit_code() as u8)
        }),
        Cmd::Catalog { name, list, dsl, flags } => {
            if *list {
                for n in njk_catalog::NAMES {
                    println!("{n}");
                }
                Ok(0)
            } else {
                match name {
                    None => Err("a catalog name is required (see --list)".into()),
                    Some(name) => config(flags).and_then(|cfg| {
                        let e = njk_catalog::lookup(name).map_err(|e| e.to_string())?;
                        if *dsl {
                            print!("{}", entry_dsl(&e).map_err(|e| e.to_string())?);
                            return Ok(0);
                        }
                        let rep = run_document(&catalog_document(name), &cfg, &format!("catalog {name}"));
                        emit(&rep, flags)?;
                        Ok(rep.exit_code() as u8)
                    }),
                }
            }
        }
        Cmd::Parse { file } => read(file).and_then(|doc| {
            print!("{}", to_dsl(&doc).map_err(|e| e.to_string())?);
            Ok(0)
        }),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("njk: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
