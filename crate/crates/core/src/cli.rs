//! Command-line driver. Exit codes: 0 success, 1 verification failure,
//! 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::complex::{build_complex, QuotientComplex};
use crate::cone::ConePoint;
use crate::error::Result;
use crate::geodesic::{ConeSpace, DistanceOptions};
use crate::topology::Surface;
use crate::verify::{run_verify, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "modcone", version, about = "Sup-metric cone over the curve complex modulo the mapping class group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the orbicomplex of multicurve types.
    Complex {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_enum, default_value_t = ComplexFormat::Json)]
        format: ComplexFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance between two cone points given as JSON files.
    Dist {
        complex: PathBuf,
        p: PathBuf,
        q: PathBuf,
        /// Extra chart revisits allowed in the gallery search.
        #[arg(long, default_value_t = 0)]
        max_revisits: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suites and print a JSON report.
    Verify {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon0: f64,
        #[arg(long, default_value_t = 0.05)]
        mesh: f64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(short = 'g', long)]
    pub genus: u32,
    #[arg(short = 'n', long, default_value_t = 0)]
    pub marked: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComplexFormat {
    Json,
    Dot,
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Table,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli, argv: Vec<String>) -> i32 {
    match execute(cli, argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<i32> {
    match cli.command {
        Command::Complex {
            surface,
            format,
            out,
        } => {
            let complex = build_complex(Surface::new(surface.genus, surface.marked)?)?;
            let text = match format {
                ComplexFormat::Json => complex.to_json()?,
                ComplexFormat::Dot => complex.to_dot(),
                ComplexFormat::Summary => complex.summary(),
            };
            emit(&text, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Dist {
            complex,
            p,
            q,
            max_revisits,
            out,
        } => {
            let complex = QuotientComplex::from_json(&fs::read_to_string(complex)?)?;
            let p: ConePoint = serde_json::from_str(&fs::read_to_string(p)?)?;
            let q: ConePoint = serde_json::from_str(&fs::read_to_string(q)?)?;
            let space = ConeSpace::new(complex);
            let opts = DistanceOptions {
                max_revisits,
                ..DistanceOptions::default()
            };
            let result = space.distance_with(&p, &q, opts)?;
            emit(&serde_json::to_string_pretty(&result)?, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            surface,
            seed,
            samples,
            epsilon0,
            mesh,
            format,
            out,
        } => {
            let cfg = VerifyConfig {
                genus: surface.genus,
                marked: surface.marked,
                seed,
                samples,
                epsilon0,
                mesh,
            };
            let report = run_verify(&cfg, argv)?;
            let text = match format {
                ReportFormat::Json => serde_json::to_string_pretty(&report)?,
                ReportFormat::Table => report.table(),
            };
            emit(&text, out.as_deref())?;
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

/// Parses `argv` and runs it. Parse failures print clap's message and
/// return 2 (0 for `--help` and `--version`).
pub fn main_with_args(argv: Vec<String>) -> i32 {
    match Cli::try_parse_from(&argv) {
        Ok(cli) => run(cli, argv),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
