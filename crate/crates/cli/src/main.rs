use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ddae_cli::analysis::{self, Settings};
use ddae_cli::file::parse_system;
use ddae_cli::{CliError, EXIT_INPUT, EXIT_IRREGULAR, EXIT_OK};
use ddae_core::polyalg::Rat;
use ddae_core::spectral::Region;
use ddae_core::system::DdaeSystem;
use serde::Serialize;

/// Analyze linear delay differential-algebraic systems E x'(t) = A x(t) + B x(t−τ) + f(t).
#[derive(Parser)]
#[command(name = "ddae", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Leave the timestamp out of reports so identical inputs give identical output.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Args, Clone)]
struct RegionArgs {
    #[arg(long, allow_hyphen_values = true)]
    re_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    re_max: Option<f64>,
    #[arg(long)]
    im_max: Option<f64>,
    /// Root certification tolerance (relative to the size of the terms).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: regularity, condensed form, spectrum, stability, block form, verification.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Condensed form and solvability classification.
    Condense { file: PathBuf },
    /// Roots of the characteristic quasipolynomial in a box, as CSV.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        region: RegionArgs,
        /// Also write the full spectrum report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Block-diagonal form of a commutative triple.
    Decompose { file: PathBuf },
    /// Sample the solution and write it as CSV.
    Solve {
        file: PathBuf,
        /// End of the time window (rational), defaults to the file's horizon.
        #[arg(long)]
        until: Option<String>,
        /// Distance between samples, defaults to τ/20.
        #[arg(long)]
        sample_step: Option<f64>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Residual check and decay envelope of the computed solution.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

fn region(file_region: Option<Region>, args: &RegionArgs) -> Result<Region, CliError> {
    let base = file_region.unwrap_or_default();
    let r = Region {
        re_min: args.re_min.unwrap_or(base.re_min),
        re_max: args.re_max.unwrap_or(base.re_max),
        im_max: args.im_max.unwrap_or(base.im_max),
    };
    r.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(r)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Exits with the irregular code, after printing the condensed summary, when
/// the system has no unique solution.
fn require_regular(sys: &DdaeSystem) -> Result<(), CliError> {
    let report = analysis::condensed(sys)?;
    if report.condensed.verdict.regular {
        return Ok(());
    }
    print_json(&report)?;
    Err(CliError::Core(ddae_core::DdaeError::Irregular(report.status)))
}

fn write_trajectory(sys: &DdaeSystem, until: &Rat, step: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let solved = analysis::solve(sys, until)?;
    let x = solved.trajectory();
    let end = until.to_f64();
    if !(step > 0.0) {
        return Err(CliError::Input("--sample-step must be positive".into()));
    }
    let header: Vec<String> = (1..=sys.n()).map(|i| format!("x_{i}")).collect();
    writeln!(out, "t,{}", header.join(","))?;
    let count = (end / step + 1e-9).floor() as usize;
    for i in 0..=count {
        let t = (i as f64 * step).min(end);
        let v = x.eval(t)?;
        let cells: Vec<String> = v.iter().map(|c| format!("{c:.12e}")).collect();
        writeln!(out, "{t:.12e},{}", cells.join(","))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let timestamp = !cli.no_timestamp;
    match cli.command {
        Command::Analyze { file, region: args, samples } => {
            let (spec, sys) = parse_system(&file)?;
            let settings = Settings { region: region(spec.region, &args)?, tol: args.tol, samples, timestamp };
            let (report, irregular) = analysis::analyze(&sys, &settings)?;
            print_json(&report)?;
            if irregular {
                eprintln!("{}", report.status);
                return Ok(EXIT_IRREGULAR);
            }
        }
        Command::Condense { file } => {
            let (_, sys) = parse_system(&file)?;
            let report = analysis::condensed(&sys)?;
            print_json(&report)?;
            if !report.condensed.verdict.regular {
                eprintln!("{}", report.status);
                return Ok(EXIT_IRREGULAR);
            }
        }
        Command::Spectrum { file, region: args, json } => {
            let (spec, sys) = parse_system(&file)?;
            require_regular(&sys)?;
            let rep = analysis::spectrum(&sys, region(spec.region, &args)?, args.tol)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&rep).map_err(std::io::Error::from)? + "\n")?;
            }
            print!("{}", rep.to_csv());
        }
        Command::Decompose { file } => {
            let (_, sys) = parse_system(&file)?;
            require_regular(&sys)?;
            match analysis::decomposition(&sys)? {
                Some((_, report)) => print_json(&report)?,
                None => return Err(CliError::Unsupported("the triple is not commutative".into())),
            }
        }
        Command::Solve { file, until, sample_step, csv } => {
            let (_, sys) = parse_system(&file)?;
            require_regular(&sys)?;
            let until = match until {
                Some(s) => s.parse::<Rat>().map_err(|e| CliError::Input(format!("--until: {e}")))?,
                None => sys.horizon.clone(),
            };
            if !until.is_positive() {
                return Err(CliError::Input("--until must be positive".into()));
            }
            let step = sample_step.unwrap_or(sys.tau.to_f64() / 20.0);
            match csv {
                Some(path) => write_to(&path, |out| write_trajectory(&sys, &until, step, out))?,
                None => write_trajectory(&sys, &until, step, &mut std::io::stdout().lock())?,
            }
        }
        Command::Verify { file, samples } => {
            let (_, sys) = parse_system(&file)?;
            require_regular(&sys)?;
            let v = analysis::verification(&sys, samples)?;
            print_json(&v)?;
        }
    }
    Ok(EXIT_OK)
}

fn write_to(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            if !matches!(e, CliError::Core(ddae_core::DdaeError::Irregular(_))) {
                eprintln!("error: {e}");
            } else {
                eprintln!("{}", e.to_string().trim_start_matches("matrix triple is irregular: "));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
