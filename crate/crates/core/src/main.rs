use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mlaf::io::config::RunConfig;
use mlaf::run::{self, RunError, SweepAxis};
use mlaf::spectral::Faults;
use mlaf::verify::{run_verify, VerifyParams};

const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

#[derive(Parser)]
#[command(name = "mlaf", version, about = "Modified Leray-alpha pseudo-spectral solver and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration to t_end, writing CSV, checkpoint and report.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Continue from a checkpoint written by a run of the same configuration.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run the property suite and print a pass/fail table.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// One run per value of an axis plus sweep_summary.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        values: Vec<f64>,
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-render report.json from the CSV files of an existing run.
    Report {
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    NoDealias,
    NoProjection,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Alpha,
    Amplitude,
}

fn load(path: &std::path::Path, outdir: Option<PathBuf>, seed: Option<u64>) -> Result<RunConfig, RunError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(o) = outdir {
        cfg.paths.outdir = o;
    }
    if let Some(s) = seed {
        cfg.forcing.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() {
    let Ok(v) = std::env::var("MLAF_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: MLAF_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: MLAF_THREADS must be a positive integer, got {v:?}"),
    }
}

fn execute(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.command {
        Command::Simulate {
            config,
            outdir,
            seed,
            resume,
        } => {
            let cfg = load(&config, outdir, seed)?;
            let out = run::simulate(&cfg, resume.as_deref())?;
            println!(
                "{} steps, dt = {:.4e}, t = {:.6}; Re = {:.4e}, Gr = {:.4e}; output in {}",
                out.steps,
                out.dt,
                out.state.t,
                out.report.bounds.re,
                out.report.gr,
                cfg.paths.outdir.display()
            );
            for l in &out.report.ladder {
                println!(
                    "ladder N={}: pass fraction {:.4} at C_ref = {}, fitted C = {:.4e}",
                    l.n, l.pass_fraction, l.c_ref, l.fitted
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            config,
            seed,
            inject_fault,
        } => {
            let mut cfg = match &config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::from_toml(DEFAULT_CONFIG)?,
            };
            if let Some(s) = seed {
                cfg.forcing.seed = s;
            }
            cfg.validate()?;
            let faults = Faults {
                skip_dealias: matches!(inject_fault, Some(Fault::NoDealias)),
                skip_projection: matches!(inject_fault, Some(Fault::NoProjection)),
            };
            let suite = run_verify(&VerifyParams::from_config(&cfg), faults);
            print!("{}", suite.table());
            if suite.all_pass() {
                println!("all {} checks passed", suite.checks.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAILED: {}", suite.failures().join("; "));
                Ok(ExitCode::from(1))
            }
        }
        Command::Sweep {
            config,
            axis,
            values,
            outdir,
            seed,
        } => {
            let cfg = load(&config, outdir, seed)?;
            let axis = match axis {
                Axis::Alpha => SweepAxis::Alpha,
                Axis::Amplitude => SweepAxis::Amplitude,
            };
            let rows = run::sweep(&cfg, axis, &values)?;
            for r in &rows {
                println!(
                    "{} = {}: Re = {:.4e}, Gr = {:.4e}{}",
                    axis.as_str(),
                    r.value,
                    r.report.bounds.re,
                    r.report.gr,
                    r.rel_diff.map_or(String::new(), |d| format!(", |u - u0|/|u0| = {d:.4e}"))
                );
            }
            println!("summary in {}", cfg.paths.outdir.join(run::SWEEP_SUMMARY).display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { outdir, config } => {
            let cfg = match config {
                Some(p) => Some(load(&p, Some(outdir.clone()), None)?),
                None => None,
            };
            let rep = run::report(&outdir, cfg.as_ref())?;
            println!(
                "report written to {} (Re = {:.4e}, {} ladder orders)",
                outdir.join(run::REPORT_FILE).display(),
                rep.bounds.re,
                rep.ladder.len()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
