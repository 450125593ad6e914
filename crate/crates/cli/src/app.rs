use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use qie_core::CouplingMode;

use crate::config::SweepConfig;
use crate::error::{CliError, Result};
use crate::figures::{self, FigureId};
use crate::simulate::{simulate, SimulateSettings};
use crate::sweep::run_sweep;
use crate::table::Format;
use crate::validate::{self, Level};

/// Caps the worker count; applied before `--threads`.
pub const THREADS_ENV: &str = "QIE_MAX_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "qie",
    version,
    about = "Work statistics of collective and independent qubit information engines",
    after_help = "Exit status: 0 success, 1 usage error, 2 validation failure, 3 numerical failure."
)]
pub struct Cli {
    /// Level spacing omega (hbar = 1). Figures always use omega = 1.
    #[arg(long, global = true)]
    pub omega: Option<f64>,

    /// Output file, or directory for `figure` [default: stdout, `figures/` for `figure`]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads [default: all cores, capped by QIE_MAX_THREADS]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Table format for sweep rows, figure data and per-cycle records
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a parameter grid described by a TOML file
    Sweep {
        /// Sweep configuration (TOML)
        config: PathBuf,
    },
    /// Regenerate figure data, plots and claim checks
    Figure {
        /// One or more of fig2, fig3a, fig3b, fig4, fig5, fig6
        #[arg(value_enum, required = true, num_args = 1..)]
        ids: Vec<FigureId>,
        /// Skip the SVG plots
        #[arg(long)]
        no_svg: bool,
    },
    /// Run the cross-validation matrix and write a JSON report
    Validate {
        #[arg(value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
    /// Monte Carlo cycles of the engine
    Simulate {
        /// Number of qubits
        #[arg(long, short)]
        n: u32,
        /// Inverse temperature (0 for the infinite-temperature limit)
        #[arg(long, short)]
        beta: f64,
        /// collective or independent
        #[arg(long, default_value = "collective", value_parser = parse_mode)]
        mode: CouplingMode,
        #[arg(long, default_value_t = 1_000_000)]
        cycles: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thermalize each cycle with the collective master equation for a finite time
        #[arg(long)]
        dynamical: bool,
        /// Thermalization time per cycle (with --dynamical)
        #[arg(long, default_value_t = 20.0)]
        t_therm: f64,
        /// Bath coupling rate (with --dynamical)
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Also write every cycle to this file
        #[arg(long)]
        cycles_out: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> std::result::Result<CouplingMode, String> {
    s.parse().map_err(|e: qie_core::Error| e.to_string())
}

/// Effective worker count: `min(requested or available, cap)`.
pub fn worker_count(requested: Option<usize>, cap: Option<&str>, available: usize) -> Result<usize> {
    let cap = match cap {
        None => None,
        Some(s) => match s.trim().parse::<usize>() {
            Ok(c) if c > 0 => Some(c),
            _ => return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{s}'"))),
        },
    };
    if requested == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let want = requested.unwrap_or(available).max(1);
    Ok(cap.map_or(want, |c| want.min(c)))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Sweep { config } => {
            let mut cfg = SweepConfig::load(config)?;
            if let Some(w) = cli.omega {
                if !(w.is_finite() && w > 0.0) {
                    return Err(CliError::Usage(format!("--omega must be positive, got {w}")));
                }
                cfg.omega = w;
            }
            let result = run_sweep(&cfg);
            let mut buf = Vec::new();
            result
                .table
                .write(&mut buf, cli.format)
                .map_err(|e| CliError::io("<buffer>", e))?;
            write_output(out, &String::from_utf8(buf).expect("utf-8 table"))?;
            if result.failures > 0 {
                return Err(CliError::Numerical(format!(
                    "{} of {} rows failed; see the status column",
                    result.failures,
                    result.table.rows.len()
                )));
            }
            Ok(())
        }
        Command::Figure { ids, no_svg } => {
            if cli.omega.is_some_and(|w| w != 1.0) {
                return Err(CliError::Usage("figure grids fix omega = 1".into()));
            }
            let dir = out.map_or_else(|| PathBuf::from("figures"), Path::to_path_buf);
            let mut failed = Vec::new();
            for id in ids {
                let fig = figures::build(*id)?;
                figures::write(&fig, &dir, cli.format, !no_svg)?;
                for c in &fig.claims {
                    eprintln!("{} {id} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    if !c.passed {
                        failed.push(format!("{id}:{}", c.name));
                    }
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(format!("figure claims failed: {}", failed.join(", "))))
            }
        }
        Command::Validate { level } => {
            let report = validate::run(*level);
            for c in &report.checks {
                eprintln!(
                    "{} {} (worst {:e}, tolerance {:e}, {:.2}s)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst_discrepancy,
                    c.tolerance,
                    c.elapsed_seconds
                );
            }
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            write_output(out, &text)?;
            if report.passed {
                Ok(())
            } else {
                let failing: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{} [{}]", c.name, c.failing_ids().join(", ")))
                    .collect();
                Err(CliError::Validation(failing.join("; ")))
            }
        }
        Command::Simulate {
            n,
            beta,
            mode,
            cycles,
            seed,
            dynamical,
            t_therm,
            gamma,
            cycles_out,
        } => {
            let settings = SimulateSettings {
                n: *n,
                beta: *beta,
                omega: cli.omega.unwrap_or(1.0),
                mode: *mode,
                cycles: *cycles,
                seed: *seed,
                thermalization_time: dynamical.then_some(*t_therm),
                gamma: *gamma,
                record_cycles: cycles_out.is_some(),
            };
            let result = simulate(&settings)?;
            write_output(out, &result.text)?;
            if let (Some(path), Some(table)) = (cycles_out, result.records) {
                table.write_file(path, cli.format)?;
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cap = std::env::var(THREADS_ENV).ok();
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let outcome = worker_count(cli.threads, cap.as_deref(), available).and_then(|k| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {k} workers: {e}")))?;
        pool.install(|| execute(&cli))
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qie: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_cap_wins_over_threads_flag() {
        assert_eq!(worker_count(Some(8), Some("2"), 16).unwrap(), 2);
        assert_eq!(worker_count(Some(3), Some("8"), 16).unwrap(), 3);
        assert_eq!(worker_count(None, None, 6).unwrap(), 6);
        assert_eq!(worker_count(None, Some("4"), 6).unwrap(), 4);
        assert!(worker_count(None, Some("zero"), 6).is_err());
        assert!(worker_count(Some(0), None, 6).is_err());
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run(["qie", "figure", "fig9"]), 1);
        assert_eq!(run(["qie", "bogus"]), 1);
        assert_eq!(run(["qie", "--help"]), 0);
    }
}
