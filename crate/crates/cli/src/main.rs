//! Command-line front end: run the verification pipeline on one branch
//! datum, sweep all data within bounds, or run the seeded property suite.
//!
//! Reports go to stdout and are byte-identical across runs with the same
//! configuration and seed; timings go to stderr.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input,
//! 3 internal guard tripped.

use clap::{Parser, ValueEnum};
use cyclic_sections::orbifold::BranchData;
use cyclic_sections::report::{
    emit_json_line, emit_text, run, Mode, OutputFormat, Report, RunConfig, RunError, RunOutcome,
    SweepBounds,
};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Single,
    Sweep,
    Proptest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    JsonLines,
}

#[derive(Parser, Debug)]
#[command(
    name = "cyclic-sections",
    about = "Exact verification of section classes and lifting obstructions for prime-order actions on surface groups"
)]
struct Args {
    /// What to run: one datum, a sweep over bounds, or the property suite
    #[arg(long, value_enum)]
    mode: ModeArg,

    /// Prime order of the acting group (single mode)
    #[arg(long)]
    p: Option<u64>,

    /// Genus of the quotient surface (single mode)
    #[arg(long)]
    h: Option<usize>,

    /// Comma-separated local monodromies, residues in 1..p (single mode)
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    monodromies: Option<Vec<u64>>,

    /// Comma-separated handle images, 2h residues mod p (single mode)
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    handles: Option<Vec<u64>>,

    /// Largest prime in the sweep
    #[arg(long)]
    max_p: Option<u64>,

    /// Largest quotient genus in the sweep
    #[arg(long)]
    max_h: Option<usize>,

    /// Largest number of branch points in the sweep
    #[arg(long)]
    max_n: Option<usize>,

    /// Seed for randomized property checks
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output format for reports
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Stop a sweep at the first failing datum
    #[arg(long)]
    fail_fast: bool,
}

fn config_from(args: &Args) -> Result<RunConfig, RunError> {
    let (mode, datum, sweep_bounds) = match args.mode {
        ModeArg::Single => {
            let p = args
                .p
                .ok_or_else(|| RunError::BadConfig("single mode requires --p".into()))?;
            let h = args
                .h
                .ok_or_else(|| RunError::BadConfig("single mode requires --h".into()))?;
            let monodromies = args.monodromies.clone().unwrap_or_default();
            let handles = args.handles.clone().unwrap_or_else(|| vec![0; 2 * h]);
            let datum = BranchData::new(p, h, monodromies, handles)?;
            (Mode::Single, Some(datum), None)
        }
        ModeArg::Sweep => {
            let bounds = SweepBounds {
                max_p: args
                    .max_p
                    .ok_or_else(|| RunError::BadConfig("sweep mode requires --max-p".into()))?,
                max_h: args
                    .max_h
                    .ok_or_else(|| RunError::BadConfig("sweep mode requires --max-h".into()))?,
                max_n: args
                    .max_n
                    .ok_or_else(|| RunError::BadConfig("sweep mode requires --max-n".into()))?,
            };
            (Mode::Sweep, None, Some(bounds))
        }
        ModeArg::Proptest => (Mode::Proptest, None, None),
    };
    Ok(RunConfig {
        mode,
        datum,
        sweep_bounds,
        seed: args.seed,
        output_format: match args.format {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::JsonLines => OutputFormat::JsonLines,
        },
        fail_fast: args.fail_fast,
    })
}

fn emit(report: &Report, format: OutputFormat) {
    match format {
        OutputFormat::Text => print!("{}", emit_text(report)),
        OutputFormat::JsonLines => println!("{}", emit_json_line(report)),
    }
}

fn exit_code_for(err: &RunError) -> ExitCode {
    match err {
        RunError::GuardExceeded(_) => ExitCode::from(3),
        RunError::Branch(_) | RunError::BadConfig(_) => ExitCode::from(2),
        RunError::Pipeline(p) => match p {
            cyclic_sections::orbifold::PipelineError::Branch(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        },
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config_from(&args) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("error: {err}");
            return exit_code_for(&err);
        }
    };
    let start = Instant::now();
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(err) => {
            eprintln!("error: {err}");
            return exit_code_for(&err);
        }
    };
    match &outcome {
        RunOutcome::Single(report) => {
            emit(report, config.output_format);
            eprintln!("timing: single datum -> {} ms", start.elapsed().as_millis());
        }
        RunOutcome::Sweep(sweep) => {
            for report in &sweep.reports {
                emit(report, config.output_format);
            }
            let passed = sweep.reports.iter().filter(|r| r.all_pass()).count();
            eprintln!(
                "timing: sweep of {} data -> {} ms",
                sweep.reports.len(),
                start.elapsed().as_millis()
            );
            eprintln!("sweep summary: {}/{} data pass", passed, sweep.reports.len());
        }
        RunOutcome::Properties(checks) => {
            for r in checks {
                println!(
                    "{} {} ({} cases)",
                    if r.pass { "pass" } else { "FAIL" },
                    r.name,
                    r.cases
                );
            }
            eprintln!("timing: property suite -> {} ms", start.elapsed().as_millis());
        }
    }
    if outcome.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
