//! Library half of the `gbc` command line: manifests, dispatch and reports.

pub mod args;
pub mod manifest;
pub mod ops;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use manifest::{parse_manifest, Manifest, Operation};
pub use report::{Record, RunReport};

/// Exit code for an invalid manifest or invalid flags.
pub const EXIT_INVALID: i32 = 2;

/// Caps the global thread pool at `GBC_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("GBC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("GBC_THREADS must be a positive integer, got {value:?}"))?;
    // A pool that already exists (e.g. in tests) is left as is.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses arguments, runs the command and writes the report; returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    let (op, common) = cli.command.split();
    let manifest = match common.to_manifest(op) {
        Ok(m) => m,
        Err(errs) => {
            for e in errs {
                eprintln!("error: {e}");
            }
            return EXIT_INVALID;
        }
    };
    let output = manifest.output.clone();
    log::info!("running {} with seed {}", op.as_str(), manifest.seed());
    let report = ops::run(manifest);
    log::info!(
        "{} records, {} failing, {:.2}s",
        report.records.len(),
        report.records.iter().filter(|r| !r.pass).count(),
        report.timing.elapsed_seconds
    );
    let written = match &output.path {
        Some(path) => std::fs::File::create(path).and_then(|mut f| {
            report.write(output.format, &mut f)?;
            f.flush()
        }),
        None => report.write(output.format, &mut std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return EXIT_INVALID;
    }
    for r in report.records.iter().filter(|r| !r.pass) {
        match &r.error {
            Some(e) => eprintln!("{}: error: {e}", r.name),
            None => eprintln!("{}: FAIL", r.name),
        }
    }
    report.exit_code()
}
