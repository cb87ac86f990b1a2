//! Command-line front end: argument grammar, result files and plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{execute, Outcome};
pub use config::RunConfig;
pub use error::CliError;
pub use grid::Grid;
pub use output::{config_echo, Cell, ResultTable};
pub use svg::emit_svg;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                // --help and --version
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match cfg.validate().and_then(|()| execute(&cfg)) {
        Ok(o) => {
            let files: Vec<String> = o.files.iter().map(|p| p.display().to_string()).collect();
            let _ = writeln!(out, "{} -> {}", o.summary, files.join(", "));
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
