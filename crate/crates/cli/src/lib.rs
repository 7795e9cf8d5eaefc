//! Command-line front end: solve, convert, verify, generate and render.
//!
//! Exit codes: 0 success, 1 invalid input, 2 no inscription found,
//! 3 loop sampling too coarse.

pub mod args;
pub mod commands;
pub mod quadspec;
pub mod render;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_NONE_FOUND: u8 = 2;
pub const EXIT_RESOLUTION: u8 = 3;

/// Parses `argv` and runs the selected subcommand.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => commands::dispatch(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = write!(err, "{}", e.render());
            code
        }
    }
}
