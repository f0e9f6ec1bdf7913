//! File formats, reports and commands behind the `dissipate` binary.

pub mod commands;
pub mod dot;
pub mod formats;
pub mod report;

use clap::Parser;

pub use commands::{execute, Cli, CliError, Command, Output};

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code with the text for stdout and stderr.
pub fn run_from<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                (0, text, String::new())
            } else {
                (code, String::new(), text)
            };
        }
    };
    match execute(&cli) {
        Ok(out) => (0, out.render(cli.json), String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}
