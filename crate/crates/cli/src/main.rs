use std::io::Write;
use std::panic;
use std::process::ExitCode;

use kwitness_cli::commands::{configure_threads, run, EXIT_FAIL, EXIT_USAGE};

fn main() -> ExitCode {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    // An internal panic is reported as a failure, never as an unlisted exit code.
    let code = panic::catch_unwind(|| {
        let stdout = std::io::stdout();
        let stderr = std::io::stderr();
        let (mut out, mut err) = (stdout.lock(), stderr.lock());
        let code = run(std::env::args_os(), &mut out, &mut err);
        let _ = out.flush();
        code
    })
    .unwrap_or(EXIT_FAIL);
    ExitCode::from(code as u8)
}
