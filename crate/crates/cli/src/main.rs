use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = basstune_cli::run(std::env::args_os(), basstune_cli::config_from_env());
    let mut code = outcome.code;
    if !outcome.stdout.is_empty() && std::io::stdout().lock().write_all(outcome.stdout.as_bytes()).is_err() {
        code = basstune_cli::error::EXIT_INTERNAL;
    }
    if !outcome.stderr.is_empty() {
        let _ = std::io::stderr().lock().write_all(outcome.stderr.as_bytes());
    }
    ExitCode::from(code as u8)
}
