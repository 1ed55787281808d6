use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = qr3::cli::dispatch(std::env::args_os());
    if let Some(msg) = &outcome.error {
        eprintln!("{}", msg.trim_end());
    }
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(outcome.stdout().as_bytes());
    ExitCode::from(outcome.exit_code as u8)
}
