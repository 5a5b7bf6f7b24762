use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let depth = std::env::var(adelic_cli::MAX_DEPTH_VAR).ok();
    let inv = adelic_cli::run(std::env::args_os(), depth.as_deref());
    let _ = std::io::stdout().write_all(inv.stdout.as_bytes());
    let _ = std::io::stderr().write_all(inv.stderr.as_bytes());
    ExitCode::from(inv.code as u8)
}
