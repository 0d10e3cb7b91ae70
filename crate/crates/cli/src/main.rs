use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = realrad::run(std::env::args_os());
    // A closed pipe on stdout is not an error of the computation.
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.stdout.as_bytes());
    if !out.stdout.ends_with('\n') {
        let _ = stdout.write_all(b"\n");
    }
    let _ = stdout.flush();
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
