use std::io::Write;

fn main() {
    let outcome = market_concentration::cli::run_from(std::env::args_os());
    // Write errors (e.g. a closed pipe) are ignored; the exit code still reports the run.
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    if !outcome.stdout.is_empty() && !outcome.stdout.ends_with('\n') {
        let _ = stdout.write_all(b"\n");
    }
    let _ = stdout.flush();
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
