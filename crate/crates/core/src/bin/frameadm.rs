use std::io::Write;

fn main() {
    let outcome = frame_admissibility::cli::run(std::env::args_os());
    let mut stream: Box<dyn Write> = if outcome.code == frame_admissibility::cli::EXIT_INPUT { Box::new(std::io::stderr()) } else { Box::new(std::io::stdout()) };
    let _ = stream.write_all(outcome.output.as_bytes());
    std::process::exit(outcome.code);
}
