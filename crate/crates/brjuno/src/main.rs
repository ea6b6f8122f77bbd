use std::io::{self, BufReader};
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdin = Box::new(BufReader::new(io::stdin()));
    let code = brjuno::cli::run(std::env::args_os(), stdin, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
