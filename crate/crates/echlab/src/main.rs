use std::io::Write;
use std::process::ExitCode;

use echlab::RunError;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    match echlab::run(&argv) {
        Ok(run) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(run.render().as_bytes());
            let _ = stdout.flush();
            eprint!("{}", run.bundle.summary());
            ExitCode::from(run.exit_code() as u8)
        }
        Err(RunError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
