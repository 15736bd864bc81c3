use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut out = io::stdout();
    let mut err = io::stderr();
    let exit = reqverify_cli::run_args(std::env::args_os(), &mut reqverify_cli::Io { out: &mut out, err: &mut err });
    ExitCode::from(exit.code())
}
