use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let cli = match detkit::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; exit code 2 is reserved for budgets
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };
    std::process::exit(detkit::cli::main_with(cli));
}
