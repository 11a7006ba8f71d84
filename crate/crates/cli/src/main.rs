use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = gdp_cli::Cli::parse();
    let result = gdp_cli::configure_threads().and_then(|()| gdp_cli::run(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(gdp_cli::exit_code(&err))
        }
    }
}
