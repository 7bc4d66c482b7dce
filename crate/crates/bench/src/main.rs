use std::process::ExitCode;

use trunc_regress_bench::{parse_config, run_experiment, ConfigError};

fn main() -> ExitCode {
    let config = match parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(ConfigError::Cli(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("run with --help for usage");
            return ExitCode::from(2);
        }
    };
    match run_experiment(&config) {
        Ok((_, summary, files)) => {
            print!(
                "{}",
                trunc_regress_bench::output::summary_markdown(&summary)
            );
            if summary.failed > 0 {
                eprintln!(
                    "warning: {} repetitions failed, see {}",
                    summary.failed,
                    files.records.display()
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
