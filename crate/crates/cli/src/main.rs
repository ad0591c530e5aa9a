mod args;
mod commands;

use std::panic;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

const EXIT_INTERNAL: u8 = 1;
const EXIT_USER: u8 = 2;

fn run_in_pool(cli: &Cli) -> rle_core::Result<()> {
    #[cfg(feature = "parallel")]
    {
        let workers = cli.command.options().workers.max(1);
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => return pool.install(|| commands::run(&cli.command)),
            Err(e) => log::warn!("could not start a {workers}-thread pool ({e}); using the global pool"),
        }
    }
    commands::run(&cli.command)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RLE_LOG", "warn")).init();

    let args = match args::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USER);
        }
    };
    let cli = Cli::parse_from(args);

    match panic::catch_unwind(|| run_in_pool(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USER)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
