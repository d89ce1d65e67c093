use std::process::ExitCode;

use clap::Parser;
use subdata::cli::{expand_config, run, Cli};

fn init_threads() {
    let Ok(v) = std::env::var("SUBDATA_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size the worker pool: {e}");
            }
        }
        _ => log::warn!("ignoring SUBDATA_THREADS={v:?}: expected a positive integer"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();

    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // Help and version exit 0 here; other parse errors exit 2.
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    let cfg = match cli.into_run_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            for p in &report.written {
                println!("wrote {}", p.display());
            }
            if report.failures > 0 {
                eprintln!("{} of {} runs failed and were excluded", report.failures, report.failures + report.records);
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
