use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("KAPPA_NC_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: KAPPA_NC_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    let cli = kappa_cli::Cli::parse();
    ExitCode::from(kappa_cli::run(cli))
}
