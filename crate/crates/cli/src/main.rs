#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use config::{parse_config, Parsed, RunConfig, Subcommand};
use error::CliError;
use output::{render, write_to};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match real_main(&argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("atomcoh: {e}");
            if e.exit_code() == 1 {
                eprintln!("run `atomcoh --help` for usage");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn real_main(argv: &[String]) -> Result<(), CliError> {
    let file = match config::config_path(argv)? {
        Some(path) => Some(std::fs::read_to_string(&path).map_err(|e| CliError::io(path, e))?),
        None => None,
    };
    let config = match parse_config(argv, file.as_deref())? {
        Parsed::Help(text) => {
            print!("{text}");
            return Ok(());
        }
        Parsed::Run(c) => c,
    };
    if let Some(n) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let out = commands::run(&config)?;
    let generated = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let text = render(&config, &out, generated);
    emit(&config, &text)?;
    if config.subcommand == Subcommand::XSection {
        if let (Some(path), Some(summary)) = (&config.output, &out.summary) {
            let side = summary_path(path);
            let body = serde_json::to_string_pretty(summary).expect("summary serializes") + "\n";
            std::fs::write(&side, body).map_err(|e| CliError::io(side, e))?;
        }
    }
    if !out.failures.is_empty() {
        return Err(CliError::Numeric(atomcoh::Error::NotConverged {
            context: format!("{} point(s) failed: {}", out.failures.len(), out.failures.join("; ")),
            value: f64::NAN,
            error_estimate: f64::NAN,
        }));
    }
    Ok(())
}

fn summary_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            write_to(file, text).map_err(|e| CliError::io(path, e))
        }
        None => write_to(std::io::stdout().lock(), text).map_err(|e| CliError::io("<stdout>", e)),
    }
}
