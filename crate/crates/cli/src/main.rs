use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use thompson_cli::{exit, exit_code, run, Cli, RunReport};
use thompson_core::io::write_atomic;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::PARSE as u8 } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let elapsed_ms = start.elapsed().as_millis();

    if let (Some(path), Some(artifact)) = (&cli.out, &outcome.artifact) {
        if let Err(e) = write_atomic(path, artifact.as_bytes()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(exit::IO as u8);
        }
    }
    if cli.json {
        let report = RunReport {
            command: cli.command.name(),
            config: &cli,
            passed: outcome.passed,
            seed: outcome.seed,
            result: &outcome.result,
            artifact: if cli.out.is_none() { outcome.artifact.as_deref() } else { None },
            elapsed_ms,
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    } else if cli.out.is_none() && outcome.artifact.is_some() {
        // keep stdout clean for the artifact
        eprintln!("{}", outcome.summary);
        let artifact = outcome.artifact.as_deref().unwrap_or_default();
        if artifact.ends_with('\n') {
            print!("{artifact}");
        } else {
            println!("{artifact}");
        }
    } else {
        println!("{}", outcome.summary);
    }
    if outcome.passed {
        ExitCode::from(exit::OK as u8)
    } else {
        ExitCode::from(exit::CHECK_FAILED as u8)
    }
}
