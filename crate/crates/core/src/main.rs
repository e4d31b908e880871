use std::process::ExitCode;

use clap::Parser;
use mrng::cli::{run, Cli, Outcome};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done(m)) => {
            for path in &m.outputs {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Ok(Outcome::Repro(m, checks)) => {
            for c in &checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for path in &m.outputs {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Ok(Outcome::PlanOnly(plan)) => {
            print!("{}", plan.render());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
