use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gk_core::scenario::{run_scenario, validate_scenario, Format, Scenario};

#[derive(Parser)]
#[command(name = "gk", version, about = "Run (g,K)-module scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario and print the report.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a scenario and check its declarations.
    Validate { scenario: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

fn fail(e: gk_core::GkError) -> ExitCode {
    eprintln!("gk: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { scenario } => {
            let s = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match validate_scenario(&s) {
                Ok(env) => {
                    println!(
                        "{}: ok ({} lie algebras, {} pairs, {} maps, {} modules, {} tasks)",
                        s.name,
                        env.lies.len(),
                        env.pairs.len(),
                        env.maps.len(),
                        env.modules.len(),
                        s.tasks.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Run { scenario, format, out } => {
            let s = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let report = match run_scenario(&s) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let fmt = match format {
                OutputFormat::Text => Format::Text,
                OutputFormat::Json => Format::Json,
            };
            let text = report.render(fmt);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &text) {
                        eprintln!("gk: cannot write {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                }
                None => print!("{text}"),
            }
            for w in &report.warnings {
                eprintln!("gk: warning: {w}");
            }
            for t in &report.tasks {
                if let Some(e) = &t.error {
                    eprintln!("gk: task {} ({}): {}", t.index, t.op, e.message);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
