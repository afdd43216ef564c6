use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use llb::experiment::{execute, Command, Invocation};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    Verify,
    SweepSmallness,
    BlowupWatch,
    Stability,
    Plot,
}

#[derive(Parser)]
#[command(name = "llb", about = "LLB solver and inequality lab")]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Verify => Command::Verify,
        Cmd::SweepSmallness => Command::SweepSmallness,
        Cmd::BlowupWatch => Command::BlowupWatch,
        Cmd::Stability => Command::Stability,
        Cmd::Plot => Command::Plot,
    };
    let inv = Invocation {
        command,
        config: cli.config,
        resume: cli.resume,
        out: cli.out,
        seed: cli.seed,
        workers: cli.workers,
    };
    match execute(&inv) {
        Ok(o) => {
            println!("{}: {}", o.directory.display(), o.message);
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
