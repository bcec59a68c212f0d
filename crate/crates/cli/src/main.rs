use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hsurf_cli::config::Overrides;
use hsurf_cli::{commands, CliError};

#[derive(Debug, Parser)]
#[command(name = "hsurf", version, about = "Surface curvature in the Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mesh, horizontal curves and profile table of a constant-K^∞ rotation surface.
    Rotsurf(#[command(flatten)] Overrides),
    /// Curvature grid as CSV.
    Curvature(#[command(flatten)] Overrides),
    /// Gauss–Bonnet report as JSON; exit 3 above the residual threshold.
    GaussBonnet(#[command(flatten)] Overrides),
    /// L sweep at one point as CSV, with fitted slopes in a footer.
    Converge(#[command(flatten)] Overrides),
    /// Adapted frames on the grid as CSV.
    Frames(#[command(flatten)] Overrides),
    /// Built-in identity suite; exit 3 on any failure.
    Check(#[command(flatten)] Overrides),
}

type Handler = fn(&hsurf_cli::Config) -> Result<commands::Outcome, CliError>;

fn run(cmd: Command) -> Result<(), CliError> {
    let (o, f): (Overrides, Handler) = match cmd {
        Command::Rotsurf(o) => (o, commands::rotsurf),
        Command::Curvature(o) => (o, commands::curvature),
        Command::GaussBonnet(o) => (o, commands::gauss_bonnet),
        Command::Converge(o) => (o, commands::converge),
        Command::Frames(o) => (o, commands::frames),
        Command::Check(o) => (o, commands::check),
    };
    let config = o.resolve()?;
    f(&config)?.write()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away (e.g. `| head`)
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hsurf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
