use clap::{Args, Parser, Subcommand};
use relcont_cli::run::parse_tolerance;
use relcont_cli::{run, Command, Compiled, Options, Scenario, SemSelect};
use std::path::PathBuf;
use std::process::ExitCode;

/// Consistency checks for relativistic electromagnetic continua.
#[derive(Parser)]
#[command(name = "relcont", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exterior-calculus and curvature identities on the scenario's metric.
    Identities(Common),
    /// Agreement of the SEM tensor's writings, splits and vacuum relations.
    Sem {
        #[arg(long, value_enum, default_value = "all")]
        form: SemSelect,
        #[command(flatten)]
        common: Common,
    },
    /// Energy, momentum, continuity and advection residuals.
    Balance(Common),
    /// Maxwell-in-matter residuals, ponderomotive writing, gauge invariance.
    Maxwell(Common),
    /// Interface jump conditions between the interior and exterior sides.
    Junction(Common),
    /// Einstein equations with the scenario's coupling χ.
    Einstein(Common),
    /// Every suite listed in the scenario's `checks`.
    All(Common),
    /// Print the scenario in canonical form.
    Normalize {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Refinement depth: levels 0..=k (default: the scenario's `refine`).
    #[arg(long)]
    refine: Option<u32>,
    /// Tolerance override, `check=value` or `class=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write per-check residual slices as CSV into this directory.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Include boundary points in grid norms.
    #[arg(long)]
    include_boundary: bool,
}

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    relcont_core::parallel::configure_threads();
    let (command, common) = match cli.command {
        Cmd::Identities(c) => (Command::Identities, c),
        Cmd::Sem { form, common } => (Command::Sem(form), common),
        Cmd::Balance(c) => (Command::Balance, c),
        Cmd::Maxwell(c) => (Command::Maxwell, c),
        Cmd::Junction(c) => (Command::Junction, c),
        Cmd::Einstein(c) => (Command::Einstein, c),
        Cmd::All(c) => (Command::All, c),
        Cmd::Normalize { scenario } => {
            return match Scenario::load(&scenario).and_then(|s| s.to_toml()) {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            };
        }
    };
    let tolerances = match common.tol.iter().map(|t| parse_tolerance(t)).collect::<Result<Vec<_>, _>>() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let scenario = match Scenario::load(&common.scenario) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let compiled = match Compiled::new(&scenario) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let opts = Options {
        refine: common.refine,
        tolerances,
        plot: common.plot.clone(),
        include_boundary: common.include_boundary,
    };
    let report = match run(&compiled, command, &opts) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    print!("{}", report.to_json_lines());
    if let Some(dir) = &opts.plot {
        if let Err(e) = report.write_plots(dir) {
            return fail(e);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
