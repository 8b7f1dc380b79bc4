//! Scenario-driven command line for the sulphation solver.
//!
//! Runs are deterministic in `(scenario, seed)`. Exit codes: 0 success,
//! 1 acceptance-criteria failure (`validate`), 2 validation/parse error,
//! 3 solver non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sulph::scenario::{run, Command as RunCommand, Scenario};
use sulph::validation;
use sulph::SulphError;

#[derive(Parser)]
#[command(
    name = "sulph",
    version,
    about = "Reaction-diffusion solver on the half-line with a stochastic Jacobi boundary"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Scenario file (line-oriented `key = value`); omitted means the
    /// built-in default scenario
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Override the scenario seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Run this many ensemble members with seeds seed, seed+1, ...
    #[arg(long, global = true, value_name = "K")]
    ensemble: Option<usize>,

    /// Override any scenario key, e.g. --set jacobi.alpha=2.0 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Treat a file-loaded boundary signal as smooth enough for the
    /// finite-difference oracle
    #[arg(long, global = true)]
    assume_smooth: bool,

    /// Only print errors
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Sample the boundary process and write the path CSV
    SampleBoundary,
    /// Solve the boundary-driven heat equation (fields u and dx u)
    SolveHeat,
    /// Solve the coupled nonlinear system (mild solver)
    SolveSystem,
    /// Solve the system with the finite-difference oracle (smooth data only)
    SolveFd,
    /// Run both solvers and report their relative L2(t,x) distance
    Compare,
    /// Run the acceptance suite and print one line per criterion
    Validate,
}

fn build_scenario(cli: &Cli) -> Result<Scenario, SulphError> {
    let mut sc = match &cli.scenario {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    for pair in &cli.overrides {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            SulphError::Parse(format!("--set expects KEY=VALUE, got '{pair}'"))
        })?;
        sc.apply(key.trim(), value.trim())?;
    }
    if let Some(seed) = cli.seed {
        sc.seed = seed;
    }
    if let Some(out) = &cli.out {
        sc.out_dir = out.clone();
    }
    sc.assume_smooth = cli.assume_smooth;
    sc.validate()?;
    Ok(sc)
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("SULPH_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
        }
    }
}

fn run_single(sc: &Scenario, cmd: RunCommand, quiet: bool) -> Result<(), SulphError> {
    let artifacts = run(sc, cmd)?;
    if !quiet {
        for f in &artifacts.files {
            println!("wrote {}", f.display());
        }
        for (k, v) in &artifacts.report {
            println!("{k} = {v}");
        }
    }
    Ok(())
}

fn run_ensemble(sc: &Scenario, cmd: RunCommand, members: usize, quiet: bool) -> Result<(), SulphError> {
    use rayon::prelude::*;
    let runs: Vec<Result<Vec<(String, String)>, SulphError>> = (0..members)
        .into_par_iter()
        .map(|i| {
            let mut member = sc.clone();
            member.seed = sc.seed + i as u64;
            member.out_dir = sc.out_dir.join(format!("member_{i:04}"));
            run(&member, cmd).map(|a| a.report)
        })
        .collect();

    let mut summary: Vec<(String, String)> = Vec::new();
    let mut first_err: Option<SulphError> = None;
    for (i, outcome) in runs.into_iter().enumerate() {
        match outcome {
            Ok(report) => {
                for (k, v) in report {
                    summary.push((format!("member_{i:04}.{k}"), v));
                }
            }
            Err(e) => {
                summary.push((format!("member_{i:04}.error"), e.to_string()));
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    sulph::io::write_report(&sc.out_dir.join("ensemble.txt"), &summary)?;
    if !quiet {
        println!("wrote {}", sc.out_dir.join("ensemble.txt").display());
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();

    if let Cmd::Validate = cli.command {
        let reports = validation::run_all();
        let mut all_pass = true;
        for r in &reports {
            println!("{r}");
            all_pass &= r.passed;
        }
        return if all_pass {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        };
    }

    let cmd = match cli.command {
        Cmd::SampleBoundary => RunCommand::SampleBoundary,
        Cmd::SolveHeat => RunCommand::SolveHeat,
        Cmd::SolveSystem => RunCommand::SolveSystem,
        Cmd::SolveFd => RunCommand::SolveFd,
        Cmd::Compare => RunCommand::Compare,
        Cmd::Validate => unreachable!(),
    };

    let outcome = build_scenario(&cli).and_then(|sc| match cli.ensemble {
        Some(0) => Err(SulphError::InvalidParameter(
            "--ensemble needs at least one member".into(),
        )),
        Some(k) => run_ensemble(&sc, cmd, k, cli.quiet),
        None => run_single(&sc, cmd, cli.quiet),
    });

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
