//! `revlink`: batch analyses of geodesic flows on spheres of revolution.
//!
//! Exit codes: 0 success or left-handed, 1 invalid input, 2 validation
//! failure, 3 not left-handed, 4 inconclusive, 5 oracle mismatch.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use revlink_core::SurfaceSpec;

use args::{Cli, Command};
use commands::{Outcome, EXIT_INVALID};

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    if g.tol.is_nan() || g.tol <= 0.0 || g.verdict_tol.is_nan() || g.verdict_tol <= 0.0 {
        return Err(revlink_core::Error::Precondition("tolerances must be positive".into()).into());
    }
    match &cli.command {
        Command::Analyze { surface } => commands::analyze(g, "analyze", surface),
        Command::Sdelta { delta, eps } => commands::analyze(g, "sdelta", &SurfaceSpec::Pinched { delta: *delta, eps: *eps }),
        Command::Sweep { range } => commands::sweep(g, range),
        Command::CriticalB { b_tol } => commands::critical_b(g, *b_tol),
        Command::Link { equator, types, outer, surface } => commands::link(g, equator, types, *outer, surface.as_ref()),
        Command::Oracle { surface, max_p, max_q, pts_per_swing, diagram, diagram_type, equator } => match (diagram, diagram_type) {
            (Some(path), Some(t)) => commands::oracle_diagram(g, path, *t, *equator, *pts_per_swing),
            _ => {
                let spec = surface.as_ref().expect("clap requires --surface without --diagram");
                commands::oracle(g, spec, *max_p, *max_q, *pts_per_swing)
            }
        },
        Command::Trace { surface, c, t_max, stride, u0 } => commands::trace(g, surface, *c, *t_max, *stride, *u0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INVALID as u8),
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("REVLINK_LOG", "warn")).init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.workers {
        pool = pool.num_threads(n as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };

    let result = pool.install(|| run(&cli));
    match result {
        Ok(out) => {
            if let Err(e) = report::emit(&out.text, cli.global.out.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_INVALID as u8);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::error_code(&e) as u8)
        }
    }
}
