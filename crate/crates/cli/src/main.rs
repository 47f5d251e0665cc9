mod args;
mod check;
mod discrete;
mod output;
mod su2;
mod torus;

use clap::error::ErrorKind;
use clap::Parser;

use args::{CheckCmd, Cli, DiscreteCmd, Group, Su2Cmd, TorusCmd};
use output::{render, write_to, Body, Failure, Report};

const THREADS_ENV: &str = "INFLATLAB_THREADS";

fn threads(flag: Option<usize>) -> Result<usize, Failure> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Precondition(format!("{THREADS_ENV} must be a positive integer, got {s:?}")))?,
            Err(_) => 1,
        },
    };
    if n == 0 {
        return Err(Failure::Precondition("thread count must be positive".into()));
    }
    Ok(n)
}

fn dispatch(group: &Group) -> Result<Report, Failure> {
    let json = |v| Ok(Report::ok(Body::Json(v)));
    match group {
        Group::Torus(TorusCmd::Spectrum(p)) => json(torus::spectrum_cmd(p)?),
        Group::Torus(TorusCmd::Solve(p)) => json(torus::solve_cmd(p)?),
        Group::Su2(Su2Cmd::Table(p)) => json(su2::table_cmd(p)?),
        Group::Su2(Su2Cmd::Landscape(p)) => Ok(Report::ok(su2::landscape_cmd(p)?)),
        Group::Su2(Su2Cmd::Solve(p)) => json(su2::solve_cmd(p)?),
        Group::Su2(Su2Cmd::Berger(p)) => json(su2::berger_cmd(p)?),
        Group::Discrete(DiscreteCmd::Maximize(p)) => discrete::maximize_cmd(p),
        Group::Check(CheckCmd::Duality(p)) => check::duality_cmd(p),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let n = threads(cli.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Precondition(format!("thread pool: {e}")))?;
    let report = dispatch(&cli.group)?;
    write_to(cli.output.as_deref(), &render(&report.body))?;
    match report.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprint!("{e}");
            std::process::exit(1);
        }
        Err(e) => {
            let msg = e.to_string().lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ").to_string();
            eprintln!("{}", Failure::Precondition(msg).to_json_line());
            std::process::exit(1);
        }
    };
    if let Err(f) = run(cli) {
        eprintln!("{}", f.to_json_line());
        std::process::exit(f.exit_code());
    }
}
