//! `codim2`: reductions, bifurcation curves, simulations and verification experiments
//! for periodically forced symmetric double-zero systems.

mod config;
mod curves;
mod error;
mod manifolds;
mod model;
mod reduce;
mod simulate;
mod verify;

use clap::{ArgMatches, Command};

use config::Settings;
use error::CliError;
use model::Output;

fn subcommand(name: &'static str, about: &'static str, params: &[config::Param]) -> Command {
    config::with_params(config::common_args(Command::new(name).about(about)), params)
}

fn cli() -> Command {
    let mut verify = Command::new("verify")
        .about("Run a named verification experiment; exits with 4 when a check fails")
        .subcommand_required(true);
    for (name, about) in verify::EXPERIMENTS {
        verify = verify.subcommand(subcommand(name, about, &verify::params(name)));
    }
    Command::new("codim2")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Melnikov analysis of periodically forced symmetric double-zero bifurcations")
        .after_help("Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 verification failure.")
        .subcommand_required(true)
        .subcommand(subcommand("reduce", "Normal form and scaled parameters of the forced pendulum", &reduce::params()))
        .subcommand(subcommand("curves", "Bifurcation curves in the (nu1, nu2) or (alpha, gamma) plane", &curves::params()))
        .subcommand(subcommand("simulate", "Trajectories, Poincare maps and periodic orbits", &simulate::params()))
        .subcommand(subcommand("manifolds", "Stable and unstable manifolds of a saddle fixed point", &manifolds::params()))
        .subcommand(verify)
}

fn run(matches: &ArgMatches) -> Result<(), CliError> {
    let (name, sub) = matches.subcommand().expect("subcommand required");
    if name == "verify" {
        let (exp, m) = sub.subcommand().expect("experiment required");
        let mut s = Settings::resolve(&format!("verify {exp}"), &verify::params(exp), m)?;
        return verify::run(exp, &mut s, &Output::from_matches(m));
    }
    let params = match name {
        "reduce" => reduce::params(),
        "curves" => curves::params(),
        "simulate" => simulate::params(),
        "manifolds" => manifolds::params(),
        _ => unreachable!(),
    };
    let mut s = Settings::resolve(name, &params, sub)?;
    let out = Output::from_matches(sub);
    match name {
        "reduce" => reduce::run(&mut s, &out),
        "curves" => curves::run(&mut s, &out),
        "simulate" => simulate::run(&mut s, &out),
        _ => manifolds::run(&mut s, &out),
    }
}

fn main() {
    let matches = cli().get_matches();
    if let Err(e) = run(&matches) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn command_definition_is_consistent() {
        super::cli().debug_assert();
    }
}
