//! Builders shared by the subcommands: pendulum parameters, scaled flows, output.

use std::io::Write;

use clap::ArgMatches;
use codim2::dynamics::{ForcedSystem, PendulumFlow, ScaledFlow};
use codim2::fourier::FourierSeries;
use codim2::io::{CsvTable, Provenance};
use codim2::normalform::Sign;
use codim2::orbits::ScaledSystem;
use codim2::pendulum::{self, PendulumParams, Theta0};
use serde::Serialize;

use crate::config::{p, Param, Settings};
use crate::error::CliError;

pub const PENDULUM: &[Param] = &[
    p("case", "i", "Pendulum case: i (theta0 = 0) or ii (theta0 = pi)"),
    p("alpha", "", "alpha [default: 1.25 for case i, 1.1 for case ii]"),
    p("gamma", "", "gamma [default: -1.2 for case i, 0.9 for case ii]"),
    p("delta0", "", "delta0 [default: from case]"),
    p("delta1", "", "delta1 [default: from case]"),
    p("beta", "", "Forcing coupling beta [default: 5]"),
    p("omega", "1", "Forcing frequency omega"),
    p("eps", "0.001", "Forcing amplitude eps"),
];

/// Scaled-forcing overrides for the pendulum: when both are set, `omega` and `eps`
/// are chosen so the scaled system has this `omega_hat` and `Delta`.
pub const PENDULUM_SCALED_FORCING: &[Param] = &[
    p("pendulum_omega_hat", "", "Set omega and eps from this scaled frequency (pendulum only)"),
    p("pendulum_delta", "", "Scaled forcing amplitude used with --pendulum-omega-hat"),
];

pub const SCALED: &[Param] = &[
    p("eps_hat", "0.05", "Scaling parameter eps_hat"),
    p("nu_hat", "0", "Unfolding parameter nu_hat"),
    p("s2", "1", "Sign s2 of the cubic damping term"),
    p("delta", "1", "Scaled forcing amplitude Delta"),
    p("omega_hat", "0.8", "Scaled forcing frequency"),
    p("h_amplitude", "1", "Forcing h(phi) = A cos(phi): amplitude A"),
];

pub fn concat(parts: &[&[Param]]) -> Vec<Param> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub fn theta0(s: &Settings) -> Result<Theta0, CliError> {
    Ok(match s.choice("case", &["i", "ii"])? {
        "i" => Theta0::Zero,
        _ => Theta0::Pi,
    })
}

/// Pendulum parameters with case defaults filled in and recorded.
pub fn pendulum_params(s: &mut Settings) -> Result<PendulumParams, CliError> {
    let base = match theta0(s)? {
        Theta0::Zero => PendulumParams::case_i().with_alpha_gamma(1.25, -1.2),
        Theta0::Pi => PendulumParams::case_ii().with_alpha_gamma(1.1, 0.9),
    };
    s.derive("alpha", codim2::io::fmt_f64(base.alpha));
    s.derive("gamma", codim2::io::fmt_f64(base.gamma));
    s.derive("delta0", codim2::io::fmt_f64(base.delta0));
    s.derive("delta1", codim2::io::fmt_f64(base.delta1));
    s.derive("beta", codim2::io::fmt_f64(base.beta));
    let p = PendulumParams {
        alpha: s.f64("alpha")?,
        gamma: s.f64("gamma")?,
        delta0: s.f64("delta0")?,
        delta1: s.f64("delta1")?,
        beta: s.f64("beta")?,
        omega: s.f64("omega")?,
        eps: s.f64("eps")?,
        theta0: base.theta0,
    };
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(p)
}

/// As [`pendulum_params`], then applies the scaled-forcing overrides if present.
pub fn forced_pendulum(s: &mut Settings) -> Result<PendulumParams, CliError> {
    let p = pendulum_params(s)?;
    match (s.opt_f64("pendulum_omega_hat")?, s.opt_f64("pendulum_delta")?) {
        (Some(w), Some(d)) => Ok(pendulum::with_scaled_forcing(&p, w, d)?),
        (None, None) => Ok(p),
        _ => Err(s.config_error("pendulum_omega_hat", "pendulum_omega_hat and pendulum_delta must be given together")),
    }
}

pub fn sign(s: &Settings, key: &str) -> Result<Sign, CliError> {
    match s.choice(key, &["1", "+1", "-1"])? {
        "-1" => Ok(Sign::Minus),
        _ => Ok(Sign::Plus),
    }
}

pub fn cosine_forcing(s: &Settings) -> Result<FourierSeries, CliError> {
    Ok(FourierSeries::cosine(s.f64("h_amplitude")?))
}

pub fn scaled_flow(s: &Settings, system: ScaledSystem) -> Result<ScaledFlow, CliError> {
    let f = ScaledFlow {
        system,
        eps_hat: s.f64("eps_hat")?,
        nu_hat: s.f64("nu_hat")?,
        s2: sign(s, "s2")?,
        delta_big: s.f64("delta")?,
        omega_hat: s.f64("omega_hat")?,
        h: cosine_forcing(s)?,
    };
    f.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(f)
}

pub enum Flow {
    Scaled(ScaledFlow),
    Pendulum(PendulumFlow),
}

impl Flow {
    pub fn field(&self) -> &dyn ForcedSystem {
        match self {
            Flow::Scaled(f) => f,
            Flow::Pendulum(f) => f,
        }
    }

    pub fn labels(&self) -> &'static [&'static str] {
        match self {
            Flow::Scaled(_) => &["z1", "z2"],
            Flow::Pendulum(_) => &["z1", "z2", "z3"],
        }
    }
}

pub const SYSTEMS: &[&str] = &["psys1", "psys2a", "psys2b", "pendulum"];

pub fn flow(s: &mut Settings) -> Result<Flow, CliError> {
    Ok(match s.choice("system", SYSTEMS)? {
        "psys1" => Flow::Scaled(scaled_flow(s, ScaledSystem::Psys1)?),
        "psys2a" => Flow::Scaled(scaled_flow(s, ScaledSystem::Psys2a)?),
        "psys2b" => Flow::Scaled(scaled_flow(s, ScaledSystem::Psys2b)?),
        _ => Flow::Pendulum(PendulumFlow { params: forced_pendulum(s)? }),
    })
}

pub fn state(s: &Settings, key: &str, dim: usize) -> Result<Vec<f64>, CliError> {
    let v = s.f64_list(key)?;
    if v.len() != dim {
        return Err(s.config_error(key, &format!("expected {dim} comma-separated components")));
    }
    Ok(v)
}

pub fn provenance(s: &Settings) -> Provenance {
    s.entries().into_iter().fold(Provenance::new(s.command()), |p, (k, v)| p.with(k, v))
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub struct Output {
    pub format: Format,
    pub path: Option<String>,
    pub quiet: bool,
}

impl Output {
    pub fn from_matches(m: &ArgMatches) -> Self {
        let format = match m.get_one::<String>("format").map(String::as_str) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        };
        Self { format, path: m.get_one::<String>("output").cloned(), quiet: m.get_flag("quiet") }
    }

    /// Renders `table` or `data` and writes it in one piece, so a failed command leaves no file.
    pub fn emit<T: Serialize>(&self, prov: &Provenance, table: &CsvTable, data: &T) -> Result<(), CliError> {
        let text = match self.format {
            Format::Csv => table.render(prov),
            Format::Json => codim2::io::render_json(prov, data).map_err(|e| CliError::Io(e.to_string()))?,
        };
        match &self.path {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}"))),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
        }
    }

    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}
