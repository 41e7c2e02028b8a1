use codim2::dynamics::{ContinuationOptions, OrbitStability, ShootingOptions, SplittingOptions};
use codim2::experiments::{self, FoldSetup};
use codim2::fourier::FourierSeries;
use codim2::io::{fmt_f64, CsvTable};
use codim2::pendulum::Theta0;
use serde::Serialize;

use crate::config::{p, Param, Settings};
use crate::error::CliError;
use crate::model::{self, Output};

pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("jintegrals", "Closed-form J integrals against quadrature on modulus grids"),
    ("hhat", "Selection rules and closed-form amplitudes of the subharmonic forcing profiles"),
    ("fold-convergence", "Distance of the detected saddle-node to the predicted line as eps_hat shrinks"),
    ("manifold-splitting", "Manifold intersection against the sign of the separatrix Melnikov function"),
    ("harmonic-count", "Harmonic orbits of the forced pendulum near the double-zero point"),
];

pub fn params(experiment: &str) -> Vec<Param> {
    match experiment {
        "jintegrals" => vec![p("points", "20", "Modulus grid points per family"), p("tol", "1e-9", "Relative tolerance")],
        "hhat" => vec![
            p("m_max", "5", "Largest m"),
            p("n_max", "3", "Largest n"),
            p("zero_tol", "1e-10", "Bound on profiles that must vanish"),
            p("tol", "1e-8", "Relative tolerance against the closed forms"),
        ],
        "fold-convergence" => vec![
            p("case", "i", "i (psys1, s2 = +1) or ii (psys2a, s2 = -1)"),
            p("m", "1", "Subharmonic order"),
            p("omega_hat", "", "Scaled forcing frequency [default: 0.8 for case i, 1.2 for case ii]"),
            p("delta", "1", "Scaled forcing amplitude Delta"),
            p("eps_list", "0.05,0.025", "Decreasing eps_hat values"),
        ],
        "manifold-splitting" => vec![
            p("eps_hat", "0.05", "Scaling parameter eps_hat"),
            p("omega_hat", "1.4", "Scaled forcing frequency"),
            p("delta", "1", "Scaled forcing amplitude Delta"),
            p("nu_list", "-0.6,-0.2,0.2,-1.2,-1.5,-2.0,0.8,1.1,1.5", "nu_hat values to test"),
            p("min_agree", "3", "Required agreements per region"),
        ],
        "harmonic-count" => model::concat(&[
            model::PENDULUM,
            &[
                p("m", "1", "Map iterate"),
                p("omega_hat", "0.8", "Scaled forcing frequency"),
                p("delta", "1", "Scaled forcing amplitude Delta"),
                p("seeds", "24", "Seeds along the lifted resonant orbit"),
                p("min_orbits", "3", "Required number of distinct orbits"),
            ],
        ]),
        _ => unreachable!("unknown experiment {experiment}"),
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, passed: measured < tolerance }
    }

    fn at_least(name: impl Into<String>, measured: usize, required: usize) -> Self {
        Self { name: name.into(), measured: measured as f64, tolerance: required as f64, passed: measured >= required }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn report(experiment: &str, checks: Vec<Check>, details: serde_json::Value) -> Report {
    Report { experiment: experiment.into(), passed: checks.iter().all(|c| c.passed), checks, details }
}

pub fn evaluate(experiment: &str, s: &mut Settings) -> Result<Report, CliError> {
    Ok(match experiment {
        "jintegrals" => {
            let tol = s.positive("tol")?;
            let rows = experiments::jintegral_checks(s.usize("points")?)?;
            let mut checks = Vec::new();
            for fam in codim2::orbits::PERIODIC_FAMILIES {
                let worst = rows.iter().filter(|r| r.family == fam).map(|r| r.max_rel_error).fold(0.0, f64::max);
                checks.push(Check::below(format!("{} max relative error", fam.name()), worst, tol));
            }
            report(experiment, checks, to_json(&rows))
        }
        "hhat" => {
            let rows = experiments::selection_checks(s.u32("m_max")?, s.u32("n_max")?)?;
            let zero = rows.iter().filter(|r| !r.allowed).map(|r| r.amplitude).fold(0.0, f64::max);
            let mismatch = rows.iter().filter_map(|r| r.coefficient_error).fold(0.0, f64::max);
            let zero_tol = s.positive("zero_tol")?;
            let vanishing_allowed = rows.iter().filter(|r| r.allowed && r.amplitude < zero_tol).count();
            let checks = vec![
                Check::below("largest profile in the vanishing cases", zero, zero_tol),
                Check::below("largest relative mismatch with the closed forms", mismatch, s.positive("tol")?),
                Check::below("allowed cases that vanish", vanishing_allowed as f64, 0.5),
            ];
            report(experiment, checks, to_json(&rows))
        }
        "fold-convergence" => {
            let theta0 = model::theta0(s)?;
            s.derive("omega_hat", if theta0 == Theta0::Zero { "0.8" } else { "1.2" });
            let mut setup = FoldSetup::for_case(theta0, s.u32("m")?, s.positive("omega_hat")?);
            setup.delta_big = s.f64("delta")?;
            let eps = s.f64_list("eps_list")?;
            if eps.len() < 2 {
                return Err(s.config_error("eps_list", "at least two eps_hat values are needed"));
            }
            let r = experiments::fold_convergence(&setup, &eps, &ContinuationOptions::default())?;
            let mut checks: Vec<Check> = r
                .entries
                .windows(2)
                .map(|w| Check {
                    name: format!("gap at eps_hat {} below gap at {}", fmt_f64(w[1].eps_hat), fmt_f64(w[0].eps_hat)),
                    measured: w[1].gap,
                    tolerance: w[0].gap,
                    passed: w[1].gap < w[0].gap,
                })
                .collect();
            checks.push(Check::below("largest fold bracket width", r.entries.iter().map(|e| e.bracket_width).fold(0.0, f64::max), 1e-6));
            report(experiment, checks, to_json(&r))
        }
        "manifold-splitting" => {
            let nus = s.f64_list("nu_list")?;
            if nus.is_empty() {
                return Err(s.config_error("nu_list", "empty sweep grid"));
            }
            let h = FourierSeries::cosine(1.0);
            let rows = experiments::splitting_checks(
                s.f64("eps_hat")?,
                s.positive("omega_hat")?,
                s.f64("delta")?,
                &h,
                &nus,
                &SplittingOptions::default(),
            )?;
            let need = s.usize("min_agree")?;
            let inside = rows.iter().filter(|r| r.predicted && r.observed).count();
            let below = rows.iter().filter(|r| !r.predicted && !r.observed && r.nu_hat < 0.0).count();
            let above = rows.iter().filter(|r| !r.predicted && !r.observed && r.nu_hat > 0.0).count();
            let checks = vec![
                Check::at_least("intersecting points inside the region", inside, need),
                Check::at_least("separated points below the region", below, need),
                Check::at_least("separated points above the region", above, need),
            ];
            report(experiment, checks, to_json(&rows))
        }
        "harmonic-count" => {
            let base = model::pendulum_params(s)?;
            let r = experiments::harmonic_census(
                &base,
                s.u32("m")?,
                s.positive("omega_hat")?,
                s.f64("delta")?,
                s.usize("seeds")?,
                &ShootingOptions::default(),
            )?;
            let checks = vec![
                Check::at_least("distinct orbits", r.orbits.len(), s.usize("min_orbits")?),
                Check::at_least("saddle-node-born sinks", r.count(OrbitStability::Sink, true), 1),
                Check::at_least("saddle-node-born saddles", r.count(OrbitStability::Saddle, true), 1),
            ];
            report(experiment, checks, to_json(&r))
        }
        _ => unreachable!(),
    })
}

pub fn run(experiment: &str, s: &mut Settings, out: &Output) -> Result<(), CliError> {
    let r = evaluate(experiment, s)?;
    let mut t = CsvTable::new(&["check", "measured", "tolerance", "passed"]);
    for c in &r.checks {
        t.push(vec![c.name.clone(), fmt_f64(c.measured), fmt_f64(c.tolerance), c.passed.to_string()]);
        out.note(format!("{} {}: {:.3e} (bound {:.3e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured, c.tolerance));
    }
    let prov = model::provenance(s).with("experiment", experiment).with("passed", r.passed);
    out.emit(&prov, &t, &r)?;
    if r.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(format!("{experiment}: {}", failed.join(", "))))
    }
}
