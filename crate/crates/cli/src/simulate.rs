use codim2::dynamics::{self, ShootingOptions};
use codim2::io;
use codim2::ode::Tolerances;

use crate::config::{p, Param, Settings};
use crate::error::CliError;
use crate::model::{self, Output};

const OWN: &[Param] = &[
    p("system", "psys1", "Vector field: psys1, psys2a, psys2b or pendulum"),
    p("mode", "trajectory", "trajectory (dense samples), poincare (strobe samples) or orbit (shoot a fixed point)"),
    p("x0", "", "Initial state or shooting guess, comma separated [default: origin]"),
    p("t_end", "50", "Trajectory length"),
    p("samples", "500", "Number of trajectory samples"),
    p("iterates", "100", "Number of Poincare-map iterates"),
    p("m", "1", "Map iterate used by --mode orbit"),
    p("abs_tol", "1e-10", "Absolute integration tolerance"),
    p("rel_tol", "1e-9", "Relative integration tolerance"),
];

pub fn params() -> Vec<Param> {
    model::concat(&[OWN, model::SCALED, model::PENDULUM, model::PENDULUM_SCALED_FORCING])
}

pub fn run(s: &mut Settings, out: &Output) -> Result<(), CliError> {
    let flow = model::flow(s)?;
    let field = flow.field();
    let labels = flow.labels();
    let dim = labels.len();
    if !s.is_set("x0") {
        let origin = match &flow {
            model::Flow::Pendulum(f) => vec![f.params.theta0.value(), 0.0, 0.0],
            model::Flow::Scaled(_) => vec![0.0; dim],
        };
        s.force("x0", origin.iter().map(|v| io::fmt_f64(*v)).collect::<Vec<_>>().join(","));
    }
    let x0 = model::state(s, "x0", dim)?;
    let tol = Tolerances { abs: s.positive("abs_tol")?, rel: s.positive("rel_tol")? };
    let mode = s.choice("mode", &["trajectory", "poincare", "orbit"])?;
    let (t_end, samples, iterates, m) = match mode {
        "trajectory" => (s.positive("t_end")?, s.usize("samples")?, 0, 0),
        "poincare" => (0.0, 0, s.usize("iterates")?, 0),
        _ => (0.0, 0, 0, s.u32("m")?),
    };
    let prov = model::provenance(s);
    match mode {
        "trajectory" => {
            let samples = dynamics::sample_trajectory(field, &x0, t_end, samples, tol)?;
            out.note(format!("{} samples", samples.len()));
            out.emit(&prov, &io::trajectory_table(&samples, labels), &samples)
        }
        "poincare" => {
            let period = field.forcing_period();
            let mut x = x0;
            let mut samples = vec![(0.0, x.clone())];
            for i in 1..=iterates {
                x = dynamics::poincare_map(field, &x, 1, tol)?;
                samples.push((i as f64 * period, x.clone()));
            }
            out.note(format!("{} strobe samples, period {period:.6}", samples.len()));
            out.emit(&prov, &io::trajectory_table(&samples, labels), &samples)
        }
        _ => {
            let orbit = dynamics::find_subharmonic(field, m, &x0, &ShootingOptions::default())?;
            out.note(format!(
                "{} orbit after {} iterations, residual {:.2e}",
                orbit.stability.as_str(),
                orbit.iterations,
                orbit.residual
            ));
            let orbits = vec![orbit];
            out.emit(&prov, &io::orbits_table(&orbits, labels), &orbits)
        }
    }
}
