use codim2::bifurcation::{self, CurveSets};
use codim2::io::{self, fmt_f64};
use codim2::pendulum::{self, Proposition};

use crate::config::{p, switch, Param, Settings};
use crate::error::CliError;
use crate::model::{self, Output};

const OWN: &[Param] = &[
    p("prop", "", "Pendulum proposition P61..P66: emit its curves in the (alpha, gamma) plane"),
    switch("unperturbed", "Emit the unforced skeleton for --s1/--s2"),
    switch("from_pendulum", "Take s1, s2, omega_hat, delta and h_amplitude from the pendulum reduction"),
    p("s1", "1", "Sign s1 of the cubic restoring term"),
    p("s2", "1", "Sign s2 of the cubic damping term"),
    p("omega_hat", "0.8", "Scaled forcing frequency"),
    p("delta", "1", "Scaled forcing amplitude Delta"),
    p("h_amplitude", "1", "Forcing h(phi) = A cos(phi): amplitude A"),
    p("m", "1", "Subharmonic order m (period m T_hat)"),
    p("n", "1", "Number n of unperturbed periods in resonance"),
    p("sets", "all", "Comma list from skeleton, separatrix, saddle-node, hopf, or all"),
    p("nu1_grid", "0,0.0025,0.005,0.0075,0.01", "|nu1| samples for (alpha, gamma) polylines"),
];

pub fn params() -> Vec<Param> {
    model::concat(&[OWN, model::PENDULUM, model::PENDULUM_SCALED_FORCING])
}

const SETS: &[&str] = &["skeleton", "separatrix", "saddle-node", "hopf"];

fn sets(s: &Settings) -> Result<CurveSets, CliError> {
    if s.str("sets") == "all" {
        return Ok(CurveSets::ALL);
    }
    let names = s
        .str("sets")
        .split(',')
        .map(|t| SETS.iter().find(|x| **x == t.trim()).copied())
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| s.config_error("sets", "expected a comma list from skeleton, separatrix, saddle-node, hopf, or all"))?;
    Ok(CurveSets {
        skeleton: names.contains(&"skeleton"),
        separatrix: names.contains(&"separatrix"),
        saddle_node: names.contains(&"saddle-node"),
        hopf: names.contains(&"hopf"),
    })
}

pub fn run(s: &mut Settings, out: &Output) -> Result<(), CliError> {
    if s.is_set("prop") {
        return run_pendulum(s, out);
    }
    if s.bool("unperturbed")? {
        let curves = bifurcation::unperturbed_diagram(model::sign(s, "s1")?, model::sign(s, "s2")?);
        out.note(format!("{} skeleton curves", curves.len()));
        return out.emit(&model::provenance(s), &io::curves_table(&curves), &curves);
    }
    if s.bool("from_pendulum")? {
        let p = model::forced_pendulum(s)?;
        let (nf, sp) = pendulum::reduce_pendulum(&p)?;
        let h_amp = nf.h.cos.first().copied().unwrap_or(0.0);
        for (key, v) in [
            ("s1", nf.s1.to_string()),
            ("s2", nf.s2.to_string()),
            ("omega_hat", fmt_f64(sp.omega_hat)),
            ("delta", fmt_f64(sp.delta_big)),
            ("h_amplitude", fmt_f64(h_amp)),
        ] {
            s.force(key, v);
        }
    }
    let wanted = sets(s)?;
    let (curves, skipped) = bifurcation::scaled_diagram(
        model::sign(s, "s1")?,
        model::sign(s, "s2")?,
        s.positive("omega_hat")?,
        s.f64("delta")?,
        &model::cosine_forcing(s)?,
        s.u32("m")?,
        s.u32("n")?,
        wanted,
    )?;
    for note in &skipped {
        out.note(format!("skipped {note}"));
    }
    let mut prov = model::provenance(s);
    if !skipped.is_empty() {
        prov = prov.with("skipped", skipped.join("; "));
    }
    out.note(format!("{} curves", curves.len()));
    out.emit(&prov, &io::curves_table(&curves), &curves)
}

fn run_pendulum(s: &mut Settings, out: &Output) -> Result<(), CliError> {
    let which = Proposition::parse(s.str("prop")).map_err(|e| s.config_error("prop", &e.to_string()))?;
    if s.is_default("case") && which.theta0() == pendulum::Theta0::Pi {
        s.force("case", "ii");
    }
    let p = model::pendulum_params(s)?;
    let grid = s.f64_list("nu1_grid")?;
    if grid.is_empty() {
        return Err(s.config_error("nu1_grid", "empty sweep grid"));
    }
    let curves =
        pendulum::proposition_curves(&p, which, s.u32("m")?, s.positive("omega_hat")?, s.f64("delta")?, &grid)?;
    out.note(format!("{} curves for {}", curves.len(), which.as_str()));
    out.emit(&model::provenance(s), &io::pendulum_curves_table(&curves), &curves)
}
