use codim2::dynamics::{self, ManifoldBranch, ManifoldOptions, ManifoldTrace, ShootingOptions};
use codim2::io::{self, fmt_f64, CsvTable};
use codim2::ode::Tolerances;
use serde::Serialize;

use crate::config::{p, Param, Settings};
use crate::error::CliError;
use crate::model::{self, Output};

const OWN: &[Param] = &[
    p("system", "psys1", "Vector field: psys1, psys2a, psys2b or pendulum"),
    p("x0", "1,0", "Guess for the saddle point on the section"),
    p("m", "1", "Map iterate whose saddle fixed point is traced"),
    p("branches", "all", "Comma list from unstable+, unstable-, stable+, stable-, or all"),
    p("seeds", "200", "Seeds per fundamental domain"),
    p("offset", "1e-6", "Distance of the fundamental domain from the saddle"),
    p("iterates", "12", "Map iterates applied to the fundamental domain"),
    p("box", "3", "Points leaving |x1|, |x2| <= box are dropped"),
    p("abs_tol", "1e-11", "Absolute integration tolerance"),
    p("rel_tol", "1e-11", "Relative integration tolerance"),
    p("slices", "", "Report crossings with the planes x[slice_component] = level for these levels"),
    p("slice_component", "3", "1-based component used by --slices"),
];

pub fn params() -> Vec<Param> {
    model::concat(&[OWN, model::SCALED, model::PENDULUM, model::PENDULUM_SCALED_FORCING])
}

#[derive(Serialize)]
struct Slice<'a> {
    branch: &'a str,
    level: f64,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Report<'a> {
    saddle: &'a dynamics::PeriodicOrbit,
    traces: &'a [ManifoldTrace],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    slices: Vec<Slice<'a>>,
}

fn branches(s: &Settings) -> Result<Vec<ManifoldBranch>, CliError> {
    if s.str("branches") == "all" {
        return Ok(ManifoldBranch::ALL.to_vec());
    }
    s.str("branches")
        .split(',')
        .map(|t| ManifoldBranch::ALL.into_iter().find(|b| b.as_str() == t.trim()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| s.config_error("branches", "expected a comma list from unstable+, unstable-, stable+, stable-, or all"))
}

pub fn run(s: &mut Settings, out: &Output) -> Result<(), CliError> {
    let flow = model::flow(s)?;
    let field = flow.field();
    let labels = flow.labels();
    if matches!(flow, model::Flow::Pendulum(_)) && s.is_default("x0") {
        return Err(s.config_error("x0", "the pendulum needs an explicit three-component saddle guess"));
    }
    let x0 = model::state(s, "x0", labels.len())?;
    let which = branches(s)?;
    let opts = ManifoldOptions {
        seeds: s.usize("seeds")?,
        offset: s.positive("offset")?,
        max_iterates: s.usize("iterates")?,
        box_radius: s.positive("box")?,
        integration: Tolerances { abs: s.positive("abs_tol")?, rel: s.positive("rel_tol")? },
    };
    let levels = s.f64_list("slices")?;
    let comp = if levels.is_empty() { 1 } else { s.usize("slice_component")? };
    if comp > labels.len() {
        return Err(s.config_error("slice_component", &format!("the state has {} components", labels.len())));
    }
    let saddle_point = x0.clone();
    let saddle = dynamics::find_subharmonic_from_path(field, s.u32("m")?, &|_| saddle_point.clone(), &ShootingOptions::default())?;
    let traces = dynamics::trace_manifolds(field, &saddle, &which, &opts)?;
    for t in &traces {
        out.note(format!("{}: {} points, multiplier {:.6e}", t.branch.as_str(), t.points.len(), t.multiplier));
    }
    let prov = model::provenance(s).with("saddle", saddle.state.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
    let mut slices = Vec::new();
    for t in &traces {
        for &level in &levels {
            slices.push(Slice { branch: t.branch.as_str(), level, points: dynamics::plane_slice(&t.points, comp - 1, level) });
        }
    }
    let table = if levels.is_empty() {
        io::manifold_table(&traces, labels)
    } else {
        let mut header = vec!["branch", "level", "index"];
        header.extend_from_slice(labels);
        let mut table = CsvTable::new(&header);
        for sl in &slices {
            for (i, pt) in sl.points.iter().enumerate() {
                let mut row = vec![sl.branch.to_string(), fmt_f64(sl.level), i.to_string()];
                row.extend(pt.iter().map(|v| fmt_f64(*v)));
                table.push(row);
            }
        }
        table
    };
    out.emit(&prov, &table, &Report { saddle: &saddle, traces: &traces, slices })
}
