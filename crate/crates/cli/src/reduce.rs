use codim2::io::{fmt_f64, CsvTable};
use codim2::normalform::{Branch, NormalFormParams, ScaledParams};
use codim2::pendulum::{self, Codim2Point};
use serde::Serialize;

use crate::config::{Param, Settings};
use crate::error::CliError;
use crate::model::{self, Output};

pub fn params() -> Vec<Param> {
    model::concat(&[model::PENDULUM, model::PENDULUM_SCALED_FORCING])
}

#[derive(Debug, Serialize)]
pub struct Reduction {
    pub codim2: Codim2Point,
    pub normal_form: NormalFormParams,
    /// Cosine amplitude of the normal-form forcing.
    pub h_amplitude: f64,
    pub scaled: ScaledParams,
    pub omega: f64,
    pub eps: f64,
}

pub fn compute(s: &mut Settings) -> Result<Reduction, CliError> {
    let p = model::forced_pendulum(s)?;
    let (nf, sp) = pendulum::reduce_pendulum(&p)?;
    let codim2 = pendulum::codim2_locus(&p)?;
    let h_amplitude = nf.h.cos.first().copied().unwrap_or(0.0);
    Ok(Reduction { codim2, h_amplitude, normal_form: nf, scaled: sp, omega: p.omega, eps: p.eps })
}

fn branch(b: Branch) -> &'static str {
    match b {
        Branch::Nu1Negative => "nu1<0",
        Branch::Nu1Positive => "nu1>0",
    }
}

pub fn run(s: &mut Settings, out: &Output) -> Result<(), CliError> {
    let r = compute(s)?;
    let nf = &r.normal_form;
    let sp = &r.scaled;
    let mut t = CsvTable::new(&["quantity", "value"]);
    let rows: Vec<(&str, String)> = vec![
        ("alpha0", fmt_f64(r.codim2.alpha0)),
        ("gamma0", fmt_f64(r.codim2.gamma0)),
        ("nu1", fmt_f64(nf.nu1)),
        ("nu2", fmt_f64(nf.nu2)),
        ("s1", nf.s1.to_string()),
        ("s2", nf.s2.to_string()),
        ("omega_bar", fmt_f64(nf.omega_bar)),
        ("c", fmt_f64(nf.c)),
        ("d", fmt_f64(nf.d)),
        ("h_amplitude", fmt_f64(r.h_amplitude)),
        ("eps_hat", fmt_f64(sp.eps_hat)),
        ("nu_hat", fmt_f64(sp.nu_hat)),
        ("omega_hat", fmt_f64(sp.omega_hat)),
        ("delta_big", fmt_f64(sp.delta_big)),
        ("branch", branch(sp.branch).into()),
        ("omega", fmt_f64(r.omega)),
        ("eps", fmt_f64(r.eps)),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v]);
    }
    out.note(format!(
        "s1 = {}, s2 = {}, nu_hat = {:.6}, omega_hat = {:.6}, Delta = {:.6}",
        nf.s1, nf.s2, sp.nu_hat, sp.omega_hat, sp.delta_big
    ));
    out.emit(&model::provenance(s), &t, &r)
}
