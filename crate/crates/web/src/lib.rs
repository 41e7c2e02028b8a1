//! wasm-bindgen exports for the static demo page in `www/`. Each export is a thin
//! wrapper over a plain function that native tests call directly.

use std::f64::consts::PI;

use codim2::bifurcation::{self, CurveSets};
use codim2::dynamics::{poincare_map, ScaledFlow};
use codim2::elliptic::EllipticModulus;
use codim2::fourier::FourierSeries;
use codim2::melnikov;
use codim2::normalform::Sign;
use codim2::ode::Tolerances;
use codim2::orbits::{self, FamilyKind, ScaledSystem};
use codim2::{Error, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

const FAMILIES: [FamilyKind; 9] = [
    FamilyKind::HetPair(Sign::Plus),
    FamilyKind::HetPair(Sign::Minus),
    FamilyKind::PeriodicInsideHet,
    FamilyKind::PeriodicGlobal2a,
    FamilyKind::HomPair(Sign::Plus),
    FamilyKind::HomPair(Sign::Minus),
    FamilyKind::PeriodicInsideHom(Sign::Plus),
    FamilyKind::PeriodicInsideHom(Sign::Minus),
    FamilyKind::PeriodicOutsideHom,
];

fn sign(x: f64) -> Result<Sign> {
    if x == 1.0 {
        Ok(Sign::Plus)
    } else if x == -1.0 {
        Ok(Sign::Minus)
    } else {
        Err(Error::Domain(format!("sign must be 1 or -1, got {x}")))
    }
}

pub fn family(name: &str) -> Result<FamilyKind> {
    FAMILIES
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::Domain(format!("unknown orbit family '{name}'")))
}

pub fn system(name: &str) -> Result<ScaledSystem> {
    [ScaledSystem::Psys1, ScaledSystem::Psys2a, ScaledSystem::Psys2b]
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::Domain(format!("unknown system '{name}'")))
}

/// Curves of the scaled `(ν₁, ν₂)` diagram plus the sampled separatrix profile `ĥ(φ)`.
#[allow(clippy::too_many_arguments)]
pub fn curves_json(s1: f64, s2: f64, omega_hat: f64, delta: f64, h_amp: f64, m: u32, n: u32, samples: u32) -> Result<String> {
    let (s1, s2) = (sign(s1)?, sign(s2)?);
    let h = FourierSeries::cosine(h_amp);
    let (curves, skipped) = bifurcation::scaled_diagram(s1, s2, omega_hat, delta, &h, m, n, CurveSets::ALL)?;
    let sep = match s1 {
        Sign::Plus => FamilyKind::HetPair(Sign::Plus),
        Sign::Minus => FamilyKind::HomPair(Sign::Plus),
    };
    let hh = melnikov::h_hat(&h, sep, omega_hat)?;
    let phi: Vec<f64> = (0..=samples).map(|i| 2.0 * PI * i as f64 / samples.max(1) as f64).collect();
    let value: Vec<f64> = phi.iter().map(|&p| hh.eval(p)).collect();
    Ok(json!({
        "curves": curves,
        "skipped": skipped,
        "profile": { "family": sep.name(), "phi": phi, "value": value, "max": hh.hmax, "min": hh.hmin },
    })
    .to_string())
}

/// Stroboscopic iterates of a `grid × grid` seed lattice on `[-radius, radius]²`, flattened
/// as `z1, z2` pairs. A seed stops once it leaves the box or the integrator fails.
#[allow(clippy::too_many_arguments)]
pub fn portrait(
    system_name: &str,
    eps_hat: f64,
    nu_hat: f64,
    s2: f64,
    delta: f64,
    omega_hat: f64,
    h_amp: f64,
    grid: u32,
    iterates: u32,
    radius: f64,
) -> Result<Vec<f64>> {
    let flow = ScaledFlow {
        system: system(system_name)?,
        eps_hat,
        nu_hat,
        s2: sign(s2)?,
        delta_big: delta,
        omega_hat,
        h: FourierSeries::cosine(h_amp),
    };
    flow.validate()?;
    let tol = Tolerances { abs: 1e-9, rel: 1e-8 };
    let mut out = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let at = |k: u32| radius * (2.0 * (k as f64 + 0.5) / grid as f64 - 1.0);
            let mut x = vec![at(i), at(j)];
            for _ in 0..iterates {
                match poincare_map(&flow, &x, 1, tol) {
                    Ok(y) if y.iter().all(|v| v.abs() <= radius) => {
                        out.extend_from_slice(&y);
                        x = y;
                    }
                    _ => break,
                }
            }
        }
    }
    Ok(out)
}

/// One unperturbed orbit: `k` is ignored for separatrices, which are sampled on `|t| ≤ 8`.
pub fn orbit_json(family_name: &str, k: f64, samples: u32) -> Result<String> {
    let fam = family(family_name)?;
    let samples = samples.max(2);
    let (modulus, t0, t1, period) = if fam.k_range().is_some() {
        let m = EllipticModulus::new(k)?;
        let t = orbits::period(fam, m)?;
        (Some(m), 0.0, t, Some(t))
    } else {
        (None, -8.0, 8.0, None)
    };
    let mut z1 = Vec::with_capacity(samples as usize);
    let mut z2 = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let t = t0 + (t1 - t0) * i as f64 / (samples - 1) as f64;
        let p = orbits::evaluate(fam, modulus, t)?;
        z1.push(p.zeta1);
        z2.push(p.zeta2);
    }
    Ok(json!({
        "family": fam.name(),
        "system": fam.system().name(),
        "period": period,
        "energy": orbits::energy(fam, modulus)?,
        "k_range": fam.k_range(),
        "z1": z1,
        "z2": z2,
    })
    .to_string())
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = scaledCurves)]
#[allow(clippy::too_many_arguments)]
pub fn scaled_curves_js(s1: f64, s2: f64, omega_hat: f64, delta: f64, h_amp: f64, m: u32, n: u32) -> std::result::Result<String, JsError> {
    curves_json(s1, s2, omega_hat, delta, h_amp, m, n, 256).map_err(js)
}

#[wasm_bindgen(js_name = poincarePortrait)]
#[allow(clippy::too_many_arguments)]
pub fn poincare_portrait_js(
    system_name: &str,
    eps_hat: f64,
    nu_hat: f64,
    s2: f64,
    delta: f64,
    omega_hat: f64,
    h_amp: f64,
    grid: u32,
    iterates: u32,
    radius: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    portrait(system_name, eps_hat, nu_hat, s2, delta, omega_hat, h_amp, grid, iterates, radius).map_err(js)
}

#[wasm_bindgen(js_name = orbitFamily)]
pub fn orbit_family_js(family_name: &str, k: f64, samples: u32) -> std::result::Result<String, JsError> {
    orbit_json(family_name, k, samples).map_err(js)
}
