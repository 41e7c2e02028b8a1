//! Composite numerical checks comparing the Melnikov predictions with the
//! harness: fold convergence, separatrix splitting and harmonic censuses,
//! plus closed-form consistency sweeps for the `J` integrals and `ĥ^{m/n}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    self, census, detect_saddle_node, find_subharmonic, orbit_extent, splitting_profile, Connection, ContinuationOptions,
    OrbitStability, PendulumFlow, PeriodicOrbit, ScaledFlow, ShootingOptions, SplittingOptions,
};
use crate::elliptic::EllipticModulus;
use crate::error::{domain, Error, Result};
use crate::fourier::FourierSeries;
use crate::melnikov::{self, MelnikovProfile, SeparatrixKind};
use crate::normalform::{Branch, Sign};
use crate::orbits::{self, FamilyKind, ScaledSystem, PERIODIC_FAMILIES};
use crate::pendulum::{self, PendulumParams, Proposition};

// ---------------------------------------------------------------------------
// Fold convergence

/// Planar setting for a saddle-node continuation in `ν̂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSetup {
    pub family: FamilyKind,
    pub s2: Sign,
    pub m: u32,
    pub n: u32,
    pub omega_hat: f64,
    pub delta_big: f64,
    pub h: FourierSeries,
}

impl FoldSetup {
    /// `psys1` with `s₂ = +1` (`θ₀ = 0`) or `psys2a` with `s₂ = -1` (`θ₀ = π`), cosine forcing.
    pub fn for_case(theta0: pendulum::Theta0, m: u32, omega_hat: f64) -> Self {
        let (family, s2) = match theta0 {
            pendulum::Theta0::Zero => (FamilyKind::PeriodicInsideHet, Sign::Plus),
            pendulum::Theta0::Pi => (FamilyKind::PeriodicGlobal2a, Sign::Minus),
        };
        Self { family, s2, m, n: 1, omega_hat, delta_big: 1.0, h: FourierSeries::cosine(1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldEntry {
    pub eps_hat: f64,
    pub nu_hat_fold: f64,
    pub nu_hat_predicted: f64,
    pub gap: f64,
    pub bracket_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldConvergence {
    pub setup: FoldSetup,
    pub k: f64,
    pub entries: Vec<FoldEntry>,
    /// Gaps strictly decrease along decreasing `ε̂`.
    pub converging: bool,
}

/// Continues the resonant orbit from `ν̂ = −s₂J₂/J₁` towards decreasing `ν̂` and compares
/// the turning point with `ν̂* = −(Δĥmax + s₂J₂)/J₁` for each `ε̂`.
pub fn fold_convergence(setup: &FoldSetup, eps_list: &[f64], opts: &ContinuationOptions) -> Result<FoldConvergence> {
    if eps_list.is_empty() {
        return domain("empty eps_hat list");
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return domain("eps_hat values must be positive");
    }
    let system = setup.family.system();
    let k = orbits::resonant_modulus(setup.family, setup.m, setup.n, setup.omega_hat)?;
    let j = melnikov::j_integrals(setup.family, k, setup.n)?;
    let hh = melnikov::h_hat_subharmonic(&setup.h, setup.family, k, setup.m, setup.n, setup.omega_hat)?;
    if hh.hmax - hh.hmin < 1e-12 {
        return Err(Error::Degeneracy("subharmonic Melnikov profile vanishes".into()));
    }
    let s2 = setup.s2.f();
    let nu_mid = -s2 * j.j2 / j.j1;
    let nu_pred = -(setup.delta_big * hh.hmax + s2 * j.j2) / j.j1;
    let target = nu_pred - 1.0 - (nu_mid - nu_pred).abs();
    let seeds = profile_zeros(&hh)
        .into_iter()
        .map(|phi| orbits::evaluate(setup.family, Some(k), -phi / setup.omega_hat).map(|p| vec![p.zeta1, p.zeta2]))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for &eps in eps_list {
        let build = |nu: f64| ScaledFlow {
            system,
            eps_hat: eps,
            nu_hat: nu,
            s2: setup.s2,
            delta_big: setup.delta_big,
            omega_hat: setup.omega_hat,
            h: setup.h.clone(),
        };
        let mut last_err = Error::NoFoldInBracket { lo: target, hi: nu_mid };
        let mut fold = None;
        for seed in &seeds {
            match find_subharmonic(&build(nu_mid), setup.m, seed, &opts.shooting)
                .and_then(|o| detect_saddle_node(build, setup.m, &o.state, nu_mid, target, opts))
            {
                Ok(f) => {
                    fold = Some(f);
                    break;
                }
                Err(e) => last_err = e,
            }
        }
        let f = fold.ok_or(last_err)?;
        entries.push(FoldEntry {
            eps_hat: eps,
            nu_hat_fold: f.parameter,
            nu_hat_predicted: nu_pred,
            gap: (f.parameter - nu_pred).abs(),
            bracket_width: f.bracket_width,
        });
    }
    let mut order: Vec<&FoldEntry> = entries.iter().collect();
    order.sort_by(|a, b| b.eps_hat.total_cmp(&a.eps_hat));
    let converging = order.windows(2).all(|w| w[1].gap < w[0].gap);
    Ok(FoldConvergence { setup: setup.clone(), k: k.k(), entries, converging })
}

/// Simple zeros of the profile on a 720-point phase grid (bisection-refined).
fn profile_zeros(p: &MelnikovProfile) -> Vec<f64> {
    let n = 720;
    let mut out = Vec::new();
    for i in 0..n {
        let (mut a, mut b) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * (i + 1) as f64 / n as f64);
        let fa = p.eval(a);
        if fa * p.eval(b) < 0.0 {
            for _ in 0..60 {
                let c = 0.5 * (a + b);
                if p.eval(c) * fa > 0.0 {
                    a = c;
                } else {
                    b = c;
                }
            }
            out.push(0.5 * (a + b));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Splitting sign test

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingCheck {
    pub nu_hat: f64,
    pub predicted: bool,
    pub observed: bool,
    pub distance_min: f64,
    pub distance_max: f64,
}

/// Upper heteroclinic connection of `psys1`: does `W^u` meet `W^s` exactly when `M₊` has a zero?
pub fn splitting_checks(
    eps_hat: f64,
    omega_hat: f64,
    delta_big: f64,
    h: &FourierSeries,
    nu_hats: &[f64],
    opts: &SplittingOptions,
) -> Result<Vec<SplittingCheck>> {
    let s2 = Sign::Plus;
    let hhat = melnikov::h_hat(h, FamilyKind::HetPair(Sign::Plus), omega_hat)?;
    nu_hats
        .iter()
        .map(|&nu| {
            let mel = melnikov::melnikov_separatrix(nu, s2, delta_big, &hhat, SeparatrixKind::Het);
            let flow = ScaledFlow { system: ScaledSystem::Psys1, eps_hat, nu_hat: nu, s2, delta_big, omega_hat, h: h.clone() };
            let prof = splitting_profile(&flow, Connection::HetUpper, opts)?;
            Ok(SplittingCheck {
                nu_hat: nu,
                predicted: mel.crosses_zero().0,
                observed: prof.intersects,
                distance_min: prof.min,
                distance_max: prof.max,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Harmonic census on the pendulum

/// Resonant family carried over to the pendulum for the given `s₁` and `ν₁` half-plane.
pub fn default_family(s1: Sign, branch: Branch) -> Option<FamilyKind> {
    match (s1, branch) {
        (Sign::Plus, Branch::Nu1Negative) => Some(FamilyKind::PeriodicInsideHet),
        (Sign::Minus, Branch::Nu1Negative) => Some(FamilyKind::PeriodicGlobal2a),
        (Sign::Minus, Branch::Nu1Positive) => Some(FamilyKind::PeriodicInsideHom(Sign::Plus)),
        (Sign::Plus, Branch::Nu1Positive) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusOrbit {
    pub orbit: PeriodicOrbit,
    /// Time-mean of `z₁ − θ₀`.
    pub mean_z1: f64,
    /// Maximal deviation of `z₁` from its mean.
    pub extent_z1: f64,
    /// On the resonant torus: centred on `θ₀` with extent comparable to the lifted orbit.
    pub sn_born: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub params: PendulumParams,
    pub family: FamilyKind,
    pub k: f64,
    pub m: u32,
    pub predicted_extent: f64,
    pub orbits: Vec<CensusOrbit>,
}

impl CensusReport {
    pub fn count(&self, stability: OrbitStability, sn_born: bool) -> usize {
        self.orbits.iter().filter(|o| o.orbit.stability == stability && o.sn_born == sn_born).count()
    }
}

/// Shoots from `seeds` lifted points of the resonant `m:1` orbit and from the equilibrium,
/// at `(α, γ)` with forcing set from `ω̂`, `Δ`.
pub fn harmonic_census(
    base: &PendulumParams,
    m: u32,
    omega_hat: f64,
    delta_big: f64,
    seeds: usize,
    opts: &ShootingOptions,
) -> Result<CensusReport> {
    let p = pendulum::with_scaled_forcing(base, omega_hat, delta_big)?;
    let (nf, sp) = pendulum::reduce_pendulum(&p)?;
    let family = default_family(nf.s1, sp.branch)
        .ok_or_else(|| Error::Domain("no resonant periodic family for s1 = +1, nu1 > 0".into()))?;
    let k = orbits::resonant_modulus(family, m, 1, omega_hat)?;
    let t_res = orbits::period(family, k)?;
    let th0 = p.theta0.value();
    let mut starts = vec![vec![th0, 0.0, 0.0]];
    let mut predicted_extent = 0.0f64;
    for i in 0..seeds.max(1) {
        let z = orbits::evaluate(family, Some(k), t_res * i as f64 / seeds.max(1) as f64)?;
        let x = pendulum::lift_scaled_state(&p, (z.zeta1, z.zeta2))?;
        predicted_extent = predicted_extent.max((x[0] - th0).abs());
        starts.push(x.to_vec());
    }
    let flow = PendulumFlow { params: p };
    let found = census(&flow, m, &starts, opts, 1e-6);
    let orbits = found
        .into_iter()
        .map(|orbit| {
            let (mean, extent) = orbit_extent(&flow, &orbit, 0, opts.integration)?;
            let mean_z1 = mean - th0;
            let sn_born = mean_z1.abs() < 0.1 * predicted_extent
                && extent > 0.4 * predicted_extent
                && extent < 1.6 * predicted_extent;
            Ok(CensusOrbit { orbit, mean_z1, extent_z1: extent, sn_born })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CensusReport { params: p, family, k: k.k(), m, predicted_extent, orbits })
}

// ---------------------------------------------------------------------------
// Closed-form sweeps

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JCheck {
    pub family: FamilyKind,
    pub n: u32,
    pub k: f64,
    pub max_rel_error: f64,
}

/// Closed form against quadrature on a `points`-point modulus grid per family and `n ∈ 1..=3`.
pub fn jintegral_checks(points: usize) -> Result<Vec<JCheck>> {
    let mut jobs = Vec::new();
    for fam in PERIODIC_FAMILIES {
        let (lo, hi) = fam.k_range().unwrap();
        for i in 0..points {
            let k = lo + (hi - lo) * (i as f64 + 0.5) / points as f64;
            for n in 1..=3 {
                jobs.push((fam, k, n));
            }
        }
    }
    let res = dynamics::par_map(&jobs, |&(fam, k, n)| -> Result<JCheck> {
        let km = EllipticModulus::new(k)?;
        let a = melnikov::j_integrals(fam, km, n)?;
        let b = melnikov::j_integrals_by_quadrature(fam, km, n)?;
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
        let e = rel(a.j1, b.j1).max(rel(a.j2, b.j2)).max(rel(a.j3, b.j3));
        Ok(JCheck { family: fam, n, k, max_rel_error: e })
    });
    res.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionCheck {
    pub family: FamilyKind,
    pub m: u32,
    pub n: u32,
    pub omega_hat: f64,
    pub allowed: bool,
    /// `max |ĥ^{m/n}|` from quadrature, for `h = cos φ`.
    pub amplitude: f64,
    /// Closed-form amplitude for the allowed cases.
    pub predicted: Option<f64>,
    /// Largest coefficient mismatch against the closed form, relative to its amplitude.
    pub coefficient_error: Option<f64>,
}

fn representative_k(fam: FamilyKind) -> f64 {
    match fam {
        FamilyKind::PeriodicGlobal2a => 0.4,
        FamilyKind::PeriodicOutsideHom => 0.85,
        _ => 0.6,
    }
}

fn proposition_for(fam: FamilyKind) -> Option<Proposition> {
    Proposition::ALL.into_iter().find(|p| p.family() == fam)
}

/// Selection rules of `ĥ^{m/n}` for cosine forcing, `m ≤ m_max`, `n ≤ n_max`, coprime.
pub fn selection_checks(m_max: u32, n_max: u32) -> Result<Vec<SelectionCheck>> {
    let mut out = Vec::new();
    let h = FourierSeries::cosine(1.0);
    for fam in PERIODIC_FAMILIES {
        let k = EllipticModulus::new(representative_k(fam))?;
        let tk = orbits::period(fam, k)?;
        for m in 1..=m_max {
            for n in 1..=n_max {
                if orbits::gcd(m, n) != 1 {
                    continue;
                }
                let omega_hat = 2.0 * PI * m as f64 / (n as f64 * tk);
                let prof = melnikov::h_hat_subharmonic(&h, fam, k, m, n, omega_hat)?;
                let amplitude = prof.hmax.abs().max(prof.hmin.abs());
                let prop = proposition_for(fam);
                let parity_ok = match fam {
                    FamilyKind::PeriodicInsideHom(_) => true,
                    _ => m % 2 == 1,
                };
                let allowed = n == 1 && parity_ok;
                let (predicted, coefficient_error) = match (allowed, prop) {
                    (true, Some(which)) => {
                        let p = match which.theta0() {
                            pendulum::Theta0::Zero => PendulumParams::case_i(),
                            pendulum::Theta0::Pi => PendulumParams::case_ii(),
                        };
                        let rc = pendulum::coefficients(&p)?;
                        let pp = pendulum::proposition_profile(&p, which, m, omega_hat)?;
                        // The closed forms are stated for the pendulum's forcing amplitude.
                        let amp = rc.h_amplitude;
                        let want = &pp.profile.values;
                        let e = want
                            .cos
                            .iter()
                            .zip(&prof.values.cos)
                            .chain(want.sin.iter().zip(&prof.values.sin))
                            .map(|(w, g)| (w - amp * g).abs())
                            .fold(0.0f64, f64::max)
                            / pp.profile.hmax.abs();
                        (Some(pp.profile.hmax.abs() / amp.abs()), Some(e))
                    }
                    _ => (None, None),
                };
                out.push(SelectionCheck { family: fam, m, n, omega_hat, allowed, amplitude, predicted, coefficient_error });
            }
        }
    }
    Ok(out)
}
