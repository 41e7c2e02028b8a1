//! Feedback-controlled pendulum
//!
//! ```text
//! ż₁ = z₂
//! ż₂ = -sin z₁ - δ₀z₂ + z₃
//! ż₃ = -αz₃ + γ(θ_d - z₁) - δ₁z₂,      θ_d = εβ cos ωt + θ₀
//! ```
//!
//! with its double-zero locus, the analytic reduction to the normal form, and
//! the bifurcation curves predicted for it in the `(α, γ)` plane.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bifurcation::{self, CurveKind, Extremum, Theorem};
use crate::elliptic::EllipticModulus;
use crate::error::{domain, Error, Result};
use crate::fourier::FourierSeries;
use crate::melnikov::{self, MelnikovProfile};
use crate::normalform::{self, NormalFormParams, ScaledParams, Sign, SymmetricSystemCoeffs};
use crate::orbits::{self, FamilyKind};

/// `|ν₁|` at or below which `(α, γ)` is treated as lying on the pitchfork line
/// (absorbs rounding in `α₀`, `γ₀`).
pub const PITCHFORK_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theta0 {
    Zero,
    Pi,
}

impl Theta0 {
    pub fn value(self) -> f64 {
        match self {
            Theta0::Zero => 0.0,
            Theta0::Pi => PI,
        }
    }

    /// `σ = +1` for `θ₀ = 0`, `-1` for `θ₀ = π`.
    pub fn sigma(self) -> f64 {
        match self {
            Theta0::Zero => 1.0,
            Theta0::Pi => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub beta: f64,
    pub omega: f64,
    pub theta0: Theta0,
    pub eps: f64,
}

impl PendulumParams {
    /// `θ₀ = 0`, `δ₀ = 0.2`, `δ₁ = -1.2`, `β = 5`, placed at the double-zero point `(1, -1)`.
    pub fn case_i() -> Self {
        Self { alpha: 1.0, gamma: -1.0, delta0: 0.2, delta1: -1.2, beta: 5.0, omega: 1.0, theta0: Theta0::Zero, eps: 0.0 }
    }

    /// `θ₀ = π`, `δ₀ = 0.5`, `δ₁ = 0.5`, `β = 5`, placed at the double-zero point `(1, 1)`.
    pub fn case_ii() -> Self {
        Self { alpha: 1.0, gamma: 1.0, delta0: 0.5, delta1: 0.5, beta: 5.0, omega: 1.0, theta0: Theta0::Pi, eps: 0.0 }
    }

    pub fn with_alpha_gamma(mut self, alpha: f64, gamma: f64) -> Self {
        self.alpha = alpha;
        self.gamma = gamma;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.theta0.sigma()
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.alpha, self.gamma, self.delta0, self.delta1, self.beta, self.omega, self.eps];
        if vals.iter().any(|v| !v.is_finite()) {
            return domain("pendulum parameters must be finite");
        }
        if !(self.alpha > 0.0) {
            return domain(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.delta0 > 0.0) {
            return domain(format!("delta0 must be positive, got {}", self.delta0));
        }
        if (self.delta1.abs() - 1.0).abs() < 1e-12 {
            return domain(format!("delta1 must differ from +-1, got {}", self.delta1));
        }
        if self.beta < 0.0 {
            return domain(format!("beta must be non-negative, got {}", self.beta));
        }
        if !(self.omega > 0.0) {
            return domain(format!("omega must be positive, got {}", self.omega));
        }
        if self.eps < 0.0 {
            return domain(format!("eps must be non-negative, got {}", self.eps));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Codim2Point {
    pub alpha0: f64,
    pub gamma0: f64,
}

/// `(α₀, γ₀)` where the linearization at `(θ₀, 0, 0)` has a double zero eigenvalue.
pub fn codim2_locus(p: &PendulumParams) -> Result<Codim2Point> {
    p.validate()?;
    let s = p.sigma();
    let alpha0 = -(s + p.delta1) / p.delta0;
    let gamma0 = s * (s + p.delta1) / p.delta0;
    if !(alpha0 > 0.0) {
        return Err(Error::Degeneracy(format!("alpha0 = {alpha0} is not positive")));
    }
    Ok(Codim2Point { alpha0, gamma0 })
}

/// Jacobian at the upright/hanging equilibrium for the given `(α, γ)`.
pub fn jacobian(p: &PendulumParams, alpha: f64, gamma: f64) -> [[f64; 3]; 3] {
    [[0.0, 1.0, 0.0], [-p.sigma(), -p.delta0, 1.0], [-gamma, -p.delta1, -alpha]]
}

/// `(c₂, c₁, c₀)` of `λ³ + c₂λ² + c₁λ + c₀`, the characteristic polynomial of [`jacobian`].
pub fn char_poly(p: &PendulumParams, alpha: f64, gamma: f64) -> (f64, f64, f64) {
    let s = p.sigma();
    (p.delta0 + alpha, s + alpha * p.delta0 + p.delta1, s * alpha + gamma)
}

/// Center-manifold coefficients at `(α₀, γ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCoefficients {
    pub codim2: Codim2Point,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub b11: f64,
    pub b21: f64,
    pub c: f64,
    pub d: f64,
    /// `|d/c| = 3δ₀/(α₀(α₀+δ₀))`.
    pub ratio: f64,
    /// Amplitude of `h(φ) = A cos φ`.
    pub h_amplitude: f64,
}

pub fn coefficients(p: &PendulumParams) -> Result<ReducedCoefficients> {
    let cp = codim2_locus(p)?;
    let (a0, g0, d0, s) = (cp.alpha0, cp.gamma0, p.delta0, p.sigma());
    let w = a0 + d0;
    let c = s * a0 / (6.0 * w);
    let d = s * d0 / (2.0 * w * w);
    Ok(ReducedCoefficients {
        codim2: cp,
        a11: s / (w * w),
        a12: d0 / (w * w),
        a21: -s / w,
        a22: -d0 / w,
        b11: 1.0 / (w * w),
        b21: -1.0 / w,
        c,
        d,
        ratio: 3.0 * d0 / (a0 * w),
        h_amplitude: 9.0 * 6f64.sqrt() * p.beta * g0 * d0.powi(3) / (2.0 * a0.powf(2.5) * w.powf(4.5)),
    })
}

/// The linear map `(α₁, γ₁) ↦ (ν₁, ν₂)` as a row-major 2×2 matrix.
pub fn nu_map(rc: &ReducedCoefficients) -> [[f64; 2]; 2] {
    let r = rc.ratio;
    [[r * r * rc.a21, r * r * rc.b21], [r * (rc.a11 + rc.a22), r * rc.b11]]
}

/// Inverse of [`nu_map`]: `(ν₁, ν₂) ↦ (α₁, γ₁)`.
pub fn nu_map_inverse(rc: &ReducedCoefficients, nu1: f64, nu2: f64) -> Result<(f64, f64)> {
    let m = nu_map(rc);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return Err(Error::Degeneracy("(alpha, gamma) -> (nu1, nu2) map is singular".into()));
    }
    Ok(((m[1][1] * nu1 - m[0][1] * nu2) / det, (-m[1][0] * nu1 + m[0][0] * nu2) / det))
}

/// Normal form at the pendulum's `(α, γ, ω)`, without scaling.
pub fn normal_form(p: &PendulumParams) -> Result<NormalFormParams> {
    let rc = coefficients(p)?;
    let (a1, g1) = (p.alpha - rc.codim2.alpha0, p.gamma - rc.codim2.gamma0);
    let m = nu_map(&rc);
    Ok(NormalFormParams {
        nu1: m[0][0] * a1 + m[0][1] * g1,
        nu2: m[1][0] * a1 + m[1][1] * g1,
        s1: Sign::of(rc.c),
        s2: Sign::of(rc.d),
        omega_bar: rc.ratio * p.omega,
        c: rc.c,
        d: rc.d,
        h: FourierSeries::cosine(rc.h_amplitude),
    })
}

/// Normal form and blow-up coordinates at `p` (using `p.eps` and `p.omega`).
pub fn reduce_pendulum(p: &PendulumParams) -> Result<(NormalFormParams, ScaledParams)> {
    let nf = normal_form(p)?;
    if nf.nu1.abs() <= PITCHFORK_TOL {
        return domain("scaling undefined for nu1 = 0 (on pitchfork line)");
    }
    let sp = normalform::scale(&nf, p.eps)?;
    Ok((nf, sp))
}

/// Sets `ω` and `ε` so the scaled system has the requested `ω̂` and `Δ`:
/// `ε̂ = √|ν₁|`, `ω = ε̂ω̂/|d/c|`, `ε = Δε̂⁴`.
pub fn with_scaled_forcing(p: &PendulumParams, omega_hat: f64, delta_big: f64) -> Result<PendulumParams> {
    if !(omega_hat > 0.0) {
        return domain(format!("omega_hat must be positive, got {omega_hat}"));
    }
    let nf = normal_form(p)?;
    if nf.nu1.abs() <= PITCHFORK_TOL {
        return domain("scaling undefined for nu1 = 0 (on pitchfork line)");
    }
    let rc = coefficients(p)?;
    let eh = nf.nu1.abs().sqrt();
    let mut q = *p;
    q.omega = eh * omega_hat / rc.ratio;
    q.eps = delta_big * eh.powi(4);
    Ok(q)
}

/// Taylor data read off the reduced planar system, for the generic reduction path.
/// Returns the coefficients and `μ = (α₁, γ₁)`.
pub fn symmetric_coeffs(p: &PendulumParams) -> Result<(SymmetricSystemCoeffs, (f64, f64))> {
    let rc = coefficients(p)?;
    let (a0, g0, d0, s) = (rc.codim2.alpha0, rc.codim2.gamma0, p.delta0, p.sigma());
    let w = a0 + d0;
    let mut sc = SymmetricSystemCoeffs {
        a: [[0.0; 4]; 2],
        b: [[[0.0; 2]; 2]; 2],
        g01: FourierSeries::cosine(-p.beta * g0 * rc.b11),
        g02: FourierSeries::cosine(-p.beta * g0 * rc.b21),
    };
    sc.set_a(1, 3, 0, s * d0 / (w * w));
    sc.set_a(2, 3, 0, s * a0 / w);
    sc.set_b(1, 1, 1, rc.a11);
    sc.set_b(1, 2, 1, rc.a12);
    sc.set_b(2, 1, 1, rc.a21);
    sc.set_b(2, 2, 1, rc.a22);
    sc.set_b(1, 1, 2, rc.b11);
    sc.set_b(2, 1, 2, rc.b21);
    Ok((sc, (p.alpha - a0, p.gamma - g0)))
}

/// Right-hand side of the pendulum equations.
pub fn vector_field(p: &PendulumParams, t: f64, z: [f64; 3]) -> [f64; 3] {
    let theta_d = p.eps * p.beta * (p.omega * t).cos() + p.theta0.value();
    [
        z[1],
        -z[0].sin() - p.delta0 * z[1] + z[2],
        -p.alpha * z[2] + p.gamma * (theta_d - z[0]) - p.delta1 * z[1],
    ]
}

/// Jacobian of [`vector_field`] with respect to `z`.
pub fn vector_field_jacobian(p: &PendulumParams, z: [f64; 3]) -> [[f64; 3]; 3] {
    [[0.0, 1.0, 0.0], [-z[0].cos(), -p.delta0, 1.0], [-p.gamma, -p.delta1, -p.alpha]]
}

/// Leading-order pendulum state for the scaled-system point `ζ` on the section `t = 0`.
pub fn lift_scaled_state(p: &PendulumParams, zeta: (f64, f64)) -> Result<[f64; 3]> {
    let rc = coefficients(p)?;
    let nf = normal_form(p)?;
    let eh = nf.nu1.abs().sqrt();
    let (a0, g0, d0, s) = (rc.codim2.alpha0, rc.codim2.gamma0, p.delta0, p.sigma());
    let w = a0 + d0;
    let (c, d) = (rc.c.abs(), rc.d.abs());
    let (a1, g1) = (p.alpha - a0, p.gamma - g0);
    let y1 = eh * zeta.0;
    let y2 = eh * eh * zeta.1;
    let eta1 = c.sqrt() / d * y1;
    let eta2 = c.powf(1.5) / (d * d) * y2;
    let xi1 = eta1;
    let xi2 = eta2 - (rc.a11 * a1 + rc.b11 * g1) * eta1 - rc.a12 * a1 * eta2;
    let a130 = s * d0 / (w * w);
    let u1 = xi1;
    let u2 = xi2 - a130 / 6.0 * xi1.powi(3);
    let v = -s * u1.powi(3) / (6.0 * w.powi(3));
    Ok([
        p.theta0.value() + u1 + d0 * v,
        u2 - d0 * w * v,
        s * u1 + d0 * u2 + (-p.delta1 * w + g0) * v,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Proposition {
    P61,
    P62,
    P63,
    P64,
    P65,
    P66,
}

impl Proposition {
    pub const ALL: [Proposition; 6] =
        [Proposition::P61, Proposition::P62, Proposition::P63, Proposition::P64, Proposition::P65, Proposition::P66];

    pub fn as_str(self) -> &'static str {
        match self {
            Proposition::P61 => "P61",
            Proposition::P62 => "P62",
            Proposition::P63 => "P63",
            Proposition::P64 => "P64",
            Proposition::P65 => "P65",
            Proposition::P66 => "P66",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown proposition {s:?}; expected P61..P66")))
    }

    pub fn theta0(self) -> Theta0 {
        match self {
            Proposition::P61 | Proposition::P62 => Theta0::Zero,
            _ => Theta0::Pi,
        }
    }

    pub fn family(self) -> FamilyKind {
        match self {
            Proposition::P61 => FamilyKind::HetPair(Sign::Plus),
            Proposition::P62 => FamilyKind::PeriodicInsideHet,
            Proposition::P63 => FamilyKind::PeriodicGlobal2a,
            Proposition::P64 => FamilyKind::HomPair(Sign::Plus),
            Proposition::P65 => FamilyKind::PeriodicInsideHom(Sign::Plus),
            Proposition::P66 => FamilyKind::PeriodicOutsideHom,
        }
    }

    pub fn theorem(self) -> Option<Theorem> {
        match self {
            Proposition::P62 => Some(Theorem::T32),
            Proposition::P63 => Some(Theorem::T41),
            Proposition::P65 => Some(Theorem::T43),
            Proposition::P66 => Some(Theorem::T44),
            _ => None,
        }
    }

    fn requires_odd_m(self) -> bool {
        matches!(self, Proposition::P62 | Proposition::P63 | Proposition::P66)
    }

    /// Half-plane of `ν₁` the proposition applies to.
    pub fn nu1_sign(self) -> f64 {
        match self {
            Proposition::P61 | Proposition::P62 | Proposition::P63 => -1.0,
            _ => 1.0,
        }
    }
}

/// The proposition's closed-form `ĥ` (or `ĥ^{m/1}`) profile, and the resonant modulus if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionProfile {
    pub proposition: Proposition,
    pub m: u32,
    pub omega_hat: f64,
    pub k: Option<EllipticModulus>,
    pub profile: MelnikovProfile,
}

fn csch(x: f64) -> f64 {
    1.0 / x.sinh()
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Closed-form profile for the proposition. The cosine/sine phase follows the
/// parity of the orbit's `ζ₂` component.
pub fn proposition_profile(p: &PendulumParams, which: Proposition, m: u32, omega_hat: f64) -> Result<PropositionProfile> {
    if p.theta0 != which.theta0() {
        return domain(format!("{} requires theta0 = {:?}", which.as_str(), which.theta0()));
    }
    if m == 0 {
        return domain("m must be positive");
    }
    if which.requires_odd_m() && m % 2 == 0 {
        return Err(Error::Parity(format!("{} requires odd m, got m = {m}", which.as_str())));
    }
    if !(omega_hat > 0.0) {
        return domain(format!("omega_hat must be positive, got {omega_hat}"));
    }
    let cp = codim2_locus(p)?;
    let (a0, g0, d0) = (cp.alpha0, cp.gamma0, p.delta0);
    let b = p.beta * g0 * d0.powi(3) / (a0.powf(2.5) * (a0 + d0).powf(4.5));
    let c = 3f64.sqrt() * PI * b * omega_hat;
    let family = which.family();
    let k = if family.is_periodic() { Some(orbits::resonant_modulus(family, m, 1, omega_hat)?) } else { None };
    let nome = |km: &EllipticModulus| -> Result<f64> { Ok(m as f64 * PI * km.big_k_prime()? / km.big_k()?) };
    // (amplitude of the extremal value, true when the profile is in cos φ)
    let (hmax, cosine) = match which {
        Proposition::P61 => (-9.0 * c * csch(PI * omega_hat / SQRT_2), true),
        Proposition::P62 => (-18.0 * c * csch(0.5 * nome(k.as_ref().unwrap())?), true),
        Proposition::P63 => (18.0 * c * sech(0.5 * nome(k.as_ref().unwrap())?), false),
        Proposition::P64 => (9.0 * c * sech(0.5 * PI * omega_hat), false),
        Proposition::P65 => (9.0 * c * sech(nome(k.as_ref().unwrap())?), false),
        Proposition::P66 => (18.0 * c * sech(0.5 * nome(k.as_ref().unwrap())?), false),
    };
    // For θ₀ = 0 the extremum is written with a leading minus (γ₀ < 0 there),
    // so the cos φ coefficient is its negative.
    let coeff = match which {
        Proposition::P61 | Proposition::P62 => -hmax,
        _ => hmax,
    };
    let series = if cosine {
        FourierSeries::new(vec![coeff], vec![0.0])?
    } else {
        FourierSeries::new(vec![0.0], vec![coeff])?
    };
    let profile = MelnikovProfile { values: series, hmax: hmax.abs(), hmin: -hmax.abs() };
    Ok(PropositionProfile { proposition: which, m, omega_hat, k, profile })
}

/// One predicted curve pulled back to the `(α, γ)` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendulumCurve {
    pub proposition: Proposition,
    pub kind: CurveKind,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub family: Option<String>,
    pub extremum: Option<Extremum>,
    /// Slope in the `(ν₁, ν₂)` plane.
    pub nu_slope: f64,
    /// Polyline `(α, γ)` starting at the double-zero point.
    pub points: Vec<(f64, f64)>,
}

/// Lines `ν₂ = slope·ν₁` of the proposition, sampled at `|ν₁| ∈ nu1_grid` and mapped to `(α, γ)`.
pub fn proposition_curves(
    p: &PendulumParams,
    which: Proposition,
    m: u32,
    omega_hat: f64,
    delta_big: f64,
    nu1_grid: &[f64],
) -> Result<Vec<PendulumCurve>> {
    if nu1_grid.is_empty() {
        return domain("empty nu1 sweep grid");
    }
    if nu1_grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return domain("nu1 sweep grid must contain finite non-negative magnitudes");
    }
    let pp = proposition_profile(p, which, m, omega_hat)?;
    let rc = coefficients(p)?;
    let s2 = Sign::of(rc.d);
    let lines = match which {
        Proposition::P61 => bifurcation::heteroclinic_curves(s2, delta_big, &pp.profile),
        Proposition::P64 => bifurcation::homoclinic_curves(s2, delta_big, &pp.profile),
        _ => {
            let k = pp.k.unwrap();
            let fam = which.family();
            let j = melnikov::j_integrals(fam, k, 1)?;
            bifurcation::saddle_node_curves(which.theorem().unwrap(), s2, delta_big, fam, m, 1, &pp.profile, &j)?
        }
    };
    let sgn = which.nu1_sign();
    let cp = rc.codim2;
    lines
        .into_iter()
        .map(|c| {
            let points = nu1_grid
                .iter()
                .map(|&mag| {
                    let nu1 = sgn * mag;
                    let (a1, g1) = nu_map_inverse(&rc, nu1, c.slope * nu1)?;
                    Ok((cp.alpha0 + a1, cp.gamma0 + g1))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PendulumCurve {
                proposition: which,
                kind: c.kind,
                m: c.label.m,
                n: c.label.n,
                family: c.label.family,
                extremum: c.label.extremum,
                nu_slope: c.slope,
                points,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codim2_points() {
        let c = codim2_locus(&PendulumParams::case_i()).unwrap();
        assert!((c.alpha0 - 1.0).abs() < 1e-14 && (c.gamma0 + 1.0).abs() < 1e-14);
        let c = codim2_locus(&PendulumParams::case_ii()).unwrap();
        assert!((c.alpha0 - 1.0).abs() < 1e-14 && (c.gamma0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = PendulumParams::case_i();
        p.delta1 = 1.0;
        assert!(p.validate().is_err());
        let mut p = PendulumParams::case_i();
        p.delta1 = 0.5; // alpha0 = -7.5
        assert!(matches!(codim2_locus(&p), Err(Error::Degeneracy(_))));
    }

    #[test]
    fn signs_follow_sigma() {
        let p = PendulumParams::case_i().with_alpha_gamma(1.25, -1.2);
        let nf = normal_form(&p).unwrap();
        assert_eq!((nf.s1, nf.s2), (Sign::Plus, Sign::Plus));
        let p = PendulumParams::case_ii().with_alpha_gamma(1.1, 0.9);
        let nf = normal_form(&p).unwrap();
        assert_eq!((nf.s1, nf.s2), (Sign::Minus, Sign::Minus));
    }

    #[test]
    fn at_codim2_point_nu_vanishes() {
        let nf = normal_form(&PendulumParams::case_i()).unwrap();
        assert!(nf.nu1.abs() < 1e-15 && nf.nu2.abs() < 1e-15);
        assert!(reduce_pendulum(&PendulumParams::case_i()).is_err());
    }

    #[test]
    fn parity_enforced() {
        let p = PendulumParams::case_i();
        let r = proposition_profile(&p, Proposition::P62, 2, 0.8);
        assert!(matches!(r, Err(Error::Parity(_))));
        assert!(proposition_profile(&p, Proposition::P64, 1, 0.8).is_err());
    }

    #[test]
    fn scaled_forcing_recipe() {
        let p = PendulumParams::case_i().with_alpha_gamma(1.25, -1.2);
        let q = with_scaled_forcing(&p, 0.8, 1.0).unwrap();
        let (_, sp) = reduce_pendulum(&q).unwrap();
        assert!((sp.omega_hat - 0.8).abs() < 1e-12);
        assert!((sp.delta_big - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let p = PendulumParams::case_ii().with_alpha_gamma(0.8, 0.7);
        let f = vector_field(&p, 0.3, [PI, 0.0, 0.0]);
        assert!(f.iter().all(|v| v.abs() < 1e-15));
    }
}
