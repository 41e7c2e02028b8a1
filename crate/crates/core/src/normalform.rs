//! Reduction of a symmetric planar system's Taylor data to the perturbed
//! normal form `ẏ₁ = y₂`, `ẏ₂ = ν₁y₁ + ν₂y₂ + s₁y₁³ + s₂y₁²y₂ + ε h(ω̄t)`.
//!
//! Only the parameter and forcing images are computed; the near-identity
//! state-space coordinate changes are truncated at cubic order and never
//! materialised.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fourier::FourierSeries;

/// Tolerance below which `c` or `d` is treated as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn f(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.f() as i8
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", i8::from(*self))
    }
}

/// Taylor data of `ẋ = f(x; μ) + ε g(x, ωt)` at the codimension-two point.
///
/// `a[j-1][l]` is `a_{j,3-l,l} = ∂³f_j/∂x₁^{3-l}∂x₂^l`, and `b[j-1][k-1][l-1]`
/// is `b_{jkl} = ∂²f_j/∂x_k∂μ_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricSystemCoeffs {
    pub a: [[f64; 4]; 2],
    pub b: [[[f64; 2]; 2]; 2],
    pub g01: FourierSeries,
    pub g02: FourierSeries,
}

impl SymmetricSystemCoeffs {
    /// `a_{jkl}` with `k + l = 3`.
    pub fn a(&self, j: usize, k: usize, l: usize) -> f64 {
        assert!(k + l == 3 && (1..=2).contains(&j), "a_{j}{k}{l} is not a cubic coefficient");
        self.a[j - 1][l]
    }

    pub fn set_a(&mut self, j: usize, k: usize, l: usize, v: f64) {
        assert!(k + l == 3 && (1..=2).contains(&j), "a_{j}{k}{l} is not a cubic coefficient");
        self.a[j - 1][l] = v;
    }

    pub fn b(&self, j: usize, k: usize, l: usize) -> f64 {
        self.b[j - 1][k - 1][l - 1]
    }

    pub fn set_b(&mut self, j: usize, k: usize, l: usize, v: f64) {
        self.b[j - 1][k - 1][l - 1] = v;
    }

    /// `c = a₂₃₀/6`.
    pub fn c(&self) -> f64 {
        self.a(2, 3, 0) / 6.0
    }

    /// `d = (a₂₂₁ + a₁₃₀)/2`.
    pub fn d(&self) -> f64 {
        0.5 * (self.a(2, 2, 1) + self.a(1, 3, 0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormParams {
    pub nu1: f64,
    pub nu2: f64,
    pub s1: Sign,
    pub s2: Sign,
    pub omega_bar: f64,
    pub c: f64,
    pub d: f64,
    pub h: FourierSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Nu1Negative,
    Nu1Positive,
}

impl Branch {
    pub fn nu1_sign(self) -> f64 {
        match self {
            Branch::Nu1Negative => -1.0,
            Branch::Nu1Positive => 1.0,
        }
    }
}

/// Blow-up coordinates `(ε̂, ν̂, ω̂, Δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    pub eps_hat: f64,
    pub nu_hat: f64,
    pub omega_hat: f64,
    pub delta_big: f64,
    pub branch: Branch,
}

impl ScaledParams {
    /// Forcing period `T̂ = 2π/ω̂` in the scaled time.
    pub fn t_hat(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_hat
    }
}

/// Parameter and forcing images of the normal-form reduction at `μ` and forcing frequency `ω`.
pub fn reduce(coeffs: &SymmetricSystemCoeffs, mu: (f64, f64), omega: f64) -> Result<NormalFormParams> {
    let c = coeffs.c();
    let d = coeffs.d();
    if c.abs() < DEGENERACY_TOL {
        return Err(Error::Degeneracy(format!("c = a230/6 = {c:e} vanishes")));
    }
    if d.abs() < DEGENERACY_TOL {
        return Err(Error::Degeneracy(format!("d = (a221 + a130)/2 = {d:e} vanishes")));
    }
    if !(omega > 0.0) {
        return domain(format!("forcing frequency must be positive, got {omega}"));
    }
    let r = (d / c).abs();
    let (mu1, mu2) = mu;
    let nu1 = r * r * (coeffs.b(2, 1, 1) * mu1 + coeffs.b(2, 1, 2) * mu2);
    let nu2 = r
        * ((coeffs.b(1, 1, 1) + coeffs.b(2, 2, 1)) * mu1 + (coeffs.b(1, 1, 2) + coeffs.b(2, 2, 2)) * mu2);
    let h = coeffs.g02.scaled(d.abs().powi(3) / c.abs().powf(2.5));
    Ok(NormalFormParams {
        nu1,
        nu2,
        s1: Sign::of(c),
        s2: Sign::of(d),
        omega_bar: r * omega,
        c,
        d,
        h,
    })
}

/// Blow-up scaling at forcing amplitude `eps`.
pub fn scale(nf: &NormalFormParams, eps: f64) -> Result<ScaledParams> {
    if nf.nu1 == 0.0 {
        return domain("scaling undefined for nu1 = 0 (on pitchfork line)");
    }
    if !(eps > 0.0) {
        return domain(format!("forcing amplitude must be positive, got {eps}"));
    }
    let eps_hat = nf.nu1.abs().sqrt();
    let (branch, nu_hat) = if nf.nu1 < 0.0 {
        (Branch::Nu1Negative, -nf.nu2 / nf.nu1)
    } else {
        (Branch::Nu1Positive, nf.nu2 / nf.nu1)
    };
    Ok(ScaledParams {
        eps_hat,
        nu_hat,
        omega_hat: nf.omega_bar / eps_hat,
        delta_big: eps / eps_hat.powi(4),
        branch,
    })
}

/// Inverse of [`scale`]: returns `(ν₁, ν₂, ω̄, ε)`.
pub fn unscale(sp: &ScaledParams) -> (f64, f64, f64, f64) {
    let e2 = sp.eps_hat * sp.eps_hat;
    let nu1 = sp.branch.nu1_sign() * e2;
    let nu2 = sp.nu_hat * e2;
    (nu1, nu2, sp.omega_hat * sp.eps_hat, sp.delta_big * e2 * e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(nu1: f64, nu2: f64, omega_bar: f64) -> NormalFormParams {
        NormalFormParams {
            nu1,
            nu2,
            s1: Sign::Plus,
            s2: Sign::Plus,
            omega_bar,
            c: 1.0,
            d: 1.0,
            h: FourierSeries::zero(),
        }
    }

    #[test]
    fn scale_arithmetic() {
        let sp = scale(&nf(-0.01, 0.002, 0.08), 1e-4).unwrap();
        assert_eq!(sp.branch, Branch::Nu1Negative);
        assert!((sp.eps_hat - 0.1).abs() < 1e-15);
        assert!((sp.nu_hat - 0.2).abs() < 1e-15);
        assert!((sp.omega_hat - 0.8).abs() < 1e-15);
        assert!((sp.delta_big - 1.0).abs() < 1e-12);

        let sp = scale(&nf(0.04, -0.02, 0.1), 1e-3).unwrap();
        assert_eq!(sp.branch, Branch::Nu1Positive);
        assert!((sp.nu_hat + 0.5).abs() < 1e-15);
    }

    #[test]
    fn scale_rejects_pitchfork_line() {
        assert!(matches!(scale(&nf(0.0, 0.1, 1.0), 1e-3), Err(Error::Domain(_))));
    }

    #[test]
    fn sign_serde() {
        assert_eq!(serde_json::to_string(&Sign::Minus).unwrap(), "-1");
        assert!(serde_json::from_str::<Sign>("0").is_err());
    }
}
