//! Unperturbed solution families of the three scaled Hamiltonian systems
//!
//! * `Psys1`:  `ζ̈₁ = -ζ₁ + ζ₁³`  (two saddles at `(±1, 0)`, heteroclinic pair)
//! * `Psys2a`: `ζ̈₁ = -ζ₁ - ζ₁³`  (global center)
//! * `Psys2b`: `ζ̈₁ =  ζ₁ - ζ₁³`  (saddle at the origin, homoclinic pair)

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, jacobi_sn_cn_dn, EllipticModulus, K_CUTOFF};
use crate::error::{domain, Error, Result};
use crate::normalform::Sign;
use crate::quad;

/// Beyond this `|t|` the separatrix evaluators return the saddle point.
pub const SEPARATRIX_CLAMP: f64 = 50.0;

const BISECTION_MAX_ITER: usize = 200;

/// Which scaled planar system a family belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScaledSystem {
    Psys1,
    Psys2a,
    Psys2b,
}

impl ScaledSystem {
    /// `(l, q)` with unperturbed acceleration `l ζ₁ + q ζ₁³`.
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            ScaledSystem::Psys1 => (-1.0, 1.0),
            ScaledSystem::Psys2a => (-1.0, -1.0),
            ScaledSystem::Psys2b => (1.0, -1.0),
        }
    }

    pub fn hamiltonian(self, z: OrbitPoint) -> f64 {
        let (l, q) = self.coefficients();
        let z1 = z.zeta1 * z.zeta1;
        0.5 * z.zeta2 * z.zeta2 - 0.5 * l * z1 - 0.25 * q * z1 * z1
    }

    pub fn name(self) -> &'static str {
        match self {
            ScaledSystem::Psys1 => "psys1",
            ScaledSystem::Psys2a => "psys2a",
            ScaledSystem::Psys2b => "psys2b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    HetPair(Sign),
    PeriodicInsideHet,
    PeriodicGlobal2a,
    HomPair(Sign),
    PeriodicInsideHom(Sign),
    PeriodicOutsideHom,
}

/// The five periodic families, with both members of the inside-homoclinic pair.
pub const PERIODIC_FAMILIES: [FamilyKind; 5] = [
    FamilyKind::PeriodicInsideHet,
    FamilyKind::PeriodicGlobal2a,
    FamilyKind::PeriodicInsideHom(Sign::Plus),
    FamilyKind::PeriodicInsideHom(Sign::Minus),
    FamilyKind::PeriodicOutsideHom,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub zeta1: f64,
    pub zeta2: f64,
}

impl OrbitPoint {
    pub fn new(zeta1: f64, zeta2: f64) -> Self {
        Self { zeta1, zeta2 }
    }
}

impl FamilyKind {
    pub fn system(self) -> ScaledSystem {
        match self {
            FamilyKind::HetPair(_) | FamilyKind::PeriodicInsideHet => ScaledSystem::Psys1,
            FamilyKind::PeriodicGlobal2a => ScaledSystem::Psys2a,
            _ => ScaledSystem::Psys2b,
        }
    }

    pub fn is_periodic(self) -> bool {
        !matches!(self, FamilyKind::HetPair(_) | FamilyKind::HomPair(_))
    }

    /// Pair sign, `+1` for unpaired families.
    pub fn sign(self) -> Sign {
        match self {
            FamilyKind::HetPair(s) | FamilyKind::HomPair(s) | FamilyKind::PeriodicInsideHom(s) => s,
            _ => Sign::Plus,
        }
    }

    pub fn name(self) -> String {
        let s = |s: Sign| if s == Sign::Plus { "+" } else { "-" };
        match self {
            FamilyKind::HetPair(g) => format!("het{}", s(g)),
            FamilyKind::PeriodicInsideHet => "inside-het".into(),
            FamilyKind::PeriodicGlobal2a => "global-2a".into(),
            FamilyKind::HomPair(g) => format!("hom{}", s(g)),
            FamilyKind::PeriodicInsideHom(g) => format!("inside-hom{}", s(g)),
            FamilyKind::PeriodicOutsideHom => "outside-hom".into(),
        }
    }

    /// Admissible modulus interval `(lo, hi)` for periodic families.
    pub fn k_range(self) -> Option<(f64, f64)> {
        match self {
            FamilyKind::PeriodicInsideHet | FamilyKind::PeriodicInsideHom(_) => Some((0.0, 1.0)),
            FamilyKind::PeriodicGlobal2a => Some((0.0, FRAC_1_SQRT_2)),
            FamilyKind::PeriodicOutsideHom => Some((FRAC_1_SQRT_2, 1.0)),
            _ => None,
        }
    }

    /// `a(k)` with time scale `√a` in the closed form.
    fn scale_sq(self, k: f64) -> f64 {
        let k2 = k * k;
        match self {
            FamilyKind::PeriodicInsideHet => k2 + 1.0,
            FamilyKind::PeriodicGlobal2a => 1.0 - 2.0 * k2,
            FamilyKind::PeriodicInsideHom(_) => 2.0 - k2,
            FamilyKind::PeriodicOutsideHom => 2.0 * k2 - 1.0,
            _ => unreachable!("separatrix families have no modulus"),
        }
    }

    /// Quarter periods of the Jacobi argument per orbit period (4, or 2 for `dn`).
    fn quarter_count(self) -> f64 {
        match self {
            FamilyKind::PeriodicInsideHom(_) => 2.0,
            _ => 4.0,
        }
    }
}

fn check_k(family: FamilyKind, k: EllipticModulus) -> Result<()> {
    let Some((lo, hi)) = family.k_range() else {
        return domain(format!("{} is a separatrix family with no modulus", family.name()));
    };
    let kv = k.k();
    // The lower end is the center limit for every family except outside-hom.
    let lower_ok = if family == FamilyKind::PeriodicOutsideHom { kv > lo } else { kv >= lo };
    if !lower_ok || kv >= hi {
        return domain(format!("k = {kv} outside ({lo}, {hi}) for {}", family.name()));
    }
    Ok(())
}

/// Point of the unperturbed orbit at time `t`; `k` must be `None` exactly for separatrices.
pub fn evaluate(family: FamilyKind, k: Option<EllipticModulus>, t: f64) -> Result<OrbitPoint> {
    match (family, k) {
        (FamilyKind::HetPair(s), None) => {
            let g = s.f();
            if t.abs() > SEPARATRIX_CLAMP {
                return Ok(OrbitPoint::new(g * t.signum(), 0.0));
            }
            let x = t * FRAC_1_SQRT_2;
            let sech = 1.0 / x.cosh();
            Ok(OrbitPoint::new(g * x.tanh(), g * FRAC_1_SQRT_2 * sech * sech))
        }
        (FamilyKind::HomPair(s), None) => {
            if t.abs() > SEPARATRIX_CLAMP {
                return Ok(OrbitPoint::new(0.0, 0.0));
            }
            let g = s.f();
            let sech = 1.0 / t.cosh();
            Ok(OrbitPoint::new(g * SQRT_2 * sech, -g * SQRT_2 * sech * t.tanh()))
        }
        (FamilyKind::HetPair(_) | FamilyKind::HomPair(_), Some(_)) => {
            domain("separatrix families take no modulus")
        }
        (_, None) => domain(format!("{} requires a modulus", family.name())),
        (_, Some(m)) => {
            check_k(family, m)?;
            Ok(evaluate_periodic(family, m, t))
        }
    }
}

fn evaluate_periodic(family: FamilyKind, m: EllipticModulus, t: f64) -> OrbitPoint {
    let k = m.k();
    let a = family.scale_sq(k);
    let sa = a.sqrt();
    let (sn, cn, dn) = jacobi_sn_cn_dn(t / sa, m);
    match family {
        FamilyKind::PeriodicInsideHet => {
            OrbitPoint::new(SQRT_2 * k / sa * sn, SQRT_2 * k / a * cn * dn)
        }
        FamilyKind::PeriodicGlobal2a | FamilyKind::PeriodicOutsideHom => {
            OrbitPoint::new(SQRT_2 * k / sa * cn, -SQRT_2 * k / a * sn * dn)
        }
        FamilyKind::PeriodicInsideHom(s) => {
            let g = s.f();
            OrbitPoint::new(g * (2.0 / a).sqrt() * dn, -g * SQRT_2 * k * k / a * sn * cn)
        }
        _ => unreachable!(),
    }
}

fn period_unchecked(family: FamilyKind, m: EllipticModulus) -> f64 {
    let a = family.scale_sq(m.k()).max(0.0);
    family.quarter_count() * complete_k(m).unwrap_or(f64::INFINITY) * a.sqrt()
}

pub fn period(family: FamilyKind, k: EllipticModulus) -> Result<f64> {
    if !family.is_periodic() {
        return domain(format!("{} has infinite period", family.name()));
    }
    check_k(family, k)?;
    complete_k(k)?;
    Ok(period_unchecked(family, k))
}

/// Hamiltonian level of the family; separatrices return their saddle level.
pub fn energy(family: FamilyKind, k: Option<EllipticModulus>) -> Result<f64> {
    match (family, k) {
        (FamilyKind::HetPair(_), None) => Ok(0.25),
        (FamilyKind::HomPair(_), None) => Ok(0.0),
        (_, Some(m)) if family.is_periodic() => {
            check_k(family, m)?;
            let k2 = m.k() * m.k();
            let a = family.scale_sq(m.k());
            Ok(match family {
                FamilyKind::PeriodicInsideHet => k2 / (a * a),
                FamilyKind::PeriodicInsideHom(_) => (k2 - 1.0) / (a * a),
                _ => k2 * (1.0 - k2) / (a * a),
            })
        }
        _ => domain(format!("energy of {} with modulus {:?}", family.name(), k.map(|m| m.k()))),
    }
}

/// Action `I = (1/2π) ∫₀^T ζ₂² dt`, by adaptive quadrature.
pub fn action(family: FamilyKind, k: EllipticModulus) -> Result<f64> {
    let t = period(family, k)?;
    let v = quad::integrate_panels(
        &mut |s| {
            let z = evaluate_periodic(family, k, s);
            z.zeta2 * z.zeta2
        },
        0.0,
        t,
        8,
        1e-15,
        1e-13,
    );
    Ok(v / (2.0 * PI))
}

/// Sign of `dΩ/dI` along the family, `Ω = 2π/T`.
pub fn freq_action_derivative_sign(family: FamilyKind) -> Result<Sign> {
    match family {
        FamilyKind::PeriodicInsideHet | FamilyKind::PeriodicInsideHom(_) => Ok(Sign::Minus),
        FamilyKind::PeriodicGlobal2a | FamilyKind::PeriodicOutsideHom => Ok(Sign::Plus),
        _ => domain(format!("{} is not a periodic family", family.name())),
    }
}

/// Modulus solving `n T^k = m 2π/ω̂` by bisection on the monotone period map.
pub fn resonant_modulus(family: FamilyKind, m: u32, n: u32, omega_hat: f64) -> Result<EllipticModulus> {
    if !family.is_periodic() {
        return domain(format!("{} has no resonant modulus", family.name()));
    }
    if m == 0 || n == 0 {
        return domain("resonance orders m, n must be positive");
    }
    if gcd(m, n) != 1 {
        return domain(format!("m = {m} and n = {n} are not coprime"));
    }
    if !(omega_hat > 0.0) {
        return domain(format!("omega_hat must be positive, got {omega_hat}"));
    }
    let (lo, hi) = family.k_range().unwrap();
    let hi = hi.min(K_CUTOFF);
    let target = m as f64 * 2.0 * PI / omega_hat / n as f64;
    let t_of = |k: f64| period_unchecked(family, EllipticModulus::new(k).unwrap());
    let (tlo, thi) = (t_of(lo), t_of(hi));
    let (pmin, pmax) = (tlo.min(thi), tlo.max(thi));
    let tol = 1e-12 * target;
    // Accept the center limit as a boundary root.
    if family != FamilyKind::PeriodicOutsideHom && (tlo - target).abs() <= tol {
        return EllipticModulus::new(lo);
    }
    if target <= pmin || target >= pmax {
        return Err(Error::NoResonance { target, lo: pmin, hi: pmax });
    }
    let increasing = thi > tlo;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (t_of(mid) < target) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    let k = if (t_of(a) - target).abs() <= (t_of(b) - target).abs() { a } else { b };
    EllipticModulus::new(k)
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    #[test]
    fn separatrix_anchor_points() {
        let p = evaluate(FamilyKind::HetPair(Sign::Plus), None, 0.0).unwrap();
        assert_eq!((p.zeta1, p.zeta2), (0.0, FRAC_1_SQRT_2));
        let p = evaluate(FamilyKind::HomPair(Sign::Plus), None, 0.0).unwrap();
        assert_eq!((p.zeta1, p.zeta2), (SQRT_2, 0.0));
        let p = evaluate(FamilyKind::HetPair(Sign::Minus), None, 80.0).unwrap();
        assert_eq!((p.zeta1, p.zeta2), (-1.0, 0.0));
    }

    #[test]
    fn modulus_ranges_enforced() {
        assert!(evaluate(FamilyKind::PeriodicGlobal2a, Some(md(0.75)), 0.0).is_err());
        assert!(evaluate(FamilyKind::PeriodicOutsideHom, Some(md(0.6)), 0.0).is_err());
        assert!(evaluate(FamilyKind::HetPair(Sign::Plus), Some(md(0.5)), 0.0).is_err());
        assert!(evaluate(FamilyKind::PeriodicInsideHet, None, 0.0).is_err());
        assert!(period(FamilyKind::HomPair(Sign::Plus), md(0.5)).is_err());
    }

    #[test]
    fn linear_limit_periods() {
        assert!((period(FamilyKind::PeriodicInsideHet, md(0.0)).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((period(FamilyKind::PeriodicGlobal2a, md(0.0)).unwrap() - 2.0 * PI).abs() < 1e-14);
        let t = period(FamilyKind::PeriodicInsideHom(Sign::Plus), md(0.0)).unwrap();
        assert!((t - PI * SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn energy_limits() {
        let e = energy(FamilyKind::PeriodicInsideHet, Some(md(1.0 - 1e-9))).unwrap();
        assert!((e - 0.25).abs() < 1e-8);
        let e = energy(FamilyKind::PeriodicInsideHom(Sign::Minus), Some(md(1.0 - 1e-9))).unwrap();
        assert!(e.abs() < 1e-8);
    }

    #[test]
    fn resonance_below_infimum() {
        let r = resonant_modulus(FamilyKind::PeriodicInsideHet, 1, 1, 1.2);
        assert!(matches!(r, Err(Error::NoResonance { .. })));
        let k = resonant_modulus(FamilyKind::PeriodicGlobal2a, 1, 1, 1.0).unwrap();
        assert!(k.k() < 1e-6);
        assert!(resonant_modulus(FamilyKind::PeriodicInsideHet, 2, 4, 0.5).is_err());
    }

    #[test]
    fn gcd_small() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(5, 3), 1);
    }
}
