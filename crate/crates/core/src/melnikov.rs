//! Melnikov objects for the scaled systems: the separatrix profile `ĥ`, the
//! subharmonic profile `ĥ^{m/n}`, the integrals `J₁, J₂, J₃`, and the
//! functions `M±`, `M^{m/n}`, `L^{m/n}` built from them.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, EllipticModulus};
use crate::error::{domain, Error, Result};
use crate::fourier::FourierSeries;
use crate::normalform::Sign;
use crate::orbits::{self, FamilyKind};
use crate::quad;

/// Tolerance on `|n T^k - m T̂| / (m T̂)` accepted by [`h_hat_subharmonic`].
pub const RESONANCE_TOL: f64 = 1e-10;

/// A mean-zero profile together with its extrema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelnikovProfile {
    pub values: FourierSeries,
    pub hmax: f64,
    pub hmin: f64,
}

impl MelnikovProfile {
    pub fn from_series(values: FourierSeries) -> Self {
        let (hmax, hmin) = values.extrema();
        Self { values, hmax, hmin }
    }

    pub fn zero() -> Self {
        Self { values: FourierSeries::zero(), hmax: 0.0, hmin: 0.0 }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.values.eval(phi)
    }

    pub fn negated(&self) -> Self {
        Self { values: self.values.scaled(-1.0), hmax: -self.hmin, hmin: -self.hmax }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JIntegrals {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub family: FamilyKind,
    pub k: EllipticModulus,
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparatrixKind {
    Het,
    Hom,
}

/// `∫ ζ₂₊ʰ(t) e^{iχt} dt` for the heteroclinic orbit (real and even in χ).
pub fn fourier_weight_het(chi: f64) -> f64 {
    let x = SQRT_2 * PI * chi;
    if x.abs() < 1e-8 {
        // x csch(x/2) = 2 - x²/12 + ...
        return 2.0 - x * x / 12.0;
    }
    if x.abs() > 1400.0 {
        return 0.0;
    }
    x / (0.5 * x).sinh()
}

/// `√2 πχ sech(πχ/2)`, where `∫ ζ₂₊ʰ(t) e^{iχt} dt = -i·fourier_weight_hom(χ)` for the
/// homoclinic orbit `ζ₂₊ʰ = -√2 sech t tanh t`. Odd in χ.
pub fn fourier_weight_hom(chi: f64) -> f64 {
    let y = 0.5 * PI * chi;
    if y.abs() > 700.0 {
        return 0.0;
    }
    SQRT_2 * PI * chi / y.cosh()
}

/// `(C_j, S_j) = ∫ w(t) (cos, sin)(jω̂t) dt` assembled into `ĥ(φ) = ∫ w(t) h(ω̂t + φ) dt`.
fn assemble(h: &FourierSeries, mut weights: impl FnMut(usize) -> (f64, f64)) -> FourierSeries {
    let n = h.harmonics();
    let mut cos = vec![0.0; n];
    let mut sin = vec![0.0; n];
    for j in 0..n {
        let (a, b) = (h.cos[j], h.sin[j]);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let (c, s) = weights(j + 1);
        cos[j] = a * c + b * s;
        sin[j] = -a * s + b * c;
    }
    FourierSeries { cos, sin, pure_cosine: false }
}

/// `ĥ(φ) = ∫ ζ₂ʰ(t) h(ω̂t + φ) dt` along the given separatrix member, built in Fourier space.
pub fn h_hat(h: &FourierSeries, family: FamilyKind, omega_hat: f64) -> Result<MelnikovProfile> {
    let series = match family {
        FamilyKind::HetPair(_) => assemble(h, |j| (fourier_weight_het(j as f64 * omega_hat), 0.0)),
        FamilyKind::HomPair(_) => assemble(h, |j| (0.0, -fourier_weight_hom(j as f64 * omega_hat))),
        _ => return domain(format!("{} is not a separatrix family", family.name())),
    };
    let series = series.scaled(family.sign().f());
    Ok(MelnikovProfile::from_series(series))
}

/// `ĥ^{m/n}(φ) = ∫₀^{mT̂} ζ₂^k(t) h(ω̂t + φ) dt` by period-chunked Gauss–Kronrod quadrature.
pub fn h_hat_subharmonic(
    h: &FourierSeries,
    family: FamilyKind,
    k: EllipticModulus,
    m: u32,
    n: u32,
    omega_hat: f64,
) -> Result<MelnikovProfile> {
    let t_hat = 2.0 * PI / omega_hat;
    let span = m as f64 * t_hat;
    let tk = orbits::period(family, k)?;
    let residual = (n as f64 * tk - span).abs();
    if residual > RESONANCE_TOL * span {
        return Err(Error::ResonanceViolation { residual, tol: RESONANCE_TOL * span });
    }
    let scale = span.max(1.0);
    let series = assemble(h, |j| {
        let w = j as f64 * omega_hat;
        let panels = (4 * j * m as usize).max(8 * n as usize);
        let zeta2 = |t: f64| orbits::evaluate(family, Some(k), t).map(|p| p.zeta2).unwrap_or(0.0);
        let c = quad::integrate_panels(&mut |t| zeta2(t) * (w * t).cos(), 0.0, span, panels, 1e-14 * scale, 1e-13);
        let s = quad::integrate_panels(&mut |t| zeta2(t) * (w * t).sin(), 0.0, span, panels, 1e-14 * scale, 1e-13);
        (c, s)
    });
    Ok(MelnikovProfile::from_series(series))
}

/// Closed-form `J₁ = ∫ζ₂²`, `J₂ = ∫ζ₁²ζ₂²`, `J₃ = ∫ζ₁²` over `n` orbit periods.
pub fn j_integrals(family: FamilyKind, k: EllipticModulus, n: u32) -> Result<JIntegrals> {
    if !family.is_periodic() {
        return domain(format!("{} is not a periodic family", family.name()));
    }
    if n == 0 {
        return domain("n must be positive");
    }
    // Range check through the period evaluator.
    orbits::period(family, k)?;
    let k2 = k.k() * k.k();
    let big_k = complete_k(k)?;
    let big_e = k.big_e();
    let nf = n as f64;
    // `a(m)E + b(m)K` with `m = k²`; polynomial coefficients in ascending order.
    let ek = |a: &[f64], b: &[f64]| ek_combination(a, b, k2, big_e, big_k);
    let common = ek(&[2.0, -2.0, 2.0], &[-2.0, 3.0, -1.0]);
    let (j1, j2, j3) = match family {
        FamilyKind::PeriodicInsideHet => {
            let a = k2 + 1.0;
            (
                8.0 * nf / (3.0 * a.powf(1.5)) * ek(&[1.0, 1.0], &[-1.0, 1.0]),
                16.0 * nf / (15.0 * a.powf(2.5)) * common,
                8.0 * nf / a.sqrt() * ek(&[-1.0], &[1.0]),
            )
        }
        FamilyKind::PeriodicGlobal2a => {
            let a = 1.0 - 2.0 * k2;
            (
                8.0 * nf / (3.0 * a.powf(1.5)) * ek(&[-1.0, 2.0], &[1.0, -1.0]),
                16.0 * nf / (15.0 * a.powf(2.5)) * common,
                8.0 * nf / a.sqrt() * ek(&[1.0], &[-1.0, 1.0]),
            )
        }
        FamilyKind::PeriodicInsideHom(_) => {
            let a = 2.0 - k2;
            (
                4.0 * nf / (3.0 * a.powf(1.5)) * ek(&[2.0, -1.0], &[-2.0, 2.0]),
                8.0 * nf / (15.0 * a.powf(2.5)) * common,
                4.0 * nf * big_e / a.sqrt(),
            )
        }
        FamilyKind::PeriodicOutsideHom => {
            let a = 2.0 * k2 - 1.0;
            (
                8.0 * nf / (3.0 * a.powf(1.5)) * ek(&[-1.0, 2.0], &[1.0, -1.0]),
                16.0 * nf / (15.0 * a.powf(2.5)) * common,
                8.0 * nf / a.sqrt() * ek(&[1.0], &[-1.0, 1.0]),
            )
        }
        _ => unreachable!(),
    };
    Ok(JIntegrals { j1, j2, j3, family, k, n })
}

/// `a(m)E(m) + b(m)K(m)` for polynomials `a`, `b`. For `m < 1/4` the combination is
/// summed from the hypergeometric series so that low-order cancellation is exact.
fn ek_combination(a: &[f64], b: &[f64], m: f64, big_e: f64, big_k: f64) -> f64 {
    let poly = |c: &[f64]| c.iter().rev().fold(0.0, |acc, x| acc * m + x);
    if m >= 0.25 {
        return poly(a) * big_e + poly(b) * big_k;
    }
    // K = π/2 Σ cₙ mⁿ, E = π/2 Σ −cₙ mⁿ/(2n − 1), cₙ = (binom(2n, n)/4ⁿ)².
    const TERMS: usize = 80;
    let mut kc = [0.0; TERMS];
    let mut ec = [0.0; TERMS];
    let mut r = 1.0f64;
    for j in 0..TERMS {
        if j > 0 {
            r *= (2 * j - 1) as f64 / (2 * j) as f64;
        }
        kc[j] = r * r;
        ec[j] = -r * r / (2.0 * j as f64 - 1.0);
    }
    let mut sum = 0.0;
    let mut mp = 1.0;
    for j in 0..TERMS {
        let mut d = 0.0;
        for (i, &ai) in a.iter().enumerate().take(j + 1) {
            d += ai * ec[j - i];
        }
        for (i, &bi) in b.iter().enumerate().take(j + 1) {
            d += bi * kc[j - i];
        }
        sum += d * mp;
        mp *= m;
        if mp < 1e-30 {
            break;
        }
    }
    std::f64::consts::FRAC_PI_2 * sum
}

/// The same integrals by adaptive quadrature of the orbit over `n T^k`.
pub fn j_integrals_by_quadrature(family: FamilyKind, k: EllipticModulus, n: u32) -> Result<JIntegrals> {
    let span = n as f64 * orbits::period(family, k)?;
    let panels = 16 * n as usize;
    let pt = |t: f64| orbits::evaluate(family, Some(k), t).unwrap();
    let q = |f: &mut dyn FnMut(f64) -> f64| quad::integrate_panels(f, 0.0, span, panels, 1e-300, 1e-14);
    let j1 = q(&mut |t| pt(t).zeta2.powi(2));
    let j2 = q(&mut |t| {
        let p = pt(t);
        (p.zeta1 * p.zeta2).powi(2)
    });
    let j3 = q(&mut |t| pt(t).zeta1.powi(2));
    Ok(JIntegrals { j1, j2, j3, family, k, n })
}

/// `M±(φ) = a ν̂ + b s₂ ± Δĥ(φ)` along a separatrix pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatrixMelnikov {
    pub kind: SeparatrixKind,
    pub nu_hat: f64,
    pub s2: Sign,
    pub delta_big: f64,
    pub hhat: MelnikovProfile,
}

impl SeparatrixMelnikov {
    /// `(∂M/∂ν̂, coefficient of s₂)`.
    pub fn coefficients(kind: SeparatrixKind) -> (f64, f64) {
        match kind {
            SeparatrixKind::Het => (4.0 / (3.0 * SQRT_2), 2.0 * SQRT_2 / 15.0),
            SeparatrixKind::Hom => (4.0 / 3.0, 16.0 / 15.0),
        }
    }

    /// The φ-independent part `a ν̂ + b s₂`.
    pub fn offset(&self) -> f64 {
        let (a, b) = Self::coefficients(self.kind);
        a * self.nu_hat + b * self.s2.f()
    }

    pub fn eval(&self, phi: f64) -> (f64, f64) {
        let c = self.offset();
        let dh = self.delta_big * self.hhat.eval(phi);
        (c + dh, c - dh)
    }

    /// Whether `M₊` (resp. `M₋`) takes both signs over a period.
    pub fn crosses_zero(&self) -> (bool, bool) {
        let c = self.offset();
        let (lo, hi) = (self.delta_big * self.hhat.hmin, self.delta_big * self.hhat.hmax);
        let plus = c + lo < 0.0 && c + hi > 0.0;
        let minus = c - hi < 0.0 && c - lo > 0.0;
        (plus, minus)
    }
}

pub fn melnikov_separatrix(
    nu_hat: f64,
    s2: Sign,
    delta_big: f64,
    hhat: &MelnikovProfile,
    kind: SeparatrixKind,
) -> SeparatrixMelnikov {
    SeparatrixMelnikov { kind, nu_hat, s2, delta_big, hhat: hhat.clone() }
}

/// `M^{m/n}(φ) = ν̂J₁ + s₂J₂ + Δĥ^{m/n}(φ)` and `L^{m/n} = mν̂T̂ + s₂J₃`.
///
/// `hhatmn` is the profile of the member in `j.family`, so the `±` of the
/// inside-homoclinic pair is carried by the family sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicMelnikov {
    pub nu_hat: f64,
    pub s2: Sign,
    pub delta_big: f64,
    pub j: JIntegrals,
    pub hhatmn: MelnikovProfile,
    pub m: u32,
    pub t_hat: f64,
}

impl SubharmonicMelnikov {
    pub fn m_at(&self, phi: f64) -> f64 {
        self.nu_hat * self.j.j1 + self.s2.f() * self.j.j2 + self.delta_big * self.hhatmn.eval(phi)
    }

    pub fn l(&self) -> f64 {
        self.m as f64 * self.nu_hat * self.t_hat + self.s2.f() * self.j.j3
    }
}

pub fn melnikov_subharmonic(
    nu_hat: f64,
    s2: Sign,
    delta_big: f64,
    j: &JIntegrals,
    hhatmn: &MelnikovProfile,
    m: u32,
    t_hat: f64,
) -> SubharmonicMelnikov {
    SubharmonicMelnikov { nu_hat, s2, delta_big, j: *j, hhatmn: hhatmn.clone(), m, t_hat }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    #[test]
    fn weights_at_zero_and_infinity() {
        assert_eq!(fourier_weight_het(0.0), 2.0);
        assert!(fourier_weight_het(20.0) < 1e-8);
        assert!(fourier_weight_het(-3.0) == fourier_weight_het(3.0));
        assert_eq!(fourier_weight_hom(0.0), 0.0);
        assert!(fourier_weight_hom(-1.0) == -fourier_weight_hom(1.0));
    }

    #[test]
    fn inside_hom_j3_display() {
        let j = j_integrals(FamilyKind::PeriodicInsideHom(Sign::Plus), md(0.6), 1).unwrap();
        let e = md(0.6).big_e();
        assert!((j.j3 - 4.0 * e / (2.0f64 - 0.36).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_reference_values() {
        // Reference values from arbitrary-precision quadrature of the defining integrals.
        let cases = [
            (FamilyKind::PeriodicInsideHet, 0.5, [1.08765207746, 0.105070532289, 1.56194282227]),
            (FamilyKind::PeriodicGlobal2a, 0.4, [1.68138816415, 0.20225940003, 1.24509761997]),
            (FamilyKind::PeriodicInsideHom(Sign::Plus), 0.6, [0.0537668800565, 0.0534395411249, 4.42934836766]),
            (FamilyKind::PeriodicOutsideHom, 0.85, [10.1690646725, 9.81707227983, 7.70639965929]),
        ];
        for (fam, k, want) in cases {
            let j = j_integrals(fam, md(k), 1).unwrap();
            for (got, w) in [j.j1, j.j2, j.j3].iter().zip(want) {
                assert!((got - w).abs() / w < 1e-10, "{} k={k}: {got} vs {w}", fam.name());
            }
        }
    }

    #[test]
    fn separatrix_unperturbed_roots() {
        let zero = MelnikovProfile::zero();
        let het = melnikov_separatrix(-0.2, Sign::Plus, 1.0, &zero, SeparatrixKind::Het);
        assert!(het.offset().abs() < 1e-15);
        let hom = melnikov_separatrix(-0.8, Sign::Plus, 1.0, &zero, SeparatrixKind::Hom);
        assert!(hom.offset().abs() < 1e-15);
    }

    #[test]
    fn subharmonic_affine_root() {
        let j = j_integrals(FamilyKind::PeriodicInsideHet, md(0.5), 1).unwrap();
        let nu = -j.j2 / j.j1;
        let mm = melnikov_subharmonic(nu, Sign::Plus, 1.0, &j, &MelnikovProfile::zero(), 1, 10.0);
        assert!(mm.m_at(1.3).abs() < 1e-15);
    }
}
