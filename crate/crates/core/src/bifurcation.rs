//! Predicted bifurcation sets in the `(ν₁, ν₂)` plane. Every set is a line
//! `ν₂ = slope·ν₁` through the origin on one half-plane of `ν₁`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fourier::FourierSeries;
use crate::melnikov::{self, JIntegrals, MelnikovProfile, SeparatrixMelnikov, SeparatrixKind};
use crate::normalform::Sign;
use crate::orbits::{self, FamilyKind};

/// Unperturbed saddle-node-of-cycles constant for `s₁ = -1` (approximate; display only).
pub const CYCLE_FOLD_CONSTANT: f64 = 0.752;

/// `|L|` below which no stability verdict is issued.
pub const DEGENERATE_L_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    Heteroclinic,
    Homoclinic,
    SaddleNode,
    Pitchfork,
    Hopf,
    DoubleHopf,
    UnperturbedSaddleConnection,
    UnperturbedHomoclinic,
    UnperturbedCycleFold,
    HopfCandidate,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Heteroclinic => "heteroclinic",
            CurveKind::Homoclinic => "homoclinic",
            CurveKind::SaddleNode => "saddle-node",
            CurveKind::Pitchfork => "pitchfork",
            CurveKind::Hopf => "hopf",
            CurveKind::DoubleHopf => "double-hopf",
            CurveKind::UnperturbedSaddleConnection => "unperturbed-saddle-connection",
            CurveKind::UnperturbedHomoclinic => "unperturbed-homoclinic",
            CurveKind::UnperturbedCycleFold => "unperturbed-cycle-fold",
            CurveKind::HopfCandidate => "hopf-candidate",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    pub fn as_str(self) -> &'static str {
        match self {
            Extremum::Max => "max",
            Extremum::Min => "min",
        }
    }

    pub fn pick(self, p: &MelnikovProfile) -> f64 {
        match self {
            Extremum::Max => p.hmax,
            Extremum::Min => p.hmin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CurveLabel {
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub family: Option<String>,
    pub extremum: Option<Extremum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCurve {
    pub kind: CurveKind,
    /// `ν₂/ν₁`; infinite for the pitchfork line `ν₁ = 0`.
    pub slope: f64,
    /// Half-plane of validity: `-1`, `+1`, or `0` for the line `ν₁ = 0` itself.
    pub nu1_sign: i8,
    pub label: CurveLabel,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl BifurcationCurve {
    fn line(kind: CurveKind, slope: f64, nu1_sign: i8, label: CurveLabel) -> Self {
        Self { kind, slope, nu1_sign, label, note: String::new() }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = note.to_string();
        self
    }

    /// `ν₂` on the curve at `ν₁` (meaningful only on the curve's half-plane).
    pub fn nu2_at(&self, nu1: f64) -> f64 {
        self.slope * nu1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// Inside-heteroclinic family, `ν₁ < 0`.
    T32,
    /// Global family of the `s₁ = -1`, `ν₁ < 0` system.
    T41,
    /// Inside-homoclinic pair, `ν₁ > 0`.
    T43,
    /// Outside-homoclinic family, `ν₁ > 0`.
    T44,
}

impl Theorem {
    pub fn nu1_sign(self) -> i8 {
        match self {
            Theorem::T32 | Theorem::T41 => -1,
            Theorem::T43 | Theorem::T44 => 1,
        }
    }

    pub fn family(self) -> FamilyKind {
        match self {
            Theorem::T32 => FamilyKind::PeriodicInsideHet,
            Theorem::T41 => FamilyKind::PeriodicGlobal2a,
            Theorem::T43 => FamilyKind::PeriodicInsideHom(Sign::Plus),
            Theorem::T44 => FamilyKind::PeriodicOutsideHom,
        }
    }

    fn accepts(self, family: FamilyKind) -> bool {
        match (self, family) {
            (Theorem::T43, FamilyKind::PeriodicInsideHom(_)) => true,
            _ => self.family() == family,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SinkOrSource {
    Sink,
    Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub sink_or_source: SinkOrSource,
    /// Slope of the Hopf-candidate line `L^{m/n} = 0`.
    pub boundary_slope: f64,
    pub l_value: f64,
}

fn sep_label(family: &str, e: Extremum) -> CurveLabel {
    CurveLabel { m: None, n: None, family: Some(family.to_string()), extremum: Some(e) }
}

/// Heteroclinic bifurcation lines from `M±` at the extrema of `ĥ`, `ν₁ < 0`.
pub fn heteroclinic_curves(s2: Sign, delta_big: f64, hhat: &MelnikovProfile) -> Vec<BifurcationCurve> {
    separatrix_curves(SeparatrixKind::Het, s2, delta_big, hhat)
}

/// Homoclinic bifurcation lines from `M±` at the extrema of `ĥ`, `ν₁ > 0`.
pub fn homoclinic_curves(s2: Sign, delta_big: f64, hhat: &MelnikovProfile) -> Vec<BifurcationCurve> {
    separatrix_curves(SeparatrixKind::Hom, s2, delta_big, hhat)
}

fn separatrix_curves(kind: SeparatrixKind, s2: Sign, delta_big: f64, hhat: &MelnikovProfile) -> Vec<BifurcationCurve> {
    let (a, b) = SeparatrixMelnikov::coefficients(kind);
    let (ck, sgn, name) = match kind {
        SeparatrixKind::Het => (CurveKind::Heteroclinic, -1i8, "het"),
        SeparatrixKind::Hom => (CurveKind::Homoclinic, 1i8, "hom"),
    };
    // M± = a ν̂ + b s₂ ± Δĥ = 0  ⇒  ν̂ = (∓Δĥ - b s₂)/a.
    // For ν₁ < 0, ν̂ = -ν₂/ν₁ so slope = -ν̂; for ν₁ > 0, slope = ν̂.
    let to_slope = |nu_hat: f64| if sgn < 0 { -nu_hat } else { nu_hat };
    let degenerate = hhat.hmax == -hhat.hmin;
    let mut out = Vec::with_capacity(4);
    for (branch, order) in [(1.0, [Extremum::Max, Extremum::Min]), (-1.0, [Extremum::Min, Extremum::Max])] {
        for e in order {
            let h = e.pick(hhat);
            let nu_hat = (-branch * delta_big * h - b * s2.f()) / a;
            let fam = format!("{name}{}", if branch > 0.0 { "+" } else { "-" });
            let mut c = BifurcationCurve::line(ck, to_slope(nu_hat), sgn, sep_label(&fam, e));
            if degenerate {
                c = c.with_note("hmax = -hmin: the two branches give coincident lines");
            }
            out.push(c);
        }
    }
    out
}

/// Saddle-node lines of resonant subharmonics.
///
/// `hhatmn` is the profile along `family`; for `T43` the `(-)` member's lines use the negated profile.
#[allow(clippy::too_many_arguments)]
pub fn saddle_node_curves(
    theorem: Theorem,
    s2: Sign,
    delta_big: f64,
    family: FamilyKind,
    m: u32,
    n: u32,
    hhatmn: &MelnikovProfile,
    j: &JIntegrals,
) -> Result<Vec<BifurcationCurve>> {
    if !theorem.accepts(family) {
        return domain(format!("{theorem:?} does not apply to the {} family", family.name()));
    }
    if j.j1 == 0.0 {
        return Err(Error::Degeneracy("J1 vanishes; saddle-node slope undefined".into()));
    }
    let label = |fam: FamilyKind, e: Extremum| CurveLabel {
        m: Some(m),
        n: Some(n),
        family: Some(fam.name()),
        extremum: Some(e),
    };
    let s = s2.f();
    let nsgn = theorem.nu1_sign();
    let mut out = Vec::new();
    match theorem {
        Theorem::T32 | Theorem::T41 | Theorem::T44 => {
            let flip = if theorem == Theorem::T44 { -1.0 } else { 1.0 };
            for e in [Extremum::Max, Extremum::Min] {
                let slope = flip * (delta_big * e.pick(hhatmn) + s * j.j2) / j.j1;
                out.push(BifurcationCurve::line(CurveKind::SaddleNode, slope, nsgn, label(family, e)));
            }
        }
        Theorem::T43 => {
            let plus = if family.sign() == Sign::Plus { hhatmn.clone() } else { hhatmn.negated() };
            for e in [Extremum::Max, Extremum::Min] {
                let slope = -(delta_big * e.pick(&plus) + s * j.j2) / j.j1;
                out.push(BifurcationCurve::line(
                    CurveKind::SaddleNode,
                    slope,
                    nsgn,
                    label(FamilyKind::PeriodicInsideHom(Sign::Plus), e),
                ));
            }
            for e in [Extremum::Min, Extremum::Max] {
                let slope = (delta_big * e.pick(&plus) - s * j.j2) / j.j1;
                out.push(BifurcationCurve::line(
                    CurveKind::SaddleNode,
                    slope,
                    nsgn,
                    label(FamilyKind::PeriodicInsideHom(Sign::Minus), e),
                ));
            }
        }
    }
    Ok(out)
}

/// Stability of the non-saddle orbit born at the fold, from the sign of `L^{m/n} = mν̂T̂ + s₂J₃`.
pub fn classify_stability(
    theorem: Theorem,
    s2: Sign,
    j: &JIntegrals,
    m: u32,
    t_hat: f64,
    nu_hat: f64,
) -> Result<StabilityVerdict> {
    let mt = m as f64 * t_hat;
    let l_value = mt * nu_hat + s2.f() * j.j3;
    if l_value.abs() < DEGENERATE_L_TOL {
        return Err(Error::DegenerateL { value: l_value });
    }
    let boundary = s2.f() * j.j3 / mt;
    let boundary_slope = if theorem.nu1_sign() < 0 { boundary } else { -boundary };
    let sink_or_source = if l_value < 0.0 { SinkOrSource::Sink } else { SinkOrSource::Source };
    Ok(StabilityVerdict { sink_or_source, boundary_slope, l_value })
}

/// The Hopf-candidate line `L^{m/n} = 0` as a curve.
pub fn hopf_candidate_curve(theorem: Theorem, s2: Sign, j: &JIntegrals, m: u32, t_hat: f64) -> BifurcationCurve {
    let boundary = s2.f() * j.j3 / (m as f64 * t_hat);
    let slope = if theorem.nu1_sign() < 0 { boundary } else { -boundary };
    BifurcationCurve::line(
        CurveKind::HopfCandidate,
        slope,
        theorem.nu1_sign(),
        CurveLabel { m: Some(m), n: Some(j.n), family: Some(j.family.name()), extremum: None },
    )
}

/// Skeleton of the unforced normal form.
pub fn unperturbed_diagram(s1: Sign, s2: Sign) -> Vec<BifurcationCurve> {
    let none = CurveLabel::default;
    let s = s2.f();
    let mut out = vec![
        BifurcationCurve::line(CurveKind::Pitchfork, f64::INFINITY, 0, none()),
        BifurcationCurve::line(CurveKind::Hopf, 0.0, -1, none()),
    ];
    match s1 {
        Sign::Plus => {
            out.push(BifurcationCurve::line(CurveKind::UnperturbedSaddleConnection, s / 5.0, -1, none()));
        }
        Sign::Minus => {
            out.push(
                BifurcationCurve::line(CurveKind::DoubleHopf, -s, 1, none())
                    .with_note("Hopf at the symmetric pair of nontrivial equilibria"),
            );
            out.push(BifurcationCurve::line(CurveKind::UnperturbedHomoclinic, -0.8 * s, 1, none()));
            out.push(
                BifurcationCurve::line(CurveKind::UnperturbedCycleFold, -CYCLE_FOLD_CONSTANT * s, 1, none())
                    .with_note("constant 0.752 is approximate"),
            );
        }
    }
    out
}

/// Which curve groups [`scaled_diagram`] emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveSets {
    pub skeleton: bool,
    pub separatrix: bool,
    pub saddle_node: bool,
    pub hopf: bool,
}

impl CurveSets {
    pub const ALL: Self = Self { skeleton: true, separatrix: true, saddle_node: true, hopf: true };
}

/// All scaled-plane curves for `(s₁, s₂)` under forcing `h` at `ω̂`. Theorems whose family
/// has no `m:n` resonance at `ω̂` are skipped and described in the returned notes.
#[allow(clippy::too_many_arguments)]
pub fn scaled_diagram(
    s1: Sign,
    s2: Sign,
    omega_hat: f64,
    delta_big: f64,
    h: &FourierSeries,
    m: u32,
    n: u32,
    sets: CurveSets,
) -> Result<(Vec<BifurcationCurve>, Vec<String>)> {
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    if sets.skeleton {
        out.extend(unperturbed_diagram(s1, s2));
    }
    if sets.separatrix {
        match s1 {
            Sign::Plus => {
                let hh = melnikov::h_hat(h, FamilyKind::HetPair(Sign::Plus), omega_hat)?;
                out.extend(heteroclinic_curves(s2, delta_big, &hh));
            }
            Sign::Minus => {
                let hh = melnikov::h_hat(h, FamilyKind::HomPair(Sign::Plus), omega_hat)?;
                out.extend(homoclinic_curves(s2, delta_big, &hh));
            }
        }
    }
    if !(sets.saddle_node || sets.hopf) {
        return Ok((out, skipped));
    }
    let theorems: &[Theorem] = match s1 {
        Sign::Plus => &[Theorem::T32],
        Sign::Minus => &[Theorem::T41, Theorem::T43, Theorem::T44],
    };
    let t_hat = 2.0 * PI / omega_hat;
    for &th in theorems {
        let fam = th.family();
        let k = match orbits::resonant_modulus(fam, m, n, omega_hat) {
            Ok(k) => k,
            Err(e @ Error::NoResonance { .. }) => {
                skipped.push(format!("{th:?}: {e}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let j = melnikov::j_integrals(fam, k, n)?;
        if sets.saddle_node {
            let hh = melnikov::h_hat_subharmonic(h, fam, k, m, n, omega_hat)?;
            out.extend(saddle_node_curves(th, s2, delta_big, fam, m, n, &hh, &j)?);
        }
        if sets.hopf {
            out.push(hopf_candidate_curve(th, s2, &j, m, t_hat));
        }
    }
    Ok((out, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_profile_collapses_het_and_hom() {
        let z = MelnikovProfile::zero();
        for s2 in [Sign::Plus, Sign::Minus] {
            for c in heteroclinic_curves(s2, 1.0, &z) {
                assert!((c.slope - s2.f() / 5.0).abs() < 1e-15);
                assert_eq!(c.nu1_sign, -1);
            }
            for c in homoclinic_curves(s2, 1.0, &z) {
                assert!((c.slope + 0.8 * s2.f()).abs() < 1e-15);
                assert_eq!(c.nu1_sign, 1);
            }
        }
    }

    #[test]
    fn symmetric_hom_profile_gives_two_slopes() {
        let p = MelnikovProfile::from_series(FourierSeries::new(vec![0.0], vec![0.3]).unwrap());
        let mut slopes: Vec<f64> = homoclinic_curves(Sign::Plus, 1.0, &p).iter().map(|c| c.slope).collect();
        slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        slopes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(slopes.len(), 2);
    }

    #[test]
    fn unperturbed_counts() {
        assert_eq!(unperturbed_diagram(Sign::Plus, Sign::Plus).len(), 3);
        let d = unperturbed_diagram(Sign::Minus, Sign::Plus);
        assert_eq!(d.len(), 5);
        let fold = d.iter().find(|c| c.kind == CurveKind::UnperturbedCycleFold).unwrap();
        assert_eq!(fold.slope, -0.752);
        let d = unperturbed_diagram(Sign::Minus, Sign::Minus);
        let hom = d.iter().find(|c| c.kind == CurveKind::UnperturbedHomoclinic).unwrap();
        assert!((hom.slope - 0.8).abs() < 1e-15);
    }
}
