mod common;

use std::f64::consts::PI;

use codim2::elliptic::EllipticModulus;
use codim2::fourier::FourierSeries;
use codim2::melnikov::{self, SeparatrixKind};
use codim2::normalform::Sign;
use codim2::orbits::{self, FamilyKind, PERIODIC_FAMILIES};
use proptest::prelude::*;

fn series() -> impl Strategy<Value = FourierSeries> {
    (prop::collection::vec(-1.0f64..1.0, 3), prop::collection::vec(-1.0f64..1.0, 3))
        .prop_map(|(c, s)| FourierSeries::new(c, s).unwrap())
}

fn separatrix() -> impl Strategy<Value = FamilyKind> {
    prop::sample::select(vec![
        FamilyKind::HetPair(Sign::Plus),
        FamilyKind::HetPair(Sign::Minus),
        FamilyKind::HomPair(Sign::Plus),
        FamilyKind::HomPair(Sign::Minus),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_hat_is_linear_in_forcing(a in series(), b in series(), lam in -2.0f64..2.0, fam in separatrix(), w in 0.2f64..3.0, phi in 0.0f64..6.3) {
        let sum = FourierSeries::new(
            a.cos.iter().zip(&b.cos).map(|(x, y)| x + lam * y).collect(),
            a.sin.iter().zip(&b.sin).map(|(x, y)| x + lam * y).collect(),
        ).unwrap();
        let ha = melnikov::h_hat(&a, fam, w).unwrap().eval(phi);
        let hb = melnikov::h_hat(&b, fam, w).unwrap().eval(phi);
        let hs = melnikov::h_hat(&sum, fam, w).unwrap().eval(phi);
        prop_assert!((hs - ha - lam * hb).abs() < 1e-12);
    }

    #[test]
    fn h_hat_matches_direct_quadrature(h in series(), fam in separatrix(), w in 0.3f64..2.0, phi in 0.0f64..6.3) {
        let got = melnikov::h_hat(&h, fam, w).unwrap().eval(phi);
        let zeta2 = |t: f64| orbits::evaluate(fam, None, t).unwrap().zeta2;
        let g = |t: f64| zeta2(t) * h.eval(w * t + phi);
        let want: f64 = (0..120).map(|j| common::simpson(g, -60.0 + j as f64, -59.0 + j as f64, 64)).sum();
        prop_assert!((got - want).abs() < 1e-8, "got {got}, want {want}");
    }

    #[test]
    fn j_integrals_scale_with_n(fam in prop::sample::select(PERIODIC_FAMILIES.to_vec()), frac in 0.05f64..0.95, n in 1u32..5) {
        let (lo, hi) = fam.k_range().unwrap();
        let k = EllipticModulus::new(lo + (hi - lo) * frac).unwrap();
        let one = melnikov::j_integrals(fam, k, 1).unwrap();
        let many = melnikov::j_integrals(fam, k, n).unwrap();
        let nf = n as f64;
        prop_assert!(common::rel_err(many.j1, nf * one.j1) < 1e-13);
        prop_assert!(common::rel_err(many.j2, nf * one.j2) < 1e-13);
        prop_assert!(common::rel_err(many.j3, nf * one.j3) < 1e-13);
    }
}

#[test]
fn closed_forms_agree_with_library_quadrature() {
    for fam in PERIODIC_FAMILIES {
        let (lo, hi) = fam.k_range().unwrap();
        let k = EllipticModulus::new(0.5 * (lo + hi)).unwrap();
        let a = melnikov::j_integrals(fam, k, 2).unwrap();
        let b = melnikov::j_integrals_by_quadrature(fam, k, 2).unwrap();
        assert!(common::rel_err(a.j1, b.j1) < 1e-10, "{}", fam.name());
        assert!(common::rel_err(a.j2, b.j2) < 1e-10, "{}", fam.name());
    }
}

#[test]
fn separatrix_weights_have_expected_limits() {
    assert!((melnikov::fourier_weight_het(1e-8) - 2.0).abs() < 1e-7);
    assert!(melnikov::fourier_weight_hom(1e-8).abs() < 1e-6);
    assert!(melnikov::fourier_weight_het(40.0) < 1e-30);
    let chi: f64 = 1.3;
    let want = 2f64.sqrt() * PI * chi / (PI * chi / 2.0).cosh();
    assert!((melnikov::fourier_weight_hom(chi) - want).abs() < 1e-14);
}

#[test]
fn subharmonic_rejects_nonresonant_span() {
    let fam = FamilyKind::PeriodicInsideHet;
    let k = EllipticModulus::new(0.5).unwrap();
    let tk = orbits::period(fam, k).unwrap();
    let h = FourierSeries::cosine(1.0);
    assert!(melnikov::h_hat_subharmonic(&h, fam, k, 1, 1, 2.0 * PI / tk).is_ok());
    assert!(melnikov::h_hat_subharmonic(&h, fam, k, 1, 1, 2.1 * PI / tk).is_err());
}

#[test]
fn separatrix_coefficients_match_quadrature() {
    for (kind, fam) in [
        (SeparatrixKind::Het, FamilyKind::HetPair(Sign::Plus)),
        (SeparatrixKind::Hom, FamilyKind::HomPair(Sign::Plus)),
    ] {
        let at = |t: f64| orbits::evaluate(fam, None, t).unwrap();
        let j1 = common::simpson(|t| at(t).zeta2.powi(2), -60.0, 60.0, 20000);
        let j2 = common::simpson(|t| (at(t).zeta1 * at(t).zeta2).powi(2), -60.0, 60.0, 20000);
        let (a, b) = melnikov::SeparatrixMelnikov::coefficients(kind);
        assert!(common::rel_err(a, j1) < 1e-10 && common::rel_err(b, j2) < 1e-10, "{kind:?}");
    }
}
