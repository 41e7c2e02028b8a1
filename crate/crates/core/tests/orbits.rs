mod common;

use codim2::elliptic::EllipticModulus;
use codim2::normalform::Sign;
use codim2::orbits::{self, FamilyKind, OrbitPoint, PERIODIC_FAMILIES};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = FamilyKind> {
    prop::sample::select(PERIODIC_FAMILIES.to_vec())
}

fn point_in_range(fam: FamilyKind, frac: f64) -> EllipticModulus {
    let (lo, hi) = fam.k_range().unwrap();
    EllipticModulus::new(lo + (hi - lo) * (0.02 + 0.96 * frac)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn energy_is_constant_along_orbit(fam in family(), frac in 0.0f64..1.0, t in -30.0f64..30.0) {
        let k = point_in_range(fam, frac);
        let e = orbits::energy(fam, Some(k)).unwrap();
        let z = orbits::evaluate(fam, Some(k), t).unwrap();
        prop_assert!((fam.system().hamiltonian(z) - e).abs() < 1e-12 * (1.0 + e.abs()));
    }

    #[test]
    fn orbit_is_periodic(fam in family(), frac in 0.0f64..1.0, t in -10.0f64..10.0) {
        let k = point_in_range(fam, frac);
        let tk = orbits::period(fam, k).unwrap();
        let a = orbits::evaluate(fam, Some(k), t).unwrap();
        let b = orbits::evaluate(fam, Some(k), t + tk).unwrap();
        prop_assert!((a.zeta1 - b.zeta1).abs() < 1e-10 && (a.zeta2 - b.zeta2).abs() < 1e-10);
    }

    #[test]
    fn orbit_solves_the_unperturbed_equation(fam in family(), frac in 0.0f64..1.0, t in -10.0f64..10.0) {
        let k = point_in_range(fam, frac);
        let (l, q) = fam.system().coefficients();
        let h = 1e-5;
        let at = |s: f64| orbits::evaluate(fam, Some(k), s).unwrap();
        let (p, m, c) = (at(t + h), at(t - h), at(t));
        let scale = 1.0 + c.zeta1.abs().powi(3) + c.zeta2.abs();
        prop_assert!(((p.zeta1 - m.zeta1) / (2.0 * h) - c.zeta2).abs() < 1e-7 * scale);
        prop_assert!(((p.zeta2 - m.zeta2) / (2.0 * h) - (l * c.zeta1 + q * c.zeta1.powi(3))).abs() < 1e-7 * scale);
    }
}

#[test]
fn separatrices_match_closed_forms() {
    let s2 = std::f64::consts::SQRT_2;
    for t in [-3.0, -0.4, 0.0, 1.3, 5.0] {
        let het = orbits::evaluate(FamilyKind::HetPair(Sign::Plus), None, t).unwrap();
        assert!((het.zeta1 - (t / s2).tanh()).abs() < 1e-14);
        assert!((het.zeta2 - (t / s2).cosh().powi(-2) / s2).abs() < 1e-14);
        let hom = orbits::evaluate(FamilyKind::HomPair(Sign::Plus), None, t).unwrap();
        assert!((hom.zeta1 - s2 / t.cosh()).abs() < 1e-14);
        assert!((hom.zeta2 + s2 * t.tanh() / t.cosh()).abs() < 1e-14);
    }
}

#[test]
fn period_matches_numerical_integration() {
    for fam in PERIODIC_FAMILIES {
        let k = point_in_range(fam, 0.5);
        let tk = orbits::period(fam, k).unwrap();
        let z0 = orbits::evaluate(fam, Some(k), 0.0).unwrap();
        let (l, q) = fam.system().coefficients();
        let f = |y: [f64; 2]| [y[1], l * y[0] + q * y[0].powi(3)];
        let y = common::rk4_planar(f, [z0.zeta1, z0.zeta2], tk, 20000);
        assert!((y[0] - z0.zeta1).abs() < 1e-9 && (y[1] - z0.zeta2).abs() < 1e-9, "{}", fam.name());
    }
}

#[test]
fn resonant_modulus_inverts_period() {
    for fam in PERIODIC_FAMILIES {
        let k = point_in_range(fam, 0.3);
        let tk = orbits::period(fam, k).unwrap();
        for (m, n) in [(1, 1), (3, 1), (2, 3)] {
            let omega_hat = 2.0 * std::f64::consts::PI * m as f64 / (n as f64 * tk);
            let found = orbits::resonant_modulus(fam, m, n, omega_hat).unwrap();
            assert!((found.k() - k.k()).abs() < 1e-9, "{} m={m} n={n}", fam.name());
        }
    }
}

#[test]
fn hamiltonian_on_the_equilibria() {
    let origin = OrbitPoint::new(0.0, 0.0);
    for fam in PERIODIC_FAMILIES {
        assert_eq!(fam.system().hamiltonian(origin), 0.0);
    }
}
