use codim2::dynamics::{
    self, ManifoldBranch, ManifoldOptions, OrbitStability, PendulumFlow, ScaledFlow, ShootingOptions,
};
use codim2::fourier::FourierSeries;
use codim2::normalform::Sign;
use codim2::ode::{self, Tolerances, VectorField};
use codim2::orbits::{OrbitPoint, ScaledSystem};
use codim2::pendulum::PendulumParams;
use proptest::prelude::*;

fn psys1(eps_hat: f64, nu_hat: f64) -> ScaledFlow {
    ScaledFlow {
        system: ScaledSystem::Psys1,
        eps_hat,
        nu_hat,
        s2: Sign::Plus,
        delta_big: 1.0,
        omega_hat: 1.4,
        h: FourierSeries::cosine(1.0),
    }
}

fn tight() -> Tolerances {
    Tolerances { abs: 1e-12, rel: 1e-12 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverse_map_undoes_forward_map(x in -0.6f64..0.6, y in -0.3f64..0.3, nu in -1.0f64..1.0) {
        let f = psys1(0.05, nu);
        let img = dynamics::poincare_map(&f, &[x, y], 1, tight()).unwrap();
        let back = dynamics::inverse_poincare_map(&f, &img, 1, tight()).unwrap();
        prop_assert!((back[0] - x).abs() < 1e-9 && (back[1] - y).abs() < 1e-9);
    }

    #[test]
    fn liouville_identity_for_the_map(x in -0.6f64..0.6, y in -0.3f64..0.3, nu in -1.0f64..1.0) {
        let f = psys1(0.05, nu);
        let lin = dynamics::poincare_map_linearized(&f, &[x, y], 1, tight()).unwrap();
        prop_assert!((lin.derivative.determinant().ln() - lin.divergence_integral).abs() < 1e-8);
    }

    #[test]
    fn unforced_flow_conserves_energy(x in -0.8f64..0.8, y in -0.2f64..0.2, t in 0.5f64..20.0) {
        let f = psys1(0.0, 0.0);
        let z = ode::integrate(&f, &[x, y], 0.0, t, tight()).unwrap();
        let h = |a: f64, b: f64| ScaledSystem::Psys1.hamiltonian(OrbitPoint::new(a, b));
        prop_assert!((h(z[0], z[1]) - h(x, y)).abs() < 1e-10);
    }
}

#[test]
fn harmonic_oscillator_is_exact() {
    struct Osc;
    impl VectorField for Osc {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _t: f64, x: &[f64], out: &mut [f64]) {
            out[0] = x[1];
            out[1] = -x[0];
        }
        fn jacobian(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
            out.copy_from_slice(&[0.0, 1.0, -1.0, 0.0]);
        }
    }
    let t = 7.3f64;
    let z = ode::integrate(&Osc, &[1.0, 0.0], 0.0, t, tight()).unwrap();
    assert!((z[0] - t.cos()).abs() < 1e-10 && (z[1] + t.sin()).abs() < 1e-10);
}

#[test]
fn damped_origin_continues_to_a_sink() {
    let f = psys1(0.05, -1.0);
    let orbit = dynamics::find_subharmonic(&f, 1, &[0.0, 0.0], &ShootingOptions::default()).unwrap();
    assert_eq!(orbit.stability, OrbitStability::Sink);
    assert!(orbit.residual < 1e-10);
    assert!(orbit.liouville_defect < 1e-8);
    let img = dynamics::poincare_map(&f, &orbit.state, 1, tight()).unwrap();
    assert!((img[0] - orbit.state[0]).abs() < 1e-9 && (img[1] - orbit.state[1]).abs() < 1e-9);
}

#[test]
fn unstable_manifold_lies_on_the_separatrix_when_unforced() {
    let f = psys1(0.0, 0.0);
    let saddle = dynamics::find_subharmonic_from_path(&f, 1, &|_| vec![1.0, 0.0], &ShootingOptions::default()).unwrap();
    assert_eq!(saddle.stability, OrbitStability::Saddle);
    let opts = ManifoldOptions { seeds: 40, max_iterates: 6, ..ManifoldOptions::default() };
    let traces = dynamics::trace_manifolds(&f, &saddle, &[ManifoldBranch::UnstablePlus, ManifoldBranch::UnstableMinus], &opts).unwrap();
    let h_saddle = ScaledSystem::Psys1.hamiltonian(OrbitPoint::new(1.0, 0.0));
    for tr in &traces {
        assert!(tr.points.len() > 10, "{}", tr.branch.as_str());
        for p in &tr.points {
            let h = ScaledSystem::Psys1.hamiltonian(OrbitPoint::new(p[0], p[1]));
            assert!((h - h_saddle).abs() < 1e-8, "{} drifted to {h}", tr.branch.as_str());
        }
    }
}

#[test]
fn pendulum_map_contracts_volume() {
    let p = PendulumParams::case_i().with_alpha_gamma(1.25, -1.2);
    let f = PendulumFlow { params: PendulumParams { eps: 1e-3, omega: 0.3, ..p } };
    let lin = dynamics::poincare_map_linearized(&f, &[0.05, 0.0, 0.0], 1, tight()).unwrap();
    let want = -(p.delta0 + p.alpha) * 2.0 * std::f64::consts::PI / 0.3;
    assert!((lin.divergence_integral - want).abs() < 1e-9 * want.abs());
}

#[test]
fn non_saddle_has_no_manifolds() {
    let f = psys1(0.05, -1.0);
    let sink = dynamics::find_subharmonic(&f, 1, &[0.0, 0.0], &ShootingOptions::default()).unwrap();
    assert!(dynamics::trace_manifolds(&f, &sink, &ManifoldBranch::ALL, &ManifoldOptions::default()).is_err());
}

#[test]
fn slicing_and_distance() {
    let line: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0, 0.0]).collect();
    let cut = dynamics::plane_slice(&line, 0, 0.25);
    assert_eq!(cut.len(), 1);
    assert!((cut[0][1] - 0.75).abs() < 1e-15);
    let lifted: Vec<Vec<f64>> = line.iter().map(|p| vec![p[0], p[1], 0.5]).collect();
    assert!((dynamics::hausdorff(&line, &lifted) - 0.5).abs() < 1e-15);
    assert_eq!(dynamics::hausdorff(&line, &line), 0.0);
}
