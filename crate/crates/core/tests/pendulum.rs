use codim2::normalform;
use codim2::pendulum::{self, PendulumParams, Proposition, Theta0};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = PendulumParams> {
    (any::<bool>(), 0.1f64..1.0, -2.0f64..0.9, 0.5f64..5.0, 0.1f64..2.0).prop_filter_map(
        "no double-zero point",
        |(zero, d0, d1, beta, omega)| {
            let mut p = if zero { PendulumParams::case_i() } else { PendulumParams::case_ii() };
            p.delta0 = d0;
            p.delta1 = d1;
            p.beta = beta;
            p.omega = omega;
            let c = pendulum::codim2_locus(&p).ok()?;
            Some(p.with_alpha_gamma(c.alpha0, c.gamma0))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn double_zero_has_vanishing_char_poly(p in params()) {
        let c = pendulum::codim2_locus(&p).unwrap();
        let (_, c1, c0) = pendulum::char_poly(&p, c.alpha0, c.gamma0);
        prop_assert!(c0.abs() < 1e-12 && c1.abs() < 1e-12);
    }

    #[test]
    fn nu_map_inverse_round_trips(p in params(), nu1 in -0.1f64..0.1, nu2 in -0.1f64..0.1) {
        let rc = pendulum::coefficients(&p).unwrap();
        let (a1, g1) = pendulum::nu_map_inverse(&rc, nu1, nu2).unwrap();
        let m = pendulum::nu_map(&rc);
        prop_assert!((m[0][0] * a1 + m[0][1] * g1 - nu1).abs() < 1e-13);
        prop_assert!((m[1][0] * a1 + m[1][1] * g1 - nu2).abs() < 1e-13);
    }

    #[test]
    fn scaled_forcing_hits_requested_parameters(p in params(), da in -0.05f64..0.05, dg in -0.05f64..0.05,
                                                 omega_hat in 0.3f64..2.0, delta in 0.2f64..2.0) {
        let q = p.with_alpha_gamma(p.alpha + da, p.gamma + dg);
        prop_assume!(pendulum::normal_form(&q).unwrap().nu1.abs() > 1e-6);
        let r = pendulum::with_scaled_forcing(&q, omega_hat, delta).unwrap();
        let (_, sp) = pendulum::reduce_pendulum(&r).unwrap();
        prop_assert!((sp.omega_hat - omega_hat).abs() < 1e-10 * omega_hat);
        prop_assert!((sp.delta_big - delta).abs() < 1e-10 * delta);
    }

    #[test]
    fn unforced_field_is_odd_about_theta0(p in params(), z in -1.0f64..1.0, v in -1.0f64..1.0, w in -1.0f64..1.0) {
        let p = PendulumParams { eps: 0.0, ..p };
        let f = pendulum::vector_field(&p, 0.0, [p.theta0.value() + z, v, w]);
        let g = pendulum::vector_field(&p, 0.0, [p.theta0.value() - z, -v, -w]);
        for i in 0..3 {
            prop_assert!((f[i] + g[i]).abs() < 1e-12 * (1.0 + f[i].abs()));
        }
    }
}

#[test]
fn reference_double_zero_points() {
    let ci = pendulum::codim2_locus(&PendulumParams::case_i()).unwrap();
    let cii = pendulum::codim2_locus(&PendulumParams::case_ii()).unwrap();
    assert!((ci.alpha0 - 1.0).abs() < 1e-12 && (ci.gamma0 + 1.0).abs() < 1e-12);
    assert!((cii.alpha0 - 1.0).abs() < 1e-12 && (cii.gamma0 - 1.0).abs() < 1e-12);
}

#[test]
fn generic_and_direct_reductions_agree() {
    let p = PendulumParams::case_i().with_alpha_gamma(1.1, -1.05);
    let direct = pendulum::normal_form(&p).unwrap();
    let (coeffs, mu) = pendulum::symmetric_coeffs(&p).unwrap();
    let generic = normalform::reduce(&coeffs, mu, p.omega).unwrap();
    assert!((direct.nu1 - generic.nu1).abs() < 1e-12);
    assert!((direct.nu2 - generic.nu2).abs() < 1e-12);
}

#[test]
fn proposition_curves_start_at_double_zero() {
    let p = PendulumParams::case_i().with_alpha_gamma(1.25, -1.2);
    let curves = pendulum::proposition_curves(&p, Proposition::P61, 1, 0.8, 1.0, &[0.0, 0.01, 0.02]).unwrap();
    assert!(!curves.is_empty());
    for c in &curves {
        let (a, g) = c.points[0];
        assert!((a - 1.0).abs() < 1e-12 && (g + 1.0).abs() < 1e-12);
    }
    assert!(pendulum::proposition_curves(&p, Proposition::P61, 1, 0.8, 1.0, &[]).is_err());
}

#[test]
fn propositions_parse_their_names() {
    for s in ["P61", "P62", "P63", "P64", "P65", "P66"] {
        let p = Proposition::parse(s).unwrap();
        assert_eq!(p.as_str(), s);
    }
    assert!(Proposition::parse("P99").is_err());
    assert_eq!(Proposition::parse("P61").unwrap().theta0(), Theta0::Zero);
}
