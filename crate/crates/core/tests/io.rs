use codim2::bifurcation;
use codim2::fourier::FourierSeries;
use codim2::io::{self, CsvTable, Provenance};
use codim2::melnikov::{self, MelnikovProfile};
use codim2::normalform::Sign;
use codim2::orbits::FamilyKind;
use proptest::prelude::*;

proptest! {
    #[test]
    fn floats_round_trip(x in any::<f64>()) {
        let s = io::fmt_f64(x);
        if x.is_nan() {
            prop_assert_eq!(s, "nan");
        } else {
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn cells_with_commas_and_quotes_survive(cell in "[a-z,\" ]{0,12}") {
        let mut t = CsvTable::new(&["x"]);
        t.push(vec![cell.clone()]);
        let out = t.render(&Provenance::new("t"));
        let last = out.lines().last().unwrap();
        let decoded = if last.starts_with('"') {
            last[1..last.len() - 1].replace("\"\"", "\"")
        } else {
            last.to_string()
        };
        prop_assert_eq!(decoded, cell);
    }
}

fn curves() -> Vec<bifurcation::BifurcationCurve> {
    let hh = melnikov::h_hat(&FourierSeries::cosine(1.0), FamilyKind::HetPair(Sign::Plus), 0.8).unwrap();
    let mut c = bifurcation::heteroclinic_curves(Sign::Plus, 1.0, &hh);
    c.extend(bifurcation::unperturbed_diagram(Sign::Plus, Sign::Plus));
    c
}

#[test]
fn curve_output_is_deterministic() {
    let prov = Provenance::new("curves").with_f64("omega_hat", 0.8).with("s2", 1);
    let a = io::curves_table(&curves()).render(&prov);
    let b = io::curves_table(&curves()).render(&prov);
    assert_eq!(a, b);
    assert!(!a.contains('\r'));
    assert!(a.lines().any(|l| l == "kind,slope,nu1_sign,m,n,family,extremum"));
    assert!(a.lines().any(|l| l == "# omega_hat = 8.0000000000000004e-1"));
}

#[test]
fn json_carries_metadata_and_null_for_infinite_slopes() {
    let prov = Provenance::new("curves");
    let s = io::render_json(&prov, &curves()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["metadata"]["command"], "curves");
    assert_eq!(v["metadata"]["format_version"], io::FORMAT_VERSION);
    let arr = v["data"].as_array().unwrap();
    assert!(arr.iter().any(|c| c["slope"].is_null()));
    assert!(s.ends_with('\n'));
}

#[test]
fn zero_profile_renders() {
    let c = bifurcation::homoclinic_curves(Sign::Minus, 1.0, &MelnikovProfile::zero());
    let out = io::curves_table(&c).render(&Provenance::new("curves"));
    assert_eq!(out.lines().filter(|l| l.starts_with("homoclinic")).count(), 4);
}
