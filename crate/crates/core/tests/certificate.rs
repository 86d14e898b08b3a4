use kgplanar::certificate::{RouteChoice, Status};
use kgplanar::{decide_property_g, CertifyOptions, PropertyG};

#[test]
fn certificates_are_reproducible() {
    for n in [5usize, 7] {
        let a = decide_property_g(n, &CertifyOptions::default()).unwrap();
        let b = decide_property_g(n, &CertifyOptions::default()).unwrap();
        assert_eq!(a.to_json_without_timings(), b.to_json_without_timings(), "n = {n}");
    }
}

#[test]
fn every_check_is_labelled() {
    let c = decide_property_g(6, &CertifyOptions::default()).unwrap();
    assert_eq!(c.route, "direct+span");
    for check in &c.checks {
        assert!(!check.anchor.is_empty() && !check.name.is_empty(), "{check:?}");
    }
    let json = c.to_json();
    let keys = ["\"n\"", "\"route\"", "\"checks\"", "\"property_g\"", "\"quantum_symmetry\"", "\"matrices\"", "\"expressions\"", "\"versions\"", "\"timings\""];
    let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
}

#[test]
fn routes_agree_where_both_run() {
    for n in [5usize, 6] {
        let opts = CertifyOptions {
            routes: RouteChoice::Both,
            ..CertifyOptions::default()
        };
        let c = decide_property_g(n, &opts).unwrap();
        assert_eq!(c.property_g, PropertyG::Holds, "{}", c.to_text());
        if n == 6 {
            assert!(c.checks.iter().any(|x| x.name == "routes agree" && x.status == Status::Pass));
        }
    }
}

#[test]
fn span_route_alone() {
    for n in [7usize, 8] {
        let c = decide_property_g(n, &CertifyOptions::default()).unwrap();
        assert_eq!(c.route, "span");
        assert_eq!(c.property_g, PropertyG::Holds);
        assert_eq!(c.quantum_symmetry, "none");
        assert!(!c.has_failures());
    }
}
