use kgplanar::boxes::{four_box, ghz, two_box, FourBoxName, TwoBoxName};
use kgplanar::closure::{contains, run_closure, ClosureBackend, ClosureConfig};
use kgplanar::linalg::Subspace;

fn config(n: usize, k: usize, backend: ClosureBackend) -> ClosureConfig {
    let mut cfg = ClosureConfig::new(n);
    cfg.max_arity = k;
    cfg.backend = backend;
    cfg
}

#[test]
fn fixpoint_at_arity_six_contains_r() {
    for n in [5usize, 6] {
        let r = run_closure(&config(n, 6, ClosureBackend::Orbit)).unwrap();
        assert!(r.converged, "n = {n}");
        assert_eq!(r.dim(2), 3);
        for k in 0..r.dims.len() {
            assert!(r.dims[k] <= r.ambient[k], "n = {n}, arity {k}");
        }
        assert_eq!(r.log.len(), r.dims.iter().sum::<usize>());
        assert!(r.contains_mod_p(FourBoxName::R), "n = {n}");
        if n == 5 {
            let proof = r.certify(&four_box(FourBoxName::R, n).unwrap()).unwrap();
            assert!(proof.is_some());
            let s = r.exact_subspace(4).unwrap();
            assert!(contains(&s, &four_box(FourBoxName::RA, n).unwrap()).unwrap());
        }
    }
}

#[test]
fn dense_and_orbit_backends_agree() {
    for n in [5usize, 6] {
        let a = run_closure(&config(n, 5, ClosureBackend::Orbit)).unwrap();
        let b = run_closure(&config(n, 5, ClosureBackend::Dense)).unwrap();
        assert_eq!(a.dims, b.dims, "n = {n}");
        assert_eq!(a.log, b.log, "n = {n}");
    }
}

#[test]
fn same_seed_same_run() {
    let a = run_closure(&config(6, 5, ClosureBackend::Orbit)).unwrap();
    let b = run_closure(&config(6, 5, ClosureBackend::Orbit)).unwrap();
    assert_eq!(a.dims, b.dims);
    assert_eq!(a.basis, b.basis);
    assert_eq!(a.dag.definitions(&a.basis[4]), b.dag.definitions(&b.basis[4]));
}

#[test]
fn small_memberships() {
    let n = 5;
    let r = run_closure(&config(n, 4, ClosureBackend::Orbit)).unwrap();
    assert!(r.exact_subspace(3).unwrap().contains(&ghz(3, n).unwrap()).unwrap());
    assert!(r.exact_subspace(2).unwrap().contains(&two_box(TwoBoxName::T, n).unwrap()).unwrap());
    let ij = Subspace::spanned_by(2, n, [&two_box(TwoBoxName::I, n).unwrap(), &two_box(TwoBoxName::J, n).unwrap()]).unwrap();
    assert!(!contains(&ij, &two_box(TwoBoxName::A, n).unwrap()).unwrap());
}

#[test]
fn iteration_cap_gives_partial_result() {
    let mut cfg = config(5, 5, ClosureBackend::Orbit);
    cfg.max_steps = 10;
    let r = run_closure(&cfg).unwrap();
    assert!(!r.converged);
    assert_eq!(r.steps, 10);
}
