use kgplanar_bench::{catalog_rank, closure_dims, SAMPLE_TUPLE};

#[test]
fn catalog_workload_has_full_rank() {
    assert_eq!(catalog_rank(7).unwrap(), 8);
}

#[test]
fn closure_workload_is_small() {
    assert_eq!(closure_dims(5, 4).unwrap()[..3], [1, 1, 3]);
}

#[test]
fn sample_tuple_canonicalizes() {
    let p = kgplanar::canonicalize(&SAMPLE_TUPLE).unwrap();
    assert_eq!(p.arity(), 6);
    assert!(p.is_valid_for(8));
}
