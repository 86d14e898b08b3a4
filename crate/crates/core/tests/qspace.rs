use std::collections::BTreeSet;

use kgplanar::boxes::{four_box, q_catalog, FourBoxName};
use kgplanar::linalg::Subspace;
use kgplanar::qspace::{evaluation_matrix, formulas, q_dimension, q_orbit_basis};
use kgplanar::{Integer, KneserGraph};

const B: [[[u8; 2]; 4]; 9] = [
    [[1, 2], [3, 4], [1, 2], [3, 4]],
    [[1, 2], [3, 4], [1, 2], [3, 5]],
    [[1, 2], [3, 4], [1, 2], [5, 6]],
    [[1, 2], [3, 4], [1, 5], [3, 4]],
    [[1, 2], [3, 4], [1, 5], [3, 6]],
    [[1, 2], [3, 4], [1, 5], [6, 7]],
    [[1, 2], [3, 4], [5, 6], [3, 4]],
    [[1, 2], [3, 4], [5, 6], [3, 7]],
    [[1, 2], [3, 4], [5, 6], [7, 8]],
];

fn permutations(n: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for x in 1..=n {
        let mut next = Vec::new();
        for p in &out {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Orbits of cyclically adjacent 4-tuples under all of `S_n`, by taking the
/// least image of every tuple.
fn cyclic_orbit_count(n: u8) -> usize {
    let g = KneserGraph::build(n as usize).unwrap();
    let perms = permutations(n);
    let pts: Vec<(u8, u8)> = g.vertices().iter().map(|v| v.points()).collect();
    let mut orbits = BTreeSet::new();
    let d = g.order();
    for a in 0..d {
        for b in g.neighbors(a) {
            for c in g.neighbors(b) {
                for e in g.neighbors(c).filter(|&e| g.adjacent_idx(e, a)) {
                    let least = perms
                        .iter()
                        .map(|p| {
                            [a, b, c, e].map(|v| {
                                let (x, y) = pts[v];
                                let (x, y) = (p[x as usize - 1], p[y as usize - 1]);
                                (x.min(y), x.max(y))
                            })
                        })
                        .min()
                        .unwrap();
                    orbits.insert(least);
                }
            }
        }
    }
    orbits.len()
}

#[test]
fn q_dimensions() {
    let dims: Vec<usize> = (6..=10).map(|n| q_dimension(n).unwrap()).collect();
    assert_eq!(dims, vec![6, 8, 9, 9, 9]);
    assert_eq!(q_dimension(5).unwrap(), cyclic_orbit_count(5));
    assert_eq!(q_dimension(6).unwrap(), cyclic_orbit_count(6));
}

/// Catalog values at the representative `b`, counted over vertices.
fn brute_row(g: &KneserGraph, b: &[[u8; 2]; 4]) -> Vec<i64> {
    let v: Vec<usize> = b.iter().map(|p| g.index_of_points(p[0], p[1])).collect();
    let adj = |x: usize, y: usize| g.adjacent_idx(x, y);
    let d = g.order();
    let count3 = |first: [usize; 3], second: [usize; 3]| -> i64 {
        let mut s = 0;
        for u in (0..d).filter(|&u| first.iter().all(|&x| adj(u, x))) {
            s += (0..d).filter(|&w| adj(u, w) && second.iter().all(|&x| adj(w, x))).count() as i64;
        }
        s
    };
    let mut four_cycle = 0i64;
    for a in (0..d).filter(|&a| adj(a, v[0]) && adj(a, v[1])) {
        for bb in (0..d).filter(|&x| adj(x, v[1]) && adj(x, v[2]) && adj(x, a)) {
            for c in (0..d).filter(|&x| adj(x, v[2]) && adj(x, v[3]) && adj(x, bb)) {
                four_cycle += (0..d).filter(|&x| adj(x, v[3]) && adj(x, v[0]) && adj(x, c) && adj(x, a)).count() as i64;
            }
        }
    }
    vec![
        1,
        (v[0] == v[2]) as i64,
        (v[1] == v[3]) as i64,
        adj(v[0], v[2]) as i64,
        adj(v[1], v[3]) as i64,
        (0..d).filter(|&u| v.iter().all(|&x| adj(u, x))).count() as i64,
        count3([v[0], v[2], v[3]], [v[0], v[1], v[2]]),
        count3([v[1], v[3], v[0]], [v[1], v[2], v[3]]),
        four_cycle,
    ]
}

#[test]
fn evaluation_matrix_matches_direct_counts() {
    for n in 6..=9usize {
        let g = KneserGraph::build(n).unwrap();
        let basis = q_orbit_basis(n).unwrap();
        let m = evaluation_matrix(&q_catalog(n).unwrap(), &basis).unwrap();
        for (col, label) in basis.labels.iter().enumerate() {
            let idx: usize = label[1..].parse().unwrap();
            let row = brute_row(&g, &B[idx - 1]);
            let column: Vec<i64> = m.entries.iter().map(|r| i64::try_from(&r[col]).unwrap()).collect();
            assert_eq!(column, row, "n = {n}, column {label}");
        }
    }
}

#[test]
fn catalog_spans_q_and_contains_r_a() {
    for n in 6..=10 {
        let basis = q_orbit_basis(n).unwrap();
        let catalog = q_catalog(n).unwrap();
        let m = evaluation_matrix(&catalog, &basis).unwrap();
        assert_eq!(m.rank(), basis.len(), "n = {n}");
        let ra = four_box(FourBoxName::RA, n).unwrap();
        assert!(basis.supports(&ra));
        let space = Subspace::spanned_by(4, n, catalog.iter().map(|e| &e.tensor)).unwrap();
        let coef = space.solve(&ra).unwrap().expect("R_A in span");
        let mut sum = kgplanar::InvariantTensor::zero(4, n);
        for (e, c) in catalog.iter().zip(&coef) {
            sum = sum.add(&e.tensor.scale(c)).unwrap();
        }
        assert_eq!(sum, ra, "n = {n}");
    }
}

#[test]
fn reduced_case_matrices() {
    let m7 = evaluation_matrix(&q_catalog(7).unwrap(), &q_orbit_basis(7).unwrap()).unwrap();
    let sub7 = m7.select_rows(&["e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8"]).unwrap();
    let (printed7, det7) = formulas::printed_matrix(7).unwrap();
    assert_eq!(sub7.entries, printed7);
    assert_eq!(sub7.determinant().unwrap(), det7);

    let m6 = evaluation_matrix(&q_catalog(6).unwrap(), &q_orbit_basis(6).unwrap()).unwrap();
    let sub6 = m6.select_rows(&["e1", "e2", "e3", "e4", "e5", "e6"]).unwrap();
    let (printed6, det6) = formulas::printed_matrix(6).unwrap();
    assert_eq!(sub6.entries[..5], printed6[..5]);
    // the star row at n = 6: only b1 has a common neighbour of all four
    // vertices; the printed sixth row is the n = 7 row
    let int = |v: &[i64]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
    assert_eq!(sub6.entries[5], int(&[1, 0, 0, 0, 0, 0]));
    assert_eq!(printed6[5], int(&[3, 1, 0, 1, 0, 0]));
    assert_eq!(sub6.determinant().unwrap(), det6);
}

#[test]
fn closed_form_rows_for_n_at_least_eight() {
    for n in 8..=10usize {
        let m = evaluation_matrix(&q_catalog(n).unwrap(), &q_orbit_basis(n).unwrap()).unwrap();
        for (i, r) in formulas::FIXED_ROWS.iter().enumerate() {
            let expect: Vec<Integer> = r.iter().map(|&x| Integer::from(x)).collect();
            assert_eq!(m.entries[i], expect, "n = {n}, row {}", i + 1);
        }
        assert_eq!(m.entries[5], formulas::star_row(n), "n = {n}");
        assert_eq!(m.entries[6], formulas::x_row(n), "n = {n}");
        assert_eq!(m.entries[7], formulas::x_row_transposed(n), "n = {n}");
    }
}

#[test]
fn ninth_row_against_printed_y() {
    // e9 agrees with y_1..y_8 and differs in y_9
    for (n, computed_y9) in [(8usize, 18i64), (9, 498)] {
        let m = evaluation_matrix(&q_catalog(n).unwrap(), &q_orbit_basis(n).unwrap()).unwrap();
        let y = formulas::y_row(n);
        for j in 0..8 {
            assert_eq!(y[j], kgplanar::Rational::from_integer(m.entries[8][j].clone()), "n = {n}, y{}", j + 1);
        }
        assert_eq!(m.entries[8][8], Integer::from(computed_y9));
        assert_ne!(y[8], kgplanar::Rational::from_integer(Integer::from(computed_y9)));
    }
    assert_eq!(formulas::y_row(8)[0], kgplanar::Rational::from_integer(6.into()));
}

#[test]
fn printed_y_row_gives_the_determinant_formula() {
    for n in 8..=10usize {
        let m = evaluation_matrix(&q_catalog(n).unwrap(), &q_orbit_basis(n).unwrap()).unwrap();
        let mut rows: Vec<Vec<kgplanar::Rational>> = m.entries[..8]
            .iter()
            .map(|r| r.iter().cloned().map(kgplanar::Rational::from_integer).collect())
            .collect();
        rows.push(formulas::y_row(n));
        let k = n as i64;
        let expect = kgplanar::Rational::from_integer((8 * (2 * k * k - 26 * k + 83)).into());
        assert_eq!(kgplanar::linalg::determinant(&rows).unwrap(), expect, "n = {n}");
        assert_eq!(m.determinant().unwrap(), Integer::from(16), "n = {n}");
    }
}
