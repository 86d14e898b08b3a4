use std::collections::HashMap;

use kgplanar::{ContractionNetwork, KneserGraph, Rational, TwoBoxName};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct NetSpec {
    externals: usize,
    internals: usize,
    factors: Vec<(TwoBoxName, usize, usize)>,
}

fn name(i: usize, externals: usize) -> String {
    if i < externals {
        format!("x{}", i + 1)
    } else {
        format!("u{}", i - externals + 1)
    }
}

impl NetSpec {
    fn build(&self) -> ContractionNetwork {
        let total = self.externals + self.internals;
        let mut net = ContractionNetwork::new();
        let mut used = vec![false; total];
        for &(b, i, j) in &self.factors {
            net.factor(b, &name(i, self.externals), &name(j, self.externals));
            used[i] = true;
            used[j] = true;
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                net.factor(TwoBoxName::J, &name(i, self.externals), &name(0, self.externals));
            }
        }
        let ext: Vec<String> = (0..self.externals).map(|i| name(i, self.externals)).collect();
        let refs: Vec<&str> = ext.iter().map(String::as_str).collect();
        net.set_externals(&refs).unwrap();
        net
    }

    /// Direct sum over every assignment of the internal indices.
    fn brute_force(&self, g: &KneserGraph, boundary: &[usize]) -> i128 {
        let net = self.build();
        let names = net.index_names().to_vec();
        let ext = net.externals().to_vec();
        let ints = net.internals();
        let d = g.order();
        let mut assign = vec![0usize; names.len()];
        for (k, &e) in ext.iter().enumerate() {
            assign[e] = boundary[k];
        }
        let mut total = 0i128;
        let count = d.pow(ints.len() as u32);
        for mut code in 0..count {
            for &i in &ints {
                assign[i] = code % d;
                code /= d;
            }
            let all = net
                .factors()
                .iter()
                .all(|f| f.name.holds_idx(g, assign[f.indices[0]], assign[f.indices[1]]));
            total += all as i128;
        }
        total
    }
}

fn spec() -> impl Strategy<Value = NetSpec> {
    (1usize..=2, 0usize..=3).prop_flat_map(|(e, m)| {
        let total = e + m;
        let factor = (
            prop::sample::select(TwoBoxName::ALL.to_vec()),
            0..total,
            0..total,
        );
        proptest::collection::vec(factor, 1..=6).prop_map(move |factors| NetSpec {
            externals: e,
            internals: m,
            factors,
        })
    })
}

fn nonzero(m: HashMap<Vec<u16>, i128>) -> HashMap<Vec<u16>, i128> {
    m.into_iter().filter(|(_, v)| *v != 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn elimination_order_does_not_matter(s in spec(), seeds in proptest::collection::vec(any::<u64>(), 3)) {
        let g = KneserGraph::build(5).unwrap();
        let net = s.build();
        let reference = nonzero(net.evaluate_sparse(&g).unwrap());
        for seed in seeds {
            let mut order = net.internals();
            // a seeded Fisher-Yates shuffle
            let mut x = seed | 1;
            for i in (1..order.len()).rev() {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                order.swap(i, (x % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(&nonzero(net.evaluate_sparse_with_order(&g, &order).unwrap()), &reference);
        }
    }

    #[test]
    fn dense_evaluation_matches_brute_force(s in spec()) {
        let g = KneserGraph::build(5).unwrap();
        let dense = s.build().evaluate_dense(&g).unwrap();
        let d = g.order();
        let mut boundary = vec![0usize; s.externals];
        for code in 0..d.pow(s.externals as u32) {
            let mut c = code;
            for slot in boundary.iter_mut().rev() {
                *slot = c % d;
                c /= d;
            }
            let expected = Rational::from_integer(s.brute_force(&g, &boundary).into());
            prop_assert_eq!(dense.get(&boundary), &expected);
        }
    }

    #[test]
    fn pinned_evaluation_matches_table(s in spec(), picks in proptest::collection::vec(0usize..10, 2)) {
        let g = KneserGraph::build(5).unwrap();
        let net = s.build();
        let dense = net.evaluate_dense(&g).unwrap();
        let boundary: Vec<usize> = picks[..s.externals].to_vec();
        prop_assert_eq!(&net.evaluate_at(&g, &boundary).unwrap(), dense.get(&boundary));
    }
}

#[test]
fn invariant_evaluation_matches_dense() {
    let g = KneserGraph::build(6).unwrap();
    let net = ContractionNetwork::parse(
        "factor A x1 u\nfactor A u x2\nfactor T x2 x3\nfactor A u x3\nexternal x1 x2 x3\n",
    )
    .unwrap();
    let inv = net.evaluate_invariant(&g).unwrap();
    assert_eq!(inv.to_dense().unwrap(), net.evaluate_dense(&g).unwrap());
    assert_eq!(net.evaluate_invariant_sparse(&g).unwrap(), inv);
}
