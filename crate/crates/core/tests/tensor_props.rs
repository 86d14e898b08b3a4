use kgplanar::{Rational, SpinTensor};
use num_traits::Zero;
use proptest::prelude::*;

fn tensor(arity: usize, d: usize) -> impl Strategy<Value = SpinTensor> {
    proptest::collection::vec(-3i64..=3, d.pow(arity as u32))
        .prop_map(move |v| SpinTensor::from_values(arity, d, v.into_iter().map(|x| Rational::from_integer(x.into())).collect()).unwrap())
}

fn shaped() -> impl Strategy<Value = SpinTensor> {
    (1usize..=4, 2usize..=3).prop_flat_map(|(k, d)| tensor(k, d))
}

fn pair() -> impl Strategy<Value = (SpinTensor, SpinTensor)> {
    (1usize..=3, 2usize..=3).prop_flat_map(|(k, d)| (tensor(k, d), tensor(k, d)))
}

/// `f o g` by interleaving `f (x) g` with adjacent swaps and merging each
/// pair of legs.
fn hadamard_by_merges(f: &SpinTensor, g: &SpinTensor) -> SpinTensor {
    let k = f.arity();
    let mut t = f.tensor_product(g).unwrap();
    // move leg k+j (g_j) next to f_j
    for j in 1..k {
        let mut pos = k + j;
        while pos > 2 * j {
            t = t.permute_adjacent(pos - 1).unwrap();
            pos -= 1;
        }
    }
    for j in 1..=k {
        t = t.merge(j).unwrap();
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zigzag_is_identity(f in shaped(), pos in 0usize..5) {
        let i = pos % (f.arity() + 1) + 1;
        if i <= f.arity() {
            let z = f.split(i).unwrap().merge(i + 1).unwrap().sum_out(i).unwrap();
            prop_assert_eq!(z, f);
        }
    }

    #[test]
    fn split_then_merge_or_sum_inserts_a_constant_leg(f in shaped(), pos in 0usize..5) {
        let i = pos % (f.arity() + 1) + 1;
        let ones = SpinTensor::ones(1, f.d()).unwrap();
        let mut with_leg = ones.tensor_product(&f).unwrap();
        for p in 1..i {
            with_leg = with_leg.permute_adjacent(p).unwrap();
        }
        prop_assert_eq!(&f.split(i).unwrap().merge(i).unwrap(), &with_leg);
        prop_assert_eq!(&f.split(i).unwrap().sum_out(i).unwrap(), &with_leg);
    }

    #[test]
    fn coxeter_relations(f in (3usize..=4, 2usize..=3).prop_flat_map(|(k, d)| tensor(k, d))) {
        let k = f.arity();
        for i in 1..k {
            let s = f.permute_adjacent(i).unwrap().permute_adjacent(i).unwrap();
            prop_assert_eq!(&s, &f);
        }
        for i in 1..k - 1 {
            let a = f.permute_adjacent(i).unwrap().permute_adjacent(i + 1).unwrap().permute_adjacent(i).unwrap();
            let b = f.permute_adjacent(i + 1).unwrap().permute_adjacent(i).unwrap().permute_adjacent(i + 1).unwrap();
            prop_assert_eq!(a, b);
        }
        if k == 4 {
            let a = f.permute_adjacent(1).unwrap().permute_adjacent(3).unwrap();
            let b = f.permute_adjacent(3).unwrap().permute_adjacent(1).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn tensor_product_is_associative(
        (a, b, c) in (2usize..=3).prop_flat_map(|d| (tensor(1, d), tensor(2, d), tensor(1, d)))
    ) {
        let left = a.tensor_product(&b).unwrap().tensor_product(&c).unwrap();
        let right = a.tensor_product(&b.tensor_product(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inner_product_symmetric_and_bilinear((f, g) in pair(), h_seed in any::<u64>(), c in -4i64..=4) {
        prop_assert_eq!(f.inner_product(&g).unwrap(), g.inner_product(&f).unwrap());
        let h = SpinTensor::from_fn(f.arity(), f.d(), |x| {
            let s: usize = x.iter().sum();
            Rational::from_integer((((h_seed as usize) ^ s) % 5).into())
        }).unwrap();
        let c = Rational::from_integer(c.into());
        let lhs = f.scale(&c).add(&g).unwrap().inner_product(&h).unwrap();
        let rhs = c * f.inner_product(&h).unwrap() + g.inner_product(&h).unwrap();
        prop_assert_eq!(lhs, rhs);
        let n = f.inner_product(&f).unwrap();
        prop_assert!(n > Rational::zero() || f.is_zero());
    }

    #[test]
    fn hadamard_is_a_merge_chain((f, g) in pair()) {
        prop_assert_eq!(f.hadamard_product(&g).unwrap(), hadamard_by_merges(&f, &g));
    }

    #[test]
    fn rotation_has_period_arity(f in shaped()) {
        let mut r = f.clone();
        for _ in 0..f.arity() {
            r = r.rotate();
        }
        prop_assert_eq!(r, f);
    }

    #[test]
    fn dump_round_trips(f in shaped()) {
        let back = SpinTensor::parse_dump(f.arity(), f.d(), &f.dump()).unwrap();
        prop_assert_eq!(back, f);
    }
}
