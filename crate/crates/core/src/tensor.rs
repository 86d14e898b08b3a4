//! Dense spin tensors: exact rational functions on `X^k` for a spin set
//! `X = {0..d-1}`, together with the primitive planar operations.
//!
//! Positions are 1-based throughout, so `merge(f, 1)` identifies the first
//! two arguments. Values are stored row-major with the first argument most
//! significant, which makes index order coincide with lexicographic order of
//! tuples.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Largest number of entries a dense tensor may hold.
pub const DEFAULT_DENSE_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinTensor {
    arity: usize,
    d: usize,
    values: Vec<Rational>,
}

fn table_len(arity: usize, d: usize) -> Result<usize> {
    let mut len: u128 = 1;
    for _ in 0..arity {
        len = len.saturating_mul(d as u128);
    }
    if len > DEFAULT_DENSE_CAP {
        return Err(Error::capacity(
            format!("dense tensor of arity {arity} over {d} spins"),
            len,
            DEFAULT_DENSE_CAP,
        ));
    }
    Ok(len as usize)
}

impl SpinTensor {
    pub fn zeros(arity: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("spin set must be nonempty"));
        }
        let len = table_len(arity, d)?;
        Ok(SpinTensor {
            arity,
            d,
            values: vec![Rational::zero(); len],
        })
    }

    pub fn scalar(value: Rational, d: usize) -> Self {
        SpinTensor {
            arity: 0,
            d,
            values: vec![value],
        }
    }

    pub fn from_fn(arity: usize, d: usize, mut f: impl FnMut(&[usize]) -> Rational) -> Result<Self> {
        let mut t = Self::zeros(arity, d)?;
        let mut idx = vec![0usize; arity];
        for slot in t.values.iter_mut() {
            *slot = f(&idx);
            increment(&mut idx, d);
        }
        Ok(t)
    }

    pub fn from_values(arity: usize, d: usize, values: Vec<Rational>) -> Result<Self> {
        let len = table_len(arity, d)?;
        if values.len() != len {
            return Err(Error::invalid(format!(
                "expected {len} values for arity {arity}, got {}",
                values.len()
            )));
        }
        Ok(SpinTensor { arity, d, values })
    }

    /// The identity 2-box `I(x,y) = [x = y]`.
    pub fn identity(d: usize) -> Self {
        Self::from_fn(2, d, |x| indicator(x[0] == x[1])).expect("2-box fits the cap")
    }

    /// The all-ones tensor of the given arity.
    pub fn ones(arity: usize, d: usize) -> Result<Self> {
        Self::from_fn(arity, d, |_| Rational::one())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.arity);
        idx.iter().fold(0, |acc, &x| acc * self.d + x)
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.values[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Rational) {
        let o = self.offset(idx);
        self.values[o] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Nonzero entries in lexicographic order of their index tuples.
    pub fn nonzeros(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(o, v)| (self.decode(o), v))
    }

    pub fn decode(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.arity];
        for slot in idx.iter_mut().rev() {
            *slot = offset % self.d;
            offset /= self.d;
        }
        idx
    }

    fn check_same_shape(&self, other: &SpinTensor) -> Result<()> {
        if self.d != other.d || self.arity != other.arity {
            return Err(Error::invalid(format!(
                "shape mismatch: arity {} over {} spins vs arity {} over {} spins",
                self.arity, self.d, other.arity, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SpinTensor) -> Result<SpinTensor> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(self.with_values(values))
    }

    pub fn sub(&self, other: &SpinTensor) -> Result<SpinTensor> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(self.with_values(values))
    }

    pub fn scale(&self, c: &Rational) -> SpinTensor {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    fn with_values(&self, values: Vec<Rational>) -> SpinTensor {
        SpinTensor {
            arity: self.arity,
            d: self.d,
            values,
        }
    }

    pub fn tensor_product(&self, other: &SpinTensor) -> Result<SpinTensor> {
        if self.d != other.d {
            return Err(Error::invalid("tensor product of tensors over different spin sets"));
        }
        let len = table_len(self.arity + other.arity, self.d)?;
        let mut values = Vec::with_capacity(len);
        for a in &self.values {
            if a.is_zero() {
                values.extend(std::iter::repeat_n(Rational::zero(), other.values.len()));
            } else {
                values.extend(other.values.iter().map(|b| a * b));
            }
        }
        Ok(SpinTensor {
            arity: self.arity + other.arity,
            d: self.d,
            values,
        })
    }

    fn reindex(&self, arity: usize, source: impl Fn(&[usize], &mut Vec<usize>) -> bool) -> Result<SpinTensor> {
        let mut src = Vec::with_capacity(self.arity);
        SpinTensor::from_fn(arity, self.d, |x| {
            src.clear();
            if source(x, &mut src) {
                self.get(&src).clone()
            } else {
                Rational::zero()
            }
        })
    }

    /// Swaps arguments `k` and `k+1`: `result(.., x_k, x_{k+1}, ..) = f(.., x_{k+1}, x_k, ..)`.
    pub fn permute_adjacent(&self, k: usize) -> Result<SpinTensor> {
        if k == 0 || k >= self.arity {
            return Err(Error::invalid(format!("permute position {k} out of range for arity {}", self.arity)));
        }
        self.reindex(self.arity, |x, src| {
            src.extend_from_slice(x);
            src.swap(k - 1, k);
            true
        })
    }

    /// Cyclic shift of the boundary: `result(x_1..x_k) = f(x_k, x_1, .., x_{k-1})`.
    pub fn rotate(&self) -> SpinTensor {
        if self.arity < 2 {
            return self.clone();
        }
        let k = self.arity;
        self.reindex(k, |x, src| {
            src.push(x[k - 1]);
            src.extend_from_slice(&x[..k - 1]);
            true
        })
        .expect("same size as input")
    }

    /// `result(x_1..x_{k-1}) = f(x_1, .., x_i, x_i, x_{i+1}, ..)`.
    pub fn merge(&self, i: usize) -> Result<SpinTensor> {
        if i == 0 || i >= self.arity {
            return Err(Error::invalid(format!("merge position {i} out of range for arity {}", self.arity)));
        }
        self.reindex(self.arity - 1, |x, src| {
            src.extend_from_slice(&x[..i]);
            src.push(x[i - 1]);
            src.extend_from_slice(&x[i..]);
            true
        })
    }

    /// `result(x_1..x_{k-1}) = sum_y f(x_1, .., x_{i-1}, y, x_i, ..)`.
    pub fn sum_out(&self, i: usize) -> Result<SpinTensor> {
        if i == 0 || i > self.arity {
            return Err(Error::invalid(format!("sum position {i} out of range for arity {}", self.arity)));
        }
        let d = self.d;
        // value at outer index o, summed index y, inner index r:
        // offset = (o * d + y) * inner + r
        let inner = d.pow((self.arity - i) as u32);
        let outer = self.values.len() / (inner * d);
        let mut values = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            for r in 0..inner {
                let mut acc = Rational::zero();
                for y in 0..d {
                    let v = &self.values[(o * d + y) * inner + r];
                    if !v.is_zero() {
                        acc += v;
                    }
                }
                values.push(acc);
            }
        }
        Ok(SpinTensor {
            arity: self.arity - 1,
            d,
            values,
        })
    }

    /// `result(x_1..x_{k+2}) = [x_i = x_{i+1}] f(x_1, .., x_{i-1}, x_{i+2}, ..)`.
    pub fn split(&self, i: usize) -> Result<SpinTensor> {
        if i == 0 || i > self.arity + 1 {
            return Err(Error::invalid(format!("split position {i} out of range for arity {}", self.arity)));
        }
        self.reindex(self.arity + 2, |x, src| {
            if x[i - 1] != x[i] {
                return false;
            }
            src.extend_from_slice(&x[..i - 1]);
            src.extend_from_slice(&x[i + 1..]);
            true
        })
    }

    pub fn hadamard_product(&self, other: &SpinTensor) -> Result<SpinTensor> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(self.with_values(values))
    }

    pub fn inner_product(&self, other: &SpinTensor) -> Result<Rational> {
        self.check_same_shape(other)?;
        let mut acc = Rational::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        Ok(acc)
    }

    /// Vertical stacking of two `2k`-boxes read as operators from their first
    /// `k` legs (top, left to right) to their last `k` legs (bottom, right to
    /// left): `result(x, w) = sum_y f(x_1..x_k, y_k..y_1) g(y_1..y_k, w)`.
    ///
    /// This equals tensoring `f` with `g` and joining the facing legs with
    /// merge/sum_out pairs, computed without the intermediate.
    pub fn compose(&self, other: &SpinTensor) -> Result<SpinTensor> {
        self.check_same_shape(other)?;
        if self.arity % 2 != 0 {
            return Err(Error::invalid("composition needs an even number of legs"));
        }
        let k = self.arity / 2;
        let d = self.d;
        let block = d.pow(k as u32);
        let mut out = SpinTensor::zeros(self.arity, d)?;
        for (o, fv) in self.values.iter().enumerate() {
            if fv.is_zero() {
                continue;
            }
            let top = o / block;
            let mut rest = o % block;
            // reverse the bottom block of f to obtain the top block of g
            let mut y = 0;
            for _ in 0..k {
                y = y * d + rest % d;
                rest /= d;
            }
            for w in 0..block {
                let gv = &other.values[y * block + w];
                if !gv.is_zero() {
                    out.values[top * block + w] += fv * gv;
                }
            }
        }
        Ok(out)
    }

    /// One line `i_1,..,i_k<TAB>num/den` per nonzero entry, in lexicographic order.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (idx, v) in self.nonzeros() {
            let tuple: Vec<String> = idx.iter().map(ToString::to_string).collect();
            writeln!(s, "{}\t{}/{}", tuple.join(","), v.numer(), v.denom()).unwrap();
        }
        s
    }

    pub fn parse_dump(arity: usize, d: usize, text: &str) -> Result<SpinTensor> {
        let mut t = SpinTensor::zeros(arity, d)?;
        for (lineno, line) in text.lines().enumerate() {
            let err = |m: &str| Error::Parse {
                line: lineno + 1,
                message: m.to_string(),
            };
            if line.trim().is_empty() {
                continue;
            }
            let (tuple, value) = line.split_once('\t').ok_or_else(|| err("missing tab"))?;
            let idx: Vec<usize> = if tuple.is_empty() {
                Vec::new()
            } else {
                tuple
                    .split(',')
                    .map(|s| s.parse::<usize>().map_err(|_| err("bad index")))
                    .collect::<Result<_>>()?
            };
            if idx.len() != arity || idx.iter().any(|&x| x >= d) {
                return Err(err("index tuple does not fit the tensor shape"));
            }
            let value: Rational = value.parse().map_err(|_| err("bad rational"))?;
            t.set(&idx, value);
        }
        Ok(t)
    }
}

pub(crate) fn increment(idx: &mut [usize], d: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < d {
            return;
        }
        *slot = 0;
    }
}

pub(crate) fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn ghz3(d: usize) -> SpinTensor {
        SpinTensor::from_fn(3, d, |x| indicator(x[0] == x[1] && x[1] == x[2])).unwrap()
    }

    #[test]
    fn products_and_units() {
        let j1 = SpinTensor::ones(1, 3).unwrap();
        assert_eq!(j1.tensor_product(&j1).unwrap(), SpinTensor::ones(2, 3).unwrap());
        let i = SpinTensor::identity(2);
        assert_eq!(i.tensor_product(&SpinTensor::scalar(q(1), 2)).unwrap(), i);
        let ii = i.tensor_product(&i).unwrap();
        assert_eq!(ii.get(&[0, 0, 1, 1]), &q(1));
        assert_eq!(ii.get(&[0, 1, 1, 1]), &q(0));
    }

    #[test]
    fn merges() {
        let i = SpinTensor::identity(4);
        assert_eq!(i.merge(1).unwrap(), SpinTensor::ones(1, 4).unwrap());
        assert_eq!(i.tensor_product(&i).unwrap().merge(2).unwrap(), ghz3(4));
        assert_eq!(SpinTensor::ones(2, 4).unwrap().merge(1).unwrap(), SpinTensor::ones(1, 4).unwrap());
        assert!(i.merge(2).is_err());
    }

    #[test]
    fn sums() {
        let i = SpinTensor::identity(4);
        assert_eq!(i.sum_out(1).unwrap(), SpinTensor::ones(1, 4).unwrap());
        let j1 = SpinTensor::ones(1, 4).unwrap();
        assert_eq!(j1.sum_out(1).unwrap(), SpinTensor::scalar(q(4), 4));
        assert!(j1.sum_out(2).is_err());
    }

    fn dummy_leg(f: &SpinTensor, i: usize) -> SpinTensor {
        SpinTensor::from_fn(f.arity() + 1, f.d(), |x| {
            let mut rest = x.to_vec();
            rest.remove(i - 1);
            f.get(&rest).clone()
        })
        .unwrap()
    }

    #[test]
    fn split_inverts_merge_and_sum() {
        let one = SpinTensor::scalar(q(1), 3);
        assert_eq!(one.split(1).unwrap(), SpinTensor::identity(3));
        let f = SpinTensor::from_fn(2, 3, |x| q((x[0] * 3 + x[1]) as i64 - 2)).unwrap();
        for i in 1..=2 {
            let s = f.split(i).unwrap();
            // zigzag: join the new pair's second leg to the old leg after it
            assert_eq!(s.merge(i + 1).unwrap().sum_out(i).unwrap(), f);
            // capping the pair directly leaves a free leg carrying no data
            let free_leg = dummy_leg(&f, i);
            assert_eq!(s.merge(i).unwrap(), free_leg);
            assert_eq!(s.sum_out(i).unwrap(), free_leg);
        }
    }

    #[test]
    fn permutation_moves_arguments() {
        let f = SpinTensor::from_fn(2, 3, |x| indicator(x[0] == 1)).unwrap();
        let g = f.permute_adjacent(1).unwrap();
        assert_eq!(g.get(&[0, 1]), &q(1));
        assert_eq!(g.get(&[1, 0]), &q(0));
        assert_eq!(g.permute_adjacent(1).unwrap(), f);
        assert_eq!(SpinTensor::identity(3).permute_adjacent(1).unwrap(), SpinTensor::identity(3));
    }

    #[test]
    fn hadamard_and_inner() {
        let i = SpinTensor::identity(3);
        let j = SpinTensor::ones(2, 3).unwrap();
        assert_eq!(j.hadamard_product(&i).unwrap(), i);
        assert_eq!(i.inner_product(&i).unwrap(), q(3));
    }

    #[test]
    fn rotation_has_order_arity() {
        let f = SpinTensor::from_fn(3, 2, |x| q((x[0] + 2 * x[1] + 5 * x[2]) as i64)).unwrap();
        let r = f.rotate();
        assert_eq!(r.get(&[1, 0, 0]), f.get(&[0, 1, 0]));
        assert_eq!(r.rotate().rotate(), f);
    }

    #[test]
    fn compose_matches_primitive_chain() {
        let d = 2;
        let f = SpinTensor::from_fn(4, d, |x| q((x[0] + 2 * x[1] + 3 * x[2] + 7 * x[3]) as i64 - 4)).unwrap();
        let g = SpinTensor::from_fn(4, d, |x| q((5 * x[0] + x[1] * x[3] + x[2]) as i64 - 1)).unwrap();
        let chain = f
            .tensor_product(&g)
            .unwrap()
            .merge(4)
            .unwrap()
            .sum_out(4)
            .unwrap()
            .merge(3)
            .unwrap()
            .sum_out(3)
            .unwrap();
        assert_eq!(f.compose(&g).unwrap(), chain);
    }

    #[test]
    fn dump_round_trip() {
        let f = SpinTensor::from_fn(2, 3, |x| Rational::new((x[0] as i64).into(), ((x[1] + 1) as i64).into())).unwrap();
        let text = f.dump();
        assert!(text.starts_with("1,0\t1/1\n1,1\t1/2\n"));
        assert_eq!(SpinTensor::parse_dump(2, 3, &text).unwrap(), f);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(SpinTensor::zeros(9, 10).unwrap_err().is_capacity());
    }
}
