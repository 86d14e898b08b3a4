use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;

use super::{canonicalize_unchecked, canonicalize_vertices, orbit_size, Pattern};
use crate::error::{Error, Result};
use crate::graph::KneserGraph;
use crate::tensor::{increment, SpinTensor};
use crate::Rational;

/// An `S_n`-invariant function on tuples of vertices of KG(n,2), stored
/// sparsely as a map from orbit patterns to values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantTensor {
    arity: usize,
    n: usize,
    entries: BTreeMap<Pattern, Rational>,
}

/// Sparse table of tuple values, keyed by vertex indices.
pub(crate) type TupleTable = HashMap<Vec<u16>, Rational>;

impl InvariantTensor {
    pub fn zero(arity: usize, n: usize) -> Self {
        InvariantTensor {
            arity,
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn scalar(value: Rational, n: usize) -> Self {
        let mut t = Self::zero(0, n);
        t.insert(Pattern::empty(), value);
        t
    }

    pub fn from_entries(arity: usize, n: usize, entries: impl IntoIterator<Item = (Pattern, Rational)>) -> Result<Self> {
        let mut t = Self::zero(arity, n);
        for (p, v) in entries {
            if p.arity() != arity {
                return Err(Error::invalid(format!("pattern {p} has arity {}, expected {arity}", p.arity())));
            }
            if !p.is_valid_for(n) {
                return Err(Error::invalid(format!("pattern {p} is not valid for n = {n}")));
            }
            t.insert(p, v);
        }
        Ok(t)
    }

    /// Builds the tensor whose value on each valid pattern is `f(pattern)`.
    pub fn from_fn(arity: usize, n: usize, mut f: impl FnMut(&Pattern) -> Rational) -> Result<Self> {
        let mut t = Self::zero(arity, n);
        for p in super::enumerate_patterns(arity, n)? {
            let v = f(&p);
            t.insert(p, v);
        }
        Ok(t)
    }

    fn insert(&mut self, p: Pattern, v: Rational) {
        if v.is_zero() {
            self.entries.remove(&p);
        } else {
            self.entries.insert(p, v);
        }
    }

    fn accumulate(&mut self, p: Pattern, v: Rational) {
        if v.is_zero() {
            return;
        }
        let slot = self.entries.entry(p.clone()).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&p);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<Pattern, Rational> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: &Pattern) -> Rational {
        self.entries.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value at an arbitrary tuple of pairs.
    pub fn value_at(&self, tuple: &[[u8; 2]]) -> Result<Rational> {
        if tuple.len() != self.arity {
            return Err(Error::invalid("tuple length differs from arity"));
        }
        let p = super::canonicalize(tuple)?;
        Ok(self.get(&p))
    }

    fn check_compatible(&self, other: &InvariantTensor) -> Result<()> {
        if self.n != other.n {
            return Err(Error::invalid(format!("tensors for n = {} and n = {}", self.n, other.n)));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &InvariantTensor) -> Result<()> {
        self.check_compatible(other)?;
        if self.arity != other.arity {
            return Err(Error::invalid(format!("arity {} vs arity {}", self.arity, other.arity)));
        }
        Ok(())
    }

    pub fn add(&self, other: &InvariantTensor) -> Result<InvariantTensor> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (p, v) in &other.entries {
            out.accumulate(p.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &InvariantTensor) -> Result<InvariantTensor> {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> InvariantTensor {
        let mut out = Self::zero(self.arity, self.n);
        for (p, v) in &self.entries {
            out.insert(p.clone(), v * c);
        }
        out
    }

    pub fn tensor_product(&self, other: &InvariantTensor) -> Result<InvariantTensor> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.arity + other.arity, self.n);
        for (p, a) in &self.entries {
            for (q, b) in &other.entries {
                let value = a * b;
                for r in overlays(p, q, self.n) {
                    out.entries.insert(r, value.clone());
                }
            }
        }
        Ok(out)
    }

    fn relabel(&self, arity: usize, f: impl Fn(&[[u8; 2]]) -> Vec<[u8; 2]>) -> InvariantTensor {
        let mut out = Self::zero(arity, self.n);
        for (p, v) in &self.entries {
            out.entries.insert(canonicalize_unchecked(&f(p.pairs())), v.clone());
        }
        out
    }

    pub fn permute_adjacent(&self, k: usize) -> Result<InvariantTensor> {
        if k == 0 || k >= self.arity {
            return Err(Error::invalid(format!("permute position {k} out of range for arity {}", self.arity)));
        }
        Ok(self.relabel(self.arity, |t| {
            let mut t = t.to_vec();
            t.swap(k - 1, k);
            t
        }))
    }

    /// Cyclic shift, `result(x_1..x_k) = f(x_k, x_1, .., x_{k-1})`.
    pub fn rotate(&self) -> InvariantTensor {
        if self.arity < 2 {
            return self.clone();
        }
        self.relabel(self.arity, |s| {
            let mut t = s[1..].to_vec();
            t.push(s[0]);
            t
        })
    }

    pub fn merge(&self, i: usize) -> Result<InvariantTensor> {
        if i == 0 || i >= self.arity {
            return Err(Error::invalid(format!("merge position {i} out of range for arity {}", self.arity)));
        }
        let mut out = Self::zero(self.arity - 1, self.n);
        for (p, v) in &self.entries {
            let t = p.pairs();
            if t[i - 1] == t[i] {
                let mut r = t.to_vec();
                r.remove(i);
                out.entries.insert(canonicalize_unchecked(&r), v.clone());
            }
        }
        Ok(out)
    }

    pub fn sum_out(&self, i: usize) -> Result<InvariantTensor> {
        if i == 0 || i > self.arity {
            return Err(Error::invalid(format!("sum position {i} out of range for arity {}", self.arity)));
        }
        let targets: BTreeSet<Pattern> = self
            .entries
            .keys()
            .map(|p| {
                let mut r = p.pairs().to_vec();
                r.remove(i - 1);
                canonicalize_unchecked(&r)
            })
            .collect();
        let n = self.n as u8;
        let mut out = Self::zero(self.arity - 1, self.n);
        let mut t = Vec::with_capacity(self.arity);
        for q in targets {
            let mut acc = Rational::zero();
            for a in 1..=n {
                for b in a + 1..=n {
                    t.clear();
                    t.extend_from_slice(q.pairs());
                    t.insert(i - 1, [a, b]);
                    if let Some(v) = self.entries.get(&canonicalize_unchecked(&t)) {
                        acc += v;
                    }
                }
            }
            out.insert(q, acc);
        }
        Ok(out)
    }

    pub fn split(&self, i: usize) -> Result<InvariantTensor> {
        if i == 0 || i > self.arity + 1 {
            return Err(Error::invalid(format!("split position {i} out of range for arity {}", self.arity)));
        }
        let mut out = Self::zero(self.arity + 2, self.n);
        for (q, v) in &self.entries {
            let s = q.support() as u8;
            let top = (s + 2).min(self.n as u8);
            for a in 1..=top {
                for b in a + 1..=top {
                    // fresh labels must be introduced in order
                    if a > s + 1 || (b > s + 1 && a != s + 1) {
                        continue;
                    }
                    let mut t = q.pairs().to_vec();
                    t.insert(i - 1, [a, b]);
                    t.insert(i - 1, [a, b]);
                    out.entries.insert(canonicalize_unchecked(&t), v.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn hadamard_product(&self, other: &InvariantTensor) -> Result<InvariantTensor> {
        self.check_same_shape(other)?;
        let mut out = Self::zero(self.arity, self.n);
        for (p, a) in &self.entries {
            if let Some(b) = other.entries.get(p) {
                out.insert(p.clone(), a * b);
            }
        }
        Ok(out)
    }

    pub fn inner_product(&self, other: &InvariantTensor) -> Result<Rational> {
        self.check_same_shape(other)?;
        let mut acc = Rational::zero();
        for (p, a) in &self.entries {
            if let Some(b) = other.entries.get(p) {
                let size = Rational::from_integer(orbit_size(p, self.n)?.into());
                acc += size * a * b;
            }
        }
        Ok(acc)
    }

    /// Largest absolute value, the operator norm in the entrywise algebra.
    pub fn sup_norm(&self) -> Rational {
        self.entries
            .values()
            .map(|v| if v < &Rational::zero() { -v.clone() } else { v.clone() })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// All tuples (as vertex indices of `g`) on which the tensor is nonzero.
    pub(crate) fn expand(&self, g: &KneserGraph) -> TupleTable {
        let mut out = TupleTable::new();
        for (p, v) in &self.entries {
            for tuple in orbit_tuples(p, g) {
                out.insert(tuple, v.clone());
            }
        }
        out
    }

    /// Collapses a sparse table of tuple values that is known to be
    /// invariant.
    pub(crate) fn collapse(table: &TupleTable, arity: usize, g: &KneserGraph) -> InvariantTensor {
        let mut out = Self::zero(arity, g.n());
        let mut idx = Vec::with_capacity(arity);
        for (t, v) in table {
            idx.clear();
            idx.extend(t.iter().map(|&x| x as usize));
            out.insert(canonicalize_vertices(g, &idx), v.clone());
        }
        out
    }

    /// Vertical stacking of `2k`-boxes; see [`SpinTensor::compose`].
    pub fn compose(&self, other: &InvariantTensor) -> Result<InvariantTensor> {
        self.check_same_shape(other)?;
        if self.arity % 2 != 0 {
            return Err(Error::invalid("composition needs an even number of legs"));
        }
        let k = self.arity / 2;
        let g = KneserGraph::build_with_limit(self.n, usize::MAX)?;
        let mut by_top: HashMap<Vec<u16>, Vec<(Vec<u16>, Rational)>> = HashMap::new();
        for (t, v) in other.expand(&g) {
            by_top.entry(t[..k].to_vec()).or_default().push((t[k..].to_vec(), v));
        }
        let mut result = TupleTable::new();
        for (t, a) in self.expand(&g) {
            let y: Vec<u16> = t[k..].iter().rev().copied().collect();
            if let Some(rows) = by_top.get(&y) {
                for (w, b) in rows {
                    let mut key = t[..k].to_vec();
                    key.extend_from_slice(w);
                    *result.entry(key).or_insert_with(Rational::zero) += &a * b;
                }
            }
        }
        result.retain(|_, v| !v.is_zero());
        Ok(Self::collapse(&result, self.arity, &g))
    }

    pub fn to_dense(&self) -> Result<SpinTensor> {
        let g = KneserGraph::build_with_limit(self.n, usize::MAX)?;
        let d = g.order();
        let mut out = SpinTensor::zeros(self.arity, d)?;
        if self.entries.is_empty() {
            return Ok(out);
        }
        let mut idx = vec![0usize; self.arity];
        let total = out.values().len();
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            values.push(self.get(&canonicalize_vertices(&g, &idx)));
            increment(&mut idx, d);
        }
        out = SpinTensor::from_values(self.arity, d, values)?;
        Ok(out)
    }

    /// Orbit average of a dense tensor over the spin set of KG(n,2).
    pub fn symmetrize(f: &SpinTensor) -> Result<InvariantTensor> {
        let d = f.d();
        let n = (1..=64).find(|&n| n * (n - 1) / 2 == d).filter(|&n| n >= 2).ok_or_else(|| {
            Error::invalid(format!("spin set of size {d} is not the vertex set of a KG(n,2)"))
        })?;
        let g = KneserGraph::build_with_limit(n.max(4), usize::MAX)?;
        if g.order() != d {
            return Err(Error::invalid("symmetrize needs n >= 4"));
        }
        let mut sums: BTreeMap<Pattern, (Rational, u64)> = BTreeMap::new();
        let mut idx = vec![0usize; f.arity()];
        for v in f.values() {
            let slot = sums
                .entry(canonicalize_vertices(&g, &idx))
                .or_insert_with(|| (Rational::zero(), 0));
            slot.0 += v;
            slot.1 += 1;
            increment(&mut idx, d);
        }
        let mut out = Self::zero(f.arity(), n);
        for (p, (sum, count)) in sums {
            out.insert(p, sum / Rational::from_integer(count.into()));
        }
        Ok(out)
    }
}

/// Every orbit pattern of a pair (tuple in orbit `p`, tuple in orbit `q`)
/// with total support at most `n`, as a pattern of the concatenation.
fn overlays(p: &Pattern, q: &Pattern, n: usize) -> BTreeSet<Pattern> {
    let sp = p.support();
    let sq = q.support();
    let mut out = BTreeSet::new();
    let mut image = vec![0u8; sq + 1];
    let mut used = vec![false; sp + 1];
    overlay_rec(p, q, 1, sp, n, &mut image, &mut used, sp as u8, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn overlay_rec(
    p: &Pattern,
    q: &Pattern,
    x: usize,
    sp: usize,
    n: usize,
    image: &mut Vec<u8>,
    used: &mut Vec<bool>,
    next_fresh: u8,
    out: &mut BTreeSet<Pattern>,
) {
    if x == image.len() {
        let mut t = p.pairs().to_vec();
        t.extend(q.pairs().iter().map(|pair| [image[pair[0] as usize], image[pair[1] as usize]]));
        out.insert(canonicalize_unchecked(&t));
        return;
    }
    for y in 1..=sp {
        if !used[y] {
            used[y] = true;
            image[x] = y as u8;
            overlay_rec(p, q, x + 1, sp, n, image, used, next_fresh, out);
            used[y] = false;
        }
    }
    if (next_fresh as usize) < n {
        image[x] = next_fresh + 1;
        overlay_rec(p, q, x + 1, sp, n, image, used, next_fresh + 1, out);
    }
}

/// All tuples of vertex indices in the orbit of `p`.
fn orbit_tuples(p: &Pattern, g: &KneserGraph) -> BTreeSet<Vec<u16>> {
    let s = p.support();
    let n = g.n();
    let mut out = BTreeSet::new();
    let mut image = vec![0u8; s + 1];
    let mut used = vec![false; n + 1];
    fn rec(p: &Pattern, g: &KneserGraph, x: usize, image: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut BTreeSet<Vec<u16>>) {
        if x == image.len() {
            out.insert(
                p.pairs()
                    .iter()
                    .map(|q| g.index_of_points(image[q[0] as usize], image[q[1] as usize]) as u16)
                    .collect(),
            );
            return;
        }
        for y in 1..used.len() {
            if !used[y] {
                used[y] = true;
                image[x] = y as u8;
                rec(p, g, x + 1, image, used, out);
                used[y] = false;
            }
        }
    }
    rec(p, g, 1, &mut image, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::enumerate_patterns;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn pattern_fn(n: usize, arity: usize, f: impl Fn(&[[u8; 2]]) -> bool) -> InvariantTensor {
        InvariantTensor::from_fn(arity, n, |p| if f(p.pairs()) { q(1) } else { q(0) }).unwrap()
    }

    fn identity(n: usize) -> InvariantTensor {
        pattern_fn(n, 2, |t| t[0] == t[1])
    }

    fn adjacency(n: usize) -> InvariantTensor {
        pattern_fn(n, 2, |t| t[0].iter().all(|x| !t[1].contains(x)))
    }

    #[test]
    fn merge_of_identities_is_ghz3() {
        let i = identity(5);
        let ghz3 = pattern_fn(5, 3, |t| t[0] == t[1] && t[1] == t[2]);
        assert_eq!(i.tensor_product(&i).unwrap().merge(2).unwrap(), ghz3);
    }

    #[test]
    fn adjacency_norms() {
        let a = adjacency(5);
        assert_eq!(a.inner_product(&a).unwrap(), q(30));
        let deg = a.sum_out(1).unwrap();
        assert_eq!(deg.entries().len(), 1);
        assert_eq!(deg.get(&"({1,2})".parse().unwrap()), q(3));
    }

    #[test]
    fn symmetrize_round_trip() {
        let a = adjacency(5);
        let dense = a.to_dense().unwrap();
        assert_eq!(InvariantTensor::symmetrize(&dense).unwrap(), a);
        assert!(InvariantTensor::zero(2, 5).to_dense().unwrap().is_zero());
    }

    #[test]
    fn orbit_tuples_have_orbit_size() {
        let g = KneserGraph::build(6).unwrap();
        for p in enumerate_patterns(3, 6).unwrap() {
            assert_eq!(orbit_tuples(&p, &g).len() as u128, orbit_size(&p, 6).unwrap());
        }
    }

    #[test]
    fn rotation_matches_dense() {
        let f = InvariantTensor::from_fn(3, 5, |p| q(p.pairs()[0][1] as i64 + 3 * p.pairs()[2][1] as i64)).unwrap();
        assert_eq!(f.rotate().to_dense().unwrap(), f.to_dense().unwrap().rotate());
    }
}
