//! Exact linear algebra over the rationals: rank, determinant, row-space
//! membership, and the row-reduced [`Subspace`] of invariant tensors.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::orbit::{enumerate_patterns, InvariantTensor, Pattern};
use crate::Rational;

/// Reduced row echelon form of `rows`; returns the pivot columns.
fn row_reduce(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

pub fn determinant(rows: &[Vec<Rational>]) -> Result<Rational> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("determinant of a non-square matrix"));
    }
    let mut m = rows.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let pivot_row = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * y;
                }
            }
        }
    }
    Ok(det)
}

/// Coefficients `c` with `sum_i c_i rows[i] = target`, if any exist.
pub fn solve_in_row_space(rows: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let mut s = TrackedSpace::new(target.len());
    for r in rows {
        s.insert(r.clone());
    }
    s.solve(target)
}

/// Row-reduced span of vectors that remembers how each basis row was built
/// from the inserted generators.
#[derive(Debug, Clone)]
struct TrackedSpace {
    len: usize,
    generators: usize,
    rows: Vec<Vec<Rational>>,
    combos: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl TrackedSpace {
    fn new(len: usize) -> Self {
        TrackedSpace {
            len,
            generators: 0,
            rows: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
        }
    }

    // Reduces `v` against the basis; returns the residual and the combination
    // of basis rows that was subtracted.
    fn reduce(&self, mut v: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
        let mut used = vec![Rational::zero(); self.rows.len()];
        for (r, &p) in self.pivots.iter().enumerate() {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, y) in v.iter_mut().zip(&self.rows[r]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            used[r] = f;
        }
        (v, used)
    }

    fn combination(&self, used: &[Rational]) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.generators];
        for (r, f) in used.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (x, y) in c.iter_mut().zip(&self.combos[r]) {
                *x += f * y;
            }
        }
        c
    }

    fn insert(&mut self, v: Vec<Rational>) -> bool {
        assert_eq!(v.len(), self.len);
        let g = self.generators;
        self.generators += 1;
        for c in self.combos.iter_mut() {
            c.push(Rational::zero());
        }
        let (mut v, used) = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let mut combo: Vec<Rational> = self.combination(&used).into_iter().map(|x| -x).collect();
        combo[g] = Rational::one();
        let inv = Rational::one() / &v[p];
        for x in v.iter_mut().chain(combo.iter_mut()) {
            *x *= &inv;
        }
        for (row, c) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&v) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (x, y) in c.iter_mut().zip(&combo) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push(v);
        self.combos.push(combo);
        self.pivots.push(p);
        true
    }

    fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v.to_vec()).0.iter().all(Zero::is_zero)
    }

    fn solve(&self, target: &[Rational]) -> Option<Vec<Rational>> {
        let (residual, used) = self.reduce(target.to_vec());
        residual.iter().all(Zero::is_zero).then(|| self.combination(&used))
    }
}

/// An exact subspace of invariant tensors of fixed arity, with coordinates
/// taken over the patterns valid for `n` in enumeration order.
#[derive(Debug, Clone)]
pub struct Subspace {
    arity: usize,
    n: usize,
    patterns: Arc<Vec<Pattern>>,
    index: Arc<HashMap<Pattern, usize>>,
    space: TrackedSpace,
}

impl Subspace {
    pub fn new(arity: usize, n: usize) -> Result<Self> {
        let patterns = enumerate_patterns(arity, n)?;
        let index = patterns.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Subspace {
            arity,
            n,
            space: TrackedSpace::new(patterns.len()),
            patterns: Arc::new(patterns),
            index: Arc::new(index),
        })
    }

    pub fn spanned_by<'a>(arity: usize, n: usize, tensors: impl IntoIterator<Item = &'a InvariantTensor>) -> Result<Self> {
        let mut s = Self::new(arity, n)?;
        for t in tensors {
            s.insert(t)?;
        }
        Ok(s)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.space.rows.len()
    }

    /// Dimension of the ambient invariant space.
    pub fn ambient_dim(&self) -> usize {
        self.patterns.len()
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn coordinates(&self, f: &InvariantTensor) -> Result<Vec<Rational>> {
        if f.arity() != self.arity || f.n() != self.n {
            return Err(Error::invalid(format!(
                "tensor of arity {} for n = {} does not fit a subspace of arity {} for n = {}",
                f.arity(),
                f.n(),
                self.arity,
                self.n
            )));
        }
        let mut v = vec![Rational::zero(); self.patterns.len()];
        for (p, x) in f.entries() {
            v[self.index[p]] = x.clone();
        }
        Ok(v)
    }

    pub fn from_coordinates(&self, v: &[Rational]) -> InvariantTensor {
        InvariantTensor::from_entries(
            self.arity,
            self.n,
            self.patterns.iter().cloned().zip(v.iter().cloned()),
        )
        .expect("coordinates index valid patterns")
    }

    /// Adds `f` to the spanning set; returns whether the dimension grew.
    pub fn insert(&mut self, f: &InvariantTensor) -> Result<bool> {
        let v = self.coordinates(f)?;
        Ok(self.space.insert(v))
    }

    pub fn contains(&self, f: &InvariantTensor) -> Result<bool> {
        Ok(self.space.contains(&self.coordinates(f)?))
    }

    /// Coefficients expressing `f` in the inserted tensors, in insertion
    /// order, or `None` if `f` is outside the span.
    pub fn solve(&self, f: &InvariantTensor) -> Result<Option<Vec<Rational>>> {
        Ok(self.space.solve(&self.coordinates(f)?))
    }

    /// The row-reduced basis.
    pub fn basis(&self) -> Vec<InvariantTensor> {
        self.space.rows.iter().map(|r| self.from_coordinates(r)).collect()
    }
}
