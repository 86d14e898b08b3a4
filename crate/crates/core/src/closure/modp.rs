//! Row-reduced subspaces over the prime field `F_p`, `p = 2^61 - 1`, with
//! random annihilator probes that reject most dependent candidates before
//! any reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    add(lo, hi)
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

/// Residue of a signed integer.
pub fn from_i64(x: i64) -> u64 {
    if x >= 0 {
        x as u64 % P
    } else {
        sub(0, (x.unsigned_abs()) % P)
    }
}

pub fn dot(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| if x == 0 || y == 0 { acc } else { add(acc, mul(x, y)) })
}

const PROBES: usize = 2;

#[derive(Debug, Clone)]
pub struct ModSpace {
    len: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    probes: Vec<Vec<u64>>,
}

impl ModSpace {
    pub fn new(len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free = (0..PROBES).map(|_| (0..len).map(|_| rng.gen_range(1..P)).collect()).collect();
        ModSpace {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
            probes: free,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// False only if `v` is certainly outside the span; true means `v` is in
    /// the span with probability at least `1 - p^-2`.
    fn probably_contains(&self, v: &[u64]) -> bool {
        self.probes.iter().all(|z| dot(z, v) == 0)
    }

    fn reduce(&self, v: &mut [u64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = sub(*x, mul(c, y));
                }
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        if self.probably_contains(v) {
            return true;
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Inserts `v` if it is independent; returns whether it was.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.len);
        if self.probably_contains(v) {
            return false;
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(w[p]);
        for x in w.iter_mut() {
            *x = mul(*x, s);
        }
        // Each probe keeps its random values off the pivots and takes the
        // values on the pivots that make it annihilate every row. Only the
        // new pivot and the pivots of rows touched by the reduction move.
        let deltas: Vec<u64> = self
            .probes
            .iter_mut()
            .map(|z| {
                let old = z[p];
                z[p] = sub(old, dot(&w, z));
                sub(z[p], old)
            })
            .collect();
        for (row, &q) in self.rows.iter_mut().zip(&self.pivots) {
            let c = row[p];
            if c == 0 {
                continue;
            }
            for (z, &delta) in self.probes.iter_mut().zip(&deltas) {
                z[q] = sub(z[q], mul(c, delta));
            }
            for (x, &y) in row.iter_mut().zip(&w) {
                if y != 0 {
                    *x = sub(*x, mul(c, y));
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        assert_eq!(mul(P - 1, P - 1), 1);
        assert_eq!(mul(inv(12345), 12345), 1);
        assert_eq!(from_i64(-1), P - 1);
    }

    #[test]
    fn space_dimension() {
        let mut s = ModSpace::new(4, 7);
        assert!(s.insert(&[1, 2, 0, 0]));
        assert!(s.insert(&[0, 1, 1, 0]));
        assert!(!s.insert(&[1, 3, 1, 0]));
        assert!(s.contains(&[2, 5, 1, 0]));
        assert!(!s.contains(&[0, 0, 0, 1]));
        assert!(s.insert(&[0, 0, 0, 5]));
        assert_eq!(s.dim(), 3);
    }
}
