//! Coordinates for the closure engine: the moves as maps on `F_p` vectors,
//! either over orbit patterns (precomputed index tables) or over all tuples.

use std::collections::HashMap;

use rayon::prelude::*;

use super::modp::{self, mul};
use crate::boxes::{FourBoxName, TwoBoxName};
use crate::error::Result;
use crate::graph::KneserGraph;
use crate::orbit::{canonicalize_unchecked, enumerate_patterns, Pattern};

/// Generators the closure starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Seed {
    One,
    I,
    J,
    A,
}

impl Seed {
    pub const ALL: [Seed; 4] = [Seed::One, Seed::I, Seed::J, Seed::A];

    pub fn arity(self) -> usize {
        match self {
            Seed::One => 0,
            _ => 2,
        }
    }

    pub fn two_box(self) -> Option<TwoBoxName> {
        match self {
            Seed::One => None,
            Seed::I => Some(TwoBoxName::I),
            Seed::J => Some(TwoBoxName::J),
            Seed::A => Some(TwoBoxName::A),
        }
    }
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.two_box() {
            Some(b) => write!(f, "{b}"),
            None => f.write_str("1"),
        }
    }
}

fn four_box_holds(name: FourBoxName, t: &[[u8; 2]]) -> bool {
    let r = t[0] == t[2] && t[1] == t[3];
    match name {
        FourBoxName::R => r,
        FourBoxName::RA => r && TwoBoxName::A.holds(t[0], t[1]),
        FourBoxName::RT => r && TwoBoxName::T.holds(t[0], t[1]),
        FourBoxName::Ghz4 => t.iter().all(|x| *x == t[0]),
    }
}

/// Linear (and bilinear) moves on coordinate vectors of invariant boxes.
pub trait Coords: Sync {
    fn max_arity(&self) -> usize;
    fn len(&self, k: usize) -> usize;
    fn seed(&self, s: Seed) -> Vec<u64>;
    fn four_box(&self, f: FourBoxName) -> Vec<u64>;
    fn rotate(&self, k: usize, v: &[u64]) -> Vec<u64>;
    /// Identifies legs 1 and 2.
    fn merge(&self, k: usize, v: &[u64]) -> Vec<u64>;
    /// Sums over leg 1.
    fn sum_out(&self, k: usize, v: &[u64]) -> Vec<u64>;
    /// Inserts a cap as new legs 1 and 2.
    fn split(&self, k: usize, v: &[u64]) -> Vec<u64>;
    fn tensor(&self, a: usize, b: usize, f: &[u64], g: &[u64]) -> Vec<u64>;
    /// Swaps legs `pos` and `pos + 1`.
    fn permute(&self, k: usize, pos: usize, v: &[u64]) -> Vec<u64>;
}

pub fn hadamard(f: &[u64], g: &[u64]) -> Vec<u64> {
    f.iter().zip(g).map(|(&x, &y)| mul(x, y)).collect()
}

/// Orbit-pattern coordinates with precomputed move tables.
pub struct OrbitCoords {
    max_arity: usize,
    patterns: Vec<Vec<Pattern>>,
    rot: Vec<Vec<u32>>,
    merge: Vec<Vec<u32>>,
    // CSR over the targets: (source, multiplicity)
    sum_offsets: Vec<Vec<u32>>,
    sum_sources: Vec<Vec<(u32, u32)>>,
    split: Vec<Vec<u32>>,
    tensor: HashMap<(usize, usize), Vec<(u32, u32)>>,
    index: Vec<HashMap<Pattern, u32>>,
}

const NONE: u32 = u32::MAX;

impl OrbitCoords {
    pub fn new(n: usize, max_arity: usize) -> Result<Self> {
        let g = KneserGraph::build_with_limit(n, u8::MAX as usize)?;
        let patterns: Vec<Vec<Pattern>> = (0..=max_arity).map(|k| enumerate_patterns(k, n)).collect::<Result<_>>()?;
        let index: Vec<HashMap<Pattern, u32>> = patterns
            .iter()
            .map(|ps| ps.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect())
            .collect();
        let ix = |k: usize, t: &[[u8; 2]]| index[k][&canonicalize_unchecked(t)];
        let rot = (0..=max_arity)
            .map(|k| {
                patterns[k]
                    .par_iter()
                    .map(|p| {
                        let t = p.pairs();
                        if k < 2 {
                            return ix(k, t);
                        }
                        let mut s = vec![t[k - 1]];
                        s.extend_from_slice(&t[..k - 1]);
                        ix(k, &s)
                    })
                    .collect()
            })
            .collect();
        let merge = (0..=max_arity)
            .map(|k| {
                if k < 2 {
                    return Vec::new();
                }
                patterns[k - 1]
                    .par_iter()
                    .map(|q| {
                        let t = q.pairs();
                        let mut s = vec![t[0]];
                        s.extend_from_slice(t);
                        ix(k, &s)
                    })
                    .collect()
            })
            .collect();
        let vertices: Vec<[u8; 2]> = g.vertices().iter().map(|v| [v.points().0, v.points().1]).collect();
        let mut sum_offsets = Vec::new();
        let mut sum_sources = Vec::new();
        for k in 0..=max_arity {
            if k == 0 {
                sum_offsets.push(Vec::new());
                sum_sources.push(Vec::new());
                continue;
            }
            let rows: Vec<Vec<(u32, u32)>> = patterns[k - 1]
                .par_iter()
                .map(|q| {
                    let mut counts: HashMap<u32, u32> = HashMap::new();
                    let mut s = Vec::with_capacity(k);
                    for y in &vertices {
                        s.clear();
                        s.push(*y);
                        s.extend_from_slice(q.pairs());
                        *counts.entry(ix(k, &s)).or_insert(0) += 1;
                    }
                    let mut row: Vec<(u32, u32)> = counts.into_iter().collect();
                    row.sort_unstable();
                    row
                })
                .collect();
            let mut offsets = vec![0u32];
            let mut sources = Vec::new();
            for r in rows {
                sources.extend(r);
                offsets.push(sources.len() as u32);
            }
            sum_offsets.push(offsets);
            sum_sources.push(sources);
        }
        let split = (0..=max_arity)
            .map(|k| {
                if k + 2 > max_arity {
                    return Vec::new();
                }
                patterns[k + 2]
                    .par_iter()
                    .map(|p| {
                        let t = p.pairs();
                        if t[0] == t[1] {
                            ix(k, &t[2..])
                        } else {
                            NONE
                        }
                    })
                    .collect()
            })
            .collect();
        let mut tensor = HashMap::new();
        for a in 1..max_arity {
            for b in 1..=max_arity - a {
                let table = patterns[a + b]
                    .par_iter()
                    .map(|p| {
                        let t = p.pairs();
                        (ix(a, &t[..a]), ix(b, &t[a..]))
                    })
                    .collect();
                tensor.insert((a, b), table);
            }
        }
        Ok(OrbitCoords {
            max_arity,
            patterns,
            rot,
            merge,
            sum_offsets,
            sum_sources,
            split,
            tensor,
            index,
        })
    }

    pub fn patterns(&self, k: usize) -> &[Pattern] {
        &self.patterns[k]
    }

    pub fn index_of(&self, p: &Pattern) -> Option<usize> {
        self.index.get(p.arity())?.get(p).map(|&i| i as usize)
    }
}

impl Coords for OrbitCoords {
    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn len(&self, k: usize) -> usize {
        self.patterns[k].len()
    }

    fn seed(&self, s: Seed) -> Vec<u64> {
        match s.two_box() {
            None => vec![1],
            Some(b) => self.patterns[2]
                .iter()
                .map(|p| b.holds(p.pairs()[0], p.pairs()[1]) as u64)
                .collect(),
        }
    }

    fn four_box(&self, f: FourBoxName) -> Vec<u64> {
        self.patterns[4].iter().map(|p| four_box_holds(f, p.pairs()) as u64).collect()
    }

    fn rotate(&self, k: usize, v: &[u64]) -> Vec<u64> {
        self.rot[k].iter().map(|&j| v[j as usize]).collect()
    }

    fn merge(&self, k: usize, v: &[u64]) -> Vec<u64> {
        self.merge[k].iter().map(|&j| v[j as usize]).collect()
    }

    fn sum_out(&self, k: usize, v: &[u64]) -> Vec<u64> {
        let off = &self.sum_offsets[k];
        let src = &self.sum_sources[k];
        (0..off.len() - 1)
            .map(|q| {
                src[off[q] as usize..off[q + 1] as usize]
                    .iter()
                    .fold(0, |acc, &(j, c)| modp::add(acc, mul(v[j as usize], c as u64)))
            })
            .collect()
    }

    fn split(&self, k: usize, v: &[u64]) -> Vec<u64> {
        self.split[k].iter().map(|&j| if j == NONE { 0 } else { v[j as usize] }).collect()
    }

    fn tensor(&self, a: usize, b: usize, f: &[u64], g: &[u64]) -> Vec<u64> {
        self.tensor[&(a, b)].iter().map(|&(i, j)| mul(f[i as usize], g[j as usize])).collect()
    }

    fn permute(&self, k: usize, pos: usize, v: &[u64]) -> Vec<u64> {
        self.patterns[k]
            .iter()
            .map(|p| {
                let mut t = p.pairs().to_vec();
                t.swap(pos - 1, pos);
                v[self.index[k][&canonicalize_unchecked(&t)] as usize]
            })
            .collect()
    }
}

/// Coordinates over all tuples of vertices, row-major with leg 1 most
/// significant.
pub struct DenseCoords {
    max_arity: usize,
    g: KneserGraph,
    vertices: Vec<[u8; 2]>,
}

impl DenseCoords {
    pub fn new(n: usize, max_arity: usize, cap: u128) -> Result<Self> {
        let g = KneserGraph::build_with_limit(n, u8::MAX as usize)?;
        let d = g.order() as u128;
        let needed = d.checked_pow(max_arity as u32).unwrap_or(u128::MAX);
        if needed > cap {
            return Err(crate::Error::capacity("dense closure vector length", needed, cap));
        }
        let vertices = g.vertices().iter().map(|v| [v.points().0, v.points().1]).collect();
        Ok(DenseCoords { max_arity, g, vertices })
    }

    fn d(&self) -> usize {
        self.g.order()
    }

    fn pow(&self, k: usize) -> usize {
        self.d().pow(k as u32)
    }

    fn decode(&self, mut i: usize, k: usize) -> Vec<usize> {
        let d = self.d();
        let mut out = vec![0; k];
        for x in out.iter_mut().rev() {
            *x = i % d;
            i /= d;
        }
        out
    }
}

impl Coords for DenseCoords {
    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn len(&self, k: usize) -> usize {
        self.pow(k)
    }

    fn seed(&self, s: Seed) -> Vec<u64> {
        match s.two_box() {
            None => vec![1],
            Some(b) => (0..self.pow(2))
                .map(|i| b.holds_idx(&self.g, i / self.d(), i % self.d()) as u64)
                .collect(),
        }
    }

    fn four_box(&self, f: FourBoxName) -> Vec<u64> {
        (0..self.pow(4))
            .map(|i| {
                let t: Vec<[u8; 2]> = self.decode(i, 4).into_iter().map(|x| self.vertices[x]).collect();
                four_box_holds(f, &t) as u64
            })
            .collect()
    }

    fn rotate(&self, k: usize, v: &[u64]) -> Vec<u64> {
        if k < 2 {
            return v.to_vec();
        }
        let d = self.d();
        let head = self.pow(k - 1);
        let mut out = vec![0; v.len()];
        for h in 0..head {
            for l in 0..d {
                out[h * d + l] = v[l * head + h];
            }
        }
        out
    }

    fn merge(&self, k: usize, v: &[u64]) -> Vec<u64> {
        let d = self.d();
        let rest = self.pow(k - 2);
        let mut out = vec![0; d * rest];
        for x in 0..d {
            let src = x * d * rest + x * rest;
            out[x * rest..(x + 1) * rest].copy_from_slice(&v[src..src + rest]);
        }
        out
    }

    fn sum_out(&self, k: usize, v: &[u64]) -> Vec<u64> {
        let rest = self.pow(k - 1);
        let mut out = vec![0; rest];
        for chunk in v.chunks(rest) {
            for (o, &x) in out.iter_mut().zip(chunk) {
                *o = modp::add(*o, x);
            }
        }
        out
    }

    fn split(&self, k: usize, v: &[u64]) -> Vec<u64> {
        let d = self.d();
        let rest = self.pow(k);
        let mut out = vec![0; d * d * rest];
        for x in 0..d {
            let dst = x * d * rest + x * rest;
            out[dst..dst + rest].copy_from_slice(v);
        }
        out
    }

    fn tensor(&self, _a: usize, _b: usize, f: &[u64], g: &[u64]) -> Vec<u64> {
        let mut out = Vec::with_capacity(f.len() * g.len());
        for &x in f {
            out.extend(g.iter().map(|&y| mul(x, y)));
        }
        out
    }

    fn permute(&self, k: usize, pos: usize, v: &[u64]) -> Vec<u64> {
        let d = self.d();
        let hi = self.pow(k - pos - 1);
        (0..v.len())
            .map(|i| {
                let a = (i / (hi * d)) % d;
                let b = (i / hi) % d;
                let j = i - a * hi * d - b * hi + b * hi * d + a * hi;
                v[j]
            })
            .collect()
    }
}
