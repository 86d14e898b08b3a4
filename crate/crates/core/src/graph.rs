//! Kneser graphs KG(n,2): vertices are the 2-subsets of {1..n}, edges join
//! disjoint pairs.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`KneserGraph::build`].
pub const DEFAULT_MAX_N: usize = 16;

/// An unordered pair `{a, b}` of points of `{1..n}`, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Vertex {
    a: u8,
    b: u8,
}

impl Vertex {
    pub fn new(x: u8, y: u8) -> Result<Self> {
        if x == y {
            return Err(Error::invalid(format!("pair {{{x},{y}}} repeats a point")));
        }
        if x == 0 || y == 0 {
            return Err(Error::invalid("points are numbered from 1"));
        }
        Ok(Vertex {
            a: x.min(y),
            b: x.max(y),
        })
    }

    pub fn points(self) -> (u8, u8) {
        (self.a, self.b)
    }

    pub fn is_disjoint(self, other: Vertex) -> bool {
        self.a != other.a && self.a != other.b && self.b != other.a && self.b != other.b
    }

    pub fn meets(self, other: Vertex) -> bool {
        !self.is_disjoint(other)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

#[derive(Debug, Clone)]
pub struct KneserGraph {
    n: usize,
    vertices: Vec<Vertex>,
    // index_of[a][b] for a < b, both 1-based
    index_of: Vec<Vec<u32>>,
    adjacency: Vec<bool>,
}

impl KneserGraph {
    pub fn build(n: usize) -> Result<Self> {
        Self::build_with_limit(n, DEFAULT_MAX_N)
    }

    pub fn build_with_limit(n: usize, max_n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid(format!("KG(n,2) needs n >= 4, got {n}")));
        }
        if n > max_n {
            return Err(Error::capacity("Kneser graph size n", n as u128, max_n as u128));
        }
        if n > u8::MAX as usize {
            return Err(Error::invalid("n does not fit the point type"));
        }
        let mut vertices = Vec::with_capacity(n * (n - 1) / 2);
        let mut index_of = vec![vec![u32::MAX; n + 1]; n + 1];
        for a in 1..=n as u8 {
            for b in a + 1..=n as u8 {
                index_of[a as usize][b as usize] = vertices.len() as u32;
                index_of[b as usize][a as usize] = vertices.len() as u32;
                vertices.push(Vertex { a, b });
            }
        }
        let d = vertices.len();
        let mut adjacency = vec![false; d * d];
        for (i, u) in vertices.iter().enumerate() {
            for (j, v) in vertices.iter().enumerate() {
                adjacency[i * d + j] = u.is_disjoint(*v);
            }
        }
        Ok(KneserGraph {
            n,
            vertices,
            index_of,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices, `C(n,2)`; also the size of the spin set.
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn index(&self, v: Vertex) -> Result<usize> {
        let (a, b) = v.points();
        if b as usize > self.n {
            return Err(Error::invalid(format!("vertex {v} is not a vertex of KG({},2)", self.n)));
        }
        Ok(self.index_of[a as usize][b as usize] as usize)
    }

    /// Index of the pair `{x, y}`; both points must lie in `1..=n` and differ.
    pub fn index_of_points(&self, x: u8, y: u8) -> usize {
        self.index_of[x as usize][y as usize] as usize
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> Result<bool> {
        let i = self.index(u)?;
        let j = self.index(v)?;
        Ok(self.adjacent_idx(i, j))
    }

    #[inline]
    pub fn adjacent_idx(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.vertices.len() + j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let d = self.vertices.len();
        (0..d).filter(move |&j| self.adjacency[i * d + j])
    }

    /// Verifies strong regularity by checking every vertex pair and returns
    /// the parameters `(v, k, lambda, mu)`.
    pub fn srg_params(&self) -> Result<SrgParams> {
        let d = self.vertices.len();
        let degree = |i: usize| (0..d).filter(|&j| self.adjacent_idx(i, j)).count();
        let k = degree(0);
        if let Some(bad) = (1..d).find(|&i| degree(i) != k) {
            return Err(Error::NotStronglyRegular(0, bad));
        }
        let common = |i: usize, j: usize| {
            (0..d)
                .filter(|&w| self.adjacent_idx(i, w) && self.adjacent_idx(j, w))
                .count()
        };
        let mut lambda = None;
        let mut mu = None;
        for i in 0..d {
            for j in i + 1..d {
                let c = common(i, j);
                let slot = if self.adjacent_idx(i, j) {
                    &mut lambda
                } else {
                    &mut mu
                };
                match *slot {
                    None => *slot = Some(c),
                    Some(expected) if expected != c => return Err(Error::NotStronglyRegular(i, j)),
                    Some(_) => {}
                }
            }
        }
        Ok(SrgParams {
            v: d,
            k,
            lambda: lambda.unwrap_or(0),
            mu: mu.unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: u8, b: u8) -> Vertex {
        Vertex::new(a, b).unwrap()
    }

    #[test]
    fn petersen() {
        let g = KneserGraph::build(5).unwrap();
        assert_eq!(g.order(), 10);
        assert!(g.adjacent(v(1, 2), v(3, 4)).unwrap());
        assert!(!g.adjacent(v(1, 2), v(1, 3)).unwrap());
        assert!(g.adjacent(v(1, 2), v(4, 5)).unwrap());
        assert!(!g.adjacent(v(2, 3), v(3, 4)).unwrap());
        assert!(!g.adjacent(v(1, 2), v(1, 2)).unwrap());
        let p = g.srg_params().unwrap();
        assert_eq!((p.v, p.k, p.lambda, p.mu), (10, 3, 0, 1));
    }

    #[test]
    fn rejects_small_and_large_n() {
        assert!(matches!(KneserGraph::build(3), Err(Error::InvalidParameter(_))));
        assert!(KneserGraph::build(17).unwrap_err().is_capacity());
        assert!(KneserGraph::build_with_limit(17, 20).is_ok());
    }

    #[test]
    fn out_of_range_vertex() {
        let g = KneserGraph::build(5).unwrap();
        assert!(g.adjacent(v(1, 6), v(2, 3)).is_err());
        assert!(Vertex::new(2, 2).is_err());
    }

    #[test]
    fn vertex_order_is_lexicographic() {
        let g = KneserGraph::build(6).unwrap();
        let vs = g.vertices();
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(vs[0], v(1, 2));
        assert_eq!(vs[5], v(2, 3));
        for (i, &x) in vs.iter().enumerate() {
            assert_eq!(g.index(x).unwrap(), i);
        }
    }

    #[test]
    fn srg_parameters_follow_closed_form() {
        for n in 4..=12 {
            let p = KneserGraph::build(n).unwrap().srg_params().unwrap();
            assert_eq!(p.v, n * (n - 1) / 2);
            assert_eq!(p.k, (n - 2) * (n - 3) / 2);
            assert_eq!(p.lambda, (n - 4) * (n.saturating_sub(5)) / 2);
            assert_eq!(p.mu, (n - 3) * (n - 4) / 2);
        }
    }
}
