//! Orbits of the diagonal `S_n` action on tuples of 2-subsets.
//!
//! A [`Pattern`] is the canonical representative of such an orbit: the
//! lexicographically least relabeling of the tuple in which labels appear in
//! first-use order. Invariant tensors are stored as maps from patterns to
//! values; see [`InvariantTensor`].

mod invariant;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::KneserGraph;

pub use invariant::InvariantTensor;

/// Upper bound on the number of patterns [`enumerate_patterns`] will produce.
pub const DEFAULT_PATTERN_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pairs: Vec<[u8; 2]>,
}

impl Pattern {
    /// Builds a pattern from pairs that are already in canonical form.
    pub fn from_canonical(pairs: Vec<[u8; 2]>) -> Result<Self> {
        let p = canonicalize(&pairs)?;
        if p.pairs != pairs {
            return Err(Error::invalid(format!("{} is not canonical", Pattern { pairs })));
        }
        Ok(p)
    }

    pub fn empty() -> Self {
        Pattern { pairs: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[[u8; 2]] {
        &self.pairs
    }

    /// Number of distinct points used.
    pub fn support(&self) -> usize {
        self.pairs.iter().map(|p| p[1] as usize).max().unwrap_or(0)
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        self.support() <= n
    }

    /// Vertex indices of the representative tuple in KG(n,2), reading the
    /// labels `1..s` as points.
    pub fn representative(&self, g: &KneserGraph) -> Result<Vec<usize>> {
        if !self.is_valid_for(g.n()) {
            return Err(Error::invalid(format!("pattern {self} needs {} points, n = {}", self.support(), g.n())));
        }
        Ok(self.pairs.iter().map(|p| g.index_of_points(p[0], p[1])).collect())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{{{},{}}}", p[0], p[1])?;
        }
        f.write_str(")")
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Parses `({a,b},{c,d},...)` and canonicalizes the result.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse pattern {s:?}"));
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let mut pairs = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(bad)?;
            let close = body.find('}').ok_or_else(bad)?;
            let (a, b) = body[..close].split_once(',').ok_or_else(bad)?;
            let a: u8 = a.trim().parse().map_err(|_| bad())?;
            let b: u8 = b.trim().parse().map_err(|_| bad())?;
            pairs.push([a, b]);
            rest = body[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            }
        }
        canonicalize(&pairs)
    }
}

struct Canonicalizer<'a> {
    input: &'a [[u8; 2]],
    labels: [u8; 256],
    acc: Vec<[u8; 2]>,
    best: Option<Vec<[u8; 2]>>,
}

impl Canonicalizer<'_> {
    fn pruned(&self) -> bool {
        match &self.best {
            Some(best) => self.acc[..] > best[..self.acc.len()],
            None => false,
        }
    }

    fn descend(&mut self, i: usize, next: u8) {
        if self.pruned() {
            return;
        }
        if i == self.input.len() {
            self.best = Some(self.acc.clone());
            return;
        }
        let [a, b] = self.input[i];
        let (la, lb) = (self.labels[a as usize], self.labels[b as usize]);
        match (la, lb) {
            (0, 0) => {
                for (x, y) in [(a, b), (b, a)] {
                    self.labels[x as usize] = next;
                    self.labels[y as usize] = next + 1;
                    self.acc.push([next, next + 1]);
                    self.descend(i + 1, next + 2);
                    self.acc.pop();
                }
                self.labels[a as usize] = 0;
                self.labels[b as usize] = 0;
            }
            (0, l) | (l, 0) => {
                let fresh = if la == 0 { a } else { b };
                self.labels[fresh as usize] = next;
                self.acc.push([l, next]);
                self.descend(i + 1, next + 1);
                self.acc.pop();
                self.labels[fresh as usize] = 0;
            }
            (x, y) => {
                self.acc.push([x.min(y), x.max(y)]);
                self.descend(i + 1, next);
                self.acc.pop();
            }
        }
    }
}

/// Canonical representative of the orbit of a tuple of unordered pairs. The
/// points may be arbitrary nonzero labels.
pub fn canonicalize(tuple: &[[u8; 2]]) -> Result<Pattern> {
    for p in tuple {
        if p[0] == p[1] {
            return Err(Error::invalid(format!("pair {{{},{}}} repeats a point", p[0], p[1])));
        }
        if p[0] == 0 || p[1] == 0 {
            return Err(Error::invalid("points are numbered from 1"));
        }
    }
    Ok(canonicalize_unchecked(tuple))
}

pub(crate) fn canonicalize_unchecked(tuple: &[[u8; 2]]) -> Pattern {
    let mut c = Canonicalizer {
        input: tuple,
        labels: [0; 256],
        acc: Vec::with_capacity(tuple.len()),
        best: None,
    };
    c.descend(0, 1);
    Pattern {
        pairs: c.best.expect("every tuple has a relabeling"),
    }
}

/// Canonical pattern of a tuple of vertex indices of `g`.
pub fn canonicalize_vertices(g: &KneserGraph, tuple: &[usize]) -> Pattern {
    let pairs: Vec<[u8; 2]> = tuple
        .iter()
        .map(|&i| {
            let (a, b) = g.vertex(i).points();
            [a, b]
        })
        .collect();
    canonicalize_unchecked(&pairs)
}

/// All canonical patterns of arity `k` with support at most `n`, in
/// lexicographic order. The count is the dimension of the invariant
/// subspace of `P_k`.
pub fn enumerate_patterns(k: usize, n: usize) -> Result<Vec<Pattern>> {
    enumerate_patterns_capped(k, n, DEFAULT_PATTERN_CAP)
}

pub fn enumerate_patterns_capped(k: usize, n: usize, cap: usize) -> Result<Vec<Pattern>> {
    if n < 2 {
        return Err(Error::invalid("patterns need at least two points"));
    }
    if 2 * k > u8::MAX as usize - 2 {
        return Err(Error::invalid("arity too large for the label type"));
    }
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(k);
    grow(&mut acc, 0, k, n, cap, &mut out)?;
    Ok(out)
}

// Restricted-growth generation: new labels appear in order. Prefixes of a
// canonical pattern are canonical, so non-canonical prefixes are pruned.
fn grow(acc: &mut Vec<[u8; 2]>, max_label: u8, k: usize, n: usize, cap: usize, out: &mut Vec<Pattern>) -> Result<()> {
    if acc.len() == k {
        if out.len() >= cap {
            return Err(Error::capacity(format!("patterns of arity {k} for n = {n}"), cap as u128 + 1, cap as u128));
        }
        out.push(Pattern { pairs: acc.clone() });
        return Ok(());
    }
    let limit = (max_label as usize + 2).min(n) as u8;
    for a in 1..=limit {
        for b in a + 1..=limit {
            let fresh: Vec<u8> = [a, b].into_iter().filter(|&x| x > max_label).collect();
            let in_order = fresh.iter().enumerate().all(|(j, &x)| x == max_label + 1 + j as u8);
            if !in_order {
                continue;
            }
            acc.push([a, b]);
            if canonicalize_unchecked(acc).pairs == *acc {
                grow(acc, max_label.max(b), k, n, cap, out)?;
            }
            acc.pop();
        }
    }
    Ok(())
}

/// Size of the orbit of `p` under `S_n`: `n (n-1) .. (n-s+1) / |aut(p)|`.
pub fn orbit_size(p: &Pattern, n: usize) -> Result<u128> {
    let s = p.support();
    if s > n {
        return Err(Error::invalid(format!("pattern {p} is not valid for n = {n}")));
    }
    let falling: u128 = (0..s).map(|j| (n - j) as u128).product();
    Ok(falling / automorphism_count(p))
}

/// Number of permutations of the labels `1..s` fixing every slot of `p`.
pub fn automorphism_count(p: &Pattern) -> u128 {
    let s = p.support();
    // candidates[x] = labels y that lie in every slot containing x
    let mut candidates: Vec<Vec<u8>> = vec![Vec::new(); s + 1];
    for x in 1..=s as u8 {
        candidates[x as usize] = (1..=s as u8)
            .filter(|&y| p.pairs.iter().all(|q| !q.contains(&x) || q.contains(&y)))
            .collect();
    }
    let mut image = vec![0u8; s + 1];
    let mut used = vec![false; s + 1];
    count_automorphisms(p, 1, s, &candidates, &mut image, &mut used)
}

fn count_automorphisms(
    p: &Pattern,
    x: usize,
    s: usize,
    candidates: &[Vec<u8>],
    image: &mut [u8],
    used: &mut [bool],
) -> u128 {
    if x > s {
        return 1;
    }
    let mut total = 0;
    for &y in &candidates[x] {
        if used[y as usize] {
            continue;
        }
        image[x] = y;
        used[y as usize] = true;
        let consistent = p.pairs.iter().all(|q| {
            let (a, b) = (q[0] as usize, q[1] as usize);
            if a > x || b > x {
                return true;
            }
            let (ia, ib) = (image[a], image[b]);
            [ia.min(ib), ia.max(ib)] == *q
        });
        if consistent {
            total += count_automorphisms(p, x + 1, s, candidates, image, used);
        }
        used[y as usize] = false;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonicalize(&[[3, 7], [3, 9]]).unwrap(), pat("({1,2},{1,3})"));
        assert_eq!(canonicalize(&[[1, 2]]).unwrap(), pat("({1,2})"));
        assert_eq!(canonicalize(&[[5, 6], [1, 2]]).unwrap().pairs(), &[[1, 2], [3, 4]]);
        assert!(canonicalize(&[[4, 4]]).is_err());
    }

    #[test]
    fn branching_picks_the_least_ordering() {
        // {2,5} then {5,7}: the shared point must get label 2 -> ({1,2},{2,3})
        // is beaten by labeling it 1: ({1,2},{1,3})
        assert_eq!(canonicalize(&[[2, 5], [5, 7]]).unwrap(), pat("({1,2},{1,3})"));
    }

    #[test]
    fn pattern_text_round_trip() {
        let p = pat("({1,2},{3,4},{1,5},{3,6})");
        assert_eq!(p.to_string(), "({1,2},{3,4},{1,5},{3,6})");
        assert_eq!(Pattern::from_str("()").unwrap(), Pattern::empty());
        assert!(Pattern::from_canonical(vec![[1, 3], [1, 2]]).is_err());
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_patterns(0, 5).unwrap().len(), 1);
        assert_eq!(enumerate_patterns(1, 5).unwrap().len(), 1);
        for n in 4..=10 {
            assert_eq!(enumerate_patterns(2, n).unwrap().len(), 3);
        }
        let counts: Vec<usize> = (0..=5).map(|k| enumerate_patterns(k, 5).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 107, 923]);
        let counts: Vec<usize> = (0..=5).map(|k| enumerate_patterns(k, 6).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 16, 132, 1439]);
    }

    #[test]
    fn enumeration_is_sorted() {
        let ps = enumerate_patterns(4, 7).unwrap();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(orbit_size(&pat("({1,2})"), 5).unwrap(), 10);
        assert_eq!(orbit_size(&pat("({1,2},{3,4},{1,2},{3,4})"), 8).unwrap(), 420);
        assert_eq!(orbit_size(&pat("({1,2},{3,4})"), 5).unwrap(), 30);
        assert!(orbit_size(&pat("({1,2},{3,4},{5,6})"), 5).is_err());
    }

    #[test]
    fn enumeration_cap() {
        assert!(enumerate_patterns_capped(4, 8, 10).unwrap_err().is_capacity());
    }
}
