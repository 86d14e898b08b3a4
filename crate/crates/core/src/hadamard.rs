//! The Hadamard (entrywise) algebra of the spin model on `d` points, the
//! molecule of a permutation group `G <= S_d`, and its splitting into
//! minimal projections.
//!
//! Tuples in the molecule's support are permutations `(s(1), .., s(d))`;
//! `G` acts on their values, so the `G`-orbits are the right cosets `G s`.
//! `S_d` acts on positions, `(g.f)(x_1..x_d) = f(x_g(1), .., x_g(d))`, and
//! permutes those cosets.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::SpinTensor;
use crate::Rational;

/// Largest `d` accepted for groups and molecules.
pub const MAX_MOLECULE_D: usize = 6;
/// Largest `d` accepted for the decomposition.
pub const MAX_DECOMPOSE_D: usize = 5;

/// A permutation of `{1..d}` as its list of images, `p[i-1] = p(i)`.
pub type Perm = Vec<usize>;

fn identity(d: usize) -> Perm {
    (1..=d).collect()
}

/// `(p q)(i) = p(q(i))`.
fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i - 1]).collect()
}

fn factorial(d: usize) -> usize {
    (1..=d).product()
}

/// Parses cycle notation such as `(1 2 3 4)`, `(1,2)(3,4)` or `()`.
pub fn parse_cycles(d: usize, text: &str) -> Result<Perm> {
    let bad = |m: String| Error::Parse { line: 1, message: m };
    let mut p = identity(d);
    let mut seen = vec![false; d + 1];
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(bad("empty permutation".into()));
    }
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| bad(format!("expected '(' in {text:?}")))?;
        let close = body.find(')').ok_or_else(|| bad(format!("unclosed cycle in {text:?}")))?;
        let cycle: Vec<usize> = body[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| bad(format!("bad point {s:?}"))))
            .collect::<Result<_>>()?;
        for &x in &cycle {
            if x == 0 || x > d {
                return Err(bad(format!("point {x} outside 1..{d}")));
            }
            if seen[x] {
                return Err(bad(format!("point {x} repeated")));
            }
            seen[x] = true;
        }
        for (i, &x) in cycle.iter().enumerate() {
            p[x - 1] = cycle[(i + 1) % cycle.len()];
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(p)
}

fn cycle_string(p: &[usize]) -> String {
    let mut seen = vec![false; p.len() + 1];
    let mut s = String::new();
    for start in 1..=p.len() {
        if seen[start] || p[start - 1] == start {
            continue;
        }
        let mut c = vec![start];
        seen[start] = true;
        let mut x = p[start - 1];
        while x != start {
            seen[x] = true;
            c.push(x);
            x = p[x - 1];
        }
        let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
        s.push_str(&format!("({})", parts.join(" ")));
    }
    if s.is_empty() {
        s.push_str("()");
    }
    s
}

/// A subgroup of `S_d` given by generators, with all its elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupAction {
    pub d: usize,
    pub generators: Vec<Perm>,
    /// Sorted lexicographically by image list.
    pub elements: Vec<Perm>,
}

impl SubgroupAction {
    pub fn new(d: usize, generators: Vec<Perm>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d must be positive"));
        }
        if d > MAX_MOLECULE_D {
            return Err(Error::capacity("permutation group degree", d as u128, MAX_MOLECULE_D as u128));
        }
        for g in &generators {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            if sorted != identity(d) {
                return Err(Error::invalid(format!("{g:?} is not a permutation of 1..{d}")));
            }
        }
        let mut found: BTreeSet<Perm> = BTreeSet::new();
        let mut queue = VecDeque::from([identity(d)]);
        found.insert(identity(d));
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = compose(g, &x);
                if found.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(SubgroupAction {
            d,
            generators,
            elements: found.into_iter().collect(),
        })
    }

    pub fn from_cycles(d: usize, generators: &[&str]) -> Result<Self> {
        let gens = generators.iter().map(|g| parse_cycles(d, g)).collect::<Result<Vec<_>>>()?;
        Self::new(d, gens)
    }

    pub fn trivial(d: usize) -> Result<Self> {
        Self::new(d, vec![])
    }

    /// The full symmetric group, generated by a transposition and a `d`-cycle.
    pub fn symmetric(d: usize) -> Result<Self> {
        let mut gens = vec![];
        if d >= 2 {
            let mut t = identity(d);
            t.swap(0, 1);
            let cycle: Perm = (1..=d).map(|i| i % d + 1).collect();
            gens.push(t);
            gens.push(cycle);
        }
        Self::new(d, gens)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &[usize]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(p)).is_ok()
    }
}

impl fmt::Display for SubgroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| cycle_string(g)).collect();
        write!(f, "<{}> <= S_{}, order {}", gens.join(", "), self.d, self.order())
    }
}

fn indicator(d: usize, support: &BTreeSet<Perm>) -> Result<SpinTensor> {
    SpinTensor::from_fn(d, d, |x| {
        let t: Perm = x.iter().map(|&v| v + 1).collect();
        if support.contains(&t) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// The indicator of `{(g(1), .., g(d)) : g in G}` on `{1..d}^d`.
pub fn molecule(g: &SubgroupAction) -> Result<SpinTensor> {
    indicator(g.d, &g.elements.iter().cloned().collect())
}

/// `(p.f)(x_1..x_d) = f(x_p(1), .., x_p(d))`.
pub fn act_on_positions(p: &[usize], f: &SpinTensor) -> Result<SpinTensor> {
    if p.len() != f.arity() {
        return Err(Error::invalid(format!(
            "permutation of {} points on a tensor of arity {}",
            p.len(),
            f.arity()
        )));
    }
    let mut y = vec![0usize; p.len()];
    SpinTensor::from_fn(f.arity(), f.d(), |x| {
        for (slot, &q) in y.iter_mut().zip(p) {
            *slot = x[q - 1];
        }
        f.get(&y).clone()
    })
}

/// The molecule of `S_d` split into the indicators of the `G`-orbits.
#[derive(Debug, Clone)]
pub struct MoleculeDecomposition {
    pub d: usize,
    pub group: SubgroupAction,
    /// The `S_d` molecule `Y`.
    pub molecule: SpinTensor,
    /// Each orbit, sorted, in increasing order of its least tuple.
    pub orbits: Vec<Vec<Perm>>,
    pub projections: Vec<SpinTensor>,
}

impl MoleculeDecomposition {
    pub fn m(&self) -> usize {
        self.projections.len()
    }
}

pub fn decompose_projections(d: usize, g: &SubgroupAction) -> Result<MoleculeDecomposition> {
    if d > MAX_DECOMPOSE_D {
        return Err(Error::capacity("molecule decomposition degree", d as u128, MAX_DECOMPOSE_D as u128));
    }
    if g.d != d {
        return Err(Error::invalid(format!("group acts on {} points, expected {d}", g.d)));
    }
    let all = SubgroupAction::symmetric(d)?;
    let mut left: BTreeSet<Perm> = all.elements.iter().cloned().collect();
    let mut orbits = Vec::new();
    while let Some(s) = left.iter().next().cloned() {
        let orbit: BTreeSet<Perm> = g.elements.iter().map(|h| compose(h, &s)).collect();
        for t in &orbit {
            left.remove(t);
        }
        orbits.push(orbit);
    }
    let projections = orbits.iter().map(|o| indicator(d, o)).collect::<Result<Vec<_>>>()?;
    Ok(MoleculeDecomposition {
        d,
        group: g.clone(),
        molecule: molecule(&all)?,
        orbits: orbits.into_iter().map(|o| o.into_iter().collect()).collect(),
        projections,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitStabilizerReport {
    pub d: usize,
    pub group_order: usize,
    pub m: usize,
    pub stabilizer_sizes: Vec<usize>,
    pub orbit_sizes: Vec<usize>,
    pub checks: Vec<IdentityCheck>,
}

impl OrbitStabilizerReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, expected: impl ToString, actual: impl ToString) -> IdentityCheck {
    let (expected, actual) = (expected.to_string(), actual.to_string());
    IdentityCheck {
        name: name.to_string(),
        passed: expected == actual,
        expected,
        actual,
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Brute-force accounting for a decomposition: norms, stabilizers and
/// orbits of the projections under the position action of `S_d`, and the
/// algebra relations of the projections.
pub fn verify_orbit_stabilizer(dec: &MoleculeDecomposition) -> Result<OrbitStabilizerReport> {
    let d = dec.d;
    let sd = SubgroupAction::symmetric(d)?;
    let order = factorial(d);
    let m = dec.m();
    let ys = &dec.projections;

    // images[g][i] = index j with g.Y_i = Y_j, if any
    let mut images: Vec<Vec<Option<usize>>> = Vec::with_capacity(order);
    for p in &sd.elements {
        let mut row = Vec::with_capacity(m);
        for y in ys {
            let gy = act_on_positions(p, y)?;
            row.push(ys.iter().position(|z| *z == gy));
        }
        images.push(row);
    }
    let permutes = images.iter().all(|row| {
        let hit: BTreeSet<usize> = row.iter().flatten().copied().collect();
        row.iter().all(Option::is_some) && hit.len() == m
    });

    let stabilizer_sizes: Vec<usize> = (0..m).map(|i| images.iter().filter(|r| r[i] == Some(i)).count()).collect();
    let orbit_sizes: Vec<usize> = (0..m)
        .map(|i| images.iter().filter_map(|r| r[i]).collect::<BTreeSet<_>>().len())
        .collect();
    let norms = ys.iter().map(|y| y.inner_product(y)).collect::<Result<Vec<_>>>()?;

    let mut idempotent = true;
    let mut orthogonal = true;
    for (i, a) in ys.iter().enumerate() {
        for (j, b) in ys.iter().enumerate().skip(i) {
            let p = a.hadamard_product(b)?;
            if i == j {
                idempotent &= p == *a;
            } else {
                orthogonal &= p.is_zero();
            }
        }
    }
    let mut sum = SpinTensor::zeros(d, d)?;
    for y in ys {
        sum = sum.add(y)?;
    }
    let sup = ys.iter().map(sup_norm).max().unwrap_or_else(Rational::zero);

    let g = dec.group.order();
    let products: Vec<usize> = stabilizer_sizes.iter().zip(&orbit_sizes).map(|(a, b)| a * b).collect();
    let checks = vec![
        check("m = d!/|G|", order / g, m),
        check("<Y_i,Y_i> = |G_i|", join(&stabilizer_sizes), join(&norms)),
        check("|G_i| |O_i| = d!", join(&vec![order; m]), join(&products)),
        check("|O_i| = m", join(&vec![m; m]), join(&orbit_sizes)),
        check("sum Y_i = Y", true, sum == dec.molecule),
        check("<Y,Y> = d!", order, dec.molecule.inner_product(&dec.molecule)?),
        check("Y_i o Y_i = Y_i", true, idempotent),
        check("Y_i o Y_j = 0 (i != j)", true, orthogonal),
        check("g.Y_i is a projection Y_j for all g in S_d", true, permutes),
        check("max |Y_i| = 1", 1, sup),
    ];
    Ok(OrbitStabilizerReport {
        d,
        group_order: g,
        m,
        stabilizer_sizes,
        orbit_sizes,
        checks,
    })
}

/// Largest absolute entry, the norm in the entrywise algebra.
pub fn sup_norm(f: &SpinTensor) -> Rational {
    f.values()
        .iter()
        .map(|v| if v < &Rational::zero() { -v.clone() } else { v.clone() })
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_cycles(4, "(1 2 3 4)").unwrap(), vec![2, 3, 4, 1]);
        assert_eq!(parse_cycles(4, "(1,2)(3,4)").unwrap(), vec![2, 1, 4, 3]);
        assert_eq!(parse_cycles(3, "()").unwrap(), vec![1, 2, 3]);
        assert!(parse_cycles(3, "(1 4)").is_err());
        assert!(parse_cycles(3, "(1 2 1)").is_err());
        assert!(parse_cycles(3, "1 2").is_err());
        assert_eq!(cycle_string(&[2, 3, 4, 1]), "(1 2 3 4)");
    }

    #[test]
    fn group_orders() {
        assert_eq!(SubgroupAction::symmetric(4).unwrap().order(), 24);
        assert_eq!(SubgroupAction::from_cycles(4, &["(1 2 3 4)"]).unwrap().order(), 4);
        assert_eq!(SubgroupAction::from_cycles(4, &["(1 2)", "(3 4)"]).unwrap().order(), 4);
        assert!(SubgroupAction::trivial(7).unwrap_err().is_capacity());
    }

    #[test]
    fn molecule_supports() {
        let count = |g: &SubgroupAction| molecule(g).unwrap().nonzeros().count();
        assert_eq!(count(&SubgroupAction::symmetric(3).unwrap()), 6);
        let t = molecule(&SubgroupAction::trivial(3).unwrap()).unwrap();
        let support: Vec<Vec<usize>> = t.nonzeros().map(|(x, _)| x).collect();
        assert_eq!(support, vec![vec![0, 1, 2]]);
        assert_eq!(count(&SubgroupAction::from_cycles(4, &["(1 2 3 4)"]).unwrap()), 4);
    }

    #[test]
    fn small_decompositions() {
        let s3 = SubgroupAction::symmetric(3).unwrap();
        let dec = decompose_projections(3, &s3).unwrap();
        assert_eq!(dec.m(), 1);
        assert_eq!(dec.projections[0], dec.molecule);

        let t = SubgroupAction::trivial(4).unwrap();
        let dec = decompose_projections(4, &t).unwrap();
        assert_eq!(dec.m(), 24);
        let rep = verify_orbit_stabilizer(&dec).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.checks);
    }
}
