//! Sum-product evaluation of diagrams built from the 2-boxes `I, J, A, T`.
//!
//! A network is a list of 2-box factors sharing named indices; indices on the
//! external boundary stay free and every other index is summed over the
//! vertices of KG(n,2). Crossings and GHZ vertices never appear as factors:
//! a crossing renames an index and a GHZ vertex is a shared index.
//!
//! Evaluation is variable elimination over sparse tables with exact `i128`
//! arithmetic; overflow is reported, never wrapped.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::boxes::TwoBoxName;
use crate::error::{Error, Result};
use crate::graph::KneserGraph;
use crate::orbit::{enumerate_patterns, InvariantTensor};
use crate::tensor::SpinTensor;
use crate::Rational;

/// Largest sparse table the evaluator will build.
pub const DEFAULT_TABLE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub name: TwoBoxName,
    pub indices: [usize; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionNetwork {
    names: Vec<String>,
    factors: Vec<Factor>,
    externals: Vec<usize>,
}

/// Order in which internal indices are summed out.
pub type EliminationOrder = Vec<usize>;

impl ContractionNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Id of the named index, creating it on first use.
    pub fn index(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }

    pub fn factor(&mut self, name: TwoBoxName, a: &str, b: &str) -> &mut Self {
        let indices = [self.index(a), self.index(b)];
        self.factors.push(Factor { name, indices });
        self
    }

    pub fn set_externals(&mut self, names: &[&str]) -> Result<&mut Self> {
        let ids: Vec<usize> = names.iter().map(|n| self.index(n)).collect();
        let distinct: BTreeSet<usize> = ids.iter().copied().collect();
        if distinct.len() != ids.len() {
            return Err(Error::invalid("external indices must be distinct"));
        }
        self.externals = ids;
        Ok(self)
    }

    pub fn index_names(&self) -> &[String] {
        &self.names
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn externals(&self) -> &[usize] {
        &self.externals
    }

    pub fn is_external(&self, i: usize) -> bool {
        self.externals.contains(&i)
    }

    pub fn internals(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|i| !self.is_external(*i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.names.len() {
            if !self.factors.iter().any(|f| f.indices.contains(&i)) {
                return Err(Error::invalid(format!("index {} is in no factor", self.names[i])));
            }
        }
        Ok(())
    }

    /// Parses lines `factor NAME a b` and `external a b ...`; `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut net = ContractionNetwork::new();
        let mut externals: Option<Vec<String>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse {
                line: lineno + 1,
                message: m,
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "factor" => {
                    if words.len() != 4 {
                        return Err(err("factor lines read `factor NAME a b`".into()));
                    }
                    let name: TwoBoxName = words[1].parse().map_err(|_| err(format!("unknown 2-box {}", words[1])))?;
                    net.factor(name, words[2], words[3]);
                }
                "external" => {
                    if externals.is_some() {
                        return Err(err("more than one external line".into()));
                    }
                    externals = Some(words[1..].iter().map(|s| s.to_string()).collect());
                }
                other => return Err(err(format!("unknown directive {other}"))),
            }
        }
        if let Some(ext) = externals {
            let refs: Vec<&str> = ext.iter().map(String::as_str).collect();
            net.set_externals(&refs)?;
        }
        net.validate()?;
        Ok(net)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for f in &self.factors {
            s.push_str(&format!("factor {} {} {}\n", f.name, self.names[f.indices[0]], self.names[f.indices[1]]));
        }
        let ext: Vec<&str> = self.externals.iter().map(|&i| self.names[i].as_str()).collect();
        s.push_str(&format!("external {}\n", ext.join(" ")));
        s
    }

    /// Greedy minimum-degree order over the index interaction graph, ties
    /// broken by smaller fill-in and then by index id.
    pub fn choose_order(&self) -> EliminationOrder {
        let k = self.names.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        for f in &self.factors {
            let [a, b] = f.indices;
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut remaining: BTreeSet<usize> = self.internals().into_iter().collect();
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let fill = |v: usize| {
                let nb: Vec<usize> = adj[v].iter().copied().collect();
                let mut missing = 0;
                for (i, &x) in nb.iter().enumerate() {
                    for &y in &nb[i + 1..] {
                        if !adj[x].contains(&y) {
                            missing += 1;
                        }
                    }
                }
                missing
            };
            let v = *remaining
                .iter()
                .min_by_key(|&&v| (adj[v].len(), fill(v), v))
                .expect("nonempty");
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            for &x in &nb {
                adj[x].remove(&v);
                for &y in &nb {
                    if x != y {
                        adj[x].insert(y);
                    }
                }
            }
            adj[v].clear();
            remaining.remove(&v);
            order.push(v);
        }
        order
    }

    fn check_order(&self, order: &[usize]) -> Result<()> {
        self.validate()?;
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != self.internals() {
            return Err(Error::invalid("elimination order must list every internal index once"));
        }
        Ok(())
    }

    /// Value with the external indices pinned to `boundary` (vertex indices).
    pub fn evaluate_at(&self, g: &KneserGraph, boundary: &[usize]) -> Result<Rational> {
        self.evaluate_at_with_order(g, boundary, &self.choose_order())
    }

    pub fn evaluate_at_with_order(&self, g: &KneserGraph, boundary: &[usize], order: &[usize]) -> Result<Rational> {
        if boundary.len() != self.externals.len() {
            return Err(Error::invalid(format!(
                "boundary has {} vertices, network has {} external legs",
                boundary.len(),
                self.externals.len()
            )));
        }
        if boundary.iter().any(|&v| v >= g.order()) {
            return Err(Error::invalid("boundary vertex out of range"));
        }
        self.check_order(order)?;
        let mut pinned = vec![None; self.names.len()];
        for (&e, &v) in self.externals.iter().zip(boundary) {
            pinned[e] = Some(v as u16);
        }
        let (_, table) = Eliminator::new(self, g, &pinned, DEFAULT_TABLE_CAP).run(order)?;
        Ok(Rational::from_integer(table.get(&Vec::new()).copied().unwrap_or(0).into()))
    }

    /// All nonzero values, keyed by external tuples in boundary order.
    pub fn evaluate_sparse(&self, g: &KneserGraph) -> Result<HashMap<Vec<u16>, i128>> {
        self.evaluate_sparse_with_order(g, &self.choose_order())
    }

    pub fn evaluate_sparse_with_order(&self, g: &KneserGraph, order: &[usize]) -> Result<HashMap<Vec<u16>, i128>> {
        self.check_order(order)?;
        let pinned = vec![None; self.names.len()];
        let (vars, table) = Eliminator::new(self, g, &pinned, DEFAULT_TABLE_CAP).run(order)?;
        let pos: Vec<usize> = self
            .externals
            .iter()
            .map(|e| vars.iter().position(|v| v == e).expect("externals survive elimination"))
            .collect();
        Ok(table
            .into_iter()
            .map(|(k, v)| (pos.iter().map(|&p| k[p]).collect(), v))
            .collect())
    }

    pub fn evaluate_dense(&self, g: &KneserGraph) -> Result<SpinTensor> {
        let table = self.evaluate_sparse(g)?;
        let mut t = SpinTensor::zeros(self.externals.len(), g.order())?;
        for (k, v) in table {
            let idx: Vec<usize> = k.iter().map(|&x| x as usize).collect();
            t.set(&idx, Rational::from_integer(v.into()));
        }
        Ok(t)
    }

    /// The invariant tensor of the network, evaluated once per orbit at the
    /// pattern representatives. Networks built from `I, J, A, T` are always
    /// invariant.
    pub fn evaluate_invariant(&self, g: &KneserGraph) -> Result<InvariantTensor> {
        let k = self.externals.len();
        if k > 6 {
            return Err(Error::invalid("orbit evaluation supports at most 6 external legs"));
        }
        let patterns = enumerate_patterns(k, g.n())?;
        let order = self.choose_order();
        let values: Vec<Rational> = patterns
            .par_iter()
            .map(|p| self.evaluate_at_with_order(g, &p.representative(g)?, &order))
            .collect::<Result<_>>()?;
        InvariantTensor::from_entries(k, g.n(), patterns.into_iter().zip(values))
    }

    /// Invariant tensor obtained by enumerating the full sparse support;
    /// suited to networks with many external legs and small support.
    pub fn evaluate_invariant_sparse(&self, g: &KneserGraph) -> Result<InvariantTensor> {
        let table = self
            .evaluate_sparse(g)?
            .into_iter()
            .map(|(k, v)| (k, Rational::from_integer(v.into())))
            .collect();
        Ok(InvariantTensor::collapse(&table, self.externals.len(), g))
    }
}

impl fmt::Display for ContractionNetwork {
    /// A parenthesized sum-product term, e.g. `sum[u](A(u,v1) * A(u,v2))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("{}({},{})", x.name, self.names[x.indices[0]], self.names[x.indices[1]]))
            .collect();
        let body = if body.is_empty() { "1".to_string() } else { body.join(" * ") };
        let internals: Vec<&str> = self.internals().iter().map(|&i| self.names[i].as_str()).collect();
        if internals.is_empty() {
            write!(f, "({body})")
        } else {
            write!(f, "sum[{}]({body})", internals.join(","))
        }
    }
}

#[derive(Debug, Clone)]
struct Table {
    vars: Vec<usize>,
    entries: HashMap<Vec<u16>, i128>,
}

struct Eliminator<'a> {
    net: &'a ContractionNetwork,
    g: &'a KneserGraph,
    pinned: &'a [Option<u16>],
    cap: usize,
}

fn overflow() -> Error {
    Error::Overflow("network contraction".into())
}

impl<'a> Eliminator<'a> {
    fn new(net: &'a ContractionNetwork, g: &'a KneserGraph, pinned: &'a [Option<u16>], cap: usize) -> Self {
        Eliminator { net, g, pinned, cap }
    }

    fn value(&self, name: TwoBoxName, a: usize, b: usize) -> bool {
        match name {
            TwoBoxName::I => a == b,
            TwoBoxName::J => true,
            TwoBoxName::A => self.g.adjacent_idx(a, b),
            TwoBoxName::T => a != b && !self.g.adjacent_idx(a, b),
        }
    }

    fn run(&self, order: &[usize]) -> Result<(Vec<usize>, HashMap<Vec<u16>, i128>)> {
        let d = self.g.order();
        let k = self.net.names.len();
        let zero = || {
            let vars = self.net.externals.iter().copied().filter(|&e| self.pinned[e].is_none()).collect();
            Ok((vars, HashMap::new()))
        };
        // domains of free indices after unary constraints
        let mut domains: Vec<Vec<u16>> = (0..k)
            .map(|i| match self.pinned[i] {
                Some(v) => vec![v],
                None => (0..d as u16).collect(),
            })
            .collect();
        let mut tables: Vec<Table> = Vec::new();
        for f in &self.net.factors {
            let [a, b] = f.indices;
            match (self.pinned[a], self.pinned[b]) {
                (Some(x), Some(y)) => {
                    if !self.value(f.name, x as usize, y as usize) {
                        return zero();
                    }
                }
                (Some(x), None) => domains[b].retain(|&y| self.value(f.name, x as usize, y as usize)),
                (None, Some(y)) => domains[a].retain(|&x| self.value(f.name, x as usize, y as usize)),
                (None, None) if a == b => domains[a].retain(|&x| self.value(f.name, x as usize, x as usize)),
                (None, None) => {}
            }
        }
        if domains.iter().any(Vec::is_empty) {
            return zero();
        }
        for f in &self.net.factors {
            let [a, b] = f.indices;
            if a == b || self.pinned[a].is_some() || self.pinned[b].is_some() {
                continue;
            }
            let in_b: Vec<bool> = {
                let mut m = vec![false; d];
                for &y in &domains[b] {
                    m[y as usize] = true;
                }
                m
            };
            let mut entries = HashMap::new();
            for &x in &domains[a] {
                match f.name {
                    TwoBoxName::I => {
                        if in_b[x as usize] {
                            entries.insert(vec![x, x], 1);
                        }
                    }
                    TwoBoxName::A => {
                        for y in self.g.neighbors(x as usize) {
                            if in_b[y] {
                                entries.insert(vec![x, y as u16], 1);
                            }
                        }
                    }
                    _ => {
                        for &y in &domains[b] {
                            if self.value(f.name, x as usize, y as usize) {
                                entries.insert(vec![x, y], 1);
                            }
                        }
                    }
                }
            }
            let (vars, entries) = if a < b {
                (vec![a, b], entries)
            } else {
                (vec![b, a], entries.into_iter().map(|(kk, v)| (vec![kk[1], kk[0]], v)).collect())
            };
            if entries.is_empty() {
                return zero();
            }
            tables.push(Table { vars, entries });
        }

        let mut scalar: i128 = 1;
        for &x in order {
            let (with, without): (Vec<Table>, Vec<Table>) = tables.into_iter().partition(|t| t.vars.contains(&x));
            tables = without;
            if with.is_empty() {
                scalar = scalar.checked_mul(domains[x].len() as i128).ok_or_else(overflow)?;
                continue;
            }
            let joined = self.join_all(with, &self.net.names[x])?;
            let summed = sum_out(&joined, x)?;
            if summed.entries.is_empty() {
                return zero();
            }
            if summed.vars.is_empty() {
                let v = summed.entries[&Vec::new()];
                scalar = scalar.checked_mul(v).ok_or_else(overflow)?;
            } else {
                tables.push(summed);
            }
        }

        // free externals not touched by any remaining table range over their domain
        let free: Vec<usize> = self.net.externals.iter().copied().filter(|&e| self.pinned[e].is_none()).collect();
        for &e in &free {
            if !tables.iter().any(|t| t.vars.contains(&e)) {
                tables.push(Table {
                    vars: vec![e],
                    entries: domains[e].iter().map(|&x| (vec![x], 1)).collect(),
                });
            }
        }
        let mut result = if tables.is_empty() {
            Table {
                vars: Vec::new(),
                entries: HashMap::from([(Vec::new(), 1)]),
            }
        } else {
            self.join_all(tables, "boundary")?
        };
        if scalar != 1 {
            for v in result.entries.values_mut() {
                *v = v.checked_mul(scalar).ok_or_else(overflow)?;
            }
        }
        result.entries.retain(|_, v| *v != 0);
        Ok((result.vars, result.entries))
    }

    fn join_all(&self, mut tables: Vec<Table>, label: &str) -> Result<Table> {
        tables.sort_by_key(|t| t.entries.len());
        let mut acc = tables.remove(0);
        for t in tables {
            acc = join(&acc, &t, self.cap, label)?;
        }
        Ok(acc)
    }
}

fn join(a: &Table, b: &Table, cap: usize, label: &str) -> Result<Table> {
    let vars: Vec<usize> = a.vars.iter().chain(&b.vars).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let shared: Vec<usize> = a.vars.iter().copied().filter(|v| b.vars.contains(v)).collect();
    let a_shared: Vec<usize> = shared.iter().map(|v| a.vars.iter().position(|x| x == v).unwrap()).collect();
    let b_shared: Vec<usize> = shared.iter().map(|v| b.vars.iter().position(|x| x == v).unwrap()).collect();
    // where each output variable is read from: (from_a, position)
    let source: Vec<(bool, usize)> = vars
        .iter()
        .map(|v| match a.vars.iter().position(|x| x == v) {
            Some(p) => (true, p),
            None => (false, b.vars.iter().position(|x| x == v).unwrap()),
        })
        .collect();
    let mut index: HashMap<Vec<u16>, Vec<(&Vec<u16>, i128)>> = HashMap::new();
    for (k, &v) in &b.entries {
        index.entry(b_shared.iter().map(|&p| k[p]).collect()).or_default().push((k, v));
    }
    let mut entries = HashMap::new();
    let mut key = Vec::with_capacity(a_shared.len());
    for (ka, &va) in &a.entries {
        key.clear();
        key.extend(a_shared.iter().map(|&p| ka[p]));
        let Some(rows) = index.get(&key) else { continue };
        for &(kb, vb) in rows {
            let out: Vec<u16> = source.iter().map(|&(fa, p)| if fa { ka[p] } else { kb[p] }).collect();
            entries.insert(out, va.checked_mul(vb).ok_or_else(overflow)?);
            if entries.len() > cap {
                return Err(Error::capacity(
                    format!("contraction table while eliminating index {label}"),
                    entries.len() as u128,
                    cap as u128,
                ));
            }
        }
    }
    Ok(Table { vars, entries })
}

fn sum_out(t: &Table, x: usize) -> Result<Table> {
    let p = t.vars.iter().position(|&v| v == x).expect("variable present");
    let vars: Vec<usize> = t.vars.iter().copied().filter(|&v| v != x).collect();
    let mut entries: HashMap<Vec<u16>, i128> = HashMap::new();
    for (k, &v) in &t.entries {
        let mut key = k.clone();
        key.remove(p);
        let slot = entries.entry(key).or_insert(0);
        *slot = slot.checked_add(v).ok_or_else(overflow)?;
    }
    entries.retain(|_, v| *v != 0);
    Ok(Table { vars, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn boundary(g: &KneserGraph, pairs: &[(u8, u8)]) -> Vec<usize> {
        pairs.iter().map(|&(a, b)| g.index(Vertex::new(a, b).unwrap()).unwrap()).collect()
    }

    const B1: [(u8, u8); 4] = [(1, 2), (3, 4), (1, 2), (3, 4)];
    const B2: [(u8, u8); 4] = [(1, 2), (3, 4), (1, 2), (3, 5)];

    fn star() -> ContractionNetwork {
        ContractionNetwork::parse(
            "factor A u v1\nfactor A u v2\nfactor A u v3\nfactor A u v4\nexternal v1 v2 v3 v4\n",
        )
        .unwrap()
    }

    #[test]
    fn single_factor_is_the_generator() {
        let g = KneserGraph::build(5).unwrap();
        let net = ContractionNetwork::parse("factor A x y\nexternal x y").unwrap();
        let dense = net.evaluate_dense(&g).unwrap();
        let expected = SpinTensor::from_fn(2, 10, |x| if g.adjacent_idx(x[0], x[1]) { q(1) } else { q(0) }).unwrap();
        assert_eq!(dense, expected);
    }

    #[test]
    fn star_values() {
        let g = KneserGraph::build(8).unwrap();
        assert_eq!(star().evaluate_at(&g, &boundary(&g, &B1)).unwrap(), q(6));
        assert_eq!(star().evaluate_at(&g, &boundary(&g, &B2)).unwrap(), q(3));
    }

    #[test]
    fn double_star() {
        let g = KneserGraph::build(8).unwrap();
        let net = ContractionNetwork::parse(
            "factor A u v1\nfactor A u v2\nfactor A w v3\nfactor A w v4\nfactor A u w\nexternal v1 v2 v3 v4",
        )
        .unwrap();
        assert_eq!(net.evaluate_at(&g, &boundary(&g, &B1)).unwrap(), q(6));
    }

    #[test]
    fn closed_loops() {
        let g = KneserGraph::build(5).unwrap();
        let net = ContractionNetwork::parse("factor I a b\nfactor I b a\nfactor I c d\nfactor I d c\nexternal").unwrap();
        assert_eq!(net.evaluate_at(&g, &[]).unwrap(), q(100));
    }

    #[test]
    fn pinned_delta_violation_is_zero() {
        let g = KneserGraph::build(6).unwrap();
        let net = ContractionNetwork::parse("factor I v1 v3\nfactor A u v1\nfactor J v2 u\nexternal v1 v2 v3").unwrap();
        let b = boundary(&g, &[(1, 2), (3, 4), (1, 3)]);
        assert_eq!(net.evaluate_at(&g, &b).unwrap(), q(0));
    }

    #[test]
    fn orders_prefer_leaves() {
        let chain = ContractionNetwork::parse("factor A a b\nfactor A b c\nfactor A c d\nexternal").unwrap();
        let order = chain.choose_order();
        assert!(order[0] == 0 || order[0] == 3);
        let order = star().choose_order();
        assert_eq!(order, vec![0]);
        let hub = ContractionNetwork::parse("factor A h a\nfactor A h b\nfactor A h c\nexternal").unwrap();
        assert_ne!(hub.choose_order()[0], 0);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let net = star();
        assert_eq!(ContractionNetwork::parse(&net.to_text()).unwrap(), net);
        assert_eq!(net.to_string(), "sum[u](A(u,v1) * A(u,v2) * A(u,v3) * A(u,v4))");
        assert!(ContractionNetwork::parse("factor Q a b").is_err());
        assert!(ContractionNetwork::parse("external a a").is_err());
        assert!(ContractionNetwork::parse("factor A a b\nexternal a c").is_err());
    }

    #[test]
    fn table_cap_names_the_index() {
        let g = KneserGraph::build(8).unwrap();
        let net = ContractionNetwork::parse("factor J a b\nfactor J b c\nfactor J c d\nfactor J d e\nexternal a c e").unwrap();
        let tiny = vec![None; net.names.len()];
        let err = Eliminator::new(&net, &g, &tiny, 100).run(&net.choose_order()).unwrap_err();
        assert!(err.is_capacity());
    }
}
