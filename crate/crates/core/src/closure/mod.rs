//! The planar subalgebra generated by `1, I, J, A`, computed arity by arity
//! up to a bound `K`.
//!
//! The search runs over `F_p`: every element is a coordinate vector, moves
//! are applied to basis elements in FIFO order, and a result is kept when it
//! is independent of what is already known at its arity. Boxes of the top
//! arity `K` are never stored; each one is immediately reduced by all `K`
//! cyclic merges and sums. Every kept element records how it was built, so
//! membership claims are replayed afterwards in exact rational arithmetic
//! (see [`ClosureResult::exact_subspace`] and [`ClosureResult::certify`]).

pub mod coords;
pub mod modp;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::boxes::{four_box, FourBoxName};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::orbit::InvariantTensor;
use crate::Rational;

pub use coords::{Coords, DenseCoords, OrbitCoords, Seed};
use modp::ModSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MoveSet {
    pub rotate: bool,
    pub merge: bool,
    pub sum_out: bool,
    pub split: bool,
    pub tensor: bool,
    /// Entrywise products are taken between boxes of arity at most this.
    pub hadamard_max_arity: usize,
    /// Swapping adjacent legs. Not a planar move: it produces `R` from
    /// `I (x) I` at once.
    pub permute: bool,
}

impl Default for MoveSet {
    fn default() -> Self {
        MoveSet {
            rotate: true,
            merge: true,
            sum_out: true,
            split: true,
            tensor: true,
            hadamard_max_arity: 2,
            permute: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureBackend {
    Orbit,
    Dense,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureConfig {
    pub n: usize,
    /// Largest arity reached; boxes of this arity are transient.
    pub max_arity: usize,
    pub moves: MoveSet,
    /// Bound on processed elements.
    pub max_steps: usize,
    /// Stop as soon as this 4-box lies in the arity-4 span.
    pub target: Option<FourBoxName>,
    pub backend: ClosureBackend,
    /// Seed for the random probes of the modular spaces.
    pub seed: u64,
    /// Largest vector length the dense backend may use.
    pub dense_cap: u128,
}

impl ClosureConfig {
    pub fn new(n: usize) -> Self {
        ClosureConfig {
            n,
            max_arity: 6,
            moves: MoveSet::default(),
            max_steps: 1_000_000,
            target: None,
            backend: ClosureBackend::Orbit,
            seed: 0,
            dense_cap: 10_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_arity < 4 {
            return Err(Error::invalid(format!("max arity must be at least 4, got {}", self.max_arity)));
        }
        if self.n < 4 {
            return Err(Error::invalid(format!("KG(n,2) needs n >= 4, got {}", self.n)));
        }
        Ok(())
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Op {
    Seed(Seed),
    Rotate(NodeId),
    Merge(NodeId),
    SumOut(NodeId),
    Split(NodeId),
    Tensor(NodeId, NodeId),
    Hadamard(NodeId, NodeId),
    Permute(NodeId, usize),
}

impl Op {
    fn parents(&self) -> Vec<NodeId> {
        match *self {
            Op::Seed(_) => vec![],
            Op::Rotate(a) | Op::Merge(a) | Op::SumOut(a) | Op::Split(a) | Op::Permute(a, _) => vec![a],
            Op::Tensor(a, b) | Op::Hadamard(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Node {
    pub op: Op,
    pub arity: usize,
}

/// Construction record of every kept element and of the transient top
/// boxes they came from. Parents always precede children.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Dag {
    pub nodes: Vec<Node>,
}

impl Dag {
    fn push(&mut self, op: Op, arity: usize) -> NodeId {
        self.nodes.push(Node { op, arity });
        self.nodes.len() - 1
    }

    /// One definition per line, e.g. `x7 = merge(x5)`, covering `roots`
    /// and everything they depend on.
    pub fn definitions(&self, roots: &[NodeId]) -> Vec<String> {
        let needed = self.ancestors(roots);
        needed
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| format!("x{i} = {}", self.describe(i)))
            .collect()
    }

    pub fn describe(&self, id: NodeId) -> String {
        match self.nodes[id].op {
            Op::Seed(s) => s.to_string(),
            Op::Rotate(a) => format!("rotate(x{a})"),
            Op::Merge(a) => format!("merge(x{a}, 1)"),
            Op::SumOut(a) => format!("sum_out(x{a}, 1)"),
            Op::Split(a) => format!("split(x{a}, 1)"),
            Op::Tensor(a, b) => format!("tensor(x{a}, x{b})"),
            Op::Hadamard(a, b) => format!("hadamard(x{a}, x{b})"),
            Op::Permute(a, p) => format!("permute(x{a}, {p})"),
        }
    }

    fn ancestors(&self, roots: &[NodeId]) -> Vec<bool> {
        let mut needed = vec![false; self.nodes.len()];
        for &r in roots {
            needed[r] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if needed[i] {
                for p in self.nodes[i].op.parents() {
                    needed[p] = true;
                }
            }
        }
        needed
    }

    /// Exact values of `roots`, replayed with the orbit-backend operations.
    pub fn evaluate(&self, n: usize, roots: &[NodeId]) -> Result<HashMap<NodeId, InvariantTensor>> {
        let needed = self.ancestors(roots);
        let mut last_use = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if needed[i] {
                for p in node.op.parents() {
                    last_use[p] = i;
                }
            }
        }
        let mut memo: HashMap<NodeId, InvariantTensor> = HashMap::new();
        let mut out = HashMap::new();
        for i in 0..self.nodes.len() {
            if !needed[i] {
                continue;
            }
            let get = |a: NodeId| memo.get(&a).expect("parents are evaluated first");
            let value = match self.nodes[i].op {
                Op::Seed(Seed::One) => InvariantTensor::scalar(Rational::from_integer(1.into()), n),
                Op::Seed(s) => crate::boxes::two_box(s.two_box().expect("2-box seed"), n)?,
                Op::Rotate(a) => get(a).rotate(),
                Op::Merge(a) => get(a).merge(1)?,
                Op::SumOut(a) => get(a).sum_out(1)?,
                Op::Split(a) => get(a).split(1)?,
                Op::Tensor(a, b) => get(a).tensor_product(get(b))?,
                Op::Hadamard(a, b) => get(a).hadamard_product(get(b))?,
                Op::Permute(a, p) => get(a).permute_adjacent(p)?,
            };
            for p in self.nodes[i].op.parents() {
                if last_use[p] == i && !roots.contains(&p) {
                    memo.remove(&p);
                }
            }
            if roots.contains(&i) {
                out.insert(i, value.clone());
            }
            memo.insert(i, value);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureResult {
    pub n: usize,
    pub max_arity: usize,
    pub backend: ClosureBackend,
    /// Dimension of the span at arities `0..K`.
    pub dims: Vec<usize>,
    /// Pattern (or tuple) count at each arity, the ambient dimension.
    pub ambient: Vec<usize>,
    pub converged: bool,
    pub stopped_on_target: bool,
    pub steps: usize,
    /// Arity of each kept element, in the order kept.
    pub log: Vec<usize>,
    pub basis: Vec<Vec<NodeId>>,
    pub dag: Dag,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    spaces: Vec<ModSpace>,
    #[serde(skip)]
    targets: HashMap<FourBoxName, Vec<u64>>,
}

impl ClosureResult {
    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    /// Modular membership of one of the named 4-boxes.
    pub fn contains_mod_p(&self, f: FourBoxName) -> bool {
        self.max_arity > 4 && self.targets.get(&f).map_or(false, |v| self.spaces[4].contains(v))
    }

    /// The exact span of the kept elements of arity `k`.
    pub fn exact_subspace(&self, k: usize) -> Result<Subspace> {
        let roots = self.basis.get(k).cloned().unwrap_or_default();
        let values = self.dag.evaluate(self.n, &roots)?;
        let mut s = Subspace::new(k, self.n)?;
        for r in &roots {
            s.insert(&values[r])?;
        }
        Ok(s)
    }

    /// Exact proof that `f` (arity 4) lies in the span: the coefficients on
    /// the kept arity-4 elements, with their node ids. `None` if `f` is not
    /// in the exact span.
    pub fn certify(&self, f: &InvariantTensor) -> Result<Option<Vec<(NodeId, Rational)>>> {
        let k = f.arity();
        let s = self.exact_subspace(k)?;
        Ok(s.solve(f)?.map(|c| self.basis[k].iter().copied().zip(c).collect()))
    }
}

impl fmt::Display for ClosureResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "closure of 1, I, J, A for n = {}, arity <= {}", self.n, self.max_arity)?;
        for (k, (d, a)) in self.dims.iter().zip(&self.ambient).enumerate() {
            writeln!(f, "  arity {k}: dim {d} of {a}")?;
        }
        write!(
            f,
            "  steps {}, converged {}, stopped on target {}",
            self.steps, self.converged, self.stopped_on_target
        )
    }
}

struct Elem {
    node: NodeId,
    order: usize,
    vec: Vec<u64>,
}

struct Engine<'a, C: Coords> {
    c: &'a C,
    k_max: usize,
    spaces: Vec<ModSpace>,
    basis: Vec<Vec<Elem>>,
    queue: VecDeque<(usize, usize)>,
    dag: Dag,
    log: Vec<usize>,
}

/// A box of the top arity with its construction, reduced lazily.
struct Top {
    vec: Vec<u64>,
    op: Op,
}

impl<'a, C: Coords> Engine<'a, C> {
    fn new(c: &'a C, seed: u64) -> Self {
        let k_max = c.max_arity();
        Engine {
            c,
            k_max,
            spaces: (0..k_max).map(|k| ModSpace::new(c.len(k), seed.wrapping_add(k as u64))).collect(),
            basis: (0..k_max).map(|_| Vec::new()).collect(),
            queue: VecDeque::new(),
            dag: Dag::default(),
            log: Vec::new(),
        }
    }

    fn insert(&mut self, k: usize, vec: Vec<u64>, op: Op) -> bool {
        if !self.spaces[k].insert(&vec) {
            return false;
        }
        let node = self.dag.push(op, k);
        self.basis[k].push(Elem {
            node,
            order: self.log.len(),
            vec,
        });
        self.queue.push_back((k, self.basis[k].len() - 1));
        self.log.push(k);
        true
    }

    fn insert_top(&mut self, tops: Vec<Top>) {
        let k = self.k_max;
        let c = self.c;
        let children: Vec<Vec<(usize, bool, Vec<u64>)>> = tops
            .par_iter()
            .map(|t| {
                let mut out = Vec::with_capacity(2 * k);
                let mut v = t.vec.clone();
                for r in 0..k {
                    if r > 0 {
                        v = c.rotate(k, &v);
                    }
                    out.push((r, false, c.merge(k, &v)));
                    out.push((r, true, c.sum_out(k, &v)));
                }
                out
            })
            .collect();
        for (t, kids) in tops.into_iter().zip(children) {
            let mut top_node: Option<NodeId> = None;
            let mut rotated: Vec<Option<NodeId>> = vec![None; k];
            for (r, summed, vec) in kids {
                if !self.spaces[k - 1].insert(&vec) {
                    continue;
                }
                let base = *top_node.get_or_insert_with(|| self.dag.push(t.op, k));
                let mut parent = base;
                for slot in rotated.iter_mut().take(r + 1).skip(1) {
                    let p = parent;
                    parent = *slot.get_or_insert_with(|| self.dag.push(Op::Rotate(p), k));
                }
                let op = if summed { Op::SumOut(parent) } else { Op::Merge(parent) };
                let node = self.dag.push(op, k - 1);
                self.basis[k - 1].push(Elem {
                    node,
                    order: self.log.len(),
                    vec,
                });
                self.queue.push_back((k - 1, self.basis[k - 1].len() - 1));
                self.log.push(k - 1);
            }
        }
    }

    fn offer(&mut self, k: usize, vec: Vec<u64>, op: Op) {
        if k == self.k_max {
            self.insert_top(vec![Top { vec, op }]);
        } else {
            self.insert(k, vec, op);
        }
    }

    fn process(&mut self, k: usize, idx: usize, moves: &MoveSet) {
        let c = self.c;
        let (node, order) = (self.basis[k][idx].node, self.basis[k][idx].order);
        let v = self.basis[k][idx].vec.clone();
        if moves.rotate && k >= 2 {
            self.offer(k, c.rotate(k, &v), Op::Rotate(node));
        }
        if moves.merge && k >= 2 {
            self.offer(k - 1, c.merge(k, &v), Op::Merge(node));
        }
        if moves.sum_out && k >= 1 {
            self.offer(k - 1, c.sum_out(k, &v), Op::SumOut(node));
        }
        if moves.split && k + 2 <= self.k_max {
            self.offer(k + 2, c.split(k, &v), Op::Split(node));
        }
        if moves.permute {
            for pos in 1..k {
                self.offer(k, c.permute(k, pos, &v), Op::Permute(node, pos));
            }
        }
        if moves.tensor && k >= 1 {
            for b in 1..=self.k_max - k {
                let partners: Vec<(NodeId, &Vec<u64>)> = self.basis[b]
                    .iter()
                    .filter(|w| w.order <= order)
                    .map(|w| (w.node, &w.vec))
                    .collect();
                let products: Vec<(Vec<u64>, Op)> = partners
                    .par_iter()
                    .map(|(wn, w)| (c.tensor(k, b, &v, w), Op::Tensor(node, *wn)))
                    .collect();
                if k + b == self.k_max {
                    let tops = products.into_iter().map(|(vec, op)| Top { vec, op }).collect();
                    self.insert_top(tops);
                } else {
                    for (vec, op) in products {
                        self.insert(k + b, vec, op);
                    }
                }
            }
        }
        if k >= 1 && k <= moves.hadamard_max_arity {
            let partners: Vec<(NodeId, Vec<u64>)> = self.basis[k]
                .iter()
                .filter(|w| w.order <= order)
                .map(|w| (w.node, coords::hadamard(&v, &w.vec)))
                .collect();
            for (wn, vec) in partners {
                self.insert(k, vec, Op::Hadamard(node, wn));
            }
        }
    }
}

/// Runs the closure on the given coordinates.
pub fn run_closure_with<C: Coords>(c: &C, cfg: &ClosureConfig) -> Result<ClosureResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut e = Engine::new(c, cfg.seed);
    for s in Seed::ALL {
        e.insert(s.arity(), c.seed(s), Op::Seed(s));
    }
    let targets: HashMap<FourBoxName, Vec<u64>> = FourBoxName::ALL.iter().map(|&f| (f, c.four_box(f))).collect();
    let mut steps = 0;
    let mut stopped_on_target = false;
    let mut converged = true;
    while let Some((k, idx)) = e.queue.pop_front() {
        if let Some(t) = cfg.target {
            if cfg.max_arity > 4 && e.spaces[4].contains(&targets[&t]) {
                stopped_on_target = true;
                converged = false;
                e.queue.push_front((k, idx));
                break;
            }
        }
        if steps >= cfg.max_steps {
            converged = false;
            e.queue.push_front((k, idx));
            break;
        }
        e.process(k, idx, &cfg.moves);
        steps += 1;
    }
    if let (Some(t), false) = (cfg.target, stopped_on_target) {
        stopped_on_target = cfg.max_arity > 4 && e.spaces[4].contains(&targets[&t]);
    }
    Ok(ClosureResult {
        n: cfg.n,
        max_arity: cfg.max_arity,
        backend: cfg.backend,
        dims: e.spaces.iter().map(ModSpace::dim).collect(),
        ambient: (0..cfg.max_arity).map(|k| c.len(k)).collect(),
        converged,
        stopped_on_target,
        steps,
        log: e.log,
        basis: e.basis.iter().map(|b| b.iter().map(|x| x.node).collect()).collect(),
        dag: e.dag,
        elapsed: start.elapsed(),
        spaces: e.spaces,
        targets,
    })
}

pub fn run_closure(cfg: &ClosureConfig) -> Result<ClosureResult> {
    match cfg.backend {
        ClosureBackend::Orbit => run_closure_with(&OrbitCoords::new(cfg.n, cfg.max_arity)?, cfg),
        ClosureBackend::Dense => run_closure_with(&DenseCoords::new(cfg.n, cfg.max_arity, cfg.dense_cap)?, cfg),
    }
}

/// Exact membership in a subspace.
pub fn contains(s: &Subspace, f: &InvariantTensor) -> Result<bool> {
    s.contains(f)
}

/// Outcome of the direct route: does the closure contain `R`?
#[derive(Debug, Clone, Serialize)]
pub struct DirectRoute {
    pub closure: ClosureResult,
    /// Coefficients of `R` on kept arity-4 elements, verified exactly.
    #[serde(serialize_with = "crate::ser::combination")]
    pub r_combination: Option<Vec<(NodeId, Rational)>>,
}

/// Closure with early stop on `R`, followed by exact verification.
pub fn direct_route(cfg: &ClosureConfig) -> Result<DirectRoute> {
    let mut cfg = cfg.clone();
    cfg.target = Some(FourBoxName::R);
    let closure = run_closure(&cfg)?;
    let r_combination = if closure.contains_mod_p(FourBoxName::R) {
        closure.certify(&four_box(FourBoxName::R, cfg.n)?)?
    } else {
        None
    };
    Ok(DirectRoute { closure, r_combination })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_closure_two_boxes() {
        let mut cfg = ClosureConfig::new(5);
        cfg.max_arity = 4;
        let r = run_closure(&cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.dim(0), 1);
        assert_eq!(r.dim(1), 1);
        assert_eq!(r.dim(2), 3);
        assert!(r.dim(3) >= 1);
    }

    #[test]
    fn permute_gives_r_immediately() {
        let mut cfg = ClosureConfig::new(5);
        cfg.max_arity = 5;
        cfg.moves.permute = true;
        cfg.target = Some(FourBoxName::R);
        let r = run_closure(&cfg).unwrap();
        assert!(r.stopped_on_target);
    }
}
