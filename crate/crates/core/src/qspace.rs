//! The subspace `Q` of invariant 4-boxes supported on cyclically adjacent
//! tuples, its orbit basis `b_1..b_9`, and evaluation matrices of catalog
//! elements against that basis.

use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::boxes::{CatalogElement, TwoBoxName};
use crate::error::{Error, Result};
use crate::linalg;
use crate::orbit::{canonicalize, enumerate_patterns, InvariantTensor, Pattern};
use crate::{Integer, Rational};

/// The nine cyclic patterns for `n >= 8`, all starting `({1,2},{3,4})`.
const REFERENCE: [[[u8; 2]; 4]; 9] = [
    [[1, 2], [3, 4], [1, 2], [3, 4]],
    [[1, 2], [3, 4], [1, 2], [3, 5]],
    [[1, 2], [3, 4], [1, 2], [5, 6]],
    [[1, 2], [3, 4], [1, 5], [3, 4]],
    [[1, 2], [3, 4], [1, 5], [3, 6]],
    [[1, 2], [3, 4], [1, 5], [6, 7]],
    [[1, 2], [3, 4], [5, 6], [3, 4]],
    [[1, 2], [3, 4], [5, 6], [3, 7]],
    [[1, 2], [3, 4], [5, 6], [7, 8]],
];

fn is_cyclic(p: &Pattern) -> bool {
    let t = p.pairs();
    (0..4).all(|i| TwoBoxName::A.holds(t[i], t[(i + 1) % 4]))
}

/// Orbit basis of `Q`, ordered as `b_1..b_9` (restricted to the patterns
/// valid for `n`).
#[derive(Debug, Clone, Serialize)]
pub struct QBasis {
    pub n: usize,
    pub labels: Vec<String>,
    pub patterns: Vec<Pattern>,
}

impl QBasis {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// The coordinate vector of `f` on the basis: its values at the
    /// representatives.
    pub fn values(&self, f: &InvariantTensor) -> Result<Vec<Rational>> {
        if f.arity() != 4 || f.n() != self.n {
            return Err(Error::invalid(format!(
                "need a 4-box for n = {}, got arity {} for n = {}",
                self.n,
                f.arity(),
                f.n()
            )));
        }
        Ok(self.patterns.iter().map(|p| f.get(p)).collect())
    }

    /// Whether `f` vanishes off the cyclic-adjacency support.
    pub fn supports(&self, f: &InvariantTensor) -> bool {
        f.arity() == 4 && f.entries().keys().all(is_cyclic)
    }
}

pub fn q_orbit_basis(n: usize) -> Result<QBasis> {
    if n < 5 {
        return Err(Error::invalid(format!("Q is considered for n >= 5, got {n}")));
    }
    let mut found: Vec<Pattern> = enumerate_patterns(4, n)?.into_iter().filter(is_cyclic).collect();
    let mut labels = Vec::new();
    let mut patterns = Vec::new();
    for (i, r) in REFERENCE.iter().enumerate() {
        let p = canonicalize(r)?;
        if let Some(pos) = found.iter().position(|q| *q == p) {
            found.remove(pos);
            labels.push(format!("b{}", i + 1));
            patterns.push(p);
        }
    }
    // every cyclic pattern is one of the reference nine; anything else would
    // be appended in enumeration order
    for (j, p) in found.into_iter().enumerate() {
        labels.push(format!("c{}", j + 1));
        patterns.push(p);
    }
    Ok(QBasis { n, labels, patterns })
}

pub fn q_dimension(n: usize) -> Result<usize> {
    Ok(q_orbit_basis(n)?.len())
}

/// Values of catalog elements at the representatives of a basis.
#[derive(Debug, Clone, Serialize)]
pub struct EvalMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    #[serde(serialize_with = "crate::ser::integer_matrix")]
    pub entries: Vec<Vec<Integer>>,
}

impl EvalMatrix {
    fn rational(&self) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.rational())
    }

    /// Determinant, for square matrices.
    pub fn determinant(&self) -> Option<Integer> {
        let d = linalg::determinant(&self.rational()).ok()?;
        Some(d.to_integer())
    }

    /// Keeps the rows with the given labels, in the given order.
    pub fn select_rows(&self, labels: &[&str]) -> Result<EvalMatrix> {
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for l in labels {
            let i = self
                .rows
                .iter()
                .position(|r| r == l)
                .ok_or_else(|| Error::invalid(format!("no row {l}")))?;
            rows.push(self.rows[i].clone());
            entries.push(self.entries[i].clone());
        }
        Ok(EvalMatrix {
            rows,
            columns: self.columns.clone(),
            entries,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("row,{}\n", self.columns.join(","));
        for (label, r) in self.rows.iter().zip(&self.entries) {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("{label},{}\n", cells.join(",")));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self.entries.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        let width = cells
            .iter()
            .flatten()
            .chain(self.columns.iter())
            .map(String::len)
            .max()
            .unwrap_or(1);
        let lw = self.rows.iter().map(String::len).max().unwrap_or(0);
        let mut s = format!("{:lw$}", "");
        for c in &self.columns {
            s.push_str(&format!(" {c:>width$}"));
        }
        s.push('\n');
        for (label, r) in self.rows.iter().zip(&cells) {
            s.push_str(&format!("{label:lw$}"));
            for c in r {
                s.push_str(&format!(" {c:>width$}"));
            }
            s.push('\n');
        }
        s
    }

    /// Entries as `i64`, when they fit.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.entries.iter().map(|r| r.iter().map(ToPrimitive::to_i64).collect()).collect()
    }
}

pub fn evaluation_matrix(catalog: &[CatalogElement], basis: &QBasis) -> Result<EvalMatrix> {
    let mut entries = Vec::with_capacity(catalog.len());
    for e in catalog {
        let row = basis.values(&e.tensor)?;
        if row.iter().any(|x| !x.is_integer()) {
            return Err(Error::invalid(format!("{} has non-integer values", e.label)));
        }
        entries.push(row.into_iter().map(|x| x.to_integer()).collect());
    }
    Ok(EvalMatrix {
        rows: catalog.iter().map(|e| e.label.clone()).collect(),
        columns: basis.labels.clone(),
        entries,
    })
}

/// Closed forms for the rows of the 9x9 matrix, as functions of `n`.
pub mod formulas {
    use super::*;

    fn c2(m: i64) -> Integer {
        if m < 2 {
            Integer::zero()
        } else {
            binomial(Integer::from(m), Integer::from(2))
        }
    }

    fn int(m: i64) -> Integer {
        Integer::from(m)
    }

    /// Row of the four-neighbour star: `C(n-4,2), C(n-5,2), ...`.
    pub fn star_row(n: usize) -> Vec<Integer> {
        let n = n as i64;
        [4, 5, 6, 5, 6, 7, 6, 7, 8].iter().map(|&s| c2(n - s)).collect()
    }

    /// The row `x_1..x_9`.
    pub fn x_row(n: usize) -> Vec<Integer> {
        let n = n as i64;
        let block = |a: i64| {
            vec![
                c2(n - a) * c2(n - a - 2),
                (int(n - a - 1) + c2(n - a - 2)) * c2(n - a - 1),
                c2(n - a) + int(2) * int(n - a - 2) * c2(n - a - 1) + c2(n - a - 2) * c2(n - a - 2),
            ]
        };
        let mut out = block(4);
        out.extend(block(5));
        out.extend(block(6));
        out
    }

    /// The row `x_1, x_4, x_7, x_2, ...`: the same values with the basis
    /// transposed.
    pub fn x_row_transposed(n: usize) -> Vec<Integer> {
        let x = x_row(n);
        [0, 3, 6, 1, 4, 7, 2, 5, 8].iter().map(|&i| x[i].clone()).collect()
    }

    const Y: [[i64; 9]; 6] = [
        [2919840, -3704488, 2039584, -637336, 123793, -15324, 1182, -52, 1],
        [3699360, -4400712, 2297408, -688048, 129385, -15652, 1190, -52, 1],
        [4579680, -5154008, 2567320, -739896, 135017, -15980, 1198, -52, 1],
        [4564896, -5145064, 2565280, -739688, 135009, -15980, 1198, -52, 1],
        [5534816, -5947448, 2845304, -792464, 140673, -16308, 1206, -52, 1],
        [6600576, -6800712, 3135568, -846168, 146369, -16636, 1214, -52, 1],
    ];

    /// The printed degree-8 polynomials `y_1..y_9` (with `y_4 = y_2`,
    /// `y_7 = y_3`, `y_8 = y_6`).
    pub fn y_row(n: usize) -> Vec<Rational> {
        let eval = |c: &[i64; 9]| {
            let mut acc = Integer::zero();
            for &a in c.iter().rev() {
                acc = acc * Integer::from(n) + Integer::from(a);
            }
            Rational::new(acc, Integer::from(16))
        };
        let y: Vec<Rational> = Y.iter().map(eval).collect();
        [0, 1, 2, 1, 3, 4, 2, 4, 5].iter().map(|&i| y[i].clone()).collect()
    }

    /// Rows `e_1..e_5` of the 9x9 matrix; they do not depend on `n`.
    pub const FIXED_ROWS: [[i64; 9]; 5] = [
        [1, 1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 1, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 1, 1],
        [0, 0, 1, 0, 0, 1, 0, 0, 1],
    ];

    const PRINTED_7: [[i64; 8]; 8] = [
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 0, 0, 0, 0, 0],
        [1, 0, 0, 1, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1, 1],
        [0, 0, 1, 0, 0, 1, 0, 0],
        [3, 1, 0, 1, 0, 0, 0, 0],
        [0, 2, 5, 0, 0, 1, 0, 0],
        [0, 0, 0, 2, 0, 0, 5, 1],
    ];

    const PRINTED_6: [[i64; 6]; 6] = [
        [1, 1, 1, 1, 1, 1],
        [1, 1, 1, 0, 0, 0],
        [1, 0, 0, 1, 0, 1],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 0],
        [3, 1, 0, 1, 0, 0],
    ];

    /// The matrices printed for the reduced cases `n = 7` (rows `e_1..e_8`)
    /// and `n = 6` (rows `e_1..e_6`), with their printed determinants.
    pub fn printed_matrix(n: usize) -> Option<(Vec<Vec<Integer>>, Integer)> {
        let conv = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        match n {
            7 => Some((conv(&PRINTED_7.iter().map(|r| &r[..]).collect::<Vec<_>>()), int(4))),
            6 => Some((conv(&PRINTED_6.iter().map(|r| &r[..]).collect::<Vec<_>>()), int(1))),
            _ => None,
        }
    }

    /// `8(2n^2 - 26n + 83)`.
    pub fn det_formula(n: usize) -> Integer {
        let n = n as i64;
        int(8 * (2 * n * n - 26 * n + 83))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let dims: Vec<usize> = (5..=10).map(|n| q_dimension(n).unwrap()).collect();
        assert_eq!(dims, vec![3, 6, 8, 9, 9, 9]);
        let b = q_orbit_basis(6).unwrap();
        assert_eq!(b.labels, vec!["b1", "b2", "b3", "b4", "b5", "b7"]);
    }

    #[test]
    fn closed_forms_at_eight() {
        let i = |v: &[i64]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
        assert_eq!(formulas::star_row(8), i(&[6, 3, 1, 3, 1, 0, 1, 0, 0]));
        assert_eq!(formulas::x_row(8), i(&[6, 12, 19, 0, 2, 5, 0, 0, 1]));
        assert_eq!(formulas::y_row(8)[0], Rational::from_integer(6.into()));
        assert_eq!(formulas::det_formula(8), Integer::from(24));
    }
}
