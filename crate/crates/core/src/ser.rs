//! Serialization of exact numbers as decimal strings.

use serde::ser::{SerializeSeq, Serializer};

use crate::{Integer, Rational};

pub fn integer_matrix<S: Serializer>(m: &[Vec<Integer>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        seq.serialize_element(&cells)?;
    }
    seq.end()
}

pub fn combination<S: Serializer>(c: &Option<Vec<(usize, Rational)>>, s: S) -> Result<S::Ok, S::Error> {
    match c {
        None => s.serialize_none(),
        Some(v) => {
            let cells: Vec<(usize, String)> = v.iter().map(|(i, x)| (*i, x.to_string())).collect();
            s.collect_seq(cells)
        }
    }
}
