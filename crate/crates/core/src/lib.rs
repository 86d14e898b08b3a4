//! Exact planar-algebra computations for the Kneser graphs KG(n,2).
//!
//! The crate builds the spin model of KG(n,2), its `S_n`-invariant
//! subalgebra in orbit coordinates, and the planar subalgebra generated by
//! the 2-boxes `I`, `J`, `A`. It certifies that this subalgebra contains the
//! crossing `R`, which is equivalent to the graph having no quantum symmetry.

pub mod error;
pub mod graph;
pub mod hadamard;
pub mod boxes;
pub mod certificate;
pub mod closure;
pub mod linalg;
pub mod network;
pub mod orbit;
pub mod qspace;
mod ser;
pub mod tensor;

pub use boxes::{FourBoxName, TwoBoxName};
pub use certificate::{decide_property_g, Certificate, CertifyOptions, PropertyG};
pub use error::{Error, Result};
pub use network::ContractionNetwork;
pub use graph::{KneserGraph, SrgParams, Vertex};
pub use orbit::{canonicalize, enumerate_patterns, orbit_size, InvariantTensor, Pattern};
pub use tensor::SpinTensor;

pub type Rational = num_rational::BigRational;
pub type Integer = num_bigint::BigInt;
