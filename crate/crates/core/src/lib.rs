//! Exact construction and verification of the centralizer algebras
//! Z_k(G) = End_G(V^⊗k) for the finite and infinite subgroups G of SU(2).

pub mod bratteli;
pub mod cyclotomic;
pub mod diagrams;
pub mod dimforms;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod matrix_units;
pub mod repgraph;
pub mod tensor_endo;
pub mod tl_idem;
pub mod verify;

pub use cyclotomic::CycloNum;
pub use error::{Error, Result};
