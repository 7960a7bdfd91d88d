//! Exact linear algebra over the integers and residue rings.
//!
//! Everything downstream (homology of subgroups, group cohomology, section
//! class enumeration) reduces to Smith normal forms, integer nullspaces and
//! quotients of sublattices of `Z^n`. All arithmetic is arbitrary precision;
//! there is no floating point anywhere in this crate.

mod fp;
mod lattice;
mod matrix;
mod smith;

pub use fp::FpMat;
pub use lattice::{
    cokernel, in_lattice, lattice_basis, lattice_intersection, nullspace, preimage_lattice,
    solve, solve_mod, LatticeQuotient,
};
pub use matrix::{AbGroupStructure, IntMatrix};
pub use smith::{smith_normal_form, SmithForm};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector is not in the spanned lattice")]
    NotInSpan,
    #[error("denominator lattice is not contained in the numerator lattice")]
    NotASublattice,
}
