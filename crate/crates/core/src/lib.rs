//! Exact verification of section-class obstructions for prime-order group
//! actions on closed surfaces.
//!
//! The crate takes a branch datum (prime `p`, quotient genus, local
//! monodromies, handle images), builds the associated orbifold group
//! presentation and its index-`p` surface subgroup, and computes, entirely in
//! integer arithmetic:
//!
//! * the abelianised and class-2 nilpotent quotients of the surface subgroup,
//! * cohomology of `Z/p` with coefficients in the resulting modules,
//! * section classes of the level-1 and level-2 extensions and the
//!   obstructions to lifting between them,
//! * the divisor-space description of the abelianised section map,
//!
//! and cross-checks the structural statements that tie these together
//! (surjectivity and kernel of the divisor map, injectivity of the
//! fixed-point section map, the classification of liftable classes at level
//! 2, and the abelian-variety component-group count).

pub mod fpgroup;
pub mod gcohom;
pub mod jaclattice;
pub mod linalg;
pub mod nilq;
pub mod orbifold;
pub mod report;
pub mod sections;

pub use linalg::{AbGroupStructure, IntMatrix};
