//! Exact C_p-equivariant algebra.
//!
//! Mackey and Green functors for a cyclic group of prime order, the box
//! product with generator provenance, Mackey-field detection, RO(C_p)-graded
//! bookkeeping, twisted cyclic bar complexes and their homology, and finite
//! simplicial models of the circle with a cyclic action.

pub mod exactlin;
pub mod mackey;
pub mod boxtensor;
pub mod green;
pub mod grading;
pub mod simplicial;
pub mod hochschild;
pub mod io;
