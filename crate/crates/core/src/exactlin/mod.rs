//! Exact integer linear algebra over finitely presented abelian groups.
//!
//! Groups are presented as ℤ^n modulo the row span of a relation matrix. All
//! arithmetic is arbitrary precision; canonical forms come from the Smith
//! normal form and are computed lazily, once per group value.

mod group;
mod hom;
mod matrix;
mod snf;

pub use group::FGAb;
pub use hom::{
    columns_vanish, compose, direct_sum, hom_cokernel, hom_image, hom_kernel, homs_equal, minimized,
    quotient_by_subgroup, solve_membership, subgroup, tensor, tensor_homs, AbHom, MembershipSolver, TensorIndex,
};
pub use matrix::{int, unit_vec, vec_add, vec_is_zero, vec_scale, vec_sub, zero_vec, Int, Matrix};
pub use snf::{egcd, hermite_rows, integer_kernel, smith_normal_form, IntegerSolver, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("ill-formed homomorphism: source relation {relation} does not map into the target relations")]
    IllFormedHom { relation: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}
