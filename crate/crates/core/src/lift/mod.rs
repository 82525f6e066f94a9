//! Symmetric-subspace combinatorics and the operators built on them.
//!
//! A channel's `q`-purity is `Tr[Φ(ρ)^q] = Tr[A ρ^⊗q]` for a lifted operator
//! `A` on `(C^d)^⊗q`. Only the compression `B = P_q† A P_q` onto the totally
//! symmetric subspace matters for the hierarchy, and that compression lives
//! in the occupation-number basis enumerated here.

mod occupation;
mod operators;

pub use occupation::{
    binomial, enumerate_occupations, multinomial, multinomial_f64, occupation_of, sym_dimension, OccupationBasis,
    OccupationIndex,
};
pub use operators::{build_a, compress, symmetrize, CompressedOperator, LiftedOperator, MAX_LIFT_DIM, MAX_SYMMETRIZE_Q};
