//! Maximal output purity of quantum channels.
//!
//! The maximal output `q`-purity `ν_q(Φ) = max_ρ ‖Φ(ρ)‖_q` is a non-convex
//! optimisation problem. For integer `q` it can be written as
//! `max_ρ Tr[A ρ^⊗q]` for a lifted operator `A`, and the maximum is the limit
//! of a non-increasing sequence of top eigenvalues `μ_n` of the compression of
//! `A ⊗ I^⊗n` onto the totally symmetric subspace of `q + n` copies. In the
//! occupation-number basis those compressions are sparse (banded for qubits),
//! so the sequence can be driven far with a Lanczos eigensolver and then
//! extrapolated.
//!
//! Modules:
//! - [`channel`]: Kraus channels, Choi matrices, density matrices, channel files.
//! - [`lift`]: occupation-number combinatorics and the lifted/compressed operators.
//! - [`solver`]: level operators, the eigensolver, the purity sequence,
//!   extrapolation and optimal-state recovery.
//! - [`baseline`]: local search, Bloch-sphere grid scan and dense oracles.

pub mod baseline;
pub mod channel;
pub mod error;
pub mod lift;
pub mod linalg;
pub mod solver;

pub use channel::{ChoiMatrix, DensityMatrix, QuantumChannel};
pub use error::{Error, Result};
pub use lift::{CompressedOperator, LiftedOperator, OccupationBasis, OccupationIndex};
pub use linalg::{c64, ComplexMatrix};
pub use solver::{
    ExtrapolationFit, LevelResult, MopOptions, MopResult, PuritySequence, SparseHermitian, Verdict,
};
