//! The lifting hierarchy: level operators `Q_n`, their top eigenpairs,
//! the monotone sequence `μ_n`, its extrapolation and the recovered optimal
//! input.

mod extrapolate;
mod lanczos;
mod mop;
mod recover;
mod sequence;
mod sparse;

pub use extrapolate::{extrapolate, extrapolate_values, ExtrapolationFit, FLAT_DENOMINATOR, FLAT_SPREAD};
pub use lanczos::{default_start, lanczos_max, max_eig_sparse, EigenOptions, Eigenpair, WARM_START_NOISE};
pub use mop::{compressed_operator, solve_mop, Certificate, MopOptions, MopResult, Verdict};
pub use recover::{recover_state, reduced_matrix};
pub use sequence::{prolong, purity_sequence, LevelResult, PuritySequence, SequenceOptions, MONOTONE_SLACK};
pub use sparse::{assemble_qn, HermitianOperator, SparseHermitian};
