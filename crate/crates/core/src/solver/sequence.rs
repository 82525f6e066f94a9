use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::lanczos::{lanczos_max, EigenOptions};
use super::recover::reduced_matrix;
use super::sparse::{assemble_qn, HermitianOperator};
use crate::error::{Error, Result};
use crate::lift::{CompressedOperator, OccupationBasis};
use crate::linalg::c64;

/// Slack allowed on `μ_{n+1} ≤ μ_n` before it is reported as an error.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Top eigenpair of one level operator `Q_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub n: usize,
    /// `S(d, q + n)`.
    pub dim: usize,
    pub mu: f64,
    /// Amplitudes over the occupation basis of `q + n` copies.
    #[serde(skip)]
    pub psi: Vec<c64>,
    /// Matrix-vector products spent by the eigensolver.
    pub iterations: usize,
    pub residual: f64,
    /// Distinct diagonals of `Q_n` in the canonical ordering.
    pub diagonals: usize,
    pub nnz: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PuritySequence {
    levels: Vec<LevelResult>,
}

impl PuritySequence {
    /// Wraps levels after checking that `n` strictly increases and `μ` does
    /// not increase beyond [`MONOTONE_SLACK`].
    pub fn new(levels: Vec<LevelResult>) -> Result<Self> {
        for w in levels.windows(2) {
            if w[1].n <= w[0].n {
                return Err(Error::InvalidParameter(format!(
                    "levels must increase strictly, got n = {} after {}",
                    w[1].n, w[0].n
                )));
            }
            if w[1].mu > w[0].mu + MONOTONE_SLACK {
                return Err(Error::MonotonicityViolation { prev_n: w[0].n, n: w[1].n, prev_mu: w[0].mu, mu: w[1].mu });
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[LevelResult] {
        &self.levels
    }

    pub fn mus(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.mu).collect()
    }

    pub fn last(&self) -> Option<&LevelResult> {
        self.levels.last()
    }
}

#[derive(Debug, Clone)]
pub struct SequenceOptions {
    pub eig_tol: f64,
    /// Matrix-vector budget per level; `None` means `10 · dim`.
    pub max_iter: Option<usize>,
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self { eig_tol: 1e-12, max_iter: None, krylov_dim: 40, seed: 0 }
    }
}

/// Embeds amplitudes over `from` (N copies) into `to` (N + s copies) by
/// adding `s` particles to `mode`.
pub fn prolong(from: &OccupationBasis, psi: &[c64], to: &OccupationBasis, mode: usize) -> Vec<c64> {
    let extra = (to.copies() - from.copies()) as u32;
    let mut out = vec![c64::new(0.0, 0.0); to.len()];
    let mut shifted = vec![0u32; from.dim()];
    for (k, &amp) in from.iter().zip(psi) {
        shifted.copy_from_slice(k);
        shifted[mode] += extra;
        let pos = to.position(&shifted).expect("prolonged occupation is in the target basis");
        out[pos] = amp;
    }
    out
}

/// `μ_n` for every `n` in `schedule`, each level warm-started from the
/// previous eigenvector prolonged along its most occupied mode.
pub fn purity_sequence(b: &CompressedOperator, schedule: &[usize], opts: &SequenceOptions) -> Result<PuritySequence> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("schedule must not be empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("schedule {schedule:?} is not strictly increasing")));
    }
    let mut levels: Vec<LevelResult> = Vec::with_capacity(schedule.len());
    let mut previous: Option<(OccupationBasis, Vec<c64>)> = None;
    for &n in schedule {
        let started = Instant::now();
        let qn = assemble_qn(b, n)?;
        let start = previous.as_ref().map(|(basis, psi)| {
            let rho = reduced_matrix(basis, psi).expect("eigenvector is normalised");
            let mode = (0..rho.nrows())
                .max_by(|&i, &j| rho[(i, i)].re.total_cmp(&rho[(j, j)].re))
                .unwrap_or(0);
            prolong(basis, psi, qn.basis(), mode)
        });
        let eig_opts = EigenOptions {
            tol: opts.eig_tol,
            max_iter: opts.max_iter,
            krylov_dim: opts.krylov_dim,
            seed: opts.seed.wrapping_add(n as u64),
            start,
        };
        let pair = lanczos_max(&qn, &eig_opts).map_err(|e| match e {
            Error::NonConvergence { best_residual, best_value, iterations, .. } => {
                Error::NonConvergence { level: Some(n), best_residual, best_value, iterations }
            }
            other => other,
        })?;
        if let Some(prev) = levels.last() {
            if pair.value > prev.mu + MONOTONE_SLACK {
                return Err(Error::MonotonicityViolation { prev_n: prev.n, n, prev_mu: prev.mu, mu: pair.value });
            }
        }
        levels.push(LevelResult {
            n,
            dim: qn.dim(),
            mu: pair.value,
            psi: pair.vector.clone(),
            iterations: pair.iterations,
            residual: pair.residual,
            diagonals: qn.diagonal_offsets().len(),
            nnz: qn.nnz(),
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        previous = Some((qn.basis().clone(), pair.vector));
    }
    PuritySequence::new(levels)
}
