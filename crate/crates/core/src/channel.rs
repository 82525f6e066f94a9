//! Quantum channels in Kraus form, their Choi matrices and density matrices.

use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    all_finite, c64, eigvalsh, hermitian_norm, hermiticity_defect, identity, matrix_unit, ComplexMatrix,
};

/// Trace-preservation tolerance on `‖Σ K†K − I‖`.
pub const TP_TOL: f64 = 1e-10;
/// Hermiticity tolerance (max entry-wise defect).
pub const HERM_TOL: f64 = 1e-10;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Lowest admissible eigenvalue is `-PSD_TOL`.
pub const PSD_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map on `d × d` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    d: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Spectral norm of `Σ K†K − I`.
pub fn trace_preservation_deviation(kraus: &[ComplexMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let d = first.nrows();
    let mut sum = -identity(d);
    for k in kraus {
        sum += k.adjoint() * k;
    }
    hermitian_norm(&sum)
}

/// Checks shapes, finiteness and trace preservation, returning a channel.
pub fn validate_channel(kraus: Vec<ComplexMatrix>) -> Result<QuantumChannel> {
    let Some(first) = kraus.first() else {
        return Err(Error::InvalidParameter("channel needs at least one Kraus operator".into()));
    };
    let d = first.nrows();
    if d == 0 {
        return Err(Error::DimensionMismatch("Kraus operators must be at least 1×1".into()));
    }
    for (m, k) in kraus.iter().enumerate() {
        if k.nrows() != d || k.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {m} is {}×{}, expected {d}×{d}",
                k.nrows(),
                k.ncols()
            )));
        }
        if !all_finite(k) {
            return Err(Error::NonFinite(format!("Kraus operator {m}")));
        }
    }
    let deviation = trace_preservation_deviation(&kraus);
    if deviation.is_nan() || deviation > TP_TOL {
        return Err(Error::NotTracePreserving { deviation, tolerance: TP_TOL });
    }
    Ok(QuantumChannel { d, kraus })
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        validate_channel(kraus)
    }

    pub fn identity(d: usize) -> Self {
        Self { d, kraus: vec![identity(d)] }
    }

    /// Single-Kraus channel `ρ ↦ U ρ U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        validate_channel(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ_m K_m X K_m†` for an arbitrary `d × d` matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Adjoint map `Σ_m K_m† Y K_m`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on dimension {}, state has dimension {}",
                self.d,
                rho.dim()
            )));
        }
        let out = self.apply_matrix(rho.matrix());
        DensityMatrix::new(out)
    }

    /// `Tr[Φ(ρ)^q]` for a (not re-validated) operator `ρ`.
    pub fn output_purity(&self, rho: &ComplexMatrix, q: u32) -> f64 {
        crate::linalg::trace_power(&self.apply_matrix(rho), q).re
    }

    /// `Tr[Φ(|ψ⟩⟨ψ|)^q]` for a unit vector.
    pub fn pure_output_purity(&self, psi: &DVector<c64>, q: u32) -> f64 {
        self.output_purity(&(psi * psi.adjoint()), q)
    }
}

/// `ρ ↦ p ρ + (1 − p) I/d`, written with the Weyl (clock-and-shift) basis.
pub fn make_depolarizing(d: usize, p: f64) -> Result<QuantumChannel> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("depolarizing parameter p = {p} outside [0, 1]")));
    }
    let d2 = (d * d) as f64;
    let mut kraus = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let weight = if a == 0 && b == 0 { p + (1.0 - p) / d2 } else { (1.0 - p) / d2 };
            if weight > 0.0 {
                kraus.push(weyl(d, a, b).scale(weight.sqrt()));
            }
        }
    }
    validate_channel(kraus)
}

/// `X^a Z^b` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j |j⟩`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = std::f64::consts::TAU / d as f64;
    let mut w = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        w[((j + a) % d, j)] = c64::from_polar(1.0, omega * (b * j) as f64);
    }
    w
}

/// Kraus operators cut from a random isometry `C^d → C^{k d}`.
///
/// The isometry is the thin-QR orthonormalisation of an i.i.d. complex
/// Gaussian `(k d) × d` matrix drawn from a ChaCha stream keyed by `seed`.
pub fn make_random_channel(d: usize, k: usize, seed: u64) -> Result<QuantumChannel> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("random channel needs d ≥ 2, got {d}")));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("random channel needs k ≥ 1 Kraus operators".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(k * d, d, |_, _| gaussian(&mut rng));
    let q = g.qr().q();
    let kraus = (0..k).map(|m| q.rows(m * d, d).into_owned()).collect();
    validate_channel(kraus)
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> c64 {
    c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Choi representation: block `(a, b)` is `Φ(E_ab)`.
///
/// With this layout `Φ(ρ) = Σ_ab ρ_ab · block(a, b)` and the assembled
/// matrix is `Σ_ab E_ab ⊗ Φ(E_ab)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d: usize,
    blocks: Vec<ComplexMatrix>,
}

pub fn choi_of(channel: &QuantumChannel) -> ChoiMatrix {
    let d = channel.dim();
    let mut blocks = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            blocks.push(channel.apply_matrix(&matrix_unit(d, a, b)));
        }
    }
    ChoiMatrix { d, blocks }
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn block(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.blocks[a * self.d + b]
    }

    /// The `d² × d²` matrix with block `(a, b)` in block-row `a`, block-column `b`.
    pub fn assemble(&self) -> ComplexMatrix {
        let d = self.d;
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                out.view_mut((a * d, b * d), (d, d)).copy_from(self.block(a, b));
            }
        }
        out
    }

    /// `Φ(X) = Σ_ab X_ab · block(a, b)`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = self.d;
        let mut out = ComplexMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                out += self.block(a, b) * x[(a, b)];
            }
        }
        out
    }

    /// `Σ_a block(a, a) = Φ(I)`; equals `Σ K K†`, and its trace is `d` for a
    /// trace-preserving map.
    pub fn diagonal_block_sum(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for a in 0..self.d {
            out += self.block(a, a);
        }
        out
    }

    /// Partial trace over the output factor: entry `(a, b)` is `Tr block(a, b)`.
    /// Equals the identity for a trace-preserving map.
    pub fn output_partial_trace(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.d, self.d, |a, b| self.block(a, b).trace())
    }
}

/// Unit-trace positive semidefinite `d × d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, trace and positivity, then stores the
    /// Hermitian part.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square and non-empty, got {}×{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if !all_finite(&rho) {
            return Err(Error::NonFinite("density matrix".into()));
        }
        let herm = hermiticity_defect(&rho);
        if herm > HERM_TOL {
            return Err(Error::InvalidParameter(format!("density matrix not Hermitian (defect {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - c64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} ≠ 1")));
        }
        let rho = (&rho + rho.adjoint()).scale(0.5);
        let min = eigvalsh(&rho)[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` after normalising `ψ`.
    pub fn pure(psi: &DVector<c64>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("pure state needs a non-zero finite vector".into()));
        }
        let v = psi / c64::new(n, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { rho: identity(d).scale(1.0 / d as f64) }
    }

    /// Random full-rank state `G G† / Tr[G G†]` with `G` complex Ginibre.
    pub fn random<R: Rng>(d: usize, rng: &mut R) -> Self {
        let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        Self { rho: m.scale(1.0 / tr) }
    }

    /// Haar-random pure state.
    pub fn random_pure<R: Rng>(d: usize, rng: &mut R) -> Self {
        let v = DVector::from_fn(d, |_, _| gaussian(rng));
        Self::pure(&v).expect("Gaussian vector is non-zero")
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.rho)
    }
}

/// On-disk channel description:
/// `{"d": 2, "kraus": [[[[re, im], ...], ...], ...]}` with each Kraus
/// operator given as a list of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub d: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelFile {
    pub fn from_channel(channel: &QuantumChannel) -> Self {
        let kraus = channel
            .kraus()
            .iter()
            .map(|k| {
                (0..k.nrows())
                    .map(|r| (0..k.ncols()).map(|c| [k[(r, c)].re, k[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self { d: channel.dim(), kraus }
    }

    /// Shape checks naming the offending matrix; does not test trace
    /// preservation.
    pub fn to_kraus(&self) -> Result<Vec<ComplexMatrix>> {
        let d = self.d;
        if d == 0 {
            return Err(Error::Parse("\"d\" must be positive".into()));
        }
        if self.kraus.is_empty() {
            return Err(Error::Parse("\"kraus\" must contain at least one matrix".into()));
        }
        self.kraus
            .iter()
            .enumerate()
            .map(|(m, rows)| {
                if rows.len() != d {
                    return Err(Error::Parse(format!(
                        "Kraus matrix {m} has {} rows, expected {d}",
                        rows.len()
                    )));
                }
                if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != d) {
                    return Err(Error::Parse(format!(
                        "Kraus matrix {m} is not square: row {r} has {} entries, expected {d}",
                        row.len()
                    )));
                }
                let mat = ComplexMatrix::from_fn(d, d, |r, c| c64::new(rows[r][c][0], rows[r][c][1]));
                if !all_finite(&mat) {
                    return Err(Error::Parse(format!("Kraus matrix {m} has non-finite entries")));
                }
                Ok(mat)
            })
            .collect()
    }
}

/// Parses and validates a channel from JSON text.
pub fn channel_from_json(text: &str) -> Result<QuantumChannel> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    validate_channel(file.to_kraus()?)
}

pub fn channel_to_json(channel: &QuantumChannel) -> String {
    serde_json::to_string_pretty(&ChannelFile::from_channel(channel)).expect("channel serialises")
}

pub fn read_channel(path: &Path) -> Result<QuantumChannel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    channel_from_json(&text)
}
