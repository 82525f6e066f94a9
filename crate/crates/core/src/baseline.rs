//! Independent oracles: multi-start local ascent over pure states, an
//! exhaustive Bloch-sphere scan for qubits, and a dense construction of the
//! symmetric-subspace compression.
//!
//! None of these share code paths with the sparse solver beyond the channel
//! itself, which is what makes them useful as certificates.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{gaussian, QuantumChannel};
use crate::error::{Error, Result};
use crate::lift::{multinomial_f64, occupation_of, LiftedOperator, OccupationBasis};
use crate::linalg::{c64, identity, matrix_power, paulis, ComplexMatrix};

/// Largest `d^(q+n)` the dense oracle will materialise.
pub const MAX_DENSE_DIM: usize = 4096;
/// Ascent stops once a step gains less than this.
pub const ASCENT_GAIN_TOL: f64 = 1e-14;
pub const ASCENT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    /// Best `Tr[Φ(|ψ⟩⟨ψ|)^q]` found.
    pub value: f64,
    /// Input achieving `value`, as `(re, im)` amplitudes.
    pub psi: Vec<[f64; 2]>,
    pub restarts_used: usize,
    /// Fraction of restarts that stopped on the gain criterion rather than
    /// the iteration cap.
    pub converged_fraction: f64,
}

impl SearchResult {
    pub fn psi_vector(&self) -> DVector<c64> {
        DVector::from_iterator(self.psi.len(), self.psi.iter().map(|&[re, im]| c64::new(re, im)))
    }
}

/// `G = q Φ*(Φ(|ψ⟩⟨ψ|)^{q−1})`, so that the derivative of
/// `ψ ↦ Tr[Φ(ψψ†)^q]` along `δ` is `2 Re⟨δ|G|ψ⟩`.
pub fn gradient_operator(channel: &QuantumChannel, psi: &DVector<c64>, q: u32) -> ComplexMatrix {
    let d = channel.dim();
    let out = channel.apply_matrix(&(psi * psi.adjoint()));
    let inner = if q >= 2 { matrix_power(&out, q - 1) } else { identity(d) };
    channel.apply_adjoint(&inner).scale(q as f64)
}

fn random_unit<R: rand::Rng>(d: usize, rng: &mut R) -> DVector<c64> {
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / c64::new(n, 0.0)
}

/// Fixed-point ascent `ψ ← normalize(G ψ)` from `start` until the gain drops
/// below [`ASCENT_GAIN_TOL`] or `max_iter` steps. Returns the final state,
/// its value and whether the gain criterion fired.
pub fn ascend(channel: &QuantumChannel, q: u32, start: DVector<c64>, max_iter: usize) -> (DVector<c64>, f64, bool) {
    let mut psi = start;
    let mut value = channel.pure_output_purity(&psi, q);
    for _ in 0..max_iter {
        let g = gradient_operator(channel, &psi, q);
        let next = &g * &psi;
        let n = next.norm();
        if n == 0.0 {
            return (psi, value, true);
        }
        let next = next / c64::new(n, 0.0);
        let next_value = channel.pure_output_purity(&next, q);
        let gain = next_value - value;
        if next_value >= value {
            psi = next;
            value = next_value;
        }
        if gain < ASCENT_GAIN_TOL {
            return (psi, value, true);
        }
    }
    (psi, value, false)
}

/// Multi-start projected ascent over pure inputs.
pub fn local_search(channel: &QuantumChannel, q: u32, restarts: usize, seed: u64) -> Result<SearchResult> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("local search needs at least one restart".into()));
    }
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(DVector<c64>, f64)> = None;
    let mut converged = 0usize;
    for _ in 0..restarts {
        let start = random_unit(channel.dim(), &mut rng);
        let (psi, value, ok) = ascend(channel, q, start, ASCENT_MAX_ITER);
        converged += ok as usize;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((psi, value));
        }
    }
    let (psi, value) = best.expect("at least one restart");
    Ok(SearchResult {
        value,
        psi: psi.iter().map(|z| [z.re, z.im]).collect(),
        restarts_used: restarts,
        converged_fraction: converged as f64 / restarts as f64,
    })
}

/// Grid maximum together with an upper estimate from local curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBracket {
    pub value: f64,
    pub upper: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Affine Bloch-vector map `s = M r + t` of a qubit channel.
fn bloch_map(channel: &QuantumChannel) -> ([[f64; 3]; 3], [f64; 3]) {
    let sig = paulis();
    let bloch = |m: &ComplexMatrix| -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, s) in out.iter_mut().zip(&sig) {
            *o = (s * m).trace().re;
        }
        out
    };
    let t = bloch(&channel.apply_matrix(&identity(2).scale(0.5)));
    let mut m = [[0.0; 3]; 3];
    for (j, s) in sig.iter().enumerate() {
        let col = bloch(&channel.apply_matrix(&s.scale(0.5)));
        for i in 0..3 {
            m[i][j] = col[i];
        }
    }
    (m, t)
}

/// Max of `Tr[Φ(ψ(θ, φ))^q]` over `resolution²` pure qubit states with
/// `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
///
/// Evaluates through the output Bloch vector `s`, whose eigenvalues
/// `(1 ± |s|)/2` give the purity in closed form. The upper end of the
/// bracket adds `κ/2 · (Δ/2)²` per axis with `κ` the measured second
/// difference at the grid maximum, doubled.
pub fn bloch_grid_oracle(channel: &QuantumChannel, q: u32, resolution: usize) -> Result<GridBracket> {
    if channel.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "Bloch grid oracle needs a qubit channel, got d = {}",
            channel.dim()
        )));
    }
    if resolution < 3 {
        return Err(Error::InvalidParameter("grid resolution must be at least 3".into()));
    }
    let (m, t) = bloch_map(channel);
    let qf = q as i32;
    let value_at = |theta: f64, phi: f64| -> f64 {
        let r = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let mut s2 = 0.0;
        for i in 0..3 {
            let si = m[i][0] * r[0] + m[i][1] * r[1] + m[i][2] * r[2] + t[i];
            s2 += si * si;
        }
        let s = s2.sqrt();
        ((1.0 + s) / 2.0).powi(qf) + ((1.0 - s) / 2.0).powi(qf)
    };
    let dtheta = std::f64::consts::PI / (resolution - 1) as f64;
    let dphi = std::f64::consts::TAU / resolution as f64;
    let (mut best, mut ba, mut bb) = (f64::NEG_INFINITY, 0usize, 0usize);
    for a in 0..resolution {
        let theta = a as f64 * dtheta;
        for b in 0..resolution {
            let v = value_at(theta, b as f64 * dphi);
            if v > best {
                (best, ba, bb) = (v, a, b);
            }
        }
    }
    let f = |a: isize, b: isize| value_at(a as f64 * dtheta, b as f64 * dphi);
    let (a, b) = (ba as isize, bb as isize);
    let a_mid = a.clamp(1, resolution as isize - 2);
    let k_theta = (f(a_mid + 1, b) + f(a_mid - 1, b) - 2.0 * f(a_mid, b)).abs() / (dtheta * dtheta);
    let k_phi = (f(a, b + 1) + f(a, b - 1) - 2.0 * f(a, b)).abs() / (dphi * dphi);
    let slack = k_theta * (dtheta / 2.0).powi(2) + k_phi * (dphi / 2.0).powi(2);
    Ok(GridBracket {
        value: best,
        upper: best + slack,
        theta: ba as f64 * dtheta,
        phi: bb as f64 * dphi,
    })
}

/// `P_n`: the `d^n × S(d, n)` isometry with `(P_n)_{(i),[k]} = δ_{#(i),[k]} (C^n_{[k]})^{-1/2}`,
/// built one column at a time.
pub fn dense_isometry(d: usize, n: usize) -> Result<ComplexMatrix> {
    let rows = d.checked_pow(n as u32).ok_or_else(|| Error::Overflow(format!("{d}^{n}")))?;
    if rows > MAX_DENSE_DIM {
        return Err(Error::CapExceeded { what: "d^n", size: rows, cap: MAX_DENSE_DIM });
    }
    let basis = OccupationBasis::new(d, n)?;
    let mut p = ComplexMatrix::zeros(rows, basis.len());
    for (col, k) in basis.iter().enumerate() {
        let c = c64::new(1.0 / multinomial_f64(k).sqrt(), 0.0);
        for i in 0..rows {
            if occupation_of(i, d, n) == k {
                p[(i, col)] = c;
            }
        }
    }
    Ok(p)
}

/// `P_{q+n}† (A ⊗ I^⊗n) P_{q+n}` formed densely.
pub fn dense_lift_oracle(a: &LiftedOperator, n: usize) -> Result<ComplexMatrix> {
    let total = a.q as usize + n;
    let size = a.d.checked_pow(total as u32).ok_or_else(|| Error::Overflow(format!("{}^{total}", a.d)))?;
    if size > MAX_DENSE_DIM {
        return Err(Error::CapExceeded { what: "d^(q+n)", size, cap: MAX_DENSE_DIM });
    }
    let pad = a.d.pow(n as u32);
    let big = a.entries.kronecker(&identity(pad));
    let p = dense_isometry(a.d, total)?;
    Ok(p.adjoint() * big * p)
}
