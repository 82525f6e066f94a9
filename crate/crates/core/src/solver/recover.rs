use crate::channel::DensityMatrix;
use crate::error::{Error, Result};
use crate::lift::OccupationBasis;
use crate::linalg::{c64, norm, ComplexMatrix};

/// One-body reduced state of a symmetric `N`-copy pure state given by its
/// occupation-basis amplitudes `c`:
///
/// `ρ_ab = (1/N) Σ_{[m]: m_a ≥ 1} conj(c_{[m]−e_a+e_b}) c_{[m]} sqrt(m_a (m_b + 1 − δ_ab))`,
///
/// which is `⟨ψ| a_b† a_a |ψ⟩ / N` in second quantisation.
pub fn recover_state(basis: &OccupationBasis, psi: &[c64]) -> Result<DensityMatrix> {
    let rho = reduced_matrix(basis, psi)?;
    DensityMatrix::new(rho)
}

/// Same as [`recover_state`] without the final validation.
pub fn reduced_matrix(basis: &OccupationBasis, psi: &[c64]) -> Result<ComplexMatrix> {
    if psi.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "amplitude vector has length {}, basis has {}",
            psi.len(),
            basis.len()
        )));
    }
    let total = basis.copies();
    if total == 0 {
        return Err(Error::InvalidParameter("reduced state needs at least one copy".into()));
    }
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("amplitude vector has norm {nrm}, expected 1")));
    }
    let d = basis.dim();
    let mut rho = ComplexMatrix::zeros(d, d);
    let mut target = vec![0u32; d];
    for (pos, m) in basis.iter().enumerate() {
        let cm = psi[pos];
        if cm == c64::new(0.0, 0.0) {
            continue;
        }
        for a in 0..d {
            if m[a] == 0 {
                continue;
            }
            for b in 0..d {
                target.copy_from_slice(m);
                target[a] -= 1;
                target[b] += 1;
                let t = basis.position(&target).expect("hop stays in the basis");
                let weight = if a == b { m[a] as f64 } else { (m[a] as f64 * (m[b] as f64 + 1.0)).sqrt() };
                rho[(a, b)] += psi[t].conj() * cm * weight;
            }
        }
    }
    Ok(rho.scale(1.0 / total as f64))
}
