use itertools::Itertools;

use super::occupation::{multinomial_f64, occupation_of, OccupationBasis};
use crate::channel::ChoiMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c64, hermiticity_defect, ComplexMatrix};

/// Largest `d^q` for which `A` is materialised.
pub const MAX_LIFT_DIM: usize = 4096;
/// Largest `q` for which the `q!`-term symmetrisation is enumerated.
pub const MAX_SYMMETRIZE_Q: u32 = 6;

/// Operator on `(C^d)^⊗q` with `Tr[A ρ^⊗q] = Tr[Φ(ρ)^q]`.
///
/// Composite indices are integers whose base-`d` digits are `(i_1, …, i_q)`,
/// most significant first, so `A ⊗ I` in the usual Kronecker layout acts on
/// the leading factors.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedOperator {
    pub q: u32,
    pub d: usize,
    pub entries: ComplexMatrix,
}

impl LiftedOperator {
    pub fn new(q: u32, d: usize, entries: ComplexMatrix) -> Result<Self> {
        let size = checked_pow(d, q)?;
        if entries.nrows() != size || entries.ncols() != size {
            return Err(Error::DimensionMismatch(format!(
                "lifted operator for d = {d}, q = {q} must be {size}×{size}, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { q, d, entries })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// `Tr[A X^⊗q]` for a `d × d` matrix `X`.
    pub fn expectation_power(&self, x: &ComplexMatrix) -> c64 {
        let mut power = x.clone();
        for _ in 1..self.q {
            power = power.kronecker(x);
        }
        (&self.entries * power).trace()
    }
}

fn checked_pow(d: usize, q: u32) -> Result<usize> {
    d.checked_pow(q)
        .ok_or_else(|| Error::Overflow(format!("{d}^{q}")))
}

/// Base-`d` digits of `index`, most significant first.
fn digits(mut index: usize, d: usize, len: usize, out: &mut [usize]) {
    for slot in out[..len].iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Builds `A` from the Choi blocks:
/// `A_{(r),(c)} = Tr[block(c_1, r_1) ⋯ block(c_q, r_q)]`, where
/// `block(a, b) = Φ(E_ab)`. Expanding `ρ = Σ ρ_ab E_ab` in every factor of
/// `Tr[Φ(ρ)^q]` gives exactly `Tr[A ρ^⊗q]`.
pub fn build_a(choi: &ChoiMatrix, q: u32) -> Result<LiftedOperator> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("lifted operator needs q ≥ 2, got {q}")));
    }
    let d = choi.dim();
    let size = checked_pow(d, q)?;
    if size > MAX_LIFT_DIM {
        return Err(Error::CapExceeded { what: "d^q", size, cap: MAX_LIFT_DIM });
    }
    let q = q as usize;
    let mut entries = ComplexMatrix::zeros(size, size);
    let mut row = vec![0usize; q];
    let mut col = vec![0usize; q];
    for r in 0..size {
        digits(r, d, q, &mut row);
        for c in 0..size {
            digits(c, d, q, &mut col);
            let mut prod = choi.block(col[0], row[0]).clone();
            for t in 1..q {
                prod *= choi.block(col[t], row[t]);
            }
            entries[(r, c)] = prod.trace();
        }
    }
    LiftedOperator::new(q as u32, d, entries)
}

/// Symmetric part `(1/q!) Σ_π P_π† A P_π`.
pub fn symmetrize(a: &LiftedOperator) -> Result<LiftedOperator> {
    if a.q > MAX_SYMMETRIZE_Q {
        return Err(Error::CapExceeded { what: "q for symmetrisation", size: a.q as usize, cap: MAX_SYMMETRIZE_Q as usize });
    }
    let (d, q, size) = (a.d, a.q as usize, a.size());
    let perms: Vec<Vec<usize>> = (0..q).permutations(q).collect();
    // permuted[p][i] is the composite index with digits (i_{π(1)}, …, i_{π(q)})
    let mut digit_buf = vec![0usize; q];
    let permuted: Vec<Vec<usize>> = perms
        .iter()
        .map(|perm| {
            (0..size)
                .map(|i| {
                    digits(i, d, q, &mut digit_buf);
                    perm.iter().fold(0usize, |acc, &t| acc * d + digit_buf[t])
                })
                .collect()
        })
        .collect();
    let weight = 1.0 / perms.len() as f64;
    let entries = ComplexMatrix::from_fn(size, size, |r, c| {
        let sum: c64 = permuted.iter().map(|map| a.entries[(map[r], map[c])]).sum();
        sum * weight
    });
    LiftedOperator::new(a.q, d, entries)
}

/// `B = P_q† A P_q` in the occupation basis of `q` copies.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedOperator {
    pub q: u32,
    pub d: usize,
    pub basis: OccupationBasis,
    pub entries: ComplexMatrix,
}

impl CompressedOperator {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    /// Builds a compressed operator directly from its matrix in the canonical
    /// occupation basis of `q` copies of `C^d`.
    pub fn from_matrix(q: u32, d: usize, entries: ComplexMatrix) -> Result<Self> {
        let basis = OccupationBasis::new(d, q as usize)?;
        if entries.nrows() != basis.len() || entries.ncols() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "compressed operator for d = {d}, q = {q} must be {0}×{0}",
                basis.len()
            )));
        }
        Ok(Self { q, d, basis, entries })
    }
}

/// `B_{[u],[v]} = (C^q_{[u]} C^q_{[v]})^{-1/2} Σ { A_{(i),(j)} : #(i) = [u], #(j) = [v] }`.
pub fn compress(a: &LiftedOperator) -> Result<CompressedOperator> {
    let (d, q) = (a.d, a.q as usize);
    let basis = OccupationBasis::new(d, q)?;
    let classes: Vec<usize> = (0..a.size())
        .map(|i| basis.position(&occupation_of(i, d, q)).expect("every index has an occupation class"))
        .collect();
    let s = basis.len();
    let mut entries = ComplexMatrix::zeros(s, s);
    for (r, &u) in classes.iter().enumerate() {
        for (c, &v) in classes.iter().enumerate() {
            entries[(u, v)] += a.entries[(r, c)];
        }
    }
    let norms: Vec<f64> = basis.iter().map(|k| multinomial_f64(k).sqrt()).collect();
    for u in 0..s {
        for v in 0..s {
            entries[(u, v)] /= norms[u] * norms[v];
        }
    }
    Ok(CompressedOperator { q: a.q, d, basis, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi_of, make_depolarizing, make_random_channel, DensityMatrix, QuantumChannel};
    use crate::linalg::{identity, max_abs_diff};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn swap2() -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            s[(r, c)] = c64::new(1.0, 0.0);
        }
        s
    }

    #[test]
    fn identity_channel_gives_swap() {
        let a = build_a(&choi_of(&QuantumChannel::identity(2)), 2).unwrap();
        assert!(max_abs_diff(&a.entries, &swap2()) < 1e-15);
    }

    #[test]
    fn completely_depolarizing_gives_half_identity() {
        let a = build_a(&choi_of(&make_depolarizing(2, 0.0).unwrap()), 2).unwrap();
        assert!(max_abs_diff(&a.entries, &identity(4).scale(0.5)) < 1e-15);
    }

    #[test]
    fn half_depolarizing_reproduces_pure_purity() {
        let ch = make_depolarizing(2, 0.5).unwrap();
        let a = build_a(&choi_of(&ch), 2).unwrap();
        let ket0 = DensityMatrix::new(crate::linalg::matrix_unit(2, 0, 0)).unwrap();
        // oracle: Tr[Φ(|0⟩⟨0|)²] straight from the Kraus form
        let direct = ch.output_purity(ket0.matrix(), 2);
        assert!((direct - 0.625).abs() < 1e-15);
        assert!((a.expectation_power(ket0.matrix()).re - direct).abs() < 1e-14);
    }

    #[test]
    fn reproduction_identity_for_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (d, q, seed) in [(2, 2, 1), (2, 3, 2), (3, 2, 3), (3, 3, 4), (2, 4, 5)] {
            let ch = make_random_channel(d, 3, seed).unwrap();
            let a = build_a(&choi_of(&ch), q).unwrap();
            for _ in 0..20 {
                let rho = DensityMatrix::random(d, &mut rng);
                let lifted = a.expectation_power(rho.matrix());
                let direct = ch.output_purity(rho.matrix(), q);
                assert!((lifted.re - direct).abs() <= 1e-10 && lifted.im.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn q2_lift_is_hermitian_and_symmetric() {
        let a = build_a(&choi_of(&make_random_channel(3, 2, 8).unwrap()), 2).unwrap();
        assert!(hermiticity_defect(&a.entries) < 1e-14);
        assert!(max_abs_diff(&symmetrize(&a).unwrap().entries, &a.entries) < 1e-14);
    }

    #[test]
    fn build_a_guards() {
        let choi = choi_of(&QuantumChannel::identity(2));
        assert!(build_a(&choi, 1).is_err());
        assert!(matches!(build_a(&choi, 13), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn symmetrize_matches_explicit_permutation_average() {
        let a = build_a(&choi_of(&make_random_channel(2, 3, 12).unwrap()), 3).unwrap();
        let sym = symmetrize(&a).unwrap();
        assert!(hermiticity_defect(&sym.entries) < 1e-12);
        // oracle: explicit permutation matrices for all 6 elements of S_3
        let mut avg = ComplexMatrix::zeros(8, 8);
        for perm in (0..3).permutations(3) {
            let mut p = ComplexMatrix::zeros(8, 8);
            for i in 0..8usize {
                let bits = [(i >> 2) & 1, (i >> 1) & 1, i & 1];
                let j = perm.iter().fold(0, |acc, &t| acc * 2 + bits[t]);
                p[(i, j)] = c64::new(1.0, 0.0);
            }
            avg += p.adjoint() * &a.entries * &p;
        }
        avg /= c64::new(6.0, 0.0);
        assert!(max_abs_diff(&avg, &sym.entries) < 1e-14);
        assert!(max_abs_diff(&symmetrize(&sym).unwrap().entries, &sym.entries) < 1e-13);
    }

    #[test]
    fn compress_known_cases() {
        let swap = LiftedOperator::new(2, 2, swap2()).unwrap();
        let b = compress(&swap).unwrap();
        assert!(max_abs_diff(&b.entries, &identity(3)) < 1e-15);

        let half = LiftedOperator::new(2, 2, identity(4).scale(0.5)).unwrap();
        assert!(max_abs_diff(&compress(&half).unwrap().entries, &identity(3).scale(0.5)) < 1e-15);
    }

    #[test]
    fn compress_only_sees_symmetric_part() {
        let a = build_a(&choi_of(&make_random_channel(2, 4, 30).unwrap()), 3).unwrap();
        let b = compress(&a).unwrap();
        let bs = compress(&symmetrize(&a).unwrap()).unwrap();
        assert!(max_abs_diff(&b.entries, &bs.entries) < 1e-12);
        assert!(bs.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn lifted_operator_shape_checked() {
        assert!(LiftedOperator::new(2, 2, identity(3)).is_err());
        assert!(CompressedOperator::from_matrix(2, 2, identity(4)).is_err());
    }
}
