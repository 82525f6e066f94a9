//! Small dense helpers shared by the rest of the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

#[allow(non_camel_case_types)]
pub type c64 = Complex64;

/// Dense complex matrix used for every operator in the crate.
pub type ComplexMatrix = DMatrix<c64>;

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// The input is symmetrised as `(M + M†)/2` first, so tiny anti-Hermitian
/// round-off does not leak into the spectrum.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), ComplexMatrix::zeros(0, 0));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix) -> Vec<f64> {
    eigh(m).0
}

/// Largest eigenvalue of a Hermitian matrix with its eigenvector.
pub fn max_eigh(m: &ComplexMatrix) -> (f64, DVector<c64>) {
    let (vals, vecs) = eigh(m);
    let last = vals.len() - 1;
    (vals[last], vecs.column(last).into_owned())
}

/// `max |M_ij − conj(M_ji)|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Entry-wise maximum absolute difference.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &ComplexMatrix) -> f64 {
    eigvalsh(m).into_iter().map(f64::abs).fold(0.0, f64::max)
}

pub fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `M^k` for `k ≥ 1` by repeated multiplication (k is tiny here).
pub fn matrix_power(m: &ComplexMatrix, k: u32) -> ComplexMatrix {
    assert!(k >= 1);
    let mut out = m.clone();
    for _ in 1..k {
        out = &out * m;
    }
    out
}

/// `Tr[M^k]`.
pub fn trace_power(m: &ComplexMatrix, k: u32) -> c64 {
    matrix_power(m, k).trace()
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Matrix unit `E_ab`.
pub fn matrix_unit(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d, d);
    e[(a, b)] = c64::new(1.0, 0.0);
    e
}

/// Pauli matrices `X, Y, Z`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let o = c64::new(0.0, 0.0);
    let l = c64::new(1.0, 0.0);
    let i = c64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        ComplexMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        ComplexMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// Euclidean inner product `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[c64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y ← y + α x`.
pub fn axpy(alpha: c64, x: &[c64], y: &mut [c64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: c64, x: &mut [c64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending_and_reconstructs() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64::new(2.0, 0.0), c64::new(0.0, 1.0), c64::new(0.0, -1.0), c64::new(2.0, 0.0)],
        );
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            2,
            vals.iter().map(|&v| c64::new(v, 0.0)),
        ));
        let back = &vecs * diag * vecs.adjoint();
        assert!(max_abs_diff(&back, &m) < 1e-14);
    }

    #[test]
    fn paulis_square_to_identity() {
        for p in paulis() {
            assert!(max_abs_diff(&(&p * &p), &identity(2)) < 1e-15);
            assert_eq!(hermiticity_defect(&p), 0.0);
        }
    }
}
