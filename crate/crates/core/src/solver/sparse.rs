use std::collections::BTreeSet;

use crate::error::Result;
use crate::lift::{multinomial_f64, CompressedOperator, OccupationBasis};
use crate::linalg::{c64, ComplexMatrix};

/// Anything that can apply a Hermitian matrix to a vector.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    /// `y ← Q x`
    fn apply(&self, x: &[c64], y: &mut [c64]);
}

impl HermitianOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[c64], y: &mut [c64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Row-compressed Hermitian matrix over an occupation basis, both triangles
/// stored.
#[derive(Debug, Clone)]
pub struct SparseHermitian {
    basis: OccupationBasis,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<c64>,
    /// Occupation shifts `[l] − [k]` that carry a non-zero entry.
    profile: BTreeSet<Vec<i64>>,
}

impl SparseHermitian {
    pub fn basis(&self) -> &OccupationBasis {
        &self.basis
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn profile(&self) -> &BTreeSet<Vec<i64>> {
        &self.profile
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> c64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(i) => self.vals[span.start + i],
            Err(_) => c64::new(0.0, 0.0),
        }
    }

    /// Distinct `column − row` offsets present.
    pub fn diagonal_offsets(&self) -> BTreeSet<isize> {
        (0..HermitianOperator::dim(self))
            .flat_map(|r| self.row(r).map(move |(c, _)| c as isize - r as isize))
            .collect()
    }

    /// `max |Q_rc − conj(Q_cr)|` over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        (0..HermitianOperator::dim(self))
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = HermitianOperator::dim(self);
        let mut m = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

impl HermitianOperator for SparseHermitian {
    fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn apply(&self, x: &[c64], y: &mut [c64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *yr = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, v)| v * x[c])
                .sum();
        }
    }
}

/// `(m + 1)(m + 2) ⋯ (m + r)`.
fn rising(m: u32, r: u32) -> f64 {
    (1..=r).map(|t| (m + t) as f64).product()
}

/// Level operator `Q_n = P_{q+n}† (A ⊗ I^⊗n) P_{q+n}` assembled from the
/// compression `B = P_q† A P_q`:
///
/// `Q_{[k],[l]} = Σ_{[u],[v]} C^n_{[k]−[u]} δ_{[k]−[u],[l]−[v]} (C^q_{[u]} C^q_{[v]})^{1/2}
///                (C^{q+n}_{[k]} C^{q+n}_{[l]})^{-1/2} B_{[u],[v]}`.
///
/// With `[m] = [k] − [u]` the multinomial ratio collapses to
/// `sqrt(Π_j rise(m_j, u_j) · rise(m_j, v_j)) / rise(n, q)`, a product of at
/// most `3q` small factors, so nothing overflows for any `n`.
pub fn assemble_qn(b: &CompressedOperator, n: usize) -> Result<SparseHermitian> {
    let (d, q) = (b.d, b.q);
    let total = q as usize + n;
    let basis = OccupationBasis::new(d, total)?;
    let small = &b.basis;
    let herm = (&b.entries + b.entries.adjoint()).scale(0.5);
    let sqrt_c: Vec<f64> = small.iter().map(|u| multinomial_f64(u).sqrt()).collect();
    let denom = rising(n as u32, q);

    let mut row_ptr = Vec::with_capacity(basis.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut profile = BTreeSet::new();
    let mut row_buf: Vec<(usize, c64)> = Vec::new();
    let mut m = vec![0u32; d];
    let mut l = vec![0u32; d];
    row_ptr.push(0);
    for k in basis.iter() {
        row_buf.clear();
        for (ui, u) in small.iter().enumerate() {
            if k.iter().zip(u).any(|(kj, uj)| kj < uj) {
                continue;
            }
            let mut up = 1.0;
            for j in 0..d {
                m[j] = k[j] - u[j];
                up *= rising(m[j], u[j]);
            }
            for (vi, v) in small.iter().enumerate() {
                let bv = herm[(ui, vi)];
                if bv == c64::new(0.0, 0.0) {
                    continue;
                }
                let mut vp = 1.0;
                for j in 0..d {
                    l[j] = m[j] + v[j];
                    vp *= rising(m[j], v[j]);
                }
                let col = basis.position(&l).expect("shifted occupation stays in the level basis");
                let coeff = sqrt_c[ui] * sqrt_c[vi] * (up * vp).sqrt() / denom;
                row_buf.push((col, bv * coeff));
                profile.insert(shift(u, v));
            }
        }
        row_buf.sort_by_key(|&(c, _)| c);
        let mut iter = row_buf.iter().copied().peekable();
        while let Some((c, mut v)) = iter.next() {
            while let Some(&(c2, v2)) = iter.peek() {
                if c2 != c {
                    break;
                }
                v += v2;
                iter.next();
            }
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseHermitian { basis, row_ptr, cols, vals, profile })
}

fn shift(u: &[u32], v: &[u32]) -> Vec<i64> {
    u.iter().zip(v).map(|(&a, &b)| b as i64 - a as i64).collect()
}
