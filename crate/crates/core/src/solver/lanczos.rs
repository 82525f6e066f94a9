//! Thick-restart Lanczos for the largest algebraic eigenvalue of a
//! Hermitian operator.
//!
//! Every new Krylov vector is orthogonalised twice against the whole basis,
//! and the projected matrix `H = V† Q V` is formed from those coefficients
//! directly, so after a restart it carries the usual arrowhead block without
//! special-casing. On restart the leading Ritz vectors are kept and the
//! current residual direction becomes the next basis vector.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sparse::HermitianOperator;
use crate::channel::gaussian;
use crate::error::{Error, Result};
use crate::linalg::{axpy, c64, dot, eigh, norm, scale};

/// Relative size of the noise blended into explicit start vectors.
pub const WARM_START_NOISE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Target `‖Qψ − λψ‖`.
    pub tol: f64,
    /// Matrix-vector product budget; `None` means `10 · dim`.
    pub max_iter: Option<usize>,
    /// Basis size before a restart.
    pub krylov_dim: usize,
    pub seed: u64,
    /// Warm start; a seeded default is used when absent.
    pub start: Option<Vec<c64>>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: None, krylov_dim: 40, seed: 0, start: None }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<c64>,
    /// Matrix-vector products used.
    pub iterations: usize,
    pub residual: f64,
}

/// Uniform positive vector with seeded complex noise of relative size 0.1.
pub fn default_start(dim: usize, seed: u64) -> Vec<c64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<c64> = (0..dim).map(|_| c64::new(1.0, 0.0) + gaussian(&mut rng) * 0.1).collect();
    let n = norm(&v);
    scale(c64::new(1.0 / n, 0.0), &mut v);
    v
}

/// Largest eigenvalue of `op` with a unit eigenvector.
pub fn max_eig_sparse<Q: HermitianOperator + ?Sized>(op: &Q, eig_tol: f64, max_iter: usize, seed: u64) -> Result<Eigenpair> {
    lanczos_max(op, &EigenOptions { tol: eig_tol, max_iter: Some(max_iter), seed, ..Default::default() })
}

pub fn lanczos_max<Q: HermitianOperator + ?Sized>(op: &Q, opts: &EigenOptions) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("eigensolver needs a non-empty operator".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("eigensolver tolerance must be positive, got {}", opts.tol)));
    }
    let budget = opts.max_iter.unwrap_or(10 * n).max(1);
    let m_max = opts.krylov_dim.max(3).min(n);
    let keep = (m_max / 2).max(1);

    let mut start = match &opts.start {
        Some(v) if v.len() == n && norm(v) > 0.0 => v.clone(),
        Some(v) if v.len() != n => {
            return Err(Error::DimensionMismatch(format!("start vector has length {}, operator dimension {n}", v.len())))
        }
        _ => default_start(n, opts.seed),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let s0 = norm(&start);
    scale(c64::new(1.0 / s0, 0.0), &mut start);
    if opts.start.is_some() {
        // a warm start may sit exactly in an invariant subspace that misses
        // the top eigenvector
        for z in start.iter_mut() {
            *z += gaussian(&mut rng) * (WARM_START_NOISE / (n as f64).sqrt());
        }
        let s1 = norm(&start);
        scale(c64::new(1.0 / s1, 0.0), &mut start);
    }
    let mut basis: Vec<Vec<c64>> = vec![start];
    let mut h = DMatrix::<c64>::zeros(m_max, m_max);
    let mut j = 0usize;
    let mut matvecs = 0usize;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut w = vec![c64::new(0.0, 0.0); n];
    let mut qx = vec![c64::new(0.0, 0.0); n];

    loop {
        // extend the basis until it is full or the Krylov space closes
        let breakdown;
        loop {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let scale_ref = norm(&w);
            for _pass in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    h[(i, j)] += c;
                    axpy(-c, v, &mut w);
                }
            }
            for i in 0..j {
                h[(j, i)] = h[(i, j)].conj();
            }
            h[(j, j)] = c64::new(h[(j, j)].re, 0.0);
            let beta = norm(&w);
            let closed = beta <= 1e-14 * scale_ref.max(1e-300) || basis.len() == n;
            if closed || basis.len() == m_max || matvecs >= budget {
                breakdown = closed;
                break;
            }
            let mut next = w.clone();
            scale(c64::new(1.0 / beta, 0.0), &mut next);
            basis.push(next);
            j += 1;
        }

        let size = basis.len();
        let (theta, y) = eigh(&h.view((0, 0), (size, size)).into_owned());
        let top = size - 1;
        let beta = norm(&w);
        let estimate = beta * y[(top, top)].norm();

        if estimate <= opts.tol || breakdown || matvecs >= budget {
            let mut x = vec![c64::new(0.0, 0.0); n];
            for (t, v) in basis.iter().enumerate() {
                axpy(y[(t, top)], v, &mut x);
            }
            let xn = norm(&x);
            scale(c64::new(1.0 / xn, 0.0), &mut x);
            op.apply(&x, &mut qx);
            matvecs += 1;
            let value = dot(&x, &qx).re;
            let mut r = qx.clone();
            axpy(c64::new(-value, 0.0), &x, &mut r);
            let residual = norm(&r);
            if residual < best.1 {
                best = (value, residual);
            }
            if residual <= opts.tol {
                return Ok(Eigenpair { value, vector: x, iterations: matvecs, residual });
            }
            if matvecs >= budget {
                return Err(Error::NonConvergence {
                    level: None,
                    best_residual: best.1,
                    best_value: best.0,
                    iterations: matvecs,
                });
            }
            if breakdown || estimate <= opts.tol {
                // the Krylov space closed (or orthogonality drifted) short of
                // the target: restart from the Ritz vector plus fresh noise
                let noise: Vec<c64> = (0..n).map(|_| gaussian(&mut rng) * 1e-3).collect();
                axpy(c64::new(1.0, 0.0), &noise, &mut x);
                let xn = norm(&x);
                scale(c64::new(1.0 / xn, 0.0), &mut x);
                basis = vec![x];
                h.fill(c64::new(0.0, 0.0));
                j = 0;
                continue;
            }
        }

        // thick restart: keep the leading Ritz vectors, continue from the residual
        let kept = keep.min(size - 1);
        let mut ritz: Vec<Vec<c64>> = Vec::with_capacity(kept + 1);
        for col in (size - kept..size).rev() {
            let mut x = vec![c64::new(0.0, 0.0); n];
            for (t, v) in basis.iter().enumerate() {
                axpy(y[(t, col)], v, &mut x);
            }
            ritz.push(x);
        }
        // re-orthonormalise the kept block against round-off drift
        for i in 0..ritz.len() {
            let (done, rest) = ritz.split_at_mut(i);
            let x = &mut rest[0];
            for v in done.iter() {
                let c = dot(v, x);
                axpy(-c, v, x);
            }
            let xn = norm(x);
            scale(c64::new(1.0 / xn, 0.0), x);
        }
        h.fill(c64::new(0.0, 0.0));
        for (i, col) in (size - kept..size).rev().enumerate() {
            h[(i, i)] = c64::new(theta[col], 0.0);
        }
        let mut f = w.clone();
        for v in &ritz {
            let c = dot(v, &f);
            axpy(-c, v, &mut f);
        }
        let fnorm = norm(&f);
        scale(c64::new(1.0 / fnorm, 0.0), &mut f);
        ritz.push(f);
        basis = ritz;
        j = kept;
    }
}
