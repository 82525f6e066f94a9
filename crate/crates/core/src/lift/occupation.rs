use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Occupation numbers `[k_1, …, k_d]` of a symmetric basis vector: `k_j`
/// counts how many tensor factors sit in level `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationIndex {
    counts: Vec<u32>,
}

impl OccupationIndex {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Number of copies `n = Σ k_j`.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&k| k as u64).sum()
    }
}

/// Binomial coefficient with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("binomial C({n}, {k})")))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// Dimension `S(d, n) = C(n + d − 1, d − 1)` of the symmetric subspace of
/// `n` copies of `C^d`.
pub fn sym_dimension(d: usize, n: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension d must be at least 1".into()));
    }
    let top = (n as u64)
        .checked_add(d as u64 - 1)
        .ok_or_else(|| Error::Overflow(format!("S({d}, {n})")))?;
    let value = binomial(top, d as u64 - 1)?;
    usize::try_from(value).map_err(|_| Error::Overflow(format!("S({d}, {n}) = {value} does not fit in usize")))
}

/// Multinomial coefficient `n! / (k_1! ⋯ k_d!)`.
///
/// Zero whenever a component is negative. Non-negative components that do
/// not sum to `n` are an error.
pub fn multinomial(n: i64, k: &[i64]) -> Result<u128> {
    if k.iter().any(|&kj| kj < 0) {
        return Ok(0);
    }
    let sum: i64 = k.iter().sum();
    if sum != n {
        return Err(Error::InvalidParameter(format!("multinomial components {k:?} sum to {sum}, not {n}")));
    }
    let mut acc: u128 = 1;
    let mut running: u64 = 0;
    for &kj in k {
        running += kj as u64;
        acc = acc
            .checked_mul(binomial(running, kj as u64)?)
            .ok_or_else(|| Error::Overflow(format!("multinomial C^{n}_{k:?}")))?;
    }
    Ok(acc)
}

/// `C^n_{[k]}` as a float, `n = Σ k`. Exact for the small `q` used in
/// compressions.
pub fn multinomial_f64(k: &[u32]) -> f64 {
    let mut acc = 1.0f64;
    let mut running = 0u32;
    for &kj in k {
        for i in 1..=kj {
            running += 1;
            acc *= running as f64 / i as f64;
        }
    }
    acc
}

/// Occupation numbers of a composite index stored as an integer whose base-`d`
/// digits (most significant first) are `(i_1, …, i_len)`.
pub fn occupation_of(mut index: usize, d: usize, len: usize) -> Vec<u32> {
    let mut counts = vec![0u32; d];
    for _ in 0..len {
        counts[index % d] += 1;
        index /= d;
    }
    counts
}

/// All occupation vectors of `n` copies of `C^d` in canonical order:
/// descending lexicographic, so `[n, 0, …, 0]` comes first and `[0, …, 0, n]`
/// last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationBasis {
    d: usize,
    n: usize,
    flat: Vec<u32>,
    // tail_counts[p][r] = S(p, r) for p ≤ d, r ≤ n, with S(0, r) = [r == 0]
    tail_counts: Vec<Vec<u64>>,
}

pub fn enumerate_occupations(d: usize, n: usize) -> Result<OccupationBasis> {
    OccupationBasis::new(d, n)
}

impl OccupationBasis {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        let len = sym_dimension(d, n)?;
        let n32 = u32::try_from(n).map_err(|_| Error::Overflow(format!("n = {n} copies")))?;
        let mut flat = Vec::with_capacity(len * d);
        let mut k = vec![0u32; d];
        k[0] = n32;
        loop {
            flat.extend_from_slice(&k);
            let last = k[d - 1];
            k[d - 1] = 0;
            let Some(j) = (0..d - 1).rev().find(|&j| k[j] > 0) else {
                break;
            };
            k[j] -= 1;
            k[j + 1] = last + 1;
        }
        debug_assert_eq!(flat.len(), len * d);

        let mut tail_counts = vec![vec![0u64; n + 1]; d + 1];
        tail_counts[0][0] = 1;
        for p in 1..=d {
            let mut acc = 0u64;
            let prev = tail_counts[p - 1].clone();
            for (slot, v) in tail_counts[p].iter_mut().zip(prev) {
                acc += v;
                *slot = acc;
            }
        }
        Ok(Self { d, n, flat, tail_counts })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn copies(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, pos: usize) -> &[u32] {
        &self.flat[pos * self.d..(pos + 1) * self.d]
    }

    pub fn index(&self, pos: usize) -> OccupationIndex {
        OccupationIndex::new(self.get(pos).to_vec())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.flat.chunks_exact(self.d)
    }

    /// Row number of an occupation vector; `None` if it is not in the basis.
    pub fn position(&self, k: &[u32]) -> Option<usize> {
        if k.len() != self.d {
            return None;
        }
        let mut rem = self.n as u64;
        let mut pos = 0u64;
        for (j, &kj) in k[..self.d - 1].iter().enumerate() {
            let kj = kj as u64;
            if kj > rem {
                return None;
            }
            // vectors sharing the prefix but with a larger j-th entry come first
            if rem > kj {
                pos += self.tail_counts[self.d - j][(rem - kj - 1) as usize];
            }
            rem -= kj;
        }
        (k[self.d - 1] as u64 == rem).then_some(pos as usize)
    }
}
