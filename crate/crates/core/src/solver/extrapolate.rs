use serde::{Deserialize, Serialize};

use super::sequence::PuritySequence;
use crate::error::{Error, Result};

/// Triples whose second difference is below this are treated as flat.
pub const FLAT_DENOMINATOR: f64 = 1e-15;
/// A window whose total spread is below this is treated as converged.
pub const FLAT_SPREAD: f64 = 1e-13;

/// Fit of `μ_n ≈ μ_∞ + 1/(a n + b)` over the tail of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationFit {
    pub mu_inf: f64,
    pub a: f64,
    pub b: f64,
    /// `max |μ_n − μ_∞ − 1/(a n + b)|` over the window.
    pub residual: f64,
    /// First and last level of the window.
    pub window: (usize, usize),
    /// The window showed no decay; `a = b = 0`.
    pub zero_decay: bool,
}

/// Fits the tail of `seq`, using its last `window` levels.
pub fn extrapolate(seq: &PuritySequence, window: usize) -> Result<ExtrapolationFit> {
    let levels = seq.levels();
    if window < 3 || levels.len() < window {
        return Err(Error::Extrapolation(format!(
            "window of {window} levels requested from a sequence of {}; need at least 3",
            levels.len()
        )));
    }
    let tail = &levels[levels.len() - window..];
    let ns: Vec<usize> = tail.iter().map(|l| l.n).collect();
    let mus: Vec<f64> = tail.iter().map(|l| l.mu).collect();
    extrapolate_values(&ns, &mus)
}

/// Two-stage fit on equally spaced samples.
///
/// Every consecutive triple `(y₁, y₂, y₃)` gives the limit that makes
/// `1/(y − μ_∞)` linear in `n`:
/// `μ_∞ = [y₂(y₁ + y₃) − 2 y₁ y₃] / [2 y₂ − y₁ − y₃]`.
/// The median of those estimates is kept, and `(a, b)` come from a linear
/// least-squares fit of `1/(μ_n − μ_∞)` against `n`.
pub fn extrapolate_values(ns: &[usize], mus: &[f64]) -> Result<ExtrapolationFit> {
    if ns.len() != mus.len() {
        return Err(Error::Extrapolation("levels and values differ in length".into()));
    }
    if ns.len() < 3 {
        return Err(Error::Extrapolation(format!("need at least 3 levels, got {}", ns.len())));
    }
    let h = ns[1] as i64 - ns[0] as i64;
    if h <= 0 || ns.windows(2).any(|w| w[1] as i64 - w[0] as i64 != h) {
        return Err(Error::Extrapolation(format!("levels {ns:?} are not equally spaced")));
    }
    let window = (ns[0], ns[ns.len() - 1]);
    let last = mus[mus.len() - 1];
    let flat = |mus: &[f64]| ExtrapolationFit {
        mu_inf: last,
        a: 0.0,
        b: 0.0,
        residual: mus.iter().map(|y| (y - last).abs()).fold(0.0, f64::max),
        window,
        zero_decay: true,
    };

    let spread = mus.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - mus.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread <= FLAT_SPREAD {
        return Ok(flat(mus));
    }
    let mut estimates: Vec<f64> = mus
        .windows(3)
        .filter_map(|t| {
            let den = 2.0 * t[1] - t[0] - t[2];
            (den.abs() >= FLAT_DENOMINATOR).then(|| (t[1] * (t[0] + t[2]) - 2.0 * t[0] * t[2]) / den)
        })
        .collect();
    if estimates.is_empty() {
        return Ok(flat(mus));
    }
    estimates.sort_by(f64::total_cmp);
    let mid = estimates.len() / 2;
    let mu_inf = if estimates.len() % 2 == 1 { estimates[mid] } else { 0.5 * (estimates[mid - 1] + estimates[mid]) };

    // linear least squares of z = 1/(μ − μ_∞) on n
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(mus)
        .filter(|(_, &y)| y > mu_inf)
        .map(|(&n, &y)| (n as f64, 1.0 / (y - mu_inf)))
        .collect();
    if pts.len() < 2 {
        return Ok(ExtrapolationFit { mu_inf, ..flat(mus) });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mz = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxz: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - mz)).sum();
    let a = sxz / sxx;
    let b = mz - a * mx;
    let residual = ns
        .iter()
        .zip(mus)
        .map(|(&n, &y)| (y - mu_inf - 1.0 / (a * n as f64 + b)).abs())
        .fold(0.0, f64::max);
    Ok(ExtrapolationFit { mu_inf, a, b, residual, window, zero_decay: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_model_is_recovered() {
        let ns: Vec<usize> = (10..=30).collect();
        let mus: Vec<f64> = ns.iter().map(|&n| 0.75 + 1.0 / (2.0 * n as f64 + 3.0)).collect();
        let fit = extrapolate_values(&ns, &mus).unwrap();
        assert!((fit.mu_inf - 0.75).abs() < 1e-10, "{fit:?}");
        assert!((fit.a - 2.0).abs() < 1e-10 && (fit.b - 3.0).abs() < 1e-10, "{fit:?}");
        assert!(!fit.zero_decay);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn constant_sequence_takes_flat_branch() {
        let ns: Vec<usize> = (1..=8).collect();
        let fit = extrapolate_values(&ns, &[1.0; 8]).unwrap();
        assert_eq!(fit.mu_inf, 1.0);
        assert!(fit.zero_decay);
    }

    #[test]
    fn spacing_and_length_checks() {
        assert!(extrapolate_values(&[1, 2, 4], &[1.0, 0.9, 0.8]).is_err());
        assert!(extrapolate_values(&[1, 2], &[1.0, 0.9]).is_err());
        assert!(extrapolate_values(&[3, 2, 1], &[1.0, 0.9, 0.8]).is_err());
    }

    #[test]
    fn spaced_window() {
        let ns: Vec<usize> = (0..8).map(|i| 20 + 4 * i).collect();
        let mus: Vec<f64> = ns.iter().map(|&n| 0.3 + 1.0 / (0.5 * n as f64 + 7.0)).collect();
        let fit = extrapolate_values(&ns, &mus).unwrap();
        assert!((fit.mu_inf - 0.3).abs() < 1e-11);
        assert!((fit.a - 0.5).abs() < 1e-9 && (fit.b - 7.0).abs() < 1e-8);
    }
}
