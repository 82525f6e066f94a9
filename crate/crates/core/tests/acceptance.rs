//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use outpurity_core::baseline::{bloch_grid_oracle, dense_isometry, dense_lift_oracle, local_search};
use outpurity_core::channel::{choi_of, make_depolarizing, make_random_channel, QuantumChannel};
use outpurity_core::lift::{build_a, compress, symmetrize, OccupationBasis};
use outpurity_core::linalg::{c64, max_abs_diff, ComplexMatrix};
use outpurity_core::solver::{
    assemble_qn, compressed_operator, extrapolate, extrapolate_values, max_eig_sparse, purity_sequence, recover_state,
    solve_mop, MopOptions, SequenceOptions, MONOTONE_SLACK,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn random_channels() -> Vec<QuantumChannel> {
    (0..20).map(|s| make_random_channel(2, 4, 1000 + s).unwrap()).collect()
}

fn identity_channel() -> Outcome {
    let started = Instant::now();
    let ch = QuantumChannel::identity(2);
    let r = solve_mop(&ch, 2, &MopOptions { n_max: 64, ..Default::default() }).unwrap();
    let worst = r.mu_sequence.mus().iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
    let elapsed = secs(started.elapsed());
    let pass = worst <= 1e-12 && (r.nu_q - 1.0).abs() <= 1e-12 && elapsed < 5.0;
    outcome(pass, format!("max |mu_n - 1| = {worst:.1e}, nu_2 = {:.15}, {elapsed:.2} s", r.nu_q))
}

fn depolarizing_limits() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for p in [0.25, 0.5, 0.75] {
        let ch = make_depolarizing(2, p).unwrap();
        let r = solve_mop(&ch, 2, &MopOptions::default()).unwrap();
        worst = worst.max((r.fit.mu_inf - (1.0 + p * p) / 2.0).abs());
    }
    let elapsed = secs(started.elapsed());
    outcome(worst <= 1e-8 && elapsed < 30.0, format!("max |mu_inf - (1+p^2)/2| = {worst:.1e}, {elapsed:.2} s"))
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for (d, q, n_max) in [(2usize, 2u32, 4usize), (2, 3, 3), (3, 2, 2)] {
        let ch = make_random_channel(d, 3, 7 + q as u64 + d as u64).unwrap();
        let mut a = build_a(&choi_of(&ch), q).unwrap();
        if q > 2 {
            a = symmetrize(&a).unwrap();
        }
        let b = compress(&a).unwrap();
        for n in 1..=n_max {
            let sparse = assemble_qn(&b, n).unwrap().to_dense();
            let dense = dense_lift_oracle(&a, n).unwrap();
            worst = worst.max(max_abs_diff(&sparse, &dense));
        }
    }
    let elapsed = secs(started.elapsed());
    outcome(worst <= 1e-12 && elapsed < 60.0, format!("max entry difference {worst:.1e}, {elapsed:.2} s"))
}

fn monotonicity(channels: &[QuantumChannel]) -> Outcome {
    let schedule: Vec<usize> = (1..=32).collect();
    let mut violations = 0;
    let mut errors = 0;
    for ch in channels {
        let b = compressed_operator(ch, 2).unwrap();
        match purity_sequence(&b, &schedule, &SequenceOptions::default()) {
            Ok(seq) => {
                violations += seq.mus().windows(2).filter(|w| w[1] > w[0] + MONOTONE_SLACK).count();
            }
            Err(_) => errors += 1,
        }
    }
    outcome(violations == 0 && errors == 0, format!("{violations} violations, {errors} failed sequences"))
}

fn bracket(channels: &[QuantumChannel]) -> Outcome {
    let mut above = 0;
    let mut worst_fit: f64 = 0.0;
    let mut worst_gap = f64::INFINITY;
    for ch in channels {
        let b = compressed_operator(ch, 2).unwrap();
        let schedule: Vec<usize> = (1..=128).collect();
        let seq = purity_sequence(&b, &schedule, &SequenceOptions::default()).unwrap();
        let fit = extrapolate(&seq, 32).unwrap();
        let l = local_search(ch, 2, 50, 0).unwrap().value;
        let g = bloch_grid_oracle(ch, 2, 1000).unwrap().value;
        above += seq.mus().iter().filter(|&&m| l > m + 1e-10).count();
        worst_gap = worst_gap.min(seq.mus().iter().map(|m| m - l).fold(f64::INFINITY, f64::min));
        worst_fit = worst_fit.max((fit.mu_inf - g).abs());
    }
    outcome(
        above == 0 && worst_fit <= 1e-5,
        format!("{above} levels with mu_n < L - 1e-10 (min mu_n - L = {worst_gap:.1e}), max |mu_inf - G| = {worst_fit:.1e}"),
    )
}

fn error_law() -> Outcome {
    let ch = make_depolarizing(2, 0.5).unwrap();
    let b = compressed_operator(&ch, 2).unwrap();
    let schedule: Vec<usize> = (1..=128).collect();
    let seq = purity_sequence(&b, &schedule, &SequenceOptions::default()).unwrap();
    let flat = seq.mus().iter().map(|m| (m - 0.625).abs()).fold(0.0, f64::max);
    let x: Vec<f64> = [64usize, 128].iter().map(|&n| n as f64 * (seq.levels()[n - 1].mu - 0.625)).collect();
    let spread = (x[0] - x[1]).abs();
    let scale = x[0].abs().max(x[1].abs());
    outcome(
        spread < 0.2 * scale,
        format!(
            "64*(mu_64 - 0.625) = {:.3e}, 128*(mu_128 - 0.625) = {:.3e}; max |mu_n - 0.625| over n <= 128 is {flat:.1e}",
            x[0], x[1]
        ),
    )
}

fn synthetic_extrapolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ns: Vec<usize> = (1..=16).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let c: f64 = rng.random_range(0.2..1.0);
        let a: f64 = rng.random_range(0.5..5.0);
        let b: f64 = rng.random_range(0.5..5.0);
        let mus: Vec<f64> = ns.iter().map(|&n| c + 1.0 / (a * n as f64 + b)).collect();
        let fit = extrapolate_values(&ns, &mus).unwrap();
        worst = worst.max((fit.mu_inf - c).abs()).max((fit.a - a).abs()).max((fit.b - b).abs());
    }
    outcome(worst <= 1e-9, format!("max parameter error {worst:.1e}"))
}

fn brute_force_reduced(d: usize, total: usize, coeffs: &[c64]) -> ComplexMatrix {
    let p = dense_isometry(d, total).unwrap();
    let full = &p * DVector::from_column_slice(coeffs);
    let rest = full.len() / d;
    let m = DMatrix::from_fn(d, rest, |a, r| full[a * rest + r]);
    &m * m.adjoint()
}

fn state_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for total in 2..=6 {
        let basis = OccupationBasis::new(2, total).unwrap();
        for _ in 0..5 {
            let mut v: Vec<c64> =
                (0..basis.len()).map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            let rho = recover_state(&basis, &v).unwrap();
            worst = worst.max(max_abs_diff(rho.matrix(), &brute_force_reduced(2, total, &v)));
        }
    }
    let ch = make_depolarizing(2, 0.5).unwrap();
    let r = solve_mop(&ch, 2, &MopOptions::default()).unwrap();
    let value = ch.output_purity(r.rho_opt.matrix(), 2);
    outcome(
        worst <= 1e-12 && value >= 0.625 - 1e-3,
        format!("max recovery difference {worst:.1e}, Tr[Phi(rho_opt)^2] = {value:.12}"),
    )
}

fn scaling() -> Outcome {
    let ch = make_random_channel(2, 4, 11).unwrap();
    let b = compressed_operator(&ch, 2).unwrap();
    let ns = [256usize, 512, 1024, 2048];
    let mut times = Vec::new();
    for &n in &ns {
        let qn = assemble_qn(&b, n).unwrap();
        let best = (0..3)
            .map(|_| {
                let started = Instant::now();
                max_eig_sparse(&qn, 1e-12, 10 * qn.basis().len(), 0).unwrap();
                secs(started.elapsed())
            })
            .fold(f64::INFINITY, f64::min);
        times.push(best);
    }
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = ratios.iter().all(|&r| r <= 4.5);
    let shown: Vec<String> = ns.iter().zip(&times).map(|(n, t)| format!("n={n}: {:.1} ms", t * 1e3)).collect();
    let rs: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    outcome(pass, format!("{}; ratios {}", shown.join(", "), rs.join(", ")))
}

fn main() -> ExitCode {
    let channels = random_channels();
    let criteria: Vec<(&str, Check)> = vec![
        ("1 identity channel", Box::new(identity_channel)),
        ("2 depolarizing limits", Box::new(depolarizing_limits)),
        ("3 oracle equivalence", Box::new(oracle_equivalence)),
        ("4 monotonicity", Box::new(|| monotonicity(&channels))),
        ("5 upper bound and bracket", Box::new(|| bracket(&channels))),
        ("6 error law", Box::new(error_law)),
        ("7 synthetic extrapolation", Box::new(synthetic_extrapolation)),
        ("8 state recovery", Box::new(state_recovery)),
        ("9 scaling", Box::new(scaling)),
    ];
    let mut failed = Vec::new();
    for (name, check) in &criteria {
        let o = check();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(*name);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
