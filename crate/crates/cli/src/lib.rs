//! Command-line front end for the output-purity solver.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use outpurity_core::baseline::{bloch_grid_oracle, local_search};
use outpurity_core::channel::{
    make_depolarizing, make_random_channel, read_channel, trace_preservation_deviation, ChannelFile, QuantumChannel,
    TP_TOL,
};
use outpurity_core::solver::{compressed_operator, extrapolate, purity_sequence, solve_mop, Certificate, SequenceOptions};
use outpurity_core::{ComplexMatrix, Error, ExtrapolationFit, LevelResult, MopOptions, PuritySequence, Verdict};
use serde::{Deserialize, Serialize};

/// Grid resolution used by `compare`.
pub const COMPARE_GRID_RESOLUTION: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Full solve: level sequence, extrapolation, optimal input and cross-checks.
    Solve,
    /// Level sequence and fit only.
    Sweep,
    /// Solver against local search and the Bloch-sphere grid.
    Compare,
    /// Check that the channel is trace preserving.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "outpurity", version, about = "Maximal output purity of quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Channel file, or builtin:depolarizing:d=2,p=0.5 | builtin:random:d=2,k=4 | builtin:identity:d=2.
    #[arg(long, global = true)]
    pub channel: Option<String>,
    #[arg(long, global = true, default_value_t = 2)]
    pub q: u32,
    #[arg(long, global = true, default_value_t = 128)]
    pub n_max: usize,
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub eig_tol: f64,
    /// Trailing levels used by the fit; clamped to n_max.
    #[arg(long, global = true, default_value_t = 32)]
    pub window: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub channel: String,
    pub q: u32,
    pub n_max: usize,
    pub eig_tol: f64,
    pub window: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let channel = cli.channel.ok_or_else(|| anyhow!("--channel is required"))?;
        let config = Self {
            command: cli.command,
            channel,
            q: cli.q,
            n_max: cli.n_max,
            eig_tol: cli.eig_tol,
            window: cli.window,
            seed: cli.seed,
            output_path: cli.out,
            output_format: cli.format,
        };
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<()> {
        if !(2..=4).contains(&self.q) {
            bail!("--q must be 2, 3 or 4, got {}", self.q);
        }
        if self.n_max < 1 {
            bail!("--n-max must be at least 1");
        }
        if self.eig_tol.is_nan() || self.eig_tol <= 0.0 {
            bail!("--eig-tol must be positive, got {}", self.eig_tol);
        }
        if self.output_format == Format::Csv && matches!(self.command, Command::Compare | Command::Validate) {
            bail!("--format csv is only available for solve and sweep");
        }
        if self.command == Command::Solve && self.effective_window() < 3 {
            bail!("solve needs at least 3 levels for the fit, got --n-max {} --window {}", self.n_max, self.window);
        }
        Ok(())
    }

    fn effective_window(&self) -> usize {
        self.window.min(self.n_max)
    }

    fn mop_options(&self) -> MopOptions {
        MopOptions {
            n_max: self.n_max,
            eig_tol: self.eig_tol,
            window: self.effective_window(),
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// One level of the sequence, in the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub dim: usize,
    pub mu: f64,
    pub iters: usize,
    pub residual: f64,
    pub wall_ms: f64,
}

impl From<&LevelResult> for Row {
    fn from(l: &LevelResult) -> Self {
        Self { n: l.n, dim: l.dim, mu: l.mu, iters: l.iterations, residual: l.residual, wall_ms: l.wall_ms }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub solver_mu_inf: f64,
    pub solver_mu_n_max: f64,
    pub local_search: f64,
    pub grid: Option<f64>,
    pub grid_upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub d: usize,
    pub kraus_count: usize,
    /// Spectral norm of `Σ K†K − I`.
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<ExtrapolationFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_q: Option<f64>,
    /// Entries of the optimal input as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_opt: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_reduced: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
    pub verdict: Verdict,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl Report {
    /// 0 certified, 2 degraded, 1 failed.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Certified => 0,
            Verdict::Degraded => 2,
            Verdict::Failed => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let mut out = String::from_utf8(w.into_inner()?)?;
        if self.rows.is_empty() {
            out.push_str("n,dim,mu,iters,residual,wall_ms\n");
        }
        if let Some(fit) = &self.fit {
            writeln!(
                out,
                "# fit,mu_inf={},a={},b={},residual={},window={}-{}",
                fit.mu_inf, fit.a, fit.b, fit.residual, fit.window.0, fit.window.1
            )?;
        }
        Ok(out)
    }

    pub fn render(&self) -> Result<String> {
        match self.config.output_format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

fn builtin_params(source: &str) -> Result<Vec<(String, String)>> {
    source.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| anyhow!("builtin parameter '{kv}' is not of the form key=value"))
        })
        .collect()
}

fn param<T: std::str::FromStr>(params: &[(String, String)], key: &str, default: Option<T>) -> Result<T> {
    match params.iter().find(|(k, _)| k == key) {
        Some((_, v)) => v.parse().map_err(|_| anyhow!("builtin parameter {key}={v} is not valid")),
        None => default.ok_or_else(|| anyhow!("builtin channel needs parameter {key}")),
    }
}

/// Resolves `--channel`: a builtin generator or a JSON channel file.
pub fn load_channel(source: &str, seed: u64) -> Result<QuantumChannel> {
    let Some(rest) = source.strip_prefix("builtin:") else {
        return Ok(read_channel(Path::new(source))?);
    };
    let (kind, args) = rest.split_once(':').unwrap_or((rest, ""));
    let params = builtin_params(args)?;
    let d: usize = param(&params, "d", Some(2))?;
    let channel = match kind {
        "depolarizing" => make_depolarizing(d, param(&params, "p", None)?)?,
        "random" => make_random_channel(d, param(&params, "k", None)?, seed)?,
        "identity" => QuantumChannel::identity(d),
        other => bail!("unknown builtin channel '{other}'; expected depolarizing, random or identity"),
    };
    Ok(channel)
}

fn base_report(config: &RunConfig, d: usize) -> Report {
    Report {
        config: config.clone(),
        d,
        rows: Vec::new(),
        fit: None,
        nu_q: None,
        rho_opt: None,
        rho_reduced: None,
        baseline: None,
        certificate: None,
        comparison: None,
        validation: None,
        verdict: Verdict::Certified,
        diagnostics: Vec::new(),
    }
}

fn rows(seq: &PuritySequence) -> Vec<Row> {
    seq.levels().iter().map(Row::from).collect()
}

fn validate(config: &RunConfig) -> Result<Report> {
    if config.channel.starts_with("builtin:") {
        let ch = load_channel(&config.channel, config.seed)?;
        let mut report = base_report(config, ch.dim());
        report.validation = Some(Validation {
            d: ch.dim(),
            kraus_count: ch.kraus().len(),
            deviation: trace_preservation_deviation(ch.kraus()),
            tolerance: TP_TOL,
        });
        return Ok(report);
    }
    let text = std::fs::read_to_string(&config.channel).with_context(|| format!("reading {}", config.channel))?;
    let file: ChannelFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", config.channel)))?;
    let kraus = file.to_kraus()?;
    let deviation = trace_preservation_deviation(&kraus);
    if deviation.is_nan() || deviation > TP_TOL {
        bail!(Error::NotTracePreserving { deviation, tolerance: TP_TOL });
    }
    let mut report = base_report(config, file.d);
    report.validation = Some(Validation { d: file.d, kraus_count: kraus.len(), deviation, tolerance: TP_TOL });
    Ok(report)
}

fn sweep(config: &RunConfig, ch: &QuantumChannel) -> Result<Report> {
    let b = compressed_operator(ch, config.q)?;
    let schedule: Vec<usize> = (1..=config.n_max).collect();
    let opts = SequenceOptions { eig_tol: config.eig_tol, seed: config.seed, ..Default::default() };
    let seq = purity_sequence(&b, &schedule, &opts)?;
    let mut report = base_report(config, ch.dim());
    report.rows = rows(&seq);
    let window = config.effective_window();
    if window >= 3 {
        report.fit = Some(extrapolate(&seq, window)?);
    } else {
        report.diagnostics.push(format!("no fit: {window} levels are fewer than 3"));
    }
    Ok(report)
}

fn solve(config: &RunConfig, ch: &QuantumChannel) -> Result<Report> {
    let r = solve_mop(ch, config.q, &config.mop_options())?;
    let mut report = base_report(config, ch.dim());
    report.rows = rows(&r.mu_sequence);
    report.nu_q = Some(r.nu_q);
    report.rho_opt = Some(matrix_entries(r.rho_opt.matrix()));
    report.rho_reduced = Some(matrix_entries(r.rho_reduced.matrix()));
    report.baseline = Some(r.certificate.local_value);
    report.fit = Some(r.fit);
    report.certificate = Some(r.certificate);
    report.verdict = r.verdict;
    report.diagnostics = r.diagnostics;
    Ok(report)
}

fn compare(config: &RunConfig, ch: &QuantumChannel) -> Result<Report> {
    let mut report = solve(config, ch)?;
    let fit = report.fit.as_ref().expect("solve reports a fit");
    let last = report.rows.last().expect("solve reports levels").mu;
    let local = local_search(ch, config.q, config.mop_options().restarts, config.seed)?.value;
    let (grid, grid_upper) = if ch.dim() == 2 {
        let g = bloch_grid_oracle(ch, config.q, COMPARE_GRID_RESOLUTION)?;
        (Some(g.value), Some(g.upper))
    } else {
        report.diagnostics.push("grid oracle skipped: only available for qubits".into());
        (None, None)
    };
    report.comparison =
        Some(Comparison { solver_mu_inf: fit.mu_inf, solver_mu_n_max: last, local_search: local, grid, grid_upper });
    Ok(report)
}

/// Executes one command and returns its report.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.check()?;
    if config.command == Command::Validate {
        return validate(config);
    }
    let ch = load_channel(&config.channel, config.seed)?;
    match config.command {
        Command::Solve => solve(config, &ch),
        Command::Sweep => sweep(config, &ch),
        Command::Compare => compare(config, &ch),
        Command::Validate => unreachable!(),
    }
}

/// Runs, writes the report and returns the process exit status.
pub fn execute(config: &RunConfig) -> Result<i32> {
    let report = run(config)?;
    let text = report.render()?;
    match &config.output_path {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    for d in &report.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(report.exit_code())
}
