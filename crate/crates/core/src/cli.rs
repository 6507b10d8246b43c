//! Command-line front end: `analyze`, `sweep` and `bench`.
//!
//! Exit codes: 0 when the command ran, 2 when `analyze` found any `ENTANGLED`
//! verdict, 1 on error. Reports go to standard output, diagnostics to
//! standard error.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concurrence::{
    bound_ccnr_ppt, bound_lur_gell_mann, bound_optimized, concurrence_bounds, ConcurrenceBounds,
};
use crate::criteria::{
    bipartite_verdicts, cut_verdicts, multipartite_full_sep, party_label, Bipartition,
    CriterionVerdict, MultipartiteReport, DECISION_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, partial_trace, partial_transpose, realign, trace_norm};
use crate::linalg::DensityMatrix;
use crate::states::{
    ensemble_seed, mix, parse_dims, random_mixed, random_pure, random_separable, StateSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ENTANGLED: i32 = 2;

pub const DEFAULT_GRID: &str = "0:1:101";

#[derive(Debug, Parser)]
#[command(name = "covmat", version, about = "Covariance-matrix entanglement criteria and concurrence bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every applicable criterion and bound for one state.
    Analyze(AnalyzeArgs),
    /// Bounds and margins along the family (1 - x) base + x target.
    Sweep(SweepArgs),
    /// Detection counts of every criterion over a random ensemble.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StateSource {
    /// Built-in state, e.g. bennett3x3, mes:3, isotropic:3:0.5,
    /// product[ket:2:0,mixed:3], random_separable:2x2x2:4:7.
    #[arg(long)]
    pub state: Option<StateSpec>,
    /// JSON state file: {"dims": [..], "matrix": [[[re, im], ..], ..]}.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl StateSource {
    pub fn spec(&self) -> StateSpec {
        match (&self.state, &self.file) {
            (Some(spec), _) => spec.clone(),
            (None, Some(path)) => StateSpec::File(path.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: StateSource,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Decision tolerance on criterion margins.
    #[arg(long, default_value_t = DECISION_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "bennett3x3")]
    pub base: StateSpec,
    #[arg(long, default_value = "mes:3")]
    pub target: StateSpec,
    /// START:STOP:STEPS, endpoints included.
    #[arg(long, default_value = DEFAULT_GRID)]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = DECISION_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// separable:DIMS:TERMS, pure:DIMS or mixed:DIMS:RANK.
    #[arg(long, default_value = "separable:3x3:5")]
    pub ensemble: Ensemble,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, env = "COVMAT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = DECISION_TOL)]
    pub tolerance: f64,
}

/// Evenly spaced points `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| {
                    if k == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("grid '{s}' must look like START:STOP:STEPS"));
        let fields: Vec<&str> = s.split(':').collect();
        let [a, b, n] = fields.as_slice() else {
            return Err(bad());
        };
        let grid = Grid {
            start: a.trim().parse().map_err(|_| bad())?,
            stop: b.trim().parse().map_err(|_| bad())?,
            steps: n.trim().parse().map_err(|_| bad())?,
        };
        if grid.steps == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

/// Random state family sampled by `bench`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ensemble {
    Separable { dims: Vec<usize>, terms: usize },
    Pure { dims: Vec<usize> },
    Mixed { dims: Vec<usize>, rank: usize },
}

impl Ensemble {
    pub fn dims(&self) -> &[usize] {
        match self {
            Ensemble::Separable { dims, .. }
            | Ensemble::Pure { dims }
            | Ensemble::Mixed { dims, .. } => dims,
        }
    }

    pub fn sample(&self, seed: u64) -> Result<DensityMatrix> {
        match self {
            Ensemble::Separable { dims, terms } => random_separable(dims, *terms, seed),
            Ensemble::Pure { dims } => random_pure(dims, seed),
            Ensemble::Mixed { dims, rank } => random_mixed(dims, *rank, seed),
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let count = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid count '{v}' in '{s}'")))
        };
        let fields: Vec<&str> = s.trim().split(':').collect();
        match fields.as_slice() {
            ["separable", dims, terms] => Ok(Ensemble::Separable {
                dims: parse_dims(dims)?,
                terms: count(terms)?,
            }),
            ["pure", dims] => Ok(Ensemble::Pure {
                dims: parse_dims(dims)?,
            }),
            ["mixed", dims, rank] => Ok(Ensemble::Mixed {
                dims: parse_dims(dims)?,
                rank: count(rank)?,
            }),
            _ => Err(Error::Parse(format!("unknown ensemble '{s}'"))),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims = |d: &[usize]| d.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
        match self {
            Ensemble::Separable { dims: d, terms } => write!(f, "separable:{}:{terms}", dims(d)),
            Ensemble::Pure { dims: d } => write!(f, "pure:{}", dims(d)),
            Ensemble::Mixed { dims: d, rank } => write!(f, "mixed:{}:{rank}", dims(d)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub state_description: String,
    pub dims: Vec<usize>,
    /// `tr(rho_i^2)` for each party.
    pub purities: Vec<f64>,
    /// Bipartite criteria for two parties; every cut's criteria otherwise.
    pub verdicts: Vec<CriterionVerdict>,
    /// Pairwise covariance analysis, for three or more parties.
    pub multipartite: Option<MultipartiteReport>,
    /// Concurrence bounds, for two parties.
    pub bounds: Option<ConcurrenceBounds>,
    /// Wall-clock milliseconds per stage.
    pub timing: BTreeMap<String, f64>,
}

impl AnalysisReport {
    pub fn any_entangled(&self) -> bool {
        self.verdicts.iter().any(CriterionVerdict::is_entangled)
            || self.multipartite.as_ref().is_some_and(|m| {
                m.pair_verdicts
                    .iter()
                    .any(|p| p.hs.is_entangled() || p.kf.is_entangled())
            })
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn analyze_state(
    description: String,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<AnalysisReport> {
    let n = rho.parties();
    if n < 2 {
        return Err(Error::PartyCount { expected: 2, found: n });
    }
    let mut timing = BTreeMap::new();

    let start = Instant::now();
    let purities = (0..n)
        .map(|p| Ok(partial_trace(rho, &[p])?.purity()))
        .collect::<Result<Vec<_>>>()?;
    let verdicts = if n == 2 {
        bipartite_verdicts(rho, tol)?
    } else {
        let mut all = Vec::new();
        for cut in Bipartition::all(n) {
            all.extend(cut_verdicts(rho, &cut, tol)?);
        }
        all
    };
    timing.insert("criteria".to_string(), elapsed_ms(start));

    let multipartite = if n >= 3 {
        let start = Instant::now();
        let report = multipartite_full_sep(rho, tol)?;
        timing.insert("multipartite".to_string(), elapsed_ms(start));
        Some(report)
    } else {
        None
    };

    let bounds = if n == 2 {
        let start = Instant::now();
        let b = concurrence_bounds(rho)?;
        timing.insert("bounds".to_string(), elapsed_ms(start));
        Some(b)
    } else {
        None
    };

    Ok(AnalysisReport {
        state_description: description,
        dims: rho.dims().to_vec(),
        purities,
        verdicts,
        multipartite,
        bounds,
        timing,
    })
}

pub fn cmd_analyze(spec: &StateSpec, tol: f64) -> Result<AnalysisReport> {
    let start = Instant::now();
    let rho = spec.build()?;
    let build = elapsed_ms(start);
    let mut report = analyze_state(spec.to_string(), &rho, tol)?;
    report.timing.insert("build".to_string(), build);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub bound10: f64,
    pub bound11: f64,
    pub bound12: f64,
    pub kf_margin: f64,
    pub hs_margin: f64,
    pub ppt_min_eig: f64,
    pub ccnr_norm: f64,
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "x",
    "bound10",
    "bound11",
    "bound12",
    "kf_margin",
    "hs_margin",
    "ppt_min_eig",
    "ccnr_norm",
];

impl SweepRow {
    pub fn values(&self) -> [f64; 8] {
        [
            self.x,
            self.bound10,
            self.bound11,
            self.bound12,
            self.kf_margin,
            self.hs_margin,
            self.ppt_min_eig,
            self.ccnr_norm,
        ]
    }
}

pub fn sweep_row(rho: &DensityMatrix, x: f64, tol: f64) -> Result<SweepRow> {
    let verdicts = bipartite_verdicts(rho, tol)?;
    let margin = |name: &str| {
        verdicts
            .iter()
            .find(|v| v.name == name)
            .map(|v| v.margin)
            .expect("bipartite verdicts are complete")
    };
    Ok(SweepRow {
        x,
        bound10: bound_ccnr_ppt(rho)?,
        bound11: bound_lur_gell_mann(rho)?,
        bound12: bound_optimized(rho)?,
        kf_margin: margin("kf"),
        hs_margin: margin("hs"),
        ppt_min_eig: hermitian_eigenvalues(&partial_transpose(rho, 0)?)[0],
        ccnr_norm: trace_norm(&realign(rho)?),
    })
}

/// Rows for `(1 - x) base + x target` over the grid, in grid order.
pub fn cmd_sweep(
    base: &StateSpec,
    target: &StateSpec,
    grid: &Grid,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let a = base.build()?;
    let b = target.build()?;
    a.bipartite_dims()?;
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    points
        .par_iter()
        .map(|&x| sweep_row(&mix(&a, &b, x)?, x, tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub criterion: String,
    pub detections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub ensemble: String,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    /// For bipartite pure ensembles: states with concurrence above
    /// [`PURE_ENTANGLED_TOL`].
    pub pure_entangled: Option<usize>,
}

pub const PURE_ENTANGLED_TOL: f64 = 1e-6;

/// Every detection statement made about one state, in a fixed order:
/// verdict names, then `full_sep` and `bisep[..]` for three or more parties.
pub fn detections(rho: &DensityMatrix, tol: f64) -> Result<Vec<(String, bool)>> {
    let report = analyze_state(String::new(), rho, tol)?;
    let mut out: Vec<(String, bool)> = report
        .verdicts
        .iter()
        .map(|v| (v.name.clone(), v.is_entangled()))
        .collect();
    if let Some(m) = &report.multipartite {
        for p in &m.pair_verdicts {
            out.push((p.hs.name.clone(), p.hs.is_entangled()));
            out.push((p.kf.name.clone(), p.kf.is_entangled()));
        }
        out.push(("full_sep".to_string(), m.full_sep_refuted));
        for cut in &m.bisep_refuted {
            out.push((format!("bisep[{}]", cut.partition), cut.refuted));
        }
        out.push(("fully_entangled".to_string(), m.fully_entangled));
    }
    Ok(out)
}

pub fn cmd_bench(ensemble: &Ensemble, samples: usize, seed: u64, tol: f64) -> Result<BenchReport> {
    let per_state = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let rho = ensemble.sample(ensemble_seed(seed, i))?;
            let concurrence = match (ensemble, rho.dims()) {
                (Ensemble::Pure { .. }, [_, _]) => {
                    Some(concurrence_bounds(&rho)?.exact_pure.unwrap_or(0.0))
                }
                _ => None,
            };
            Ok((detections(&rho, tol)?, concurrence))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<BenchRow> = Vec::new();
    let mut pure_entangled = None;
    for (flags, concurrence) in &per_state {
        if rows.is_empty() {
            rows = flags
                .iter()
                .map(|(name, _)| BenchRow {
                    criterion: name.clone(),
                    detections: 0,
                })
                .collect();
        }
        for (row, (_, hit)) in rows.iter_mut().zip(flags) {
            row.detections += usize::from(*hit);
        }
        if let Some(c) = concurrence {
            *pure_entangled.get_or_insert(0) += usize::from(*c > PURE_ENTANGLED_TOL);
        }
    }
    Ok(BenchReport {
        ensemble: ensemble.to_string(),
        samples,
        seed,
        rows,
        pure_entangled,
    })
}

/// `x` with 12 significant digits: plain decimal for moderate magnitudes,
/// scientific otherwise. Never locale dependent.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn verdict_table(out: &mut String, verdicts: &[CriterionVerdict]) {
    let width = verdicts.iter().map(|v| v.name.len()).max().unwrap_or(0).max(9);
    let _ = writeln!(
        out,
        "  {:<width$}  {:>14}  {:>14}  {:>14}  conclusion",
        "criterion", "lhs", "rhs", "margin"
    );
    for v in verdicts {
        let _ = writeln!(
            out,
            "  {:<width$}  {:>14.8}  {:>14.8}  {:>14.8}  {}",
            v.name, v.lhs, v.rhs, v.margin, v.conclusion
        );
    }
}

pub fn render_analysis(report: &AnalysisReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut out = String::from("criterion,lhs,rhs,margin,conclusion\n");
            let pairs = report
                .multipartite
                .iter()
                .flat_map(|m| m.pair_verdicts.iter().flat_map(|p| [&p.hs, &p.kf]));
            for v in report.verdicts.iter().chain(pairs) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    v.name,
                    format_sig(v.lhs),
                    format_sig(v.rhs),
                    format_sig(v.margin),
                    v.conclusion
                );
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            let dims: Vec<String> = report.dims.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "state: {}", report.state_description);
            let _ = writeln!(out, "dims: {}", dims.join("x"));
            let purities: Vec<String> = report
                .purities
                .iter()
                .enumerate()
                .map(|(p, v)| format!("{}={v:.6}", party_label(p)))
                .collect();
            let _ = writeln!(out, "purities: {}", purities.join(" "));
            let _ = writeln!(out, "verdicts:");
            verdict_table(&mut out, &report.verdicts);
            if let Some(m) = &report.multipartite {
                let _ = writeln!(out, "pairwise covariance criteria:");
                let pairs: Vec<CriterionVerdict> = m
                    .pair_verdicts
                    .iter()
                    .flat_map(|p| [p.hs.clone(), p.kf.clone()])
                    .collect();
                verdict_table(&mut out, &pairs);
                let _ = writeln!(out, "full separability refuted: {}", m.full_sep_refuted);
                for cut in &m.bisep_refuted {
                    let _ = writeln!(out, "separability across {} refuted: {}", cut.partition, cut.refuted);
                }
                let _ = writeln!(out, "fully entangled: {}", m.fully_entangled);
            }
            if let Some(b) = &report.bounds {
                let swap = if b.swapped { ", parties swapped" } else { "" };
                let _ = writeln!(out, "concurrence bounds (M={}, N={}{swap}):", b.m, b.n);
                let _ = writeln!(out, "  bound_ccnr_ppt   {:>12.6}", b.bound_ccnr_ppt);
                let _ = writeln!(out, "  bound_lur        {:>12.6}  ({})", b.bound_lur, b.lur_basis);
                let _ = writeln!(out, "  bound_optimized  {:>12.6}", b.bound_optimized);
                if let Some(exact) = b.exact_pure {
                    let _ = writeln!(out, "  exact_pure       {exact:>12.6}");
                }
                let _ = writeln!(out, "  best             {:>12.6}", b.best);
            }
            let timing: Vec<String> = report
                .timing
                .iter()
                .map(|(k, v)| format!("{k}={v:.3}"))
                .collect();
            let _ = writeln!(out, "timing (ms): {}", timing.join(" "));
            Ok(out)
        }
    }
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        Format::Csv => {
            let mut out = SWEEP_COLUMNS.join(",") + "\n";
            for row in rows {
                let cells: Vec<String> = row.values().iter().map(|&v| format_sig(v)).collect();
                out += &(cells.join(",") + "\n");
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            for name in SWEEP_COLUMNS {
                let _ = write!(out, "{name:>14}");
            }
            out.push('\n');
            for row in rows {
                for v in row.values() {
                    let _ = write!(out, "{v:>14.8}");
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn render_bench(report: &BenchReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut out = String::from("criterion,detections,samples\n");
            for row in &report.rows {
                let _ = writeln!(out, "{},{},{}", row.criterion, row.detections, report.samples);
            }
            if let Some(n) = report.pure_entangled {
                let _ = writeln!(out, "pure_concurrence>{PURE_ENTANGLED_TOL:e},{n},{}", report.samples);
            }
            Ok(out)
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "ensemble: {}  samples: {}  seed: {}",
                report.ensemble, report.samples, report.seed
            );
            let width = report.rows.iter().map(|r| r.criterion.len()).max().unwrap_or(0).max(9);
            let _ = writeln!(out, "  {:<width$}  {:>10}", "criterion", "detections");
            for row in &report.rows {
                let _ = writeln!(out, "  {:<width$}  {:>10}", row.criterion, row.detections);
            }
            if let Some(n) = report.pure_entangled {
                let _ = writeln!(out, "states with pure concurrence > {PURE_ENTANGLED_TOL:e}: {n}");
            }
            Ok(out)
        }
    }
}

/// Runs one parsed command, writing its report to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => {
            let report = cmd_analyze(&args.source.spec(), args.tolerance)?;
            out.write_all(render_analysis(&report, args.format)?.as_bytes())?;
            Ok(if report.any_entangled() {
                EXIT_ENTANGLED
            } else {
                EXIT_OK
            })
        }
        Command::Sweep(args) => {
            let rows = cmd_sweep(&args.base, &args.target, &args.grid, args.tolerance)?;
            out.write_all(render_sweep(&rows, args.format)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Bench(args) => {
            let report = cmd_bench(&args.ensemble, args.samples, args.seed, args.tolerance)?;
            out.write_all(render_bench(&report, args.format)?.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args`, runs, and reports errors on standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("covmat: {e}");
            EXIT_ERROR
        }
    }
}
