//! Reproducible experiments over the library: parameter parsing, parallel
//! row computation, power-law fits and CSV/JSON reports.
//!
//! Every row is produced by public library calls, so any number in a report
//! can be recomputed directly. Random draws use one generator stream per row
//! and rows keep the order of their sorted inputs, which makes output
//! independent of thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    erdos_turan_functional, littlewood_rank_sum, log_weighted_lower_functional, peyre_w2_bound,
    peyre_w2_bound_cdf,
};
use crate::cdf::Cdf;
use crate::discrepancy::{extreme_discrepancy_weighted, star_discrepancy_weighted};
use crate::error::{Error, Result};
use crate::fit::{fit_linear, fit_loglog, SlopeFit};
use crate::heat::{
    critical_point_sides, eigen_split_cost_on_grid, evolve_density, heat_plan_cost,
    high_freq_two_step_cost, uncertainty_sides,
};
use crate::measures::{
    fourier_of_atoms, synthesize_grid, FourierSeries, TorusDensity, DEFAULT_GRID, MIN_GRID,
};
use crate::oracle::quantize;
use crate::ot::{w1_circle, wp_circle};
use crate::random::{
    random_band_poly, random_mean_zero_poly, random_nonnegative_poly, random_probability_density,
    rng_for,
};
use crate::sequences::{
    is_prime, kronecker_measure, log_spaced_primes, quadratic_residue_measure, Alpha,
    KroneckerSpec, PrimeResidueSpec, KRONECKER_MAX_N,
};
use crate::trig;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
const MAX_GRID: usize = 1 << 22;
const MAX_QUADRES_PRIME: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Quadres,
    Kronecker,
    Uncertainty,
    Eigen,
    Heat,
    Littlewood,
    Sandwich,
    Twostep,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::Quadres,
        ExperimentId::Kronecker,
        ExperimentId::Uncertainty,
        ExperimentId::Eigen,
        ExperimentId::Heat,
        ExperimentId::Littlewood,
        ExperimentId::Sandwich,
        ExperimentId::Twostep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Quadres => "quadres",
            ExperimentId::Kronecker => "kronecker",
            ExperimentId::Uncertainty => "uncertainty",
            ExperimentId::Eigen => "eigen",
            ExperimentId::Heat => "heat",
            ExperimentId::Littlewood => "littlewood",
            ExperimentId::Sandwich => "sandwich",
            ExperimentId::Twostep => "twostep",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ExperimentId::ALL.iter().map(|id| id.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown experiment {s:?}, expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter(format!(
                "unknown format {s:?}, expected csv or json"
            ))),
        }
    }
}

/// What to run and how to report it. Keys absent from `params` take the
/// defaults listed by [`manifest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub grid: usize,
    /// Destination file; standard output when absent.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        ExperimentConfig {
            id,
            params: BTreeMap::new(),
            seed: DEFAULT_SEED,
            grid: DEFAULT_GRID,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    /// Checks the id-specific keys and the grid size, and returns the full
    /// parameter map with defaults filled in.
    pub fn resolved(&self) -> Result<BTreeMap<String, String>> {
        if !(MIN_GRID..=MAX_GRID).contains(&self.grid) {
            return Err(Error::InvalidParameter(format!(
                "grid must be in {MIN_GRID}..={MAX_GRID}, got {}",
                self.grid
            )));
        }
        let docs = manifest(self.id).params;
        if let Some(k) = self
            .params
            .keys()
            .find(|k| !docs.iter().any(|d| d.key == k.as_str()))
        {
            let known: Vec<_> = docs.iter().map(|d| d.key).collect();
            return Err(Error::InvalidParameter(format!(
                "experiment {} has no parameter {k:?}, expected one of {}",
                self.id,
                known.join(", ")
            )));
        }
        Ok(docs
            .iter()
            .map(|d| {
                let v = self
                    .params
                    .get(d.key)
                    .cloned()
                    .unwrap_or_else(|| d.default.to_string());
                (d.key.to_string(), v)
            })
            .collect())
    }
}

// ---------------------------------------------------------------------------
// manifest

#[derive(Debug, Clone, Serialize)]
pub struct ParamDoc {
    pub key: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    /// `log y` against `log x`.
    LogLog,
    /// `y` against `x`.
    Linear,
}

impl fmt::Display for FitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitKind::LogLog => "loglog",
            FitKind::Linear => "linear",
        })
    }
}

/// A declared scaling law: the slope of `y` against `x` must satisfy
/// `slope_min < slope <= slope_max`. With `group` set, each distinct value of that column is
/// fitted separately.
#[derive(Debug, Clone, Serialize)]
pub struct Law {
    pub name: &'static str,
    pub x: &'static str,
    pub y: &'static str,
    pub kind: FitKind,
    pub group: Option<&'static str>,
    pub slope_min: Option<f64>,
    pub slope_max: Option<f64>,
    pub min_r_squared: Option<f64>,
}

/// A gate on a summary value: `summary[key] <= limit`.
#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub key: &'static str,
    pub limit: f64,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub id: ExperimentId,
    pub summary: &'static str,
    pub params: Vec<ParamDoc>,
    pub laws: Vec<Law>,
    pub gates: Vec<Gate>,
}

fn param(key: &'static str, default: &'static str, doc: &'static str) -> ParamDoc {
    ParamDoc { key, default, doc }
}

fn law(name: &'static str, x: &'static str, y: &'static str, kind: FitKind) -> Law {
    Law {
        name,
        x,
        y,
        kind,
        group: None,
        slope_min: None,
        slope_max: None,
        min_r_squared: None,
    }
}

impl Law {
    fn slope(mut self, lo: Option<f64>, hi: Option<f64>) -> Self {
        self.slope_min = lo;
        self.slope_max = hi;
        self
    }

    fn r2(mut self, r: f64) -> Self {
        self.min_r_squared = Some(r);
        self
    }

    fn per(mut self, group: &'static str) -> Self {
        self.group = Some(group);
        self
    }
}

fn gate(key: &'static str, limit: f64, doc: &'static str) -> Gate {
    Gate { key, limit, doc }
}

/// Parameters, declared power laws and gates of an experiment.
pub fn manifest(id: ExperimentId) -> Manifest {
    use ExperimentId::*;
    let (summary, params, laws, gates) = match id {
        Quadres => (
            "quadratic residues mod p against the uniform measure: exact W2, the 2*H^-1 upper bound, \
             extreme discrepancy and the Erdos-Turan functional at n = p",
            vec![
                param("primes", "101..4999", "odd primes as a list, or a..b for `count` log-spaced primes in [a, b]; max 20000"),
                param("count", "25", "number of primes drawn from an a..b range"),
            ],
            vec![law("w2_vs_p", "p", "w2", FitKind::LogLog).slope(Some(-0.55), Some(-0.45)).r2(0.98)],
            vec![gate("bound_violations", 0.0, "rows with w2 > 2*||mu_p - 1||_{H^-1}")],
        ),
        Kronecker => (
            "Kronecker points {n alpha}: exact W1 and W2 against uniform, star and extreme discrepancy",
            vec![
                param("alpha", "sqrt2", "sqrt2, golden, or a decimal / a/b fraction in (0,1)"),
                param("N", "128..16384", "point counts as a list, or a..b for the powers of two in [a, b]"),
            ],
            vec![
                law("w2_vs_n", "N", "w2", FitKind::LogLog).slope(Some(-1.05), Some(-0.95)),
                law("star_vs_log_n", "log_n", "n_star_disc", FitKind::Linear).slope(Some(0.0), None),
            ],
            vec![gate("scaled_w2_spread", 3.0, "max/min of N*W2/sqrt(log N)")],
        ),
        Uncertainty => (
            "sign changes times the H^-1 weight against ||f||_1^2/||f||_inf; family sin uses sin(2 pi n x), \
             family random uses seeded mean-zero polynomials",
            vec![
                param("family", "sin", "sin or random"),
                param("n", "1..64", "frequencies for family sin (list or a..b), max 1024"),
                param("count", "1000", "number of random polynomials"),
                param("degree", "32", "maximum degree of the random polynomials, max 256"),
            ],
            vec![law("ratio_vs_n", "n", "ratio", FitKind::LogLog).slope(Some(-0.005), Some(0.005))],
            vec![
                gate("ratio_rel_dev", 0.01, "max |ratio/mean - 1| over the sin family"),
                gate("nonpositive_ratios", 0.0, "random polynomials with ratio <= 0"),
            ],
        ),
        Eigen => (
            "W_p between the positive and negative parts of sin(2 pi n x), mass-normalized",
            vec![
                param("n", "1..64", "frequencies (list or a..b), max 1024; the grid is raised to 64n when needed"),
                param("p", "1,2", "exponents >= 1"),
            ],
            vec![law("cost_vs_n", "n", "cost", FitKind::LogLog).per("p").slope(Some(-1.05), Some(-0.95))],
            vec![],
        ),
        Heat => (
            "heat-kernel coupling cost against the exact W_p(f, e^{t Laplacian} f); density 0 is 1+cos(2 pi x), \
             the others are seeded random polynomial densities",
            vec![
                param("t", "1e-5..1e-2", "times in (0, 1] as a list, or a..b for `count` log-spaced times"),
                param("count", "7", "number of times drawn from an a..b range"),
                param("p", "2", "exponent >= 1"),
                param("densities", "4", "number of random densities besides 1+cos(2 pi x)"),
                param("degree", "16", "maximum degree of the random densities"),
            ],
            vec![law("plan_vs_t", "t", "plan_cost", FitKind::LogLog)
                .per("density")
                .slope(Some(0.45), Some(0.55))
                .r2(0.99)],
            vec![gate("violations", 0.0, "rows where the plan is cheaper than the optimum")],
        ),
        Littlewood => (
            "sum_j |c_{k_j}|/j over the spectrum against ||f||_1; family dirichlet is sum_{k<=K} cos(2 pi k x), \
             family sparse has K random frequencies in [1, 8K] with random signs",
            vec![
                param("family", "dirichlet", "dirichlet or sparse"),
                param("K", "4..1024", "number of terms as a list, or a..b for the powers of two in [a, b]; max 4096"),
            ],
            vec![],
            vec![],
        ),
        Sandwich => (
            "random nonnegative polynomials |P|^2 of mean one: log-weighted lower functional, exact W1 and W2, \
             the 2*H^-1 bound, the best Erdos-Turan value and the extreme discrepancy of a quantization",
            vec![
                param("count", "500", "number of polynomials"),
                param("degree", "64", "maximum degree, max 256; the grid must be at least 8x the degree"),
                param("atoms", "4096", "cells of the quantization used for discrepancy"),
            ],
            vec![],
            vec![
                gate("lower_violations", 0.0, "rows with lower > 10*W1"),
                gate("upper_violations", 0.0, "rows with W1 > 2*extreme discrepancy"),
                gate("peyre_violations", 0.0, "rows with W2 > 2*||f - 1||_{H^-1}"),
            ],
        ),
        Twostep => (
            "heat-then-diameter plan between the sign parts of a high-frequency function against the exact W_p; \
             family sin uses sin(2 pi n x) with band edge n, family random uses seeded band-limited polynomials",
            vec![
                param("family", "sin", "sin or random"),
                param("n", "2..64", "frequencies for family sin (list or a..b), 2..=256"),
                param("p", "1", "exponent >= 1"),
                param("count", "20", "number of random polynomials"),
                param("k0", "16", "lowest frequency of the random polynomials"),
                param("width", "16", "spectrum of the random polynomials is k0..=k0+width"),
            ],
            vec![],
            vec![gate("c_max", 10.0, "max of (realized/exact)/sqrt(log n) over the sin family")],
        ),
    };
    Manifest {
        id,
        summary,
        params,
        laws,
        gates,
    }
}

impl Manifest {
    /// Human-readable listing used by `--describe`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}: {}\n", self.id, self.summary);
        s.push_str("  parameters (plus seed, grid):\n");
        for p in &self.params {
            s.push_str(&format!("    {} = {}  ({})\n", p.key, p.default, p.doc));
        }
        for l in &self.laws {
            let lo = l.slope_min.map_or("-inf".to_string(), |v| v.to_string());
            let hi = l.slope_max.map_or("inf".to_string(), |v| v.to_string());
            s.push_str(&format!(
                "  law {}: {} slope of {} vs {} in ({lo}, {hi}]",
                l.name, l.kind, l.y, l.x
            ));
            if let Some(r) = l.min_r_squared {
                s.push_str(&format!(", r^2 >= {r}"));
            }
            if let Some(g) = l.group {
                s.push_str(&format!(", per {g}"));
            }
            s.push('\n');
        }
        for g in &self.gates {
            s.push_str(&format!("  gate {} <= {}  ({})\n", g.key, g.limit, g.doc));
        }
        s
    }
}

// ---------------------------------------------------------------------------
// output

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            // shortest round-trip form, exponent notation outside [1e-5, 1e16)
            Cell::Real(v) => write!(f, "{v:?}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; `None` if it is missing or textual.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOutcome {
    pub law: String,
    /// Value of the grouping column this fit covers.
    pub group: Option<String>,
    pub fit: SlopeFit,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateOutcome {
    pub key: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub schema: u32,
    pub experiment: ExperimentId,
    pub seed: u64,
    pub grid: usize,
    pub params: BTreeMap<String, String>,
    pub fits: Vec<FitOutcome>,
    pub summary: BTreeMap<String, f64>,
    pub gates: Vec<GateOutcome>,
    pub table: Table,
}

impl ExperimentOutput {
    /// True when every fit and gate passed.
    pub fn passed(&self) -> bool {
        self.fits.iter().all(|f| f.pass) && self.gates.iter().all(|g| g.pass)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.table.column(name)
    }

    /// First fit of the named law (or of a given group of it).
    pub fn fit(&self, law: &str, group: Option<&str>) -> Option<&FitOutcome> {
        self.fits
            .iter()
            .find(|f| f.law == law && (group.is_none() || f.group.as_deref() == group))
    }

    /// CSV with `#` comment lines for schema, inputs, fits and gates ahead
    /// of the header row.
    pub fn to_csv(&self) -> Result<String> {
        let mut head = format!(
            "# schema={}\n# experiment={} seed={} grid={}",
            self.schema, self.experiment, self.seed, self.grid
        );
        for (k, v) in &self.params {
            head.push_str(&format!(" {k}={v}"));
        }
        head.push('\n');
        for f in &self.fits {
            head.push_str(&format!("# fit {}", f.law));
            if let Some(g) = &f.group {
                head.push_str(&format!(" group={g}"));
            }
            head.push_str(&format!(
                " slope={:?} intercept={:?} r_squared={:?} pass={}\n",
                f.fit.slope, f.fit.intercept, f.fit.r_squared, f.pass
            ));
        }
        for (k, v) in &self.summary {
            head.push_str(&format!("# summary {k}={v:?}\n"));
        }
        for g in &self.gates {
            head.push_str(&format!(
                "# gate {}={:?} limit={:?} pass={}\n",
                g.key, g.value, g.limit, g.pass
            ));
        }
        let mut wtr = csv::Writer::from_writer(head.into_bytes());
        wtr.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            wtr.write_record(row.iter().map(|c| c.to_string()))?;
        }
        let bytes = wtr
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json().map(|s| s + "\n"),
        }
    }
}

// ---------------------------------------------------------------------------
// parameter parsing

fn bad(key: &str, msg: impl fmt::Display) -> Error {
    Error::InvalidParameter(format!("{key}: {msg}"))
}

fn parse_num<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| bad(key, format!("{s:?} is not a valid number")))
}

fn split_range(s: &str) -> Option<(&str, &str)> {
    s.split_once("..")
}

/// `a..b` (all integers, inclusive), a comma list, or a single value;
/// sorted and deduplicated, each within `lo..=hi`.
fn int_values(key: &str, s: &str, lo: u64, hi: u64) -> Result<Vec<u64>> {
    let mut v: Vec<u64> = match split_range(s) {
        Some((a, b)) => {
            let (a, b) = (parse_num::<u64>(key, a)?, parse_num::<u64>(key, b)?);
            if a > b {
                return Err(bad(key, format!("empty range {a}..{b}")));
            }
            if a < lo || b > hi {
                return Err(bad(key, format!("range {a}..{b} outside {lo}..={hi}")));
            }
            (a..=b).collect()
        }
        None => s
            .split(',')
            .map(|t| parse_num(key, t))
            .collect::<Result<_>>()?,
    };
    v.sort_unstable();
    v.dedup();
    if let Some(x) = v.iter().find(|&&x| x < lo || x > hi) {
        return Err(bad(key, format!("{x} outside {lo}..={hi}")));
    }
    if v.is_empty() {
        return Err(bad(key, "no values"));
    }
    Ok(v)
}

/// Like [`int_values`], but an `a..b` range yields the powers of two in it.
fn pow2_values(key: &str, s: &str, lo: u64, hi: u64) -> Result<Vec<u64>> {
    match split_range(s) {
        Some(_) => {
            let all = int_values(key, s, lo, hi)?;
            let (a, b) = (all[0], *all.last().unwrap());
            let v: Vec<u64> = (0..64)
                .map(|e| 1u64 << e)
                .filter(|x| (a..=b).contains(x))
                .collect();
            if v.is_empty() {
                return Err(bad(key, format!("no powers of two in {a}..{b}")));
            }
            Ok(v)
        }
        None => int_values(key, s, lo, hi),
    }
}

/// A list of reals, or `count` log-spaced values across `a..b`.
fn real_values(key: &str, s: &str, count: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = match split_range(s) {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (parse_num(key, a)?, parse_num(key, b)?);
            if !(a > 0.0 && a < b) {
                return Err(bad(key, format!("range {a}..{b} must satisfy 0 < a < b")));
            }
            if count < 2 {
                return Err(bad(key, "a range needs count >= 2"));
            }
            let (la, lb) = (a.ln(), b.ln());
            (0..count)
                .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
        None => s
            .split(',')
            .map(|t| parse_num(key, t))
            .collect::<Result<_>>()?,
    };
    if let Some(x) = v.iter().find(|&&x| !(x >= lo && x <= hi)) {
        return Err(bad(key, format!("{x} outside [{lo}, {hi}]")));
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    if v.is_empty() {
        return Err(bad(key, "no values"));
    }
    Ok(v)
}

fn exponent_values(key: &str, s: &str) -> Result<Vec<f64>> {
    let v = real_values(key, s, 0, 1.0, 1e6)?;
    if split_range(s).is_some() {
        return Err(bad(key, "exponents take a list, not a range"));
    }
    Ok(v)
}

fn single_exponent(key: &str, s: &str) -> Result<f64> {
    match exponent_values(key, s)?.as_slice() {
        [p] => Ok(*p),
        _ => Err(bad(key, "expected a single exponent")),
    }
}

fn bounded_usize(key: &str, s: &str, lo: usize, hi: usize) -> Result<usize> {
    let v: usize = parse_num(key, s)?;
    if !(lo..=hi).contains(&v) {
        return Err(bad(key, format!("{v} outside {lo}..={hi}")));
    }
    Ok(v)
}

fn family<'a>(key: &str, s: &'a str, allowed: &[&str]) -> Result<&'a str> {
    if allowed.contains(&s) {
        Ok(s)
    } else {
        Err(bad(
            key,
            format!("unknown family {s:?}, expected {}", allowed.join(" or ")),
        ))
    }
}

// ---------------------------------------------------------------------------
// experiments

type Rows = Vec<Vec<Cell>>;
type Summary = BTreeMap<String, f64>;

fn count_where(flags: impl Iterator<Item = bool>) -> f64 {
    flags.filter(|&b| b).count() as f64
}

fn quadres(p: &BTreeMap<String, String>) -> Result<(Table, Summary)> {
    let count = bounded_usize("count", &p["count"], 1, 10_000)?;
    let spec = &p["primes"];
    let primes = match split_range(spec) {
        Some(_) => {
            let r = int_values("primes", spec, 3, MAX_QUADRES_PRIME)?;
            let v = log_spaced_primes(r[0], *r.last().unwrap(), count);
            if v.is_empty() {
                return Err(bad("primes", format!("no primes in {spec}")));
            }
            v
        }
        None => int_values("primes", spec, 3, MAX_QUADRES_PRIME)?,
    };
    if let Some(q) = primes.iter().find(|&&q| !is_prime(q)) {
        return Err(bad("primes", format!("{q} is not an odd prime")));
    }
    let rows: Rows = primes
        .par_iter()
        .map(|&q| -> Result<Vec<Cell>> {
            let mu = quadratic_residue_measure(PrimeResidueSpec::new(q)?);
            let f = Cdf::from_atoms(&mu);
            let u = Cdf::uniform(1.0);
            let w1 = w1_circle(&f, &u)?.cost;
            let w2 = wp_circle(&f, &u, 2.0)?.cost;
            let bound = peyre_w2_bound_cdf(&f)?;
            let disc = extreme_discrepancy_weighted(&mu);
            let et = erdos_turan_functional(&fourier_of_atoms(&mu, q as usize), q as usize)?;
            Ok(vec![
                q.into(),
                w1.into(),
                w2.into(),
                bound.into(),
                disc.into(),
                et.into(),
                (w2 <= bound).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let t = Table::new(
        &[
            "p",
            "w1",
            "w2",
            "h_minus_one_bound",
            "extreme_disc",
            "erdos_turan_at_p",
            "bound_holds",
        ],
        rows,
    );
    let holds = t.column("bound_holds").unwrap();
    let mut s = Summary::new();
    s.insert(
        "bound_violations".into(),
        count_where(holds.iter().map(|&h| h == 0.0)),
    );
    Ok((t, s))
}

fn kronecker(p: &BTreeMap<String, String>) -> Result<(Table, Summary)> {
    let alpha: Alpha = p["alpha"].parse()?;
    alpha.rotation()?;
    let ns = pow2_values("N", &p["N"], 2, KRONECKER_MAX_N as u64)?;
    let rows: Rows = ns
        .par_iter()
        .map(|&n| -> Result<Vec<Cell>> {
            let n = n as usize;
            let spec = KroneckerSpec::new(alpha.clone(), n)?;
            let mu = kronecker_measure(&alpha, n)?;
            let f = Cdf::from_atoms(&mu);
            let u = Cdf::uniform(1.0);
            let w1 = w1_circle(&f, &u)?.cost;
            let w2 = wp_circle(&f, &u, 2.0)?.cost;
            let star = star_discrepancy_weighted(&mu);
            let ext = extreme_discrepancy_weighted(&mu);
            let nf = n as f64;
            Ok(vec![
                n.into(),
                nf.ln().into(),
                w1.into(),
                w2.into(),
                star.into(),
                ext.into(),
                (nf * star).into(),
                (nf * w2 / nf.ln().sqrt()).into(),
                spec.c_estimate.into(),
            ])
        })
        .collect::<Result<_>>()?;
    let t = Table::new(
        &[
            "N",
            "log_n",
            "w1",
            "w2",
            "star_disc",
            "extreme_disc",
            "n_star_disc",
            "scaled_w2",
            "c_estimate",
        ],
        rows,
    );
    let scaled = t.column("scaled_w2").unwrap();
    let max = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let min = scaled.iter().cloned().fold(f64::MAX, f64::min);
    let mut s = Summary::new();
    s.insert("scaled_w2_spread".into(), max / min);
    Ok((t, s))
}

fn uncertainty(p: &BTreeMap<String, String>, seed: u64) -> Result<(Table, Summary)> {
    let mut s = Summary::new();
    match family("family", &p["family"], &["sin", "random"])? {
        "sin" => {
            let ns = int_values("n", &p["n"], 1, 1024)?;
            let rows: Rows = ns
                .par_iter()
                .map(|&n| -> Result<Vec<Cell>> {
                    let f = FourierSeries::sine(n as usize, 1.0, 0.0, n as usize);
                    let u = uncertainty_sides(&f)?;
                    let c = critical_point_sides(&f)?;
                    Ok(vec![
                        n.into(),
                        u.count.into(),
                        u.lhs.into(),
                        u.rhs.into(),
                        u.ratio.into(),
                        c.count.into(),
                        c.ratio.into(),
                    ])
                })
                .collect::<Result<_>>()?;
            let t = Table::new(
                &[
                    "n",
                    "roots",
                    "lhs",
                    "rhs",
                    "ratio",
                    "critical_points",
                    "critical_ratio",
                ],
                rows,
            );
            let r = t.column("ratio").unwrap();
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            s.insert("ratio_mean".into(), mean);
            s.insert(
                "ratio_rel_dev".into(),
                r.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max),
            );
            Ok((t, s))
        }
        _ => {
            let count = bounded_usize("count", &p["count"], 1, 1_000_000)?;
            let max_degree = bounded_usize("degree", &p["degree"], 1, 256)?;
            let rows: Rows = (0..count)
                .into_par_iter()
                .map(|i| -> Result<Vec<Cell>> {
                    let mut rng = rng_for(seed, i as u64);
                    let degree = rng.gen_range(1..=max_degree);
                    let f = random_mean_zero_poly(&mut rng, degree);
                    let u = uncertainty_sides(&f)?;
                    Ok(vec![
                        i.into(),
                        degree.into(),
                        u.count.into(),
                        u.lhs.into(),
                        u.rhs.into(),
                        u.ratio.into(),
                    ])
                })
                .collect::<Result<_>>()?;
            let t = Table::new(&["index", "degree", "roots", "lhs", "rhs", "ratio"], rows);
            let r = t.column("ratio").unwrap();
            s.insert(
                "nonpositive_ratios".into(),
                count_where(r.iter().map(|&v| !(v > 0.0))),
            );
            s.insert(
                "ratio_min".into(),
                r.iter().cloned().fold(f64::MAX, f64::min),
            );
            Ok((t, s))
        }
    }
}

fn eigen(p: &BTreeMap<String, String>, grid: usize) -> Result<(Table, Summary)> {
    let ns = int_values("n", &p["n"], 1, 1024)?;
    let ps = exponent_values("p", &p["p"])?;
    let jobs: Vec<(f64, u64)> = ps
        .iter()
        .flat_map(|&q| ns.iter().map(move |&n| (q, n)))
        .collect();
    let rows: Rows = jobs
        .par_iter()
        .map(|&(q, n)| -> Result<Vec<Cell>> {
            let m = grid.max(64 * n as usize);
            let cost = eigen_split_cost_on_grid(n as usize, q, m)?;
            Ok(vec![
                q.into(),
                n.into(),
                m.into(),
                cost.into(),
                (n as f64 * cost).into(),
            ])
        })
        .collect::<Result<_>>()?;
    Ok((
        Table::new(&["p", "n", "grid", "cost", "n_times_cost"], rows),
        Summary::new(),
    ))
}

fn heat(p: &BTreeMap<String, String>, seed: u64, grid: usize) -> Result<(Table, Summary)> {
    let count = bounded_usize("count", &p["count"], 2, 1000)?;
    let ts = real_values("t", &p["t"], count, 1e-12, 1.0)?;
    let q = single_exponent("p", &p["p"])?;
    let extra = bounded_usize("densities", &p["densities"], 0, 10_000)?;
    let max_degree = bounded_usize("degree", &p["degree"], 1, grid / 8)?;
    let densities: Vec<TorusDensity> = (0..=extra)
        .map(|i| {
            if i == 0 {
                TorusDensity::from_fn(grid, |x| 1.0 + (std::f64::consts::TAU * x).cos())
            } else {
                random_probability_density(&mut rng_for(seed, i as u64), grid, max_degree)
            }
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, f64)> = (0..=extra)
        .flat_map(|i| ts.iter().map(move |&t| (i, t)))
        .collect();
    let rows: Rows = jobs
        .par_iter()
        .map(|&(i, t)| -> Result<Vec<Cell>> {
            let d = &densities[i];
            let plan = heat_plan_cost(d, t, q)?;
            let evolved = evolve_density(d, t)?;
            let exact = wp_circle(&Cdf::from_density(d)?, &Cdf::from_density(&evolved)?, q)?.cost;
            let holds = plan >= exact * (1.0 - 1e-9);
            Ok(vec![
                i.into(),
                t.into(),
                q.into(),
                plan.into(),
                exact.into(),
                (plan / t.sqrt()).into(),
                holds.into(),
            ])
        })
        .collect::<Result<_>>()?;
    let t = Table::new(
        &[
            "density",
            "t",
            "p",
            "plan_cost",
            "exact",
            "plan_over_sqrt_t",
            "holds",
        ],
        rows,
    );
    let mut s = Summary::new();
    let holds = t.column("holds").unwrap();
    s.insert(
        "violations".into(),
        count_where(holds.iter().map(|&h| h == 0.0)),
    );
    Ok((t, s))
}

fn littlewood(p: &BTreeMap<String, String>, seed: u64) -> Result<(Table, Summary)> {
    let fam = family("family", &p["family"], &["dirichlet", "sparse"])?;
    let ks = pow2_values("K", &p["K"], 1, 4096)?;
    let rows: Rows = ks
        .par_iter()
        .map(|&k| -> Result<Vec<Cell>> {
            let k = k as usize;
            let s = match fam {
                "dirichlet" => FourierSeries::from_positive(
                    0.0,
                    &vec![num_complex::Complex64::new(0.5, 0.0); k],
                ),
                _ => {
                    let mut rng = rng_for(seed, k as u64);
                    let top = 8 * k;
                    let freqs = rand::seq::index::sample(&mut rng, top, k);
                    let mut pos = vec![num_complex::Complex64::new(0.0, 0.0); top];
                    for f in freqs.iter() {
                        pos[f] = num_complex::Complex64::new(
                            if rng.gen::<bool>() { 0.5 } else { -0.5 },
                            0.0,
                        );
                    }
                    FourierSeries::from_positive(0.0, &pos)
                }
            };
            let lhs = littlewood_rank_sum(&s);
            let l1 = trig::l1_norm(&s)?;
            Ok(vec![
                k.into(),
                s.max_freq().into(),
                lhs.into(),
                l1.into(),
                (lhs / l1).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let t = Table::new(&["K", "max_freq", "lhs", "l1", "ratio"], rows);
    let r = t.column("ratio").unwrap();
    let mut s = Summary::new();
    s.insert(
        "ratio_max".into(),
        r.iter().cloned().fold(f64::MIN, f64::max),
    );
    s.insert(
        "ratio_min".into(),
        r.iter().cloned().fold(f64::MAX, f64::min),
    );
    Ok((t, s))
}

fn sandwich(p: &BTreeMap<String, String>, seed: u64, grid: usize) -> Result<(Table, Summary)> {
    let count = bounded_usize("count", &p["count"], 1, 100_000)?;
    let max_degree = bounded_usize("degree", &p["degree"], 1, 256)?;
    let atoms = bounded_usize(
        "atoms",
        &p["atoms"],
        16,
        crate::discrepancy::EXTREME_MAX_POINTS,
    )?;
    if grid < 8 * max_degree {
        return Err(bad(
            "grid",
            format!("{grid} is below 8x the degree {max_degree}"),
        ));
    }
    let rows: Rows = (0..count)
        .into_par_iter()
        .map(|i| -> Result<Vec<Cell>> {
            let mut rng = rng_for(seed, i as u64);
            let degree = rng.gen_range(1..=max_degree);
            let s = random_nonnegative_poly(&mut rng, degree);
            let sup = trig::sup_norm(&s);
            let lower = log_weighted_lower_functional(&s, sup)?;
            let g = synthesize_grid(&s, grid)?.into_density(1e-12)?;
            let d = g.scaled(1.0 / g.mean())?;
            let mu = Cdf::from_density(&d)?;
            let u = Cdf::uniform(mu.total_mass());
            let w1 = w1_circle(&mu, &u)?.cost;
            let w2 = wp_circle(&mu, &u, 2.0)?.cost;
            let peyre = peyre_w2_bound(&d)?;
            let et = (1..=degree)
                .map(|n| erdos_turan_functional(&s, n))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::MAX, f64::min);
            let disc = extreme_discrepancy_weighted(&quantize(&d, atoms)?);
            Ok(vec![
                i.into(),
                degree.into(),
                sup.into(),
                lower.into(),
                w1.into(),
                w2.into(),
                peyre.into(),
                et.into(),
                disc.into(),
                (lower / w1).into(),
                (w1 / disc).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let t = Table::new(
        &[
            "index",
            "degree",
            "sup",
            "lower",
            "w1",
            "w2",
            "peyre_bound",
            "erdos_turan_opt",
            "extreme_disc",
            "lower_over_w1",
            "w1_over_disc",
        ],
        rows,
    );
    let col = |c: &str| t.column(c).unwrap();
    let (lower, w1, w2, peyre, disc) = (
        col("lower"),
        col("w1"),
        col("w2"),
        col("peyre_bound"),
        col("extreme_disc"),
    );
    let mut s = Summary::new();
    s.insert(
        "lower_violations".into(),
        count_where(lower.iter().zip(&w1).map(|(l, w)| l > &(10.0 * w))),
    );
    s.insert(
        "upper_violations".into(),
        count_where(w1.iter().zip(&disc).map(|(w, d)| w > &(2.0 * d))),
    );
    s.insert(
        "peyre_violations".into(),
        count_where(w2.iter().zip(&peyre).map(|(w, b)| w > b)),
    );
    s.insert(
        "max_lower_over_w1".into(),
        col("lower_over_w1").into_iter().fold(0.0, f64::max),
    );
    s.insert(
        "max_w1_over_disc".into(),
        col("w1_over_disc").into_iter().fold(0.0, f64::max),
    );
    Ok((t, s))
}

fn twostep(p: &BTreeMap<String, String>, seed: u64) -> Result<(Table, Summary)> {
    let q = single_exponent("p", &p["p"])?;
    let mut s = Summary::new();
    let cols = [
        "k0",
        "t",
        "heat_cost",
        "remainder_cost",
        "realized",
        "exact",
        "ratio",
    ];
    let fields = |c: crate::heat::TwoStepCost| -> Vec<Cell> {
        vec![
            c.k0.into(),
            c.t.into(),
            c.heat_cost.into(),
            c.remainder_cost.into(),
            c.realized.into(),
            c.exact.into(),
            c.ratio().into(),
        ]
    };
    match family("family", &p["family"], &["sin", "random"])? {
        "sin" => {
            let ns = int_values("n", &p["n"], 2, 256)?;
            let rows: Rows = ns
                .par_iter()
                .map(|&n| -> Result<Vec<Cell>> {
                    let f = FourierSeries::sine(n as usize, 1.0, 0.0, n as usize);
                    let c = high_freq_two_step_cost(&f, n as usize, q)?;
                    let mut row = vec![n.into(), q.into()];
                    row.extend(fields(c));
                    row.push((c.ratio() / (n as f64).ln().sqrt()).into());
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            let mut names = vec!["n", "p"];
            names.extend(cols);
            names.push("c_estimate");
            let t = Table::new(&names, rows);
            s.insert(
                "c_max".into(),
                t.column("c_estimate")
                    .unwrap()
                    .into_iter()
                    .fold(0.0, f64::max),
            );
            Ok((t, s))
        }
        _ => {
            let count = bounded_usize("count", &p["count"], 1, 100_000)?;
            let k0 = bounded_usize("k0", &p["k0"], 1, 1024)?;
            let width = bounded_usize("width", &p["width"], 0, 1024)?;
            let rows: Rows = (0..count)
                .into_par_iter()
                .map(|i| -> Result<Vec<Cell>> {
                    let f = random_band_poly(&mut rng_for(seed, i as u64), k0, k0 + width);
                    let c = high_freq_two_step_cost(&f, k0, q)?;
                    let mut row = vec![i.into(), q.into()];
                    row.extend(fields(c));
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            let mut names = vec!["index", "p"];
            names.extend(cols);
            let t = Table::new(&names, rows);
            s.insert(
                "ratio_min".into(),
                t.column("ratio")
                    .unwrap()
                    .into_iter()
                    .fold(f64::MAX, f64::min),
            );
            Ok((t, s))
        }
    }
}

fn fit_laws(table: &Table, laws: &[Law]) -> Result<Vec<FitOutcome>> {
    let mut out = Vec::new();
    for l in laws {
        let (Some(xi), Some(yi)) = (table.index(l.x), table.index(l.y)) else {
            continue;
        };
        let mut groups: Vec<(Option<String>, Vec<f64>, Vec<f64>)> = Vec::new();
        for row in &table.rows {
            let key = l
                .group
                .and_then(|g| table.index(g))
                .map(|gi| row[gi].to_string());
            let (Some(x), Some(y)) = (row[xi].as_f64(), row[yi].as_f64()) else {
                continue;
            };
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => {
                    g.1.push(x);
                    g.2.push(y);
                }
                None => groups.push((key, vec![x], vec![y])),
            }
        }
        for (group, xs, ys) in groups {
            if xs.len() < 3 {
                continue;
            }
            let fit = match l.kind {
                FitKind::LogLog => fit_loglog(&xs, &ys)?,
                FitKind::Linear => fit_linear(&xs, &ys)?,
            };
            let pass = l.slope_min.is_none_or(|lo| fit.slope > lo)
                && l.slope_max.is_none_or(|hi| fit.slope <= hi)
                && l.min_r_squared.is_none_or(|r| fit.r_squared >= r);
            out.push(FitOutcome {
                law: l.name.to_string(),
                group,
                fit,
                pass,
            });
        }
    }
    Ok(out)
}

/// Runs an experiment: validates the configuration, computes every row,
/// fits the declared laws and evaluates the gates.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.resolved()?;
    let (table, summary) = match cfg.id {
        ExperimentId::Quadres => quadres(&params)?,
        ExperimentId::Kronecker => kronecker(&params)?,
        ExperimentId::Uncertainty => uncertainty(&params, cfg.seed)?,
        ExperimentId::Eigen => eigen(&params, cfg.grid)?,
        ExperimentId::Heat => heat(&params, cfg.seed, cfg.grid)?,
        ExperimentId::Littlewood => littlewood(&params, cfg.seed)?,
        ExperimentId::Sandwich => sandwich(&params, cfg.seed, cfg.grid)?,
        ExperimentId::Twostep => twostep(&params, cfg.seed)?,
    };
    let m = manifest(cfg.id);
    let fits = fit_laws(&table, &m.laws)?;
    let gates = m
        .gates
        .iter()
        .filter_map(|g| {
            summary.get(g.key).map(|&value| GateOutcome {
                key: g.key.to_string(),
                value,
                limit: g.limit,
                pass: value <= g.limit,
            })
        })
        .collect();
    Ok(ExperimentOutput {
        schema: SCHEMA_VERSION,
        experiment: cfg.id,
        seed: cfg.seed,
        grid: cfg.grid,
        params,
        fits,
        summary,
        gates,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
            assert!(!manifest(id).to_text().is_empty());
        }
        assert!("nope".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn range_parsing() {
        assert_eq!(int_values("n", "3..6", 1, 10).unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(int_values("n", "5,2,5", 1, 10).unwrap(), vec![2, 5]);
        assert!(int_values("n", "6..3", 1, 10).is_err());
        assert!(int_values("n", "0..3", 1, 10).is_err());
        assert!(int_values("n", "x", 1, 10).is_err());
        assert_eq!(
            pow2_values("N", "100..1000", 2, 1 << 20).unwrap(),
            vec![128, 256, 512]
        );
        assert!(pow2_values("N", "5..7", 2, 100).is_err());
        let t = real_values("t", "1e-4..1e-2", 3, 0.0, 1.0).unwrap();
        assert!((t[1] - 1e-3).abs() < 1e-15);
        assert!(real_values("t", "1e-2..1e-4", 3, 0.0, 1.0).is_err());
        assert!(exponent_values("p", "0.5").is_err());
    }

    #[test]
    fn unknown_and_out_of_range_parameters_are_rejected() {
        let cfg = ExperimentConfig::new(ExperimentId::Eigen).with("bogus", 1);
        assert!(matches!(
            run_experiment(&cfg),
            Err(Error::InvalidParameter(_))
        ));
        let cfg = ExperimentConfig::new(ExperimentId::Quadres).with("primes", "15");
        assert!(run_experiment(&cfg).is_err());
        let cfg = ExperimentConfig::new(ExperimentId::Eigen).with_grid(1);
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn small_runs_are_deterministic_and_carry_headers() {
        let cfg = ExperimentConfig::new(ExperimentId::Sandwich)
            .with("count", 6)
            .with("degree", 8)
            .with("atoms", 256)
            .with_grid(512);
        let a = run_experiment(&cfg).unwrap().to_csv().unwrap();
        let b = run_experiment(&cfg).unwrap().to_csv().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("# schema=1\n"));
        assert!(a.contains("\nindex,degree,sup,"));
        assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 7);
    }

    #[test]
    fn eigen_rows_are_grouped_by_exponent() {
        let cfg = ExperimentConfig::new(ExperimentId::Eigen)
            .with("n", "1..6")
            .with("p", "2,1");
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(
            out.column("p").unwrap(),
            [1.0; 6]
                .iter()
                .chain(&[2.0; 6])
                .cloned()
                .collect::<Vec<_>>()
        );
        assert_eq!(out.fits.len(), 2);
        let json = out.to_json().unwrap();
        assert!(json.contains("\"experiment\": \"eigen\""));
    }
}
