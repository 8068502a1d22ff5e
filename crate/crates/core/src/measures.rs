//! Measures on the circumference-1 circle `[0, 1)` and conversions between
//! their grid, atomic and Fourier representations.
//!
//! Characters are `e^{2πikx}` and Fourier coefficients follow
//! `f̂(k) = ∫₀¹ f(x) e^{−2πikx} dx`, discretized on the uniform grid
//! `x_j = j/M` as `(1/M) Σ_j f(x_j) e^{−2πik x_j}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of grid samples for densities.
pub const DEFAULT_GRID: usize = 4096;

/// Smallest admissible grid.
pub const MIN_GRID: usize = 4;

/// Tolerance for `Σ weights = total_mass` on atomic measures.
pub const ATOM_MASS_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;

/// Geodesic distance on the circumference-1 circle.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// The usual metric on the torus `ℝ/ℤ`, `d(x, y) = min(|x − y|, 1 − |x − y|)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CircleMetric;

impl CircleMetric {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        circle_distance(x, y)
    }
}

/// `Σ_j x_j e^{sign·2πijk/M}` for every `k`, in place.
fn fft(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

/// Values of the series on the grid `j/m`; requires `m > 2K`.
pub(crate) fn grid_values(s: &FourierSeries, m: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for k in -(s.max_freq() as i64)..=s.max_freq() as i64 {
        buf[k.rem_euclid(m as i64) as usize] += s.coeff(k);
    }
    fft(&mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}

fn check_samples(samples: &[f64], nonnegative: bool) -> Result<()> {
    if samples.len() < MIN_GRID {
        return Err(Error::GridTooSmall(samples.len()));
    }
    for (index, &value) in samples.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite(value));
        }
        if nonnegative && value < 0.0 {
            return Err(Error::NegativeDensity { index, value });
        }
    }
    Ok(())
}

/// A density sampled at `x_j = j/M`, `j = 0..M`, on the circle.
///
/// Constructed as a density the samples are nonnegative; the signed variant
/// carries perturbations and mean-zero functions and is rejected by
/// operations that need a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct TorusDensity {
    samples: Vec<f64>,
    signed: bool,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    samples: Vec<f64>,
    #[serde(rename = "M")]
    m: usize,
    #[serde(default)]
    signed: bool,
    #[serde(default)]
    mean: f64,
}

impl TryFrom<DensityRepr> for TorusDensity {
    type Error = Error;

    fn try_from(r: DensityRepr) -> Result<Self> {
        if r.m != r.samples.len() {
            return Err(Error::InvalidParameter(format!(
                "M = {} but {} samples given",
                r.m,
                r.samples.len()
            )));
        }
        if r.signed {
            TorusDensity::signed(r.samples)
        } else {
            TorusDensity::new(r.samples)
        }
    }
}

impl From<TorusDensity> for DensityRepr {
    fn from(d: TorusDensity) -> Self {
        DensityRepr {
            m: d.samples.len(),
            mean: d.mean(),
            signed: d.signed,
            samples: d.samples,
        }
    }
}

impl TorusDensity {
    /// Nonnegative density.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_samples(&samples, true)?;
        Ok(TorusDensity {
            samples,
            signed: false,
        })
    }

    /// Signed function on the grid (perturbations, mean-zero data).
    pub fn signed(samples: Vec<f64>) -> Result<Self> {
        check_samples(&samples, false)?;
        Ok(TorusDensity {
            samples,
            signed: true,
        })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid(m).map(f).collect())
    }

    pub fn signed_from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::signed(grid(m).map(f).collect())
    }

    /// The constant density `c`.
    pub fn constant(m: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; m])
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// `(1/M) Σ samples`, which is also the total mass on the circle.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let samples = self.samples.iter().map(|v| v * c).collect();
        if self.signed || c < 0.0 {
            Self::signed(samples)
        } else {
            Self::new(samples)
        }
    }

    /// Reinterpret the samples as a nonnegative density, clamping values in
    /// `[−tol, 0)` to zero.
    pub fn into_density(self, tol: f64) -> Result<Self> {
        let samples = self
            .samples
            .into_iter()
            .map(|v| if v < 0.0 && v >= -tol { 0.0 } else { v })
            .collect();
        Self::new(samples)
    }

    /// The same samples as a signed function.
    pub fn into_signed(self) -> Self {
        TorusDensity {
            samples: self.samples,
            signed: true,
        }
    }

    /// Nodes `j/M` for `j = 0..=M`, closing the periodic grid.
    pub fn to_interval(&self) -> IntervalDensity {
        let mut nodes = self.samples.clone();
        nodes.push(self.samples[0]);
        IntervalDensity {
            nodes,
            signed: self.signed,
        }
    }
}

fn grid(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |j| j as f64 / m as f64)
}

/// A function on `[0, 1]` sampled at the `M + 1` nodes `j/M`, `j = 0..=M`,
/// both endpoints included. Densities on the interval need not be periodic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalDensity {
    nodes: Vec<f64>,
    signed: bool,
}

impl IntervalDensity {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        check_samples(&nodes, true)?;
        Ok(IntervalDensity {
            nodes,
            signed: false,
        })
    }

    pub fn signed(nodes: Vec<f64>) -> Result<Self> {
        check_samples(&nodes, false)?;
        Ok(IntervalDensity {
            nodes,
            signed: true,
        })
    }

    /// Samples `f` at `j/m` for `j = 0..=m`.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=m).map(|j| f(j as f64 / m as f64)).collect())
    }

    pub fn signed_from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::signed((0..=m).map(|j| f(j as f64 / m as f64)).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of cells `M`.
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// Trapezoid-rule cumulative integral at every node, starting at 0.
    pub fn cumulative(&self) -> Vec<f64> {
        let h = 1.0 / self.cells() as f64;
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.nodes.len());
        out.push(0.0);
        for w in self.nodes.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }

    /// Trapezoid-rule integral over `[0, 1]`.
    pub fn mass(&self) -> f64 {
        *self.cumulative().last().expect("at least 4 nodes")
    }

    /// `c − self` as a signed function; `uniform_minus(1.0)` gives `1 − g`.
    pub fn uniform_minus(&self, c: f64) -> IntervalDensity {
        IntervalDensity {
            nodes: self.nodes.iter().map(|v| c - v).collect(),
            signed: true,
        }
    }
}

/// A point mass on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(location: f64, weight: f64) -> Self {
        Atom { location, weight }
    }
}

/// Finitely many weighted point masses on `[0, 1)`, sorted by location with
/// coincident locations merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomsRepr")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    total_mass: f64,
}

#[derive(Deserialize)]
struct AtomsRepr {
    atoms: Vec<Atom>,
    total_mass: Option<f64>,
}

impl TryFrom<AtomsRepr> for AtomicMeasure {
    type Error = Error;

    fn try_from(r: AtomsRepr) -> Result<Self> {
        let m = AtomicMeasure::new(r.atoms)?;
        if let Some(total) = r.total_mass {
            if (total - m.total_mass).abs() > ATOM_MASS_TOL * total.abs().max(1.0) {
                return Err(Error::MassMismatch(total, m.total_mass));
            }
        }
        Ok(m)
    }
}

impl AtomicMeasure {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty);
        }
        for a in &atoms {
            if !(a.location.is_finite() && (0.0..1.0).contains(&a.location)) {
                return Err(Error::LocationOutOfRange(a.location));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidWeight(a.weight));
            }
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.location == a.location => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        let total_mass = kahan_sum(merged.iter().map(|a| a.weight));
        Ok(AtomicMeasure {
            atoms: merged,
            total_mass,
        })
    }

    /// Equal weights `1/N` at the given points.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        let w = 1.0 / points.len() as f64;
        Self::new(points.iter().map(|&x| Atom::new(x, w)).collect())
    }

    /// `n` equal atoms at `(j + offset)/n`, `offset ∈ [0, 1)`.
    pub fn lattice(n: usize, offset: f64) -> Result<Self> {
        let pts: Vec<f64> = (0..n).map(|j| (j as f64 + offset) / n as f64).collect();
        Self::from_points(&pts)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.location)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.weight)
    }

    /// Rescaled to total mass one.
    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / self.total_mass)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.location, a.weight * c))
            .collect();
        let total_mass = kahan_sum(atoms.iter().map(|a| a.weight));
        AtomicMeasure { atoms, total_mass }
    }

    /// Every atom moved by `shift` around the circle.
    pub fn rotated(&self, shift: f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let mut x = (a.location + shift).rem_euclid(1.0);
                if x >= 1.0 {
                    x = 0.0;
                }
                Atom::new(x, a.weight)
            })
            .collect();
        Self::new(atoms).expect("rotation keeps atoms valid")
    }
}

pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Complex Fourier coefficients `c_k`, `k = −K..=K`, of a real function or
/// measure; `c_{−k} = conj(c_k)` is enforced on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct FourierSeries {
    max_freq: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    #[serde(rename = "K")]
    k: usize,
    coeffs: Vec<Complex64>,
}

impl TryFrom<SeriesRepr> for FourierSeries {
    type Error = Error;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        if r.coeffs.len() != 2 * r.k + 1 {
            return Err(Error::InvalidParameter(format!(
                "K = {} needs {} coefficients, got {}",
                r.k,
                2 * r.k + 1,
                r.coeffs.len()
            )));
        }
        FourierSeries::new(r.coeffs)
    }
}

impl From<FourierSeries> for SeriesRepr {
    fn from(s: FourierSeries) -> Self {
        SeriesRepr {
            k: s.max_freq,
            coeffs: s.coeffs,
        }
    }
}

impl FourierSeries {
    /// Coefficients ordered `c_{−K}, …, c_0, …, c_K`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "coefficient vector must have odd length 2K+1".into(),
            ));
        }
        let max_freq = coeffs.len() / 2;
        let scale = coeffs.iter().fold(1.0f64, |a, c| a.max(c.norm()));
        for k in 0..=max_freq {
            let (neg, pos) = (coeffs[max_freq - k], coeffs[max_freq + k]);
            if !(pos.re.is_finite() && pos.im.is_finite()) {
                return Err(Error::NonFinite(pos.norm()));
            }
            if (neg - pos.conj()).norm() > HERMITIAN_TOL * scale {
                return Err(Error::NotHermitian(k));
            }
        }
        Ok(FourierSeries { max_freq, coeffs })
    }

    /// Builds an exactly Hermitian series from `c_0` and `c_1..=c_K`.
    pub fn from_positive(c0: f64, positive: &[Complex64]) -> Self {
        let max_freq = positive.len();
        let mut coeffs = Vec::with_capacity(2 * max_freq + 1);
        coeffs.extend(positive.iter().rev().map(|c| c.conj()));
        coeffs.push(Complex64::new(c0, 0.0));
        coeffs.extend_from_slice(positive);
        FourierSeries { max_freq, coeffs }
    }

    pub fn zero(max_freq: usize) -> Self {
        Self::from_positive(0.0, &vec![Complex64::new(0.0, 0.0); max_freq])
    }

    pub fn constant(c0: f64, max_freq: usize) -> Self {
        Self::from_positive(c0, &vec![Complex64::new(0.0, 0.0); max_freq])
    }

    /// `offset + amplitude·sin(2πnx)` with room for frequencies up to `max_freq`.
    pub fn sine(n: usize, amplitude: f64, offset: f64, max_freq: usize) -> Self {
        let mut pos = vec![Complex64::new(0.0, 0.0); max_freq.max(n)];
        if n > 0 {
            pos[n - 1] = Complex64::new(0.0, -0.5 * amplitude);
        }
        Self::from_positive(offset, &pos)
    }

    /// `offset + amplitude·cos(2πnx)`.
    pub fn cosine(n: usize, amplitude: f64, offset: f64, max_freq: usize) -> Self {
        let mut pos = vec![Complex64::new(0.0, 0.0); max_freq.max(n)];
        if n > 0 {
            pos[n - 1] = Complex64::new(0.5 * amplitude, 0.0);
        }
        Self::from_positive(offset, &pos)
    }

    /// Maximum frequency `K`.
    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, zero outside `−K..=K`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k + self.max_freq as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `c_0`, the mean of the represented function.
    pub fn mean(&self) -> f64 {
        self.coeffs[self.max_freq].re
    }

    /// `(k, c_k)` for `k = 1..=K`.
    pub fn positive(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.coeffs[self.max_freq + 1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1, c))
    }

    /// Largest `|c_k|` over `k ≠ 0`.
    pub fn max_nonzero_magnitude(&self) -> f64 {
        self.positive().fold(0.0, |a, (_, c)| a.max(c.norm()))
    }

    /// Applies `c_k ↦ g(k, c_k)` on `k ≥ 0` and mirrors to negative frequencies.
    pub fn map_positive(&self, g: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let c0 = g(0, Complex64::new(self.mean(), 0.0)).re;
        let pos: Vec<Complex64> = self.positive().map(|(k, c)| g(k, c)).collect();
        Self::from_positive(c0, &pos)
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_positive(|_, c| c * a)
    }

    /// The series with `c_0` removed.
    pub fn without_mean(&self) -> Self {
        self.map_positive(|k, c| if k == 0 { Complex64::new(0.0, 0.0) } else { c })
    }

    /// Coefficients of `x ↦ f(x − shift)`.
    pub fn rotated(&self, shift: f64) -> Self {
        self.map_positive(|k, c| c * Complex64::from_polar(1.0, -TAU * k as f64 * shift))
    }

    /// Coefficients of `f′`: `c_k ↦ 2πik c_k`.
    pub fn derivative(&self) -> Self {
        self.map_positive(|k, c| c * Complex64::new(0.0, TAU * k as f64))
    }

    /// Keeps `|k| ≤ cutoff`; the result has `K = min(K, cutoff)`.
    pub fn truncated(&self, cutoff: usize) -> Self {
        let k = cutoff.min(self.max_freq);
        let pos: Vec<Complex64> = self.positive().take(k).map(|(_, c)| c).collect();
        Self::from_positive(self.mean(), &pos)
    }

    /// Zero-padded or truncated to exactly `K = max_freq`.
    pub fn resized(&self, max_freq: usize) -> Self {
        let mut pos: Vec<Complex64> = self.positive().take(max_freq).map(|(_, c)| c).collect();
        pos.resize(max_freq, Complex64::new(0.0, 0.0));
        Self::from_positive(self.mean(), &pos)
    }

    /// Coefficient-wise sum; the result has the larger `K`.
    pub fn add(&self, other: &Self) -> Self {
        let k = self.max_freq.max(other.max_freq);
        let pos: Vec<Complex64> = (1..=k as i64)
            .map(|j| self.coeff(j) + other.coeff(j))
            .collect();
        Self::from_positive(self.mean() + other.mean(), &pos)
    }

    /// `Σ_k c_k e^{2πikx}` (real part).
    pub fn evaluate(&self, x: f64) -> f64 {
        let step = Complex64::from_polar(1.0, TAU * x);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for (k, c) in self.positive() {
            if k % 64 == 0 {
                phase = Complex64::from_polar(1.0, TAU * (k as f64 * x).fract());
            } else {
                phase *= step;
            }
            acc += (c * phase).re;
        }
        self.mean() + 2.0 * acc
    }

    /// Periodic antiderivative `Σ_{k≠0} c_k e^{2πikx}/(2πik)`; only meaningful
    /// for mean-zero series.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let step = Complex64::from_polar(1.0, TAU * x);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for (k, c) in self.positive() {
            if k % 64 == 0 {
                phase = Complex64::from_polar(1.0, TAU * (k as f64 * x).fract());
            } else {
                phase *= step;
            }
            acc += (c * phase / Complex64::new(0.0, TAU * k as f64)).re;
        }
        2.0 * acc
    }

    /// `Σ_k |c_k|²`, the squared L² norm by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Discrete Fourier coefficients `c_k = (1/M) Σ_j f(x_j) e^{−2πik x_j}` for
/// `|k| ≤ K`.
pub fn fourier_of_density(d: &TorusDensity, max_freq: usize) -> Result<FourierSeries> {
    let m = d.grid_size();
    if m < MIN_GRID {
        return Err(Error::GridTooSmall(m));
    }
    if max_freq > m / 2 {
        return Err(Error::Aliasing { k: max_freq, m });
    }
    let mut buf: Vec<Complex64> = d
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft(&mut buf, false);
    let inv = 1.0 / m as f64;
    let pos: Vec<Complex64> = (1..=max_freq)
        .map(|k| {
            // average the two aliases so the result is exactly Hermitian
            let a = buf[k];
            let b = buf[(m - k) % m].conj();
            (a + b) * (0.5 * inv)
        })
        .collect();
    Ok(FourierSeries::from_positive(d.mean(), &pos))
}

/// `c_j = Σ_n w_n e^{−2πij x_n}` for `|j| ≤ K`.
pub fn fourier_of_atoms(a: &AtomicMeasure, max_freq: usize) -> FourierSeries {
    let mut pos = vec![Complex64::new(0.0, 0.0); max_freq];
    for atom in a.atoms() {
        let x = atom.location;
        let step = Complex64::from_polar(1.0, -TAU * x);
        let mut phase = Complex64::new(1.0, 0.0);
        for (i, slot) in pos.iter_mut().enumerate() {
            let j = i + 1;
            // reseed periodically so the rotating phasor does not drift
            if j % 64 == 0 {
                phase = Complex64::from_polar(1.0, -TAU * (j as f64 * x).fract());
            } else {
                phase *= step;
            }
            *slot += phase * atom.weight;
        }
    }
    FourierSeries::from_positive(a.total_mass(), &pos)
}

/// Evaluates the series on the grid `x_j = j/M`.
pub fn synthesize_grid(s: &FourierSeries, m: usize) -> Result<TorusDensity> {
    if m < MIN_GRID {
        return Err(Error::GridTooSmall(m));
    }
    if m < 2 * s.max_freq() + 2 {
        return Err(Error::Aliasing { k: s.max_freq(), m });
    }
    let samples = grid_values(s, m);
    if samples.iter().any(|&v| v < 0.0) {
        TorusDensity::signed(samples)
    } else {
        TorusDensity::new(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constant_density_has_only_mean() {
        let d = TorusDensity::constant(64, 1.0).unwrap();
        let s = fourier_of_density(&d, 8).unwrap();
        assert_eq!(s.mean(), 1.0);
        for (_, c) in s.positive() {
            assert!(c.norm() < 1e-15);
        }
    }

    #[test]
    fn one_plus_cosine_coefficients() {
        let d = TorusDensity::from_fn(256, |x| 1.0 + (TAU * x).cos()).unwrap();
        let s = fourier_of_density(&d, 4).unwrap();
        assert!(close(s.mean(), 1.0, 1e-14));
        assert!((s.coeff(1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((s.coeff(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        for k in 2..=4 {
            assert!(s.coeff(k).norm() < 1e-14);
        }
    }

    #[test]
    fn ramp_coefficients_match_closed_form() {
        // ∫₀¹ 2x e^{−2πikx} dx = −2/(2πik) = i/(πk); |c_k| = 1/(π|k|)
        let d = TorusDensity::from_fn(4096, |x| 2.0 * x).unwrap();
        let s = fourier_of_density(&d, 16).unwrap();
        for k in 1..=16i64 {
            let expected = 1.0 / (std::f64::consts::PI * k as f64);
            assert!(close(s.coeff(k).norm(), expected, 1e-4), "k = {k}");
        }
    }

    #[test]
    fn aliasing_and_small_grid_are_rejected() {
        let d = TorusDensity::constant(8, 1.0).unwrap();
        assert!(matches!(
            fourier_of_density(&d, 5),
            Err(Error::Aliasing { .. })
        ));
        assert!(matches!(
            TorusDensity::constant(3, 1.0),
            Err(Error::GridTooSmall(3))
        ));
        let s = FourierSeries::constant(1.0, 8);
        assert!(matches!(
            synthesize_grid(&s, 16),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn point_mass_at_origin_has_unit_coefficients() {
        let a = AtomicMeasure::new(vec![Atom::new(0.0, 1.0)]).unwrap();
        let s = fourier_of_atoms(&a, 5);
        for k in -5..=5 {
            assert!((s.coeff(k) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_antipodal_atoms_cancel_odd_frequencies() {
        let a = AtomicMeasure::new(vec![Atom::new(0.0, 0.5), Atom::new(0.5, 0.5)]).unwrap();
        let s = fourier_of_atoms(&a, 3);
        assert!(s.coeff(1).norm() < 1e-15);
        assert!((s.coeff(2) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s.coeff(3).norm() < 1e-15);
    }

    #[test]
    fn synthesis_examples() {
        let s = FourierSeries::constant(1.0, 0);
        let d = synthesize_grid(&s, 64).unwrap();
        assert!(d.samples().iter().all(|&v| v == 1.0));

        let s = FourierSeries::cosine(1, 1.0, 0.0, 1);
        let d = synthesize_grid(&s, 128).unwrap();
        for (j, v) in d.samples().iter().enumerate() {
            assert!(close(*v, (TAU * j as f64 / 128.0).cos(), 1e-12));
        }
    }

    #[test]
    fn non_hermitian_series_rejected() {
        let c = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
        ];
        assert!(matches!(FourierSeries::new(c), Err(Error::NotHermitian(1))));
    }

    #[test]
    fn atoms_are_sorted_and_merged() {
        let a = AtomicMeasure::new(vec![
            Atom::new(0.7, 0.25),
            Atom::new(0.1, 0.25),
            Atom::new(0.7, 0.5),
        ])
        .unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.atoms()[0].location, 0.1);
        assert_eq!(a.atoms()[1].weight, 0.75);
        assert!((a.total_mass() - 1.0).abs() < ATOM_MASS_TOL);
        assert!(AtomicMeasure::new(vec![Atom::new(1.0, 1.0)]).is_err());
        assert!(AtomicMeasure::new(vec![Atom::new(0.5, 0.0)]).is_err());
    }

    #[test]
    fn circle_metric_wraps() {
        assert!(close(circle_distance(0.0, 0.75), 0.25, 1e-15));
        assert!(close(circle_distance(0.1, 0.9), 0.2, 1e-15));
        assert_eq!(CircleMetric.distance(0.3, 0.3), 0.0);
    }

    #[test]
    fn evaluate_and_antiderivative_of_sine() {
        let s = FourierSeries::sine(3, 1.0, 0.0, 5);
        for &x in &[0.0, 0.1, 0.37, 0.9] {
            assert!(close(s.evaluate(x), (TAU * 3.0 * x).sin(), 1e-13));
            let anti = -(TAU * 3.0 * x).cos() / (TAU * 3.0);
            assert!(close(s.antiderivative(x), anti, 1e-13));
        }
    }

    #[test]
    fn json_round_trip_validates() {
        let d = TorusDensity::from_fn(8, |x| 1.0 + x).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"M\":8"));
        let back: TorusDensity = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"samples":[1,1,1,-1],"M":4,"signed":false}"#;
        assert!(serde_json::from_str::<TorusDensity>(bad).is_err());

        let s = FourierSeries::sine(2, 1.0, 1.0, 3);
        let back: FourierSeries =
            serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
