//! Cumulative distribution functions of nonnegative measures on `[0, 1)`.
//!
//! A [`Cdf`] is stored as a monotone polyline through vertices `(x_i, F_i)`
//! from `(0, 0)` to `(1, mass)`. Repeated `x` encodes a jump (an atom) and a
//! sloped segment encodes absolutely continuous mass. Reading the same
//! vertices with the axes swapped gives the quantile function, so both views
//! are exact and piecewise linear.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, IntervalDensity, TorusDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CdfKind {
    Step,
    PiecewiseLinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cdf {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    kind: CdfKind,
}

/// A linear function on `[s0, s1]` taking values `y0`, `y1` at the ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub s0: f64,
    pub s1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Piece {
    pub fn at(&self, s: f64) -> f64 {
        let w = self.s1 - self.s0;
        if w <= 0.0 {
            return self.y0;
        }
        let u = ((s - self.s0) / w).clamp(0.0, 1.0);
        self.y0 + (self.y1 - self.y0) * u
    }

    /// The restriction to `[a, b] ∩ [s0, s1]`, if nonempty.
    pub fn clip(&self, a: f64, b: f64) -> Option<Piece> {
        let lo = a.max(self.s0);
        let hi = b.min(self.s1);
        (hi > lo).then(|| Piece {
            s0: lo,
            s1: hi,
            y0: self.at(lo),
            y1: self.at(hi),
        })
    }

    pub fn shifted(&self, ds: f64, dy: f64) -> Piece {
        Piece {
            s0: self.s0 + ds,
            s1: self.s1 + ds,
            y0: self.y0 + dy,
            y1: self.y1 + dy,
        }
    }
}

/// A segment of a common refinement: width and the values of `a − b` at
/// both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DiffSegment {
    pub w: f64,
    pub d0: f64,
    pub d1: f64,
}

/// Common refinement of two contiguous piece lists starting at the same
/// point. Any tail where only one list continues (rounding slack) is dropped.
pub(crate) fn merge_difference(a: &[Piece], b: &[Piece]) -> Vec<DiffSegment> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut cur = match (a.first(), b.first()) {
        (Some(pa), Some(pb)) => pa.s0.min(pb.s0),
        _ => return out,
    };
    while i < a.len() && j < b.len() {
        let hi = a[i].s1.min(b[j].s1);
        if hi > cur {
            out.push(DiffSegment {
                w: hi - cur,
                d0: a[i].at(cur) - b[j].at(cur),
                d1: a[i].at(hi) - b[j].at(hi),
            });
            cur = hi;
        }
        if a[i].s1 <= hi {
            i += 1;
        }
        if b[j].s1 <= hi {
            j += 1;
        }
    }
    out
}

/// `∫ |y|^p` over an interval of width `w` on which `y` is linear from `y0`
/// to `y1`.
pub(crate) fn abs_pow_integral(y0: f64, y1: f64, w: f64, p: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    if (y0 < 0.0 && y1 > 0.0) || (y0 > 0.0 && y1 < 0.0) {
        let (a, b) = (y0.abs(), y1.abs());
        let z = w * a / (a + b);
        return (z * a.powf(p) + (w - z) * b.powf(p)) / (p + 1.0);
    }
    let (a, b) = (y0.abs(), y1.abs());
    let m = 0.5 * (a + b);
    if m == 0.0 {
        return 0.0;
    }
    let h = 0.5 * (b - a);
    let r = h / m;
    if r.abs() < 1e-4 {
        // series of the mean of (m + h u)^p over u ∈ [−1, 1]
        let r2 = r * r;
        let c2 = p * (p - 1.0) / 6.0;
        let c4 = p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 120.0;
        return w * m.powf(p) * (1.0 + c2 * r2 + c4 * r2 * r2);
    }
    w * (b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))
}

impl Cdf {
    /// Builds a CDF from raw polyline vertices, validating monotonicity.
    pub fn from_vertices(breakpoints: Vec<f64>, values: Vec<f64>, kind: CdfKind) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.len() < 2 {
            return Err(Error::InvalidParameter(
                "a CDF needs at least two matching vertices".into(),
            ));
        }
        for w in breakpoints.windows(2).zip(values.windows(2)) {
            let (xs, fs) = w;
            if !(xs[1] >= xs[0] && fs[1] >= fs[0]) {
                return Err(Error::InvalidParameter(
                    "CDF vertices must be monotone".into(),
                ));
            }
        }
        if breakpoints[0] != 0.0 || values[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter(
                "CDF polyline must run from (0, 0) to x = 1".into(),
            ));
        }
        Ok(Cdf {
            breakpoints,
            values,
            kind,
        })
    }

    /// Step CDF of an atomic measure: `F(x) = μ([0, x])`.
    pub fn from_atoms(a: &AtomicMeasure) -> Self {
        let mut xs = Vec::with_capacity(2 * a.len() + 2);
        let mut fs = Vec::with_capacity(2 * a.len() + 2);
        xs.push(0.0);
        fs.push(0.0);
        let mut acc = 0.0;
        let mut comp = 0.0;
        for atom in a.atoms() {
            xs.push(atom.location);
            fs.push(acc);
            let y = atom.weight - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            xs.push(atom.location);
            fs.push(acc);
        }
        let mass = a.total_mass();
        xs.push(1.0);
        fs.push(mass.max(acc));
        Cdf {
            breakpoints: xs,
            values: fs,
            kind: CdfKind::Step,
        }
    }

    /// Piecewise-linear CDF of a grid density by periodic trapezoid
    /// accumulation; `F(1) = mean`.
    pub fn from_density(d: &TorusDensity) -> Result<Self> {
        if d.is_signed() {
            return Err(Error::SignedInput);
        }
        let s = d.samples();
        let m = s.len();
        let h = 1.0 / m as f64;
        let mut xs = Vec::with_capacity(m + 1);
        let mut fs = Vec::with_capacity(m + 1);
        let mut acc = 0.0;
        xs.push(0.0);
        fs.push(0.0);
        for j in 0..m {
            acc += 0.5 * h * (s[j] + s[(j + 1) % m]);
            xs.push((j + 1) as f64 * h);
            fs.push(acc);
        }
        Ok(Cdf {
            breakpoints: xs,
            values: fs,
            kind: CdfKind::PiecewiseLinear,
        })
    }

    /// Piecewise-linear CDF of a density given at nodes `j/M`, `j = 0..=M`.
    pub fn from_interval_density(d: &IntervalDensity) -> Result<Self> {
        if d.is_signed() {
            return Err(Error::SignedInput);
        }
        let m = d.cells();
        let xs = (0..=m).map(|j| j as f64 / m as f64).collect();
        Ok(Cdf {
            breakpoints: xs,
            values: d.cumulative(),
            kind: CdfKind::PiecewiseLinear,
        })
    }

    /// `F(x) = mass·x`.
    pub fn uniform(mass: f64) -> Self {
        Cdf {
            breakpoints: vec![0.0, 1.0],
            values: vec![0.0, mass],
            kind: CdfKind::PiecewiseLinear,
        }
    }

    pub fn kind(&self) -> CdfKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_mass(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Right-continuous evaluation `F(x) = μ([0, x])`, with `F = mass` for `x ≥ 1`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let i = self.breakpoints.partition_point(|&b| b <= x);
        if i == self.breakpoints.len() {
            return self.total_mass();
        }
        let (x0, f0) = (self.breakpoints[i - 1], self.values[i - 1]);
        if x0 == x {
            return f0;
        }
        let (x1, f1) = (self.breakpoints[i], self.values[i]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    /// Left-continuous inverse `q(t) = inf{x : F(x) ≥ t}` for `t ∈ [0, mass]`.
    pub fn quantile(&self, t: f64) -> f64 {
        let i = self.values.partition_point(|&f| f < t);
        if i == self.values.len() {
            return 1.0;
        }
        let (t1, x1) = (self.values[i], self.breakpoints[i]);
        if t1 == t || i == 0 {
            return x1;
        }
        let (t0, x0) = (self.values[i - 1], self.breakpoints[i - 1]);
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }

    /// The CDF as linear pieces over `x ∈ [0, 1]`.
    pub(crate) fn x_pieces(&self) -> Vec<Piece> {
        self.segments(|x0, x1, f0, f1| {
            (x1 > x0).then_some(Piece {
                s0: x0,
                s1: x1,
                y0: f0,
                y1: f1,
            })
        })
    }

    /// The quantile function as linear pieces over `t ∈ [0, mass]`.
    pub(crate) fn t_pieces(&self) -> Vec<Piece> {
        self.segments(|x0, x1, f0, f1| {
            (f1 > f0).then_some(Piece {
                s0: f0,
                s1: f1,
                y0: x0,
                y1: x1,
            })
        })
    }

    fn segments(&self, f: impl Fn(f64, f64, f64, f64) -> Option<Piece>) -> Vec<Piece> {
        let n = self.breakpoints.len();
        (1..n)
            .filter_map(|i| {
                f(
                    self.breakpoints[i - 1],
                    self.breakpoints[i],
                    self.values[i - 1],
                    self.values[i],
                )
            })
            .collect()
    }

    /// `∫₀¹ x dμ(x)`.
    pub fn first_moment(&self) -> f64 {
        // ∫ x dF = ∫ q(t) dt
        self.t_pieces()
            .iter()
            .map(|p| 0.5 * (p.s1 - p.s0) * (p.y0 + p.y1))
            .sum()
    }

    /// Same shape with total mass one.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.total_mass();
        if !(m > 0.0) {
            return Err(Error::ZeroFunction);
        }
        Ok(Cdf {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v / m).collect(),
            kind: self.kind,
        })
    }
}

/// Anything with a cumulative distribution function on `[0, 1)`.
pub trait HasCdf {
    fn cdf(&self) -> Result<Cdf>;
}

impl HasCdf for AtomicMeasure {
    fn cdf(&self) -> Result<Cdf> {
        Ok(Cdf::from_atoms(self))
    }
}

impl HasCdf for TorusDensity {
    fn cdf(&self) -> Result<Cdf> {
        Cdf::from_density(self)
    }
}

impl HasCdf for IntervalDensity {
    fn cdf(&self) -> Result<Cdf> {
        Cdf::from_interval_density(self)
    }
}

/// CDF of a measure given as atoms or as grid samples.
pub fn cdf(m: &impl HasCdf) -> Result<Cdf> {
    m.cdf()
}
