//! Fourier-side functionals that bound transport distances and discrepancy
//! from above or below.
//!
//! All functionals return raw values with no absolute constants applied.
//! The negative Sobolev norm on the circle is normalized as
//! `‖h‖²_{Ḣ⁻¹} = Σ_{k≠0} |c_k|² / (4π²k²)`, the dual of `∫|g′|²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cdf::{merge_difference, Cdf};
use crate::error::{check_exponent, Error, Result};
use crate::measures::{FourierSeries, IntervalDensity, TorusDensity};
use crate::ot::MASS_TOL;
use crate::trig;

/// Tolerance on `c_0` for functionals that require a mean-zero input.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

fn require_mean_zero(s: &FourierSeries) -> Result<()> {
    let scale = s.coeffs().iter().fold(1.0f64, |a, c| a.max(c.norm()));
    if s.mean().abs() > MEAN_ZERO_TOL * scale {
        return Err(Error::NonzeroMean(s.mean()));
    }
    Ok(())
}

/// `1/n + Σ_{k=1}^{n} |c_k|/k`, using only the available coefficients when
/// `n > K`.
pub fn erdos_turan_functional(s: &FourierSeries, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "Erdős–Turán cutoff n must be >= 1".into(),
        ));
    }
    let sum: f64 = s
        .positive()
        .take_while(|&(k, _)| k <= n)
        .map(|(k, c)| c.norm() / k as f64)
        .sum();
    Ok(1.0 / n as f64 + sum)
}

/// `(Σ_{k≥1} |c_k|²/k²)^{1/3}`.
pub fn leveque_functional(s: &FourierSeries) -> f64 {
    s.positive()
        .map(|(k, c)| c.norm_sqr() / (k * k) as f64)
        .sum::<f64>()
        .cbrt()
}

/// `‖h‖_{Ḣ⁻¹}` on the circle from the coefficients of a mean-zero `h`.
pub fn h_minus_one_circle(s: &FourierSeries) -> Result<f64> {
    require_mean_zero(s)?;
    let sum: f64 = s
        .positive()
        .map(|(k, c)| c.norm_sqr() / (k * k) as f64)
        .sum();
    Ok((2.0 * sum).sqrt() / (2.0 * PI))
}

/// `‖μ − ν‖_{Ḣ⁻¹}` on the circle, computed exactly in physical space as the
/// L² norm of `F_μ − F_ν` minus its mean. Valid for atoms as well as
/// densities.
pub fn h_minus_one_circle_cdf(mu: &Cdf, nu: &Cdf) -> Result<f64> {
    let (a, b) = (mu.total_mass(), nu.total_mass());
    if (a - b).abs() > MASS_TOL {
        return Err(Error::MassMismatch(a, b));
    }
    let segs = merge_difference(&mu.x_pieces(), &nu.x_pieces());
    let total: f64 = segs.iter().map(|s| s.w).sum();
    let mean = segs.iter().map(|s| 0.5 * s.w * (s.d0 + s.d1)).sum::<f64>() / total;
    let sq: f64 = segs
        .iter()
        .map(|s| {
            let (u, v) = (s.d0 - mean, s.d1 - mean);
            s.w * (u * u + u * v + v * v) / 3.0
        })
        .sum();
    Ok(sq.max(0.0).sqrt())
}

/// `‖h‖_{Ḣ⁻¹([0,1])} = (∫₀¹ H²)^{1/2}` with `H(x) = ∫₀ˣ h`, for a mean-zero
/// `h` given at nodes. `H` is accumulated by the trapezoid rule and squared
/// exactly as a piecewise-linear function.
pub fn h_minus_one_interval(h: &IntervalDensity) -> Result<f64> {
    let cum = h.cumulative();
    let l1 = h.nodes().iter().map(|v| v.abs()).sum::<f64>() / h.nodes().len() as f64;
    let end = *cum.last().expect("nonempty");
    if end.abs() > MEAN_ZERO_TOL * l1.max(1.0) {
        return Err(Error::NonzeroMean(end));
    }
    let step = 1.0 / h.cells() as f64;
    let sq: f64 = cum
        .windows(2)
        .map(|w| step * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0)
        .sum();
    Ok(sq.sqrt())
}

/// `2‖μ − 1‖_{Ḣ⁻¹}` for a probability measure `μ` given by its CDF; an upper
/// bound on `W₂(μ, dx)` on the circle.
pub fn peyre_w2_bound_cdf(mu: &Cdf) -> Result<f64> {
    let m = mu.total_mass();
    if (m - 1.0).abs() > MASS_TOL {
        return Err(Error::MassMismatch(m, 1.0));
    }
    Ok(2.0 * h_minus_one_circle_cdf(mu, &Cdf::uniform(m))?)
}

/// `2‖f − 1‖_{Ḣ⁻¹}` for a probability density on the grid.
pub fn peyre_w2_bound(d: &TorusDensity) -> Result<f64> {
    peyre_w2_bound_cdf(&Cdf::from_density(d)?)
}

/// `(Σ_{k=1}^{K} |c_k|² / k^{2p−2})^{1/(2p)}` for a mean-zero perturbation;
/// controls `W_p` between a measure and its perturbation.
pub fn negative_sobolev_functional(s: &FourierSeries, p: f64) -> Result<f64> {
    check_exponent(p)?;
    require_mean_zero(s)?;
    let sum: f64 = s
        .positive()
        .map(|(k, c)| c.norm_sqr() / (k as f64).powf(2.0 * p - 2.0))
        .sum();
    Ok(sum.powf(1.0 / (2.0 * p)))
}

/// `(1/sup) Σ_{k≠0} (1 + ln|k|)/k² · |c_k|²`, a lower bound for
/// `W₁(f dx, f̄ dx)` up to a constant.
pub fn log_weighted_lower_functional(s: &FourierSeries, sup_norm: f64) -> Result<f64> {
    if !(sup_norm > 0.0 && sup_norm.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sup norm must be positive, got {sup_norm}"
        )));
    }
    let sum: f64 = s
        .positive()
        .map(|(k, c)| {
            let k = k as f64;
            2.0 * (1.0 + k.ln()) / (k * k) * c.norm_sqr()
        })
        .sum();
    Ok(sum / sup_norm)
}

/// `Σ_{k=1}^{K} |c_k|/k`.
pub fn littlewood_sum(s: &FourierSeries) -> f64 {
    s.positive().map(|(k, c)| c.norm() / k as f64).sum()
}

/// `Σ_j |c_{k_j}|/j` over the nonzero frequencies `k_1 < k_2 < …`, the
/// left side of the Littlewood inequality for sparse spectra.
pub fn littlewood_rank_sum(s: &FourierSeries) -> f64 {
    let floor = 1e-14 * s.max_nonzero_magnitude();
    s.positive()
        .filter(|(_, c)| c.norm() > floor)
        .enumerate()
        .map(|(j, (_, c))| c.norm() / (j + 1) as f64)
        .sum()
}

/// Values of every functional for one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub entries: BTreeMap<String, f64>,
    /// Error messages of entries that could not be evaluated (stored as NaN).
    pub flags: BTreeMap<String, String>,
    pub max_freq: usize,
    pub n: usize,
    pub p_list: Vec<f64>,
    /// True when `n` exceeds the available frequencies.
    pub truncated: bool,
}

impl BoundReport {
    fn put(&mut self, name: String, value: Result<f64>) {
        match value {
            Ok(v) => {
                self.entries.insert(name, v);
            }
            Err(e) => {
                self.entries.insert(name.clone(), f64::NAN);
                self.flags.insert(name, e.to_string());
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(name).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One header row and one value row; metadata columns come first.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["K".to_string(), "n".to_string(), "truncated".to_string()];
        header.extend(self.entries.keys().cloned());
        wtr.write_record(&header)?;
        let mut row = vec![
            self.max_freq.to_string(),
            self.n.to_string(),
            self.truncated.to_string(),
        ];
        row.extend(self.entries.values().map(|v| v.to_string()));
        wtr.write_record(&row)?;
        wtr.flush()?;
        Ok(())
    }
}

/// Column name of the negative Sobolev functional at exponent `p`.
pub fn negative_sobolev_key(p: f64) -> String {
    format!("negative_sobolev_p{p}")
}

/// Evaluates every functional on `s`, treated as the series of a measure.
/// Mean-zero functionals are applied to `s` with its mean removed.
pub fn bound_report(s: &FourierSeries, n: usize, p_list: &[f64]) -> BoundReport {
    let mut r = BoundReport {
        entries: BTreeMap::new(),
        flags: BTreeMap::new(),
        max_freq: s.max_freq(),
        n,
        p_list: p_list.to_vec(),
        truncated: n > s.max_freq(),
    };
    let centered = s.without_mean();
    r.put("erdos_turan".into(), erdos_turan_functional(s, n));
    r.put("leveque".into(), Ok(leveque_functional(s)));
    let h = h_minus_one_circle(&centered);
    r.put(
        "peyre_w2".into(),
        h.as_ref().map(|v| 2.0 * v).map_err(clone_err),
    );
    r.put("h_minus_one".into(), h);
    for &p in p_list {
        r.put(
            negative_sobolev_key(p),
            negative_sobolev_functional(&centered, p),
        );
    }
    r.put(
        "log_weighted_lower".into(),
        log_weighted_lower_functional(s, trig::sup_norm(s)),
    );
    r.put("littlewood".into(), Ok(littlewood_sum(s)));
    r
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidParameter(e.to_string())
}
