//! Exact one-dimensional optimal transport on `[0, 1]` and on the circle.
//!
//! Everything is computed from [`Cdf`] polylines: W₁ integrates `|F_μ − F_ν|`
//! and W_p integrates `|q_μ − q_ν|^p` over a common refinement of the two
//! piece lists, so no sampling error enters for atomic or piecewise-linear
//! inputs. On the circle, W₁ subtracts the Lebesgue median of `F_μ − F_ν`,
//! and W_p for `p > 1` minimizes the quantile coupling over a rotation of
//! the lifted target quantile.

use serde::{Deserialize, Serialize};

use crate::cdf::{abs_pow_integral, merge_difference, Cdf, DiffSegment, Piece};
use crate::error::{check_exponent, Error, Result};
use crate::measures::TorusDensity;

/// Absolute tolerance for "equal total mass".
pub const MASS_TOL: f64 = 1e-9;

const SHIFT_GRID: usize = 64;
const SHIFT_TOL: f64 = 1e-12;
const SHIFT_MAX_STEPS: usize = 10_000;

/// A transport distance with its exponent and, on the circle, the optimal
/// rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportCost {
    pub p: f64,
    /// `W_p`, already the p-th root.
    pub cost: f64,
    /// Optimal constant `c*` (p = 1) or quantile rotation `θ*` (p > 1).
    pub shift: f64,
}

fn check_masses(mu: &Cdf, nu: &Cdf) -> Result<f64> {
    let (a, b) = (mu.total_mass(), nu.total_mass());
    if (a - b).abs() > MASS_TOL {
        return Err(Error::MassMismatch(a, b));
    }
    Ok(0.5 * (a + b))
}

fn cdf_difference(mu: &Cdf, nu: &Cdf) -> Vec<DiffSegment> {
    merge_difference(&mu.x_pieces(), &nu.x_pieces())
}

fn integral_abs_shifted(segs: &[DiffSegment], c: f64) -> f64 {
    segs.iter()
        .map(|s| abs_pow_integral(s.d0 - c, s.d1 - c, s.w, 1.0))
        .sum()
}

/// Lebesgue measure of `{x : D(x) < c}`.
fn measure_below(segs: &[DiffSegment], c: f64) -> f64 {
    segs.iter()
        .map(|s| {
            let (lo, hi) = if s.d0 <= s.d1 {
                (s.d0, s.d1)
            } else {
                (s.d1, s.d0)
            };
            if hi < c {
                s.w
            } else if lo >= c {
                0.0
            } else {
                s.w * (c - lo) / (hi - lo)
            }
        })
        .sum()
}

/// A median of the piecewise-linear `D` under Lebesgue measure on `[0, 1]`.
fn lebesgue_median(segs: &[DiffSegment]) -> f64 {
    let total: f64 = segs.iter().map(|s| s.w).sum();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in segs {
        lo = lo.min(s.d0.min(s.d1));
        hi = hi.max(s.d0.max(s.d1));
    }
    if !(lo < hi) {
        return if lo.is_finite() { lo } else { 0.0 };
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if measure_below(segs, mid) < 0.5 * total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `W₁` on `[0, 1]`: `∫₀¹ |F_μ − F_ν| dx`.
pub fn w1_interval(mu: &Cdf, nu: &Cdf) -> Result<f64> {
    check_masses(mu, nu)?;
    Ok(integral_abs_shifted(&cdf_difference(mu, nu), 0.0))
}

/// `W₁` on the circle: `min_c ∫₀¹ |F_μ − F_ν − c| dx`, attained at the
/// Lebesgue median `c*` of `F_μ − F_ν`.
pub fn w1_circle(mu: &Cdf, nu: &Cdf) -> Result<TransportCost> {
    check_masses(mu, nu)?;
    let segs = cdf_difference(mu, nu);
    let c = lebesgue_median(&segs);
    Ok(TransportCost {
        p: 1.0,
        cost: integral_abs_shifted(&segs, c),
        shift: c,
    })
}

fn pow_cost(segs: &[DiffSegment], p: f64) -> f64 {
    segs.iter()
        .map(|s| abs_pow_integral(s.d0, s.d1, s.w, p))
        .sum()
}

/// `W_p` on `[0, 1]` through the quantile coupling,
/// `W_p^p = ∫₀^m |q_μ(t) − q_ν(t)|^p dt`.
pub fn wp_interval(mu: &Cdf, nu: &Cdf, p: f64) -> Result<f64> {
    check_exponent(p)?;
    check_masses(mu, nu)?;
    let segs = merge_difference(&mu.t_pieces(), &nu.t_pieces());
    Ok(pow_cost(&segs, p).powf(1.0 / p))
}

/// Pieces of `t ↦ q̃(t + θ)` on `t ∈ [0, 1]`, where `q̃` is the lift of a
/// probability quantile with `q̃(s + 1) = q̃(s) + 1`.
fn rotated_quantile(pieces: &[Piece], theta: f64) -> Vec<Piece> {
    let f = theta.floor();
    let r = theta - f;
    let mut out = Vec::with_capacity(pieces.len() + 2);
    out.extend(
        pieces
            .iter()
            .filter_map(|p| p.clip(r, 1.0))
            .map(|p| p.shifted(-r, f)),
    );
    out.extend(
        pieces
            .iter()
            .filter_map(|p| p.clip(0.0, r))
            .map(|p| p.shifted(1.0 - r, f + 1.0)),
    );
    out
}

struct ShiftObjective {
    mu: Vec<Piece>,
    nu: Vec<Piece>,
    p: f64,
}

impl ShiftObjective {
    fn eval(&self, theta: f64) -> f64 {
        let shifted = rotated_quantile(&self.nu, theta);
        pow_cost(&merge_difference(&self.mu, &shifted), self.p)
    }
}

/// Minimizes a function assumed unimodal on `[lo, hi]`: a coarse grid picks
/// the best cell, then golden-section search narrows it.
fn minimize_shift(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let step = (hi - lo) / SHIFT_GRID as f64;
    let grid: Vec<f64> = (0..=SHIFT_GRID).map(|i| f(lo + step * i as f64)).collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(SHIFT_GRID) as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut steps = 0;
    while b - a > SHIFT_TOL {
        steps += 1;
        if steps > SHIFT_MAX_STEPS {
            return Err(Error::NoConvergence(format!(
                "rotation search stalled at bracket [{a}, {b}] after {SHIFT_MAX_STEPS} steps"
            )));
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        if !(x1 < x2) && b - a > SHIFT_TOL {
            // the bracket collapsed below floating-point resolution
            break;
        }
    }
    let mut candidates = [(grid[best], lo + step * best as f64), (f1, x1), (f2, x2)];
    candidates.sort_by(|u, v| u.0.total_cmp(&v.0));
    Ok((candidates[0].1, candidates[0].0))
}

/// `W_p` on the circle. For `p = 1` this is [`w1_circle`]; otherwise both
/// measures are normalized and
/// `W_p^p = m · min_θ ∫₀¹ |q_μ(t) − q̃_ν(t + θ)|^p dt`.
pub fn wp_circle(mu: &Cdf, nu: &Cdf, p: f64) -> Result<TransportCost> {
    check_exponent(p)?;
    let m = check_masses(mu, nu)?;
    if p == 1.0 {
        return w1_circle(mu, nu);
    }
    if m <= 0.0 {
        return Ok(TransportCost {
            p,
            cost: 0.0,
            shift: 0.0,
        });
    }
    let (mu_n, nu_n) = (mu.normalized()?, nu.normalized()?);
    let obj = ShiftObjective {
        mu: mu_n.t_pieces(),
        nu: nu_n.t_pieces(),
        p,
    };
    // optimal displacements lie in [−1/2, 1/2], so their mean does too
    let center = mu_n.first_moment() - nu_n.first_moment();
    let (theta, best) = minimize_shift(|th| obj.eval(th), center - 0.5, center + 0.5)?;
    Ok(TransportCost {
        p,
        cost: (m * best.max(0.0)).powf(1.0 / p),
        shift: theta,
    })
}

/// `W_p` on the circle between two densities of equal mass `m`, for instance
/// the positive and negative parts of a mean-zero function.
pub fn mass_scaled_wp(fplus: &TorusDensity, fminus: &TorusDensity, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let (a, b) = (fplus.mean(), fminus.mean());
    if (a - b).abs() > MASS_TOL {
        return Err(Error::MassMismatch(a, b));
    }
    if a <= 0.0 {
        return Ok(0.0);
    }
    let mu = Cdf::from_density(fplus)?;
    let nu = Cdf::from_density(fminus)?;
    // snap the two totals together so the circle solver sees equal masses
    let nu = rescale_to(&nu, mu.total_mass())?;
    Ok(wp_circle(&mu, &nu, p)?.cost)
}

fn rescale_to(c: &Cdf, mass: f64) -> Result<Cdf> {
    let k = mass / c.total_mass();
    Cdf::from_vertices(
        c.breakpoints().to_vec(),
        c.values().iter().map(|v| v * k).collect(),
        c.kind(),
    )
}
