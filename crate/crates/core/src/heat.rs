//! Heat flow on the circle and transport plans built from it, together with
//! the oscillation functionals of mean-zero trigonometric polynomials.
//!
//! The Laplacian eigenvalue of `e^{2πikx}` is `4π²k²`, so the heat semigroup
//! multiplies `c_k` by `e^{−4π²k²t}` and its kernel is the wrapped Gaussian
//! `k_t(z) = (4πt)^{−1/2} Σ_n e^{−(z+n)²/4t}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cdf::Cdf;
use crate::error::{check_exponent, Error, Result};
use crate::measures::{
    fourier_of_density, synthesize_grid, FourierSeries, TorusDensity, DEFAULT_GRID,
};
use crate::ot::{mass_scaled_wp, wp_circle};
use crate::quad::integrate;
use crate::trig;

const GAUSSIAN_REGIME: f64 = 0.05;
const FOURIER_CUTOFF: f64 = 1e-300;
const MEAN_ZERO_TOL: f64 = 1e-10;

/// Time, frequency cut and exponent of a heat-flow computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatParams {
    pub t: f64,
    pub lambda_cut: f64,
    pub p: f64,
}

impl HeatParams {
    pub fn new(t: f64, lambda_cut: f64, p: f64) -> Result<Self> {
        check_time(t)?;
        check_exponent(p)?;
        if !(lambda_cut >= 0.0 && lambda_cut.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frequency cut {lambda_cut} must be >= 0"
            )));
        }
        Ok(HeatParams { t, lambda_cut, p })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "time t = {t} must be positive"
        )))
    }
}

fn require_mean_zero(s: &FourierSeries) -> Result<()> {
    let scale = s.coeffs().iter().fold(1.0f64, |a, c| a.max(c.norm()));
    if s.mean().abs() > MEAN_ZERO_TOL * scale {
        return Err(Error::NonzeroMean(s.mean()));
    }
    Ok(())
}

/// `c_k ↦ c_k e^{−4π²k²t}`.
pub fn heat_evolve(s: &FourierSeries, t: f64) -> Result<FourierSeries> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time t = {t} must be >= 0"
        )));
    }
    Ok(s.map_positive(|k, c| {
        if k == 0 {
            c
        } else {
            c * (-4.0 * PI * PI * (k * k) as f64 * t).exp()
        }
    }))
}

/// Heat kernel on the circle at displacement `z` and time `t > 0`.
pub fn heat_kernel(z: f64, t: f64) -> f64 {
    let z = z - z.round();
    if t < GAUSSIAN_REGIME {
        let n_max = (0.5 + (2764.0 * t).sqrt()).ceil() as i64;
        let norm = (4.0 * PI * t).sqrt();
        (-n_max..=n_max)
            .map(|n| (-(z + n as f64).powi(2) / (4.0 * t)).exp())
            .sum::<f64>()
            / norm
    } else {
        let mut acc = 1.0;
        for k in 1.. {
            let w = (-4.0 * PI * PI * (k * k) as f64 * t).exp();
            if w < FOURIER_CUTOFF {
                break;
            }
            acc += 2.0 * w * (2.0 * PI * k as f64 * z).cos();
        }
        acc
    }
}

/// `∫_{−1/2}^{1/2} |z|^p k_t(z) dz`, the expected p-th power of the
/// geodesic displacement under the heat kernel.
pub fn heat_kernel_moment(t: f64, p: f64) -> Result<f64> {
    check_time(t)?;
    check_exponent(p)?;
    // split at the Gaussian width so the adaptive rule sees the peak
    let w = (2.0 * t).sqrt().min(0.25);
    let f = |z: f64| z.powf(p) * heat_kernel(z, t);
    let a = integrate(f, 0.0, w, 1e-16)?;
    let b = integrate(f, w, 0.5, 1e-16)?;
    Ok(2.0 * (a + b))
}

/// Cost of the coupling that spreads each unit of `|f|` by the heat kernel:
/// `(‖f‖₁ · ∫|z|^p k_t(z) dz)^{1/p}`, an upper bound on `W_p(f, e^{tΔ}f)`.
pub fn heat_plan_cost(d: &TorusDensity, t: f64, p: f64) -> Result<f64> {
    Ok((d.l1_norm() * heat_kernel_moment(t, p)?).powf(1.0 / p))
}

/// `e^{tΔ}` applied to a grid density through its discrete spectrum.
pub fn evolve_density(d: &TorusDensity, t: f64) -> Result<TorusDensity> {
    check_time(t)?;
    let m = d.grid_size();
    let k = m / 2 - 1;
    let s = heat_evolve(&fourier_of_density(d, k)?, t)?;
    let g = synthesize_grid(&s, m)?;
    if d.is_signed() {
        return Ok(g.into_signed());
    }
    let tol = 1e-12 * d.sup_norm().max(1.0);
    g.into_density(tol)
}

/// Heat-plan cost against the exact transport distance it bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatPlanCheck {
    pub t: f64,
    pub p: f64,
    pub plan_cost: f64,
    pub exact: f64,
}

/// Computes [`heat_plan_cost`] and `W_p(f, e^{tΔ}f)` and fails if the plan
/// were cheaper than the optimum.
pub fn heat_plan_check(d: &TorusDensity, t: f64, p: f64) -> Result<HeatPlanCheck> {
    let plan_cost = heat_plan_cost(d, t, p)?;
    let g = evolve_density(d, t)?;
    let exact = wp_circle(&Cdf::from_density(d)?, &Cdf::from_density(&g)?, p)?.cost;
    if plan_cost < exact * (1.0 - 1e-9) {
        return Err(Error::Invariant(format!(
            "heat plan cost {plan_cost} is below the optimal cost {exact}"
        )));
    }
    Ok(HeatPlanCheck {
        t,
        p,
        plan_cost,
        exact,
    })
}

/// A heat-smoothed series split at a frequency cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingDecomposition {
    pub t: f64,
    pub cutoff: usize,
    /// `e^{tΔ}f` restricted to `|k| ≤ cutoff`.
    pub truncated: FourierSeries,
    /// `e^{tΔ}f` restricted to `|k| > cutoff`.
    pub tail: FourierSeries,
    /// `Σ_{|k|>cutoff} |c_k| e^{−4π²k²t}`, which dominates the L¹ norm of
    /// the tail.
    pub tail_l1: f64,
    /// Heat-plan cost `(‖f‖₁ m_p(t))^{1/p}` of the smoothing step.
    pub kernel_cost: f64,
}

/// Smooths a nonnegative `f` for time `t = 1/n²` and splits the result at
/// `X = n log n`.
pub fn smoothing_decomposition(
    s: &FourierSeries,
    n: usize,
    p: f64,
) -> Result<SmoothingDecomposition> {
    if n < 2 {
        return Err(Error::InvalidParameter("smoothing needs n >= 2".into()));
    }
    check_exponent(p)?;
    let nf = n as f64;
    let t = 1.0 / (nf * nf);
    let cutoff = (nf * nf.ln()).floor() as usize;
    let evolved = heat_evolve(s, t)?;
    let truncated = evolved.truncated(cutoff);
    let tail = evolved.map_positive(|k, c| {
        if k <= cutoff {
            num_complex::Complex64::new(0.0, 0.0)
        } else {
            c
        }
    });
    let tail_l1 = 2.0 * tail.positive().map(|(_, c)| c.norm()).sum::<f64>();
    let kernel_cost = (s.mean().abs() * heat_kernel_moment(t, p)?).powf(1.0 / p);
    Ok(SmoothingDecomposition {
        t,
        cutoff,
        truncated,
        tail,
        tail_l1,
        kernel_cost,
    })
}

/// Positive and negative parts of a mean-zero function on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub fplus: TorusDensity,
    pub fminus: TorusDensity,
}

impl SplitPair {
    /// Common mass of the two parts.
    pub fn mass(&self) -> f64 {
        0.5 * (self.fplus.mean() + self.fminus.mean())
    }
}

/// `max(f, 0)` and `max(−f, 0)` sampled on `M` points.
pub fn sign_split(s: &FourierSeries, m: usize) -> Result<SplitPair> {
    require_mean_zero(s)?;
    let g = synthesize_grid(s, m)?;
    let plus = g.samples().iter().map(|v| v.max(0.0)).collect();
    let minus = g.samples().iter().map(|v| (-v).max(0.0)).collect();
    Ok(SplitPair {
        fplus: TorusDensity::new(plus)?,
        fminus: TorusDensity::new(minus)?,
    })
}

/// Grid size used for transport between the sign parts of a series.
pub fn split_grid(max_freq: usize) -> usize {
    DEFAULT_GRID.max(64 * max_freq)
}

/// `W_p` between the positive and negative parts of `sin(2πnx)`.
pub fn eigen_split_cost(n: usize, p: f64) -> Result<f64> {
    eigen_split_cost_on_grid(n, p, split_grid(n))
}

/// [`eigen_split_cost`] with the sign parts sampled on `m` points.
pub fn eigen_split_cost_on_grid(n: usize, p: f64, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("frequency n must be >= 1".into()));
    }
    if m < 4 * n {
        return Err(Error::Aliasing { k: n, m });
    }
    let s = FourierSeries::sine(n, 1.0, 0.0, n);
    let split = sign_split(&s, m)?;
    mass_scaled_wp(&split.fplus, &split.fminus, p)
}

/// Sign changes of a mean-zero series on the circle.
pub fn count_sign_changes(s: &FourierSeries) -> Result<usize> {
    require_mean_zero(s)?;
    trig::count_sign_changes(s)
}

/// Both sides of an uncertainty-type inequality and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub count: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `lhs = #roots · (Σ_{k≥1} |c_k|²/k²)^{1/2}` against
/// `rhs = ‖f‖₁² / ‖f‖_∞` for a mean-zero `f`.
pub fn uncertainty_sides(s: &FourierSeries) -> Result<Sides> {
    let count = count_sign_changes(s)?;
    let weighted: f64 = s
        .positive()
        .map(|(k, c)| c.norm_sqr() / (k * k) as f64)
        .sum();
    let lhs = count as f64 * weighted.sqrt();
    let l1 = trig::l1_norm(s)?;
    let rhs = l1 * l1 / trig::sup_norm(s);
    Ok(Sides {
        count,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `lhs = #critical points · ‖f − f̄‖₂` against `rhs = ‖f′‖₁² / ‖f′‖_∞`.
pub fn critical_point_sides(s: &FourierSeries) -> Result<Sides> {
    let d = s.derivative();
    let count = trig::count_sign_changes(&d)?;
    let lhs = count as f64 * trig::l2_norm(&s.without_mean());
    let l1 = trig::l1_norm(&d)?;
    let rhs = l1 * l1 / trig::sup_norm(&d);
    Ok(Sides {
        count,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// The heat-then-diameter transport plan between the sign parts of a
/// high-frequency function, next to the optimal cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStepCost {
    pub k0: usize,
    pub lambda: f64,
    pub t: f64,
    /// Cost of spreading both parts by the heat kernel.
    pub heat_cost: f64,
    /// Diameter bound for moving what remains unmatched after smoothing.
    pub remainder_cost: f64,
    pub realized: f64,
    pub exact: f64,
}

impl TwoStepCost {
    pub fn ratio(&self) -> f64 {
        self.realized / self.exact
    }
}

/// Transport between `f₊` and `f₋` for `f` with spectrum in `|k| ≥ k0`:
/// both parts flow for time `t`, which costs `(m₊ m_p(t))^{1/p}` each way,
/// and the mass `‖e^{tΔ}f‖₁/2` that still differs is moved at most the
/// diameter `1/2`. The time is `t = log λ / λ` with `λ = 4π²k0²` for a
/// single frequency and `t = log(λ^{p/2}‖f‖₂/‖f‖₁)/λ` otherwise.
pub fn high_freq_two_step_cost(s: &FourierSeries, k0: usize, p: f64) -> Result<TwoStepCost> {
    check_exponent(p)?;
    require_mean_zero(s)?;
    if k0 == 0 {
        return Err(Error::InvalidParameter("band edge k0 must be >= 1".into()));
    }
    let scale = s.max_nonzero_magnitude();
    if scale == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let support: Vec<usize> = s
        .positive()
        .filter(|(_, c)| c.norm() > 1e-14 * scale)
        .map(|(k, _)| k)
        .collect();
    if let Some(&k) = support.iter().find(|&&k| k < k0) {
        return Err(Error::BandViolation(k, k0));
    }
    let lambda = 4.0 * PI * PI * (k0 * k0) as f64;
    let l1 = trig::l1_norm(s)?;
    let t = if support.len() == 1 {
        lambda.ln() / lambda
    } else {
        (lambda.powf(0.5 * p) * trig::l2_norm(s) / l1).ln() / lambda
    };
    let mass = 0.5 * l1;
    let heat_cost = 2.0 * (mass * heat_kernel_moment(t, p)?).powf(1.0 / p);
    let g = heat_evolve(s, t)?;
    let g_l1 = if g.max_nonzero_magnitude() == 0.0 {
        0.0
    } else {
        trig::l1_norm(&g)?
    };
    let remainder_cost = 0.5 * (0.5 * g_l1).powf(1.0 / p);
    let realized = heat_cost + remainder_cost;
    let split = sign_split(s, split_grid(s.max_freq()))?;
    let exact = mass_scaled_wp(&split.fplus, &split.fminus, p)?;
    if realized < exact * (1.0 - 1e-9) {
        return Err(Error::Invariant(format!(
            "two-step plan cost {realized} is below the optimal cost {exact}"
        )));
    }
    Ok(TwoStepCost {
        k0,
        lambda,
        t,
        heat_cost,
        remainder_cost,
        realized,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{fourier_of_atoms, Atom, AtomicMeasure};
    use crate::oracle::{discrete_ot_oracle, quantize};
    use std::f64::consts::TAU;

    #[test]
    fn evolution_examples() {
        let c = FourierSeries::constant(2.5, 4);
        assert_eq!(heat_evolve(&c, 3.0).unwrap(), c);
        let s = FourierSeries::sine(3, 1.0, 0.0, 3);
        let e = heat_evolve(&s, 0.01).unwrap();
        let factor = (-4.0 * PI * PI * 9.0 * 0.01f64).exp();
        assert!((e.coeff(3) - s.coeff(3) * factor).norm() < 1e-16);
        let far = heat_evolve(&FourierSeries::sine(1, 1.0, 1.0, 4), 1e3).unwrap();
        assert_eq!(far.mean(), 1.0);
        assert!(far.max_nonzero_magnitude() < 1e-300);
        assert!(heat_evolve(&s, -1.0).is_err());
    }

    #[test]
    fn kernel_regimes_agree_and_normalize() {
        for &z in &[0.0, 0.1, 0.3, 0.5] {
            // both formulas near the switch-over time
            let t = GAUSSIAN_REGIME;
            let n_max = (0.5 + (2764.0 * t).sqrt()).ceil() as i64;
            let gauss: f64 = (-n_max..=n_max)
                .map(|n| (-(z + n as f64).powi(2) / (4.0 * t)).exp())
                .sum::<f64>()
                / (4.0 * PI * t).sqrt();
            assert!((gauss - heat_kernel(z, t)).abs() < 1e-13);
        }
        for &t in &[1e-4, 0.01, 0.2] {
            let mass = 2.0 * integrate(|z| heat_kernel(z, t), 0.0, 0.5, 1e-15).unwrap();
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn second_moment() {
        // flat-space regime: E z² = 2t
        let m = heat_kernel_moment(1e-4, 2.0).unwrap();
        assert!((m / 2e-4 - 1.0).abs() < 1e-9);
        // Fourier-side closed form: ∫ z² k_t = 1/12 + Σ_k 2 e^{−4π²k²t} (−1)^k/(2π²k²)
        let t = 0.1;
        let series = 1.0 / 12.0
            + (1..50)
                .map(|k| {
                    let k = k as f64;
                    let sign = if k as i64 % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (-4.0 * PI * PI * k * k * t).exp() / (PI * PI * k * k)
                })
                .sum::<f64>();
        assert!((heat_kernel_moment(t, 2.0).unwrap() - series).abs() < 1e-13);
    }

    #[test]
    fn plan_cost_examples() {
        let u = TorusDensity::constant(1024, 1.0).unwrap();
        let chk = heat_plan_check(&u, 0.01, 2.0).unwrap();
        assert!(chk.exact < 1e-9 && chk.plan_cost > 0.1);

        let f = TorusDensity::from_fn(4096, |x| 1.0 + (TAU * x).cos()).unwrap();
        let c = heat_plan_cost(&f, 1e-3, 2.0).unwrap();
        assert!((c * c / 2e-3 - 1.0).abs() < 0.1);
        heat_plan_check(&f, 1e-3, 2.0).unwrap();

        let ratios: Vec<f64> = [1e-4, 1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&t| heat_plan_cost(&f, t, 2.0).unwrap() / t.sqrt())
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi / lo <= 5.0);
    }

    #[test]
    fn smoothing_examples() {
        let band = FourierSeries::cosine(3, 0.5, 1.0, 3);
        let d = smoothing_decomposition(&band, 8, 2.0).unwrap();
        assert_eq!(d.tail_l1, 0.0);
        assert_eq!(
            d.truncated.add(&d.tail).resized(3),
            heat_evolve(&band, d.t).unwrap()
        );

        let delta = fourier_of_atoms(&AtomicMeasure::new(vec![Atom::new(0.0, 1.0)]).unwrap(), 512);
        let d = smoothing_decomposition(&delta, 8, 1.0).unwrap();
        let x = 8.0 * 8f64.ln();
        assert!(d.tail_l1 <= 512.0 * (-4.0 * PI * PI * x * x * d.t).exp());
        let rebuilt = d.truncated.add(&d.tail);
        let evolved = heat_evolve(&delta, d.t).unwrap();
        for k in 0..=512 {
            assert!((rebuilt.coeff(k) - evolved.coeff(k)).norm() < 1e-15);
        }
        // E|Z| for Z ~ N(0, 2/n²) is 2/(n√π); wrapping only shortens displacements
        let gauss = 2.0 / PI.sqrt();
        for n in [4usize, 8, 16, 32, 64] {
            let c = smoothing_decomposition(&delta, n, 1.0).unwrap().kernel_cost * n as f64;
            assert!(c <= gauss + 1e-9);
            if n >= 16 {
                assert!((c - gauss).abs() < 1e-3, "n = {n}: {c}");
            }
        }
    }

    #[test]
    fn sign_split_examples() {
        let s = FourierSeries::sine(1, 1.0, 0.0, 1);
        let split = sign_split(&s, 4096).unwrap();
        assert!((split.fplus.mean() - 1.0 / PI).abs() < 1e-6);
        assert!((split.fplus.mean() - split.fminus.mean()).abs() < 1e-12);
        let c = FourierSeries::cosine(1, 1.0, 0.0, 1);
        let split = sign_split(&c, 256).unwrap();
        for j in 0..256 {
            let half = (j + 128) % 256;
            assert!((split.fplus.samples()[j] - split.fminus.samples()[half]).abs() < 1e-14);
        }
        let z = sign_split(&FourierSeries::zero(2), 64).unwrap();
        assert_eq!(z.mass(), 0.0);
        assert!(sign_split(&FourierSeries::sine(1, 1.0, 0.2, 1), 64).is_err());
    }

    #[test]
    fn eigen_cost_matches_closed_form_and_oracle() {
        // W₁ between the halves of sin(2πnx) is ∫|cos(2πnx)|/(2πn) = 1/(π²n)
        for n in [1usize, 2, 5] {
            let v = eigen_split_cost(n, 1.0).unwrap();
            assert!((v * PI * PI * n as f64 - 1.0).abs() < 1e-5, "n = {n}: {v}");
        }
        let s = FourierSeries::sine(1, 1.0, 0.0, 1);
        let split = sign_split(&s, 4096).unwrap();
        let (a, b) = (
            quantize(&split.fplus, 256).unwrap(),
            quantize(&split.fminus, 256).unwrap(),
        );
        let b = b.scaled(a.total_mass() / b.total_mass());
        let (lp, _) = discrete_ot_oracle(&a, &b, 1.0).unwrap();
        assert!((lp - eigen_split_cost(1, 1.0).unwrap()).abs() < 1e-3);
        let halves = eigen_split_cost(8, 2.0).unwrap() / eigen_split_cost(16, 2.0).unwrap();
        assert!((halves - 2.0).abs() < 0.04);
    }

    #[test]
    fn root_counts() {
        for n in [1usize, 3, 16] {
            assert_eq!(
                count_sign_changes(&FourierSeries::sine(n, 1.0, 0.0, n)).unwrap(),
                2 * n
            );
        }
        assert!(matches!(
            count_sign_changes(&FourierSeries::sine(1, 1.0, 0.1, 1)),
            Err(Error::NonzeroMean(_))
        ));
        let f = FourierSeries::sine(1, 0.1, 0.0, 9).add(&FourierSeries::sine(9, 1.0, 0.0, 9));
        assert!(count_sign_changes(&f).unwrap() >= 18);
    }

    #[test]
    fn uncertainty_ratio_of_sines() {
        let target = PI * PI / 4.0;
        for n in [1usize, 2, 17, 64] {
            let r = uncertainty_sides(&FourierSeries::sine(n, 1.0, 0.0, n)).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-12);
            assert!((r.ratio / target - 1.0).abs() < 1e-9);
        }
        let f = FourierSeries::sine(1, 0.01, 0.0, 16).add(&FourierSeries::sine(16, 1.0, 0.0, 16));
        let r = uncertainty_sides(&f).unwrap();
        assert!(r.ratio >= 0.99 * target);
        let r3 = uncertainty_sides(&f.scaled(3.0)).unwrap();
        assert!((r3.ratio - r.ratio).abs() < 1e-12 * r.ratio);
    }

    #[test]
    fn critical_point_ratio_of_sines() {
        let target = 2f64.sqrt() * PI / 8.0;
        for n in [1usize, 4, 33] {
            let r = critical_point_sides(&FourierSeries::sine(n, 1.0, 0.0, n)).unwrap();
            assert_eq!(r.count, 2 * n);
            assert!((r.ratio / target - 1.0).abs() < 1e-9);
            let shifted = FourierSeries::sine(n, 1.0, 0.0, n).rotated(0.123);
            let r2 = critical_point_sides(&shifted).unwrap();
            assert!((r2.ratio - r.ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn two_step_plan_examples() {
        for n in [2usize, 8, 32] {
            let s = FourierSeries::sine(n, 1.0, 0.0, n);
            let c = high_freq_two_step_cost(&s, n, 1.0).unwrap();
            assert!(c.realized >= c.exact);
            assert!(c.ratio() <= 10.0 * (n as f64).ln().sqrt());
        }
        let s = FourierSeries::sine(3, 1.0, 0.0, 4);
        assert!(matches!(
            high_freq_two_step_cost(&s, 4, 1.0),
            Err(Error::BandViolation(3, 4))
        ));
    }
}
