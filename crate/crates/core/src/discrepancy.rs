//! Discrepancy of finite point sets and weighted atoms on `[0, 1)`.

use serde::{Deserialize, Serialize};

use crate::cdf::{abs_pow_integral, Cdf};
use crate::error::{check_exponent, Error, Result};
use crate::measures::AtomicMeasure;
use crate::ot::w1_circle;

/// Largest point set accepted by [`extreme_discrepancy`].
pub const EXTREME_MAX_POINTS: usize = 100_000;

/// A sorted multiset of points in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<f64>,
}

impl PointSet {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&x) = points
            .iter()
            .find(|x| !(x.is_finite() && (0.0..1.0).contains(*x)))
        {
            return Err(Error::LocationOutOfRange(x));
        }
        points.sort_by(f64::total_cmp);
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Equal-weight empirical measure `(1/N) Σ δ_{x_i}`.
    pub fn to_measure(&self) -> AtomicMeasure {
        AtomicMeasure::from_points(&self.points).expect("points are validated")
    }

    /// All points moved by `shift` around the circle.
    pub fn rotated(&self, shift: f64) -> Self {
        let pts = self
            .points
            .iter()
            .map(|x| {
                let y = (x + shift).rem_euclid(1.0);
                if y >= 1.0 {
                    0.0
                } else {
                    y
                }
            })
            .collect();
        PointSet::new(pts).expect("rotation keeps points in range")
    }
}

/// `max_i max(i/N − x_(i), x_(i) − (i−1)/N)`, the supremum of the anchored
/// deviation `|#{x_j ≤ x}/N − x|`.
pub fn star_discrepancy(ps: &PointSet) -> f64 {
    let n = ps.len() as f64;
    ps.points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = (i + 1) as f64;
            (i / n - x).max(x - (i - 1.0) / n)
        })
        .fold(0.0, f64::max)
}

/// Star discrepancy of a weighted measure against `m·dx`, with `m` its mass.
pub fn star_discrepancy_weighted(a: &AtomicMeasure) -> f64 {
    let (lo, hi) = deviation_range(a);
    lo.abs().max(hi.abs())
}

/// Extremes of `G(x) = μ([0, x]) − m·x` over both one-sided limits at every
/// atom and the endpoints, where `G = 0`.
fn deviation_range(a: &AtomicMeasure) -> (f64, f64) {
    let m = a.total_mass();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut acc = 0.0;
    for atom in a.atoms() {
        let before = acc - m * atom.location;
        acc += atom.weight;
        let after = acc - m * atom.location;
        lo = lo.min(before);
        hi = hi.max(after);
    }
    (lo, hi)
}

/// `sup_J |μ_N(J) − |J||` over all arcs of the circle, wrapping arcs
/// included. An arc `(a, b]` has deviation `G(b) − G(a)`, and a wrapping arc
/// is the negated complement, so the supremum is `max G − min G`.
pub fn extreme_discrepancy(ps: &PointSet) -> Result<f64> {
    if ps.len() > EXTREME_MAX_POINTS {
        return Err(Error::SizeCap {
            what: "extreme discrepancy points",
            size: ps.len(),
            cap: EXTREME_MAX_POINTS,
        });
    }
    Ok(extreme_discrepancy_weighted(&ps.to_measure()))
}

/// Extreme discrepancy of a weighted measure against `m·dx`.
pub fn extreme_discrepancy_weighted(a: &AtomicMeasure) -> f64 {
    let (lo, hi) = deviation_range(a);
    hi - lo
}

/// `(∫₀¹ |d(x)|^p dx)^{1/p}` with `d(x) = #{x_j ≤ x}/N − x`, integrated
/// exactly between consecutive points.
pub fn lp_discrepancy(ps: &PointSet, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let n = ps.len() as f64;
    let mut total = 0.0;
    let mut prev = 0.0;
    for (i, &x) in ps.points.iter().enumerate() {
        let level = i as f64 / n;
        total += abs_pow_integral(level - prev, level - x, x - prev, p);
        prev = x;
    }
    total += abs_pow_integral(1.0 - prev, 0.0, 1.0 - prev, p);
    Ok(total.powf(1.0 / p))
}

/// Transport cost to the uniform measure next to the extreme discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyGap {
    pub w1: f64,
    pub disc: f64,
    /// `w1 / disc`.
    pub ratio: f64,
}

/// `W₁(μ_N, dx)` on the circle against the extreme discrepancy of the set.
pub fn w1_vs_discrepancy_gap(ps: &PointSet) -> Result<DiscrepancyGap> {
    let mu = Cdf::from_atoms(&ps.to_measure());
    let w1 = w1_circle(&mu, &Cdf::uniform(mu.total_mass()))?.cost;
    let disc = extreme_discrepancy(ps)?;
    Ok(DiscrepancyGap {
        w1,
        disc,
        ratio: w1 / disc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn centered(n: usize) -> PointSet {
        PointSet::new(
            (1..=n)
                .map(|i| (2 * i - 1) as f64 / (2 * n) as f64)
                .collect(),
        )
        .unwrap()
    }

    /// Direct scan over all pairs of candidate arc endpoints.
    fn extreme_by_pairs(ps: &PointSet) -> f64 {
        let n = ps.len() as f64;
        let mut cands = vec![(0.0, 0.0)];
        for (i, &x) in ps.points().iter().enumerate() {
            cands.push((x, i as f64 / n - x));
            cands.push((x, (i + 1) as f64 / n - x));
        }
        let mut best = 0.0f64;
        for a in &cands {
            for b in &cands {
                best = best.max((b.1 - a.1).abs());
            }
        }
        best
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_discrepancy(&PointSet::new(vec![0.5]).unwrap()), 0.5);
        assert!((star_discrepancy(&centered(8)) - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(star_discrepancy(&PointSet::new(vec![0.0]).unwrap()), 1.0);
    }

    #[test]
    fn extreme_examples() {
        assert_eq!(
            extreme_discrepancy(&PointSet::new(vec![0.5]).unwrap()).unwrap(),
            1.0
        );
        assert!((extreme_discrepancy(&centered(8)).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn lp_examples() {
        let single = PointSet::new(vec![0.5]).unwrap();
        assert!((lp_discrepancy(&single, 1.0).unwrap() - 0.25).abs() < 1e-15);
        // fine midpoint quadrature of d² for the centered 4-lattice
        let ps = centered(4);
        let m = 400_000;
        let q: f64 = (0..m)
            .map(|j| {
                let x = (j as f64 + 0.5) / m as f64;
                let c = ps.points().iter().filter(|&&p| p <= x).count() as f64 / 4.0;
                (c - x).powi(2)
            })
            .sum::<f64>()
            / m as f64;
        let v = lp_discrepancy(&ps, 2.0).unwrap();
        assert!((v * v - q).abs() < 1e-10);
        // lattice {i/N}: d = i/N − x on each cell, ∫ = N · ∫₀^{1/N} x² = 1/(3N²)
        let lat = PointSet::new((0..5).map(|i| i as f64 / 5.0).collect()).unwrap();
        let v = lp_discrepancy(&lat, 2.0).unwrap();
        assert!((v * v - 1.0 / 75.0).abs() < 1e-15);
    }

    #[test]
    fn gap_examples() {
        let g = w1_vs_discrepancy_gap(&centered(8)).unwrap();
        assert!((g.w1 - 1.0 / 32.0).abs() < 1e-12);
        assert!((g.disc - 0.125).abs() < 1e-15);
        let g = w1_vs_discrepancy_gap(&PointSet::new(vec![0.5]).unwrap()).unwrap();
        assert!((g.w1 - 0.25).abs() < 1e-12);
        assert_eq!(g.disc, 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn discrepancy_orderings(pts in prop::collection::vec(0.0f64..1.0, 1..60), shift in 0.0f64..1.0) {
            let ps = PointSet::new(pts).unwrap();
            let star = star_discrepancy(&ps);
            let ext = extreme_discrepancy(&ps).unwrap();
            prop_assert!(star <= ext + 1e-15);
            prop_assert!(ext <= 2.0 * star + 1e-15);
            prop_assert!((ext - extreme_by_pairs(&ps)).abs() < 1e-14);
            let rot = extreme_discrepancy(&ps.rotated(shift)).unwrap();
            prop_assert!((rot - ext).abs() < 1e-12);
            let g = w1_vs_discrepancy_gap(&ps).unwrap();
            prop_assert!(g.w1 <= 2.0 * g.disc);
            let (l1, l2, l8) = (
                lp_discrepancy(&ps, 1.0).unwrap(),
                lp_discrepancy(&ps, 2.0).unwrap(),
                lp_discrepancy(&ps, 8.0).unwrap(),
            );
            prop_assert!(l1 <= l2 + 1e-15 && l2 <= l8 + 1e-15 && l8 <= star + 1e-15);
        }
    }
}
