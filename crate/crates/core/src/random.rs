//! Seeded generators of random test measures and polynomials.
//!
//! Each draw takes its own `(seed, stream)` pair so results do not depend on
//! the order in which parallel workers run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::measures::{
    synthesize_grid, Atom, AtomicMeasure, FourierSeries, IntervalDensity, TorusDensity,
};

/// Independent generator for draw number `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn complex_in_disc(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `|P|²` for a random `P = Σ_{j=0}^{D} a_j e^{2πijx}`, scaled to mean 1:
/// a nonnegative trigonometric polynomial of degree `D`.
pub fn random_nonnegative_poly(rng: &mut impl Rng, degree: usize) -> FourierSeries {
    let a: Vec<Complex64> = (0..=degree).map(|_| complex_in_disc(rng)).collect();
    // c_k = Σ_j a_{j+k} conj(a_j)
    let c = |k: usize| -> Complex64 { (0..=degree - k).map(|j| a[j + k] * a[j].conj()).sum() };
    let c0 = c(0).re;
    let pos: Vec<Complex64> = (1..=degree).map(|k| c(k) / c0).collect();
    FourierSeries::from_positive(1.0, &pos)
}

/// Random mean-zero real polynomial with frequencies `1..=degree`.
pub fn random_mean_zero_poly(rng: &mut impl Rng, degree: usize) -> FourierSeries {
    let pos: Vec<Complex64> = (0..degree).map(|_| complex_in_disc(rng)).collect();
    FourierSeries::from_positive(0.0, &pos)
}

/// Random mean-zero real polynomial with spectrum in `k0..=k1`.
pub fn random_band_poly(rng: &mut impl Rng, k0: usize, k1: usize) -> FourierSeries {
    let pos: Vec<Complex64> = (1..=k1)
        .map(|k| {
            if k < k0 {
                Complex64::new(0.0, 0.0)
            } else {
                complex_in_disc(rng)
            }
        })
        .collect();
    FourierSeries::from_positive(0.0, &pos)
}

/// A nonnegative polynomial of random degree in `1..=max_degree` evaluated
/// on `m` points and rescaled to mean exactly one.
pub fn random_probability_density(
    rng: &mut impl Rng,
    m: usize,
    max_degree: usize,
) -> Result<TorusDensity> {
    let degree = rng.gen_range(1..=max_degree);
    let s = random_nonnegative_poly(rng, degree);
    let g = synthesize_grid(&s, m)?.into_density(1e-12)?;
    let mean = g.mean();
    g.scaled(1.0 / mean)
}

/// `g = 1 + Σ_{k=1}^{terms} a_k cos(πkx)` with `Σ|a_k| < 1` on `m + 1`
/// nodes of `[0, 1]`, rescaled to unit trapezoid mass. Smooth and bounded
/// below by a positive constant.
pub fn random_interval_density(
    rng: &mut impl Rng,
    m: usize,
    terms: usize,
) -> Result<IntervalDensity> {
    let mut a: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let total: f64 = a.iter().map(|v: &f64| v.abs()).sum();
    let budget = rng.gen_range(0.1..0.9);
    if total > 0.0 {
        a.iter_mut().for_each(|v| *v *= budget / total);
    }
    let g = IntervalDensity::from_fn(m, |x| {
        1.0 + a
            .iter()
            .enumerate()
            .map(|(k, ak)| ak * (std::f64::consts::PI * (k + 1) as f64 * x).cos())
            .sum::<f64>()
    })?;
    let mass = g.mass();
    IntervalDensity::new(g.nodes().iter().map(|v| v / mass).collect())
}

/// `n` atoms at uniform locations with weights in `[0.05, 1)`, scaled to
/// total `mass`.
pub fn random_atoms(rng: &mut impl Rng, n: usize, mass: f64) -> Result<AtomicMeasure> {
    let atoms = (0..n)
        .map(|_| Atom::new(rng.gen::<f64>(), rng.gen_range(0.05..1.0)))
        .collect();
    let a = AtomicMeasure::new(atoms)?;
    Ok(a.scaled(mass / a.total_mass()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig;

    #[test]
    fn nonnegative_poly_is_nonnegative_with_unit_mean() {
        let mut r = rng_for(1, 0);
        for d in [1usize, 5, 64] {
            let s = random_nonnegative_poly(&mut r, d);
            assert_eq!(s.mean(), 1.0);
            let g = synthesize_grid(&s, 64 * d.max(4)).unwrap();
            assert!(g.min() > -1e-12);
            assert!(trig::sup_norm(&s) >= 1.0);
        }
    }

    #[test]
    fn streams_are_reproducible_and_independent() {
        let a: f64 = rng_for(42, 3).gen();
        let b: f64 = rng_for(42, 3).gen();
        let c: f64 = rng_for(42, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn interval_density_has_unit_mass_and_positive_floor() {
        let mut r = rng_for(9, 0);
        let g = random_interval_density(&mut r, 1024, 6).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-14);
        assert!(g.nodes().iter().all(|&v| v > 0.05));
        let d = random_probability_density(&mut r, 512, 16).unwrap();
        assert!((d.mean() - 1.0).abs() < 1e-14);
    }
}
