//! Quadratic-residue and Kronecker measures, and Diophantine diagnostics.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{fourier_of_atoms, Atom, AtomicMeasure};

/// Largest Kronecker sequence length.
pub const KRONECKER_MAX_N: usize = 10_000_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `lo..=hi`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Up to `count` distinct odd primes in `[lo, hi]`, each the first prime at or
/// above a logarithmically spaced target.
pub fn log_spaced_primes(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let primes = primes_in(lo.max(3), hi);
    if primes.is_empty() || count == 0 {
        return Vec::new();
    }
    let (a, b) = ((lo.max(3)) as f64, hi as f64);
    let mut out: Vec<u64> = (0..count)
        .filter_map(|i| {
            let t = if count == 1 {
                0.0
            } else {
                i as f64 / (count - 1) as f64
            };
            let target = (a.ln() + t * (b.ln() - a.ln())).exp();
            // the slack absorbs exp(ln x) round-off at the endpoints
            let idx = primes.partition_point(|&p| (p as f64) < target * (1.0 - 1e-12));
            primes.get(idx.min(primes.len() - 1)).copied()
        })
        .collect();
    out.dedup();
    out
}

/// An odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeResidueSpec {
    p: u64,
}

impl PrimeResidueSpec {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeResidueSpec { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// `(1/p) Σ_{k=1}^{p} δ_{k²/p mod 1}`, with coincident squares stacked.
pub fn quadratic_residue_measure(spec: PrimeResidueSpec) -> AtomicMeasure {
    let p = spec.p;
    let mut counts = vec![0u32; p as usize];
    for k in 1..=p {
        counts[((k as u128 * k as u128) % p as u128) as usize] += 1;
    }
    let atoms = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(r, &c)| Atom::new(r as f64 / p as f64, c as f64 / p as f64))
        .collect();
    AtomicMeasure::new(atoms).expect("residues are valid atoms")
}

/// `|μ̂(j)|` predicted for the quadratic-residue measure: 1 when `p | j`,
/// `p^{−1/2}` otherwise.
pub fn gauss_magnitude(p: u64, j: u64) -> f64 {
    if j.is_multiple_of(p) {
        1.0
    } else {
        (p as f64).powf(-0.5)
    }
}

/// `max_{0≤j≤j_max} ||μ̂(j)| − predicted|` with `μ̂` from
/// [`fourier_of_atoms`].
pub fn gauss_magnitude_check(spec: PrimeResidueSpec, j_max: usize) -> Result<f64> {
    if j_max == 0 {
        return Err(Error::InvalidParameter("j_max must be >= 1".into()));
    }
    let s = fourier_of_atoms(&quadratic_residue_measure(spec), j_max);
    Ok((0..=j_max as i64)
        .map(|j| (s.coeff(j).norm() - gauss_magnitude(spec.p, j as u64)).abs())
        .fold(0.0, f64::max))
}

/// A rotation number `α mod 1` with 128 fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rotation(pub u128);

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

impl Rotation {
    /// `{nα}` as a double in `[0, 1)`.
    pub fn point(&self, n: u64) -> f64 {
        let x = (n as u128).wrapping_mul(self.0);
        (x >> 75) as f64 * 2f64.powi(-53)
    }

    /// `‖nα‖`, the distance from `nα` to the nearest integer.
    pub fn nearest_int_distance(&self, n: u64) -> f64 {
        let x = (n as u128).wrapping_mul(self.0);
        let d = x.min(x.wrapping_neg());
        d as f64 / TWO_POW_128
    }

    pub fn as_f64(&self) -> f64 {
        self.point(1)
    }
}

fn frac_bits(numer: &BigUint, denom: &BigUint) -> u128 {
    let scaled: BigUint = (numer % denom) << 128u32;
    let q = scaled / denom;
    let digits = q.to_u64_digits();
    digits
        .iter()
        .rev()
        .fold(0u128, |acc, &d| (acc << 64) | d as u128)
}

/// The irrational (or test) rotation number of a Kronecker sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Alpha {
    Sqrt2,
    Golden,
    /// Decimal `"1.4142…"` or rational `"a/b"` literal.
    Custom(String),
}

impl Alpha {
    /// Fractional part to 128 bits.
    pub fn rotation(&self) -> Result<Rotation> {
        let one = BigUint::from(1u8) << 256u32;
        match self {
            Alpha::Sqrt2 => {
                let r = (BigUint::from(2u8) * &one).sqrt();
                Ok(Rotation(frac_bits(&r, &(BigUint::from(1u8) << 128u32))))
            }
            Alpha::Golden => {
                // (1 + √5)/2 mod 1 = (√5 − 1)/2
                let r = (BigUint::from(5u8) * &one).sqrt();
                let num = r - (BigUint::from(1u8) << 128u32);
                Ok(Rotation(frac_bits(&num, &(BigUint::from(2u8) << 128u32))))
            }
            Alpha::Custom(text) => parse_rotation(text),
        }
    }
}

fn parse_uint(s: &str) -> Result<BigUint> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an unsigned integer: {s:?}")));
    }
    BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| Error::Parse(s.into()))
}

fn parse_rotation(text: &str) -> Result<Rotation> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let (a, b) = (parse_uint(a)?, parse_uint(b)?);
        if b == BigUint::from(0u8) {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Rotation(frac_bits(&a, &b)));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let int = if int.is_empty() { "0" } else { int };
    parse_uint(int)?;
    if frac.is_empty() {
        return Ok(Rotation(0));
    }
    let digits = parse_uint(frac)?;
    let denom = BigUint::from(10u8).pow(frac.len() as u32);
    Ok(Rotation(frac_bits(&digits, &denom)))
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let a = match s.trim().to_ascii_lowercase().as_str() {
            "sqrt2" => Alpha::Sqrt2,
            "golden" => Alpha::Golden,
            _ => Alpha::Custom(s.trim().to_string()),
        };
        a.rotation()?;
        Ok(a)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Sqrt2 => f.write_str("sqrt2"),
            Alpha::Golden => f.write_str("golden"),
            Alpha::Custom(s) => f.write_str(s),
        }
    }
}

impl From<Alpha> for String {
    fn from(a: Alpha) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for Alpha {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn check_kronecker_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > KRONECKER_MAX_N {
        return Err(Error::SizeCap {
            what: "Kronecker sequence length",
            size: n,
            cap: KRONECKER_MAX_N,
        });
    }
    Ok(())
}

/// `{nα}` for `n = 1..=N`, in sequence order.
pub fn kronecker_points(alpha: &Alpha, n: usize) -> Result<Vec<f64>> {
    check_kronecker_len(n)?;
    let r = alpha.rotation()?;
    Ok((1..=n as u64).map(|k| r.point(k)).collect())
}

/// `(1/N) Σ_{n=1}^{N} δ_{{nα}}`.
pub fn kronecker_measure(alpha: &Alpha, n: usize) -> Result<AtomicMeasure> {
    AtomicMeasure::from_points(&kronecker_points(alpha, n)?)
}

/// `‖x‖ = min(x − ⌊x⌋, ⌈x⌉ − x)`.
pub fn nearest_int_distance(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

/// `min_{1≤k≤k_max} k·‖kα‖`; zero flags a rational rotation number.
pub fn badly_approximable_floor(alpha: &Alpha, k_max: u64) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    let r = alpha.rotation()?;
    Ok((1..=k_max)
        .map(|k| k as f64 * r.nearest_int_distance(k))
        .fold(f64::INFINITY, f64::min))
}

/// A Kronecker sequence with the empirical constant `c` in
/// `|α − p/q| ≥ c/q²`, estimated over `q ≤ N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerSpec {
    pub alpha: Alpha,
    pub n: usize,
    pub c_estimate: f64,
}

impl KroneckerSpec {
    pub fn new(alpha: Alpha, n: usize) -> Result<Self> {
        check_kronecker_len(n)?;
        let c_estimate = badly_approximable_floor(&alpha, n as u64)?;
        Ok(KroneckerSpec {
            alpha,
            n,
            c_estimate,
        })
    }

    /// True when `α` behaves as a rational at this length.
    pub fn is_degenerate(&self) -> bool {
        self.c_estimate < 1e-12
    }

    pub fn measure(&self) -> Result<AtomicMeasure> {
        kronecker_measure(&self.alpha, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(29) && is_prime(10007));
        assert!(!is_prime(1) && !is_prime(91) && !is_prime(10005));
        assert_eq!(primes_in(10, 30), vec![11, 13, 17, 19, 23, 29]);
        assert!(matches!(PrimeResidueSpec::new(2), Err(Error::NotPrime(2))));
        assert!(matches!(
            PrimeResidueSpec::new(21),
            Err(Error::NotPrime(21))
        ));
        let ps = log_spaced_primes(101, 4999, 25);
        assert_eq!(ps.len(), 25);
        assert_eq!(ps[0], 101);
        assert!(*ps.last().unwrap() <= 4999);
    }

    #[test]
    fn residues_of_three() {
        let m = quadratic_residue_measure(PrimeResidueSpec::new(3).unwrap());
        assert_eq!(m.len(), 2);
        assert_eq!(m.atoms()[0].location, 0.0);
        assert!((m.atoms()[0].weight - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.atoms()[1].location - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.atoms()[1].weight - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn residues_of_twenty_nine() {
        let m = quadratic_residue_measure(PrimeResidueSpec::new(29).unwrap());
        assert_eq!(m.len(), 15);
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        for a in m.atoms() {
            let expected = if a.location == 0.0 { 1.0 } else { 2.0 } / 29.0;
            assert!((a.weight - expected).abs() < 1e-15);
        }
        let s = fourier_of_atoms(&m, 1);
        assert!((s.coeff(1).norm() - 0.185_695_338_177_052_4).abs() < 1e-7);
    }

    #[test]
    fn gauss_magnitudes() {
        let spec = PrimeResidueSpec::new(29).unwrap();
        assert!(gauss_magnitude_check(spec, 100).unwrap() <= 1e-10);
        let m = quadratic_residue_measure(PrimeResidueSpec::new(101).unwrap());
        let s = fourier_of_atoms(&m, 101);
        assert!((s.coeff(101).norm() - 1.0).abs() < 1e-12);
        let m = quadratic_residue_measure(PrimeResidueSpec::new(3).unwrap());
        let s = fourier_of_atoms(&m, 1);
        assert!((s.coeff(1).norm() - 3f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn kronecker_points_match_direct_arithmetic() {
        let pts = kronecker_points(&Alpha::Sqrt2, 3).unwrap();
        let direct = [
            0.414_213_562_373_095_1,
            0.828_427_124_746_190_1,
            0.242_640_687_119_285_2,
        ];
        for (a, b) in pts.iter().zip(direct) {
            assert!((a - b).abs() < 1e-15);
        }
        let half: Alpha = "1/2".parse().unwrap();
        let m = kronecker_measure(&half, 2).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.atoms()[0].location, 0.0);
        assert_eq!(m.atoms()[1].location, 0.5);
        assert!(
            (kronecker_measure(&Alpha::Golden, 1000)
                .unwrap()
                .total_mass()
                - 1.0)
                .abs()
                < 1e-12
        );
        assert!(kronecker_points(&Alpha::Sqrt2, KRONECKER_MAX_N + 1).is_err());
    }

    #[test]
    fn high_precision_survives_large_n() {
        // n·√2 with n = 10⁷ − 1: compare against exact integer square roots
        let n: u64 = 9_999_999;
        let big = BigUint::from(2u64 * n * n) << 256u32;
        let r = big.sqrt();
        let frac = frac_bits(&r, &(BigUint::from(1u8) << 128u32));
        let expected = (frac >> 75) as f64 * 2f64.powi(-53);
        let got = Alpha::Sqrt2.rotation().unwrap().point(n);
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn decimal_and_symbolic_agree() {
        let d: Alpha = "1.41421356237309504880168872420969807856967187537694"
            .parse()
            .unwrap();
        let (a, b) = (d.rotation().unwrap().0, Alpha::Sqrt2.rotation().unwrap().0);
        assert!(a.abs_diff(b) < 1 << 4);
        let g: Alpha = "golden".parse().unwrap();
        assert!((g.rotation().unwrap().as_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 2.3e-16);
        assert!("abc".parse::<Alpha>().is_err());
        assert!("1/0".parse::<Alpha>().is_err());
    }

    #[test]
    fn nearest_integer_examples() {
        assert!((nearest_int_distance(7.071067811) - 0.071067811).abs() < 1e-12);
        assert_eq!(nearest_int_distance(0.5), 0.5);
        assert_eq!(nearest_int_distance(-3.0), 0.0);
    }

    /// Independent double-precision scan of `k·‖kα‖`.
    fn scan(alpha: f64, k_max: u64) -> f64 {
        (1..=k_max)
            .map(|k| k as f64 * nearest_int_distance(k as f64 * alpha))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn badly_approximable_floors() {
        let s = badly_approximable_floor(&Alpha::Sqrt2, 100).unwrap();
        assert!((s - scan(2f64.sqrt(), 100)).abs() < 1e-12);
        // attained at k = 2: 2·(3 − 2√2) = 6 − 4√2
        assert!((s - (6.0 - 4.0 * 2f64.sqrt())).abs() < 1e-14);
        let g = badly_approximable_floor(&Alpha::Golden, 100).unwrap();
        assert!((g - scan((1.0 + 5f64.sqrt()) / 2.0, 100)).abs() < 1e-12);
        assert!((g - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        let third: Alpha = "1/3".parse().unwrap();
        assert!(badly_approximable_floor(&third, 10).unwrap() < 1e-30);
        let spec = KroneckerSpec::new(third, 10).unwrap();
        assert!(spec.is_degenerate());
    }

    #[test]
    fn sqrt2_floor_is_monotone_and_bounded() {
        let r = Alpha::Sqrt2.rotation().unwrap();
        let mut floor = f64::INFINITY;
        for k in 1..=1_000_000u64 {
            floor = floor.min(k as f64 * r.nearest_int_distance(k));
            assert!(floor >= 0.3);
        }
    }

    #[test]
    fn kronecker_coefficients_obey_geometric_series_bound() {
        let n = 500;
        let m = kronecker_measure(&Alpha::Sqrt2, n).unwrap();
        let s = fourier_of_atoms(&m, 64);
        let r = Alpha::Sqrt2.rotation().unwrap();
        for k in 1..=64u64 {
            let bound = 2.0 / (n as f64 * r.nearest_int_distance(k));
            assert!(s.coeff(k as i64).norm() <= bound.min(1.0) + 1e-12);
        }
    }
}
