//! Root finding and norms of real trigonometric polynomials.

use crate::error::{Error, Result};
use crate::measures::{grid_values, FourierSeries};

/// Oversampling factor of the root and norm grids relative to `K`.
pub const OVERSAMPLE: usize = 64;

/// Samples with `|f| ≤ ZERO_REL · sup` are treated as zeros.
const ZERO_REL: f64 = 1e-13;
const BISECT_WIDTH: f64 = 1e-12;

fn grid_size(s: &FourierSeries) -> usize {
    (OVERSAMPLE * s.max_freq().max(1)).max(256)
}

/// Locations of the sign changes of the series on the circle, in increasing
/// order. Tangential zeros are not sign changes and are skipped.
pub fn sign_change_roots(s: &FourierSeries) -> Result<Vec<f64>> {
    let m = grid_size(s);
    let vals = grid_values(s, m);
    let sup = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if sup == 0.0 || !sup.is_finite() {
        return Err(Error::ZeroFunction);
    }
    let thresh = ZERO_REL * sup;
    let nonzero: Vec<usize> = (0..m).filter(|&j| vals[j].abs() > thresh).collect();
    if nonzero.is_empty() {
        return Err(Error::ZeroFunction);
    }
    let mut roots = Vec::new();
    for (idx, &j) in nonzero.iter().enumerate() {
        let next = nonzero[(idx + 1) % nonzero.len()];
        if (vals[j] > 0.0) == (vals[next] > 0.0) {
            continue;
        }
        let a = j as f64 / m as f64;
        let mut b = next as f64 / m as f64;
        if next <= j {
            b += 1.0;
        }
        let r = bisect(s, a, b, vals[j] > 0.0);
        roots.push(r.rem_euclid(1.0));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn bisect(s: &FourierSeries, mut a: f64, mut b: f64, positive_at_a: bool) -> f64 {
    while b - a > BISECT_WIDTH {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = s.evaluate(mid.rem_euclid(1.0));
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == positive_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Number of sign changes on the circle.
pub fn count_sign_changes(s: &FourierSeries) -> Result<usize> {
    Ok(sign_change_roots(s)?.len())
}

/// `∫₀¹ |f|`, exact up to root location: the antiderivative is evaluated at
/// consecutive sign changes.
pub fn l1_norm(s: &FourierSeries) -> Result<f64> {
    let c0 = s.mean();
    let roots = match sign_change_roots(s) {
        Ok(r) => r,
        Err(Error::ZeroFunction) if c0 == 0.0 => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let prim = |x: f64| c0 * x + s.antiderivative(x);
    if roots.is_empty() {
        return Ok(c0.abs());
    }
    let n = roots.len();
    let total = (0..n)
        .map(|i| {
            let a = roots[i];
            let b = if i + 1 < n {
                roots[i + 1]
            } else {
                roots[0] + 1.0
            };
            (prim(b) - prim(a)).abs()
        })
        .sum();
    Ok(total)
}

/// `max |f|`, from the grid maximum refined by golden-section search.
pub fn sup_norm(s: &FourierSeries) -> f64 {
    let m = grid_size(s);
    let vals = grid_values(s, m);
    let (j, v) = vals
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is nonempty");
    let h = 1.0 / m as f64;
    let f = |x: f64| s.evaluate(x.rem_euclid(1.0)).abs();
    let (mut a, mut b) = (j as f64 * h - h, j as f64 * h + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < 1e-14 {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    v.max(f1).max(f2)
}

/// `(∫₀¹ f²)^{1/2}` by Parseval.
pub fn l2_norm(s: &FourierSeries) -> f64 {
    s.energy().sqrt()
}
