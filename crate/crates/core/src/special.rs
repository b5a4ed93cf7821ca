//! Bessel function of the first kind, order zero.

use std::f64::consts::PI;

/// Below this argument the power series is used; above it the Hankel
/// asymptotic expansion.
const SERIES_LIMIT: f64 = 12.0;

/// `J₀(x)`, accurate to ~1e-12 absolute for all real `x`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

fn series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k as f64 > q.sqrt() {
            break;
        }
    }
    sum
}

fn asymptotic(x: f64) -> f64 {
    // a_k(0) = (-1)^k ∏(2j-1)² / (k! 8^k); summed until the terms stop shrinking.
    let mut a = 1.0;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut xpow = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60usize {
        if k > 0 {
            let j = (2 * k - 1) as f64;
            a *= -(j * j) / (8.0 * k as f64);
            xpow *= x;
        }
        let term = a / xpow;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let w = x - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ`; the trapezoid rule converges
    /// geometrically for this periodic integrand.
    fn j0_quadrature(x: f64) -> f64 {
        let n = 2000;
        let h = PI / n as f64;
        let mut s = 0.5 * (1.0 + 1.0);
        for i in 1..n {
            s += (x * (i as f64 * h).sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn reference_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_integral_representation() {
        let mut x = 0.0;
        while x < 60.0 {
            let a = bessel_j0(x);
            let b = j0_quadrature(x);
            assert!((a - b).abs() < 1e-10, "x={x}: {a} vs {b}");
            x += 0.37;
        }
        for x in [11.999, 12.0, 12.001, 100.0, 433.3] {
            assert!((bessel_j0(x) - j0_quadrature(x)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn first_zero() {
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-13);
    }
}
