//! Fourth-order finite differences on uniform grids.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// First derivative with the 5-point central stencil in the interior and 5-point
/// one-sided stencils on the two outermost points at each end. Needs `n >= 5`.
pub fn derivative4<T>(f: &[T], dx: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    assert!(n >= 5, "fourth-order stencil needs at least 5 samples");
    let inv = 1.0 / (12.0 * dx);
    let mut d = Vec::with_capacity(n);
    let fwd = |i: usize| {
        (f[i] * -25.0 + f[i + 1] * 48.0 - f[i + 2] * 36.0 + f[i + 3] * 16.0 - f[i + 4] * 3.0) * inv
    };
    let fwd1 = |i: usize| {
        // derivative at i+1 using points i..i+4
        (f[i] * -3.0 - f[i + 1] * 10.0 + f[i + 2] * 18.0 - f[i + 3] * 6.0 + f[i + 4]) * inv
    };
    let bwd = |i: usize| {
        (f[i] * 25.0 - f[i - 1] * 48.0 + f[i - 2] * 36.0 - f[i - 3] * 16.0 + f[i - 4] * 3.0) * inv
    };
    let bwd1 = |i: usize| {
        // derivative at i-1 using points i-4..i
        (f[i] * 3.0 + f[i - 1] * 10.0 - f[i - 2] * 18.0 + f[i - 3] * 6.0 - f[i - 4]) * inv
    };
    d.push(fwd(0));
    d.push(fwd1(0));
    for i in 2..n - 2 {
        d.push((f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) * inv);
    }
    d.push(bwd1(n - 1));
    d.push(bwd(n - 1));
    d
}

/// Indices on which the central stencil is used.
pub fn interior(n: usize) -> std::ops::Range<usize> {
    2..n.saturating_sub(2)
}

pub fn derivative4_complex(f: &[Complex64], dx: f64) -> Vec<Complex64> {
    derivative4(f, dx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics_everywhere() {
        let p = |x: f64| 2.0 - x + 3.0 * x * x - 0.5 * x.powi(3) + 0.25 * x.powi(4);
        let dp = |x: f64| -1.0 + 6.0 * x - 1.5 * x * x + x.powi(3);
        let dx = 0.1;
        let xs: Vec<f64> = (0..12).map(|i| -0.5 + i as f64 * dx).collect();
        let f: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        let d = derivative4(&f, dx);
        for (x, di) in xs.iter().zip(d) {
            assert!((di - dp(*x)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn central_stencil_converges_at_fourth_order() {
        let err = |n: usize| {
            let dx = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (3.0 * i as f64 * dx).sin()).collect();
            let d = derivative4(&f, dx);
            interior(n)
                .map(|i| (d[i] - 3.0 * (3.0 * i as f64 * dx).cos()).abs())
                .fold(0.0, f64::max)
        };
        let slope = (err(51) / err(101)).log2();
        assert!((slope - 4.0).abs() < 0.2, "slope {slope}");
    }
}
