//! Composite quadrature on uniform samples.

use std::ops::{Add, Mul};

/// Composite Simpson over all samples; an odd number of intervals is closed with the
/// three-eighths rule over the last three, so cubics stay exact for either parity.
pub fn simpson<T>(y: &[T], dx: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = y.len();
    match n {
        0 | 1 => T::default(),
        2 => (y[0] + y[1]) * (0.5 * dx),
        _ => {
            let intervals = n - 1;
            let even_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
            let mut total = T::default();
            if even_end > 0 {
                let mut acc = y[0] + y[even_end];
                for (i, &v) in y.iter().enumerate().take(even_end).skip(1) {
                    acc = acc + v * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                total = acc * (dx / 3.0);
            }
            if even_end != n - 1 {
                let k = even_end;
                total = total + (y[k] + y[k + 1] * 3.0 + y[k + 2] * 3.0 + y[k + 3]) * (3.0 * dx / 8.0);
            }
            total
        }
    }
}

/// Trapezoid rule over all samples.
pub fn trapezoid<T>(y: &[T], dx: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = y.len();
    if n < 2 {
        return T::default();
    }
    let mut acc = (y[0] + y[n - 1]) * 0.5;
    for &v in &y[1..n - 1] {
        acc = acc + v;
    }
    acc * dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_on_cubics_for_both_parities() {
        for n in [3usize, 4, 5, 6, 9, 12] {
            let dx = 1.0 / (n - 1) as f64;
            let y: Vec<f64> = (0..n).map(|i| (i as f64 * dx).powi(3) - 2.0 * (i as f64 * dx)).collect();
            assert!((simpson(&y, dx) - (0.25 - 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn trapezoid_exact_on_lines() {
        let y = [1.0, 2.0, 3.0, 4.0];
        assert!((trapezoid(&y, 0.5) - 3.75).abs() < 1e-15);
    }
}
