//! Interpolation on uniform grids.

use num_complex::Complex64;

/// Not-a-knot cubic spline through uniformly spaced samples.
///
/// Not-a-knot end conditions keep the interpolant fourth-order accurate up to the
/// endpoints, which matters for non-decaying data such as a sampled `g`.
#[derive(Debug, Clone)]
pub struct UniformSpline {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>) -> Self {
        let m = second_derivatives(dx, &y);
        Self { x0, dx, y, m }
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.y.len() - 1) as f64 * self.dx
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.y.len();
        let s = (x - self.x0) / self.dx;
        let i = (s.floor().max(0.0) as usize).min(n - 2);
        (i, x - (self.x0 + i as f64 * self.dx))
    }

    /// Evaluates the spline; outside the knot range the end cubic is extrapolated.
    pub fn eval(&self, x: f64) -> f64 {
        if self.y.len() == 1 {
            return self.y[0];
        }
        let (i, u) = self.locate(x);
        let h = self.dx;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        y0 + u * (b + u * (m0 / 2.0 + u * (m1 - m0) / (6.0 * h)))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if self.y.len() == 1 {
            return 0.0;
        }
        let (i, u) = self.locate(x);
        let h = self.dx;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        b + u * (m0 + u * (m1 - m0) / (2.0 * h))
    }
}

fn second_derivatives(h: f64, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let rhs = |i: usize| 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h);
    if n == 3 {
        // a single parabola
        let c = rhs(1) / 6.0;
        m.fill(c);
        return m;
    }
    // On a uniform grid not-a-knot gives M0 = 2M1 - M2, which collapses the first
    // interior row to 6 M1 = rhs1 (and symmetrically at the far end).
    m[1] = rhs(1) / 6.0;
    m[n - 2] = rhs(n - 2) / 6.0;
    if n > 4 {
        // Tridiagonal solve for M2..M_{n-3}: M_{i-1} + 4 M_i + M_{i+1} = rhs_i.
        let k = n - 4;
        let mut c = vec![0.0; k];
        let mut d = vec![0.0; k];
        for (r, i) in (2..n - 2).enumerate() {
            let mut rr = rhs(i);
            if i == 2 {
                rr -= m[1];
            }
            if i == n - 3 {
                rr -= m[n - 2];
            }
            let denom = if r == 0 { 4.0 } else { 4.0 - c[r - 1] };
            c[r] = 1.0 / denom;
            d[r] = if r == 0 { rr / denom } else { (rr - d[r - 1]) / denom };
        }
        m[n - 3] = d[k - 1];
        for r in (0..k - 1).rev() {
            m[r + 2] = d[r] - c[r] * m[r + 3];
        }
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
    m
}

/// Pair of real splines for complex samples.
#[derive(Debug, Clone)]
pub struct ComplexSpline {
    re: UniformSpline,
    im: UniformSpline,
}

impl ComplexSpline {
    pub fn new(x0: f64, dx: f64, y: &[Complex64]) -> Self {
        Self {
            re: UniformSpline::new(x0, dx, y.iter().map(|z| z.re).collect()),
            im: UniformSpline::new(x0, dx, y.iter().map(|z| z.im).collect()),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        Complex64::new(self.re.eval(x), self.im.eval(x))
    }
}

/// Cubic Hermite interpolant from values and derivatives on a uniform grid.
#[derive(Debug, Clone)]
pub struct UniformHermite {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl UniformHermite {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>, dy: Vec<f64>) -> Self {
        assert_eq!(y.len(), dy.len());
        assert!(y.len() >= 2);
        Self { x0, dx, y, dy }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.y.len();
        let s = (x - self.x0) / self.dx;
        let i = (s.floor().max(0.0) as usize).min(n - 2);
        (i, (x - (self.x0 + i as f64 * self.dx)) / self.dx)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, s) = self.locate(x);
        let h = self.dx;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, s) = self.locate(x);
        let h = self.dx;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        d00 * self.y[i] + d10 * self.dy[i] + d01 * self.y[i + 1] + d11 * self.dy[i + 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubics_exactly() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let x0 = -1.0;
        let dx = 0.1;
        let y: Vec<f64> = (0..21).map(|i| f(x0 + i as f64 * dx)).collect();
        let s = UniformSpline::new(x0, dx, y);
        for k in 0..200 {
            let x = -1.0 + k as f64 * 0.00999;
            assert!((s.eval(x) - f(x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn spline_error_is_fourth_order() {
        let err = |n: usize| {
            let dx = 2.0 / (n - 1) as f64;
            let y: Vec<f64> = (0..n).map(|i| (-1.0 + i as f64 * dx).sin()).collect();
            let s = UniformSpline::new(-1.0, dx, y);
            (0..1000)
                .map(|k| {
                    let x = -1.0 + 2.0 * (k as f64 + 0.37) / 1000.0;
                    (s.eval(x) - x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn hermite_matches_cubic() {
        let f = |x: f64| x * x * x - x;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let h = UniformHermite::new(0.0, 0.5, xs.iter().map(|&x| f(x)).collect(), xs.iter().map(|&x| df(x)).collect());
        for x in [0.1, 0.77, 1.3, 1.99] {
            assert!((h.eval(x) - f(x)).abs() < 1e-13);
            assert!((h.derivative(x) - df(x)).abs() < 1e-12);
        }
    }
}
