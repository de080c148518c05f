//! Uniform-to-uniform Fourier sums.
//!
//! [`uniform_sum`] evaluates `S_m = Σ_j x_j exp(sign·i·E_m·t_j)` for uniform `t_j` and
//! uniform `E_m`. When the energy grid is the DFT-conjugate of the time grid the sum
//! is a single FFT with exact integer twiddle indexing; otherwise it goes through a
//! chirp-z (Bluestein) convolution, so arbitrary output grids stay O((N+M) log(N+M)).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::grid::SpectrumGrid;

/// `Σ_j x_j exp(sign·i·E_m·(t0 + j dt))` for every `E_m` of `egrid`. `sign` must be ±1.
pub fn uniform_sum(x: &[Complex64], t0: f64, dt: f64, egrid: &SpectrumGrid, sign: f64) -> Vec<Complex64> {
    debug_assert!(sign == 1.0 || sign == -1.0);
    let n = x.len();
    let m = egrid.n;
    if n == 0 || m == 0 {
        return vec![Complex64::new(0.0, 0.0); m];
    }
    let mut out = if let Some(shift) = conjugate_shift(n, dt, egrid) {
        fft_path(x, shift, sign)
    } else {
        chirp_z(x, dt, egrid, sign)
    };
    // phase from the time origin
    for (k, v) in out.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, sign * egrid.at(k) * t0);
    }
    out
}

/// Returns `s = e_min/dE` when `egrid` is exactly DFT-conjugate to `n` samples at `dt`.
fn conjugate_shift(n: usize, dt: f64, egrid: &SpectrumGrid) -> Option<i64> {
    if egrid.n != n || n < 2 {
        return None;
    }
    let de = egrid.de();
    if ((de * dt * n as f64) / (2.0 * PI) - 1.0).abs() > 1e-12 {
        return None;
    }
    let s = egrid.e_min / de;
    let sr = s.round();
    if (s - sr).abs() > 1e-9 {
        return None;
    }
    Some(sr as i64)
}

fn fft_path(x: &[Complex64], shift: i64, sign: f64) -> Vec<Complex64> {
    let n = x.len();
    let mut buf = x.to_vec();
    let mut planner = FftPlanner::new();
    let fft = if sign < 0.0 {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    fft.process(&mut buf);
    // S_m = X[(shift + m) mod n], with X the DFT in the requested sign.
    (0..n)
        .map(|m| {
            let idx = (shift + m as i64).rem_euclid(n as i64) as usize;
            buf[idx]
        })
        .collect()
}

fn chirp_z(x: &[Complex64], dt: f64, egrid: &SpectrumGrid, sign: f64) -> Vec<Complex64> {
    let n = x.len();
    let m = egrid.n;
    let e0 = egrid.e_min;
    let theta = egrid.de() * dt;
    // m j = (m² + j² − (m − j)²) / 2
    let chirp = |k: i64| -> Complex64 {
        let kk = (k * k) as f64;
        Complex64::from_polar(1.0, sign * 0.5 * theta * kk)
    };
    let len = (n + m - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    for (j, &xj) in x.iter().enumerate() {
        let pre = Complex64::from_polar(1.0, sign * e0 * dt * j as f64);
        a[j] = xj * pre * chirp(j as i64);
    }
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    // kernel conj(chirp(k)) for k in -(n-1)..=(m-1), wrapped circularly
    for k in 0..m {
        b[k] = chirp(k as i64).conj();
    }
    for k in 1..n {
        b[len - k] = chirp(k as i64).conj();
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai *= bi;
    }
    inv.process(&mut a);
    let scale = 1.0 / len as f64;
    (0..m).map(|k| a[k] * scale * chirp(k as i64)).collect()
}

/// Reference O(N·M) evaluation of [`uniform_sum`], one `exp` per term.
pub fn uniform_sum_direct(x: &[Complex64], t0: f64, dt: f64, egrid: &SpectrumGrid, sign: f64) -> Vec<Complex64> {
    (0..egrid.n)
        .map(|k| {
            let e = egrid.at(k);
            x.iter()
                .enumerate()
                .map(|(j, &xj)| xj * Complex64::from_polar(1.0, sign * e * (t0 + j as f64 * dt)))
                .sum()
        })
        .collect()
}

/// Terms between exact re-seeds of the phase recurrence in the direct sums; bounds the
/// accumulated rounding of repeated complex multiplication to ~`RESEED·ε`.
const RESEED: usize = 64;

/// Direct non-uniform sum `S_m = Σ_j x_j exp(sign·i·(E_m y_j + φ_j))` for arbitrary
/// nodes `y_j` and optional per-node phases `φ_j`.
pub fn nonuniform_sum(
    x: &[Complex64],
    nodes: &[f64],
    phase: Option<&[f64]>,
    egrid: &SpectrumGrid,
    sign: f64,
) -> Vec<Complex64> {
    debug_assert_eq!(x.len(), nodes.len());
    let m = egrid.n;
    let de = egrid.de();
    let steps: Vec<Complex64> = nodes.iter().map(|&y| Complex64::from_polar(1.0, sign * de * y)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    out.par_chunks_mut(RESEED).enumerate().for_each(|(b, block)| {
        let m0 = b * RESEED;
        let e0 = egrid.at(m0);
        for (j, (&xj, &yj)) in x.iter().zip(nodes).enumerate() {
            if xj.re == 0.0 && xj.im == 0.0 {
                continue;
            }
            let extra = phase.map_or(0.0, |p| p[j]);
            let mut z = xj * Complex64::from_polar(1.0, sign * (e0 * yj + extra));
            let step = steps[j];
            for o in block.iter_mut() {
                *o += z;
                z *= step;
            }
        }
    });
    out
}

/// Direct evaluation `f_j = Σ_m c_m exp(sign·i·E_m y_j)` at arbitrary points `y_j`.
pub fn nonuniform_eval(coeffs: &[Complex64], egrid: &SpectrumGrid, points: &[f64], sign: f64) -> Vec<Complex64> {
    debug_assert_eq!(coeffs.len(), egrid.n);
    let de = egrid.de();
    points
        .par_iter()
        .map(|&y| {
            let step = Complex64::from_polar(1.0, sign * de * y);
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, block) in coeffs.chunks(RESEED).enumerate() {
                let mut z = Complex64::from_polar(1.0, sign * egrid.at(b * RESEED) * y);
                for &c in block {
                    acc += c * z;
                    z *= step;
                }
            }
            acc
        })
        .collect()
}
