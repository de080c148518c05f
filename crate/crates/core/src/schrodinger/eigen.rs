//! Lowest eigenpairs of the symmetric tridiagonal interior matrix: Sturm-sequence
//! bisection for the energies, inverse iteration for the vectors.

use super::{EigenPair, Hamiltonian1D};
use crate::error::{Error, Result};

const INVERSE_ITERATIONS: usize = 4;
const RESIDUAL_TOL: f64 = 1e-9;

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e: f64, x: f64) -> usize {
    let e2 = e * e;
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for (i, &di) in d.iter().enumerate() {
        q = di - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection inside `[lo, hi]`.
fn bisect(d: &[f64], e: f64, k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − σ I) x = b` for tridiagonal `T` (constant off-diagonal `e`) with partial
/// pivoting; exactly singular pivots are nudged so inverse iteration can proceed.
fn shifted_solve(d: &[f64], e: f64, sigma: f64, b: &[f64], scale: f64) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        let p = d[0] - sigma;
        return vec![b[0] / if p == 0.0 { f64::EPSILON * scale } else { p }];
    }
    // rows after elimination: u0 x_i + u1 x_{i+1} + u2 x_{i+2} = r_i
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut r = b.to_vec();
    // current row i holds (a_i, c_i, 0) in columns (i, i+1, i+2)
    let mut a = d[0] - sigma;
    let mut c = e;
    let mut f = 0.0;
    for i in 0..n - 1 {
        // next row in columns (i, i+1, i+2)
        let (nl, nd, nu) = (e, d[i + 1] - sigma, if i + 2 < n { e } else { 0.0 });
        if a.abs() >= nl.abs() {
            let piv = if a == 0.0 { f64::EPSILON * scale } else { a };
            let m = nl / piv;
            u0[i] = piv;
            u1[i] = c;
            u2[i] = f;
            let rn = r[i + 1] - m * r[i];
            a = nd - m * c;
            c = nu - m * f;
            f = 0.0;
            r[i + 1] = rn;
        } else {
            // swap rows i and i+1
            let m = a / nl;
            u0[i] = nl;
            u1[i] = nd;
            u2[i] = nu;
            let ri = r[i];
            r[i] = r[i + 1];
            let rn = ri - m * r[i + 1];
            a = c - m * nd;
            c = f - m * nu;
            f = 0.0;
            r[i + 1] = rn;
        }
    }
    u0[n - 1] = if a == 0.0 { f64::EPSILON * scale } else { a };
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = r[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
}

/// The `k` lowest eigenpairs of `H`, ascending, each normalized to `‖ψ‖ = 1` with a
/// positive first lobe, mutually orthogonal.
pub fn eigensolve(h: &Hamiltonian1D, k: usize) -> Result<Vec<EigenPair>> {
    let m = h.dim();
    if k == 0 || k > m {
        return Err(Error::InvalidInput(format!(
            "requested {k} eigenpairs from a {m}-dimensional interior operator"
        )));
    }
    let d = h.diagonal();
    let e = h.off_diagonal();
    let lo = d.iter().fold(f64::INFINITY, |a, &x| a.min(x)) - 2.0 * e.abs();
    let hi = d.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x)) + 2.0 * e.abs();
    let scale = lo.abs().max(hi.abs()).max(1.0);

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    for idx in 0..k {
        let lambda = bisect(&d, e, idx, lo, hi);
        let mut v: Vec<f64> = (0..m).map(|j| 1.0 + 0.5 * ((j as f64 + 1.0) * 0.7548776662).sin()).collect();
        normalize(&mut v);
        for _ in 0..INVERSE_ITERATIONS {
            v = shifted_solve(&d, e, lambda, &v, scale);
            for prev in &vectors {
                let dot: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            normalize(&mut v);
        }
        // residual of the interior problem
        let res = (0..m)
            .map(|j| {
                let left = if j > 0 { v[j - 1] } else { 0.0 };
                let right = if j + 1 < m { v[j + 1] } else { 0.0 };
                (d[j] * v[j] + e * (left + right) - lambda * v[j]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if !(res <= RESIDUAL_TOL * scale) {
            return Err(Error::ConvergenceFailure(format!(
                "eigenpair {idx} (E = {lambda}) has residual {res:e}"
            )));
        }
        // sign: first component above 1e−8 of the peak is positive
        let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * peak) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        vectors.push(v.clone());
        let inv_sqrt_dq = 1.0 / h.grid.dq().sqrt();
        let mut psi = vec![0.0; h.grid.n];
        for (j, x) in v.iter().enumerate() {
            psi[j + 1] = x * inv_sqrt_dq;
        }
        pairs.push(EigenPair {
            grid: h.grid,
            energy: lambda,
            psi,
        });
    }
    Ok(pairs)
}
