//! The distribution `S(E) = (1/2π) ∫ e^{−iEh(t)} dt`, paired with rapidly decaying test
//! functions two independent ways.
//!
//! * direct: integrate over `E` first, `∫ φ(E) e^{−iEh} dE = √(2π)·[Fφ](h(t))`, then over
//!   the truncated window `t ∈ [−T, T]`.
//! * Parseval: substitute `u = h(t)`, so that `⟨S, φ⟩ = (1/√(2π)) ∫ φ(E) {[F⁻¹ ρ*](E)}* dE`
//!   with `ρ(u) = dh⁻¹/du = 1/g(h⁻¹(u))`. For real `ρ` both conjugations are no-ops but
//!   are kept in the code for clarity.
//!
//! `F` is the symmetric transform `[Fφ](u) = (1/√(2π)) ∫ φ(E) e^{−iEu} dE`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier::{nonuniform_eval, nonuniform_sum};
use crate::grid::SpectrumGrid;
use crate::quad::{simpson, trapezoid};
use crate::signal::{hermite_function, SpectrumSamples};
use crate::transforms::INV_SQRT_2PI;
use crate::warp::WarpSpec;

/// Relative size of `|Fφ|` at an edge of the range of `h` above which the pairing is
/// declared divergent.
pub const RANGE_EDGE_TOL: f64 = 1e-10;
/// Successive-doubling tolerance of [`s_pairing_direct_converged`].
pub const DIRECT_CONVERGENCE_TOL: f64 = 1e-5;
/// Flank fraction of the cosine taper on `dh⁻¹/du` in [`s_density`].
pub const DENSITY_FLANK: f64 = 0.05;

const MAX_DIRECT_POINTS: usize = 1 << 23;
// direct step: this fraction of the finest local time scale of [Fφ](h(t))
const DIRECT_STEP_FRACTION: f64 = 0.05;
const PARSEVAL_STEP_FRACTION: f64 = 0.05;

/// Schwartz-class test functions `φ(E)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `exp(−(E − center)²/(2 width²))`
    Gaussian { center: f64, width: f64 },
    /// `ψ_n(E/scale)`, the normalized Hermite function stretched by `scale`.
    Hermite { order: usize, scale: f64 },
    /// `exp(−1/(1 − x²))` with `x = (E − center)/radius`, zero for `|x| ≥ 1`.
    Bump { center: f64, radius: f64 },
    /// `Σ c_k φ_k`.
    Combination(Vec<(f64, TestFunction)>),
}

impl TestFunction {
    pub fn unit_gaussian() -> Self {
        TestFunction::Gaussian { center: 0.0, width: 1.0 }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TestFunction::Gaussian { .. } => "gaussian",
            TestFunction::Hermite { .. } => "hermite",
            TestFunction::Bump { .. } => "bump",
            TestFunction::Combination(_) => "combination",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            TestFunction::Gaussian { center, width } => vec![*center, *width],
            TestFunction::Hermite { order, scale } => vec![*order as f64, *scale],
            TestFunction::Bump { center, radius } => vec![*center, *radius],
            TestFunction::Combination(parts) => parts.iter().map(|(c, _)| *c).collect(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Gaussian { center, width } => format!("gaussian(c={center},w={width})"),
            TestFunction::Hermite { order, scale } => format!("hermite{order}(s={scale})"),
            TestFunction::Bump { center, radius } => format!("bump(c={center},r={radius})"),
            TestFunction::Combination(parts) => {
                let terms: Vec<String> = parts.iter().map(|(c, f)| format!("{c}*{}", f.label())).collect();
                terms.join("+")
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            TestFunction::Gaussian { center, width } => center.is_finite() && width.is_finite() && *width > 0.0,
            TestFunction::Hermite { scale, .. } => scale.is_finite() && *scale > 0.0,
            TestFunction::Bump { center, radius } => center.is_finite() && radius.is_finite() && *radius > 0.0,
            TestFunction::Combination(parts) => {
                !parts.is_empty()
                    && parts.iter().all(|(c, f)| c.is_finite() && f.validate().is_ok())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad test function {}", self.label())))
        }
    }

    pub fn eval(&self, e: f64) -> f64 {
        match self {
            TestFunction::Gaussian { center, width } => {
                let x = (e - center) / width;
                (-0.5 * x * x).exp()
            }
            TestFunction::Hermite { order, scale } => hermite_function(*order, e / scale),
            TestFunction::Bump { center, radius } => {
                let x = (e - center) / radius;
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Combination(parts) => parts.iter().map(|(c, f)| c * f.eval(e)).sum(),
        }
    }

    pub fn analytic_fourier_available(&self) -> bool {
        match self {
            TestFunction::Gaussian { .. } | TestFunction::Hermite { .. } => true,
            TestFunction::Bump { .. } => false,
            TestFunction::Combination(parts) => parts.iter().all(|(_, f)| f.analytic_fourier_available()),
        }
    }

    /// Closed-form `[Fφ](u)` where one exists.
    pub fn fourier(&self, u: f64) -> Option<Complex64> {
        match self {
            TestFunction::Gaussian { center, width } => {
                let x = width * u;
                Some(Complex64::from_polar(width * (-0.5 * x * x).exp(), -center * u))
            }
            TestFunction::Hermite { order, scale } => {
                let mag = scale * hermite_function(*order, scale * u);
                // (−i)^n
                let rot = match order % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                };
                Some(rot * mag)
            }
            TestFunction::Bump { .. } => None,
            TestFunction::Combination(parts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, f) in parts {
                    acc += f.fourier(u)? * c;
                }
                Some(acc)
            }
        }
    }

    /// Interval outside which `φ` is below double-precision resolution.
    pub fn energy_support(&self) -> (f64, f64) {
        match self {
            TestFunction::Gaussian { center, width } => {
                let r = width * 80f64.sqrt();
                (center - r, center + r)
            }
            TestFunction::Hermite { order, scale } => {
                let r = scale * (9.0 + *order as f64);
                (-r, r)
            }
            TestFunction::Bump { center, radius } => (center - radius, center + radius),
            TestFunction::Combination(parts) => parts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (_, f)| {
                let (a, b) = f.energy_support();
                (acc.0.min(a), acc.1.max(b))
            }),
        }
    }

    /// `U` such that `[Fφ](u)` is negligible for `|u| > U`.
    pub fn fourier_extent(&self) -> f64 {
        match self {
            TestFunction::Gaussian { width, .. } => 80f64.sqrt() / width,
            TestFunction::Hermite { order, scale } => (9.0 + *order as f64) / scale,
            // the bump transform decays like exp(−√(2 r u)); 1e−12 is reached near r·u ≈ 400
            TestFunction::Bump { radius, .. } => 400.0 / radius,
            TestFunction::Combination(parts) => parts.iter().map(|(_, f)| f.fourier_extent()).fold(0.0, f64::max),
        }
    }

    /// Largest `|E|` on the support, which bounds the oscillation rate of `[Fφ](u)`.
    fn energy_reach(&self) -> f64 {
        let (a, b) = self.energy_support();
        a.abs().max(b.abs())
    }

    /// `[Fφ](u)`, analytically when possible, otherwise by trapezoid quadrature over the
    /// support of `φ` resolved for `|u| ≤` [`Self::fourier_extent`].
    pub fn fourier_at(&self, points: &[f64]) -> Vec<Complex64> {
        if self.analytic_fourier_available() {
            return points.iter().map(|&u| self.fourier(u).unwrap()).collect();
        }
        let (egrid, weights) = self.energy_quadrature(self.fourier_extent());
        nonuniform_eval(&weights, &egrid, points, -1.0)
    }

    /// Grid over the support of `φ` fine enough for `e^{−iEu}` up to `|u| = u_max`, and
    /// trapezoid weights `φ(E_m)·dE/√(2π)`.
    fn energy_quadrature(&self, u_max: f64) -> (SpectrumGrid, Vec<Complex64>) {
        let (a, b) = self.energy_support();
        let n = (((b - a) * u_max / PI) * 8.0).ceil() as usize + 33;
        let egrid = SpectrumGrid { e_min: a, e_max: b, n };
        let de = egrid.de();
        let weights = egrid
            .points()
            .iter()
            .enumerate()
            .map(|(m, &e)| {
                let end = if m == 0 || m == n - 1 { 0.5 } else { 1.0 };
                Complex64::new(self.eval(e) * de * end * INV_SQRT_2PI, 0.0)
            })
            .collect();
        (egrid, weights)
    }
}

/// Outcome of [`s_pairing_direct_converged`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectPairing {
    pub value: Complex64Ser,
    pub t_used: f64,
    pub n_used: usize,
    pub last_change: f64,
}

/// Serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Complex64Ser> for Complex64 {
    fn from(z: Complex64Ser) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// `t`-interval of the window `[−T, T]` that lies in the monotone domain of `w`.
fn direct_window(w: &WarpSpec, t: f64) -> Result<(f64, f64)> {
    let (dlo, dhi) = w.domain();
    let a = (-t).max(dlo);
    let b = t.min(dhi);
    if !(a < b) {
        return Err(Error::InvalidInput(format!("window [−{t}, {t}] misses the monotone domain of {}", w.describe())));
    }
    Ok((a, b))
}

/// Largest `g` over the part of `[a, b]` where `|h(t)| ≤ U`, i.e. where `[Fφ](h(t))`
/// is not negligible.
fn max_rate_on_support(w: &WarpSpec, a: f64, b: f64, u_extent: f64) -> f64 {
    let lo = if w.h(a) >= -u_extent { a } else { w.h_inv(-u_extent).max(a) };
    let hi = if w.h(b) <= u_extent { b } else { w.h_inv(u_extent).min(b) };
    let (lo, hi) = if lo < hi { (lo, hi) } else { (a, b) };
    let probes = 4096;
    (0..=probes)
        .map(|k| w.g(lo + (hi - lo) * k as f64 / probes as f64))
        .fold(0.0, f64::max)
}

/// Sample count that [`s_pairing_direct_converged`] uses for a window of half-width `t`.
pub fn direct_points(w: &WarpSpec, phi: &TestFunction, t: f64) -> Result<usize> {
    let (a, b) = direct_window(w, t)?;
    let g_max = max_rate_on_support(w, a, b, phi.fourier_extent());
    let dt = DIRECT_STEP_FRACTION / (g_max * phi.energy_reach());
    let n = ((b - a) / dt).ceil() as usize + 1;
    if n > MAX_DIRECT_POINTS {
        return Err(Error::GridTooCoarse(format!(
            "direct pairing over [−{t}, {t}] would need {n} samples"
        )));
    }
    Ok(n | 1)
}

/// `⟨S, φ⟩ ≈ (1/2π) ∫_{−T}^{T} dt ∫ φ(E) e^{−iEh(t)} dE` with `n` samples in `t`
/// (Simpson). The inner integral is closed-form for Gaussian and Hermite `φ` and a
/// trapezoid sum over the support of `φ` otherwise.
pub fn s_pairing_direct(w: &WarpSpec, phi: &TestFunction, t: f64, n: usize) -> Result<Complex64> {
    phi.validate()?;
    if !(t > 0.0) || n < 3 {
        return Err(Error::InvalidInput(format!("need T > 0 and n ≥ 3, got T = {t}, n = {n}")));
    }
    let (a, b) = direct_window(w, t)?;
    let grid = crate::grid::TimeGrid::new(a, b, n)?;
    crate::warp::require_monotone(w, &grid)?;
    let dt = grid.dt();
    let reach = phi.energy_reach();
    let g_max = max_rate_on_support(w, a, b, phi.fourier_extent());
    if dt * g_max * reach > PI {
        return Err(Error::NyquistViolation(format!(
            "t step {dt} cannot follow the phase rate g·|E| = {} of the integrand",
            g_max * reach
        )));
    }
    let hs: Vec<f64> = grid.points().iter().map(|&s| w.h(s)).collect();
    let inner: Vec<Complex64> = if phi.analytic_fourier_available() {
        hs.iter().map(|&u| phi.fourier(u).unwrap()).collect()
    } else {
        let h_max = hs.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        let (egrid, weights) = phi.energy_quadrature(phi.fourier_extent().min(h_max));
        if egrid.de() * h_max > PI {
            return Err(Error::NyquistViolation(format!(
                "energy step {} aliases phases up to |h| = {h_max}",
                egrid.de()
            )));
        }
        nonuniform_eval(&weights, &egrid, &hs, -1.0)
    };
    Ok(simpson(&inner, dt) * INV_SQRT_2PI)
}

/// Doubles `T` from `t_start` until successive direct pairings differ by less than `tol`.
pub fn s_pairing_direct_converged(
    w: &WarpSpec,
    phi: &TestFunction,
    t_start: f64,
    tol: f64,
    t_limit: f64,
) -> Result<DirectPairing> {
    let mut t = t_start;
    let mut n = direct_points(w, phi, t)?;
    let mut prev = s_pairing_direct(w, phi, t, n)?;
    loop {
        let t_next = 2.0 * t;
        if t_next > t_limit {
            return Err(Error::ConvergenceFailure(format!(
                "direct pairing still moving by more than {tol} at T = {t}"
            )));
        }
        let n_next = direct_points(w, phi, t_next)?;
        let next = s_pairing_direct(w, phi, t_next, n_next)?;
        let change = (next - prev).norm();
        t = t_next;
        n = n_next;
        prev = next;
        if change < tol {
            return Ok(DirectPairing {
                value: next.into(),
                t_used: t,
                n_used: n,
                last_change: change,
            });
        }
    }
}

/// Direct pairings for `T = t0, 2t0, …, 2^k t0`.
pub fn direct_truncation_sequence(w: &WarpSpec, phi: &TestFunction, t0: f64, doublings: usize) -> Result<Vec<(f64, Complex64)>> {
    (0..=doublings)
        .map(|k| {
            let t = t0 * 2f64.powi(k as i32);
            let n = direct_points(w, phi, t)?;
            Ok((t, s_pairing_direct(w, phi, t, n)?))
        })
        .collect()
}

/// Part of the range of `h` where `[Fφ](u)` matters, after checking that `Fφ` has died
/// out at every finite edge of the range (otherwise the pairing diverges).
fn parseval_window(w: &WarpSpec, phi: &TestFunction) -> Result<(f64, f64)> {
    let (rlo, rhi) = w.range();
    let ext = phi.fourier_extent();
    let ua = rlo.max(-ext);
    let ub = rhi.min(ext);
    if !(ua < ub) {
        return Err(Error::RangeTooNarrow(format!(
            "range ({rlo}, {rhi}) of h misses the band |u| ≤ {ext} of the test function"
        )));
    }
    let peak = phi
        .fourier_at(&(0..=512).map(|k| -ext + 2.0 * ext * k as f64 / 512.0).collect::<Vec<_>>())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    for edge in [rlo, rhi] {
        if edge.is_finite() && edge.abs() < ext {
            let at = phi.fourier_at(&[edge])[0].norm();
            if at > RANGE_EDGE_TOL * peak {
                return Err(Error::RangeTooNarrow(format!(
                    "|Fφ| = {at:e} at the range edge u = {edge} of h; the pairing diverges"
                )));
            }
        }
    }
    Ok((ua, ub))
}

/// `⟨S, φ⟩ = (1/√(2π)) ∫ φ(E) {[F⁻¹ (dh⁻¹/du)*](E)}* dE`.
///
/// `dh⁻¹/du` is sampled at cell midpoints of the relevant part of the range of `h`
/// (midpoints avoid the edge of a half-bounded range, where it may be singular).
pub fn s_pairing_parseval(w: &WarpSpec, phi: &TestFunction) -> Result<Complex64> {
    phi.validate()?;
    let (ua, ub) = parseval_window(w, phi)?;
    let du_target = PARSEVAL_STEP_FRACTION / phi.energy_reach();
    let n_u = ((ub - ua) / du_target).ceil() as usize;
    let du = (ub - ua) / n_u as f64;
    let nodes: Vec<f64> = (0..n_u).map(|k| ua + (k as f64 + 0.5) * du).collect();
    // ρ*; real for real warps
    let rho_conj: Vec<Complex64> = nodes.iter().map(|&u| Complex64::new(w.dhinv_du(u), 0.0).conj() * du).collect();
    if let Some(k) = rho_conj.iter().position(|z| !z.re.is_finite()) {
        return Err(Error::RangeTooNarrow(format!("dh⁻¹/du undefined at u = {}", nodes[k])));
    }

    let (ea, eb) = phi.energy_support();
    let u_reach = ua.abs().max(ub.abs());
    let de_target = PI / (2.0 * (u_reach + phi.fourier_extent()));
    let n_e = ((eb - ea) / de_target).ceil() as usize + 1;
    let egrid = SpectrumGrid { e_min: ea, e_max: eb, n: n_e };
    // F⁻¹ρ*(E) = (1/√(2π)) Σ ρ*(u_k) e^{iEu_k} du
    let inv: Vec<Complex64> = nonuniform_sum(&rho_conj, &nodes, None, &egrid, 1.0)
        .into_iter()
        .map(|z| z * INV_SQRT_2PI)
        .collect();
    let integrand: Vec<Complex64> = egrid
        .points()
        .iter()
        .zip(&inv)
        .map(|(&e, r)| r.conj() * phi.eval(e))
        .collect();
    Ok(trapezoid(&integrand, egrid.de()) * INV_SQRT_2PI)
}

/// Regularized `S(E) = (1/√(2π)) {[F⁻¹ (ρ_w)*](E)}*` on `egrid`, with `ρ_w` the
/// cosine-tapered `dh⁻¹/du` on the default window `range(h) ∩ [−π/(2dE), π/(2dE)]`.
pub fn s_density(w: &WarpSpec, egrid: &SpectrumGrid) -> Result<SpectrumSamples> {
    if egrid.n < 2 {
        return Err(Error::InvalidGrid("density needs at least two energies".into()));
    }
    let half = PI / (2.0 * egrid.de());
    let (rlo, rhi) = w.range();
    s_density_windowed(w, egrid, (rlo.max(-half), rhi.min(half)), DENSITY_FLANK)
}

/// [`s_density`] with an explicit `u` window and taper flank fraction.
pub fn s_density_windowed(w: &WarpSpec, egrid: &SpectrumGrid, window: (f64, f64), flank: f64) -> Result<SpectrumSamples> {
    let (rlo, rhi) = w.range();
    let (ua, ub) = window;
    if !(ua < ub) || ua < rlo || ub > rhi {
        return Err(Error::RangeTooNarrow(format!(
            "u window [{ua}, {ub}] is not inside the range ({rlo}, {rhi}) of h"
        )));
    }
    let e_reach = egrid.max_abs().max(egrid.de());
    let n_u = (((ub - ua) * 4.0 * e_reach / PI).ceil() as usize).max(16);
    let du = (ub - ua) / n_u as f64;
    let ramp = flank * (ub - ua);
    let taper = |u: f64| -> f64 {
        let x = (u - ua).min(ub - u);
        if ramp <= 0.0 || x >= ramp {
            1.0
        } else {
            0.5 * (1.0 - (PI * x / ramp).cos())
        }
    };
    let nodes: Vec<f64> = (0..n_u).map(|k| ua + (k as f64 + 0.5) * du).collect();
    let rho_conj: Vec<Complex64> = nodes
        .iter()
        .map(|&u| Complex64::new(w.dhinv_du(u) * taper(u), 0.0).conj() * du)
        .collect();
    let values = nonuniform_sum(&rho_conj, &nodes, None, egrid, 1.0)
        .into_iter()
        .map(|z| (z * INV_SQRT_2PI).conj() * INV_SQRT_2PI)
        .collect();
    Ok(SpectrumSamples { grid: *egrid, values })
}

/// `∫ S(E) φ(E) dE` for sampled `S`, trapezoid rule.
pub fn pair_density(s: &SpectrumSamples, phi: &TestFunction) -> Complex64 {
    let integrand: Vec<Complex64> = s.grid.points().iter().zip(&s.values).map(|(&e, v)| v * phi.eval(e)).collect();
    trapezoid(&integrand, s.grid.de())
}
