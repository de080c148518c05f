//! Phase-modulated and time-warped Fourier transforms.
//!
//! Conventions: basis functions carry `e^{−i(…)}`, inverses carry `e^{+i(…)}`, and
//! both directions use the symmetric `1/√(2π)` prefactor.
//!
//! * additive:        `⟨t|E,h⟩ = e^{−i(Et + h(t))}/√(2π)`, transform `F_h f = F{f e^{−ih}}`
//! * multiplicative:  `⟨t|E,h⟩ = e^{−iEh(t)}/√(2π)`, partner `⟨t|E,h,⊥⟩ = h′(t) e^{−iEh(t)}/√(2π)`
//!
//! Integrals over `t` and `E` are rectangle sums on the sample grids. On the default
//! (DFT-conjugate) grids this makes the additive round trip exact to rounding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::diff::{derivative4, interior};
use crate::error::{Error, Result};
use crate::fourier::{nonuniform_eval, nonuniform_sum, uniform_sum};
use crate::grid::{SpectrumGrid, TimeGrid};
use crate::interp::ComplexSpline;
use crate::quad::simpson;
use crate::signal::{max_abs_diff, SampledSignal, SpectrumSamples};
use crate::warp::{require_monotone, WarpSpec};

pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Upper bound on the oversampled resampling grid of the `resample-fft` path.
pub const MAX_RESAMPLE_POINTS: usize = 1 << 22;
/// Samples below this fraction of `max|f|` do not constrain the resampling step.
const SUPPORT_FRACTION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisFlavor {
    Additive,
    Multiplicative,
    MultiplicativePerp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarpedMethod {
    DirectQuadrature,
    ResampleFft,
}

/// Energy-type operators: `i∂ₜ − g(t)` (additive) and `(1/h′)·i∂ₜ` (multiplicative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyOp {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone)]
pub struct BasisFunction {
    pub warp: WarpSpec,
    pub energy: f64,
    pub flavor: BasisFlavor,
}

impl BasisFunction {
    pub fn new(warp: WarpSpec, energy: f64, flavor: BasisFlavor) -> Self {
        Self { warp, energy, flavor }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let e = self.energy;
        match self.flavor {
            BasisFlavor::Additive => Complex64::from_polar(INV_SQRT_2PI, -(e * t + self.warp.h(t))),
            BasisFlavor::Multiplicative => Complex64::from_polar(INV_SQRT_2PI, -e * self.warp.h(t)),
            BasisFlavor::MultiplicativePerp => {
                Complex64::from_polar(INV_SQRT_2PI * self.warp.g(t), -e * self.warp.h(t))
            }
        }
    }

    pub fn sample(&self, grid: TimeGrid) -> SampledSignal {
        SampledSignal::from_fn(grid, |t| self.eval(t))
    }
}

fn time_axis(grid: &TimeGrid) -> SpectrumGrid {
    SpectrumGrid {
        e_min: grid.t_min,
        e_max: grid.t_max,
        n: grid.n,
    }
}

/// DFT-conjugate energy grid for the additive transform of signals on `grid`.
pub fn default_modulated_grid(grid: &TimeGrid) -> SpectrumGrid {
    SpectrumGrid::conjugate_to(grid.dt(), grid.n)
}

fn nyquist_check(egrid: &SpectrumGrid, dt: f64, what: &str) -> Result<()> {
    let limit = PI / dt;
    if egrid.max_abs() > limit * (1.0 + 1e-9) {
        return Err(Error::GridMismatch(format!(
            "energy grid reaches |E| = {} beyond the {what} Nyquist limit π/dt = {limit}",
            egrid.max_abs()
        )));
    }
    Ok(())
}

/// `[F_h f](E) = (1/√(2π)) ∫ f(t) e^{−ih(t)} e^{−iEt} dt`, evaluated as a uniform
/// Fourier transform of the premultiplied signal `f e^{−ih}`.
pub fn modulated_forward(f: &SampledSignal, w: &WarpSpec, egrid: &SpectrumGrid) -> Result<SpectrumSamples> {
    let grid = f.grid;
    let dt = grid.dt();
    nyquist_check(egrid, dt, "time-grid")?;
    let pre: Vec<Complex64> = f
        .values
        .iter()
        .zip(grid.points())
        .map(|(v, t)| v * Complex64::from_polar(1.0, -w.h(t)))
        .collect();
    let values = uniform_sum(&pre, grid.t_min, dt, egrid, -1.0)
        .into_iter()
        .map(|v| v * (dt * INV_SQRT_2PI))
        .collect();
    Ok(SpectrumSamples { grid: *egrid, values })
}

/// The defining sum of the additive transform with the combined phase `Et + h(t)`
/// taken per term; the reference path for [`modulated_reduction_check`].
pub fn modulated_forward_direct(f: &SampledSignal, w: &WarpSpec, egrid: &SpectrumGrid) -> Result<SpectrumSamples> {
    let t = f.grid.points();
    let phase: Vec<f64> = t.iter().map(|&ti| w.h(ti)).collect();
    let scale = f.grid.dt() * INV_SQRT_2PI;
    let values = nonuniform_sum(&f.values, &t, Some(&phase), egrid, -1.0)
        .into_iter()
        .map(|v| v * scale)
        .collect();
    Ok(SpectrumSamples { grid: *egrid, values })
}

/// `[F_h⁻¹ F](t) = (1/√(2π)) ∫ F(E) e^{ih(t)} e^{iEt} dE` on `tgrid`.
pub fn modulated_inverse(spec: &SpectrumSamples, w: &WarpSpec, tgrid: &TimeGrid) -> Result<SampledSignal> {
    let egrid = spec.grid;
    let de = egrid.de();
    if egrid.n > 1 && tgrid.span() > 2.0 * PI / de * (1.0 + 1e-9) {
        return Err(Error::GridMismatch(format!(
            "time window {} exceeds the period 2π/dE = {} of the energy sampling",
            tgrid.span(),
            2.0 * PI / de
        )));
    }
    let weight = if egrid.n > 1 { de } else { 1.0 };
    let sums = uniform_sum(&spec.values, egrid.e_min, de, &time_axis(tgrid), 1.0);
    let values = sums
        .into_iter()
        .zip(tgrid.points())
        .map(|(s, t)| s * Complex64::from_polar(weight * INV_SQRT_2PI, w.h(t)))
        .collect();
    Ok(SampledSignal { grid: *tgrid, values })
}

/// Max-norm gap between [`modulated_forward`] and the defining sum, on the default grid.
pub fn modulated_reduction_check(f: &SampledSignal, w: &WarpSpec) -> Result<f64> {
    let egrid = default_modulated_grid(&f.grid);
    let fast = modulated_forward(f, w, &egrid)?;
    let direct = modulated_forward_direct(f, w, &egrid)?;
    Ok(fast.max_abs_diff(&direct))
}

/// DFT-conjugate energy grid for the warped transform: conjugate to the uniform
/// `u = h(t)` grid with as many points as `grid`.
pub fn default_warped_grid(w: &WarpSpec, grid: &TimeGrid) -> Result<SpectrumGrid> {
    require_monotone(w, grid)?;
    let du = (w.h(grid.t_max) - w.h(grid.t_min)) / (grid.n - 1) as f64;
    Ok(SpectrumGrid::conjugate_to(du, grid.n))
}

/// `[F_h f](E) = (1/√(2π)) ∫ f(t) e^{−iEh(t)} dt`.
pub fn warped_forward(
    f: &SampledSignal,
    w: &WarpSpec,
    egrid: &SpectrumGrid,
    method: WarpedMethod,
) -> Result<SpectrumSamples> {
    require_monotone(w, &f.grid)?;
    match method {
        WarpedMethod::DirectQuadrature => warped_forward_direct(f, w, egrid),
        WarpedMethod::ResampleFft => {
            let ugrid = resample_grid(f, w);
            warped_forward_resampled(f, w, egrid, &ugrid)
        }
    }
}

/// Largest phase advance `|E|·g·dt` per sample allowed in the direct sum: the
/// Nyquist limit, with slack for conjugate grids that sit exactly on it.
const MAX_PHASE_STEP: f64 = PI * (1.0 + 1e-9);
/// Upper bound on the refined sample count of the direct sum.
pub const MAX_DIRECT_POINTS: usize = 1 << 22;

/// Subdivision factor that keeps the phase advance `|E|·g(t)·dt/r` of the direct sum
/// below `π` wherever the signal is non-negligible. Exactly 1 when the original
/// sampling already resolves the phase.
pub fn direct_refinement(f: &SampledSignal, w: &WarpSpec, egrid: &SpectrumGrid) -> usize {
    let dt = f.grid.dt();
    let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 1;
    }
    let g_max = f
        .grid
        .points()
        .iter()
        .zip(&f.values)
        .filter(|(_, v)| v.norm() >= SUPPORT_FRACTION * peak)
        .map(|(&t, _)| w.g(t))
        .fold(0.0, f64::max);
    let step = g_max * dt * egrid.max_abs();
    let r = (step / MAX_PHASE_STEP).ceil().max(1.0) as usize;
    r.min((MAX_DIRECT_POINTS - 1) / (f.grid.n - 1)).max(1)
}

/// The defining sum `(dt/√(2π)) Σ f(t_j) e^{−iE h(t_j)}`, on the sample grid refined
/// by [`direct_refinement`] with spline-interpolated values between the samples.
fn warped_forward_direct(f: &SampledSignal, w: &WarpSpec, egrid: &SpectrumGrid) -> Result<SpectrumSamples> {
    let grid = f.grid;
    let r = direct_refinement(f, w, egrid);
    let (nodes, values, dt) = if r == 1 {
        let hs: Vec<f64> = grid.points().iter().map(|&t| w.h(t)).collect();
        (hs, f.values.clone(), grid.dt())
    } else {
        let spline = ComplexSpline::new(grid.t_min, grid.dt(), &f.values);
        let fine = TimeGrid {
            t_min: grid.t_min,
            t_max: grid.t_max,
            n: (grid.n - 1) * r + 1,
        };
        let ts = fine.points();
        let vals = ts
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % r == 0 { f.values[i / r] } else { spline.eval(t) })
            .collect();
        (ts.iter().map(|&t| w.h(t)).collect(), vals, fine.dt())
    };
    let scale = dt * INV_SQRT_2PI;
    let values = nonuniform_sum(&values, &nodes, None, egrid, -1.0)
        .into_iter()
        .map(|v| v * scale)
        .collect();
    Ok(SpectrumSamples { grid: *egrid, values })
}

/// Uniform `u` grid over `[h(t_min), h(t_max)]` for the resample path. Its spacing is
/// no coarser than the image `h′(t)·dt` of the time step anywhere the signal is
/// non-negligible, so compressed stretches of the warp stay resolved.
pub fn resample_grid(f: &SampledSignal, w: &WarpSpec) -> TimeGrid {
    let grid = f.grid;
    let u_lo = w.h(grid.t_min);
    let u_hi = w.h(grid.t_max);
    let n = grid.n;
    let base = (u_hi - u_lo) / (n - 1) as f64;
    let peak = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min_image = grid
        .points()
        .iter()
        .zip(&f.values)
        .filter(|(_, v)| v.norm() >= SUPPORT_FRACTION * peak && peak > 0.0)
        .map(|(&t, _)| w.g(t) * grid.dt())
        .fold(f64::INFINITY, f64::min);
    let du = base.min(min_image);
    let intervals = ((u_hi - u_lo) / du - 1e-9).ceil().max((n - 1) as f64);
    let n_u = ((intervals as usize) + 1).min(MAX_RESAMPLE_POINTS);
    TimeGrid {
        t_min: u_lo,
        t_max: u_hi,
        n: n_u,
    }
}

/// Resample path on an explicit `u` grid: `G(u) = (dh⁻¹/du)·f(h⁻¹(u))` by cubic-spline
/// interpolation of `f`, then a uniform Fourier transform of `G`.
pub fn warped_forward_resampled(
    f: &SampledSignal,
    w: &WarpSpec,
    egrid: &SpectrumGrid,
    ugrid: &TimeGrid,
) -> Result<SpectrumSamples> {
    require_monotone(w, &f.grid)?;
    let grid = f.grid;
    let (range_lo, range_hi) = (w.h(grid.t_min), w.h(grid.t_max));
    let slack = 1e-12 * (1.0 + range_lo.abs().max(range_hi.abs()));
    if ugrid.t_min < range_lo - slack || ugrid.t_max > range_hi + slack {
        return Err(Error::ResampleOutOfRange {
            lo: ugrid.t_min,
            hi: ugrid.t_max,
            range_lo,
            range_hi,
        });
    }
    let du = ugrid.dt();
    nyquist_check(egrid, du, "resampling-grid")?;
    let spline = ComplexSpline::new(grid.t_min, grid.dt(), &f.values);
    let resampled: Vec<Complex64> = (0..ugrid.n)
        .map(|k| {
            let t = w.h_inv(ugrid.at(k)).clamp(grid.t_min, grid.t_max);
            spline.eval(t) / w.g(t)
        })
        .collect();
    let values = uniform_sum(&resampled, ugrid.t_min, du, egrid, -1.0)
        .into_iter()
        .map(|v| v * (du * INV_SQRT_2PI))
        .collect();
    Ok(SpectrumSamples { grid: *egrid, values })
}

/// `[F_h⁻¹ F](t) = (1/√(2π)) h′(t) ∫ F(E) e^{iEh(t)} dE`, Jacobian included.
pub fn warped_inverse(spec: &SpectrumSamples, w: &WarpSpec, tgrid: &TimeGrid) -> Result<SampledSignal> {
    require_monotone(w, tgrid)?;
    let egrid = spec.grid;
    let weight = if egrid.n > 1 { egrid.de() } else { 1.0 };
    let t = tgrid.points();
    let hs: Vec<f64> = t.iter().map(|&ti| w.h(ti)).collect();
    let values = nonuniform_eval(&spec.values, &egrid, &hs, 1.0)
        .into_iter()
        .zip(&t)
        .map(|(s, &ti)| s * (weight * INV_SQRT_2PI * w.g(ti)))
        .collect();
    Ok(SampledSignal { grid: *tgrid, values })
}

/// Max-norm gap between the direct-quadrature and resample-fft paths of
/// [`warped_forward`] on the default warped grid.
pub fn warped_reduction_check(f: &SampledSignal, w: &WarpSpec) -> Result<f64> {
    let egrid = default_warped_grid(w, &f.grid)?;
    let direct = warped_forward(f, w, &egrid, WarpedMethod::DirectQuadrature)?;
    let resampled = warped_forward(f, w, &egrid, WarpedMethod::ResampleFft)?;
    Ok(direct.max_abs_diff(&resampled))
}

/// `⟨E_probe,h,⊥|E,h⟩` truncated to `tgrid`:
/// `(1/2π) ∫ h′(t) e^{−ih(t)(E−E_probe)} dt`, integrated exactly after `y = h(t)`.
/// A Dirichlet kernel of width `h(t_max) − h(t_min)` standing in for `δ(E − E_probe)`.
pub fn biorth_pairing(e_probe: f64, e: f64, w: &WarpSpec, tgrid: &TimeGrid) -> Result<Complex64> {
    require_monotone(w, tgrid)?;
    let ya = w.h(tgrid.t_min);
    let yb = w.h(tgrid.t_max);
    Ok(dirichlet(e - e_probe, ya, yb))
}

/// `(1/2π) ∫_{ya}^{yb} e^{−iΔy} dy` in a cancellation-free form.
pub(crate) fn dirichlet(delta: f64, ya: f64, yb: f64) -> Complex64 {
    let width = yb - ya;
    if delta == 0.0 {
        return Complex64::new(width / (2.0 * PI), 0.0);
    }
    let centre = 0.5 * (ya + yb);
    Complex64::from_polar((0.5 * delta * width).sin() / (PI * delta), -delta * centre)
}

/// The same pairing by Simpson quadrature in `t`, without the substitution.
pub fn biorth_pairing_quadrature(e_probe: f64, e: f64, w: &WarpSpec, tgrid: &TimeGrid) -> Result<Complex64> {
    require_monotone(w, tgrid)?;
    let partner = BasisFunction::new(w.clone(), e_probe, BasisFlavor::MultiplicativePerp);
    let basis = BasisFunction::new(w.clone(), e, BasisFlavor::Multiplicative);
    let integrand: Vec<Complex64> = tgrid
        .points()
        .iter()
        .map(|&t| partner.eval(t).conj() * basis.eval(t))
        .collect();
    Ok(simpson(&integrand, tgrid.dt()))
}

/// `∫ ⟨E′,h,⊥|E,h⟩ φ(E′) dE′` by Simpson over `egrid`; tends to `φ(E)` as the
/// `h` window widens.
pub fn smeared_biorth(
    e: f64,
    w: &WarpSpec,
    tgrid: &TimeGrid,
    phi: impl Fn(f64) -> f64,
    egrid: &SpectrumGrid,
) -> Result<Complex64> {
    require_monotone(w, tgrid)?;
    let ya = w.h(tgrid.t_min);
    let yb = w.h(tgrid.t_max);
    let integrand: Vec<Complex64> = egrid
        .points()
        .iter()
        .map(|&ep| dirichlet(e - ep, ya, yb) * phi(ep))
        .collect();
    Ok(simpson(&integrand, egrid.de()))
}

/// Spectrum grid for the resample path: DFT-conjugate to [`resample_grid`].
pub fn resampled_spectrum_grid(f: &SampledSignal, w: &WarpSpec) -> Result<SpectrumGrid> {
    require_monotone(w, &f.grid)?;
    let ugrid = resample_grid(f, w);
    Ok(SpectrumGrid::conjugate_to(ugrid.dt(), ugrid.n))
}

/// Inverse warped transform through the `u = h(t)` variable: one uniform inverse
/// Fourier sum onto the `u` grid conjugate to `spec.grid` (starting at `h(t_min)`),
/// then cubic-spline interpolation at `h(t_k)` and the Jacobian `h′(t_k)`.
pub fn warped_inverse_resampled(spec: &SpectrumSamples, w: &WarpSpec, tgrid: &TimeGrid) -> Result<SampledSignal> {
    require_monotone(w, tgrid)?;
    let egrid = spec.grid;
    if egrid.n < 4 {
        return Err(Error::GridTooCoarse("resampled inverse needs at least 4 energies".into()));
    }
    let de = egrid.de();
    let du = 2.0 * PI / (egrid.n as f64 * de);
    let u_lo = w.h(tgrid.t_min);
    let u_hi = w.h(tgrid.t_max);
    let u_top = u_lo + (egrid.n - 1) as f64 * du;
    if u_hi > u_top * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::GridMismatch(format!(
            "range [{u_lo}, {u_hi}] of h exceeds the span {} resolved by the energy spacing",
            u_top - u_lo
        )));
    }
    let ugrid = SpectrumGrid {
        e_min: u_lo,
        e_max: u_top,
        n: egrid.n,
    };
    let g_u: Vec<Complex64> = uniform_sum(&spec.values, egrid.e_min, de, &ugrid, 1.0)
        .into_iter()
        .map(|v| v * (de * INV_SQRT_2PI))
        .collect();
    let spline = ComplexSpline::new(u_lo, du, &g_u);
    let values = tgrid
        .points()
        .iter()
        .map(|&t| spline.eval(w.h(t).min(u_top)) * w.g(t))
        .collect();
    Ok(SampledSignal { grid: *tgrid, values })
}

/// Relative L2 error of forward-then-inverse: `∫|E,h⟩⟨E,h|dE` (additive) or
/// `∫|E,h⟩⟨E,h,⊥|dE` (multiplicative) applied to `f`. The multiplicative flavor runs
/// through the resample path, see [`resolution_roundtrip_with`].
pub fn resolution_roundtrip(f: &SampledSignal, w: &WarpSpec, flavor: Flavor) -> Result<f64> {
    resolution_roundtrip_with(f, w, flavor, WarpedMethod::ResampleFft)
}

/// [`resolution_roundtrip`] with an explicit path for the multiplicative flavor:
/// direct sums on [`default_warped_grid`], or the resample pair on
/// [`resampled_spectrum_grid`]. The additive flavor ignores `method`.
pub fn resolution_roundtrip_with(f: &SampledSignal, w: &WarpSpec, flavor: Flavor, method: WarpedMethod) -> Result<f64> {
    let back = match (flavor, method) {
        (Flavor::Additive, _) => {
            let egrid = default_modulated_grid(&f.grid);
            let spec = modulated_forward(f, w, &egrid)?;
            modulated_inverse(&spec, w, &f.grid)?
        }
        (Flavor::Multiplicative, WarpedMethod::DirectQuadrature) => {
            let egrid = default_warped_grid(w, &f.grid)?;
            let spec = warped_forward(f, w, &egrid, WarpedMethod::DirectQuadrature)?;
            warped_inverse(&spec, w, &f.grid)?
        }
        (Flavor::Multiplicative, WarpedMethod::ResampleFft) => {
            let egrid = resampled_spectrum_grid(f, w)?;
            let spec = warped_forward(f, w, &egrid, WarpedMethod::ResampleFft)?;
            warped_inverse_resampled(&spec, w, &f.grid)?
        }
    };
    Ok(back.relative_l2_error(f))
}

fn time_derivative(f: &SampledSignal) -> Result<Vec<Complex64>> {
    if f.grid.n < 5 {
        return Err(Error::GridTooCoarse(format!(
            "fourth-order differencing needs at least 5 samples, got {}",
            f.grid.n
        )));
    }
    Ok(derivative4(&f.values, f.grid.dt()))
}

/// `(i∂ₜ − g(t)) f`. Self-adjoint; its generalized eigenfunctions are the additive basis.
pub fn apply_additive_energy_op(f: &SampledSignal, w: &WarpSpec) -> Result<SampledSignal> {
    let d = time_derivative(f)?;
    let values = d
        .iter()
        .zip(&f.values)
        .zip(f.grid.points())
        .map(|((dv, v), t)| Complex64::i() * dv - v * w.g(t))
        .collect();
    Ok(SampledSignal { grid: f.grid, values })
}

/// `(1/h′(t))·i∂ₜ f`. Not self-adjoint unless `h′` is constant.
pub fn apply_multiplicative_energy_op(f: &SampledSignal, w: &WarpSpec) -> Result<SampledSignal> {
    require_monotone(w, &f.grid)?;
    let d = time_derivative(f)?;
    let values = d
        .iter()
        .zip(f.grid.points())
        .map(|(dv, t)| Complex64::i() * dv / w.g(t))
        .collect();
    Ok(SampledSignal { grid: f.grid, values })
}

pub fn apply_energy_op(op: EnergyOp, f: &SampledSignal, w: &WarpSpec) -> Result<SampledSignal> {
    match op {
        EnergyOp::Additive => apply_additive_energy_op(f, w),
        EnergyOp::Multiplicative => apply_multiplicative_energy_op(f, w),
    }
}

/// `Σ a_j b_j* dt` over the points where the central stencil applies.
pub fn interior_inner(a: &SampledSignal, b: &SampledSignal) -> Complex64 {
    let dt = a.grid.dt();
    interior(a.grid.n)
        .map(|j| a.values[j] * b.values[j].conj())
        .sum::<Complex64>()
        * dt
}

/// `⟨Af, k⟩ − ⟨f, Ak⟩` with `⟨a, b⟩ = ∫ a b* dt`.
pub fn adjoint_commutator(op: EnergyOp, w: &WarpSpec, f: &SampledSignal, k: &SampledSignal) -> Result<Complex64> {
    if f.grid != k.grid {
        return Err(Error::GridMismatch("adjoint check needs both signals on one grid".into()));
    }
    let af = apply_energy_op(op, f, w)?;
    let ak = apply_energy_op(op, k, w)?;
    Ok(interior_inner(&af, k) - interior_inner(f, &ak))
}

/// `|⟨Af, k⟩ − ⟨f, Ak⟩|`.
pub fn adjoint_defect(op: EnergyOp, w: &WarpSpec, f: &SampledSignal, k: &SampledSignal) -> Result<f64> {
    Ok(adjoint_commutator(op, w, f, k)?.norm())
}

/// Interior max-norm of `A u_E − E u_E` for the basis function matching `op`.
pub fn eigen_residual(op: EnergyOp, w: &WarpSpec, e: f64, tgrid: &TimeGrid) -> Result<f64> {
    let flavor = match op {
        EnergyOp::Additive => BasisFlavor::Additive,
        EnergyOp::Multiplicative => BasisFlavor::Multiplicative,
    };
    let u = BasisFunction::new(w.clone(), e, flavor).sample(*tgrid);
    let au = apply_energy_op(op, &u, w)?;
    Ok(interior(tgrid.n)
        .map(|j| (au.values[j] - u.values[j] * e).norm())
        .fold(0.0, f64::max))
}

pub fn max_norm_gap(a: &SampledSignal, b: &SampledSignal) -> f64 {
    max_abs_diff(&a.values, &b.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{hermite_function, SignalSpec};
    use crate::warp::{make_analytic_warp, make_analytic_warp_unchecked};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn gaussian(grid: TimeGrid) -> SampledSignal {
        SampledSignal::from_real_fn(grid, |t| (-0.5 * t * t).exp())
    }

    fn chirp() -> WarpSpec {
        make_analytic_warp("chirp", &[1.0, 0.02]).unwrap()
    }

    fn sinp() -> WarpSpec {
        make_analytic_warp("sin-perturbed", &[0.3, 1.0]).unwrap()
    }

    #[test]
    fn null_drive_gives_plain_fourier_pair() {
        let grid = TimeGrid::new(-20.0, 20.0, 2048).unwrap();
        let eg = default_modulated_grid(&grid);
        let spec = modulated_forward(&gaussian(grid), &WarpSpec::zero(), &eg).unwrap();
        for (e, v) in eg.points().iter().zip(&spec.values) {
            assert!((v - c((-0.5 * e * e).exp())).norm() < 1e-12, "E={e}");
        }
    }

    #[test]
    fn zero_signal_maps_to_zero() {
        let grid = TimeGrid::new(-5.0, 5.0, 64).unwrap();
        let z = SampledSignal::zeros(grid);
        let eg = default_modulated_grid(&grid);
        assert!(modulated_forward(&z, &chirp(), &eg).unwrap().values.iter().all(|v| v.norm() == 0.0));
        let back = modulated_inverse(&SpectrumSamples { grid: eg, values: vec![c(0.0); eg.n] }, &chirp(), &grid).unwrap();
        assert!(back.values.iter().all(|v| v.norm() == 0.0));
        assert_eq!(modulated_reduction_check(&z, &chirp()).unwrap(), 0.0);
        let wg = default_warped_grid(&sinp(), &grid).unwrap();
        for m in [WarpedMethod::DirectQuadrature, WarpedMethod::ResampleFft] {
            assert!(warped_forward(&z, &sinp(), &wg, m).unwrap().values.iter().all(|v| v.norm() == 0.0));
        }
        let back = warped_inverse(&SpectrumSamples { grid: wg, values: vec![c(0.0); wg.n] }, &sinp(), &grid).unwrap();
        assert!(back.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn modulated_round_trip_gaussian() {
        let grid = TimeGrid::new(-20.0, 20.0, 2048).unwrap();
        let err = resolution_roundtrip(&gaussian(grid), &sinp(), Flavor::Additive).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn single_bin_spike_inverts_to_basis_conjugate() {
        let tgrid = TimeGrid::new(-5.0, 5.0, 101).unwrap();
        let eg = SpectrumGrid::new(-3.0, 3.0, 61).unwrap();
        let mut vals = vec![c(0.0); 61];
        vals[40] = c(1.0);
        let e0 = eg.at(40);
        let w = chirp();
        let back = modulated_inverse(&SpectrumSamples { grid: eg, values: vals }, &w, &tgrid).unwrap();
        for (t, v) in tgrid.points().iter().zip(&back.values) {
            let want = Complex64::from_polar(eg.de() * INV_SQRT_2PI, w.h(*t) + e0 * t);
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn modulated_nyquist_guard() {
        let grid = TimeGrid::new(-1.0, 1.0, 11).unwrap();
        let eg = SpectrumGrid::new(-100.0, 100.0, 11).unwrap();
        assert!(matches!(
            modulated_forward(&gaussian(grid), &chirp(), &eg),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn conjugated_basis_function_pairs_to_point_value() {
        // f = conj(⟨t|E0,h⟩); ∫ F_h f(E) φ(E) dE → φ(E0)
        let grid = TimeGrid::new(-40.0, 40.0, 8192).unwrap();
        let e0 = 1.5;
        let w = chirp();
        let grid = TimeGrid::new(-24.0, 40.0, grid.n).unwrap();
        let f = BasisFunction::new(w.clone(), e0, BasisFlavor::Additive).sample(grid);
        let f = SampledSignal { grid, values: f.values.iter().map(|v| v.conj()).collect() };
        let eg = default_modulated_grid(&grid);
        let spec = modulated_forward(&f, &w, &eg).unwrap();
        let phi = |e: f64| (-0.5 * (e - 1.0) * (e - 1.0)).exp();
        let pairing: Complex64 = eg.points().iter().zip(&spec.values).map(|(&e, v)| v * phi(e)).sum::<Complex64>() * eg.de();
        assert!((pairing - c(phi(e0))).norm() < 1e-6, "{pairing}");
    }

    #[test]
    fn modulated_reduction_chirp_gaussian() {
        let grid = TimeGrid::new(-10.0, 10.0, 4096).unwrap();
        let d = modulated_reduction_check(&gaussian(grid), &chirp()).unwrap();
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn warped_identity_is_plain_fourier() {
        let grid = TimeGrid::new(-10.0, 10.0, 1024).unwrap();
        let id = WarpSpec::identity();
        let eg = default_warped_grid(&id, &grid).unwrap();
        assert_eq!(eg, default_modulated_grid(&grid));
        for m in [WarpedMethod::DirectQuadrature, WarpedMethod::ResampleFft] {
            let spec = warped_forward(&gaussian(grid), &id, &eg, m).unwrap();
            for (e, v) in eg.points().iter().zip(&spec.values) {
                assert!((v - c((-0.5 * e * e).exp())).norm() < 1e-12);
            }
        }
        assert!(warped_reduction_check(&gaussian(grid), &id).unwrap() < 1e-12);
    }

    #[test]
    fn warped_linear_scale_is_fourier_at_scaled_energy() {
        // substitute u = 2t: F_h f(E) = (1/2)·FT[e^{−u²/8}](E) = e^{−2E²}
        let grid = TimeGrid::new(-12.0, 12.0, 2048).unwrap();
        let w = make_analytic_warp("linear-scale", &[2.0]).unwrap();
        let eg = SpectrumGrid::new(-4.0, 4.0, 161).unwrap();
        for m in [WarpedMethod::DirectQuadrature, WarpedMethod::ResampleFft] {
            let spec = warped_forward(&gaussian(grid), &w, &eg, m).unwrap();
            for (e, v) in eg.points().iter().zip(&spec.values) {
                assert!((v - c((-2.0 * e * e).exp())).norm() < 1e-8, "{m:?} E={e}");
            }
        }
    }

    #[test]
    fn warped_round_trip_sin_perturbed() {
        let grid = TimeGrid::new(-20.0, 20.0, 4096).unwrap();
        let err = resolution_roundtrip(&gaussian(grid), &sinp(), Flavor::Multiplicative).unwrap();
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn warped_identity_inverse_is_plain_inverse() {
        let grid = TimeGrid::new(-10.0, 10.0, 512).unwrap();
        let eg = default_modulated_grid(&grid);
        let spec = SpectrumSamples {
            grid: eg,
            values: eg.points().iter().map(|e| c((-0.5 * e * e).exp())).collect(),
        };
        let a = warped_inverse(&spec, &WarpSpec::identity(), &grid).unwrap();
        let b = modulated_inverse(&spec, &WarpSpec::zero(), &grid).unwrap();
        assert!(max_norm_gap(&a, &b) < 1e-12);
    }

    #[test]
    fn warped_reduction_exp_rate() {
        let grid = TimeGrid::new(-10.0, 10.0, 4096).unwrap();
        let w = make_analytic_warp("exp-rate", &[0.5]).unwrap();
        let d = warped_reduction_check(&gaussian(grid), &w).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn warped_reduction_chirp_bump() {
        let w = chirp();
        let grid = TimeGrid::new(-20.0, 20.0, 4096).unwrap();
        let f = SignalSpec::Bump { center: 1.0, radius: 6.0 }.sample(grid);
        let d = warped_reduction_check(&f, &w).unwrap();
        assert!(d < 1e-7, "{d}");
    }

    #[test]
    fn warped_ops_reject_non_monotone_warps() {
        let grid = TimeGrid::new(-4.0, 4.0, 256).unwrap();
        let bad = make_analytic_warp_unchecked("sin-perturbed", &[2.0, 1.0]).unwrap();
        let f = gaussian(grid);
        let eg = default_modulated_grid(&grid);
        assert!(matches!(
            warped_forward(&f, &bad, &eg, WarpedMethod::DirectQuadrature),
            Err(Error::NonMonotoneWarp { .. })
        ));
        assert!(matches!(biorth_pairing(0.0, 1.0, &bad, &grid), Err(Error::NonMonotoneWarp { .. })));
        assert!(matches!(apply_multiplicative_energy_op(&f, &bad), Err(Error::NonMonotoneWarp { .. })));
        // the additive operator accepts any real drive
        assert!(apply_additive_energy_op(&f, &bad).is_ok());
    }

    #[test]
    fn resample_out_of_range() {
        let grid = TimeGrid::new(-4.0, 4.0, 256).unwrap();
        let w = sinp();
        let f = gaussian(grid);
        let eg = SpectrumGrid::new(-1.0, 1.0, 11).unwrap();
        let ugrid = TimeGrid::new(w.h(-4.0) - 1.0, w.h(4.0), 300).unwrap();
        assert!(matches!(
            warped_forward_resampled(&f, &w, &eg, &ugrid),
            Err(Error::ResampleOutOfRange { .. })
        ));
    }

    #[test]
    fn biorth_pairing_diagonal_and_zeros() {
        let grid = TimeGrid::new(-7.0, 9.0, 2001).unwrap();
        for w in [WarpSpec::identity(), chirp(), sinp(), make_analytic_warp("exp-rate", &[0.5]).unwrap()] {
            let width = w.h(9.0) - w.h(-7.0);
            let diag = biorth_pairing(0.4, 0.4, &w, &grid).unwrap();
            assert!((diag - c(width / (2.0 * PI))).norm() < 1e-14);
            for k in [1.0, 2.0, -3.0] {
                let z = biorth_pairing(0.4 + 2.0 * PI * k / width, 0.4, &w, &grid).unwrap();
                assert!(z.norm() < 1e-14, "{} k={k}: {z}", w.describe());
            }
        }
    }

    #[test]
    fn biorth_pairing_matches_t_quadrature() {
        let grid = TimeGrid::new(-6.0, 6.0, 20001).unwrap();
        for w in [chirp(), sinp(), make_analytic_warp("exp-rate", &[0.5]).unwrap()] {
            for (ep, e) in [(0.0, 0.3), (1.0, -0.5), (2.0, 2.0)] {
                let exact = biorth_pairing(ep, e, &w, &grid).unwrap();
                let quad = biorth_pairing_quadrature(ep, e, &w, &grid).unwrap();
                assert!((exact - quad).norm() < 1e-9, "{} {ep} {e}", w.describe());
            }
        }
    }

    #[test]
    fn smeared_delta_recovers_test_function() {
        let w = sinp();
        let tgrid = TimeGrid::new(w.h_inv(-40.0), w.h_inv(40.0), 101).unwrap();
        let phi = |e: f64| (-0.5 * (e / 0.1).powi(2)).exp();
        let eg = SpectrumGrid::new(-1.2, 1.2, 2401).unwrap();
        for e in [0.0, 0.05, -0.12] {
            let s = smeared_biorth(e, &w, &tgrid, phi, &eg).unwrap();
            assert!((s - c(phi(e))).norm() < 1e-3, "{e}: {s}");
        }
    }

    #[test]
    fn hermite_additive_round_trip_chirp() {
        let grid = TimeGrid::new(-20.0, 20.0, 4096).unwrap();
        let f = SampledSignal::from_real_fn(grid, |t| hermite_function(3, t));
        assert!(resolution_roundtrip(&f, &chirp(), Flavor::Additive).unwrap() < 1e-8);
        assert!(resolution_roundtrip(&f, &WarpSpec::identity(), Flavor::Multiplicative).unwrap() < 1e-10);
    }

    #[test]
    fn additive_op_eigenrelation() {
        let grid = TimeGrid::new(-10.0, 10.0, 4096).unwrap();
        for e in [-3.0, 0.0, 2.5] {
            assert!(eigen_residual(EnergyOp::Additive, &chirp(), e, &grid).unwrap() < 1e-6);
        }
        // g ≡ 0: constants are annihilated, plane waves are eigenfunctions
        let k = SampledSignal::from_real_fn(grid, |_| 3.0);
        let out = apply_additive_energy_op(&k, &WarpSpec::zero()).unwrap();
        assert!(out.values.iter().all(|v| v.norm() < 1e-12));
        let e0 = 1.7;
        let pw = SampledSignal::from_fn(grid, |t| Complex64::from_polar(1.0, -e0 * t));
        let out = apply_additive_energy_op(&pw, &WarpSpec::zero()).unwrap();
        for j in interior(grid.n) {
            assert!((out.values[j] - pw.values[j] * e0).norm() < 1e-7);
        }
    }

    #[test]
    fn multiplicative_op_eigenrelation() {
        let grid = TimeGrid::new(-5.0, 5.0, 4096).unwrap();
        let w = make_analytic_warp("exp-rate", &[0.5]).unwrap();
        let r = eigen_residual(EnergyOp::Multiplicative, &w, 2.0, &grid).unwrap();
        assert!(r < 1e-6, "{r}");
        let e0 = -1.3;
        let pw = SampledSignal::from_fn(grid, |t| Complex64::from_polar(1.0, -e0 * t));
        let out = apply_multiplicative_energy_op(&pw, &WarpSpec::identity()).unwrap();
        for j in interior(grid.n) {
            assert!((out.values[j] - pw.values[j] * e0).norm() < 1e-7);
        }
        let k = SampledSignal::from_real_fn(grid, |_| -2.0);
        let out = apply_multiplicative_energy_op(&k, &w).unwrap();
        assert!(out.values.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn multiplicative_op_is_not_self_adjoint() {
        let kappa = 0.5;
        let grid = TimeGrid::new(-8.0, 8.0, 4096).unwrap();
        let w = make_analytic_warp("exp-rate", &[kappa]).unwrap();
        let f = SampledSignal::from_real_fn(grid, |t| (-t * t).exp());
        let k = SampledSignal::from_real_fn(grid, |t| t * (-t * t).exp());
        let comm = adjoint_commutator(EnergyOp::Multiplicative, &w, &f, &k).unwrap();
        // by parts: ⟨Af,k⟩ − ⟨f,Ak⟩ = −i ∫ f k* (1/h′)′ dt = iκ ∫ t e^{−2t² − κt} dt
        //         = iκ · (−κ/4) · √(π/2) · e^{κ²/8}
        let oracle = Complex64::new(0.0, -kappa * kappa / 4.0 * (PI / 2.0).sqrt() * (kappa * kappa / 8.0).exp());
        assert!((comm - oracle).norm() < 1e-6, "{comm} vs {oracle}");
        assert!(comm.norm() > 1e-3);
        let id = adjoint_defect(EnergyOp::Multiplicative, &WarpSpec::identity(), &f, &k).unwrap();
        assert!(id < 1e-8);
    }

    #[test]
    fn plancherel_for_additive_transform() {
        let grid = TimeGrid::new(-10.0, 10.0, 2048).unwrap();
        let f = SignalSpec::Hermite { order: 2 }.sample(grid);
        let spec = modulated_forward(&f, &sinp(), &default_modulated_grid(&grid)).unwrap();
        assert!((spec.l2_norm() - f.l2_norm()).abs() < 1e-8);
    }

    #[test]
    fn exp_rate_warped_transform_is_not_unitary() {
        // ‖F_h f‖² = ∫ |f|²/h′ dt = √π e^{κ²/4} for the unit Gaussian
        let kappa = 0.5;
        let grid = TimeGrid::new(-12.0, 12.0, 4096).unwrap();
        let w = make_analytic_warp("exp-rate", &[kappa]).unwrap();
        let f = gaussian(grid);
        let eg = default_warped_grid(&w, &grid).unwrap();
        let spec = warped_forward(&f, &w, &eg, WarpedMethod::ResampleFft).unwrap();
        let want = (PI.sqrt() * (kappa * kappa / 4.0).exp()).sqrt();
        assert!((spec.l2_norm() - want).abs() < 1e-6, "{} vs {want}", spec.l2_norm());
        assert!((spec.l2_norm() - f.l2_norm()).abs() > 1e-3);
    }
}
