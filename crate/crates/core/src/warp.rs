//! Time warps `h(t) = ∫ g(t) dt`.
//!
//! A [`WarpSpec`] bundles the rate `g`, its antiderivative `h` (pinned by
//! `h(t0) = c0`) and the inverse `h⁻¹`. Warps come either from a closed-form
//! catalog ([`make_analytic_warp`]) or from sampled rates ([`make_numeric_warp`]).
//! The warped transforms require `g > 0` so that `h` is invertible; the additive
//! (phase-modulation) case accepts any real `g`, including the [`Family::Zero`] drive.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::interp::{UniformHermite, UniformSpline};

/// Tolerance the numeric inverse is polished to (absolute, in `t`).
pub const INVERSION_TOL: f64 = 1e-12;
/// Default bound on the Richardson self-estimate of the cumulative quadrature,
/// relative to `1 + max|h|`.
pub const NUMERIC_WARP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    Identity,
    LinearScale { alpha: f64 },
    Chirp { alpha: f64, beta: f64 },
    SinPerturbed { a: f64, omega: f64 },
    ExpRate { kappa: f64 },
    /// `g ≡ 0`; only meaningful as an additive drive.
    Zero,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::LinearScale { .. } => "linear-scale",
            Family::Chirp { .. } => "chirp",
            Family::SinPerturbed { .. } => "sin-perturbed",
            Family::ExpRate { .. } => "exp-rate",
            Family::Zero => "zero",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Family::Identity | Family::Zero => vec![],
            Family::LinearScale { alpha } => vec![alpha],
            Family::Chirp { alpha, beta } => vec![alpha, beta],
            Family::SinPerturbed { a, omega } => vec![a, omega],
            Family::ExpRate { kappa } => vec![kappa],
        }
    }

    fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let want = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(Error::InvalidInput(format!(
                    "warp family `{name}` takes {k} parameter(s), got {}",
                    params.len()
                )));
            }
            if params.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite parameter for `{name}`")));
            }
            Ok(())
        };
        Ok(match name {
            "identity" => {
                want(0)?;
                Family::Identity
            }
            "linear-scale" => {
                want(1)?;
                Family::LinearScale { alpha: params[0] }
            }
            "chirp" => {
                want(2)?;
                Family::Chirp {
                    alpha: params[0],
                    beta: params[1],
                }
            }
            "sin-perturbed" => {
                want(2)?;
                Family::SinPerturbed {
                    a: params[0],
                    omega: params[1],
                }
            }
            "exp-rate" => {
                want(1)?;
                Family::ExpRate { kappa: params[0] }
            }
            "zero" => {
                want(0)?;
                Family::Zero
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    fn monotonicity_violation(&self) -> Option<String> {
        match *self {
            Family::Identity => None,
            Family::LinearScale { alpha } if alpha <= 0.0 => Some("alpha must be > 0".into()),
            Family::Chirp { alpha, .. } if alpha <= 0.0 => {
                Some("alpha must be > 0 so that g(0) > 0".into())
            }
            Family::SinPerturbed { a, omega } if (a * omega).abs() >= 1.0 => {
                Some(format!("|a·ω| = {} must be < 1", (a * omega).abs()))
            }
            Family::Zero => Some("g ≡ 0 is not monotone".into()),
            _ => None,
        }
    }

    fn g(&self, t: f64) -> f64 {
        match *self {
            Family::Identity => 1.0,
            Family::LinearScale { alpha } => alpha,
            Family::Chirp { alpha, beta } => alpha + 2.0 * beta * t,
            Family::SinPerturbed { a, omega } => 1.0 + a * omega * (omega * t).cos(),
            Family::ExpRate { kappa } => (kappa * t).exp(),
            Family::Zero => 0.0,
        }
    }

    /// Antiderivative with `h(0) = 0`.
    fn h(&self, t: f64) -> f64 {
        match *self {
            Family::Identity => t,
            Family::LinearScale { alpha } => alpha * t,
            Family::Chirp { alpha, beta } => t * (alpha + beta * t),
            Family::SinPerturbed { a, omega } => t + a * (omega * t).sin(),
            Family::ExpRate { kappa } => {
                if kappa == 0.0 {
                    t
                } else {
                    (kappa * t).exp_m1() / kappa
                }
            }
            Family::Zero => 0.0,
        }
    }

    /// Monotone domain of `h` (where `g > 0`).
    fn domain(&self) -> (f64, f64) {
        match *self {
            Family::Chirp { alpha, beta } if beta > 0.0 => (-alpha / (2.0 * beta), f64::INFINITY),
            Family::Chirp { alpha, beta } if beta < 0.0 => (f64::NEG_INFINITY, -alpha / (2.0 * beta)),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            Family::Chirp { alpha, beta } if beta > 0.0 => (-alpha * alpha / (4.0 * beta), f64::INFINITY),
            Family::Chirp { alpha, beta } if beta < 0.0 => (f64::NEG_INFINITY, -alpha * alpha / (4.0 * beta)),
            Family::ExpRate { kappa } if kappa > 0.0 => (-1.0 / kappa, f64::INFINITY),
            Family::ExpRate { kappa } if kappa < 0.0 => (f64::NEG_INFINITY, -1.0 / kappa),
            Family::Zero => (0.0, 0.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Closed-form inverse of the natural `h`, where one exists.
    fn h_inv(&self, u: f64) -> Option<f64> {
        match *self {
            Family::Identity => Some(u),
            Family::LinearScale { alpha } => Some(u / alpha),
            Family::Chirp { alpha, beta } => {
                if beta == 0.0 {
                    return Some(u / alpha);
                }
                let disc = alpha * alpha + 4.0 * beta * u;
                if disc < 0.0 {
                    return Some(f64::NAN);
                }
                // root on the monotone branch through t = 0, in cancellation-free form
                Some(2.0 * u / (alpha + disc.sqrt()))
            }
            Family::ExpRate { kappa } => {
                if kappa == 0.0 {
                    Some(u)
                } else {
                    Some((kappa * u).ln_1p() / kappa)
                }
            }
            Family::SinPerturbed { .. } | Family::Zero => None,
        }
    }
}

#[derive(Debug, Clone)]
struct NumericWarp {
    grid: TimeGrid,
    g: UniformSpline,
    // cumulative integral from t_min
    h: UniformHermite,
    g_ends: (f64, f64),
}

impl NumericWarp {
    fn g(&self, t: f64) -> f64 {
        if t <= self.grid.t_min {
            self.g_ends.0
        } else if t >= self.grid.t_max {
            self.g_ends.1
        } else {
            self.g.eval(t)
        }
    }

    fn h(&self, t: f64) -> f64 {
        let nodes = self.h.nodes();
        if t < self.grid.t_min {
            nodes[0] + self.g_ends.0 * (t - self.grid.t_min)
        } else if t > self.grid.t_max {
            nodes[nodes.len() - 1] + self.g_ends.1 * (t - self.grid.t_max)
        } else {
            self.h.eval(t)
        }
    }

    fn h_inv(&self, target: f64) -> f64 {
        let nodes = self.h.nodes();
        let n = nodes.len();
        if target <= nodes[0] {
            return self.grid.t_min + (target - nodes[0]) / self.g_ends.0;
        }
        if target >= nodes[n - 1] {
            return self.grid.t_max + (target - nodes[n - 1]) / self.g_ends.1;
        }
        let k = nodes.partition_point(|&v| v <= target).clamp(1, n - 1) - 1;
        let lo = self.grid.at(k);
        let hi = self.grid.at(k + 1);
        invert_bracketed(|t| self.h.eval(t) - target, |t| self.h.derivative(t), lo, hi)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Analytic(Family),
    Numeric(Box<NumericWarp>),
}

/// A time warp with rate `g`, antiderivative `h` (`h(t0) = c0`) and inverse `h⁻¹`.
///
/// Immutable after construction; all evaluations are pure.
#[derive(Debug, Clone)]
pub struct WarpSpec {
    kind: Kind,
    t0: f64,
    c0: f64,
    // natural h at t0, cached
    h_nat_t0: f64,
}

impl WarpSpec {
    pub fn identity() -> Self {
        Self::from_family(Family::Identity, 0.0, 0.0)
    }

    /// The null drive `g ≡ 0`, `h ≡ 0`.
    pub fn zero() -> Self {
        Self::from_family(Family::Zero, 0.0, 0.0)
    }

    fn from_family(f: Family, t0: f64, c0: f64) -> Self {
        let h_nat_t0 = f.h(t0);
        Self {
            kind: Kind::Analytic(f),
            t0,
            c0,
            h_nat_t0,
        }
    }

    /// Re-pins the integration constant so that `h(t0) = c0`.
    pub fn with_reference(&self, t0: f64, c0: f64) -> Self {
        let h_nat_t0 = self.h_natural(t0);
        Self {
            kind: self.kind.clone(),
            t0,
            c0,
            h_nat_t0,
        }
    }

    pub fn family(&self) -> Option<Family> {
        match &self.kind {
            Kind::Analytic(f) => Some(*f),
            Kind::Numeric(_) => None,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.kind, Kind::Analytic(_))
    }

    /// Catalog tag, or `numeric`.
    pub fn name(&self) -> &'static str {
        match &self.kind {
            Kind::Analytic(f) => f.tag(),
            Kind::Numeric(_) => "numeric",
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Analytic(f) => format!("{}{:?}", f.tag(), f.params()),
            Kind::Numeric(nw) => format!(
                "numeric[{}..{}; n={}]",
                nw.grid.t_min, nw.grid.t_max, nw.grid.n
            ),
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    #[inline]
    pub fn g(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Analytic(f) => f.g(t),
            Kind::Numeric(nw) => nw.g(t),
        }
    }

    #[inline]
    fn h_natural(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Analytic(f) => f.h(t),
            Kind::Numeric(nw) => nw.h(t),
        }
    }

    #[inline]
    pub fn h(&self, t: f64) -> f64 {
        self.h_natural(t) - self.h_nat_t0 + self.c0
    }

    /// `h⁻¹(u)`. Returns NaN when `u` lies outside the range of `h` or the warp is
    /// not invertible.
    pub fn h_inv(&self, u: f64) -> f64 {
        let target = u - self.c0 + self.h_nat_t0;
        match &self.kind {
            Kind::Analytic(Family::Zero) => f64::NAN,
            Kind::Analytic(f) => {
                let (rlo, rhi) = f.range();
                if target < rlo || target > rhi {
                    return f64::NAN;
                }
                match f.h_inv(target) {
                    Some(t) => t,
                    None => {
                        // sin-perturbed: |h(t) - t| <= |a| brackets the root
                        let Family::SinPerturbed { a, .. } = *f else {
                            unreachable!()
                        };
                        let w = a.abs() + 1e-12 * (1.0 + target.abs());
                        invert_bracketed(|t| f.h(t) - target, |t| f.g(t), target - w, target + w)
                    }
                }
            }
            Kind::Numeric(nw) => nw.h_inv(target),
        }
    }

    /// `dh⁻¹/du = 1/g(h⁻¹(u))`.
    pub fn dhinv_du(&self, u: f64) -> f64 {
        1.0 / self.g(self.h_inv(u))
    }

    /// Interval of `t` on which the warp is declared monotone.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Analytic(Family::Zero) => (f64::NEG_INFINITY, f64::INFINITY),
            Kind::Analytic(f) => f.domain(),
            // numeric warps extrapolate linearly with positive end slopes
            Kind::Numeric(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Image of [`Self::domain`] under `h` (open ends reported as their limits).
    pub fn range(&self) -> (f64, f64) {
        let shift = self.c0 - self.h_nat_t0;
        match &self.kind {
            Kind::Analytic(f) => {
                let (a, b) = f.range();
                (a + shift, b + shift)
            }
            Kind::Numeric(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Safeguarded Newton on a bracket `[lo, hi]` with `f(lo) <= 0 <= f(hi)`:
/// bisection keeps the bracket, Newton steps polish to [`INVERSION_TOL`].
pub(crate) fn invert_bracketed(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if flo > 0.0 || fhi < 0.0 {
        return f64::NAN;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let ft = f(t);
        if ft == 0.0 {
            return t;
        }
        if ft < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = df(t);
        let newton = t - ft / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= INVERSION_TOL * 1e-3 * (1.0 + t.abs()) || hi - lo <= f64::EPSILON * (1.0 + t.abs()) {
            return next;
        }
        t = next;
    }
    t
}

/// Instantiates a catalog warp.
///
/// Families: `identity` `[]`, `linear-scale` `[α>0]`, `chirp` `[α>0, β]`
/// (monotone where `α + 2βt > 0`), `sin-perturbed` `[a, ω]` with `|aω| < 1`,
/// `exp-rate` `[κ]`, and the additive-only `zero` `[]`.
pub fn make_analytic_warp(name: &str, params: &[f64]) -> Result<WarpSpec> {
    let f = Family::parse(name, params)?;
    if f != Family::Zero {
        if let Some(reason) = f.monotonicity_violation() {
            return Err(Error::NonMonotoneParameters {
                family: name.to_string(),
                params: params.to_vec(),
                reason,
            });
        }
    }
    Ok(WarpSpec::from_family(f, 0.0, 0.0))
}

/// Like [`make_analytic_warp`] but skips the monotonicity constraint; for
/// diagnostics such as [`check_monotone`] and for additive drives.
pub fn make_analytic_warp_unchecked(name: &str, params: &[f64]) -> Result<WarpSpec> {
    Ok(WarpSpec::from_family(Family::parse(name, params)?, 0.0, 0.0))
}

/// Builds `h` from sampled `g` by cumulative composite Simpson quadrature.
pub fn make_numeric_warp(grid: TimeGrid, g: &[f64], t0: f64, c0: f64) -> Result<WarpSpec> {
    make_numeric_warp_with_tol(grid, g, t0, c0, NUMERIC_WARP_TOL)
}

pub fn make_numeric_warp_with_tol(grid: TimeGrid, g: &[f64], t0: f64, c0: f64, tol: f64) -> Result<WarpSpec> {
    if g.len() != grid.n {
        return Err(Error::InvalidInput(format!(
            "{} g samples for a grid of {} points",
            g.len(),
            grid.n
        )));
    }
    if grid.n < 5 {
        return Err(Error::GridTooCoarse("numeric warp needs at least 5 samples".into()));
    }
    for (k, &gk) in g.iter().enumerate() {
        if !gk.is_finite() || gk <= 0.0 {
            return Err(Error::NonPositiveG { t: grid.at(k), g: gk });
        }
    }
    let dt = grid.dt();
    let fine = cumulative_simpson(g, dt);
    // Richardson self-estimate against the every-other-sample grid
    let coarse_g: Vec<f64> = g.iter().step_by(2).copied().collect();
    let coarse = cumulative_simpson(&coarse_g, 2.0 * dt);
    let scale = 1.0 + fine.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let est = coarse
        .iter()
        .enumerate()
        .map(|(i, c)| (fine[2 * i] - c).abs() / 15.0)
        .fold(0.0, f64::max);
    if est > tol * scale {
        return Err(Error::GridTooCoarse(format!(
            "cumulative quadrature self-estimate {est:.3e} exceeds {:.3e}",
            tol * scale
        )));
    }
    let nw = NumericWarp {
        grid,
        g: UniformSpline::new(grid.t_min, dt, g.to_vec()),
        h: UniformHermite::new(grid.t_min, dt, fine, g.to_vec()),
        g_ends: (g[0], g[grid.n - 1]),
    };
    let h_nat_t0 = nw.h(t0);
    Ok(WarpSpec {
        kind: Kind::Numeric(Box::new(nw)),
        t0,
        c0,
        h_nat_t0,
    })
}

/// Cumulative integral from the first sample: Simpson at even nodes, Simpson plus a
/// three-point partial-interval rule at odd nodes. Fourth order throughout.
pub(crate) fn cumulative_simpson(g: &[f64], dt: f64) -> Vec<f64> {
    let n = g.len();
    let mut h = vec![0.0; n];
    if n == 2 {
        h[1] = 0.5 * dt * (g[0] + g[1]);
        return h;
    }
    for i in 1..n {
        h[i] = if i % 2 == 0 {
            h[i - 2] + dt / 3.0 * (g[i - 2] + 4.0 * g[i - 1] + g[i])
        } else if i + 1 < n {
            h[i - 1] + dt / 12.0 * (5.0 * g[i - 1] + 8.0 * g[i] - g[i + 1])
        } else {
            h[i - 1] + dt / 12.0 * (-g[i - 2] + 8.0 * g[i - 1] + 5.0 * g[i])
        };
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub min_g: f64,
    pub argmin_t: f64,
    pub pass: bool,
}

/// Minimum of `g` over the grid nodes and whether it is strictly positive.
pub fn check_monotone(w: &WarpSpec, grid: &TimeGrid) -> MonotonicityReport {
    let (argmin_t, min_g) = grid
        .points()
        .into_iter()
        .map(|t| (t, w.g(t)))
        .fold((f64::NAN, f64::INFINITY), |acc, (t, g)| if g < acc.1 { (t, g) } else { acc });
    MonotonicityReport {
        min_g,
        argmin_t,
        pass: min_g > 0.0,
    }
}

/// Fails with `NonMonotoneWarp` unless `g > 0` on every grid node.
pub fn require_monotone(w: &WarpSpec, grid: &TimeGrid) -> Result<()> {
    let r = check_monotone(w, grid);
    if r.pass {
        Ok(())
    } else {
        Err(Error::NonMonotoneWarp {
            min_g: r.min_g,
            t: r.argmin_t,
        })
    }
}

/// The five reference warps the acceptance battery runs over: identity, linear-scale
/// `α = 2`, chirp `(1, 0.02)`, sin-perturbed `(0.3, 1)` and exp-rate `κ = 0.5`.
pub fn standard_catalog() -> Vec<WarpSpec> {
    [
        ("identity", &[][..]),
        ("linear-scale", &[2.0][..]),
        ("chirp", &[1.0, 0.02][..]),
        ("sin-perturbed", &[0.3, 1.0][..]),
        ("exp-rate", &[0.5][..]),
    ]
    .iter()
    .map(|(name, p)| make_analytic_warp(name, p).expect("catalog parameters are monotone"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probes() -> Vec<f64> {
        (0..401).map(|k| -10.0 + 0.05 * k as f64).collect()
    }

    #[test]
    fn identity_and_linear_scale() {
        let id = make_analytic_warp("identity", &[]).unwrap();
        let lin = make_analytic_warp("linear-scale", &[2.0]).unwrap();
        for t in [-3.0, 0.0, 1.7] {
            assert_eq!(id.h(t), t);
            assert_eq!(id.g(t), 1.0);
            assert_eq!(id.h_inv(t), t);
            assert_eq!(lin.h(t), 2.0 * t);
            assert_eq!(lin.g(t), 2.0);
            assert_eq!(lin.h_inv(t), t / 2.0);
        }
    }

    #[test]
    fn sin_perturbed_inverse_residual() {
        let w = make_analytic_warp("sin-perturbed", &[0.3, 1.0]).unwrap();
        for k in 0..200 {
            let u = -20.0 + 0.2 * k as f64;
            let t = w.h_inv(u);
            assert!((w.h(t) - u).abs() < 1e-12, "u={u}");
            assert!((w.h(t) - (t + 0.3 * t.sin())).abs() < 1e-15);
        }
    }

    #[test]
    fn catalog_derivative_matches_g() {
        let step = 1e-5;
        for w in standard_catalog() {
            for t in probes() {
                if t <= w.domain().0 + 1e-3 {
                    continue;
                }
                let fd = (w.h(t + step) - w.h(t - step)) / (2.0 * step);
                let g = w.g(t);
                assert!((fd - g).abs() < 1e-8 * (1.0 + g.abs()), "{} t={t}", w.describe());
            }
        }
    }

    #[test]
    fn catalog_round_trip() {
        for w in standard_catalog() {
            for t in probes() {
                if t <= w.domain().0 {
                    continue;
                }
                let back = w.h_inv(w.h(t));
                assert!((back - t).abs() < 1e-10, "{} t={t} back={back}", w.describe());
            }
        }
    }

    #[test]
    fn reference_constant_shifts_h() {
        let w = make_analytic_warp("exp-rate", &[0.5]).unwrap().with_reference(1.0, 3.0);
        assert!((w.h(1.0) - 3.0).abs() < 1e-15);
        let t = 2.3;
        assert!((w.h_inv(w.h(t)) - t).abs() < 1e-12);
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(make_analytic_warp("spiral", &[]), Err(Error::UnknownFamily(_))));
        assert!(matches!(
            make_analytic_warp("sin-perturbed", &[2.0, 1.0]),
            Err(Error::NonMonotoneParameters { .. })
        ));
        assert!(matches!(
            make_analytic_warp("linear-scale", &[-1.0]),
            Err(Error::NonMonotoneParameters { .. })
        ));
        assert!(make_analytic_warp("chirp", &[1.0]).is_err());
    }

    #[test]
    fn check_monotone_reports() {
        let grid = TimeGrid::new(-std::f64::consts::PI, std::f64::consts::PI, 2001).unwrap();
        let r = check_monotone(&WarpSpec::identity(), &grid);
        assert!(r.pass);
        assert_eq!(r.min_g, 1.0);

        let r = check_monotone(&make_analytic_warp("sin-perturbed", &[0.3, 1.0]).unwrap(), &grid);
        assert!(r.pass);
        assert!((r.min_g - 0.7).abs() < 1e-12);

        let bad = make_analytic_warp_unchecked("sin-perturbed", &[2.0, 1.0]).unwrap();
        let r = check_monotone(&bad, &grid);
        assert!(!r.pass);
        assert!((r.min_g + 1.0).abs() < 1e-12);
        assert!(require_monotone(&bad, &grid).is_err());
    }

    #[test]
    fn numeric_identity() {
        let grid = TimeGrid::new(-5.0, 5.0, 1001).unwrap();
        let w = make_numeric_warp(grid, &vec![1.0; 1001], 0.0, 0.0).unwrap();
        for k in 0..100 {
            let t = -4.99 + 0.0998 * k as f64;
            assert!((w.h(t) - t).abs() < 1e-12);
            assert!((w.h_inv(t) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_linear_rate() {
        let grid = TimeGrid::new(0.0, 5.0, 4097).unwrap();
        let g: Vec<f64> = grid.points().iter().map(|t| 2.0 * t + 3.0).collect();
        let w = make_numeric_warp(grid, &g, 0.0, 0.0).unwrap();
        assert!((w.h(2.0) - 10.0).abs() < 1e-8);
        for t in [0.3, 1.111, 4.9] {
            assert!((w.h(t) - (t * t + 3.0 * t)).abs() < 1e-8);
            assert!((w.h_inv(w.h(t)) - t).abs() < 1e-10);
        }
    }

    #[test]
    fn numeric_cosine_rate() {
        let grid = TimeGrid::new(-1.0, 1.0, 2001).unwrap();
        let g: Vec<f64> = grid.points().iter().map(|t| t.cos()).collect();
        let w = make_numeric_warp(grid, &g, 0.0, 0.0).unwrap();
        assert!((w.h(0.5) - 0.479_425_538_604_203).abs() < 1e-10);
    }

    #[test]
    fn numeric_errors() {
        let grid = TimeGrid::new(-1.0, 1.0, 11).unwrap();
        let mut g = vec![1.0; 11];
        g[4] = 0.0;
        assert!(matches!(make_numeric_warp(grid, &g, 0.0, 0.0), Err(Error::NonPositiveG { .. })));
        let wiggly: Vec<f64> = grid.points().iter().map(|t| 2.0 + (40.0 * t).sin()).collect();
        assert!(matches!(make_numeric_warp(grid, &wiggly, 0.0, 0.0), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn numeric_warp_converges_at_fourth_order() {
        let exact = make_analytic_warp("sin-perturbed", &[0.3, 1.0]).unwrap();
        let err = |n: usize| {
            let grid = TimeGrid::new(-5.0, 5.0, n).unwrap();
            let g: Vec<f64> = grid.points().iter().map(|&t| exact.g(t)).collect();
            let w = make_numeric_warp_with_tol(grid, &g, 0.0, 0.0, 1.0).unwrap();
            (0..997)
                .map(|k| {
                    let t = -5.0 + 10.0 * (k as f64 + 0.5) / 997.0;
                    (w.h(t) - exact.h(t)).abs()
                })
                .fold(0.0, f64::max)
        };
        let errs: Vec<f64> = [41, 81, 161, 321].iter().map(|&n| err(n)).collect();
        for pair in errs.windows(2) {
            let slope = (pair[0] / pair[1]).log2();
            assert!((slope - 4.0).abs() < 0.3, "slope {slope} errs {errs:?}");
        }
    }
}
