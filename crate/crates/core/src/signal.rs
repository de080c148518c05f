//! Sampled signals in time and energy, plus the seeded test-signal corpus.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{SpectrumGrid, TimeGrid};

/// Complex samples `f(t_k)` on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
}

/// Complex samples `F(E_m)` on a uniform energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSamples {
    pub grid: SpectrumGrid,
    pub values: Vec<Complex64>,
}

fn check_values(len: usize, values: &[Complex64]) -> Result<()> {
    if values.len() != len {
        return Err(Error::InvalidInput(format!(
            "{} samples for a grid of {len} points",
            values.len()
        )));
    }
    if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidInput(format!("non-finite sample at index {k}")));
    }
    Ok(())
}

impl SampledSignal {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        check_values(grid.n, &values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |t| Complex64::new(f(t), 0.0))
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.points()
    }

    /// `(Σ |f|² dt)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dt()).sqrt()
    }

    /// `‖self − other‖ / ‖other‖` on a shared grid.
    pub fn relative_l2_error(&self, reference: &SampledSignal) -> f64 {
        relative_l2(&self.values, &reference.values)
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &SampledSignal, b: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn windowed(&self, flank_fraction: f64) -> Self {
        let w = tukey(self.grid.n, flank_fraction);
        Self {
            grid: self.grid,
            values: self.values.iter().zip(w).map(|(v, wk)| v * wk).collect(),
        }
    }
}

impl SpectrumSamples {
    pub fn new(grid: SpectrumGrid, values: Vec<Complex64>) -> Result<Self> {
        check_values(grid.n, &values)?;
        Ok(Self { grid, values })
    }

    pub fn energies(&self) -> Vec<f64> {
        self.grid.points()
    }

    /// `(Σ |F|² dE)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.de()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &SpectrumSamples) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }
}

pub fn relative_l2(a: &[Complex64], reference: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Tukey taper: cosine ramps over `flank_fraction` of the samples at each end.
pub fn tukey(n: usize, flank_fraction: f64) -> Vec<f64> {
    if n < 2 {
        return vec![1.0; n];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|k| {
            let x = (k as f64 / last).min(1.0 - k as f64 / last);
            if flank_fraction <= 0.0 || x >= flank_fraction {
                1.0
            } else {
                0.5 * (1.0 - (PI * x / flank_fraction).cos())
            }
        })
        .collect()
}

/// Normalized Hermite function `ψ_n(x)`; its symmetric Fourier transform is `(−i)^n ψ_n`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Named members of the test-signal corpus.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    /// `amplitude · exp(−(t − center)² / (2 width²))`
    Gaussian { center: f64, width: f64 },
    Hermite { order: usize },
    /// Seeded sum of random complex tones under a Gaussian envelope.
    BandLimitedNoise { seed: u64, max_freq: f64, envelope: f64, tones: usize },
    /// `exp(−1/(1 − ((t−center)/radius)²))` inside the support, zero outside.
    Bump { center: f64, radius: f64 },
}

impl SignalSpec {
    pub fn label(&self) -> String {
        match self {
            SignalSpec::Gaussian { center, width } => format!("gaussian(c={center},w={width})"),
            SignalSpec::Hermite { order } => format!("hermite{order}"),
            SignalSpec::BandLimitedNoise { seed, .. } => format!("noise(seed={seed})"),
            SignalSpec::Bump { center, radius } => format!("bump(c={center},r={radius})"),
        }
    }

    pub fn sample(&self, grid: TimeGrid) -> SampledSignal {
        match *self {
            SignalSpec::Gaussian { center, width } => SampledSignal::from_real_fn(grid, |t| {
                let x = (t - center) / width;
                (-0.5 * x * x).exp()
            }),
            SignalSpec::Hermite { order } => SampledSignal::from_real_fn(grid, |t| hermite_function(order, t)),
            SignalSpec::BandLimitedNoise {
                seed,
                max_freq,
                envelope,
                tones,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let comps: Vec<(f64, Complex64)> = (0..tones)
                    .map(|_| {
                        let w = rng.gen_range(-max_freq..=max_freq);
                        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        (w, a)
                    })
                    .collect();
                SampledSignal::from_fn(grid, |t| {
                    let env = (-0.5 * (t / envelope).powi(2)).exp();
                    comps.iter().map(|(w, a)| a * Complex64::from_polar(1.0, w * t)).sum::<Complex64>() * env
                })
            }
            SignalSpec::Bump { center, radius } => SampledSignal::from_real_fn(grid, |t| {
                let x = (t - center) / radius;
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }),
        }
    }
}

/// The ten-signal corpus used by the reduction and resolution checks: unit Gaussian,
/// a shifted narrow Gaussian, Hermite functions 0–3, and four seeded band-limited
/// noise signals.
pub fn standard_corpus(seed: u64) -> Vec<SignalSpec> {
    let mut v = vec![
        SignalSpec::Gaussian { center: 0.0, width: 1.0 },
        SignalSpec::Gaussian { center: 0.7, width: 0.6 },
    ];
    v.extend((0..4).map(|order| SignalSpec::Hermite { order }));
    v.extend((0..4).map(|k| SignalSpec::BandLimitedNoise {
        seed: seed.wrapping_mul(1000).wrapping_add(k),
        max_freq: 3.0,
        envelope: 1.0,
        tones: 6,
    }));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let grid = TimeGrid::new(-12.0, 12.0, 4001).unwrap();
        let dt = grid.dt();
        for a in 0..4 {
            for b in 0..4 {
                let ip: f64 = grid.points().iter().map(|&t| hermite_function(a, t) * hermite_function(b, t)).sum::<f64>() * dt;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12, "{a},{b}: {ip}");
            }
        }
    }

    #[test]
    fn tukey_shape() {
        let w = tukey(101, 0.1);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[100], 0.0);
        assert_eq!(w[50], 1.0);
        assert!((w[5] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noise_is_seeded() {
        let grid = TimeGrid::new(-5.0, 5.0, 64).unwrap();
        let a = standard_corpus(7)[6].sample(grid);
        let b = standard_corpus(7)[6].sample(grid);
        let c = standard_corpus(8)[6].sample(grid);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
