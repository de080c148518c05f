//! Uniform sample grids in time, energy and space.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform time grid `t_k = t_min + k dt`, `k = 0..n`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_max.is_finite()) || t_min >= t_max {
            return Err(Error::InvalidGrid(format!(
                "time grid needs finite t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("time grid needs n >= 2, got {n}")));
        }
        Ok(Self { t_min, t_max, n })
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.dt()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.at(k)).collect()
    }

    pub fn span(&self) -> f64 {
        self.t_max - self.t_min
    }
}

/// Uniform energy grid; same conventions as [`TimeGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub n: usize,
}

impl SpectrumGrid {
    pub fn new(e_min: f64, e_max: f64, n: usize) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite()) || n < 1 || (n > 1 && e_min >= e_max) {
            return Err(Error::InvalidGrid(format!(
                "energy grid needs finite e_min < e_max and n >= 1, got [{e_min}, {e_max}] n={n}"
            )));
        }
        if n == 1 && e_min != e_max {
            return Err(Error::InvalidGrid("single-point energy grid needs e_min == e_max".into()));
        }
        Ok(Self { e_min, e_max, n })
    }

    /// The grid conjugate to `n` samples at spacing `dt` under the discrete Fourier
    /// transform: `dE = 2π/(n dt)`, `E_m = (m - n/2) dE`. Forward then inverse
    /// on this grid is exact to rounding.
    pub fn conjugate_to(dt: f64, n: usize) -> Self {
        let de = 2.0 * PI / (n as f64 * dt);
        let e_min = -((n / 2) as f64) * de;
        Self {
            e_min,
            e_max: e_min + (n - 1) as f64 * de,
            n,
        }
    }

    #[inline]
    pub fn de(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.e_max - self.e_min) / (self.n - 1) as f64
        }
    }

    #[inline]
    pub fn at(&self, m: usize) -> f64 {
        self.e_min + m as f64 * self.de()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.at(m)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.e_min.abs().max(self.e_max.abs())
    }
}

/// Uniform spatial grid with Dirichlet walls at both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub n: usize,
}

impl SpaceGrid {
    pub fn new(q_min: f64, q_max: f64, n: usize) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite()) || q_min >= q_max {
            return Err(Error::InvalidGrid(format!(
                "space grid needs finite q_min < q_max, got [{q_min}, {q_max}]"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("space grid needs n >= 3, got {n}")));
        }
        Ok(Self { q_min, q_max, n })
    }

    #[inline]
    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn at(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.at(j)).collect()
    }
}
