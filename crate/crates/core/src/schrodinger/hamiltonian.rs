use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpaceGrid;

/// Potential energy `V(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `½ k q²`
    Harmonic { k: f64 },
    /// `V ≡ 0` between the walls of the grid.
    Box,
    /// `V ≡ value`
    Constant { value: f64 },
    /// `−depth · exp(−(q − center)²/(2 width²))`
    GaussianWell { depth: f64, width: f64, center: f64 },
    /// One value per grid node, walls included.
    Custom { samples: Vec<f64> },
}

impl Potential {
    pub fn sample(&self, grid: &SpaceGrid) -> Result<Vec<f64>> {
        let v: Vec<f64> = match self {
            Potential::Harmonic { k } => grid.points().iter().map(|q| 0.5 * k * q * q).collect(),
            Potential::Box => vec![0.0; grid.n],
            Potential::Constant { value } => vec![*value; grid.n],
            Potential::GaussianWell { depth, width, center } => {
                if !(*width > 0.0) {
                    return Err(Error::BadPotential(format!("gaussian well width {width} must be positive")));
                }
                grid.points()
                    .iter()
                    .map(|q| {
                        let x = (q - center) / width;
                        -depth * (-0.5 * x * x).exp()
                    })
                    .collect()
            }
            Potential::Custom { samples } => {
                if samples.len() != grid.n {
                    return Err(Error::BadPotential(format!(
                        "{} potential samples for {} grid nodes",
                        samples.len(),
                        grid.n
                    )));
                }
                samples.clone()
            }
        };
        if let Some(j) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::BadPotential(format!("non-finite V at node {j}")));
        }
        Ok(v)
    }
}

/// `H = −(1/2m) ∂²_q + V(q)` with the three-point Laplacian and Dirichlet walls.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian1D {
    pub grid: SpaceGrid,
    pub potential: Vec<f64>,
    pub mass: f64,
}

pub fn build_hamiltonian(grid: SpaceGrid, potential: &Potential, mass: f64) -> Result<Hamiltonian1D> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
    }
    let potential = potential.sample(&grid)?;
    Ok(Hamiltonian1D { grid, potential, mass })
}

impl Hamiltonian1D {
    /// Number of interior unknowns.
    pub fn dim(&self) -> usize {
        self.grid.n - 2
    }

    /// Diagonal of the interior matrix.
    pub fn diagonal(&self) -> Vec<f64> {
        let kin = 1.0 / (self.mass * self.grid.dq().powi(2));
        self.potential[1..self.grid.n - 1].iter().map(|v| kin + v).collect()
    }

    /// Constant off-diagonal entry of the interior matrix.
    pub fn off_diagonal(&self) -> f64 {
        -0.5 / (self.mass * self.grid.dq().powi(2))
    }

    /// `H + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            potential: self.potential.iter().map(|v| v + c).collect(),
            mass: self.mass,
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let e = self.off_diagonal().abs();
        self.diagonal().iter().map(|d| d.abs() + 2.0 * e).fold(0.0, f64::max)
    }

    /// `H ψ` on a full-length vector; wall entries of the result are zero.
    pub fn apply<T>(&self, psi: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = self.grid.n;
        let d = self.diagonal();
        let e = self.off_diagonal();
        let mut out = vec![T::default(); n];
        for j in 1..n - 1 {
            out[j] = psi[j] * d[j - 1] + (psi[j - 1] + psi[j + 1]) * e;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_is_symmetric() {
        let grid = SpaceGrid::new(-3.0, 3.0, 41).unwrap();
        let h = build_hamiltonian(grid, &Potential::Harmonic { k: 2.0 }, 0.7).unwrap();
        let u: Vec<f64> = (0..41).map(|j| if j == 0 || j == 40 { 0.0 } else { (j as f64 * 0.3).sin() }).collect();
        let v: Vec<f64> = (0..41).map(|j| if j == 0 || j == 40 { 0.0 } else { (j as f64 * 0.11).cos() }).collect();
        let hu = h.apply(&u);
        let hv = h.apply(&v);
        let a: f64 = hu.iter().zip(&v).map(|(x, y)| x * y).sum();
        let b: f64 = u.iter().zip(&hv).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn rejects_bad_potentials() {
        let grid = SpaceGrid::new(0.0, 1.0, 5).unwrap();
        assert!(matches!(
            build_hamiltonian(grid, &Potential::Custom { samples: vec![0.0, 1.0, f64::NAN, 0.0, 0.0] }, 1.0),
            Err(Error::BadPotential(_))
        ));
        assert!(matches!(
            build_hamiltonian(grid, &Potential::Custom { samples: vec![0.0; 3] }, 1.0),
            Err(Error::BadPotential(_))
        ));
        assert!(build_hamiltonian(grid, &Potential::Box, 0.0).is_err());
    }
}
