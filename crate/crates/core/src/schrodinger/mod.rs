//! One-dimensional Hamiltonians, their eigenpairs, and solutions of
//! `i ∂ₜψ = Ĥ(t) ψ` for `Ĥ(t) = H + g(t)`, `H·g(t)` and `H·g₁(t) + g₂(t)`.
//!
//! Wave functions live on the full [`SpaceGrid`] with zero values on the two wall
//! nodes; the discrete operator acts on the interior nodes. Norms carry the `√dq`
//! weight, so `‖ψ‖ = (Σ |ψ_j|² dq)^{1/2}`.

mod eigen;
mod hamiltonian;
mod propagate;
mod solutions;

pub use eigen::eigensolve;
pub use hamiltonian::{build_hamiltonian, Hamiltonian1D, Potential};
pub use propagate::{propagate_crank_nicolson, propagate_final, stability_ratio, CrankNicolson, STABILITY_LIMIT};
pub use solutions::{cross_orthogonality, inner_product, schrodinger_residual, separable_solution, space_norm};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{SpaceGrid, TimeGrid};
use crate::warp::{check_monotone, WarpSpec};

/// `(E, ψ_E)` with `ψ_E` real, zero on the walls, and `‖ψ_E‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub grid: SpaceGrid,
    pub energy: f64,
    pub psi: Vec<f64>,
}

/// How the time dependence enters `Ĥ(t)`.
#[derive(Debug, Clone)]
pub enum HamiltonianKind {
    /// `H + g(t)`
    Additive(WarpSpec),
    /// `H·g(t)`
    Multiplicative(WarpSpec),
    /// `H·g₁(t) + g₂(t)`
    Combined(WarpSpec, WarpSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindTag {
    Additive,
    Multiplicative,
    Combined,
}

impl HamiltonianKind {
    pub fn tag(&self) -> KindTag {
        match self {
            HamiltonianKind::Additive(_) => KindTag::Additive,
            HamiltonianKind::Multiplicative(_) => KindTag::Multiplicative,
            HamiltonianKind::Combined(..) => KindTag::Combined,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            HamiltonianKind::Additive(w) => format!("H+g, g={}", w.describe()),
            HamiltonianKind::Multiplicative(w) => format!("H*g, g={}", w.describe()),
            HamiltonianKind::Combined(a, b) => format!("H*g1+g2, g1={}, g2={}", a.describe(), b.describe()),
        }
    }

    /// `(a, b)` with `Ĥ(t) = a·H + b·I`.
    pub fn coefficients(&self, t: f64) -> (f64, f64) {
        match self {
            HamiltonianKind::Additive(w) => (1.0, w.g(t)),
            HamiltonianKind::Multiplicative(w) => (w.g(t), 0.0),
            HamiltonianKind::Combined(w1, w2) => (w1.g(t), w2.g(t)),
        }
    }

    /// Phase `θ(t)` of the separable solution `ψ_E(q) e^{−iθ(t)}/√(2π)`.
    pub fn phase(&self, energy: f64, t: f64) -> f64 {
        match self {
            HamiltonianKind::Additive(w) => energy * t + w.h(t),
            HamiltonianKind::Multiplicative(w) => energy * w.h(t),
            HamiltonianKind::Combined(w1, w2) => energy * w1.h(t) + w2.h(t),
        }
    }

    /// Rejects drives that multiply `H` but change sign on the window, which would leave
    /// `Ĥ(t)` unbounded below.
    pub fn validate(&self, tgrid: &TimeGrid) -> Result<()> {
        let scaled = match self {
            HamiltonianKind::Additive(_) => return Ok(()),
            HamiltonianKind::Multiplicative(w) => w,
            HamiltonianKind::Combined(w1, _) => w1,
        };
        let rep = check_monotone(scaled, tgrid);
        if !rep.pass {
            return Err(Error::NonMonotoneWarp {
                min_g: rep.min_g,
                t: rep.argmin_t,
            });
        }
        Ok(())
    }
}

/// `ψ(q_j, t_k)`, stored one time slice after another.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub sgrid: SpaceGrid,
    pub tgrid: TimeGrid,
    pub values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn new(sgrid: SpaceGrid, tgrid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != sgrid.n * tgrid.n {
            return Err(Error::InvalidInput(format!(
                "{} values for a {}×{} field",
                values.len(),
                sgrid.n,
                tgrid.n
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite field value".into()));
        }
        Ok(Self { sgrid, tgrid, values })
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        let nq = self.sgrid.n;
        &self.values[k * nq..(k + 1) * nq]
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.values[k * self.sgrid.n + j]
    }

    pub fn last(&self) -> &[Complex64] {
        self.slice(self.tgrid.n - 1)
    }
}
