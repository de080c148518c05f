//! Crank–Nicolson stepping with the midpoint Hamiltonian:
//! `(I + i dt/2 Ĥ(t+dt/2)) ψ_{k+1} = (I − i dt/2 Ĥ(t+dt/2)) ψ_k`.

use num_complex::Complex64;

use super::{HamiltonianKind, Hamiltonian1D, SpaceTimeField};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// `dt·max‖Ĥ(t)‖` above which a warning is logged; beyond it the Cayley phase error of
/// the highest modes is no longer small.
pub const STABILITY_LIMIT: f64 = 0.5;

/// `dt · max_t ‖Ĥ(t)‖` on the midpoints of `tgrid`, with the Gershgorin bound for `‖H‖`.
pub fn stability_ratio(h: &Hamiltonian1D, kind: &HamiltonianKind, tgrid: &TimeGrid) -> f64 {
    let dt = tgrid.dt();
    let hn = h.norm_bound();
    (0..tgrid.n - 1)
        .map(|k| {
            let (a, b) = kind.coefficients(tgrid.at(k) + 0.5 * dt);
            a.abs() * hn + b.abs()
        })
        .fold(0.0, f64::max)
        * dt
}

/// Reusable stepper; scratch buffers are kept between steps.
pub struct CrankNicolson<'a> {
    h: &'a Hamiltonian1D,
    kind: &'a HamiltonianKind,
    diag: Vec<f64>,
    off: f64,
    rhs: Vec<Complex64>,
    cprime: Vec<Complex64>,
}

impl<'a> CrankNicolson<'a> {
    pub fn new(h: &'a Hamiltonian1D, kind: &'a HamiltonianKind) -> Self {
        let m = h.dim();
        Self {
            h,
            kind,
            diag: h.diagonal(),
            off: h.off_diagonal(),
            rhs: vec![Complex64::new(0.0, 0.0); m],
            cprime: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    /// Advances the full-length `psi` (walls stay zero) from `t` to `t + dt`.
    pub fn step(&mut self, psi: &mut [Complex64], t: f64, dt: f64) -> Result<()> {
        let m = self.diag.len();
        let (a, b) = self.kind.coefficients(t + 0.5 * dt);
        let half = Complex64::new(0.0, 0.5 * dt);
        let off = half * (a * self.off);
        // right-hand side (I − i dt/2 Ĥ) ψ on interior nodes
        for j in 0..m {
            let q = j + 1;
            let hpsi = psi[q] * (a * self.diag[j] + b) + (psi[q - 1] + psi[q + 1]) * (a * self.off);
            self.rhs[j] = psi[q] - half * hpsi;
        }
        // Thomas sweep for (I + i dt/2 Ĥ); its Hermitian part is I, so no pivoting is needed
        let mut denom = Complex64::new(1.0, 0.0) + half * (a * self.diag[0] + b);
        if denom.norm() == 0.0 {
            return Err(Error::LinearSolveFailure("zero pivot at row 0".into()));
        }
        self.cprime[0] = off / denom;
        self.rhs[0] /= denom;
        for j in 1..m {
            denom = Complex64::new(1.0, 0.0) + half * (a * self.diag[j] + b) - off * self.cprime[j - 1];
            if denom.norm() == 0.0 || !denom.re.is_finite() {
                return Err(Error::LinearSolveFailure(format!("bad pivot at row {j}")));
            }
            self.cprime[j] = off / denom;
            let prev = self.rhs[j - 1];
            self.rhs[j] = (self.rhs[j] - off * prev) / denom;
        }
        for j in (0..m.saturating_sub(1)).rev() {
            let next = self.rhs[j + 1];
            self.rhs[j] -= self.cprime[j] * next;
        }
        psi[1..=m].copy_from_slice(&self.rhs);
        psi[0] = Complex64::new(0.0, 0.0);
        psi[m + 1] = Complex64::new(0.0, 0.0);
        Ok(())
    }

    pub fn hamiltonian(&self) -> &Hamiltonian1D {
        self.h
    }
}

fn check_inputs(h: &Hamiltonian1D, kind: &HamiltonianKind, psi0: &[Complex64], tgrid: &TimeGrid) -> Result<()> {
    if psi0.len() != h.grid.n {
        return Err(Error::GridMismatch(format!(
            "initial state has {} samples, space grid has {}",
            psi0.len(),
            h.grid.n
        )));
    }
    if psi0.iter().all(|z| z.norm() == 0.0) || psi0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidInput("initial state must be finite and nonzero".into()));
    }
    kind.validate(tgrid)?;
    let ratio = stability_ratio(h, kind, tgrid);
    if ratio > STABILITY_LIMIT {
        log::warn!(
            "schrodinger.stability_heuristic_violated: dt·‖Ĥ‖ = {ratio:.3} exceeds {STABILITY_LIMIT}; high modes will be phase-inaccurate"
        );
    }
    Ok(())
}

/// Every time slice of the Crank–Nicolson solution starting from `psi0` at `tgrid.t_min`.
pub fn propagate_crank_nicolson(
    h: &Hamiltonian1D,
    kind: &HamiltonianKind,
    psi0: &[Complex64],
    tgrid: &TimeGrid,
) -> Result<SpaceTimeField> {
    check_inputs(h, kind, psi0, tgrid)?;
    let nq = h.grid.n;
    let dt = tgrid.dt();
    let mut values = Vec::with_capacity(nq * tgrid.n);
    let mut psi = psi0.to_vec();
    psi[0] = Complex64::new(0.0, 0.0);
    psi[nq - 1] = Complex64::new(0.0, 0.0);
    values.extend_from_slice(&psi);
    let mut cn = CrankNicolson::new(h, kind);
    for k in 0..tgrid.n - 1 {
        cn.step(&mut psi, tgrid.at(k), dt)?;
        values.extend_from_slice(&psi);
    }
    Ok(SpaceTimeField {
        sgrid: h.grid,
        tgrid: *tgrid,
        values,
    })
}

/// Final slice only, for long convergence studies.
pub fn propagate_final(
    h: &Hamiltonian1D,
    kind: &HamiltonianKind,
    psi0: &[Complex64],
    tgrid: &TimeGrid,
) -> Result<Vec<Complex64>> {
    check_inputs(h, kind, psi0, tgrid)?;
    let nq = h.grid.n;
    let dt = tgrid.dt();
    let mut psi = psi0.to_vec();
    psi[0] = Complex64::new(0.0, 0.0);
    psi[nq - 1] = Complex64::new(0.0, 0.0);
    let mut cn = CrankNicolson::new(h, kind);
    for k in 0..tgrid.n - 1 {
        cn.step(&mut psi, tgrid.at(k), dt)?;
    }
    Ok(psi)
}
