use num_complex::Complex64;

use super::{EigenPair, HamiltonianKind, Hamiltonian1D, SpaceTimeField};
use crate::diff::{derivative4, interior};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::transforms::INV_SQRT_2PI;

/// `ψ_E(q) · e^{−iθ(t)}/√(2π)` with `θ = Et + h(t)`, `E h(t)` or `E h₁(t) + h₂(t)`.
pub fn separable_solution(ep: &EigenPair, kind: &HamiltonianKind, tgrid: &TimeGrid) -> Result<SpaceTimeField> {
    kind.validate(tgrid)?;
    let mut values = Vec::with_capacity(ep.grid.n * tgrid.n);
    for t in tgrid.points() {
        let factor = Complex64::from_polar(INV_SQRT_2PI, -kind.phase(ep.energy, t));
        values.extend(ep.psi.iter().map(|&p| factor * p));
    }
    SpaceTimeField::new(ep.grid, *tgrid, values)
}

/// `⟨a, b⟩ = Σ a_j b_j* dq`.
pub fn inner_product(a: &[Complex64], b: &[Complex64], dq: f64) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * dq
}

pub fn space_norm(a: &[Complex64], dq: f64) -> f64 {
    (a.iter().map(|x| x.norm_sqr()).sum::<f64>() * dq).sqrt()
}

/// `max_k ‖i ∂ₜψ − Ĥ(t_k) ψ‖ / ‖ψ‖` over the time slices where the central
/// fourth-order stencil applies.
pub fn schrodinger_residual(field: &SpaceTimeField, h: &Hamiltonian1D, kind: &HamiltonianKind) -> Result<f64> {
    if field.sgrid != h.grid {
        return Err(Error::GridMismatch("field and Hamiltonian live on different space grids".into()));
    }
    let nt = field.tgrid.n;
    if nt < 5 {
        return Err(Error::GridTooCoarse(format!("time differencing needs 5 slices, got {nt}")));
    }
    let nq = field.sgrid.n;
    let dq = field.sgrid.dq();
    let dt = field.tgrid.dt();
    // ∂ₜ along each q row
    let mut dpsi = vec![Complex64::new(0.0, 0.0); nq * nt];
    let mut row = vec![Complex64::new(0.0, 0.0); nt];
    for j in 0..nq {
        for (k, r) in row.iter_mut().enumerate() {
            *r = field.at(j, k);
        }
        for (k, v) in derivative4(&row, dt).into_iter().enumerate() {
            dpsi[k * nq + j] = v;
        }
    }
    let mut worst: f64 = 0.0;
    for k in interior(nt) {
        let psi = field.slice(k);
        let (a, b) = kind.coefficients(field.tgrid.at(k));
        let hpsi = h.apply(psi);
        let resid: Vec<Complex64> = (0..nq)
            .map(|j| Complex64::i() * dpsi[k * nq + j] - (hpsi[j] * a + psi[j] * b))
            .collect();
        let norm = space_norm(psi, dq);
        if norm > 0.0 {
            worst = worst.max(space_norm(&resid, dq) / norm);
        }
    }
    Ok(worst)
}

/// `|⟨ψ_A(·, t_k), ψ_B(·, t_k)⟩|`.
pub fn cross_orthogonality(a: &SpaceTimeField, b: &SpaceTimeField, k: usize) -> Result<f64> {
    if a.sgrid != b.sgrid {
        return Err(Error::GridMismatch("fields live on different space grids".into()));
    }
    if k >= a.tgrid.n || k >= b.tgrid.n {
        return Err(Error::InvalidInput(format!("time index {k} out of range")));
    }
    Ok(inner_product(a.slice(k), b.slice(k), a.sgrid.dq()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpaceGrid;
    use crate::schrodinger::{build_hamiltonian, eigensolve, propagate_crank_nicolson, propagate_final, Potential};
    use crate::warp::{make_analytic_warp, WarpSpec};
    use std::f64::consts::PI;

    fn harmonic(n: usize) -> Hamiltonian1D {
        build_hamiltonian(SpaceGrid::new(-10.0, 10.0, n).unwrap(), &Potential::Harmonic { k: 1.0 }, 1.0).unwrap()
    }

    fn boxed(n: usize) -> Hamiltonian1D {
        build_hamiltonian(SpaceGrid::new(0.0, PI, n).unwrap(), &Potential::Box, 1.0).unwrap()
    }

    fn l2_gap(a: &[Complex64], b: &[Complex64], dq: f64) -> f64 {
        (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * dq).sqrt()
    }

    #[test]
    fn degenerate_kinds_give_stationary_states() {
        let h = harmonic(201);
        let ep = &eigensolve(&h, 2).unwrap()[1];
        let tg = TimeGrid::new(0.0, 2.0, 21).unwrap();
        let stationary = separable_solution(ep, &HamiltonianKind::Additive(WarpSpec::zero()), &tg).unwrap();
        for k in 0..tg.n {
            let f = Complex64::from_polar(INV_SQRT_2PI, -ep.energy * tg.at(k));
            for j in 0..h.grid.n {
                assert!((stationary.at(j, k) - f * ep.psi[j]).norm() < 1e-15);
            }
        }
        let mult = separable_solution(ep, &HamiltonianKind::Multiplicative(WarpSpec::identity()), &tg).unwrap();
        let comb = separable_solution(ep, &HamiltonianKind::Combined(WarpSpec::identity(), WarpSpec::zero()), &tg).unwrap();
        assert_eq!(mult, stationary);
        assert_eq!(comb, stationary);
    }

    #[test]
    fn residuals_of_closed_forms() {
        let tg = TimeGrid::new(0.0, 1.0, 1001).unwrap();
        let h = harmonic(401);
        let ep = &eigensolve(&h, 3).unwrap()[2];
        let chirp = make_analytic_warp("chirp", &[1.0, 0.02]).unwrap();
        let kind = HamiltonianKind::Additive(chirp);
        let r = schrodinger_residual(&separable_solution(ep, &kind, &tg).unwrap(), &h, &kind).unwrap();
        assert!(r < 1e-6, "{r}");

        let hb = boxed(401);
        let ep = &eigensolve(&hb, 2).unwrap()[1];
        let sinp = make_analytic_warp("sin-perturbed", &[0.3, 1.0]).unwrap();
        let kind = HamiltonianKind::Multiplicative(sinp.clone());
        let field = separable_solution(ep, &kind, &tg).unwrap();
        let r = schrodinger_residual(&field, &hb, &kind).unwrap();
        assert!(r < 1e-6, "{r}");

        // wrong phase e^{−i·1.01·E h(t)}
        let values = tg
            .points()
            .iter()
            .flat_map(|&t| {
                let f = Complex64::from_polar(INV_SQRT_2PI, -1.01 * ep.energy * sinp.h(t));
                ep.psi.iter().map(move |&p| f * p).collect::<Vec<_>>()
            })
            .collect();
        let wrong = SpaceTimeField::new(hb.grid, tg, values).unwrap();
        assert!(schrodinger_residual(&wrong, &hb, &kind).unwrap() > 1e-3);
    }

    #[test]
    fn stationary_propagation_is_a_phase() {
        let h = harmonic(401);
        let ep = &eigensolve(&h, 1).unwrap()[0];
        let tg = TimeGrid::new(0.0, 1.0, 10_001).unwrap();
        let kind = HamiltonianKind::Additive(WarpSpec::zero());
        let psi0: Vec<Complex64> = ep.psi.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        let end = propagate_final(&h, &kind, &psi0, &tg).unwrap();
        let exact: Vec<Complex64> = psi0.iter().map(|p| p * Complex64::from_polar(1.0, -ep.energy)).collect();
        let fidelity = inner_product(&exact, &end, h.grid.dq()).norm();
        assert!(fidelity > 1.0 - 1e-8);
    }

    #[test]
    fn propagation_preserves_norm_and_orthogonality() {
        let h = boxed(201);
        let eps = eigensolve(&h, 2).unwrap();
        let tg = TimeGrid::new(0.0, 1.0, 501).unwrap();
        let kind = HamiltonianKind::Multiplicative(make_analytic_warp("exp-rate", &[0.5]).unwrap());
        let fields: Vec<SpaceTimeField> = eps
            .iter()
            .map(|ep| {
                let psi0 = separable_solution(ep, &kind, &tg).unwrap().slice(0).to_vec();
                propagate_crank_nicolson(&h, &kind, &psi0, &tg).unwrap()
            })
            .collect();
        let dq = h.grid.dq();
        for k in 1..tg.n {
            let n0 = space_norm(fields[0].slice(k - 1), dq);
            let n1 = space_norm(fields[0].slice(k), dq);
            assert!((n1 - n0).abs() < 1e-12);
        }
        assert!(cross_orthogonality(&fields[0], &fields[1], tg.n - 1).unwrap() < 1e-10);
        let own = cross_orthogonality(&fields[0], &fields[0], 0).unwrap();
        assert!((own - 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn crank_nicolson_is_second_order() {
        let h = boxed(201);
        let ep = &eigensolve(&h, 2).unwrap()[1];
        let kind = HamiltonianKind::Multiplicative(make_analytic_warp("sin-perturbed", &[0.3, 1.0]).unwrap());
        let errs: Vec<f64> = [400usize, 800, 1600]
            .iter()
            .map(|&steps| {
                let tg = TimeGrid::new(0.0, 1.0, steps + 1).unwrap();
                let exact = separable_solution(ep, &kind, &TimeGrid::new(0.0, 1.0, 2).unwrap()).unwrap();
                let end = propagate_final(&h, &kind, exact.slice(0), &tg).unwrap();
                l2_gap(&end, exact.last(), h.grid.dq())
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio.log2() - 2.0).abs() < 0.2, "{errs:?}");
        }
    }

    #[test]
    fn multiplicative_kind_rejects_sign_change() {
        let h = boxed(51);
        let ep = &eigensolve(&h, 1).unwrap()[0];
        let tg = TimeGrid::new(-1.0, 1.0, 11).unwrap();
        let kind = HamiltonianKind::Multiplicative(make_analytic_warp("linear-scale", &[1.0]).unwrap());
        assert!(separable_solution(ep, &kind, &tg).is_ok());
        let bad = HamiltonianKind::Multiplicative(WarpSpec::zero());
        assert!(matches!(separable_solution(ep, &bad, &tg), Err(Error::NonMonotoneWarp { .. })));
    }
}
