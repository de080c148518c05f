//! The single-experiment subcommands, plus the studies they share with the suite.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::path::Path;

use crate::distributions::{pair_density, s_density, s_pairing_direct_converged, s_pairing_parseval};
use crate::error::{Error, Result};
use crate::grid::{SpectrumGrid, TimeGrid};
use crate::schrodinger::{
    build_hamiltonian, eigensolve, inner_product, propagate_crank_nicolson, propagate_final, schrodinger_residual,
    separable_solution, space_norm, stability_ratio, EigenPair, HamiltonianKind, Hamiltonian1D, SpaceTimeField,
};
use crate::signal::SampledSignal;
use crate::transforms::{
    biorth_pairing, biorth_pairing_quadrature, default_modulated_grid, default_warped_grid, modulated_forward,
    modulated_reduction_check, resampled_spectrum_grid, resolution_roundtrip_with, smeared_biorth, warped_forward,
    warped_reduction_check, Flavor, WarpedMethod,
};
use crate::warp::WarpSpec;

use super::config::ExperimentConfig;
use super::csvio;
use super::report::{emit_convergence_table, Check, Report};

pub(crate) type Tolerances = BTreeMap<String, f64>;

pub(crate) const TRANSFORM_TOLERANCES: &[(&str, f64)] = &[("roundtrip", 1e-7), ("reduction", 1e-6)];
pub(crate) const BIORTH_TOLERANCES: &[(&str, f64)] =
    &[("smeared", 1e-3), ("monotone_violations", 0.0), ("closed_form", 1e-8)];
pub(crate) const DISTRIBUTION_TOLERANCES: &[(&str, f64)] = &[("difference", 1e-4), ("expected", 1e-6)];
pub(crate) const EVOLVE_TOLERANCES: &[(&str, f64)] =
    &[("residual", 1e-6), ("cn_error", 1e-4), ("norm_drift", 1e-10), ("cn_order", 0.2)];
pub(crate) const ORTHOGONALITY_TOLERANCES: &[(&str, f64)] = &[("separable", 1e-10), ("propagated", 1e-6)];

/// Default energy grid for the `S(E)` density artifact.
const DENSITY_GRID: (f64, f64, usize) = (-20.0, 20.0, 801);
/// Window width used to compare the closed-form pairing with `t` quadrature.
const CLOSED_FORM_WIDTH: f64 = 20.0;
const CLOSED_FORM_POINTS: usize = 8001;

fn file(out: &Path, report: &mut Report, name: &str) -> std::path::PathBuf {
    report.artifacts.push(name.to_string());
    out.join(name)
}

fn load_signal(cfg: &ExperimentConfig) -> Result<SampledSignal> {
    if cfg.signal_from_file() {
        // the file carries its own grid
        cfg.signal(TimeGrid::new(0.0, 1.0, 2)?)
    } else {
        cfg.signal(cfg.time_grid()?)
    }
}

pub(crate) fn transform(cfg: &ExperimentConfig, tol: &Tolerances, out: &Path, report: &mut Report) -> Result<()> {
    let w = cfg.warp()?;
    let f = load_signal(cfg)?;
    let tc = cfg.transform.unwrap_or_default();
    let spec = match tc.flavor {
        Flavor::Additive => {
            let egrid = cfg.energy_grid()?.unwrap_or_else(|| default_modulated_grid(&f.grid));
            modulated_forward(&f, &w, &egrid)?
        }
        Flavor::Multiplicative => {
            let egrid = match cfg.energy_grid()? {
                Some(g) => g,
                None if tc.method == WarpedMethod::DirectQuadrature => default_warped_grid(&w, &f.grid)?,
                None => resampled_spectrum_grid(&f, &w)?,
            };
            warped_forward(&f, &w, &egrid, tc.method)?
        }
    };
    csvio::write_signal(&file(out, report, "signal.csv"), &f)?;
    csvio::write_spectrum(&file(out, report, "spectrum.csv"), &spec)?;

    let roundtrip = resolution_roundtrip_with(&f, &w, tc.flavor, tc.method)?;
    let reduction = match tc.flavor {
        Flavor::Additive => modulated_reduction_check(&f, &w)?,
        Flavor::Multiplicative => warped_reduction_check(&f, &w)?,
    };
    report.scalar("signal_norm", f.l2_norm());
    report.scalar("spectrum_norm", spec.l2_norm());
    report.scalar("energy_points", spec.grid.n as f64);
    report.check(Check::below("roundtrip", roundtrip, tol["roundtrip"]));
    report.check(Check::below("reduction", reduction, tol["reduction"]));
    Ok(())
}

/// Time window whose image under `h` is an interval of the given width, centred at
/// `center` when the range of `h` allows it.
pub(crate) fn h_window(w: &WarpSpec, center: f64, width: f64, n: usize) -> Result<TimeGrid> {
    let (lo, hi) = w.range();
    let margin = 1e-3 * width;
    if !(hi - lo > width + 2.0 * margin) {
        return Err(Error::RangeTooNarrow(format!(
            "range [{lo}, {hi}] of {} cannot hold an h-window of width {width}",
            w.describe()
        )));
    }
    let ya = (center - 0.5 * width).max(lo + margin).min(hi - margin - width);
    TimeGrid::new(w.h_inv(ya), w.h_inv(ya + width), n)
}

pub(crate) struct SmearedStudy {
    /// `(width, E, |smeared − φ(E)|)`
    pub rows: Vec<(f64, f64, f64)>,
    /// Worst error per width, in the order of the widths.
    pub worst: Vec<f64>,
}

impl SmearedStudy {
    pub fn monotone_violations(&self) -> usize {
        self.worst.windows(2).filter(|p| !(p[1] < p[0])).count()
    }
}

/// `∫⟨E′,h,⊥|E,h⟩φ(E′)dE′` against `φ(E)` for a Gaussian `φ` over growing `h` windows.
pub(crate) fn smeared_study(w: &WarpSpec, widths: &[f64], phi_width: f64, energies: &[f64], center: f64) -> Result<SmearedStudy> {
    if widths.is_empty() || energies.is_empty() || !(phi_width > 0.0) {
        return Err(Error::ConfigParse("biorth study needs widths, energies and phi_width > 0".into()));
    }
    let phi = |e: f64| (-0.5 * (e / phi_width).powi(2)).exp();
    let w_max = widths.iter().cloned().fold(0.0, f64::max);
    let e_lo = energies.iter().cloned().fold(f64::INFINITY, f64::min) - 12.0 * phi_width;
    let e_hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 12.0 * phi_width;
    // resolve both φ and the kernel oscillation 4π/W
    let de = (phi_width / 50.0).min(4.0 * std::f64::consts::PI / (64.0 * w_max));
    let n = (((e_hi - e_lo) / de).ceil() as usize + 1) | 1;
    let egrid = SpectrumGrid::new(e_lo, e_hi, n)?;
    let mut rows = Vec::new();
    let mut worst = Vec::new();
    for &width in widths {
        let tgrid = h_window(w, center, width, 101)?;
        let mut wmax: f64 = 0.0;
        for &e in energies {
            let s = smeared_biorth(e, w, &tgrid, phi, &egrid)?;
            let err = (s - phi(e)).norm();
            wmax = wmax.max(err);
            rows.push((width, e, err));
        }
        worst.push(wmax);
    }
    Ok(SmearedStudy { rows, worst })
}

pub(crate) fn verify_biorth(cfg: &ExperimentConfig, tol: &Tolerances, out: &Path, report: &mut Report) -> Result<()> {
    let w = cfg.warp()?;
    let bc = cfg.biorth.clone().unwrap_or_default();
    let study = smeared_study(&w, &bc.widths, bc.phi_width, &bc.energies, bc.center)?;
    let rows: Vec<Vec<f64>> = study.rows.iter().map(|&(a, b, c)| vec![a, b, c]).collect();
    csvio::write_table(&file(out, report, "biorth_smeared.csv"), &["width", "E", "abs_error"], &rows)?;

    // closed form against direct t quadrature
    let tgrid = h_window(&w, bc.center, CLOSED_FORM_WIDTH, CLOSED_FORM_POINTS)?;
    let mut gap: f64 = 0.0;
    for &(ep, e) in &[(0.0, 0.0), (0.3, 0.1), (-0.2, 0.45), (1.0, -1.0)] {
        let a = biorth_pairing(ep, e, &w, &tgrid)?;
        let b = biorth_pairing_quadrature(ep, e, &w, &tgrid)?;
        gap = gap.max((a - b).norm());
    }
    for (wd, err) in bc.widths.iter().zip(&study.worst) {
        report.scalar(format!("smeared_error_w{wd}"), *err);
    }
    report.check(Check::below("smeared", *study.worst.last().unwrap(), tol["smeared"]));
    report.check(Check::within(
        "monotone_violations",
        study.monotone_violations() as f64,
        0.0,
        tol["monotone_violations"],
    ));
    report.check(Check::below("closed_form", gap, tol["closed_form"]));
    Ok(())
}

pub(crate) fn distribution(cfg: &ExperimentConfig, tol: &Tolerances, out: &Path, report: &mut Report) -> Result<()> {
    let w = cfg.warp()?;
    let phi = cfg.test_function()?;
    let dc = cfg.distribution.unwrap_or_default();
    if cfg.tolerances.contains_key("expected") && dc.expected.is_none() {
        return Err(Error::ConfigParse("tolerance `expected` needs [distribution] expected".into()));
    }
    let direct = s_pairing_direct_converged(&w, &phi, dc.t_start, dc.direct_tol, dc.t_limit)?;
    let parseval = s_pairing_parseval(&w, &phi)?;
    let d = Complex64::from(direct.value);
    let difference = (d - parseval).norm();

    let egrid = match cfg.energy_grid()? {
        Some(g) => g,
        None => SpectrumGrid::new(DENSITY_GRID.0, DENSITY_GRID.1, DENSITY_GRID.2)?,
    };
    let density = s_density(&w, &egrid)?;
    csvio::write_spectrum(&file(out, report, "s_density.csv"), &density)?;

    report.scalar("direct_re", d.re);
    report.scalar("direct_im", d.im);
    report.scalar("parseval_re", parseval.re);
    report.scalar("parseval_im", parseval.im);
    report.scalar("density_pairing_re", pair_density(&density, &phi).re);
    report.scalar("T_used", direct.t_used);
    report.scalar("direct_points", direct.n_used as f64);
    report.check(Check::below("difference", difference, tol["difference"]));
    if let Some(x) = dc.expected {
        report.check(Check::below("expected", (parseval - x).norm().max((d - x).norm()), tol["expected"]));
    }
    Ok(())
}

/// L2 distance in `q` (walls included).
pub(crate) fn l2_gap(a: &[Complex64], b: &[Complex64], dq: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * dq).sqrt()
}

/// Crank–Nicolson from the closed form at `t_min`, compared with it at `t_max`.
pub(crate) fn cn_final_error(h: &Hamiltonian1D, kind: &HamiltonianKind, ep: &EigenPair, t0: f64, t1: f64, steps: usize) -> Result<f64> {
    let ends = separable_solution(ep, kind, &TimeGrid::new(t0, t1, 2)?)?;
    let end = propagate_final(h, kind, ends.slice(0), &TimeGrid::new(t0, t1, steps + 1)?)?;
    Ok(l2_gap(&end, ends.last(), h.grid.dq()))
}

fn slice_stride(tgrid: &TimeGrid, slices: usize) -> usize {
    if slices <= 1 {
        tgrid.n
    } else {
        ((tgrid.n - 1) / (slices - 1)).max(1)
    }
}

pub(crate) fn evolve(cfg: &ExperimentConfig, tol: &Tolerances, out: &Path, report: &mut Report) -> Result<()> {
    let sgrid = cfg.space_grid()?;
    let (kind, mass) = cfg.hamiltonian_kind()?;
    let tgrid = cfg.time_grid()?;
    let ec = cfg.evolve.unwrap_or_default();
    if cfg.tolerances.contains_key("cn_order") && ec.refinements < 2 {
        return Err(Error::ConfigParse("tolerance `cn_order` needs [evolve] refinements >= 2".into()));
    }
    let h = build_hamiltonian(sgrid, &cfg.potential()?, mass)?;
    let eps = eigensolve(&h, ec.state + 1)?;
    let ep = &eps[ec.state];
    let exact = separable_solution(ep, &kind, &tgrid)?;
    let residual = schrodinger_residual(&exact, &h, &kind)?;
    let prop = propagate_crank_nicolson(&h, &kind, exact.slice(0), &tgrid)?;
    let dq = sgrid.dq();
    let cn_error = l2_gap(prop.last(), exact.last(), dq);
    let n0 = space_norm(prop.slice(0), dq);
    let norm_drift = (0..tgrid.n)
        .map(|k| (space_norm(prop.slice(k), dq) - n0).abs())
        .fold(0.0, f64::max);

    let stride = slice_stride(&tgrid, ec.slices);
    csvio::write_field(&file(out, report, "field_closed_form.csv"), &exact, stride)?;
    csvio::write_field(&file(out, report, "field_crank_nicolson.csv"), &prop, stride)?;

    report.scalar("energy", ep.energy);
    report.scalar("dt", tgrid.dt());
    report.scalar("stability_ratio", stability_ratio(&h, &kind, &tgrid));
    report.check(Check::below("residual", residual, tol["residual"]));
    report.check(Check::below("cn_error", cn_error, tol["cn_error"]));
    report.check(Check::below("norm_drift", norm_drift, tol["norm_drift"]));

    if ec.refinements >= 2 {
        let steps0 = tgrid.n - 1;
        let runs = (0..=ec.refinements)
            .map(|i| {
                let steps = steps0 << i;
                let err = cn_final_error(&h, &kind, ep, tgrid.t_min, tgrid.t_max, steps)?;
                Ok(Report::from_scalars(
                    "evolve",
                    [("dt".to_string(), tgrid.span() / steps as f64), ("cn_error".to_string(), err)],
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let table = emit_convergence_table(&runs, "dt", "cn_error")?;
        table.write_csv(&file(out, report, "cn_convergence.csv"))?;
        report.check(Check::within("cn_order", table.slope, 2.0, tol["cn_order"]));
    }
    Ok(())
}

/// Indices of `samples` time slices spread over `(0, n−1]`.
pub(crate) fn sample_slices(n: usize, samples: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (1..=samples).map(|s| (s * (n - 1) + samples / 2) / samples).collect();
    ks.dedup();
    ks
}

/// Worst `|⟨ψ_i, ψ_j⟩|`, `i ≠ j`, over the sampled slices.
pub(crate) fn worst_cross(fields: &[SpaceTimeField], ks: &[usize], rows: &mut Vec<Vec<f64>>, col: usize) -> f64 {
    let dq = fields[0].sgrid.dq();
    let mut worst: f64 = 0.0;
    let mut r = 0;
    for &k in ks {
        for i in 0..fields.len() {
            for j in i + 1..fields.len() {
                let v = inner_product(fields[i].slice(k), fields[j].slice(k), dq).norm();
                worst = worst.max(v);
                if col == 0 {
                    rows.push(vec![fields[i].tgrid.at(k), i as f64, j as f64, v, 0.0]);
                } else {
                    rows[r][col + 3] = v;
                }
                r += 1;
            }
        }
    }
    worst
}

pub(crate) fn orthogonality(cfg: &ExperimentConfig, tol: &Tolerances, out: &Path, report: &mut Report) -> Result<()> {
    let sgrid = cfg.space_grid()?;
    let (kind, mass) = cfg.hamiltonian_kind()?;
    let tgrid = cfg.time_grid()?;
    let oc = cfg.orthogonality.unwrap_or_default();
    if oc.states < 2 {
        return Err(Error::ConfigParse("orthogonality needs states >= 2".into()));
    }
    let h = build_hamiltonian(sgrid, &cfg.potential()?, mass)?;
    let eps = eigensolve(&h, oc.states)?;
    let separable = eps
        .iter()
        .map(|ep| separable_solution(ep, &kind, &tgrid))
        .collect::<Result<Vec<_>>>()?;
    let propagated = separable
        .iter()
        .map(|f| propagate_crank_nicolson(&h, &kind, f.slice(0), &tgrid))
        .collect::<Result<Vec<_>>>()?;
    let ks = sample_slices(tgrid.n, oc.samples);
    let mut rows = Vec::new();
    let sep = worst_cross(&separable, &ks, &mut rows, 0);
    let prop = worst_cross(&propagated, &ks, &mut rows, 1);
    csvio::write_table(
        &file(out, report, "orthogonality.csv"),
        &["t", "i", "j", "separable", "propagated"],
        &rows,
    )?;
    report.scalar("sampled_times", ks.len() as f64);
    report.check(Check::below("separable", sep, tol["separable"]));
    report.check(Check::below("propagated", prop, tol["propagated"]));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::make_analytic_warp;

    #[test]
    fn windows_fit_inside_the_range() {
        let w = make_analytic_warp("exp-rate", &[0.5]).unwrap();
        let g = h_window(&w, 0.0, 80.0, 11).unwrap();
        assert!((w.h(g.t_max) - w.h(g.t_min) - 80.0).abs() < 1e-9);
        assert!(w.h(g.t_min) > -2.0);
        let id = WarpSpec::identity();
        let g = h_window(&id, 0.0, 10.0, 11).unwrap();
        assert!((g.t_min + 5.0).abs() < 1e-12);
    }

    #[test]
    fn slices_cover_the_window() {
        let ks = sample_slices(1001, 50);
        assert_eq!(ks.len(), 50);
        assert_eq!(ks[0], 20);
        assert_eq!(*ks.last().unwrap(), 1000);
    }
}
