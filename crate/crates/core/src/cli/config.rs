//! TOML experiment configs.
//!
//! ```toml
//! seed = 0
//! [warp]
//! family = "chirp"
//! params = [1.0, 0.02]
//! [time]
//! min = -10.0
//! max = 10.0
//! n = 4096
//! [signal]
//! kind = "hermite"
//! order = 2
//! [tolerances]
//! roundtrip = 1e-7
//! ```
//!
//! Relative file paths resolve against the directory of the config file.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::distributions::TestFunction;
use crate::error::{Error, Result};
use crate::grid::{SpaceGrid, SpectrumGrid, TimeGrid};
use crate::schrodinger::{HamiltonianKind, Potential};
use crate::signal::{SampledSignal, SignalSpec};
use crate::transforms::{Flavor, WarpedMethod};
use crate::warp::{make_analytic_warp, make_analytic_warp_unchecked, make_numeric_warp, WarpSpec};

use super::csvio;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub warp: Option<WarpConfig>,
    pub time: Option<GridConfig>,
    pub energy: Option<GridConfig>,
    pub space: Option<GridConfig>,
    pub signal: Option<SignalConfig>,
    pub transform: Option<TransformConfig>,
    pub biorth: Option<BiorthConfig>,
    pub test_function: Option<TestFunctionConfig>,
    pub distribution: Option<DistributionConfig>,
    pub potential: Option<Potential>,
    pub hamiltonian: Option<HamiltonianConfig>,
    pub evolve: Option<EvolveConfig>,
    pub orthogonality: Option<OrthogonalityConfig>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// A catalog family, or sampled `g` read from a two-column `t, g` CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WarpConfig {
    Family {
        family: String,
        #[serde(default)]
        params: Vec<f64>,
        #[serde(default)]
        t0: f64,
        #[serde(default)]
        c0: f64,
        /// Skip the parameter-level monotonicity constraint (additive drives only).
        #[serde(default)]
        unchecked: bool,
    },
    File {
        file: PathBuf,
        t0: Option<f64>,
        #[serde(default)]
        c0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalConfig {
    Gaussian {
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    Hermite {
        order: usize,
    },
    Noise {
        seed: Option<u64>,
        #[serde(default = "three")]
        max_freq: f64,
        #[serde(default = "one")]
        envelope: f64,
        #[serde(default = "six")]
        tones: usize,
    },
    Bump {
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        radius: f64,
    },
    /// Two- or three-column `t, re[, im]` CSV on a uniform grid.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    #[serde(default = "additive")]
    pub flavor: Flavor,
    #[serde(default = "resample")]
    pub method: WarpedMethod,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            flavor: Flavor::Additive,
            method: WarpedMethod::ResampleFft,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiorthConfig {
    /// Widths of the `h` window, in increasing order.
    #[serde(default = "default_widths")]
    pub widths: Vec<f64>,
    /// Width of the Gaussian test function `φ(E)`.
    #[serde(default = "default_phi_width")]
    pub phi_width: f64,
    #[serde(default = "default_probe_energies")]
    pub energies: Vec<f64>,
    /// Preferred centre of the `h` window; moved inside the range of `h` if needed.
    #[serde(default)]
    pub center: f64,
}

impl Default for BiorthConfig {
    fn default() -> Self {
        Self {
            widths: default_widths(),
            phi_width: default_phi_width(),
            energies: default_probe_energies(),
            center: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestFunctionConfig {
    Gaussian {
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
    Hermite {
        order: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Bump {
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        radius: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    /// First truncation `T` of the direct route.
    #[serde(default = "four")]
    pub t_start: f64,
    #[serde(default = "default_t_limit")]
    pub t_limit: f64,
    #[serde(default = "default_direct_tol")]
    pub direct_tol: f64,
    /// Known value of the pairing, checked against the `expected` tolerance.
    pub expected: Option<f64>,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        Self {
            t_start: 4.0,
            t_limit: default_t_limit(),
            direct_tol: default_direct_tol(),
            expected: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindConfig {
    Additive,
    Multiplicative,
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: KindConfig,
    #[serde(default = "one")]
    pub mass: f64,
    /// Additive part `g₂` of the combined kind; `[warp]` supplies `g₁`.
    pub warp2: Option<WarpConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    /// Eigenstate index, 0 = ground state.
    #[serde(default)]
    pub state: usize,
    /// Time slices written to the field CSV.
    #[serde(default = "default_slices")]
    pub slices: usize,
    /// Number of dt-halvings of a Crank–Nicolson convergence study (0 = none).
    #[serde(default)]
    pub refinements: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            state: 0,
            slices: default_slices(),
            refinements: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthogonalityConfig {
    #[serde(default = "four_usize")]
    pub states: usize,
    #[serde(default = "fifty")]
    pub samples: usize,
}

impl Default for OrthogonalityConfig {
    fn default() -> Self {
        Self { states: 4, samples: 50 }
    }
}

fn one() -> f64 {
    1.0
}
fn three() -> f64 {
    3.0
}
fn four() -> f64 {
    4.0
}
fn six() -> usize {
    6
}
fn four_usize() -> usize {
    4
}
fn fifty() -> usize {
    50
}
fn additive() -> Flavor {
    Flavor::Additive
}
fn resample() -> WarpedMethod {
    WarpedMethod::ResampleFft
}
fn default_widths() -> Vec<f64> {
    vec![10.0, 20.0, 40.0, 80.0]
}
fn default_phi_width() -> f64 {
    0.1
}
fn default_probe_energies() -> Vec<f64> {
    vec![0.0, 0.05, -0.12]
}
fn default_t_limit() -> f64 {
    1024.0
}
fn default_direct_tol() -> f64 {
    1e-5
}
fn default_slices() -> usize {
    11
}

fn missing(section: &str) -> Error {
    Error::ConfigParse(format!("missing [{section}] section"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigParse(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn existing(&self, p: &Path) -> Result<PathBuf> {
        let full = self.resolve(p);
        if !full.is_file() {
            return Err(Error::ConfigParse(format!("referenced file {} does not exist", full.display())));
        }
        Ok(full)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        let g = self.time.ok_or_else(|| missing("time"))?;
        TimeGrid::new(g.min, g.max, g.n).map_err(as_config)
    }

    pub fn energy_grid(&self) -> Result<Option<SpectrumGrid>> {
        self.energy
            .map(|g| SpectrumGrid::new(g.min, g.max, g.n).map_err(as_config))
            .transpose()
    }

    pub fn space_grid(&self) -> Result<SpaceGrid> {
        let g = self.space.ok_or_else(|| missing("space"))?;
        SpaceGrid::new(g.min, g.max, g.n).map_err(as_config)
    }

    pub fn warp(&self) -> Result<WarpSpec> {
        self.build_warp(self.warp.as_ref().ok_or_else(|| missing("warp"))?)
    }

    /// Invalid families or parameters are reported as config errors.
    pub fn build_warp(&self, w: &WarpConfig) -> Result<WarpSpec> {
        self.build_warp_inner(w).map_err(|e| match e {
            Error::UnknownFamily(_) | Error::NonMonotoneParameters { .. } | Error::NonPositiveG { .. } => {
                Error::ConfigParse(format!("[warp] {}: {e}", e.code()))
            }
            e => e,
        })
    }

    fn build_warp_inner(&self, w: &WarpConfig) -> Result<WarpSpec> {
        match w {
            WarpConfig::Family {
                family,
                params,
                t0,
                c0,
                unchecked,
            } => {
                let base = if *unchecked {
                    make_analytic_warp_unchecked(family, params)?
                } else {
                    make_analytic_warp(family, params)?
                };
                Ok(if *t0 == 0.0 && *c0 == 0.0 { base } else { base.with_reference(*t0, *c0) })
            }
            WarpConfig::File { file, t0, c0 } => {
                let (grid, g) = csvio::read_rate(&self.existing(file)?)?;
                let t0 = t0.unwrap_or(if grid.t_min <= 0.0 && 0.0 <= grid.t_max { 0.0 } else { grid.t_min });
                make_numeric_warp(grid, &g, t0, *c0)
            }
        }
    }

    pub fn signal(&self, grid: TimeGrid) -> Result<SampledSignal> {
        let spec = match self.signal.as_ref().ok_or_else(|| missing("signal"))? {
            SignalConfig::Gaussian { center, width } => SignalSpec::Gaussian {
                center: *center,
                width: *width,
            },
            SignalConfig::Hermite { order } => SignalSpec::Hermite { order: *order },
            SignalConfig::Noise {
                seed,
                max_freq,
                envelope,
                tones,
            } => SignalSpec::BandLimitedNoise {
                seed: seed.unwrap_or(self.seed),
                max_freq: *max_freq,
                envelope: *envelope,
                tones: *tones,
            },
            SignalConfig::Bump { center, radius } => SignalSpec::Bump {
                center: *center,
                radius: *radius,
            },
            SignalConfig::File { path } => return csvio::read_signal(&self.existing(path)?),
        };
        Ok(spec.sample(grid))
    }

    /// True when the signal comes with its own time grid.
    pub fn signal_from_file(&self) -> bool {
        matches!(self.signal, Some(SignalConfig::File { .. }))
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        let phi = match self.test_function.as_ref().ok_or_else(|| missing("test_function"))? {
            TestFunctionConfig::Gaussian { center, width } => TestFunction::Gaussian {
                center: *center,
                width: *width,
            },
            TestFunctionConfig::Hermite { order, scale } => TestFunction::Hermite {
                order: *order,
                scale: *scale,
            },
            TestFunctionConfig::Bump { center, radius } => TestFunction::Bump {
                center: *center,
                radius: *radius,
            },
        };
        phi.validate().map_err(as_config)?;
        Ok(phi)
    }

    pub fn potential(&self) -> Result<Potential> {
        self.potential.clone().ok_or_else(|| missing("potential"))
    }

    pub fn hamiltonian_kind(&self) -> Result<(HamiltonianKind, f64)> {
        let hc = self.hamiltonian.as_ref().ok_or_else(|| missing("hamiltonian"))?;
        let w = self.warp()?;
        let kind = match hc.kind {
            KindConfig::Additive => HamiltonianKind::Additive(w),
            KindConfig::Multiplicative => HamiltonianKind::Multiplicative(w),
            KindConfig::Combined => {
                let w2 = match &hc.warp2 {
                    Some(c) => self.build_warp(c)?,
                    None => w.clone(),
                };
                HamiltonianKind::Combined(w, w2)
            }
        };
        Ok((kind, hc.mass))
    }

    /// Every configured tolerance must name a check of the subcommand; the result holds
    /// the defaults overridden by the config.
    pub fn tolerances(&self, known: &[(&str, f64)]) -> Result<BTreeMap<String, f64>> {
        let mut out: BTreeMap<String, f64> = known.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for (k, v) in &self.tolerances {
            match out.get_mut(k) {
                Some(slot) if v.is_finite() && *v >= 0.0 => *slot = *v,
                Some(_) => return Err(Error::ConfigParse(format!("tolerance `{k}` = {v} must be finite and >= 0"))),
                None => {
                    let names: Vec<&str> = known.iter().map(|k| k.0).collect();
                    return Err(Error::ConfigParse(format!(
                        "unknown tolerance `{k}`; this subcommand checks {names:?}"
                    )));
                }
            }
        }
        Ok(out)
    }
}

/// Grid and parameter errors found while reading a config are config errors.
fn as_config(e: Error) -> Error {
    match e {
        Error::ConfigParse(_) => e,
        other => Error::ConfigParse(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_transform_config() {
        let cfg = ExperimentConfig::parse(
            r#"
            seed = 7
            [warp]
            family = "chirp"
            params = [1.0, 0.02]
            [time]
            min = -10.0
            max = 10.0
            n = 256
            [signal]
            kind = "noise"
            [transform]
            flavor = "multiplicative"
            method = "direct-quadrature"
            [tolerances]
            roundtrip = 1e-9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.warp().unwrap().describe(), "chirp[1.0, 0.02]");
        let f = cfg.signal(cfg.time_grid().unwrap()).unwrap();
        assert_eq!(f.values.len(), 256);
        assert_eq!(cfg.transform.unwrap().method, WarpedMethod::DirectQuadrature);
        let tol = cfg.tolerances(&[("roundtrip", 1e-7), ("reduction", 1e-6)]).unwrap();
        assert_eq!(tol["roundtrip"], 1e-9);
        assert_eq!(tol["reduction"], 1e-6);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(ExperimentConfig::parse("bogus = 1"), Err(Error::ConfigParse(_))));
        assert!(matches!(
            ExperimentConfig::parse("[time]\nmin = 1.0\nmax = 0.0\nn = 10").unwrap().time_grid(),
            Err(Error::ConfigParse(_))
        ));
        let cfg = ExperimentConfig::parse("[tolerances]\nfoo = 1e-3").unwrap();
        assert!(matches!(cfg.tolerances(&[("bar", 1.0)]), Err(Error::ConfigParse(_))));
        let cfg = ExperimentConfig::parse("[warp]\nfile = \"nowhere.csv\"").unwrap();
        assert!(matches!(cfg.warp(), Err(Error::ConfigParse(_))));
        let cfg = ExperimentConfig::parse("[warp]\nfamily = \"spiral\"").unwrap();
        match cfg.warp() {
            Err(Error::ConfigParse(m)) => assert!(m.contains("warp.unknown_family"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn potential_and_kind() {
        let cfg = ExperimentConfig::parse(
            r#"
            [warp]
            family = "exp-rate"
            params = [0.5]
            [potential]
            kind = "harmonic"
            k = 1.0
            [hamiltonian]
            kind = "combined"
            warp2 = { family = "sin-perturbed", params = [0.3, 1.0] }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.potential().unwrap(), Potential::Harmonic { k: 1.0 });
        let (kind, mass) = cfg.hamiltonian_kind().unwrap();
        assert_eq!(mass, 1.0);
        assert!(kind.describe().contains("sin-perturbed"));
    }
}
