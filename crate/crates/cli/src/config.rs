//! Run configuration: TOML sections for the lattice, the background, the
//! nonlinearity, the initial perturbation, the solver and the outputs,
//! with every cross-field constraint validated at parse time.

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use gpfield_core::background::{bump_field, Background};
use gpfield_core::field::Field;
use gpfield_core::grid::Grid;
use gpfield_core::nonlinearity::Nonlinearity;
use gpfield_core::norms::{h1_norm, is_admissible, AdmissiblePair};
use gpfield_core::rng::{seeded_random_field, SpectrumKind};
use gpfield_core::solver::{Scheme, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub background: BackgroundSection,
    pub nonlinearity: NonlinearitySection,
    #[serde(default)]
    pub perturbation: PerturbationSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strichartz: Option<StrichartzSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub n: usize,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "type")]
pub enum BackgroundSection {
    Constant {
        rho0: f64,
    },
    BumpModulated {
        rho0: f64,
        amplitude: f64,
        width: f64,
    },
    KinkPair {
        rho0: f64,
        separation: f64,
    },
}

impl BackgroundSection {
    pub fn rho0(&self) -> f64 {
        match *self {
            BackgroundSection::Constant { rho0 } => rho0,
            BackgroundSection::BumpModulated { rho0, .. } => rho0,
            BackgroundSection::KinkPair { rho0, .. } => rho0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "kind")]
pub enum NonlinearitySection {
    GrossPitaevskii {
        rho0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha2: Option<f64>,
    },
    CubicQuintic {
        rho0: f64,
        a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha2: Option<f64>,
    },
    UserPolynomial {
        rho0: f64,
        coeffs: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha2: Option<f64>,
    },
}

impl NonlinearitySection {
    pub fn rho0(&self) -> f64 {
        match *self {
            NonlinearitySection::GrossPitaevskii { rho0, .. } => rho0,
            NonlinearitySection::CubicQuintic { rho0, .. } => rho0,
            NonlinearitySection::UserPolynomial { rho0, .. } => rho0,
        }
    }

    pub fn alpha1(&self) -> Option<f64> {
        match *self {
            NonlinearitySection::GrossPitaevskii { alpha1, .. } => alpha1.or(Some(2.0)),
            NonlinearitySection::CubicQuintic { alpha1, .. } => alpha1.or(Some(3.0)),
            NonlinearitySection::UserPolynomial { alpha1, .. } => alpha1,
        }
    }

    pub fn alpha2(&self) -> Option<f64> {
        match *self {
            NonlinearitySection::GrossPitaevskii { alpha2, .. } => alpha2,
            NonlinearitySection::CubicQuintic { alpha2, .. } => alpha2,
            NonlinearitySection::UserPolynomial { alpha2, .. } => alpha2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "type")]
pub enum PerturbationSection {
    #[default]
    Zero,
    Bump {
        h1_norm: f64,
        width: f64,
    },
    Random {
        h1_norm: f64,
        spectrum: SpectrumKind,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_picard_max_iter")]
    pub picard_max_iter: usize,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    /// 0 selects an automatic stride of about a tenth of the run.
    #[serde(default)]
    pub snapshot_stride: usize,
}

fn default_picard_max_iter() -> usize {
    40
}

fn default_picard_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Snapshots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_output_dir")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_output_dir() -> String {
    "out".to_string()
}

fn default_formats() -> Vec<OutputFormat> {
    vec![
        OutputFormat::Csv,
        OutputFormat::Json,
        OutputFormat::Snapshots,
    ]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_output_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzSection {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub steps: usize,
    pub num_fields: usize,
    pub spectrum: SpectrumKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub dt_list: Vec<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every cross-field constraint, reported with section.key coordinates.
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(1..=3).contains(&self.grid.dim) {
            bail!(
                "grid.dim: simulation dimensions are 1, 2 or 3, got {}",
                self.grid.dim
            );
        }
        if self.grid.n < 2 || !self.grid.n.is_multiple_of(2) {
            bail!(
                "grid.n: points per axis must be even and >= 2, got {}",
                self.grid.n
            );
        }
        if !(self.grid.l > 0.0) {
            bail!("grid.l: half length must be positive, got {}", self.grid.l);
        }
        if self.background.rho0() != self.nonlinearity.rho0() {
            bail!(
                "background.rho0 = {} and nonlinearity.rho0 = {} must agree",
                self.background.rho0(),
                self.nonlinearity.rho0()
            );
        }
        if let Some(alpha1) = self.nonlinearity.alpha1() {
            if alpha1 < 1.0 {
                bail!("nonlinearity.alpha1: must be >= 1, got {alpha1}");
            }
            if let Some(alpha2) = self.nonlinearity.alpha2() {
                if alpha1 - alpha2 > 0.5 {
                    bail!(
                        "nonlinearity.alpha2: compatibility requires alpha1 - alpha2 <= 1/2, \
                         got alpha1 = {alpha1}, alpha2 = {alpha2}"
                    );
                }
            }
        } else if self.nonlinearity.alpha2().is_some() {
            bail!("nonlinearity.alpha2: requires alpha1 to be set as well");
        }
        match &self.perturbation {
            PerturbationSection::Zero => {}
            PerturbationSection::Bump { h1_norm, width } => {
                if !(*h1_norm >= 0.0) {
                    bail!("perturbation.h1_norm: must be nonnegative, got {h1_norm}");
                }
                if !(*width > 0.0) || *width >= self.grid.l {
                    bail!("perturbation.width: must satisfy 0 < width < grid.l, got {width}");
                }
            }
            PerturbationSection::Random { h1_norm, .. } => {
                if !(*h1_norm >= 0.0) {
                    bail!("perturbation.h1_norm: must be nonnegative, got {h1_norm}");
                }
            }
        }
        let steps = self
            .raw_solver_config()
            .steps()
            .map_err(|e| anyhow::anyhow!("solver.dt/t_final: {e}"))?;
        if self.solver.snapshot_stride != 0 && steps % self.solver.snapshot_stride != 0 {
            bail!(
                "solver.snapshot_stride: {} does not divide the {} steps",
                self.solver.snapshot_stride,
                steps
            );
        }
        if let Some(s) = &self.strichartz {
            if !is_admissible(s.p, s.q, self.grid.dim) {
                bail!(
                    "strichartz.p/q: ({}, {}) is not admissible in dimension {}",
                    s.p,
                    s.q,
                    self.grid.dim
                );
            }
            if s.steps == 0 || s.num_fields == 0 || !(s.t > 0.0) {
                bail!("strichartz: t must be positive and steps/num_fields nonzero");
            }
        }
        if let Some(c) = &self.convergence {
            if c.dt_list.len() < 3 {
                bail!(
                    "convergence.dt_list: need at least 3 entries, got {}",
                    c.dt_list.len()
                );
            }
        }
        Ok(())
    }

    pub fn build_grid(&self) -> anyhow::Result<Arc<Grid>> {
        Ok(Grid::new(self.grid.dim, self.grid.n, self.grid.l)?)
    }

    pub fn build_background(&self, grid: &Arc<Grid>) -> anyhow::Result<Background> {
        let bg = match self.background {
            BackgroundSection::Constant { rho0 } => Background::constant(grid, rho0)?,
            BackgroundSection::BumpModulated {
                rho0,
                amplitude,
                width,
            } => Background::bump_modulated(grid, rho0, amplitude, width)?,
            BackgroundSection::KinkPair { rho0, separation } => {
                Background::kink_pair(grid, rho0, separation)?
            }
        };
        Ok(bg)
    }

    pub fn build_nonlinearity(&self) -> anyhow::Result<Nonlinearity> {
        let nl = match &self.nonlinearity {
            NonlinearitySection::GrossPitaevskii { rho0, .. } => {
                Nonlinearity::gross_pitaevskii(*rho0)?
            }
            NonlinearitySection::CubicQuintic { rho0, a, .. } => {
                Nonlinearity::cubic_quintic(*rho0, *a)?
            }
            NonlinearitySection::UserPolynomial {
                rho0,
                coeffs,
                alpha1,
                ..
            } => Nonlinearity::polynomial(*rho0, coeffs.clone(), *alpha1)?,
        };
        Ok(nl)
    }

    pub fn build_perturbation(&self, grid: &Arc<Grid>, seed: u64) -> anyhow::Result<Field> {
        let w0 = match &self.perturbation {
            PerturbationSection::Zero => Field::zeros(grid),
            PerturbationSection::Bump { h1_norm, width } => {
                let b = bump_field(grid, *width);
                let n = h1_norm_nonzero(&b)?;
                b.scale(Complex64::new(h1_norm / n, 0.0))
            }
            PerturbationSection::Random { h1_norm, spectrum } => {
                let f = seeded_random_field(grid, seed, *spectrum);
                let n = h1_norm_nonzero(&f)?;
                f.scale(Complex64::new(h1_norm / n, 0.0))
            }
        };
        Ok(w0)
    }

    fn raw_solver_config(&self) -> SolverConfig {
        SolverConfig {
            scheme: self.solver.scheme,
            dt: self.solver.dt,
            t_final: self.solver.t_final,
            picard_max_iter: self.solver.picard_max_iter,
            picard_tol: self.solver.picard_tol,
            snapshot_stride: self.solver.snapshot_stride,
        }
    }

    pub fn solver_config(&self) -> anyhow::Result<SolverConfig> {
        let mut cfg = self.raw_solver_config();
        if cfg.snapshot_stride == 0 {
            let steps = cfg
                .steps()
                .map_err(|e| anyhow::anyhow!("solver.dt/t_final: {e}"))?;
            cfg.snapshot_stride = auto_stride(steps);
        }
        Ok(cfg)
    }

    pub fn admissible_pair(&self) -> anyhow::Result<AdmissiblePair> {
        if let Some(s) = &self.strichartz {
            Ok(AdmissiblePair::new(s.p, s.q, self.grid.dim)?)
        } else {
            Ok(AdmissiblePair::for_dimension(self.grid.dim)?)
        }
    }
}

fn h1_norm_nonzero(f: &Field) -> anyhow::Result<f64> {
    let n = h1_norm(f);
    if n == 0.0 {
        bail!("perturbation profile is identically zero and cannot be normalized");
    }
    Ok(n)
}

/// Largest divisor of `steps` not exceeding about a tenth of the run, so
/// roughly eleven uniformly spaced snapshots (including both ends) are kept.
pub fn auto_stride(steps: usize) -> usize {
    let target = (steps / 10).max(1);
    (1..=target)
        .rev()
        .find(|&d| steps.is_multiple_of(d))
        .unwrap_or(1)
}
