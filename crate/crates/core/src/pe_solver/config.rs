//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use super::InitialCondition;
use crate::besov::BesovSpec;
use crate::error::{invalid, PeError, Result};
use crate::grid::TorusGrid;
use crate::product::Dealias;

/// Time-stepping parameters of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: TorusGrid,
    pub dt: f64,
    pub t_end: f64,
    pub nu: f64,
    pub dealias: Dealias,
    /// Disables the nonlinear term when false.
    pub advection: bool,
    pub snapshot_stride: usize,
    pub record: Vec<BesovSpec>,
    /// TBSF snapshots are written here at every recorded step when set.
    pub snapshot_dir: Option<PathBuf>,
}

impl SolverConfig {
    pub fn new(grid: TorusGrid) -> Self {
        Self {
            grid,
            dt: 1e-3,
            t_end: 1.0,
            nu: 1.0,
            dealias: Dealias::Pad,
            advection: true,
            snapshot_stride: 1,
            record: Vec::new(),
            snapshot_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= self.dt) {
            return invalid(format!(
                "t_end = {} must be at least dt = {}",
                self.t_end, self.dt
            ));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return invalid(format!("nu must be non-negative, got {}", self.nu));
        }
        if self.snapshot_stride == 0 {
            return invalid("snapshot_stride must be at least 1");
        }
        for s in &self.record {
            s.validate()?;
        }
        Ok(())
    }
}

/// Which pair of trajectories the uniqueness experiment compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Identical,
    /// Second run switches between padding and 2/3 truncation.
    DealiasSwap,
    /// Second run uses `dt / 2`.
    HalfDt,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "identical" => Some(Variant::Identical),
            "dealias" => Some(Variant::DealiasSwap),
            "half-dt" => Some(Variant::HalfDt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Identical => "identical",
            Variant::DealiasSwap => "dealias",
            Variant::HalfDt => "half-dt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessSettings {
    pub beta: f64,
    pub p: f64,
    pub gamma: f64,
    /// `L^2` size of the initial perturbation of the second run.
    pub delta: f64,
    pub perturbation_seed: u64,
    pub variant: Variant,
}

impl Default for UniquenessSettings {
    fn default() -> Self {
        Self {
            beta: 4.0,
            p: 4.0,
            gamma: 4.0,
            delta: 0.0,
            perturbation_seed: 99,
            variant: Variant::Identical,
        }
    }
}

/// Everything a config file can specify.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub init: InitialCondition,
    pub uniqueness: UniquenessSettings,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| PeError::InvalidInput(format!("{key}: cannot parse {v:?}")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => invalid(format!("{key}: expected a boolean, got {v:?}")),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut dims = 2usize;
        let mut sizes: Vec<usize> = vec![64];
        let mut lambda = 1.0;
        let mut solver = SolverConfig::new(TorusGrid::plane(4, 4, 1.0)?);
        let mut uniq = UniquenessSettings::default();
        let (mut kind, mut seed, mut kmax, mut decay, mut amplitude) =
            ("smooth".to_string(), 1u64, 4usize, 1.0f64, 0.3f64);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                PeError::InvalidInput(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "grid.dims" => dims = num(k, v)?,
                "grid.n" => {
                    sizes = v
                        .split(',')
                        .map(|x| num(k, x.trim()))
                        .collect::<Result<_>>()?
                }
                "grid.lambda" => lambda = num(k, v)?,
                "dt" => solver.dt = num(k, v)?,
                "t_end" => solver.t_end = num(k, v)?,
                "nu" => solver.nu = num(k, v)?,
                "dealias" => {
                    solver.dealias = Dealias::parse(v).ok_or_else(|| {
                        PeError::InvalidInput(format!("dealias: unknown mode {v:?}"))
                    })?
                }
                "advection" => solver.advection = boolean(k, v)?,
                "snapshot_stride" => solver.snapshot_stride = num(k, v)?,
                "snapshot_dir" => solver.snapshot_dir = Some(PathBuf::from(v)),
                "record" => {
                    solver.record = v
                        .split(';')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "init.kind" => kind = v.to_string(),
                "init.seed" => seed = num(k, v)?,
                "init.kmax" => kmax = num(k, v)?,
                "init.decay" => decay = num(k, v)?,
                "init.amplitude" => amplitude = num(k, v)?,
                "serrin.beta" => uniq.beta = num(k, v)?,
                "serrin.p" => uniq.p = num(k, v)?,
                "serrin.gamma" => uniq.gamma = num(k, v)?,
                "uniqueness.delta" => uniq.delta = num(k, v)?,
                "uniqueness.seed" => uniq.perturbation_seed = num(k, v)?,
                "uniqueness.variant" => {
                    uniq.variant = Variant::parse(v)
                        .ok_or_else(|| PeError::InvalidInput(format!("unknown variant {v:?}")))?
                }
                _ => return invalid(format!("line {}: unknown key {k:?}", lineno + 1)),
            }
        }
        if !(dims == 2 || dims == 3) {
            return invalid(format!("grid.dims must be 2 or 3, got {dims}"));
        }
        let sizes = match sizes.len() {
            1 => vec![sizes[0]; dims],
            n if n == dims => sizes,
            n => return invalid(format!("grid.n lists {n} sizes for a {dims}D grid")),
        };
        solver.grid = if dims == 2 {
            TorusGrid::plane(sizes[0], sizes[1], lambda)?
        } else {
            TorusGrid::cube(sizes[0], sizes[1], sizes[2], lambda)?
        };
        let init = match kind.as_str() {
            "cosine" => InitialCondition::Cosine { amplitude },
            "random" => InitialCondition::Random {
                seed,
                kmax,
                amplitude,
            },
            "smooth" => InitialCondition::Smooth {
                seed,
                decay,
                amplitude,
            },
            other => return invalid(format!("init.kind: unknown kind {other:?}")),
        };
        solver.validate()?;
        Ok(Self {
            solver,
            init,
            uniqueness: uniq,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
