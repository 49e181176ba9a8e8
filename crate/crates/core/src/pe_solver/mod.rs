//! Crank-Nicolson / Adams-Bashforth-2 time stepping of the primitive equations.

mod config;
mod init;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::besov::{besov_norm, BesovSpec};
use crate::error::{invalid, PeError, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::hydrostatic::{diagnose_w, project_h, DimMode, HydrostaticState};
use crate::io::write_csv;
use crate::product::{Dealias, ProductSpace};
use crate::snapshot;

pub use config::{RunConfig, SolverConfig, UniquenessSettings, Variant};
pub use init::InitialCondition;

/// `-(u . grad) v` projected onto the hydrostatic space.
pub fn nonlinear_rhs(state: &HydrostaticState, space: &ProductSpace) -> Result<SpectralField> {
    let v = state.v();
    let grid = v.grid();
    if grid != space.grid() {
        return invalid("product space built for a different grid");
    }
    let w = diagnose_w(v)?;
    let h = grid.horizontal_axes();
    let za = grid.vertical_axis();
    // advecting velocity: (v^1, v^2, w) in 3D, (v^1, w) in 2D
    let mut adv: Vec<(SpectralField, usize)> = vec![(v.select(0), h[0])];
    if state.mode() == DimMode::ThreeD {
        adv.push((v.select(1), h[1]));
    }
    adv.push((w, za));
    let adv_phys: Vec<Vec<f64>> = adv
        .par_iter()
        .map(|(f, _)| space.to_physical(f.component(0)))
        .collect();
    let comps: Vec<Vec<num_complex::Complex64>> = (0..2)
        .into_par_iter()
        .map(|c| {
            let vc = v.select(c);
            let mut acc = vec![0.0; space.physical_len()];
            for ((_, axis), a) in adv.iter().zip(&adv_phys) {
                let d = space.to_physical(vc.derivative(*axis).component(0));
                for ((s, x), y) in acc.iter_mut().zip(a).zip(&d) {
                    *s -= x * y;
                }
            }
            space.to_spectral(&acc)
        })
        .collect();
    project_h(&SpectralField::from_coeffs(grid.clone(), comps)?)
}

/// `|xi|^2` per storage slot.
fn laplacian_symbol(grid: &TorusGrid) -> Vec<f64> {
    let nd = grid.n_dims();
    let freqs: Vec<Vec<f64>> = (0..nd).map(|a| grid.frequencies(a)).collect();
    let mut idx = vec![0usize; nd];
    (0..grid.len())
        .map(|flat| {
            grid.unravel(flat, &mut idx);
            (0..nd).map(|a| freqs[a][idx[a]].powi(2)).sum()
        })
        .collect()
}

/// `1/2 |v|^2_{L^2}`.
pub fn energy(v: &SpectralField) -> f64 {
    0.5 * v.inner(v)
}

/// `|grad v|^2_{L^2}` evaluated spectrally.
pub fn dissipation(v: &SpectralField) -> f64 {
    let lap = laplacian_symbol(v.grid());
    let vol = v.grid().volume();
    v.coeffs()
        .iter()
        .map(|c| {
            c.iter()
                .zip(&lap)
                .map(|(a, l)| a.norm_sqr() * l)
                .sum::<f64>()
        })
        .sum::<f64>()
        * vol
}

/// Fixed-step CN-AB2 integrator holding the AB2 history.
#[derive(Debug, Clone)]
pub struct Integrator {
    space: ProductSpace,
    lap: Vec<f64>,
    nu: f64,
    dt: f64,
    advection: bool,
    prev: Option<SpectralField>,
}

impl Integrator {
    pub fn new(
        grid: &TorusGrid,
        dt: f64,
        nu: f64,
        dealias: Dealias,
        advection: bool,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("dt must be positive, got {dt}"));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return invalid(format!("nu must be non-negative, got {nu}"));
        }
        Ok(Self {
            space: ProductSpace::new(grid, dealias),
            lap: laplacian_symbol(grid),
            nu,
            dt,
            advection,
            prev: None,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    /// Forgets the AB2 history; the next step is explicit Euler for advection.
    pub fn reset(&mut self) {
        self.prev = None;
    }

    pub fn step(&mut self, state: &HydrostaticState) -> Result<HydrostaticState> {
        let v = state.v();
        let dt = self.dt;
        let explicit = if self.advection {
            let n = nonlinear_rhs(state, &self.space)?;
            let e = match &self.prev {
                Some(p) => n.scale(1.5).axpy(-0.5, p),
                None => n.clone(),
            };
            self.prev = Some(n);
            Some(e)
        } else {
            None
        };
        let half = 0.5 * self.nu * dt;
        let comps: Vec<Vec<num_complex::Complex64>> = (0..v.components())
            .map(|c| {
                let vc = v.component(c);
                let ec = explicit.as_ref().map(|e| e.component(c));
                (0..vc.len())
                    .map(|i| {
                        let a = half * self.lap[i];
                        let mut rhs = vc[i] * (1.0 - a);
                        if let Some(e) = ec {
                            rhs += e[i] * dt;
                        }
                        rhs / (1.0 + a)
                    })
                    .collect()
            })
            .collect();
        let next = project_h(&SpectralField::from_coeffs(v.grid().clone(), comps)?)?;
        Ok(HydrostaticState::trusted(next, state.mode()))
    }
}

/// Time series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub specs: Vec<BesovSpec>,
    /// One trace per entry of `specs`.
    pub besov: Vec<Vec<f64>>,
    pub snapshots: Vec<PathBuf>,
    /// Viscosity of the run, which weights the dissipation in the energy law.
    pub nu: f64,
}

impl RunSeries {
    fn new(specs: &[BesovSpec], nu: f64) -> Self {
        Self {
            times: Vec::new(),
            energy: Vec::new(),
            dissipation: Vec::new(),
            specs: specs.to_vec(),
            besov: vec![Vec::new(); specs.len()],
            snapshots: Vec::new(),
            nu,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes `time, energy, dissipation, B...` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut header: Vec<String> = vec!["time".into(), "energy".into(), "dissipation".into()];
        header.extend(self.specs.iter().map(|s| s.column_name()));
        let rows: Vec<Vec<f64>> = (0..self.len())
            .map(|i| {
                let mut r = vec![self.times[i], self.energy[i], self.dissipation[i]];
                r.extend(self.besov.iter().map(|b| b[i]));
                r
            })
            .collect();
        write_csv(path, &header, &rows)
    }
}

/// Number of steps `t_end / dt`, which must be (numerically) an integer.
pub(crate) fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(t_end >= dt) {
        return invalid(format!("t_end = {t_end} must be at least dt = {dt}"));
    }
    let n = (t_end / dt).round();
    if (n * dt - t_end).abs() > 1e-9 * t_end {
        return invalid(format!("t_end = {t_end} is not a multiple of dt = {dt}"));
    }
    Ok(n as usize)
}

fn cfl_advisory(v: &SpectralField, dt: f64) {
    let g = v.grid();
    let umax: f64 = v
        .coeffs()
        .iter()
        .map(|c| c.iter().map(|a| a.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let dx = (0..g.n_dims())
        .map(|a| 2.0 * std::f64::consts::PI * g.lambda()[a] / g.sizes()[a] as f64)
        .fold(f64::INFINITY, f64::min);
    if umax * dt > 0.5 * dx {
        log::warn!(
            "dt = {dt} exceeds the advective CFL advisory (|u| <= {umax:.3e}, dx = {dx:.3e})"
        );
    }
}

fn blow_up(step: usize, time: f64, reason: &str) -> PeError {
    PeError::BlowUp {
        step,
        time,
        reason: reason.to_string(),
    }
}

/// Runs the configured trajectory from the projection of `v0`, recording
/// diagnostics every `snapshot_stride` steps (and at the final step).
pub fn simulate(config: &SolverConfig, v0: &SpectralField) -> Result<RunSeries> {
    simulate_observed(config, v0, |_, _, _| Ok(()))
}

/// [`simulate`] with a callback invoked at every recorded state.
pub fn simulate_observed(
    config: &SolverConfig,
    v0: &SpectralField,
    mut observe: impl FnMut(usize, f64, &SpectralField) -> Result<()>,
) -> Result<RunSeries> {
    config.validate()?;
    if v0.grid() != &config.grid {
        return invalid("initial field is not on the configured grid");
    }
    let mut state = HydrostaticState::projected(&v0.without_nyquist())?;
    cfl_advisory(state.v(), config.dt);
    let steps = step_count(config.dt, config.t_end)?;
    let mut integ = Integrator::new(
        &config.grid,
        config.dt,
        config.nu,
        config.dealias,
        config.advection,
    )?;
    let mut series = RunSeries::new(&config.record, config.nu);
    if let Some(dir) = &config.snapshot_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut record = |n: usize, v: &SpectralField, series: &mut RunSeries| -> Result<()> {
        let t = n as f64 * config.dt;
        series.times.push(t);
        series.energy.push(energy(v));
        series.dissipation.push(dissipation(v));
        for (trace, spec) in series.besov.iter_mut().zip(&config.record) {
            trace.push(besov_norm(v, spec)?);
        }
        if let Some(dir) = &config.snapshot_dir {
            let path = dir.join(format!("snap_{n:06}.tbsf"));
            snapshot::save(&path, v)?;
            series.snapshots.push(path);
        }
        observe(n, t, v)
    };
    record(0, state.v(), &mut series)?;
    for n in 1..=steps {
        let next = integ.step(&state)?;
        let e = energy(next.v());
        if !next.v().is_finite() || !e.is_finite() || e > 1e300 {
            if let Some(dir) = &config.snapshot_dir {
                snapshot::save(&dir.join("last_valid.tbsf"), state.v())?;
            }
            return Err(blow_up(n, n as f64 * config.dt, "non-finite state"));
        }
        state = next;
        if n % config.snapshot_stride == 0 || n == steps {
            record(n, state.v(), &mut series)?;
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{forward_transform, PhysicalField};
    use crate::rng::random_field;

    fn cosine_state(g: &TorusGrid) -> SpectralField {
        let a = forward_transform(&PhysicalField::from_fn(g, |x| {
            x[0].cos() * x[g.n_dims() - 1].cos()
        }))
        .unwrap();
        SpectralField::stack(&[a, SpectralField::zeros(g, 1)]).unwrap()
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = TorusGrid::plane(16, 16, 1.0).unwrap();
        let s = HydrostaticState::projected(&SpectralField::zeros(&g, 2)).unwrap();
        let space = ProductSpace::new(&g, Dealias::Pad);
        assert_eq!(nonlinear_rhs(&s, &space).unwrap().max_abs_coeff(), 0.0);
        let mut integ = Integrator::new(&g, 1e-2, 1.0, Dealias::Pad, true).unwrap();
        let mut st = s;
        for _ in 0..5 {
            st = integ.step(&st).unwrap();
        }
        assert_eq!(st.v().max_abs_coeff(), 0.0);
    }

    #[test]
    fn skew_symmetry_and_parity() {
        for g in [
            TorusGrid::cube(8, 8, 8, 1.0).unwrap(),
            TorusGrid::plane(32, 16, 1.0).unwrap(),
        ] {
            let s = HydrostaticState::projected(&random_field(&g, 2, 3, 8)).unwrap();
            let n = nonlinear_rhs(&s, &ProductSpace::new(&g, Dealias::Pad)).unwrap();
            assert!(n.inner(s.v()).abs() < 1e-11);
            let r = crate::hydrostatic::check_in_h(&n, 1e-12).unwrap();
            assert!(r.parity_residual <= 1e-12);
        }
    }

    #[test]
    fn heat_decay_of_cosine() {
        let g = TorusGrid::plane(16, 16, 1.0).unwrap();
        let v0 = cosine_state(&g);
        let cfg = SolverConfig {
            dt: 1e-3,
            t_end: 1.0,
            advection: false,
            snapshot_stride: 100,
            ..SolverConfig::new(g.clone())
        };
        let s = simulate(&cfg, &v0).unwrap();
        assert_eq!(s.len(), 11);
        for (t, e) in s.times.iter().zip(&s.energy) {
            let exact = (-4.0 * t).exp() * s.energy[0];
            assert!((e - exact).abs() <= 1e-5 * exact);
        }
        // single step keeps the state hydrostatic
        let mut integ = Integrator::new(&g, 1e-3, 1.0, Dealias::Pad, true).unwrap();
        let st = HydrostaticState::projected(&random_field(&g, 2, 4, 3)).unwrap();
        let next = integ.step(&st).unwrap();
        assert!(
            crate::hydrostatic::check_in_h(next.v(), 1e-12)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn step_count_checks() {
        assert_eq!(step_count(1e-3, 1.0).unwrap(), 1000);
        assert!(step_count(0.3, 1.0).is_err());
        assert!(step_count(1.0, 0.5).is_err());
    }
}
