//! Two-trajectory uniqueness experiment with a fitted Gronwall envelope.

use std::path::Path;

use crate::besov::{besov_norm, validate_exponents, AxisName, BesovSpec, InnerNorm};
use crate::error::{invalid, PeError, Result};
use crate::field::SpectralField;
use crate::hydrostatic::{project_h, HydrostaticState};
use crate::io::write_csv;
use crate::pe_solver::{step_count, Integrator, SolverConfig, UniquenessSettings, Variant};
use crate::product::Dealias;
use crate::rng::random_field_with;

const EPS: f64 = 1e-300;

/// `lhs = |v_d|^2` against `exp(C G(t)) |v_d(0)|^2`, with
/// `G(t) = int_0^t |v_1|^beta_{B^{-1/p}_{p,inf,z} L^inf_H} + |v_1|^gamma_{B^{2/gamma}_{2,2,z} L^inf_H}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    /// `G(t)`.
    pub integral: Vec<f64>,
    pub envelope: Vec<f64>,
    /// Smallest `C >= 0` for which the envelope dominates.
    pub c: f64,
    pub dominated: bool,
    /// `|v_d(T)| / |v_d(0)|`; infinite when only `v_d(0)` vanishes.
    pub terminal_ratio: f64,
    /// `|v_d(T)| / |v_1(0)|`.
    pub terminal_relative: f64,
}

impl GronwallReport {
    fn fit(times: Vec<f64>, lhs: Vec<f64>, integral: Vec<f64>, v0_norm: f64) -> Self {
        let l0 = lhs[0];
        let mut c: f64 = 0.0;
        if l0 > 0.0 {
            for (l, g) in lhs.iter().zip(&integral) {
                if *l > l0 && *g > 0.0 {
                    c = c.max((l / l0).ln() / g);
                }
            }
        }
        let envelope: Vec<f64> = integral.iter().map(|g| (c * g).exp() * l0).collect();
        let dominated = lhs
            .iter()
            .zip(&envelope)
            .all(|(l, e)| *l <= e * (1.0 + 1e-12));
        let terminal = lhs.last().copied().unwrap_or(0.0).sqrt();
        let terminal_ratio = match (l0 > 0.0, terminal > 0.0) {
            (true, _) => terminal / l0.sqrt(),
            (false, false) => 0.0,
            (false, true) => f64::INFINITY,
        };
        Self {
            terminal_ratio,
            terminal_relative: terminal / (v0_norm + EPS),
            times,
            lhs,
            integral,
            envelope,
            c: if l0 > 0.0 { c } else { f64::NAN },
            dominated,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let header: Vec<String> = ["t", "lhs", "envelope", "C"].map(String::from).to_vec();
        let rows: Vec<Vec<f64>> = (0..self.times.len())
            .map(|i| vec![self.times[i], self.lhs[i], self.envelope[i], self.c])
            .collect();
        write_csv(path, &header, &rows)
    }
}

/// Unit-`L^2` hydrostatic perturbation used by the experiment.
pub fn perturbation(v0: &SpectralField, seed: u64) -> Result<SpectralField> {
    let raw = random_field_with(v0.grid(), 2, seed, |k| {
        (-(k.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>())).exp()
    });
    let p = project_h(&raw.without_nyquist())?;
    let n = p.l2_norm();
    if n == 0.0 {
        return invalid("degenerate perturbation");
    }
    Ok(p.scale(1.0 / n))
}

fn other(d: Dealias) -> Dealias {
    match d {
        Dealias::Pad => Dealias::Truncate,
        Dealias::Truncate => Dealias::Pad,
    }
}

/// Runs `v_1` from `v0` under `config` and `v_2` from `v0 + delta p` under the
/// variant solver, recording `|v_1 - v_2|^2` every `snapshot_stride` steps.
pub fn uniqueness_experiment(
    config: &SolverConfig,
    v0: &SpectralField,
    settings: &UniquenessSettings,
) -> Result<GronwallReport> {
    let ex = validate_exponents(settings.beta, settings.p, settings.gamma)?;
    config.validate()?;
    if !(settings.delta >= 0.0 && settings.delta.is_finite()) {
        return invalid(format!(
            "delta must be non-negative, got {}",
            settings.delta
        ));
    }
    if v0.grid() != &config.grid {
        return invalid("initial field is not on the configured grid");
    }
    let grid = &config.grid;
    let steps = step_count(config.dt, config.t_end)?;
    let (dealias2, dt2, sub) = match settings.variant {
        Variant::Identical => (config.dealias, config.dt, 1),
        Variant::DealiasSwap => (other(config.dealias), config.dt, 1),
        Variant::HalfDt => (config.dealias, 0.5 * config.dt, 2),
    };
    let mut i1 = Integrator::new(grid, config.dt, config.nu, config.dealias, config.advection)?;
    let mut i2 = Integrator::new(grid, dt2, config.nu, dealias2, config.advection)?;
    let mut s1 = HydrostaticState::projected(&v0.without_nyquist())?;
    let mut s2 = if settings.delta > 0.0 {
        HydrostaticState::projected(&s1.v().axpy(
            settings.delta,
            &perturbation(v0, settings.perturbation_seed)?,
        ))?
    } else {
        s1.clone()
    };
    let neg = BesovSpec::new(
        -1.0 / ex.p,
        ex.p,
        f64::INFINITY,
        AxisName::Z,
        InnerNorm::LinfH,
    );
    let pos = BesovSpec::new(2.0 / ex.gamma, 2.0, 2.0, AxisName::Z, InnerNorm::LinfH);
    let density = |v: &SpectralField| -> Result<f64> {
        Ok(besov_norm(v, &neg)?.powf(ex.beta) + besov_norm(v, &pos)?.powf(ex.gamma))
    };
    let diff = |a: &HydrostaticState, b: &HydrostaticState| {
        let d = a.v() - b.v();
        d.inner(&d)
    };

    let mut times = vec![0.0];
    let mut lhs = vec![diff(&s1, &s2)];
    let mut integral = vec![0.0];
    let mut g_prev = density(s1.v())?;
    let mut t_prev = 0.0;
    let mut acc = 0.0;
    for n in 1..=steps {
        s1 = i1.step(&s1)?;
        for _ in 0..sub {
            s2 = i2.step(&s2)?;
        }
        if !s1.v().is_finite() || !s2.v().is_finite() {
            return Err(PeError::BlowUp {
                step: n,
                time: n as f64 * config.dt,
                reason: "non-finite state in uniqueness run".into(),
            });
        }
        if n % config.snapshot_stride == 0 || n == steps {
            let t = n as f64 * config.dt;
            let g = density(s1.v())?;
            acc += 0.5 * (t - t_prev) * (g + g_prev);
            g_prev = g;
            t_prev = t;
            times.push(t);
            lhs.push(diff(&s1, &s2));
            integral.push(acc);
        }
    }
    Ok(GronwallReport::fit(times, lhs, integral, v0.l2_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::pe_solver::InitialCondition;

    fn setup() -> (SolverConfig, SpectralField) {
        let g = TorusGrid::plane(16, 16, 1.0).unwrap();
        let mut c = SolverConfig::new(g.clone());
        c.dt = 1e-2;
        c.t_end = 0.2;
        c.snapshot_stride = 5;
        (c, InitialCondition::default().build(&g).unwrap())
    }

    #[test]
    fn identical_runs_coincide() {
        let (c, v0) = setup();
        let r = uniqueness_experiment(&c, &v0, &UniquenessSettings::default()).unwrap();
        assert!(r.lhs.iter().all(|l| *l == 0.0));
        assert_eq!(r.times.len(), 5);
    }

    #[test]
    fn perturbed_run_is_dominated() {
        let (c, v0) = setup();
        let s = UniquenessSettings {
            delta: 1e-6,
            ..Default::default()
        };
        let r = uniqueness_experiment(&c, &v0, &s).unwrap();
        assert!((r.lhs[0] - 1e-12).abs() < 1e-20);
        assert!(r.dominated && r.c.is_finite());
        assert!(r.integral.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn exponent_violation_is_rejected() {
        let (c, v0) = setup();
        let s = UniquenessSettings {
            beta: 3.0,
            ..Default::default()
        };
        assert!(matches!(
            uniqueness_experiment(&c, &v0, &s),
            Err(PeError::Constraint(_))
        ));
    }
}
