//! Residual of the energy equality along a recorded trajectory.

use crate::error::{invalid, Result};
use crate::pe_solver::RunSeries;

/// `r(t) = E(t) + nu int_0^t |grad v|^2 - E(0)` with `E = 1/2 |v|^2`; the time
/// integral is the trapezoid rule over the recorded times.
pub fn energy_residual(series: &RunSeries) -> Result<Vec<f64>> {
    if series.is_empty() {
        return invalid("energy residual of an empty series");
    }
    let e0 = series.energy[0];
    let mut integral = 0.0;
    let mut out = Vec::with_capacity(series.len());
    out.push(0.0);
    for i in 1..series.len() {
        let h = series.times[i] - series.times[i - 1];
        integral += 0.5 * h * (series.dissipation[i] + series.dissipation[i - 1]);
        out.push(series.energy[i] + series.nu * integral - e0);
    }
    Ok(out)
}

/// `max_t |r(t)|`.
pub fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}
