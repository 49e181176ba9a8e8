//! Hydrostatic solenoidal space, diagnostic vertical velocity and membership checks.

use num_complex::Complex64;

use crate::error::{constraint, invalid, Result};
use crate::field::{axis_mean, enforce_parity, Parity, SpectralField};
use crate::grid::TorusGrid;

/// 3D model `v(x1, x2, z)` or 2D model `v(x1, z)` advected by `(v^1, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimMode {
    ThreeD,
    TwoD,
}

impl DimMode {
    pub fn of(grid: &TorusGrid) -> Result<Self> {
        match grid.n_dims() {
            3 => Ok(DimMode::ThreeD),
            2 => Ok(DimMode::TwoD),
            n => invalid(format!(
                "hydrostatic fields live on 2D or 3D grids, got {n}D"
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DimMode::ThreeD => "3d",
            DimMode::TwoD => "2d",
        }
    }
}

/// Horizontal velocity known to lie in the hydrostatic space.
#[derive(Debug, Clone, PartialEq)]
pub struct HydrostaticState {
    v: SpectralField,
    mode: DimMode,
}

impl HydrostaticState {
    /// Wraps `v` after checking membership to `1e-10` relative to its largest coefficient.
    pub fn new(v: SpectralField) -> Result<Self> {
        let mode = check_shape(&v)?;
        let tol = 1e-10 * v.l2_norm().max(1.0);
        let r = check_in_h(&v, tol)?;
        if !r.passed {
            return constraint(format!(
                "field not hydrostatic: parity residual {:e}, barotropic divergence {:e}",
                r.parity_residual, r.divergence_residual
            ));
        }
        Ok(Self { v, mode })
    }

    /// Projects `v` and wraps the result.
    pub fn projected(v: &SpectralField) -> Result<Self> {
        let mode = check_shape(v)?;
        Ok(Self {
            v: project_h(v)?,
            mode,
        })
    }

    pub(crate) fn trusted(v: SpectralField, mode: DimMode) -> Self {
        Self { v, mode }
    }

    pub fn v(&self) -> &SpectralField {
        &self.v
    }

    pub fn mode(&self) -> DimMode {
        self.mode
    }

    pub fn into_inner(self) -> SpectralField {
        self.v
    }
}

fn check_shape(v: &SpectralField) -> Result<DimMode> {
    let mode = DimMode::of(v.grid())?;
    if v.components() != 2 {
        return invalid(format!(
            "horizontal velocity needs 2 components, got {}",
            v.components()
        ));
    }
    Ok(mode)
}

/// `div_H v`; in the 2D model only `d_{x1} v^1`.
pub fn div_h(v: &SpectralField) -> Result<SpectralField> {
    let mode = check_shape(v)?;
    let h = v.grid().horizontal_axes();
    let mut d = v.select(0).derivative(h[0]);
    if mode == DimMode::ThreeD {
        d = &d + &v.select(1).derivative(h[1]);
    }
    Ok(d)
}

/// `w = int_z^{pi lambda} div_H v` with `w(pi lambda) = 0`.
pub fn diagnose_w(v: &SpectralField) -> Result<SpectralField> {
    let d = div_h(v)?;
    let grid = d.grid().clone();
    let za = grid.vertical_axis();
    let nz = grid.sizes()[za];
    let sz = grid.strides()[za];
    let lz = grid.lambda()[za];
    let dc = d.component(0);
    let scale = dc.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let mut w = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, out) in w.iter_mut().enumerate() {
        let iz = (flat / sz) % nz;
        if iz == 0 {
            if dc[flat].norm() > 1e-10 * scale {
                return constraint(format!(
                    "barotropic divergence {:e} is nonzero; w would not be periodic",
                    dc[flat].norm()
                ));
            }
            continue;
        }
        let xi = grid.wavenumber(za, iz) as f64 / lz;
        *out = -dc[flat] / Complex64::new(0.0, xi);
    }
    // fix the z-constant so that w vanishes at the top
    for flat in 0..grid.len() {
        if !(flat / sz).is_multiple_of(nz) {
            continue;
        }
        let base = flat;
        let mut acc = Complex64::new(0.0, 0.0);
        for iz in 1..nz {
            let k = grid.wavenumber(za, iz);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += w[base + iz * sz] * sign;
        }
        w[base] = -acc;
    }
    SpectralField::from_coeffs(grid, vec![w])
}

/// Orthogonal projection onto the hydrostatic space: even part in z, then a
/// Leray projection of the barotropic plane (2D model: the barotropic `v^1`
/// keeps only its `k_{x1} = 0` mode).
pub fn project_h(v: &SpectralField) -> Result<SpectralField> {
    let mode = check_shape(v)?;
    let grid = v.grid().clone();
    let za = grid.vertical_axis();
    let mut out = enforce_parity(v, za, Parity::Even)?;
    let h = grid.horizontal_axes();
    let nz = grid.sizes()[za];
    let sz = grid.strides()[za];
    let nd = grid.n_dims();
    let mut idx = vec![0usize; nd];
    // effective wavenumbers: Nyquist slots carry no derivative
    let eff = |a: usize, i: usize| {
        if grid.is_nyquist(a, i) {
            0.0
        } else {
            grid.wavenumber(a, i) as f64 / grid.lambda()[a]
        }
    };
    for flat in 0..grid.len() {
        if !(flat / sz).is_multiple_of(nz) {
            continue;
        }
        grid.unravel(flat, &mut idx);
        match mode {
            DimMode::ThreeD => {
                let k1 = eff(h[0], idx[h[0]]);
                let k2 = eff(h[1], idx[h[1]]);
                let kk = k1 * k1 + k2 * k2;
                if kk == 0.0 {
                    continue;
                }
                let a = out.component(0)[flat];
                let b = out.component(1)[flat];
                let dot = (a * k1 + b * k2) / kk;
                out.component_mut(0)[flat] = a - dot * k1;
                out.component_mut(1)[flat] = b - dot * k2;
            }
            DimMode::TwoD => {
                if eff(h[0], idx[h[0]]) != 0.0 {
                    out.component_mut(0)[flat] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    Ok(out)
}

/// Residuals of the two hydrostatic constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HReport {
    /// `|v - even(v)|_{L^2}`.
    pub parity_residual: f64,
    /// `L^2` norm of the z-average of `div_H v`.
    pub divergence_residual: f64,
    pub passed: bool,
}

pub fn check_in_h(v: &SpectralField, tol: f64) -> Result<HReport> {
    check_shape(v)?;
    let za = v.grid().vertical_axis();
    let parity_residual = (v - &enforce_parity(v, za, Parity::Even)?).l2_norm();
    let divergence_residual = axis_mean(&div_h(v)?, za)?.l2_norm();
    Ok(HReport {
        parity_residual,
        divergence_residual,
        passed: parity_residual <= tol && divergence_residual <= tol,
    })
}
