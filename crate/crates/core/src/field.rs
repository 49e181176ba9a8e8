//! Fourier representation of real periodic fields.
//!
//! A field `f` on the grid is represented as `f(x) = sum_k c_k exp(i k . x / lambda)`,
//! with `x` ranging over `[-pi lambda, pi lambda)` on every axis. The forward
//! transform is the discrete analogue of the normalised toroidal Fourier
//! coefficient `(2 pi lambda)^{-1} int f(z) exp(-i k z / lambda) dz`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fft::fft_nd;
use crate::grid::{signed_index, AxisRole, TorusGrid};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex Fourier coefficients of a (vector-valued) real field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Vec<Complex64>>,
}

/// Samples of a (vector-valued) field on the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: TorusGrid,
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl PhysicalField {
    pub fn new(grid: TorusGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return invalid("field needs at least one component");
        }
        for v in &values {
            if v.len() != grid.len() {
                return invalid(format!(
                    "component has {} samples, grid has {}",
                    v.len(),
                    grid.len()
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return invalid("physical samples must be finite");
            }
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the collocation points of a scalar field.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let coords: Vec<Vec<f64>> = (0..grid.n_dims()).map(|a| grid.coordinates(a)).collect();
        let mut idx = vec![0usize; grid.n_dims()];
        let mut x = vec![0.0; grid.n_dims()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.unravel(flat, &mut idx);
                for a in 0..idx.len() {
                    x[a] = coords[a][idx[a]];
                }
                f(&x)
            })
            .collect();
        Self {
            grid: grid.clone(),
            values: vec![values],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    /// Pointwise Euclidean magnitude over components.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.values.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid, components: usize) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![vec![ZERO; grid.len()]; components.max(1)],
        }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("field needs at least one component");
        }
        if coeffs.iter().any(|c| c.len() != grid.len()) {
            return invalid("coefficient array shape does not match grid");
        }
        Ok(Self { grid, coeffs })
    }

    /// Stacks scalar (or vector) fields on the same grid into one field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| {
            crate::error::PeError::InvalidInput("cannot stack zero fields".into())
        })?;
        if parts.iter().any(|p| p.grid != first.grid) {
            return invalid("stacked fields live on different grids");
        }
        let coeffs = parts
            .iter()
            .flat_map(|p| p.coeffs.iter().cloned())
            .collect();
        Ok(Self {
            grid: first.grid.clone(),
            coeffs,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.coeffs[c]
    }

    /// Scalar field holding component `c`.
    pub fn select(&self, c: usize) -> SpectralField {
        Self {
            grid: self.grid.clone(),
            coeffs: vec![self.coeffs[c].clone()],
        }
    }

    /// Same coefficients on a grid with different torus scales.
    pub(crate) fn regrid(self, grid: TorusGrid) -> Self {
        debug_assert_eq!(grid.sizes(), self.grid.sizes());
        Self {
            grid,
            coeffs: self.coeffs,
        }
    }

    /// Applies `m(xi, k)` mode by mode, where `xi = k / lambda` per axis.
    pub fn map_modes(&self, m: impl Fn(&[f64], &[i64]) -> Complex64) -> Self {
        let g = &self.grid;
        let nd = g.n_dims();
        let freqs: Vec<Vec<f64>> = (0..nd).map(|a| g.frequencies(a)).collect();
        let mut idx = vec![0usize; nd];
        let mut xi = vec![0.0; nd];
        let mut k = vec![0i64; nd];
        let mult: Vec<Complex64> = (0..g.len())
            .map(|flat| {
                g.unravel(flat, &mut idx);
                for a in 0..nd {
                    xi[a] = freqs[a][idx[a]];
                    k[a] = signed_index(idx[a], g.sizes()[a]);
                }
                m(&xi, &k)
            })
            .collect();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.iter().zip(&mult).map(|(a, b)| a * b).collect())
            .collect();
        Self {
            grid: g.clone(),
            coeffs,
        }
    }

    /// Real Fourier multiplier acting along a single axis.
    pub fn axis_multiplier(&self, axis: usize, m: impl Fn(f64) -> f64) -> Self {
        let freqs = self.grid.frequencies(axis);
        let table: Vec<f64> = freqs.iter().map(|&x| m(x)).collect();
        let stride = self.grid.strides()[axis];
        let n = self.grid.sizes()[axis];
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                c.iter()
                    .enumerate()
                    .map(|(flat, v)| v * table[(flat / stride) % n])
                    .collect()
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Spectral derivative along `axis`; the Nyquist slot is zeroed.
    pub fn derivative(&self, axis: usize) -> Self {
        let n = self.grid.sizes()[axis] as i64;
        self.map_modes(|xi, k| {
            if k[axis] == -n / 2 {
                ZERO
            } else {
                Complex64::new(0.0, xi[axis])
            }
        })
    }

    /// `int f . g dx` over the torus, summed over components (Parseval).
    pub fn inner(&self, other: &SpectralField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum::<f64>())
            .sum();
        s * self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Plain l2 norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y * s).collect())
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Projects onto coefficient arrays of real fields: `c_k <- (c_k + conj c_{-k}) / 2`.
    pub fn real_part(&self) -> Self {
        let g = &self.grid;
        let partner = mirror_table(g, &(0..g.n_dims()).collect::<Vec<_>>());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                (0..c.len())
                    .map(|i| 0.5 * (c[i] + c[partner[i]].conj()))
                    .collect()
            })
            .collect();
        Self {
            grid: g.clone(),
            coeffs,
        }
    }

    /// Zeroes every coefficient sitting in a Nyquist slot of any axis.
    pub fn without_nyquist(&self) -> Self {
        let g = &self.grid;
        let nd = g.n_dims();
        let mut idx = vec![0usize; nd];
        let keep: Vec<bool> = (0..g.len())
            .map(|flat| {
                g.unravel(flat, &mut idx);
                (0..nd).all(|a| !g.is_nyquist(a, idx[a]))
            })
            .collect();
        Self {
            grid: g.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(&keep)
                        .map(|(v, &k)| if k { *v } else { ZERO })
                        .collect()
                })
                .collect(),
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

/// For each flat index, the flat index of the mode with the signs of the
/// wavenumbers on `axes` flipped.
pub(crate) fn mirror_table(grid: &TorusGrid, axes: &[usize]) -> Vec<usize> {
    let nd = grid.n_dims();
    let strides = grid.strides();
    let mut idx = vec![0usize; nd];
    (0..grid.len())
        .map(|flat| {
            grid.unravel(flat, &mut idx);
            let mut out = 0;
            for a in 0..nd {
                let n = grid.sizes()[a];
                let i = if axes.contains(&a) {
                    (n - idx[a]) % n
                } else {
                    idx[a]
                };
                out += i * strides[a];
            }
            out
        })
        .collect()
}

/// `(-1)^k` per flat index: the phase from centring the grid at the origin.
fn phase_table(sizes: &[usize]) -> Vec<f64> {
    let nd = sizes.len();
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; nd];
    for flat in 0..total {
        let mut f = flat;
        for a in (0..nd).rev() {
            idx[a] = f % sizes[a];
            f /= sizes[a];
        }
        let parity: i64 = (0..nd).map(|a| signed_index(idx[a], sizes[a])).sum();
        out.push(if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 });
    }
    out
}

/// Maps each base-grid slot to its slot on a (possibly larger) grid, or
/// `None` when the mode is a base Nyquist mode that does not survive padding.
pub(crate) fn embed_table(base: &[usize], target: &[usize]) -> Vec<Option<usize>> {
    let nd = base.len();
    let total: usize = base.iter().product();
    let tstrides = crate::grid::strides_of(target);
    let mut idx = vec![0usize; nd];
    (0..total)
        .map(|flat| {
            let mut f = flat;
            for a in (0..nd).rev() {
                idx[a] = f % base[a];
                f /= base[a];
            }
            let mut out = 0;
            for a in 0..nd {
                if target[a] != base[a] && idx[a] == base[a] / 2 {
                    return None;
                }
                let k = signed_index(idx[a], base[a]);
                let t = if k >= 0 {
                    k as usize
                } else {
                    (target[a] as i64 + k) as usize
                };
                out += t * tstrides[a];
            }
            Some(out)
        })
        .collect()
}

/// Evaluates a scalar coefficient array on a uniform grid of `target` sizes
/// covering the same torus.
pub(crate) fn synthesize(base: &[usize], coeffs: &[Complex64], target: &[usize]) -> Vec<f64> {
    let total: usize = target.iter().product();
    let mut buf = vec![ZERO; total];
    for (i, slot) in embed_table(base, target).into_iter().enumerate() {
        if let Some(t) = slot {
            buf[t] = coeffs[i];
        }
    }
    let phase = phase_table(target);
    for (v, p) in buf.iter_mut().zip(&phase) {
        *v *= *p;
    }
    fft_nd(&mut buf, target, false);
    buf.into_iter().map(|v| v.re).collect()
}

/// Inverse of [`synthesize`] restricted to the base modes. Base Nyquist slots
/// are zeroed when `source` differs from `base`.
pub(crate) fn analyze(base: &[usize], values: &[f64], source: &[usize]) -> Vec<Complex64> {
    let total: usize = source.iter().product();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, source, true);
    let phase = phase_table(source);
    let scale = 1.0 / total as f64;
    embed_table(base, source)
        .into_iter()
        .map(|slot| match slot {
            Some(t) => buf[t] * (phase[t] * scale),
            None => ZERO,
        })
        .collect()
}

/// Pointwise product of sample arrays.
pub(crate) fn pointwise(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Discrete Fourier coefficients of sampled data.
pub fn forward_transform(f: &PhysicalField) -> Result<SpectralField> {
    let g = f.grid();
    let coeffs = f
        .values
        .iter()
        .map(|v| {
            if v.len() != g.len() {
                return invalid("sample array does not match grid shape");
            }
            Ok(analyze(g.sizes(), v, g.sizes()))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralField::from_coeffs(g.clone(), coeffs)
}

/// Samples of the trigonometric polynomial at the collocation points.
pub fn inverse_transform(u: &SpectralField) -> PhysicalField {
    let g = u.grid();
    let values = u
        .coeffs
        .iter()
        .map(|c| synthesize(g.sizes(), c, g.sizes()))
        .collect();
    PhysicalField {
        grid: g.clone(),
        values,
    }
}

/// Rectangle-rule `L^p` norm of the pointwise Euclidean magnitude; `p` may be
/// `f64::INFINITY`, in which case the grid maximum is returned.
pub fn quadrature_norm(f: &PhysicalField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return invalid(format!("norm exponent {p} must be >= 1"));
    }
    Ok(lp_of(&f.magnitude(), p, f.grid().cell_volume()))
}

pub(crate) fn lp_of(values: &[f64], p: f64, weight: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    if p == 1.0 {
        return values.iter().map(|v| v.abs()).sum::<f64>() * weight;
    }
    if p == 2.0 {
        return (values.iter().map(|v| v * v).sum::<f64>() * weight).sqrt();
    }
    (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * weight).powf(1.0 / p)
}

/// Removes every mode with vanishing wavenumber along `axis`.
pub fn project_mean_zero(u: &SpectralField, axis: usize) -> Result<SpectralField> {
    u.grid().check_axis(axis)?;
    Ok(u.axis_multiplier(axis, |xi| if xi == 0.0 { 0.0 } else { 1.0 }))
}

/// Mean along `axis` (the removed part of [`project_mean_zero`]).
pub fn axis_mean(u: &SpectralField, axis: usize) -> Result<SpectralField> {
    u.grid().check_axis(axis)?;
    Ok(u.axis_multiplier(axis, |xi| if xi == 0.0 { 1.0 } else { 0.0 }))
}

/// `(u(z) +- u(-z)) / 2` along the vertical axis.
pub fn enforce_parity(u: &SpectralField, axis: usize, parity: Parity) -> Result<SpectralField> {
    let g = u.grid();
    g.check_axis(axis)?;
    if g.n_dims() > 1 && g.roles()[axis] != AxisRole::Vertical {
        return invalid("parity is only defined along the vertical axis");
    }
    let mirror = mirror_table(g, &[axis]);
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let coeffs = u
        .coeffs
        .iter()
        .map(|c| {
            (0..c.len())
                .map(|i| 0.5 * (c[i] + c[mirror[i]] * sign))
                .collect()
        })
        .collect();
    SpectralField::from_coeffs(g.clone(), coeffs)
}
