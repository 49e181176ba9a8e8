//! Periodic collocation grids on `T_lambda^n`.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Role of an axis in the primitive-equations geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisRole {
    Horizontal,
    Vertical,
}

impl AxisRole {
    pub fn to_byte(self) -> u8 {
        match self {
            AxisRole::Horizontal => 0,
            AxisRole::Vertical => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(AxisRole::Horizontal),
            1 => Some(AxisRole::Vertical),
            _ => None,
        }
    }
}

/// Uniform grid on a product of tori, axis `a` having period `2 pi lambda[a]`.
///
/// Coefficients and samples are stored with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    sizes: Vec<usize>,
    lambda: Vec<f64>,
    roles: Vec<AxisRole>,
}

impl TorusGrid {
    pub fn new(sizes: Vec<usize>, lambda: Vec<f64>, roles: Vec<AxisRole>) -> Result<Self> {
        let n = sizes.len();
        if n == 0 || n > 3 {
            return invalid(format!("grid must have 1 to 3 axes, got {n}"));
        }
        if lambda.len() != n || roles.len() != n {
            return invalid("sizes, lambda and roles must have equal length");
        }
        for &s in &sizes {
            if s < 4 || !s.is_power_of_two() {
                return invalid(format!("axis size {s} is not a power of two >= 4"));
            }
        }
        for &l in &lambda {
            if !(l.is_finite() && l > 0.0) {
                return invalid(format!("torus scale {l} must be positive and finite"));
            }
        }
        let vertical = roles.iter().filter(|r| **r == AxisRole::Vertical).count();
        if n >= 2 && vertical != 1 {
            return invalid(format!(
                "exactly one vertical axis required for n >= 2, found {vertical}"
            ));
        }
        Ok(Self {
            sizes,
            lambda,
            roles,
        })
    }

    /// One-dimensional vertical torus.
    pub fn line(n: usize, lambda: f64) -> Result<Self> {
        Self::new(vec![n], vec![lambda], vec![AxisRole::Vertical])
    }

    /// `(x1, z)` grid for the two-dimensional model.
    pub fn plane(nx: usize, nz: usize, lambda: f64) -> Result<Self> {
        Self::new(
            vec![nx, nz],
            vec![lambda; 2],
            vec![AxisRole::Horizontal, AxisRole::Vertical],
        )
    }

    /// `(x1, x2, z)` grid for the three-dimensional model.
    pub fn cube(nx: usize, ny: usize, nz: usize, lambda: f64) -> Result<Self> {
        Self::new(
            vec![nx, ny, nz],
            vec![lambda; 3],
            vec![
                AxisRole::Horizontal,
                AxisRole::Horizontal,
                AxisRole::Vertical,
            ],
        )
    }

    pub fn n_dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn roles(&self) -> &[AxisRole] {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.n_dims() {
            return invalid(format!(
                "axis {axis} out of range for {}-d grid",
                self.n_dims()
            ));
        }
        Ok(())
    }

    /// Index of the vertical axis; for 1-d grids the only axis.
    pub fn vertical_axis(&self) -> usize {
        self.roles
            .iter()
            .position(|r| *r == AxisRole::Vertical)
            .unwrap_or(0)
    }

    pub fn horizontal_axes(&self) -> Vec<usize> {
        (0..self.n_dims())
            .filter(|&a| self.roles[a] == AxisRole::Horizontal)
            .collect()
    }

    /// Total measure of the torus, `prod 2 pi lambda`.
    pub fn volume(&self) -> f64 {
        self.lambda.iter().map(|l| 2.0 * PI * l).product()
    }

    /// Quadrature weight of one collocation point.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.sizes)
    }

    /// Signed integer wavenumber stored at position `i` on `axis`
    /// (the Nyquist slot maps to `-n/2`).
    pub fn wavenumber(&self, axis: usize, i: usize) -> i64 {
        signed_index(i, self.sizes[axis])
    }

    /// Physical frequencies `k / lambda` for every slot of `axis`.
    pub fn frequencies(&self, axis: usize) -> Vec<f64> {
        let n = self.sizes[axis];
        (0..n)
            .map(|i| signed_index(i, n) as f64 / self.lambda[axis])
            .collect()
    }

    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.sizes[axis] / 2
    }

    /// Collocation coordinates `x_m = -pi lambda + 2 pi lambda m / n`.
    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        let n = self.sizes[axis];
        let l = self.lambda[axis];
        (0..n)
            .map(|m| -PI * l + 2.0 * PI * l * m as f64 / n as f64)
            .collect()
    }

    /// Splits a flat index into per-axis indices.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.n_dims()).rev() {
            out[a] = flat % self.sizes[a];
            flat /= self.sizes[a];
        }
    }

    /// Same grid with a different scale on every axis.
    pub fn with_lambda(&self, lambda: Vec<f64>) -> Result<Self> {
        Self::new(self.sizes.clone(), lambda, self.roles.clone())
    }
}

pub(crate) fn strides_of(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for a in (0..sizes.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * sizes[a + 1];
    }
    s
}

pub(crate) fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
