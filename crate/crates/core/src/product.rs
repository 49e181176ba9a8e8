//! Pseudo-spectral evaluation of pointwise products.

use num_complex::Complex64;

use crate::field::{analyze, synthesize, SpectralField};
use crate::grid::{signed_index, TorusGrid};

/// How aliasing is controlled when multiplying band-limited fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dealias {
    /// Zero-pad to 3n/2 points per axis; products of grid fields are exact on
    /// every non-Nyquist mode.
    #[default]
    Pad,
    /// Multiply on the base grid and discard modes with `|k| > n/3`.
    Truncate,
}

impl Dealias {
    pub fn name(self) -> &'static str {
        match self {
            Dealias::Pad => "pad",
            Dealias::Truncate => "truncate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            // `on`/`off` refer to 2/3 truncation
            "pad" | "3/2" | "off" => Some(Dealias::Pad),
            "truncate" | "2/3" | "on" => Some(Dealias::Truncate),
            _ => None,
        }
    }
}

/// Physical-space workspace for products of fields on one grid.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    grid: TorusGrid,
    dealias: Dealias,
    phys: Vec<usize>,
    keep: Option<Vec<bool>>,
}

impl ProductSpace {
    pub fn new(grid: &TorusGrid, dealias: Dealias) -> Self {
        let (phys, keep) = match dealias {
            Dealias::Pad => (grid.sizes().iter().map(|n| 3 * n / 2).collect(), None),
            Dealias::Truncate => {
                let nd = grid.n_dims();
                let mut idx = vec![0usize; nd];
                let keep = (0..grid.len())
                    .map(|flat| {
                        grid.unravel(flat, &mut idx);
                        (0..nd).all(|a| {
                            let n = grid.sizes()[a];
                            !grid.is_nyquist(a, idx[a])
                                && 3 * signed_index(idx[a], n).unsigned_abs() as usize <= n
                        })
                    })
                    .collect();
                (grid.sizes().to_vec(), Some(keep))
            }
        };
        Self {
            grid: grid.clone(),
            dealias,
            phys,
            keep,
        }
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn physical_len(&self) -> usize {
        self.phys.iter().product()
    }

    /// Cell volume of the physical product grid.
    pub fn cell_volume(&self) -> f64 {
        self.grid.volume() / self.physical_len() as f64
    }

    pub fn to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        synthesize(self.grid.sizes(), coeffs, &self.phys)
    }

    /// Coefficients of sampled data, restricted to the representable
    /// (dealiased) modes of the base grid.
    pub fn to_spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let mut c = analyze(self.grid.sizes(), values, &self.phys);
        if let Some(keep) = &self.keep {
            for (v, &k) in c.iter_mut().zip(keep) {
                if !k {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        } else {
            zero_nyquist(&self.grid, &mut c);
        }
        c
    }

    pub fn field_to_physical(&self, f: &SpectralField) -> Vec<Vec<f64>> {
        f.coeffs().iter().map(|c| self.to_physical(c)).collect()
    }

    /// Scalar product field `a * b` of two scalar coefficient arrays.
    pub fn multiply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let pa = self.to_physical(a);
        let pb = self.to_physical(b);
        let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        self.to_spectral(&prod)
    }
}

pub(crate) fn zero_nyquist(grid: &TorusGrid, c: &mut [Complex64]) {
    zero_nyquist_sizes(grid.sizes(), c);
}

pub(crate) fn zero_nyquist_sizes(sizes: &[usize], c: &mut [Complex64]) {
    let strides = crate::grid::strides_of(sizes);
    for (flat, v) in c.iter_mut().enumerate() {
        if sizes
            .iter()
            .zip(&strides)
            .any(|(&n, &s)| (flat / s) % n == n / 2)
        {
            *v = Complex64::new(0.0, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{forward_transform, PhysicalField};

    #[test]
    fn padded_product_is_exact_for_band_limited_inputs() {
        let g = TorusGrid::line(16, 1.0).unwrap();
        let a = forward_transform(&PhysicalField::from_fn(&g, |x| (5.0 * x[0]).cos())).unwrap();
        let b = forward_transform(&PhysicalField::from_fn(&g, |x| (6.0 * x[0]).sin())).unwrap();
        // cos5 sin6 = (sin 11 + sin 1)/2; mode 11 is not representable on 16 points.
        let pad = ProductSpace::new(&g, Dealias::Pad);
        let p = pad.multiply(a.component(0), b.component(0));
        let expect = forward_transform(&PhysicalField::from_fn(&g, |x| 0.5 * x[0].sin())).unwrap();
        for (x, y) in p.iter().zip(expect.component(0)) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn truncation_drops_upper_third() {
        let g = TorusGrid::line(16, 1.0).unwrap();
        let sp = ProductSpace::new(&g, Dealias::Truncate);
        let a = forward_transform(&PhysicalField::from_fn(&g, |x| (3.0 * x[0]).cos())).unwrap();
        let one = forward_transform(&PhysicalField::from_fn(&g, |_| 1.0)).unwrap();
        let p = sp.multiply(a.component(0), one.component(0));
        assert!((p[3].re - 0.5).abs() < 1e-15);
        let h = forward_transform(&PhysicalField::from_fn(&g, |x| (6.0 * x[0]).cos())).unwrap();
        let q = sp.multiply(h.component(0), one.component(0));
        assert!(q.iter().all(|c| c.norm() < 1e-15));
    }
}
