//! Trilinear advective flux and its six-term paraproduct split along z.

use std::path::Path;

use rayon::prelude::*;

use crate::error::{constraint, invalid, Result};
use crate::field::{axis_mean, SpectralField};
use crate::hydrostatic::{diagnose_w, DimMode};
use crate::io::write_csv;
use crate::littlewood_paley::{block_range, dyadic_block, fattened_block, low_pass};
use crate::product::{Dealias, ProductSpace};

const EPS: f64 = 1e-300;

fn check_pair(v_d: &SpectralField, v_1: &SpectralField) -> Result<DimMode> {
    let mode = DimMode::of(v_d.grid())?;
    if v_d.grid() != v_1.grid() {
        return invalid("flux inputs live on different grids");
    }
    if v_d.components() != 2 || v_1.components() != 2 {
        return invalid("flux inputs must be horizontal velocities (2 components)");
    }
    Ok(mode)
}

/// Component indices `i` of `v_d` that advect horizontally (`x_i` derivative).
fn horizontal_components(mode: DimMode) -> &'static [usize] {
    match mode {
        DimMode::ThreeD => &[0, 1],
        DimMode::TwoD => &[0],
    }
}

/// `(int v_d^i v_1^b d_i v_d^b, int w_d v_1^b d_z v_d^b)`, summed over
/// horizontal `i` and both components `b`.
pub fn direct_flux(v_d: &SpectralField, v_1: &SpectralField) -> Result<(f64, f64)> {
    let mode = check_pair(v_d, v_1)?;
    let grid = v_d.grid();
    let space = ProductSpace::new(grid, Dealias::Pad);
    let h = grid.horizontal_axes();
    let za = grid.vertical_axis();
    let w_d = diagnose_w(v_d)?;
    let phys = |f: &SpectralField| space.to_physical(f.component(0));
    let v1: Vec<Vec<f64>> = (0..2).map(|b| phys(&v_1.select(b))).collect();
    let vol = space.cell_volume();
    let triple = |a: &[f64], b: &[f64], c: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(c)
            .map(|((x, y), z)| x * y * z)
            .sum::<f64>()
            * vol
    };
    let mut direct_h = 0.0;
    for &i in horizontal_components(mode) {
        let vi = phys(&v_d.select(i));
        for (b, v1b) in v1.iter().enumerate() {
            direct_h += triple(&vi, v1b, &phys(&v_d.select(b).derivative(h[i])));
        }
    }
    let wd = phys(&w_d);
    let direct_z = v1
        .iter()
        .enumerate()
        .map(|(b, v1b)| triple(&wd, v1b, &phys(&v_d.select(b).derivative(za))))
        .sum();
    Ok((direct_h, direct_z))
}

/// One `(j, a, b)` entry of a J-sum: blocks `a`, `b` of the two factors
/// (`a = b = m` for paraproduct terms) paired with `Delta_j` of the test factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contribution {
    /// 1 to 6.
    pub term: usize,
    pub j: i32,
    pub a: i32,
    pub b: i32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxBreakdown {
    pub mode: DimMode,
    pub j: [f64; 6],
    pub direct_h: f64,
    pub direct_z: f64,
    pub j_range: (i32, i32),
    pub contributions: Vec<Contribution>,
}

impl FluxBreakdown {
    pub fn j_sum(&self) -> f64 {
        self.j.iter().sum()
    }

    /// `|sum J - (direct_H + direct_z)| / (|direct_H| + |direct_z| + eps)`.
    pub fn mismatch(&self) -> f64 {
        (self.j_sum() - (self.direct_h + self.direct_z)).abs()
            / (self.direct_h.abs() + self.direct_z.abs() + EPS)
    }

    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = vec!["j_min".into(), "j_max".into()];
        h.extend((1..=6).map(|i| format!("J{i}")));
        h.extend(["direct_H", "direct_z", "mismatch"].map(String::from));
        h
    }

    pub fn csv_row(&self) -> Vec<f64> {
        let mut r = vec![self.j_range.0 as f64, self.j_range.1 as f64];
        r.extend(self.j);
        r.extend([self.direct_h, self.direct_z, self.mismatch()]);
        r
    }
}

pub fn write_flux_csv(path: &Path, rows: &[FluxBreakdown]) -> Result<()> {
    let body: Vec<Vec<f64>> = rows.iter().map(FluxBreakdown::csv_row).collect();
    write_csv(path, &FluxBreakdown::csv_header(), &body)
}

fn require_z_mean_free(u: &SpectralField, name: &str) -> Result<()> {
    let za = u.grid().vertical_axis();
    let m = axis_mean(u, za)?.max_abs_coeff();
    if m > 1e-12 * u.max_abs_coeff().max(1.0) {
        return constraint(format!(
            "{name} has a z-mean of size {m:e}; strip it with project_mean_zero first"
        ));
    }
    Ok(())
}

/// Paraproduct split of `sum_t <f_{i_t} g_{b_t}, G_t>` along `za`:
/// returns the three sums (low-high, high-low, remainder) and their entries.
fn bony(
    f: &[SpectralField],
    g: &[SpectralField],
    terms: &[(usize, usize, SpectralField)],
    space: &ProductSpace,
    first_term: usize,
) -> Result<([f64; 3], Vec<Contribution>)> {
    let grid = space.grid();
    let za = grid.vertical_axis();
    let range: Vec<i32> = block_range(grid, za).collect();
    let phys = |u: &SpectralField| space.to_physical(u.component(0));
    let blocks = |u: &[SpectralField]| -> Result<Vec<Vec<Vec<f64>>>> {
        range
            .par_iter()
            .map(|&m| {
                u.iter()
                    .map(|c| Ok(phys(&dyadic_block(c, m, za)?)))
                    .collect()
            })
            .collect()
    };
    let df = blocks(f)?;
    let dg = blocks(g)?;
    let dgt: Vec<Vec<SpectralField>> = range
        .iter()
        .map(|&j| {
            terms
                .iter()
                .map(|(_, _, t)| dyadic_block(t, j, za))
                .collect()
        })
        .collect::<Result<_>>()?;
    let pos = |j: i32| (j - range[0]) as usize;
    let to_field =
        |vals: Vec<f64>| SpectralField::from_coeffs(grid.clone(), vec![space.to_spectral(&vals)]);
    let pair = |x: &SpectralField, j: i32, t: usize| -> Result<f64> {
        Ok(fattened_block(x, j, za)?.inner(&dgt[pos(j)][t]))
    };

    // low-high and high-low paraproducts, |m - j| <= 3
    let para: Vec<Vec<Contribution>> = range
        .par_iter()
        .map(|&m| -> Result<Vec<Contribution>> {
            let pf: Vec<Vec<f64>> = f
                .iter()
                .map(|c| Ok(phys(&low_pass(c, m, za)?)))
                .collect::<Result<_>>()?;
            let pg: Vec<Vec<f64>> = g
                .iter()
                .map(|c| Ok(phys(&low_pass(c, m, za)?)))
                .collect::<Result<_>>()?;
            let mut out = Vec::new();
            for (which, (a_src, b_src)) in [(&df[pos(m)], &pg), (&pf, &dg[pos(m)])]
                .into_iter()
                .enumerate()
            {
                let xs: Vec<SpectralField> = terms
                    .iter()
                    .map(|(i, b, _)| to_field(crate::field::pointwise(&a_src[*i], &b_src[*b])))
                    .collect::<Result<_>>()?;
                for &j in range.iter().filter(|&&j| (m - j).abs() <= 3) {
                    let mut value = 0.0;
                    for (t, x) in xs.iter().enumerate() {
                        value += pair(x, j, t)?;
                    }
                    out.push(Contribution {
                        term: first_term + which,
                        j,
                        a: m,
                        b: m,
                        value,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    // remainder: |k - l| <= 2, max(k, l) >= j - 3
    let pairs: Vec<(i32, i32)> = range
        .iter()
        .flat_map(|&k| {
            range
                .iter()
                .filter(move |&&l| (k - l).abs() <= 2)
                .map(move |&l| (k, l))
        })
        .collect();
    let rem: Vec<Vec<Contribution>> = pairs
        .par_iter()
        .map(|&(k, l)| -> Result<Vec<Contribution>> {
            let ys: Vec<SpectralField> = terms
                .iter()
                .map(|(i, b, _)| {
                    to_field(crate::field::pointwise(&df[pos(k)][*i], &dg[pos(l)][*b]))
                })
                .collect::<Result<_>>()?;
            let top = k.max(l);
            let mut out = Vec::new();
            for &j in range.iter().filter(|&&j| top >= j - 3) {
                let mut value = 0.0;
                for (t, y) in ys.iter().enumerate() {
                    value += pair(y, j, t)?;
                }
                out.push(Contribution {
                    term: first_term + 2,
                    j,
                    a: k,
                    b: l,
                    value,
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let contributions: Vec<Contribution> = para.into_iter().chain(rem).flatten().collect();
    let mut sums = [0.0; 3];
    for c in &contributions {
        sums[c.term - first_term] += c.value;
    }
    Ok((sums, contributions))
}

/// Six-term split of the flux of `v_d` against `v_1`. Both inputs must have
/// zero z-mean; the barotropic flux is obtained from [`direct_flux`].
pub fn flux_decompose(v_d: &SpectralField, v_1: &SpectralField) -> Result<FluxBreakdown> {
    let mode = check_pair(v_d, v_1)?;
    require_z_mean_free(v_d, "v_d")?;
    require_z_mean_free(v_1, "v_1")?;
    let grid = v_d.grid();
    let space = ProductSpace::new(grid, Dealias::Pad);
    let h = grid.horizontal_axes();
    let za = grid.vertical_axis();
    let w_d = diagnose_w(v_d)?;
    require_z_mean_free(&w_d, "w_d")?;

    let hc = horizontal_components(mode);
    let f_h: Vec<SpectralField> = (0..2).map(|i| v_d.select(i)).collect();
    let g: Vec<SpectralField> = (0..2).map(|b| v_1.select(b)).collect();
    let terms_h: Vec<(usize, usize, SpectralField)> = hc
        .iter()
        .flat_map(|&i| (0..2).map(move |b| (i, b)))
        .map(|(i, b)| (i, b, v_d.select(b).derivative(h[i])))
        .collect();
    let terms_z: Vec<(usize, usize, SpectralField)> = (0..2)
        .map(|b| (0, b, v_d.select(b).derivative(za)))
        .collect();

    let (jh, ch) = bony(&f_h, &g, &terms_h, &space, 1)?;
    let (jz, cz) = bony(&[w_d], &g, &terms_z, &space, 4)?;
    let (direct_h, direct_z) = direct_flux(v_d, v_1)?;
    let r = block_range(grid, za);
    Ok(FluxBreakdown {
        mode,
        j: [jh[0], jh[1], jh[2], jz[0], jz[1], jz[2]],
        direct_h,
        direct_z,
        j_range: (*r.start(), *r.end()),
        contributions: ch.into_iter().chain(cz).collect(),
    })
}
