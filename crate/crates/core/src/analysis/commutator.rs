//! Mollification commutators of the energy-equality argument and their decay in `N`.

use std::path::Path;

use crate::analysis::mixed::MixedSpace;
use crate::besov::mixed_norm;
use crate::error::{invalid, Result};
use crate::field::{inverse_transform, lp_of, SpectralField};
use crate::grid::TorusGrid;
use crate::hydrostatic::{diagnose_w, DimMode};
use crate::io::write_csv;
use crate::littlewood_paley::{block_range, mollifier_symbol, mollify, Direction};
use crate::pe_solver::InitialCondition;
use crate::product::{Dealias, ProductSpace};

const EPS: f64 = 1e-300;

/// `I_1 .. I_8` at one cutoff `N`, with the two commutators they split.
///
/// Tensor terms `I_1 .. I_4` store components `(a, b)` of `f^a g^b` in
/// `a`-major order, `a` ranging over the advecting horizontal components
/// (`v^1, v^2` in 3D, `v^1` in 2D) and `b` over `v^1, v^2`. `I_5 .. I_8`
/// have components `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorTerms {
    pub n: i32,
    pub mode: DimMode,
    pub i: Vec<SpectralField>,
    /// `(v (x) v)_{<=N} - v_{<=N} (x) v_{<=N}`.
    pub commutator_vv: SpectralField,
    /// `(w v)_{<=N} - w_{<=N} v_{<=N}`.
    pub commutator_wv: SpectralField,
    /// `|I_1..4|_{L^1}`, `|I_5,6|_{L^1_H L^{p'}_z}`, `|I_7,8|_{L^1_H L^2_z}`.
    pub norms: [f64; 8],
    pub p: f64,
}

impl CommutatorTerms {
    fn residual(parts: &[SpectralField], whole: &SpectralField) -> f64 {
        let mut sum = parts[0].clone();
        for p in &parts[1..] {
            sum = &sum + p;
        }
        (&sum - whole).l2_norm() / (whole.l2_norm() + EPS)
    }

    /// Relative `L^2` defect of `I_1 + .. + I_4` against the `vv` commutator.
    pub fn residual_vv(&self) -> f64 {
        Self::residual(&self.i[..4], &self.commutator_vv)
    }

    pub fn residual_wv(&self) -> f64 {
        Self::residual(&self.i[4..], &self.commutator_wv)
    }
}

struct Mollifiers {
    za: usize,
    n: i32,
    space: ProductSpace,
    r_a: MixedSpace,
    r_b: MixedSpace,
}

impl Mollifiers {
    fn new(grid: &TorusGrid, n: i32) -> Result<Self> {
        let za = grid.vertical_axis();
        let range = block_range(grid, za);
        if !range.contains(&n) {
            return invalid(format!(
                "cutoff N = {n} outside the representable range {}..={}",
                range.start(),
                range.end()
            ));
        }
        // translation-difference symbol of a unit-mass kernel:
        // int psi(y) (e^{-i k y} - 1)(e^{-i l y} - 1) dy = m(k + l) - m(k) - m(l) + 1
        let bilinear = |m: &dyn Fn(f64) -> f64, k: f64, l: f64, q: f64| m(q) - m(k) - m(l) + 1.0;
        let sa = mollifier_symbol(grid, n, Direction::Axis(za))?;
        let sb = mollifier_symbol(grid, n, Direction::Horizontal)?;
        Ok(Self {
            za,
            n,
            space: ProductSpace::new(grid, Dealias::Pad),
            r_a: MixedSpace::new(grid, &[za], |k, l, q| bilinear(&sa, k, l, q)),
            r_b: MixedSpace::new(grid, &grid.horizontal_axes(), |k, l, q| {
                bilinear(&sb, k, l, q)
            }),
        })
    }

    fn a(&self, u: &SpectralField) -> Result<SpectralField> {
        mollify(u, self.n, Direction::Axis(self.za))
    }

    fn b(&self, u: &SpectralField) -> Result<SpectralField> {
        mollify(u, self.n, Direction::Horizontal)
    }

    fn mul(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        let c = self.space.multiply(f.component(0), g.component(0));
        SpectralField::from_coeffs(f.grid().clone(), vec![c])
    }

    fn bilinear(
        &self,
        ms: &MixedSpace,
        f: &SpectralField,
        g: &SpectralField,
    ) -> Result<SpectralField> {
        SpectralField::from_coeffs(
            f.grid().clone(),
            vec![ms.apply(f.component(0), g.component(0))],
        )
    }

    /// `[I_1, I_2, I_3, I_4, commutator]` for the scalar pair `(f, g)`.
    fn split(&self, f: &SpectralField, g: &SpectralField) -> Result<[SpectralField; 5]> {
        let (af, ag) = (self.a(f)?, self.a(g)?);
        let (baf, bag) = (self.b(&af)?, self.b(&ag)?);
        let i1 = self.b(&self.bilinear(&self.r_a, f, g)?)?;
        let i2 = self.b(&self.mul(&(&af - f), &(&ag - g))?)?.scale(-1.0);
        let i3 = self.bilinear(&self.r_b, &af, &ag)?;
        let i4 = self.mul(&(&baf - &af), &(&bag - &ag))?.scale(-1.0);
        let comm = &self.b(&self.a(&self.mul(f, g)?)?)? - &self.mul(&baf, &bag)?;
        Ok([i1, i2, i3, i4, comm])
    }
}

fn advecting(mode: DimMode) -> &'static [usize] {
    match mode {
        DimMode::ThreeD => &[0, 1],
        DimMode::TwoD => &[0],
    }
}

fn stack_parts(parts: &[[SpectralField; 5]], which: usize) -> Result<SpectralField> {
    let fields: Vec<SpectralField> = parts.iter().map(|p| p[which].clone()).collect();
    SpectralField::stack(&fields)
}

/// `I_1 .. I_8` at cutoff `N` for a hydrostatic `v`; `p` fixes the `L^{p'}_z` norm of `I_5, I_6`.
pub fn mollified_commutators(v: &SpectralField, n: i32, p: f64) -> Result<CommutatorTerms> {
    let mode = DimMode::of(v.grid())?;
    if v.components() != 2 {
        return invalid("commutators need a 2-component horizontal velocity");
    }
    if !(p >= 1.0) {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    let grid = v.grid();
    let mo = Mollifiers::new(grid, n)?;
    let w = diagnose_w(v)?;
    let comps: Vec<SpectralField> = (0..2).map(|b| v.select(b)).collect();

    let vv: Vec<[SpectralField; 5]> = advecting(mode)
        .iter()
        .flat_map(|&a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| mo.split(&comps[a], &comps[b]))
        .collect::<Result<_>>()?;
    let wv: Vec<[SpectralField; 5]> = comps
        .iter()
        .map(|c| mo.split(&w, c))
        .collect::<Result<_>>()?;

    let mut i = Vec::with_capacity(8);
    for k in 0..4 {
        i.push(stack_parts(&vv, k)?);
    }
    for k in 0..4 {
        i.push(stack_parts(&wv, k)?);
    }
    let p_dual = if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    };
    let za = grid.vertical_axis();
    let mut norms = [0.0; 8];
    for (k, f) in i.iter().enumerate() {
        let mag = inverse_transform(f).magnitude();
        norms[k] = match k {
            0..=3 => lp_of(&mag, 1.0, grid.cell_volume()),
            4 | 5 => mixed_norm(&mag, grid, za, p_dual, 1.0, true),
            _ => mixed_norm(&mag, grid, za, 2.0, 1.0, true),
        };
    }
    Ok(CommutatorTerms {
        n,
        mode,
        i,
        commutator_vv: stack_parts(&vv, 4)?,
        commutator_wv: stack_parts(&wv, 4)?,
        norms,
        p,
    })
}

/// `v_{<=N}`: mass-one mollification in z and in the horizontal directions.
pub fn mollified_velocity(v: &SpectralField, n: i32) -> Result<SpectralField> {
    let za = v.grid().vertical_axis();
    mollify(
        &mollify(v, n, Direction::Axis(za))?,
        n,
        Direction::Horizontal,
    )
}

/// `sum_{m<=4} <I_m, grad_H v_{<=N}> + sum_{m>=5} <I_m, d_z v_{<=N}>`.
pub fn flux_pairing(terms: &CommutatorTerms, v: &SpectralField) -> Result<f64> {
    let grid = v.grid();
    let vn = mollified_velocity(v, terms.n)?;
    let h = grid.horizontal_axes();
    let za = grid.vertical_axis();
    let grad_h: Vec<SpectralField> = advecting(terms.mode)
        .iter()
        .flat_map(|&a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| vn.select(b).derivative(h[a]))
        .collect();
    let grad_h = SpectralField::stack(&grad_h)?;
    let dz = vn.derivative(za);
    let mut total = 0.0;
    for (k, f) in terms.i.iter().enumerate() {
        total += f.inner(if k < 4 { &grad_h } else { &dz });
    }
    Ok(total)
}

/// The analytic field of the decay study: random phases under the envelope
/// `exp(-|k|_1 / 4)`, projected onto the hydrostatic space, unit `L^2` norm.
pub fn analytic_test_field(grid: &TorusGrid) -> Result<SpectralField> {
    InitialCondition::Smooth {
        seed: 5,
        decay: 4.0,
        amplitude: 1.0,
    }
    .build(grid)
}

/// One row of the decay table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub n: i32,
    pub norms: [f64; 8],
    pub residual_vv: f64,
    pub residual_wv: f64,
    /// `|grad_H v_{<=N}|_{L^inf}`.
    pub grad_h_inf: f64,
    /// `|d_z v_{<=N}|_{L^inf_H L^p_z}`.
    pub dz_lp: f64,
    /// `|d_z v_{<=N}|_{L^inf_H L^2_z}`.
    pub dz_l2: f64,
    pub flux_pairing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub p: f64,
    pub gamma: f64,
    pub rows: Vec<DecayRow>,
    /// Least-squares slopes of `log2 |I_m|` against `N`.
    pub slopes: [f64; 8],
    pub slope_grad_h: f64,
    pub slope_dz_lp: f64,
    pub slope_dz_l2: f64,
}

impl DecayReport {
    /// Upper bounds on the slopes of `I_1 .. I_8` (exponents plus `slack`).
    pub fn slope_bounds(&self, slack: f64) -> [f64; 8] {
        let a = -(1.0 + 2.0 / self.p) + slack;
        let b = -(1.0 + 1.0 / self.p) + slack;
        let c = -(1.0 - 2.0 / self.gamma) + slack;
        [a, a, a, a, b, b, c, c]
    }

    pub fn grad_bound(&self, slack: f64) -> f64 {
        1.0 + 2.0 / self.p + slack
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut header: Vec<String> = vec!["N".into()];
        header.extend((1..=8).map(|m| format!("I{m}")));
        header.extend(
            [
                "residual_vv",
                "residual_wv",
                "grad_H_inf",
                "dz_LinfH_Lp",
                "dz_LinfH_L2",
                "flux_pairing",
            ]
            .map(String::from),
        );
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![r.n as f64];
                row.extend(r.norms);
                row.extend([
                    r.residual_vv,
                    r.residual_wv,
                    r.grad_h_inf,
                    r.dz_lp,
                    r.dz_l2,
                    r.flux_pairing,
                ]);
                row
            })
            .collect();
        write_csv(path, &header, &rows)
    }
}

/// Ordinary least-squares slope of `log2 y` against `x`; an exactly vanishing
/// `y` counts as infinitely fast decay.
pub fn log2_slope(x: &[f64], y: &[f64]) -> f64 {
    if y.contains(&0.0) {
        return f64::NEG_INFINITY;
    }
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Commutator norms and mollified-gradient sizes over `n_list` with fitted rates.
pub fn decay_study(v: &SpectralField, n_list: &[i32], p: f64, gamma: f64) -> Result<DecayReport> {
    if n_list.len() < 4 {
        return invalid("decay fits need at least 4 cutoffs");
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("cutoffs must be strictly ascending");
    }
    let grid = v.grid();
    let za = grid.vertical_axis();
    let h = grid.horizontal_axes();
    let mode = DimMode::of(grid)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let t = mollified_commutators(v, n, p)?;
        let vn = mollified_velocity(v, n)?;
        let grad: Vec<SpectralField> = advecting(mode)
            .iter()
            .flat_map(|&a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| vn.select(b).derivative(h[a]))
            .collect();
        let grad_h_inf = inverse_transform(&SpectralField::stack(&grad)?)
            .magnitude()
            .into_iter()
            .fold(0.0, f64::max);
        let dz = inverse_transform(&vn.derivative(za)).magnitude();
        rows.push(DecayRow {
            n,
            norms: t.norms,
            residual_vv: t.residual_vv(),
            residual_wv: t.residual_wv(),
            grad_h_inf,
            dz_lp: mixed_norm(&dz, grid, za, p, f64::INFINITY, true),
            dz_l2: mixed_norm(&dz, grid, za, 2.0, f64::INFINITY, true),
            flux_pairing: flux_pairing(&t, v)?,
        });
    }
    let x: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let col = |f: &dyn Fn(&DecayRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    let mut slopes = [0.0; 8];
    for (m, s) in slopes.iter_mut().enumerate() {
        *s = log2_slope(&x, &col(&|r| r.norms[m]));
    }
    Ok(DecayReport {
        p,
        gamma,
        slopes,
        slope_grad_h: log2_slope(&x, &col(&|r| r.grad_h_inf)),
        slope_dz_lp: log2_slope(&x, &col(&|r| r.dz_lp)),
        slope_dz_l2: log2_slope(&x, &col(&|r| r.dz_l2)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrostatic::project_h;
    use crate::rng::random_field;

    #[test]
    fn zero_field_has_zero_terms() {
        let g = TorusGrid::cube(8, 8, 16, 1.0).unwrap();
        let t = mollified_commutators(&SpectralField::zeros(&g, 2), 2, 4.0).unwrap();
        assert!(t.i.iter().all(|f| f.max_abs_coeff() == 0.0));
        assert_eq!(t.norms, [0.0; 8]);
    }

    #[test]
    fn identities_hold_on_random_fields() {
        for g in [
            TorusGrid::cube(16, 16, 16, 1.0).unwrap(),
            TorusGrid::plane(32, 32, 1.0).unwrap(),
        ] {
            let v = project_h(&random_field(&g, 2, 6, 11)).unwrap();
            for n in [1, 2, 3] {
                let t = mollified_commutators(&v, n, 4.0).unwrap();
                assert!(t.residual_vv() < 1e-10, "vv {}", t.residual_vv());
                assert!(t.residual_wv() < 1e-10, "wv {}", t.residual_wv());
            }
        }
    }

    #[test]
    fn band_limited_fields_leave_only_translation_terms() {
        // |k| <= 3 < 2^{N-1} for N = 4: both mollifiers act as the identity
        let g = TorusGrid::cube(16, 16, 32, 1.0).unwrap();
        let v = project_h(&random_field(&g, 2, 2, 3)).unwrap();
        let t = mollified_commutators(&v, 4, 4.0).unwrap();
        for k in [1, 3, 5, 7] {
            assert_eq!(t.i[k].max_abs_coeff(), 0.0, "I{}", k + 1);
        }
    }

    #[test]
    fn out_of_range_cutoff_is_rejected() {
        let g = TorusGrid::plane(16, 16, 1.0).unwrap();
        let v = SpectralField::zeros(&g, 2);
        assert!(matches!(
            mollified_commutators(&v, 40, 4.0),
            Err(crate::PeError::InvalidInput(_))
        ));
    }

    #[test]
    fn slope_fit() {
        let x = [2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|n: &f64| 3.0 * 2f64.powf(-1.5 * n)).collect();
        assert!((log2_slope(&x, &y) + 1.5).abs() < 1e-12);
        assert_eq!(log2_slope(&x, &[1.0, 0.0, 1.0, 1.0]), f64::NEG_INFINITY);
    }
}
