//! Dyadic frequency decomposition on toroidal axes.
//!
//! The cutoff is `chi(xi) = 1` for `|xi| <= 1/2`, `0` for `|xi| >= 1`, and
//! `S(2(1 - |xi|))` in between, with `S(t) = h(t) / (h(t) + h(1 - t))` and
//! `h(t) = exp(-1/t)` for `t > 0`. Blocks use `rho(xi) = chi(xi/2) - chi(xi)`
//! evaluated at `2^{-j} k / lambda`.

use std::ops::RangeInclusive;

use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::TorusGrid;

fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smooth_step(t: f64) -> f64 {
    let a = h(t);
    let b = h(1.0 - t);
    a / (a + b)
}

/// Smooth radial cutoff, `1` on `|xi| <= 1/2` and `0` on `|xi| >= 1`.
pub fn chi(xi: f64) -> f64 {
    let r = xi.abs();
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        smooth_step(2.0 * (1.0 - r))
    }
}

pub fn rho(xi: f64) -> f64 {
    chi(xi / 2.0) - chi(xi)
}

/// Multiplier of block `j` at physical frequency `xi = k / lambda`.
pub fn block_multiplier(j: i32, xi: f64) -> f64 {
    rho(xi * 2f64.powi(-j))
}

/// Multiplier equal to one on the support of block `j`.
pub fn fattened_multiplier(j: i32, xi: f64) -> f64 {
    block_multiplier(j - 1, xi) + block_multiplier(j, xi) + block_multiplier(j + 1, xi)
}

/// Which frequencies a mollifier or block family acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// A single axis.
    Axis(usize),
    /// All horizontal axes jointly, through the radial wavenumber `|k_H / lambda|`.
    Horizontal,
}

/// Block indices whose annulus meets frequencies in `[lo, hi]`.
fn range_for(lo: f64, hi: f64) -> RangeInclusive<i32> {
    // rho_j is nonzero only on 2^{j-1} < |xi| < 2^{j+1}.
    let mut jmin = (lo.log2().floor() as i32) - 2;
    while 2f64.powi(jmin + 1) <= lo {
        jmin += 1;
    }
    let mut jmax = (hi.log2().ceil() as i32) + 2;
    while 2f64.powi(jmax - 1) >= hi {
        jmax -= 1;
    }
    jmin..=jmax
}

/// Every `j` for which block `j` can be nonzero on a representable wavenumber
/// of `axis`; all other blocks vanish identically on the grid.
pub fn block_range(grid: &TorusGrid, axis: usize) -> RangeInclusive<i32> {
    let l = grid.lambda()[axis];
    let n = grid.sizes()[axis] as f64;
    range_for(1.0 / l, n / 2.0 / l)
}

fn horizontal_range(grid: &TorusGrid) -> RangeInclusive<i32> {
    let axes = grid.horizontal_axes();
    let lo = axes
        .iter()
        .map(|&a| 1.0 / grid.lambda()[a])
        .fold(f64::INFINITY, f64::min);
    let hi = axes
        .iter()
        .map(|&a| (grid.sizes()[a] as f64 / 2.0 / grid.lambda()[a]).powi(2))
        .sum::<f64>()
        .sqrt();
    range_for(lo, hi)
}

fn direction_range(grid: &TorusGrid, dir: Direction) -> RangeInclusive<i32> {
    match dir {
        Direction::Axis(a) => block_range(grid, a),
        Direction::Horizontal => horizontal_range(grid),
    }
}

fn check_direction(grid: &TorusGrid, dir: Direction) -> Result<()> {
    match dir {
        Direction::Axis(a) => grid.check_axis(a),
        Direction::Horizontal => {
            if grid.horizontal_axes().is_empty() {
                crate::error::invalid("grid has no horizontal axes")
            } else {
                Ok(())
            }
        }
    }
}

/// Applies a radial multiplier `m(|xi|)` in the given direction.
fn apply(u: &SpectralField, dir: Direction, m: impl Fn(f64) -> f64) -> SpectralField {
    match dir {
        Direction::Axis(a) => u.axis_multiplier(a, m),
        Direction::Horizontal => {
            let axes = u.grid().horizontal_axes();
            u.map_modes(|xi, _| {
                let r = axes.iter().map(|&a| xi[a] * xi[a]).sum::<f64>().sqrt();
                m(r).into()
            })
        }
    }
}

/// `Delta_j u`: multiplies the coefficient at `k` by `rho(2^{-j} k / lambda)`.
pub fn dyadic_block(u: &SpectralField, j: i32, axis: usize) -> Result<SpectralField> {
    u.grid().check_axis(axis)?;
    Ok(u.axis_multiplier(axis, |xi| block_multiplier(j, xi)))
}

/// Block `j` in the given direction (radial for [`Direction::Horizontal`]).
pub fn dyadic_block_dir(u: &SpectralField, j: i32, dir: Direction) -> Result<SpectralField> {
    check_direction(u.grid(), dir)?;
    Ok(apply(u, dir, |xi| block_multiplier(j, xi)))
}

/// Largest deviation of `sum_j rho_j` from one over the nonzero wavenumbers of `axis`.
pub fn verify_partition(grid: &TorusGrid, axis: usize) -> Result<f64> {
    grid.check_axis(axis)?;
    let range = block_range(grid, axis);
    Ok(grid
        .frequencies(axis)
        .into_iter()
        .filter(|xi| *xi != 0.0)
        .map(|xi| {
            let s: f64 = range.clone().map(|j| block_multiplier(j, xi)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max))
}

/// `P_m u = sum_{j <= m - 3} Delta_j u` along `axis`.
pub fn low_pass(u: &SpectralField, m: i32, axis: usize) -> Result<SpectralField> {
    let grid = u.grid();
    grid.check_axis(axis)?;
    let range = block_range(grid, axis);
    let lo = *range.start();
    let hi = (m - 3).min(*range.end());
    Ok(u.axis_multiplier(axis, |xi| (lo..=hi).map(|j| block_multiplier(j, xi)).sum()))
}

/// Multiplier of `sum_{j <= n} Delta_j` restricted to the block range `range`.
fn partial_sum(range: &RangeInclusive<i32>, n: i32, xi: f64) -> f64 {
    let hi = n.min(*range.end());
    (*range.start()..=hi).map(|j| block_multiplier(j, xi)).sum()
}

/// `psi_N * u = sum_{j <= N} Delta_j u` in the given direction. Kills the
/// mean in that direction; tends to `u - mean` as `N` grows.
pub fn mollify_lowpass(u: &SpectralField, n: i32, dir: Direction) -> Result<SpectralField> {
    check_direction(u.grid(), dir)?;
    let range = direction_range(u.grid(), dir);
    Ok(apply(u, dir, |xi| partial_sum(&range, n, xi)))
}

/// Mass-one mollifier at scale `N`: [`mollify_lowpass`] plus the mean in that
/// direction, i.e. the multiplier `chi(2^{-(N+1)} |xi|)` including `xi = 0`.
/// This is the torus realisation of convolution with a unit-mass kernel
/// rescaled by `2^{-N}`, which is what translation-difference integrals need.
pub fn mollify(u: &SpectralField, n: i32, dir: Direction) -> Result<SpectralField> {
    check_direction(u.grid(), dir)?;
    let range = direction_range(u.grid(), dir);
    Ok(apply(u, dir, |xi| {
        if xi == 0.0 {
            1.0
        } else {
            partial_sum(&range, n, xi)
        }
    }))
}

/// Symbol of [`mollify`] as a function of `|xi|` on `grid`.
pub fn mollifier_symbol(grid: &TorusGrid, n: i32, dir: Direction) -> Result<impl Fn(f64) -> f64> {
    check_direction(grid, dir)?;
    let range = direction_range(grid, dir);
    Ok(move |xi: f64| {
        if xi == 0.0 {
            1.0
        } else {
            partial_sum(&range, n, xi)
        }
    })
}

/// `phi~_j * u` with multiplier `rho_{j-1} + rho_j + rho_{j+1}`.
pub fn fattened_block(u: &SpectralField, j: i32, axis: usize) -> Result<SpectralField> {
    u.grid().check_axis(axis)?;
    Ok(u.axis_multiplier(axis, |xi| fattened_multiplier(j, xi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::project_mean_zero;
    use crate::grid::TorusGrid;
    use crate::rng::random_field;

    fn cosine(n: usize, k: f64) -> SpectralField {
        // exact coefficients, free of transform roundoff
        let g = TorusGrid::line(n, 1.0).unwrap();
        let k = k as usize;
        let mut c = vec![num_complex::Complex64::new(0.0, 0.0); n];
        if k == 0 {
            c[0].re = 1.0;
        } else {
            c[k].re = 0.5;
            c[n - k].re = 0.5;
        }
        SpectralField::from_coeffs(g, vec![c]).unwrap()
    }

    fn close(a: &SpectralField, b: &SpectralField, tol: f64) -> bool {
        (a - b).max_abs_coeff() <= tol
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(-0.3), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert!((chi(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let x = 0.5 + 0.5 * i as f64 / 100.0;
            let c = chi(x);
            assert!(c <= prev + 1e-15);
            prev = c;
        }
        for i in 0..400 {
            let x = -3.0 + 6.0 * i as f64 / 400.0;
            assert!(rho(x) >= 0.0);
            if x.abs() <= 0.5 || x.abs() >= 2.0 {
                assert_eq!(rho(x), 0.0);
            }
        }
        assert_eq!(rho(1.0), 1.0);
    }

    #[test]
    fn block_examples() {
        let c1 = cosine(32, 1.0);
        assert!(close(&dyadic_block(&c1, 0, 0).unwrap(), &c1, 1e-16));
        assert!(dyadic_block(&c1, 1, 0).unwrap().max_abs_coeff() == 0.0);
        assert!(dyadic_block(&c1, -1, 0).unwrap().max_abs_coeff() == 0.0);
        let c3 = cosine(32, 3.0);
        let half = c3.scale(0.5);
        assert!(close(&dyadic_block(&c3, 1, 0).unwrap(), &half, 1e-15));
        assert!(close(&dyadic_block(&c3, 2, 0).unwrap(), &half, 1e-15));
        let z = SpectralField::zeros(c1.grid(), 1);
        for j in -3..6 {
            assert_eq!(dyadic_block(&z, j, 0).unwrap().max_abs_coeff(), 0.0);
        }
    }

    #[test]
    fn partition_single_wavenumber() {
        // k = 5: blocks j = 2 and j = 3 carry chi(5/8) and 1 - chi(5/8).
        let a = block_multiplier(2, 5.0);
        let b = block_multiplier(3, 5.0);
        assert!((a - chi(5.0 / 8.0)).abs() < 1e-15);
        assert!((b - (chi(5.0 / 16.0) - chi(5.0 / 8.0))).abs() < 1e-15);
        assert!((a + b - 1.0).abs() < 1e-15);
        for j in [-1, 0, 1, 4, 5] {
            assert_eq!(block_multiplier(j, 5.0), 0.0);
        }
    }

    #[test]
    fn partition_on_grids() {
        for &(n, l) in &[(64usize, 1.0), (64, 2.0), (256, 0.5), (4, 1.0)] {
            let g = TorusGrid::line(n, l).unwrap();
            assert!(verify_partition(&g, 0).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn range_covers_all_nonzero_blocks() {
        let g = TorusGrid::line(64, 2.0).unwrap();
        let r = block_range(&g, 0);
        for xi in g.frequencies(0) {
            for j in -12..12 {
                if !r.contains(&j) {
                    assert_eq!(block_multiplier(j, xi), 0.0, "j={j} xi={xi}");
                }
            }
        }
    }

    #[test]
    fn low_pass_examples() {
        let c1 = cosine(32, 1.0);
        assert!(close(&low_pass(&c1, 3, 0).unwrap(), &c1, 1e-16));
        assert_eq!(low_pass(&c1, 2, 0).unwrap().max_abs_coeff(), 0.0);
        let one = cosine(32, 0.0);
        for m in -2..10 {
            assert_eq!(low_pass(&one, m, 0).unwrap().max_abs_coeff(), 0.0);
        }
    }

    #[test]
    fn mollifier_examples() {
        let g = TorusGrid::line(64, 1.0).unwrap();
        let u = random_field(&g, 1, 3, 5);
        let u0 = project_mean_zero(&u, 0).unwrap();
        // max |k| = 3 < 2^{N-1} for N = 3
        assert!(close(
            &mollify_lowpass(&u0, 3, Direction::Axis(0)).unwrap(),
            &u0,
            1e-15
        ));
        let one = cosine(64, 0.0);
        assert_eq!(
            mollify_lowpass(&one, 4, Direction::Axis(0))
                .unwrap()
                .max_abs_coeff(),
            0.0
        );
        let high = cosine(64, 16.0);
        assert_eq!(
            mollify_lowpass(&high, 2, Direction::Axis(0))
                .unwrap()
                .max_abs_coeff(),
            0.0
        );
        // mass-one variant keeps the mean
        assert!(close(
            &mollify(&one, 4, Direction::Axis(0)).unwrap(),
            &one,
            0.0
        ));
    }

    #[test]
    fn fattened_block_examples() {
        let g = TorusGrid::line(64, 1.0).unwrap();
        let u = random_field(&g, 1, 20, 9);
        let b0 = dyadic_block(&u, 0, 0).unwrap();
        assert!(close(&fattened_block(&b0, 0, 0).unwrap(), &b0, 1e-15));
        let c3 = cosine(64, 3.0);
        assert!(close(&fattened_block(&c3, 2, 0).unwrap(), &c3, 1e-15));
        let z = SpectralField::zeros(&g, 1);
        assert_eq!(fattened_block(&z, 1, 0).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn horizontal_radial_blocks_partition() {
        let g = TorusGrid::cube(16, 16, 8, 1.0).unwrap();
        let u = random_field(&g, 1, 7, 1);
        let h_mean = crate::field::axis_mean(&crate::field::axis_mean(&u, 0).unwrap(), 1).unwrap();
        // sum of radial blocks = u minus its horizontal mean
        let r = super::horizontal_range(&g);
        let mut acc = SpectralField::zeros(&g, 1);
        for j in r {
            acc = &acc + &dyadic_block_dir(&u, j, Direction::Horizontal).unwrap();
        }
        let resid = &(&acc + &h_mean) - &u;
        assert!(resid.max_abs_coeff() < 1e-14);
    }
}
