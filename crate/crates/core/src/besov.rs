//! Anisotropic homogeneous Besov norms on toroidal axes.

use std::fmt;
use std::str::FromStr;

use crate::error::{constraint, invalid, PeError, Result};
use crate::field::{inverse_transform, lp_of, SpectralField};
use crate::grid::TorusGrid;
use crate::littlewood_paley::{block_range, dyadic_block};

/// Axis carrying the dyadic decomposition, named by its geometric role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Z,
    X1,
    X2,
}

impl AxisName {
    /// Grid index of this axis.
    pub fn resolve(self, grid: &TorusGrid) -> Result<usize> {
        match self {
            AxisName::Z => Ok(grid.vertical_axis()),
            AxisName::X1 | AxisName::X2 => {
                let h = grid.horizontal_axes();
                let i = if self == AxisName::X1 { 0 } else { 1 };
                h.get(i)
                    .copied()
                    .ok_or_else(|| PeError::InvalidInput(format!("grid has no axis {self}")))
            }
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisName::Z => "z",
            AxisName::X1 => "x1",
            AxisName::X2 => "x2",
        })
    }
}

/// Norm over the axes other than the decomposition axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerNorm {
    /// No split: `L^p` over the whole torus.
    None,
    LinfH,
    L2H,
}

impl InnerNorm {
    fn exponent(self) -> Option<f64> {
        match self {
            InnerNorm::None => None,
            InnerNorm::LinfH => Some(f64::INFINITY),
            InnerNorm::L2H => Some(2.0),
        }
    }
}

impl fmt::Display for InnerNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnerNorm::None => "none",
            InnerNorm::LinfH => "LinfH",
            InnerNorm::L2H => "L2H",
        })
    }
}

/// Whether the horizontal norm is taken inside (`L^p_z(L^inf_H)`) or outside
/// (`L^inf_H(L^p_z)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerOrder {
    #[default]
    Inside,
    Outside,
}

/// Descriptor of `B^s_{p,q}` along `axis` with an optional mixed inner norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub axis: AxisName,
    pub inner: InnerNorm,
    pub order: InnerOrder,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64, axis: AxisName, inner: InnerNorm) -> Self {
        Self {
            s,
            p,
            q,
            axis,
            inner,
            order: InnerOrder::Inside,
        }
    }

    /// `B^s_{p,q}` along z without inner splitting.
    pub fn along_z(s: f64, p: f64, q: f64) -> Self {
        Self::new(s, p, q, AxisName::Z, InnerNorm::None)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return invalid("regularity s must be finite");
        }
        if self.p.is_nan() || self.p < 1.0 || self.q.is_nan() || self.q < 1.0 {
            return invalid(format!("need p, q >= 1, got p={}, q={}", self.p, self.q));
        }
        Ok(())
    }

    /// CSV column name `B{s}_{p}_{q}_{axis}_{inner}`.
    pub fn column_name(&self) -> String {
        let mut name = format!(
            "B{}_{}_{}_{}_{}",
            self.s,
            fmt_exp(self.p),
            fmt_exp(self.q),
            self.axis,
            self.inner
        );
        if self.order == InnerOrder::Outside {
            name.push_str("outer");
        }
        name
    }
}

fn fmt_exp(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn parse_exp(v: &str) -> Result<f64> {
    match v.trim() {
        "inf" | "Inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse()
            .map_err(|_| PeError::InvalidInput(format!("bad number {t:?}"))),
    }
}

impl FromStr for BesovSpec {
    type Err = PeError;

    /// Parses `s=-0.25,p=4,q=inf,axis=z,inner=LinfH[,order=outside]`.
    fn from_str(text: &str) -> Result<Self> {
        let mut spec = BesovSpec::along_z(0.0, 2.0, 2.0);
        let mut seen_s = false;
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                PeError::InvalidInput(format!("expected key=value, got {part:?}"))
            })?;
            let v = v.trim();
            match k.trim() {
                "s" => {
                    spec.s = parse_exp(v)?;
                    seen_s = true;
                }
                "p" => spec.p = parse_exp(v)?,
                "q" => spec.q = parse_exp(v)?,
                "axis" => {
                    spec.axis = match v {
                        "z" => AxisName::Z,
                        "x1" => AxisName::X1,
                        "x2" => AxisName::X2,
                        _ => return invalid(format!("unknown axis {v:?}")),
                    }
                }
                "inner" => {
                    spec.inner = match v {
                        "LinfH" => InnerNorm::LinfH,
                        "L2H" => InnerNorm::L2H,
                        "none" => InnerNorm::None,
                        _ => return invalid(format!("unknown inner norm {v:?}")),
                    }
                }
                "order" => {
                    spec.order = match v {
                        "inside" => InnerOrder::Inside,
                        "outside" => InnerOrder::Outside,
                        _ => return invalid(format!("unknown order {v:?}")),
                    }
                }
                other => return invalid(format!("unknown key {other:?}")),
            }
        }
        if !seen_s {
            return invalid("spec needs s=");
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Mixed norm of `values` (one real per grid point): `L^{p_axis}` along
/// `axis` and `L^{p_rest}` over the remaining axes, the axis norm taken first
/// when `axis_inside`.
pub fn mixed_norm(
    values: &[f64],
    grid: &TorusGrid,
    axis: usize,
    p_axis: f64,
    p_rest: f64,
    axis_inside: bool,
) -> f64 {
    let n = grid.sizes()[axis];
    let stride = grid.strides()[axis];
    let rest = grid.len() / n;
    let w_axis = 2.0 * std::f64::consts::PI * grid.lambda()[axis] / n as f64;
    let w_rest = grid.cell_volume() / w_axis;
    let flat = |r: usize, m: usize| {
        let outer = r / stride;
        let inner = r % stride;
        outer * n * stride + m * stride + inner
    };
    if axis_inside {
        let fibres: Vec<f64> = (0..rest)
            .map(|r| {
                let line: Vec<f64> = (0..n).map(|m| values[flat(r, m)]).collect();
                lp_of(&line, p_axis, w_axis)
            })
            .collect();
        lp_of(&fibres, p_rest, w_rest)
    } else {
        let slabs: Vec<f64> = (0..n)
            .map(|m| {
                let slab: Vec<f64> = (0..rest).map(|r| values[flat(r, m)]).collect();
                lp_of(&slab, p_rest, w_rest)
            })
            .collect();
        lp_of(&slabs, p_axis, w_axis)
    }
}

/// Block norm `a_j` of a block field, per the spec's inner norm and order.
fn block_norm(block: &SpectralField, spec: &BesovSpec, axis: usize) -> f64 {
    let phys = inverse_transform(block);
    let mag = phys.magnitude();
    let grid = block.grid();
    match spec.inner.exponent() {
        None => lp_of(&mag, spec.p, grid.cell_volume()),
        Some(pr) => mixed_norm(
            &mag,
            grid,
            axis,
            spec.p,
            pr,
            spec.order == InnerOrder::Outside,
        ),
    }
}

/// Weighted block norms `(j, 2^{sj} a_j)` in ascending `j`.
pub fn weighted_blocks(u: &SpectralField, spec: &BesovSpec) -> Result<Vec<(i32, f64)>> {
    spec.validate()?;
    let axis = spec.axis.resolve(u.grid())?;
    block_range(u.grid(), axis)
        .map(|j| {
            let b = dyadic_block(u, j, axis)?;
            Ok((j, 2f64.powf(spec.s * j as f64) * block_norm(&b, spec, axis)))
        })
        .collect()
}

/// `l^q` sum of `2^{sj} a_j`; the zero mode along the axis never contributes.
pub fn besov_norm(u: &SpectralField, spec: &BesovSpec) -> Result<f64> {
    let w = weighted_blocks(u, spec)?;
    Ok(lq(w.iter().map(|(_, a)| *a), spec.q))
}

fn lq(vals: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        vals.fold(0.0, f64::max)
    } else {
        vals.map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `(-d_zz)^{s/2}` along `axis`: multiplies by `|k/lambda|^s`, zeroing `k = 0`.
pub fn frac_derivative(u: &SpectralField, s: f64, axis: usize) -> Result<SpectralField> {
    u.grid().check_axis(axis)?;
    Ok(u.axis_multiplier(axis, |xi| if xi == 0.0 { 0.0 } else { xi.abs().powf(s) }))
}

/// Exponents `(beta, p, gamma)` of the scaling-invariant uniqueness class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerrinExponents {
    pub beta: f64,
    pub p: f64,
    pub gamma: f64,
}

/// Accepts iff `2 < p, beta < inf`, `2/beta + 2/p = 1` (to 1e-12) and `2 < gamma < inf`.
pub fn validate_exponents(beta: f64, p: f64, gamma: f64) -> Result<SerrinExponents> {
    for (name, v) in [("p", p), ("beta", beta)] {
        if !(v.is_finite() && v > 2.0) {
            return constraint(format!("requires 2 < {name} < inf, got {name} = {v}"));
        }
    }
    let lhs = 2.0 / beta + 2.0 / p;
    if (lhs - 1.0).abs() > 1e-12 {
        return constraint(format!("requires 2/beta + 2/p = 1, got {lhs}"));
    }
    if !(gamma.is_finite() && gamma > 2.0) {
        return constraint(format!("requires 2 < gamma < inf, got gamma = {gamma}"));
    }
    Ok(SerrinExponents { beta, p, gamma })
}

/// Spatial part of the parabolic rescaling: `u_m(x) = 2^m u(2^m x)` on the
/// torus of scale `lambda / 2^m`.
pub fn rescale_dyadic(u: &SpectralField, m: i32) -> Result<SpectralField> {
    let f = 2f64.powi(m);
    let lambda: Vec<f64> = u.grid().lambda().iter().map(|l| l / f).collect();
    let grid = u.grid().with_lambda(lambda)?;
    Ok(u.scale(f).regrid(grid))
}

/// Ratio `|u|_{B^{s0}_{p0,q}} / |u|_{B^{s1}_{p1,q}}` of the Sobolev-type
/// embedding along the vertical axis (fibrewise, sup over horizontal points
/// for multi-dimensional grids).
pub fn sobolev_embed_check(
    u: &SpectralField,
    s1: f64,
    p1: f64,
    s0: f64,
    p0: f64,
    q: f64,
) -> Result<f64> {
    if ((s1 - 1.0 / p1) - (s0 - 1.0 / p0)).abs() > 1e-12 {
        return constraint("embedding requires s1 - 1/p1 = s0 - 1/p0");
    }
    if s0 > s1 || p1 > p0 {
        return constraint("embedding requires s0 <= s1 and p1 <= p0");
    }
    let (inner, order) = if u.grid().n_dims() == 1 {
        (InnerNorm::None, InnerOrder::Inside)
    } else {
        (InnerNorm::LinfH, InnerOrder::Outside)
    };
    let mk = |s, p| BesovSpec {
        s,
        p,
        q,
        axis: AxisName::Z,
        inner,
        order,
    };
    let top = besov_norm(u, &mk(s0, p0))?;
    let bottom = besov_norm(u, &mk(s1, p1))?;
    if bottom == 0.0 {
        return invalid("embedding ratio undefined for a field with zero norm");
    }
    Ok(top / bottom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{forward_transform, project_mean_zero, PhysicalField};
    use crate::rng::random_field;
    use std::f64::consts::PI;

    fn line_field(n: usize, f: impl Fn(f64) -> f64) -> SpectralField {
        let g = TorusGrid::line(n, 1.0).unwrap();
        forward_transform(&PhysicalField::from_fn(&g, |x| f(x[0]))).unwrap()
    }

    #[test]
    fn cosine_on_cube_mixed_norm() {
        let g = TorusGrid::cube(8, 8, 32, 1.0).unwrap();
        let u = forward_transform(&PhysicalField::from_fn(&g, |x| x[2].cos())).unwrap();
        let spec = BesovSpec::new(-0.5, 2.0, f64::INFINITY, AxisName::Z, InnerNorm::LinfH);
        assert!((besov_norm(&u, &spec).unwrap() - PI.sqrt()).abs() < 1e-12);
        let z = SpectralField::zeros(&g, 2);
        assert_eq!(besov_norm(&z, &spec).unwrap(), 0.0);
    }

    #[test]
    fn single_block_weight() {
        let u = line_field(64, |z| (4.0 * z).cos());
        for s in [-1.0, -0.25, 0.0, 0.7] {
            let n = besov_norm(&u, &BesovSpec::along_z(s, 2.0, f64::INFINITY)).unwrap();
            assert!((n - 2f64.powf(2.0 * s) * PI.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn frac_derivative_examples() {
        let c1 = line_field(32, f64::cos);
        assert!((&frac_derivative(&c1, 1.0, 0).unwrap() - &c1).max_abs_coeff() < 1e-15);
        let c2 = line_field(32, |z| (2.0 * z).cos());
        let d = frac_derivative(&c2, 2.0, 0).unwrap();
        // transform roundoff in high modes is amplified by |k|^2 <= 256
        assert!((&d - &c2.scale(4.0)).max_abs_coeff() < 1e-13);
        let u = project_mean_zero(&random_field(c1.grid(), 1, 10, 3), 0).unwrap();
        let back = frac_derivative(&frac_derivative(&u, -1.0, 0).unwrap(), 1.0, 0).unwrap();
        assert!((&back - &u).max_abs_coeff() < 1e-12);
    }

    #[test]
    fn exponent_validation() {
        assert!(validate_exponents(4.0, 4.0, 3.0).is_ok());
        assert!(validate_exponents(3.0, 6.0, 4.0).is_ok());
        assert!(matches!(
            validate_exponents(2.0, 2.0, 3.0),
            Err(PeError::Constraint(_))
        ));
        assert!(validate_exponents(4.0, 4.0, 2.0).is_err());
        assert!(validate_exponents(5.0, 4.0, 3.0).is_err());
    }

    #[test]
    fn rescale_examples() {
        let u = line_field(32, f64::cos);
        assert_eq!(rescale_dyadic(&u, 0).unwrap(), u);
        let r = rescale_dyadic(&u, 1).unwrap();
        assert_eq!(r.grid().lambda()[0], 0.5);
        let phys = crate::field::inverse_transform(&r);
        for (z, v) in r.grid().coordinates(0).iter().zip(phys.component(0)) {
            assert!((v - 2.0 * (2.0 * z).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn embedding_ratio_for_cosine() {
        let u = line_field(32, f64::cos);
        let r = sobolev_embed_check(&u, 0.5, 2.0, 0.0, f64::INFINITY, f64::INFINITY).unwrap();
        assert!((r - 1.0 / PI.sqrt()).abs() < 1e-12);
        let z = SpectralField::zeros(u.grid(), 1);
        assert!(sobolev_embed_check(&z, 0.5, 2.0, 0.0, f64::INFINITY, 2.0).is_err());
        assert!(sobolev_embed_check(&u, 0.5, 2.0, 0.0, 4.0, 2.0).is_err());
    }

    #[test]
    fn spec_parsing_and_columns() {
        let s: BesovSpec = "s=-0.25,p=4,q=inf,axis=z,inner=LinfH".parse().unwrap();
        assert_eq!(
            s,
            BesovSpec::new(-0.25, 4.0, f64::INFINITY, AxisName::Z, InnerNorm::LinfH)
        );
        assert_eq!(s.column_name(), "B-0.25_4_inf_z_LinfH");
        assert!("p=4".parse::<BesovSpec>().is_err());
        assert!("s=1,p=0.5".parse::<BesovSpec>().is_err());
        assert!("s=1,axis=y".parse::<BesovSpec>().is_err());
    }

    #[test]
    fn mixed_norm_orders() {
        // f(x, z) = (1 + x-dependent) * g(z): check both orders against direct sums.
        let g = TorusGrid::plane(8, 16, 1.0).unwrap();
        let f = PhysicalField::from_fn(&g, |x| (2.0 + x[0].cos()) * x[1].sin());
        let v = f.component(0);
        let inside = mixed_norm(v, &g, 1, 2.0, f64::INFINITY, false);
        // sup_x |f| = 3 |sin z|, L2_z of that = 3 sqrt(pi)
        assert!((inside - 3.0 * PI.sqrt()).abs() < 1e-12);
        let outside = mixed_norm(v, &g, 1, 2.0, f64::INFINITY, true);
        assert!((outside - 3.0 * PI.sqrt()).abs() < 1e-12);
        let l1 = mixed_norm(v, &g, 1, 2.0, 1.0, true);
        // int_x (2 + cos x) dx * sqrt(pi) = 4 pi sqrt(pi)
        assert!((l1 - 4.0 * PI * PI.sqrt()).abs() < 1e-12);
    }
}
