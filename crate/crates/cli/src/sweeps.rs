//! Randomised property sweeps behind `pe proptest`.

use pe_core::analysis::{direct_flux, flux_decompose, mollified_commutators};
use pe_core::besov::{besov_norm, frac_derivative, rescale_dyadic, BesovSpec};
use pe_core::field::{inverse_transform, project_mean_zero, quadrature_norm, SpectralField};
use pe_core::hydrostatic::project_h;
use pe_core::littlewood_paley::{block_range, dyadic_block, verify_partition};
use pe_core::rng::random_field;
use pe_core::{Result, TorusGrid};

/// Outcome of one sweep: how many checks ran, how many failed, the worst statistic.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub name: &'static str,
    pub checks: usize,
    pub violations: usize,
    pub worst: f64,
}

impl Sweep {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            violations: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, stat: f64, ok: bool) {
        self.checks += 1;
        self.worst = self.worst.max(stat);
        if !ok {
            self.violations += 1;
        }
    }
}

fn mean_free_line(n: usize, seed: u64) -> Result<SpectralField> {
    let g = TorusGrid::line(n, 1.0)?;
    project_mean_zero(&random_field(&g, 1, n / 2 - 1, seed), 0)
}

pub fn partition() -> Result<Sweep> {
    let mut s = Sweep::new("partition");
    for lambda in [1.0, 2.0, 0.5] {
        for n in [8, 16, 32, 64, 128, 256] {
            let dev = verify_partition(&TorusGrid::line(n, lambda)?, 0)?;
            s.record(dev, dev <= 1e-12);
        }
    }
    Ok(s)
}

pub fn equivalence(cases: usize, seed: u64) -> Result<Sweep> {
    let mut s = Sweep::new("equivalence");
    let b0: BesovSpec = "s=0,p=2,q=2,axis=z,inner=none".parse()?;
    let b1: BesovSpec = "s=1,p=2,q=2,axis=z,inner=none".parse()?;
    for c in 0..cases {
        let u = mean_free_line(64, seed + c as u64)?;
        let l2 = u.inner(&u);
        let r0 = besov_norm(&u, &b0)?.powi(2) / l2;
        s.record(r0, (0.5..=1.0 + 1e-12).contains(&r0));
        let du = u.derivative(0);
        let r1 = besov_norm(&u, &b1)?.powi(2) / du.inner(&du);
        s.record(r1, (0.125..=4.0).contains(&r1));
    }
    Ok(s)
}

pub fn bernstein(cases: usize, seed: u64) -> Result<Sweep> {
    let mut s = Sweep::new("bernstein");
    let g = TorusGrid::line(64, 1.0)?;
    for c in 0..cases {
        let u = mean_free_line(64, seed + 1000 + c as u64)?;
        for j in block_range(&g, 0) {
            let b = dyadic_block(&u, j, 0)?;
            if b.max_abs_coeff() < 1e-14 {
                continue;
            }
            let phys_b = inverse_transform(&b);
            for sv in [-1.0, -0.5, 0.5, 1.0, 2.0] {
                let d = inverse_transform(&frac_derivative(&b, sv, 0)?);
                for p in [1.0, 2.0, 4.0, f64::INFINITY] {
                    let ratio = quadrature_norm(&d, p)?
                        / (2f64.powf(sv * j as f64) * quadrature_norm(&phys_b, p)?);
                    s.record(
                        ratio / 2f64.powf(sv.abs() + 1.0),
                        ratio <= 2f64.powf(sv.abs() + 1.0),
                    );
                }
            }
        }
    }
    Ok(s)
}

pub fn scaling(cases: usize, seed: u64) -> Result<Sweep> {
    let mut s = Sweep::new("scaling");
    let spec: BesovSpec = "s=-0.25,p=4,q=inf,axis=z,inner=none".parse()?;
    for c in 0..cases {
        let u = mean_free_line(64, seed + 2000 + c as u64)?;
        let r = besov_norm(&rescale_dyadic(&u, 1)?, &spec)? / besov_norm(&u, &spec)?;
        let err = (r - 2f64.sqrt()).abs();
        s.record(err, err <= 1e-10);
    }
    Ok(s)
}

fn hydrostatic_pair(g: &TorusGrid, seed: u64) -> Result<(SpectralField, SpectralField)> {
    let za = g.vertical_axis();
    let a = project_mean_zero(&project_h(&random_field(g, 2, 4, seed))?, za)?;
    let b = project_mean_zero(&project_h(&random_field(g, 2, 4, seed + 1))?, za)?;
    Ok((a, b))
}

pub fn bony(cases: usize, seed: u64) -> Result<Sweep> {
    let mut s = Sweep::new("bony");
    for c in 0..cases {
        let g = if c % 2 == 0 {
            TorusGrid::cube(16, 16, 16, 1.0)?
        } else {
            TorusGrid::plane(64, 64, 1.0)?
        };
        let (vd, v1) = hydrostatic_pair(&g, seed + 3000 + 2 * c as u64)?;
        let fb = flux_decompose(&vd, &v1)?;
        let (h, z) = direct_flux(&vd, &v1)?;
        let rel = (fb.j_sum() - h - z).abs() / (h.abs() + z.abs() + 1e-300);
        s.record(rel, rel <= 1e-9);
    }
    Ok(s)
}

pub fn cet(cases: usize, seed: u64) -> Result<Sweep> {
    let mut s = Sweep::new("cet");
    for c in 0..cases {
        let g = if c % 2 == 0 {
            TorusGrid::cube(16, 16, 32, 1.0)?
        } else {
            TorusGrid::plane(64, 64, 1.0)?
        };
        // full-spectrum data keeps every commutator away from zero
        let v = project_h(&random_field(&g, 2, 15, seed + 4000 + c as u64))?;
        for n in [2, 3, 4] {
            let t = mollified_commutators(&v, n, 4.0)?;
            let r = t.residual_vv().max(t.residual_wv());
            s.record(r, r <= 1e-10);
        }
    }
    Ok(s)
}

pub fn all(cases: usize, seed: u64) -> Result<Vec<Sweep>> {
    Ok(vec![
        partition()?,
        equivalence(cases, seed)?,
        bernstein(cases, seed)?,
        scaling(cases, seed)?,
        bony(cases.min(10), seed)?,
        cet(cases.min(4), seed)?,
    ])
}
