//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use pe_core::field::{forward_transform, inverse_transform, PhysicalField, SpectralField};
use pe_core::TorusGrid;
use rustfft::FftPlanner;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The same torus with `factor` times the points per axis.
pub fn finer(g: &TorusGrid, factor: usize) -> TorusGrid {
    TorusGrid::new(
        g.sizes().iter().map(|n| n * factor).collect(),
        g.lambda().to_vec(),
        g.roles().to_vec(),
    )
    .unwrap()
}

/// Copies every wavenumber of `u` that `target` represents strictly below
/// its Nyquist frequency; source Nyquist slots are dropped.
pub fn regrid(u: &SpectralField, target: &TorusGrid) -> SpectralField {
    let g = u.grid();
    let nd = g.n_dims();
    let tstrides = target.strides();
    let mut idx = vec![0usize; nd];
    let mut out = SpectralField::zeros(target, u.components());
    for c in 0..u.components() {
        let src = u.component(c);
        let dst = out.component_mut(c);
        'modes: for (flat, v) in src.iter().enumerate() {
            g.unravel(flat, &mut idx);
            let mut t = 0;
            for a in 0..nd {
                if g.is_nyquist(a, idx[a]) {
                    continue 'modes;
                }
                let k = g.wavenumber(a, idx[a]);
                let n = target.sizes()[a] as i64;
                if 2 * k.abs() >= n {
                    continue 'modes;
                }
                t += k.rem_euclid(n) as usize * tstrides[a];
            }
            dst[t] = *v;
        }
    }
    out
}

/// Exact product of two scalar trigonometric polynomials, evaluated at
/// doubled resolution and truncated to the modes of the input grid.
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let fine = finer(a.grid(), 2);
    let pa = inverse_transform(&regrid(a, &fine));
    let pb = inverse_transform(&regrid(b, &fine));
    let vals: Vec<f64> = pa
        .component(0)
        .iter()
        .zip(pb.component(0))
        .map(|(x, y)| x * y)
        .collect();
    let p = forward_transform(&PhysicalField::new(fine, vec![vals]).unwrap()).unwrap();
    regrid(&p, a.grid())
}

/// `O(n^2)` DFT with the library's conventions: samples at
/// `x_m = -pi lambda + 2 pi lambda m / n`, coefficients of `e^{i k x / lambda}`.
pub fn brute_force_coefficients(g: &TorusGrid, values: &[f64]) -> Vec<Complex64> {
    let nd = g.n_dims();
    let coords: Vec<Vec<f64>> = (0..nd).map(|a| g.coordinates(a)).collect();
    let mut kidx = vec![0usize; nd];
    let mut xidx = vec![0usize; nd];
    (0..g.len())
        .map(|kf| {
            g.unravel(kf, &mut kidx);
            let mut acc = ZERO;
            for (xf, v) in values.iter().enumerate() {
                g.unravel(xf, &mut xidx);
                let phase: f64 = (0..nd)
                    .map(|a| g.wavenumber(a, kidx[a]) as f64 * coords[a][xidx[a]] / g.lambda()[a])
                    .sum();
                acc += Complex64::from_polar(*v, -phase);
            }
            acc / g.len() as f64
        })
        .collect()
}

/// Relative `L^2` distance.
pub fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).l2_norm() / b.l2_norm().max(1e-300)
}

/// Pseudo-spectral 2D Navier-Stokes in vorticity form on `[-pi, pi)^2`:
/// `omega_t + u . grad omega = nu Lap omega`, `u = (-d_2 psi, d_1 psi)`,
/// `Lap psi = omega`. Crank-Nicolson for viscosity, AB2 for advection
/// (Euler on the first step), products on a 3/2-padded grid.
pub struct VorticityNse {
    n: usize,
    nu: f64,
    dt: f64,
    /// Coefficients in FFT order, row `k1`, column `k2`.
    omega: Vec<Complex64>,
    prev: Option<Vec<Complex64>>,
    planner: FftPlanner<f64>,
}

fn wn(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl VorticityNse {
    pub fn new(omega: Vec<Complex64>, n: usize, nu: f64, dt: f64) -> Self {
        Self {
            n,
            nu,
            dt,
            omega,
            prev: None,
            planner: FftPlanner::new(),
        }
    }

    pub fn omega(&self) -> &[Complex64] {
        &self.omega
    }

    fn deriv(&self, c: &[Complex64], axis: usize) -> Vec<Complex64> {
        let n = self.n;
        (0..n * n)
            .map(|f| {
                let i = if axis == 0 { f / n } else { f % n };
                if i == n / 2 {
                    ZERO
                } else {
                    c[f] * Complex64::new(0.0, wn(i, n) as f64)
                }
            })
            .collect()
    }

    fn fft2(&mut self, data: &mut [Complex64], m: usize, inverse: bool) {
        let fft = if inverse {
            self.planner.plan_fft_inverse(m)
        } else {
            self.planner.plan_fft_forward(m)
        };
        for row in data.chunks_mut(m) {
            fft.process(row);
        }
        let mut col = vec![ZERO; m];
        for j in 0..m {
            for i in 0..m {
                col[i] = data[i * m + j];
            }
            fft.process(&mut col);
            for i in 0..m {
                data[i * m + j] = col[i];
            }
        }
    }

    fn synthesize_padded(&mut self, c: &[Complex64]) -> Vec<Complex64> {
        let (n, m) = (self.n, 3 * self.n / 2);
        let mut buf = vec![ZERO; m * m];
        for (f, v) in c.iter().enumerate() {
            let (k1, k2) = (wn(f / n, n), wn(f % n, n));
            let (i, j) = (
                k1.rem_euclid(m as i64) as usize,
                k2.rem_euclid(m as i64) as usize,
            );
            buf[i * m + j] = *v;
        }
        self.fft2(&mut buf, m, true);
        buf
    }

    fn analyze_padded(&mut self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        let (n, m) = (self.n, 3 * self.n / 2);
        self.fft2(&mut buf, m, false);
        let s = 1.0 / (m * m) as f64;
        (0..n * n)
            .map(|f| {
                let (k1, k2) = (wn(f / n, n), wn(f % n, n));
                if 2 * k1.abs() >= n as i64 || 2 * k2.abs() >= n as i64 {
                    return ZERO;
                }
                let (i, j) = (
                    k1.rem_euclid(m as i64) as usize,
                    k2.rem_euclid(m as i64) as usize,
                );
                buf[i * m + j] * s
            })
            .collect()
    }

    /// Velocity coefficients `(u1, u2)` of a mean-free vorticity.
    pub fn velocity(&self, omega: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let psi: Vec<Complex64> = (0..n * n)
            .map(|f| {
                let (k1, k2) = (wn(f / n, n) as f64, wn(f % n, n) as f64);
                let kk = k1 * k1 + k2 * k2;
                if kk == 0.0 {
                    ZERO
                } else {
                    -omega[f] / kk
                }
            })
            .collect();
        let u1 = self.deriv(&psi, 1).into_iter().map(|x| -x).collect();
        let u2 = self.deriv(&psi, 0);
        (u1, u2)
    }

    fn advection(&mut self) -> Vec<Complex64> {
        let w = self.omega.clone();
        let (u1, u2) = self.velocity(&w);
        let w1 = self.deriv(&w, 0);
        let w2 = self.deriv(&w, 1);
        let (pu1, pu2) = (self.synthesize_padded(&u1), self.synthesize_padded(&u2));
        let (pw1, pw2) = (self.synthesize_padded(&w1), self.synthesize_padded(&w2));
        let adv: Vec<Complex64> = (0..pu1.len())
            .map(|i| -(pu1[i].re * pw1[i].re + pu2[i].re * pw2[i].re) * Complex64::new(1.0, 0.0))
            .collect();
        self.analyze_padded(adv)
    }

    pub fn step(&mut self) {
        let n = self.n;
        let nl = self.advection();
        let e: Vec<Complex64> = match &self.prev {
            Some(p) => nl.iter().zip(p).map(|(a, b)| a * 1.5 - b * 0.5).collect(),
            None => nl.clone(),
        };
        self.prev = Some(nl);
        for (f, (w, e)) in self.omega.iter_mut().zip(&e).enumerate() {
            let (k1, k2) = (wn(f / n, n) as f64, wn(f % n, n) as f64);
            let a = 0.5 * self.nu * self.dt * (k1 * k1 + k2 * k2);
            *w = (*w * (1.0 - a) + e * self.dt) / (1.0 + a);
        }
    }
}
