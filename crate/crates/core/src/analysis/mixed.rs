//! Bilinear Fourier multipliers along a subset of axes.
//!
//! Fields are held spectrally along the `spectral` axes and sampled on the
//! 3/2-padded grid along the others, so pointwise products in the sampled
//! directions are exact while the spectral directions carry an arbitrary
//! bilinear symbol `m(k, l)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft::fft_axes;
use crate::field::embed_table;
use crate::grid::{signed_index, strides_of, TorusGrid};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub(crate) struct MixedSpace {
    base: Vec<usize>,
    target: Vec<usize>,
    phys_axes: Vec<usize>,
    embed: Vec<Option<usize>>,
    scale: f64,
    /// Offsets of the spectral sub-block within one fibre.
    offsets: Vec<usize>,
    /// Flat index of the first entry of every fibre.
    fibres: Vec<usize>,
    /// `(s, t, q, m(s, t))` with `q = s + t` representable and `m != 0`.
    pairs: Vec<(usize, usize, usize, f64)>,
}

impl MixedSpace {
    /// `symbol(xi_s, xi_t, xi_q)` receives the Euclidean lengths of the
    /// physical frequencies over the spectral axes.
    pub(crate) fn new(
        grid: &TorusGrid,
        spectral: &[usize],
        symbol: impl Fn(f64, f64, f64) -> f64,
    ) -> Self {
        let nd = grid.n_dims();
        let base = grid.sizes().to_vec();
        let phys_axes: Vec<usize> = (0..nd).filter(|a| !spectral.contains(a)).collect();
        let target: Vec<usize> = (0..nd)
            .map(|a| {
                if spectral.contains(&a) {
                    base[a]
                } else {
                    3 * base[a] / 2
                }
            })
            .collect();
        let strides = strides_of(&target);
        let embed = embed_table(&base, &target);
        let scale = 1.0 / phys_axes.iter().map(|&a| target[a]).product::<usize>() as f64;

        let sub: Vec<usize> = spectral.iter().map(|&a| base[a]).collect();
        let sub_len: usize = sub.iter().product();
        let sub_strides = strides_of(&sub);
        let mut kvec: Vec<Vec<i64>> = Vec::with_capacity(sub_len);
        let mut offsets = Vec::with_capacity(sub_len);
        for s in 0..sub_len {
            let mut off = 0;
            let mut ks = Vec::with_capacity(spectral.len());
            for (i, &a) in spectral.iter().enumerate() {
                let idx = (s / sub_strides[i]) % sub[i];
                off += idx * strides[a];
                ks.push(signed_index(idx, sub[i]));
            }
            offsets.push(off);
            kvec.push(ks);
        }
        let xi = |k: &[i64]| -> f64 {
            k.iter()
                .zip(spectral)
                .map(|(&k, &a)| (k as f64 / grid.lambda()[a]).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let slot = |k: &[i64]| -> Option<usize> {
            let mut s = 0;
            for (i, &q) in k.iter().enumerate() {
                let n = sub[i] as i64;
                if 2 * q.abs() >= n {
                    return None;
                }
                s += (q.rem_euclid(n) as usize) * sub_strides[i];
            }
            Some(s)
        };
        let mut pairs = Vec::new();
        let mut q = vec![0i64; spectral.len()];
        for s in 0..sub_len {
            if slot(&kvec[s]).is_none() {
                continue;
            }
            for t in 0..sub_len {
                if slot(&kvec[t]).is_none() {
                    continue;
                }
                for i in 0..q.len() {
                    q[i] = kvec[s][i] + kvec[t][i];
                }
                let Some(qs) = slot(&q) else { continue };
                let m = symbol(xi(&kvec[s]), xi(&kvec[t]), xi(&q));
                if m != 0.0 {
                    pairs.push((s, t, qs, m));
                }
            }
        }

        let total: usize = target.iter().product();
        let fibres = (0..total)
            .filter(|&flat| {
                spectral
                    .iter()
                    .all(|&a| (flat / strides[a]).is_multiple_of(target[a]))
            })
            .collect();
        Self {
            base,
            target,
            phys_axes,
            embed,
            scale,
            offsets,
            fibres,
            pairs,
        }
    }

    fn lift(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![ZERO; self.target.iter().product()];
        for (i, slot) in self.embed.iter().enumerate() {
            if let Some(t) = slot {
                buf[*t] = coeffs[i];
            }
        }
        fft_axes(&mut buf, &self.target, &self.phys_axes, false);
        buf
    }

    fn lower(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        fft_axes(&mut buf, &self.target, &self.phys_axes, true);
        let mut out: Vec<Complex64> = self
            .embed
            .iter()
            .map(|slot| slot.map_or(ZERO, |t| buf[t] * self.scale))
            .collect();
        crate::product::zero_nyquist_sizes(&self.base, &mut out);
        out
    }

    /// Coefficients of `sum_{k,l} m(k,l) f_k g_l e^{i(k+l)x}` restricted to the base modes.
    pub(crate) fn apply(&self, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let lf = self.lift(f);
        let lg = self.lift(g);
        let per_fibre: Vec<Vec<Complex64>> = self
            .fibres
            .par_iter()
            .map(|&base| {
                let fs: Vec<Complex64> = self.offsets.iter().map(|o| lf[base + o]).collect();
                let gs: Vec<Complex64> = self.offsets.iter().map(|o| lg[base + o]).collect();
                let mut acc = vec![ZERO; self.offsets.len()];
                for &(s, t, q, m) in &self.pairs {
                    acc[q] += fs[s] * gs[t] * m;
                }
                acc
            })
            .collect();
        let mut out = vec![ZERO; lf.len()];
        for (&base, acc) in self.fibres.iter().zip(per_fibre) {
            for (o, v) in self.offsets.iter().zip(acc) {
                out[base + o] = v;
            }
        }
        self.lower(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::product::{Dealias, ProductSpace};
    use crate::rng::random_field;

    #[test]
    fn unit_symbol_is_the_product() {
        for (g, spec) in [
            (TorusGrid::cube(8, 8, 16, 1.0).unwrap(), vec![2usize]),
            (TorusGrid::cube(8, 8, 16, 1.0).unwrap(), vec![0, 1]),
            (TorusGrid::plane(16, 8, 2.0).unwrap(), vec![0]),
        ] {
            let f = random_field(&g, 1, 3, 1);
            let h = random_field(&g, 1, 3, 2);
            let ms = MixedSpace::new(&g, &spec, |_, _, _| 1.0);
            let got = ms.apply(f.component(0), h.component(0));
            let want = ProductSpace::new(&g, Dealias::Pad).multiply(f.component(0), h.component(0));
            let d = &SpectralField::from_coeffs(g.clone(), vec![got]).unwrap()
                - &SpectralField::from_coeffs(g.clone(), vec![want]).unwrap();
            assert!(d.max_abs_coeff() < 1e-14);
        }
    }

    #[test]
    fn symbol_of_sum_is_derivative_of_product() {
        // m = xi_q^2 realises -d_zz (f g)
        let g = TorusGrid::plane(8, 16, 1.0).unwrap();
        let f = random_field(&g, 1, 2, 3);
        let h = random_field(&g, 1, 2, 4);
        let ms = MixedSpace::new(&g, &[1], |_, _, q| q * q);
        let got =
            SpectralField::from_coeffs(g.clone(), vec![ms.apply(f.component(0), h.component(0))])
                .unwrap();
        let p = ProductSpace::new(&g, Dealias::Pad).multiply(f.component(0), h.component(0));
        let p = SpectralField::from_coeffs(g.clone(), vec![p]).unwrap();
        let want = p.derivative(1).derivative(1).scale(-1.0);
        assert!((&got - &want).max_abs_coeff() < 1e-13);
    }
}
