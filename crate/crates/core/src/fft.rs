//! Multi-dimensional complex FFTs on row-major arrays, backed by `rustfft`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::strides_of;

type PlanKey = (usize, bool);
type PlanCache = Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>;

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, forward))
        .or_insert_with(|| {
            let dir = if forward {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

/// Unnormalised in-place transform along every axis.
///
/// `forward` uses the `e^{-i...}` kernel; neither direction rescales.
pub(crate) fn fft_nd(data: &mut [Complex64], sizes: &[usize], forward: bool) {
    let all: Vec<usize> = (0..sizes.len()).collect();
    fft_axes(data, sizes, &all, forward);
}

/// Unnormalised in-place transform along the listed axes only.
pub(crate) fn fft_axes(data: &mut [Complex64], sizes: &[usize], axes: &[usize], forward: bool) {
    debug_assert_eq!(data.len(), sizes.iter().product::<usize>());
    let strides = strides_of(sizes);
    for &axis in axes {
        let n = sizes[axis];
        let stride = strides[axis];
        let fft = plan(n, forward);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (m, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + m * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (m, v) in line.iter().enumerate() {
                    data[base + m * stride] = *v;
                }
            }
        }
    }
}
