use crate::error::{invalid, Result};
use crate::field::{forward_transform, PhysicalField, SpectralField};
use crate::grid::TorusGrid;
use crate::hydrostatic::project_h;
use crate::rng::{random_field, random_field_with};

/// Initial horizontal velocity, always returned projected onto the hydrostatic space.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `v = A (cos x1 cos z, 0)`.
    Cosine { amplitude: f64 },
    /// Uniform random coefficients for `|k|_inf <= kmax`, scaled to `|v|_{L^2} = amplitude`.
    Random {
        seed: u64,
        kmax: usize,
        amplitude: f64,
    },
    /// Random phases with analytic envelope `exp(-|k|_1 / decay)`, scaled to
    /// `|v|_{L^2} = amplitude`.
    Smooth {
        seed: u64,
        decay: f64,
        amplitude: f64,
    },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Smooth {
            seed: 1,
            decay: 1.0,
            amplitude: 0.3,
        }
    }
}

impl InitialCondition {
    pub fn build(&self, grid: &TorusGrid) -> Result<SpectralField> {
        let (raw, amplitude) = match *self {
            InitialCondition::Cosine { amplitude } => {
                let za = grid.vertical_axis();
                let x1 = grid.horizontal_axes()[0];
                let a = forward_transform(&PhysicalField::from_fn(grid, |x| {
                    amplitude * x[x1].cos() * x[za].cos()
                }))?;
                return project_h(&SpectralField::stack(&[a, SpectralField::zeros(grid, 1)])?);
            }
            InitialCondition::Random {
                seed,
                kmax,
                amplitude,
            } => (random_field(grid, 2, kmax, seed), amplitude),
            InitialCondition::Smooth {
                seed,
                decay,
                amplitude,
            } => {
                if !(decay > 0.0) {
                    return invalid("init.decay must be positive");
                }
                let env = |k: &[i64]| {
                    (-(k.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>()) / decay).exp()
                };
                (random_field_with(grid, 2, seed, env), amplitude)
            }
        };
        let v = project_h(&raw.without_nyquist())?;
        let n = v.l2_norm();
        if n == 0.0 {
            return invalid("initial condition projects to zero");
        }
        Ok(v.scale(amplitude / n))
    }
}
