//! Discrete realization of the unitary Fourier transform
//!
//! ```text
//! (F f)(xi) = (2 pi)^(-d/2) \int f(x) e^{-i <x, xi>} dx
//! ```
//!
//! on axis-aligned uniform grids. Along each axis, with spatial samples
//! `x_j = o + j h` and frequencies `xi_m = o' + m dk`, `dk = 2 pi / (N h)`,
//!
//! ```text
//! F_m = (2 pi)^(-1/2) h e^{-i o xi_m} sum_j [f_j e^{-i j h o'}] e^{-2 pi i j m / N}
//! ```
//!
//! which is an exact DFT followed by analytic phase factors for the offsets.
//! The inverse uses the same factors conjugated and is the exact discrete
//! inverse, so round trips are limited only by rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::SampledField;
use super::grid::UniformGrid;
use crate::error::{Error, Result};

/// Spectral derivatives whose multiplier exceeds this are refused.
pub const MAX_AMPLIFICATION: f64 = 1e12;

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Apply `post * FFT(pre * line)` along one axis of a row-major array.
fn transform_axis(
    values: &mut [Complex64],
    counts: &[usize],
    axis: usize,
    fft: &Arc<dyn Fft<f64>>,
    pre: &[Complex64],
    post: &[Complex64],
) {
    let n = counts[axis];
    let inner: usize = counts[axis + 1..].iter().product();
    let outer: usize = counts[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = values[base + j * inner] * pre[j];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (m, v) in line.iter().enumerate() {
                values[base + m * inner] = v * post[m];
            }
        }
    }
}

fn require_axis_aligned(grid: &UniformGrid) -> Result<()> {
    if grid.is_axis_aligned() {
        Ok(())
    } else {
        Err(Error::UnsupportedBasis(
            "Fourier transforms need the standard basis".into(),
        ))
    }
}

/// Precomputed one-axis transforms with their offset phase factors.
#[derive(Clone)]
pub(crate) struct AxisPlan {
    counts: Vec<usize>,
    axes: Vec<(usize, Arc<dyn Fft<f64>>, Vec<Complex64>, Vec<Complex64>)>,
}

impl AxisPlan {
    /// Forward transform from `spatial` to `spectral` along `axes`.
    pub(crate) fn forward(spatial: &UniformGrid, spectral: &UniformGrid, axes: &[usize]) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let norm = (2.0 * PI).sqrt().recip();
        let axes = axes
            .iter()
            .map(|&k| {
                let n = spatial.counts()[k];
                let (o, h) = (spatial.offsets()[k], spatial.steps()[k]);
                let (op, dk) = (spectral.offsets()[k], spectral.steps()[k]);
                let pre: Vec<Complex64> = (0..n).map(|j| cis(-(j as f64) * h * op)).collect();
                let post: Vec<Complex64> = (0..n)
                    .map(|m| cis(-o * (op + m as f64 * dk)) * (norm * h))
                    .collect();
                (k, planner.plan_fft_forward(n), pre, post)
            })
            .collect();
        Self {
            counts: spatial.counts().to_vec(),
            axes,
        }
    }

    /// Inverse transform from `spectral` back to `spatial` along `axes`.
    pub(crate) fn inverse(spectral: &UniformGrid, spatial: &UniformGrid, axes: &[usize]) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let norm = (2.0 * PI).sqrt().recip();
        let axes = axes
            .iter()
            .map(|&k| {
                let n = spatial.counts()[k];
                let (o, h) = (spatial.offsets()[k], spatial.steps()[k]);
                let (op, dk) = (spectral.offsets()[k], spectral.steps()[k]);
                let pre: Vec<Complex64> = (0..n).map(|m| cis(o * m as f64 * dk)).collect();
                let post: Vec<Complex64> = (0..n)
                    .map(|j| cis(op * (o + j as f64 * h)) * (norm * dk))
                    .collect();
                (k, planner.plan_fft_inverse(n), pre, post)
            })
            .collect();
        Self {
            counts: spatial.counts().to_vec(),
            axes,
        }
    }

    pub(crate) fn apply(&self, values: &mut [Complex64]) {
        for (k, fft, pre, post) in &self.axes {
            transform_axis(values, &self.counts, *k, fft, pre, post);
        }
    }
}

/// Forward transform along the listed axes, in place.
pub(crate) fn forward_axes(
    values: &mut [Complex64],
    spatial: &UniformGrid,
    spectral: &UniformGrid,
    axes: &[usize],
) {
    AxisPlan::forward(spatial, spectral, axes).apply(values);
}

/// Inverse transform along the listed axes, in place.
pub(crate) fn inverse_axes(
    values: &mut [Complex64],
    spectral: &UniformGrid,
    spatial: &UniformGrid,
    axes: &[usize],
) {
    AxisPlan::inverse(spectral, spatial, axes).apply(values);
}

/// Unnormalized multi-dimensional DFT over all axes, in place.
pub(crate) fn dft_nd(values: &mut [Complex64], counts: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    for (k, &n) in counts.iter().enumerate() {
        let ones = vec![Complex64::new(1.0, 0.0); n];
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        transform_axis(values, counts, k, &fft, &ones, &ones);
    }
}

/// Checks that `spatial` and `spectral` are DFT duals along `axes`.
pub(crate) fn check_dual(spatial: &UniformGrid, spectral: &UniformGrid, axes: &[usize]) -> Result<()> {
    require_axis_aligned(spatial)?;
    require_axis_aligned(spectral)?;
    if spatial.counts() != spectral.counts() {
        return Err(Error::Alignment("spatial and spectral counts differ".into()));
    }
    for &k in axes {
        let prod = spatial.steps()[k] * spectral.steps()[k] * spatial.counts()[k] as f64;
        if (prod / (2.0 * PI) - 1.0).abs() > 1e-10 {
            return Err(Error::Alignment(format!(
                "axis {k}: h * dk * N = {prod}, expected 2 pi"
            )));
        }
    }
    Ok(())
}

/// Samples of the continuous Fourier transform on the reciprocal grid.
pub fn fourier_transform(f: &SampledField) -> Result<SampledField> {
    require_axis_aligned(f.grid())?;
    let spectral = f.grid().reciprocal()?;
    let axes: Vec<usize> = (0..f.grid().dim()).collect();
    let mut values = f.values().to_vec();
    forward_axes(&mut values, f.grid(), &spectral, &axes);
    SampledField::new(spectral, values)
}

/// Inverse transform onto the cell-centered spatial grid dual to `spectrum`.
pub fn inverse_fourier(spectrum: &SampledField) -> Result<SampledField> {
    require_axis_aligned(spectrum.grid())?;
    let spatial = spectrum.grid().spatial_dual()?;
    inverse_fourier_onto(spectrum, &spatial)
}

/// Inverse transform onto an explicit spatial grid (any offsets, dual steps).
pub fn inverse_fourier_onto(spectrum: &SampledField, spatial: &UniformGrid) -> Result<SampledField> {
    let axes: Vec<usize> = (0..spatial.dim()).collect();
    check_dual(spatial, spectrum.grid(), &axes)?;
    let mut values = spectrum.values().to_vec();
    inverse_axes(&mut values, spectrum.grid(), spatial, &axes);
    SampledField::new(spatial.clone(), values)
}

/// Spectral differentiation of a sampled field: `d^alpha f = F^-1[(i xi)^alpha F f]`.
#[derive(Debug, Clone)]
pub struct SpectralDifferentiator {
    spatial: UniformGrid,
    spectrum: SampledField,
    /// Scale of the rounding error in reconstructed samples.
    spectrum_l1: f64,
}

impl SpectralDifferentiator {
    pub fn new(f: &SampledField) -> Result<Self> {
        let spectrum = fourier_transform(f)?;
        let d = f.grid().dim() as i32;
        let spectrum_l1 = spectrum.values().iter().map(|v| v.norm()).sum::<f64>()
            * spectrum.grid().cell_volume()
            * (2.0 * PI).powi(-d).sqrt();
        Ok(Self {
            spatial: f.grid().clone(),
            spectrum,
            spectrum_l1,
        })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.spatial
    }

    /// `prod_k (max |xi_k|)^{alpha_k}`.
    pub fn amplification(&self, alpha: &[usize]) -> f64 {
        let g = self.spectrum.grid();
        alpha
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let kmax = (g.counts()[k] / 2) as f64 * g.steps()[k];
                kmax.powi(a as i32)
            })
            .product()
    }

    /// Magnitude below which derivative samples are indistinguishable from rounding.
    pub fn noise_floor(&self, alpha: &[usize]) -> f64 {
        64.0 * f64::EPSILON * self.spectrum_l1 * self.amplification(alpha).max(1.0)
    }

    pub fn derivative(&self, alpha: &[usize]) -> Result<SampledField> {
        let g = self.spectrum.grid();
        if alpha.len() != g.dim() {
            return Err(Error::InvalidDimension(format!(
                "multi-index of length {} in dimension {}",
                alpha.len(),
                g.dim()
            )));
        }
        let amplification = self.amplification(alpha);
        if amplification > MAX_AMPLIFICATION {
            return Err(Error::OrderTooHigh {
                order: alpha.iter().sum(),
                amplification,
            });
        }
        let axis_factors: Vec<Vec<Complex64>> = (0..g.dim())
            .map(|k| {
                let n = g.counts()[k];
                g.axis_coords(k)
                    .iter()
                    .enumerate()
                    .map(|(m, &xi)| {
                        // Nyquist mode has no odd derivative.
                        if alpha[k] % 2 == 1 && n % 2 == 0 && m == 0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            Complex64::new(0.0, xi).powu(alpha[k] as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        let values: Vec<Complex64> = self
            .spectrum
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let idx = g.unravel(i);
                idx.iter()
                    .enumerate()
                    .fold(*v, |acc, (k, &m)| acc * axis_factors[k][m])
            })
            .collect();
        let weighted = SampledField::new(g.clone(), values)?;
        inverse_fourier_onto(&weighted, &self.spatial)
    }
}
