//! Smoothing a weight by convolution with a normalized Gaussian.
//!
//! `w0 = w * phi` with `phi(y) = exp(-c |y|^2)` scaled to unit discrete mass.
//! The convolution runs as a circular FFT convolution on the target box
//! padded by `6 / sqrt(c)` per side, where the kernel has dropped below
//! `e^{-36}`. Derivatives of `w0` are convolutions with the analytic
//! derivatives of the kernel, `d^k e^{-c t^2} = (-sqrt c)^k H_k(sqrt c t) e^{-c t^2}`,
//! so no differentiation of non-periodic samples is needed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gevrey::DerivativeSource;
use super::{TabulatedWeight, Weight};
use crate::error::{Error, Result};
use crate::lattice::{dft_nd, OrderedBasis, SampledField, UniformGrid};

/// Padding in units of the kernel decay length `1 / sqrt(c)`.
const PADDING_LENGTHS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifyOptions {
    pub dim: usize,
    /// The result is tabulated on `[-half_width, half_width]^dim`.
    pub half_width: f64,
    /// Cells per axis on that box.
    pub n: usize,
    /// Kernel decay rate.
    pub c: f64,
    /// Gevrey index the mollified weight is meant for; recorded only.
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifyReport {
    pub c: f64,
    pub s: f64,
    pub padding: f64,
    pub half_width: f64,
    pub n: usize,
    /// `min w0 / w` over the tabulated box.
    pub ratio_min: f64,
    /// `max w0 / w` over the tabulated box.
    pub ratio_max: f64,
}

/// A mollified weight, its report, and access to its derivatives.
#[derive(Debug, Clone)]
pub struct Mollified {
    pub weight: Weight,
    pub report: MollifyReport,
    pub derivatives: MollifiedDerivatives,
}

/// Derivatives of `w * phi` sampled on the tabulated box.
#[derive(Debug, Clone)]
pub struct MollifiedDerivatives {
    inner: UniformGrid,
    padded_counts: Vec<usize>,
    pad_cells: usize,
    step: f64,
    c: f64,
    /// Unit-mass normalization of the one-dimensional kernel.
    mass: f64,
    weight_hat: Vec<Complex64>,
    weight_max: f64,
}

pub fn mollify(w: &Weight, opts: &MollifyOptions) -> Result<Mollified> {
    let MollifyOptions { dim, half_width, n, c, s } = *opts;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidWeight(format!("decay rate c must be positive, got {c}")));
    }
    if !(half_width.is_finite() && half_width > 0.0) || n < 2 {
        return Err(Error::InvalidGrid("mollification box needs half_width > 0 and n >= 2".into()));
    }
    w.check_dim(dim)?;
    let inner = UniformGrid::centered(dim, n, half_width)?;
    let step = inner.steps()[0];
    let padding = PADDING_LENGTHS / c.sqrt();
    let pad_cells = (padding / step).ceil() as usize;
    let m = n + 2 * pad_cells;
    let padded = UniformGrid::new(
        OrderedBasis::identity(dim),
        vec![m; dim],
        vec![step; dim],
        vec![inner.offsets()[0] - pad_cells as f64 * step; dim],
    )?;
    let mut weight_hat: Vec<Complex64> = (0..padded.len())
        .map(|i| Complex64::new(w.evaluate(&padded.point_of_flat(i)), 0.0))
        .collect();
    let weight_max = weight_hat.iter().map(|v| v.re).fold(0.0, f64::max);
    if !weight_max.is_finite() {
        return Err(Error::InvalidWeight("weight overflows on the padded box".into()));
    }
    dft_nd(&mut weight_hat, padded.counts(), false);

    let mass = kernel_axis(m, step, c, 0).iter().sum::<f64>() * step;
    let source = MollifiedDerivatives {
        inner: inner.clone(),
        padded_counts: padded.counts().to_vec(),
        pad_cells,
        step,
        c,
        mass,
        weight_hat,
        weight_max,
    };
    let w0 = source.derivative(&vec![0; dim])?;

    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    for (i, v) in w0.values().iter().enumerate() {
        let r = v.re / w.evaluate(&inner.point_of_flat(i));
        ratio_min = ratio_min.min(r);
        ratio_max = ratio_max.max(r);
    }
    if !(ratio_min >= 1e-6 && ratio_max <= 1e6) {
        return Err(Error::MollificationDiverged {
            lo: ratio_min,
            hi: ratio_max,
        });
    }
    let table = TabulatedWeight::new(w0.map(|v| Complex64::new(v.re, 0.0))?)?;
    Ok(Mollified {
        weight: Weight::Tabulated { table },
        report: MollifyReport {
            c,
            s,
            padding,
            half_width,
            n,
            ratio_min,
            ratio_max,
        },
        derivatives: source,
    })
}

/// `d^k e^{-c t^2}` at the wrapped offsets `t = j h`, `j` in `[-m/2, m - m/2)`.
fn kernel_axis(m: usize, h: f64, c: f64, k: usize) -> Vec<f64> {
    let sc = c.sqrt();
    (0..m)
        .map(|i| {
            let j = if i < m - m / 2 { i as f64 } else { i as f64 - m as f64 };
            let t = j * h;
            let u = sc * t;
            (-sc).powi(k as i32) * hermite(k, u) * (-c * t * t).exp()
        })
        .collect()
}

/// Physicists' Hermite polynomial by the three-term recurrence.
fn hermite(k: usize, u: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * u);
    if k == 0 {
        return a;
    }
    for j in 1..k {
        let next = 2.0 * u * b - 2.0 * j as f64 * a;
        a = b;
        b = next;
    }
    b
}

impl MollifiedDerivatives {
    fn kernel(&self, alpha: &[usize]) -> Vec<Vec<f64>> {
        let m = self.padded_counts[0];
        alpha
            .iter()
            .map(|&k| {
                kernel_axis(m, self.step, self.c, k)
                    .into_iter()
                    .map(|v| v * self.step / self.mass)
                    .collect()
            })
            .collect()
    }
}

impl DerivativeSource for MollifiedDerivatives {
    fn grid(&self) -> &UniformGrid {
        &self.inner
    }

    fn derivative(&self, alpha: &[usize]) -> Result<SampledField> {
        let d = self.inner.dim();
        if alpha.len() != d {
            return Err(Error::InvalidDimension(format!(
                "multi-index of length {} in dimension {d}",
                alpha.len()
            )));
        }
        let axes = self.kernel(alpha);
        let counts = &self.padded_counts;
        let total: usize = counts.iter().product();
        let mut kern: Vec<Complex64> = (0..total)
            .map(|mut flat| {
                let mut v = 1.0;
                for k in (0..d).rev() {
                    v *= axes[k][flat % counts[k]];
                    flat /= counts[k];
                }
                Complex64::new(v, 0.0)
            })
            .collect();
        dft_nd(&mut kern, counts, false);
        for (a, b) in kern.iter_mut().zip(&self.weight_hat) {
            *a *= b;
        }
        dft_nd(&mut kern, counts, true);
        let scale = 1.0 / total as f64;
        let n = self.inner.counts()[0];
        let values = (0..self.inner.len())
            .map(|i| {
                let idx = self.inner.unravel(i);
                let flat = idx
                    .iter()
                    .zip(counts)
                    .fold(0, |acc, (&j, &m)| acc * m + j + self.pad_cells);
                debug_assert!(idx.iter().all(|&j| j < n));
                Complex64::new(kern[flat].re * scale, 0.0)
            })
            .collect();
        SampledField::new(self.inner.clone(), values)
    }

    fn noise_floor(&self, alpha: &[usize]) -> f64 {
        let l1: f64 = self
            .kernel(alpha)
            .iter()
            .map(|axis| axis.iter().map(|v| v.abs()).sum::<f64>())
            .product();
        64.0 * f64::EPSILON * self.weight_max * l1
    }
}
