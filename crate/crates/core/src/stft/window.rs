use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::io::FieldJson;
use crate::lattice::{SampledField, UniformGrid};

/// Analysis and synthesis windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindowKind {
    /// `exp(-|x|^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// Tensor product of Hermite functions `h_n(x_k / sigma)` of equal order.
    Hermite { order: usize, sigma: f64 },
    /// Samples, linearly interpolated and zero outside the table.
    Tabulated { table: FieldJson },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    #[serde(flatten)]
    pub kind: WindowKind,
    /// Scale to unit L^2 norm. Analytic kinds use the exact norm, tables the
    /// cell-volume weighted sum.
    #[serde(default = "yes")]
    pub unit_norm: bool,
    /// Dimension of the signal space.
    pub dim: usize,
}

fn yes() -> bool {
    true
}

impl Window {
    /// Unit-norm Gaussian `pi^{-d/4} e^{-|x|^2/2}`.
    pub fn gaussian(dim: usize) -> Self {
        Self::gaussian_width(dim, 1.0)
    }

    pub fn gaussian_width(dim: usize, sigma: f64) -> Self {
        Self {
            kind: WindowKind::Gaussian { sigma },
            unit_norm: true,
            dim,
        }
    }

    pub fn hermite(dim: usize, order: usize, sigma: f64) -> Self {
        Self {
            kind: WindowKind::Hermite { order, sigma },
            unit_norm: true,
            dim,
        }
    }

    pub fn tabulated(field: &SampledField, unit_norm: bool) -> Self {
        Self {
            kind: WindowKind::Tabulated {
                table: FieldJson::from(field),
            },
            unit_norm,
            dim: field.grid().dim(),
        }
    }

    /// Validated evaluator for this window.
    pub fn prepare(&self) -> Result<PreparedWindow> {
        if self.dim == 0 {
            return Err(Error::InvalidWindow("window dimension must be positive".into()));
        }
        let (table, scale) = match &self.kind {
            WindowKind::Gaussian { sigma } | WindowKind::Hermite { sigma, .. } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidWindow(format!("width must be positive, got {sigma}")));
                }
                let scale = match (&self.kind, self.unit_norm) {
                    (_, false) => 1.0,
                    (WindowKind::Gaussian { .. }, true) => (PI * sigma * sigma).powf(-0.25 * self.dim as f64),
                    // The Hermite functions are already orthonormal after 1/sqrt(sigma).
                    _ => 1.0,
                };
                (None, scale)
            }
            WindowKind::Tabulated { table } => {
                let field = SampledField::try_from(table.clone())?;
                if field.grid().dim() != self.dim {
                    return Err(Error::InvalidWindow("table dimension differs from dim".into()));
                }
                if !field.grid().is_axis_aligned() {
                    return Err(Error::UnsupportedBasis("tabulated windows need the standard basis".into()));
                }
                let norm = field.l2_norm();
                if norm <= 1e-12 {
                    return Err(Error::InvalidWindow(format!("window norm {norm:e} is zero")));
                }
                let scale = if self.unit_norm { 1.0 / norm } else { 1.0 };
                (Some(field), scale)
            }
        };
        let w = PreparedWindow {
            kind: self.kind.clone(),
            table,
            scale,
            dim: self.dim,
        };
        if let WindowKind::Hermite { .. } | WindowKind::Gaussian { .. } = self.kind {
            if w.exact_norm_sqr() <= 1e-24 {
                return Err(Error::InvalidWindow("window norm is zero".into()));
            }
        }
        Ok(w)
    }
}

/// A window ready for pointwise evaluation.
#[derive(Debug, Clone)]
pub struct PreparedWindow {
    kind: WindowKind,
    table: Option<SampledField>,
    scale: f64,
    dim: usize,
}

/// Orthonormal Hermite functions `h_0..=h_n` at `t` by the stable recurrence
/// `h_{k+1} = sqrt(2/(k+1)) t h_k - sqrt(k/(k+1)) h_{k-1}`.
pub fn hermite_function(n: usize, t: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * t * t).exp();
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * t * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl PreparedWindow {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        match &self.kind {
            WindowKind::Gaussian { sigma } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Complex64::new(self.scale * (-0.5 * r2 / (sigma * sigma)).exp(), 0.0)
            }
            WindowKind::Hermite { order, sigma } => {
                let v: f64 = x
                    .iter()
                    .map(|&t| hermite_function(*order, t / sigma) / sigma.sqrt())
                    .product();
                Complex64::new(self.scale * v, 0.0)
            }
            WindowKind::Tabulated { .. } => {
                let field = self.table.as_ref().expect("tabulated window has samples");
                self.interpolate(field, x) * self.scale
            }
        }
    }

    fn interpolate(&self, field: &SampledField, x: &[f64]) -> Complex64 {
        let grid = field.grid();
        let frac = grid.fractional_index(x);
        let d = frac.len();
        let mut base = vec![0usize; d];
        let mut t = vec![0.0; d];
        for k in 0..d {
            let n = grid.counts()[k];
            let f = frac[k];
            let r = f.round();
            if (f - r).abs() < 1e-9 && r >= 0.0 && r <= (n - 1) as f64 {
                base[k] = r as usize;
                t[k] = 0.0;
                continue;
            }
            if f < 0.0 || f > (n - 1) as f64 {
                return Complex64::new(0.0, 0.0);
            }
            let j = (f.floor() as usize).min(n.saturating_sub(2));
            base[k] = j;
            t[k] = f - j as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; d];
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            for k in 0..d {
                let up = (corner >> k) & 1 == 1;
                w *= if up { t[k] } else { 1.0 - t[k] };
                idx[k] = base[k] + up as usize;
            }
            if w != 0.0 {
                acc += field.get(&idx) * w;
            }
        }
        acc
    }

    /// Unitary Fourier transform of the window at `xi`.
    pub fn fourier_eval(&self, xi: &[f64]) -> Complex64 {
        match &self.kind {
            WindowKind::Gaussian { sigma } => {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                let amp = sigma.powi(self.dim as i32) * (-0.5 * sigma * sigma * r2).exp();
                Complex64::new(self.scale * amp, 0.0)
            }
            WindowKind::Hermite { order, sigma } => {
                // F h_n = (-i)^n h_n, and the dilation moves sigma to the other side.
                let phase = Complex64::new(0.0, -1.0).powu(*order as u32);
                xi.iter()
                    .map(|&t| phase * (hermite_function(*order, sigma * t) * sigma.sqrt()))
                    .product::<Complex64>()
                    * self.scale
            }
            WindowKind::Tabulated { .. } => {
                let field = self.table.as_ref().expect("tabulated window has samples");
                let g = field.grid();
                let norm = (2.0 * PI).powf(-0.5 * self.dim as f64) * g.cell_volume() * self.scale;
                let s: Complex64 = (0..g.len())
                    .map(|i| {
                        let p = g.point_of_flat(i);
                        let phase: f64 = p.iter().zip(xi).map(|(a, b)| a * b).sum();
                        field.values()[i] * Complex64::from_polar(1.0, -phase)
                    })
                    .sum();
                s * norm
            }
        }
    }

    /// `||phi||_2^2` of the continuous window (tables: the sampled norm).
    pub fn exact_norm_sqr(&self) -> f64 {
        match &self.kind {
            WindowKind::Gaussian { sigma } => self.scale * self.scale * (PI * sigma * sigma).powf(0.5 * self.dim as f64),
            WindowKind::Hermite { .. } => self.scale * self.scale,
            WindowKind::Tabulated { .. } => {
                let n = self.table.as_ref().expect("tabulated window has samples").l2_norm();
                (n * self.scale).powi(2)
            }
        }
    }

    /// Samples `phi(y - shift)` on `grid`.
    pub fn sample_shifted(&self, grid: &UniformGrid, shift: &[f64]) -> Vec<Complex64> {
        (0..grid.len())
            .map(|i| {
                let y = grid.point_of_flat(i);
                let z: Vec<f64> = y.iter().zip(shift).map(|(a, b)| a - b).collect();
                self.evaluate(&z)
            })
            .collect()
    }

    /// `sup |phi(x)| e^{|x| / sigma}` over `grid`; analytic kinds only.
    pub fn decay_metric(&self, grid: &UniformGrid) -> Option<f64> {
        let sigma = match &self.kind {
            WindowKind::Gaussian { sigma } | WindowKind::Hermite { sigma, .. } => *sigma,
            WindowKind::Tabulated { .. } => return None,
        };
        Some(
            (0..grid.len())
                .map(|i| {
                    let p = grid.point_of_flat(i);
                    let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                    self.evaluate(&p).norm() * (r / sigma).exp()
                })
                .fold(0.0, f64::max),
        )
    }
}
