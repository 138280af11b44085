use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::basis::OrderedBasis;
use crate::error::{Error, Result};

/// A basis-aligned sampling lattice: index `(j_1, ..., j_d)` sits at
/// `sum_k (o_k + j_k h_k) e_k`.
///
/// Values attached to a grid are stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    basis: OrderedBasis,
    counts: Vec<usize>,
    steps: Vec<f64>,
    offsets: Vec<f64>,
}

impl UniformGrid {
    pub fn new(
        basis: OrderedBasis,
        counts: Vec<usize>,
        steps: Vec<f64>,
        offsets: Vec<f64>,
    ) -> Result<Self> {
        let d = basis.dim();
        if counts.len() != d || steps.len() != d || offsets.len() != d {
            return Err(Error::InvalidGrid(format!(
                "dimension {d} but {} counts, {} steps, {} offsets",
                counts.len(),
                steps.len(),
                offsets.len()
            )));
        }
        if counts.iter().any(|&n| n == 0) {
            return Err(Error::InvalidGrid("counts must be positive".into()));
        }
        if steps.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid("steps must be positive and finite".into()));
        }
        if offsets.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("offsets must be finite".into()));
        }
        Ok(Self {
            basis,
            counts,
            steps,
            offsets,
        })
    }

    /// Cell-centered grid on `[-half_width, half_width]^d` with `n` cells per axis.
    pub fn centered(d: usize, n: usize, half_width: f64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        Self::new(
            OrderedBasis::identity(d),
            vec![n; d],
            vec![h; d],
            vec![-half_width + 0.5 * h; d],
        )
    }

    /// Node grid on `[-half_width, half_width)^d`; contains the origin when `n` is even.
    pub fn nodal(d: usize, n: usize, half_width: f64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        Self::new(
            OrderedBasis::identity(d),
            vec![n; d],
            vec![h; d],
            vec![-half_width; d],
        )
    }

    /// Axis-aligned tensor product `self x other` (used for phase space).
    pub fn product(&self, other: &UniformGrid) -> Result<Self> {
        if !self.basis.is_identity() || !other.basis.is_identity() {
            return Err(Error::UnsupportedBasis(
                "tensor products require axis-aligned grids".into(),
            ));
        }
        let cat = |a: &[f64], b: &[f64]| a.iter().chain(b).copied().collect::<Vec<_>>();
        Self::new(
            OrderedBasis::identity(self.dim() + other.dim()),
            self.counts.iter().chain(&other.counts).copied().collect(),
            cat(&self.steps, &other.steps),
            cat(&self.offsets, &other.offsets),
        )
    }

    /// Sub-grid made of axes `axes` (axis-aligned grids only).
    pub fn select_axes(&self, axes: &[usize]) -> Result<Self> {
        if !self.basis.is_identity() {
            return Err(Error::UnsupportedBasis("axis selection requires axis-aligned grids".into()));
        }
        Self::new(
            OrderedBasis::identity(axes.len()),
            axes.iter().map(|&k| self.counts[k]).collect(),
            axes.iter().map(|&k| self.steps[k]).collect(),
            axes.iter().map(|&k| self.offsets[k]).collect(),
        )
    }

    pub fn basis(&self) -> &OrderedBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.basis.determinant().abs() * self.steps.iter().product::<f64>()
    }

    pub fn is_axis_aligned(&self) -> bool {
        self.basis.is_identity()
    }

    /// Coordinates along axis `k` (in units of `e_k`).
    pub fn axis_coords(&self, k: usize) -> Vec<f64> {
        (0..self.counts[k])
            .map(|j| self.offsets[k] + j as f64 * self.steps[k])
            .collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1; d];
        for k in (0..d.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.counts[k + 1];
        }
        s
    }

    pub fn ravel(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&j, &n)| acc * n + j)
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.counts[k];
            flat /= self.counts[k];
        }
        idx
    }

    pub fn coords_of(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(k, &j)| self.offsets[k] + j as f64 * self.steps[k])
            .collect()
    }

    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        self.basis.combine(&self.coords_of(index))
    }

    pub fn point_of_flat(&self, flat: usize) -> Vec<f64> {
        self.point(&self.unravel(flat))
    }

    /// All sample points in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point_of_flat(i)).collect()
    }

    /// Fractional grid index of an arbitrary point.
    pub fn fractional_index(&self, point: &[f64]) -> Vec<f64> {
        self.basis
            .coordinates(point)
            .iter()
            .enumerate()
            .map(|(k, t)| (t - self.offsets[k]) / self.steps[k])
            .collect()
    }

    /// Index of a sample point, if `point` is one (within 1e-9 of a cell).
    pub fn index_of_point(&self, point: &[f64]) -> Option<Vec<usize>> {
        let frac = self.fractional_index(point);
        let mut idx = Vec::with_capacity(frac.len());
        for (k, f) in frac.iter().enumerate() {
            let j = f.round();
            if (f - j).abs() > 1e-9 || j < 0.0 || j >= self.counts[k] as f64 {
                return None;
            }
            idx.push(j as usize);
        }
        Some(idx)
    }

    /// Grid of the discrete Fourier transform: steps `2 pi / (N_k h_k)`,
    /// offsets `-floor(N_k / 2) * step` so that the origin is a sample.
    pub fn reciprocal(&self) -> Result<Self> {
        if !self.is_axis_aligned() {
            return Err(Error::UnsupportedBasis(
                "Fourier transforms need an axis-aligned grid".into(),
            ));
        }
        let steps: Vec<f64> = self
            .counts
            .iter()
            .zip(&self.steps)
            .map(|(&n, &h)| 2.0 * PI / (n as f64 * h))
            .collect();
        let offsets = self
            .counts
            .iter()
            .zip(&steps)
            .map(|(&n, &dk)| -((n / 2) as f64) * dk)
            .collect();
        Self::new(self.basis.clone(), self.counts.clone(), steps, offsets)
    }

    /// Cell-centered spatial grid whose reciprocal has the steps of `self`.
    pub fn spatial_dual(&self) -> Result<Self> {
        if !self.is_axis_aligned() {
            return Err(Error::UnsupportedBasis(
                "Fourier transforms need an axis-aligned grid".into(),
            ));
        }
        let steps: Vec<f64> = self
            .counts
            .iter()
            .zip(&self.steps)
            .map(|(&n, &dk)| 2.0 * PI / (n as f64 * dk))
            .collect();
        let offsets = self
            .counts
            .iter()
            .zip(&steps)
            .map(|(&n, &h)| -0.5 * n as f64 * h + 0.5 * h)
            .collect();
        Self::new(self.basis.clone(), self.counts.clone(), steps, offsets)
    }

    /// Whether `other` describes the same lattice up to 1e-12 relative.
    pub fn approx_eq(&self, other: &UniformGrid) -> bool {
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-12 * scale.max(1.0);
        self.counts == other.counts
            && self.basis == other.basis
            && self
                .steps
                .iter()
                .zip(&other.steps)
                .all(|(&a, &b)| close(a, b, a.abs()))
            && self
                .offsets
                .iter()
                .zip(&other.offsets)
                .zip(&self.steps)
                .all(|((&a, &b), &h)| close(a, b, h + a.abs()))
    }
}
