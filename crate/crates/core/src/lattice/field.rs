use num_complex::Complex64;

use super::grid::UniformGrid;
use crate::error::{Error, Result};

/// Complex samples of a function on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidField("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: UniformGrid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let values = (0..grid.len()).map(|i| f(&grid.point_of_flat(i))).collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn<F>(grid: UniformGrid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::from_fn(grid, |p| Complex64::new(f(p), 0.0))
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn into_parts(self) -> (UniformGrid, Vec<Complex64>) {
        (self.grid, self.values)
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.values[self.grid.ravel(index)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(sum |f|^2 * cell volume)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Cell-volume weighted inner product `sum f conj(g) dV`.
    pub fn inner(&self, other: &SampledField) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn check_same_grid(&self, other: &SampledField) -> Result<()> {
        if self.grid.approx_eq(&other.grid) {
            Ok(())
        } else {
            Err(Error::Alignment("fields live on different grids".into()))
        }
    }

    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: Complex64, other: &SampledField, beta: Complex64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Relative l2 distance `||self - other|| / ||other||`.
    pub fn relative_l2_error(&self, reference: &SampledField) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let base = reference.l2_norm();
        Ok(if base == 0.0 { diff } else { diff / base })
    }

    /// Largest |f| over samples on the outer face of the grid box.
    pub fn boundary_max(&self) -> f64 {
        let counts = self.grid.counts();
        (0..self.len())
            .filter(|&i| {
                self.grid
                    .unravel(i)
                    .iter()
                    .zip(counts)
                    .any(|(&j, &n)| j == 0 || j + 1 == n)
            })
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }

    /// Shift by whole cells: `g[j] = f[j - shift]`, zero-filled.
    pub fn shift_cells(&self, shift: &[isize]) -> Self {
        let counts = self.grid.counts();
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        for (i, v) in self.values.iter().enumerate() {
            let idx = self.grid.unravel(i);
            let target: Option<Vec<usize>> = idx
                .iter()
                .zip(shift)
                .zip(counts)
                .map(|((&j, &s), &n)| {
                    let t = j as isize + s;
                    (t >= 0 && (t as usize) < n).then_some(t as usize)
                })
                .collect();
            if let Some(t) = target {
                out[self.grid.ravel(&t)] = *v;
            }
        }
        Self {
            grid: self.grid.clone(),
            values: out,
        }
    }
}
