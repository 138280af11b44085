use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convert::change_quantization;
use super::symbol::{ClosedForm, Repr, Symbol};
use crate::error::{Error, Result};
use crate::lattice::{fourier_transform, QuantizationSpec, SampledField, UniformGrid};

/// Largest signal size accepted by the quadrature path.
pub const MAX_QUADRATURE_N: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplyMethod {
    /// Reduce to `A = 0` and sum `a(x, xi) F f(xi) e^{i<x, xi>}` per output sample.
    Fast,
    /// The double integral over `(y, xi)` evaluated directly; `d = 1` only.
    Quadrature,
}

/// Phase-space grid `signal x reciprocal(signal)` on which symbols act on `f`.
pub fn phase_grid_for(signal: &UniformGrid) -> Result<UniformGrid> {
    signal.product(&signal.reciprocal()?)
}

/// `Op_A(a) f(x) = (2 pi)^{-d} \iint a(x - A(x - y), xi) f(y) e^{i<x - y, xi>} dy dxi`.
pub fn apply_op(a: &Symbol, quant: &QuantizationSpec, f: &SampledField, method: ApplyMethod) -> Result<SampledField> {
    let grid = f.grid();
    if !grid.is_axis_aligned() {
        return Err(Error::UnsupportedBasis("operators act on axis-aligned signal grids".into()));
    }
    let d = grid.dim();
    if a.dim() != d || quant.dim() != d {
        return Err(Error::Alignment(format!(
            "symbol on R^{}, quantization of size {}, signal in d = {d}",
            2 * a.dim(),
            quant.dim()
        )));
    }
    let phase = phase_grid_for(grid)?;
    if let Repr::Sampled { field, .. } = &a.repr {
        if !field.grid().approx_eq(&phase) {
            return Err(Error::Alignment(
                "sampled symbols must live on the signal grid times its reciprocal grid".into(),
            ));
        }
    }
    match method {
        ApplyMethod::Fast => {
            // Op_A(c) = c I in every quantization; skip the FFT round trip.
            if let Some(ClosedForm::Constant { c }) = a.closed_form() {
                return f.scale(*c);
            }
            let kn = change_quantization(a, quant, &QuantizationSpec::kohn_nirenberg(d))?;
            fast(&kn, f)
        }
        ApplyMethod::Quadrature => quadrature(a, quant, f, &phase),
    }
}

fn fast(a: &Symbol, f: &SampledField) -> Result<SampledField> {
    let grid = f.grid();
    let d = grid.dim();
    let spectrum = fourier_transform(f)?;
    let freqs = spectrum.grid();
    let nf = freqs.len();
    let scale = (2.0 * PI).powf(-0.5 * d as f64) * freqs.cell_volume();
    let table = match &a.repr {
        Repr::Sampled { field, .. } => Some(field),
        Repr::Closed { .. } => None,
    };
    let xi_points = freqs.points();
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point_of_flat(i);
            let mut z = x.clone();
            z.extend(std::iter::repeat(0.0).take(d));
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, xi) in xi_points.iter().enumerate() {
                let fm = spectrum.values()[m];
                if fm == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let sym = match table {
                    Some(t) => t.values()[i * nf + m],
                    None => {
                        z[d..].copy_from_slice(xi);
                        a.evaluate(&z).expect("closed forms evaluate everywhere")
                    }
                };
                let arg: f64 = x.iter().zip(xi).map(|(p, q)| p * q).sum();
                acc += sym * fm * Complex64::from_polar(1.0, arg);
            }
            acc * scale
        })
        .collect();
    SampledField::new(grid.clone(), values)
}

fn quadrature(a: &Symbol, quant: &QuantizationSpec, f: &SampledField, phase: &UniformGrid) -> Result<SampledField> {
    let grid = f.grid();
    if grid.dim() != 1 {
        return Err(Error::Unsupported("quadrature is implemented for d = 1 only".into()));
    }
    let n = grid.len();
    if n > MAX_QUADRATURE_N {
        return Err(Error::InvalidGrid(format!("quadrature needs N <= {MAX_QUADRATURE_N}, got {n}")));
    }
    let t = quant.matrix()[0][0];
    let freqs = phase.select_axes(&[1])?;
    let xis = freqs.axis_coords(0);
    let xs = grid.axis_coords(0);
    let h = grid.steps()[0];
    let dxi = freqs.steps()[0];
    // The symbol is read at (1 - t) x_i + t y_j; at t = 0 or 1 that is a grid point.
    let pinned = if t == 0.0 || t == 1.0 { Some(t == 1.0) } else { None };
    let table: Option<Vec<Complex64>> = match (&a.repr, pinned) {
        (Repr::Sampled { field, .. }, Some(_)) => Some(field.values().to_vec()),
        (Repr::Sampled { .. }, None) => {
            return Err(Error::Unsupported(
                "sampled symbols can only be read at grid points: quadrature needs A = 0 or A = 1".into(),
            ))
        }
        (Repr::Closed { .. }, Some(_)) => {
            Some(a.sample_on(phase)?.into_values())
        }
        _ => None,
    };
    // e^{i (x_i - y_j) xi_m} depends on i - j only.
    let waves: Vec<Vec<Complex64>> = (0..2 * n - 1)
        .map(|k| {
            let diff = (k as f64 - (n - 1) as f64) * h;
            xis.iter().map(|&xi| Complex64::from_polar(1.0, diff * xi)).collect()
        })
        .collect();
    let scale = h * dxi / (2.0 * PI);
    let fv = f.values();
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &fj) in fv.iter().enumerate() {
                if fj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let wave = &waves[i + n - 1 - j];
                let mut inner = Complex64::new(0.0, 0.0);
                match (&table, pinned) {
                    (Some(tab), Some(at_y)) => {
                        let row = if at_y { j } else { i };
                        let s = &tab[row * n..(row + 1) * n];
                        for (sv, wv) in s.iter().zip(wave) {
                            inner += sv * wv;
                        }
                    }
                    _ => {
                        let x = (1.0 - t) * xs[i] + t * xs[j];
                        for (xi, wv) in xis.iter().zip(wave) {
                            inner += a.evaluate(&[x, *xi]).expect("closed forms evaluate everywhere") * wv;
                        }
                    }
                }
                acc += inner * fj;
            }
            acc * scale
        })
        .collect();
    SampledField::new(grid.clone(), values)
}
