use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Exponent, MixedNormSpec};
use crate::error::{Error, Result};
use crate::lattice::{OrderedBasis, SampledField, UniformGrid};

/// `|f w|`, with exact zeros kept at zero even where `w` overflows.
fn weighted_abs(v: Complex64, w: f64) -> f64 {
    let a = v.norm();
    if a == 0.0 {
        0.0
    } else {
        a * w
    }
}

/// One-variable norm of `values[j * stride + r]` over `j`, with cell length `h`.
fn axis_norm(values: &[f64], len: usize, stride: usize, r: usize, p: Exponent, h: f64) -> f64 {
    match p {
        Exponent::Infinity => (0..len).map(|j| values[j * stride + r]).fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let s: f64 = (0..len).map(|j| values[j * stride + r].powf(p)).sum();
            (s * h).powf(1.0 / p)
        }
    }
}

/// Mixed norm of `f` over the ordered basis of `spec`.
///
/// `f` must be sampled along that basis: grid axis `k` runs along `e_k`. The
/// integrals are midpoint power sums in basis coordinates and `p = inf` is the
/// sample maximum.
pub fn mixed_norm(f: &SampledField, spec: &MixedNormSpec) -> Result<f64> {
    let basis = spec.validate()?;
    let grid = f.grid();
    if grid.dim() != spec.dim() {
        return Err(Error::Alignment(format!(
            "field of dimension {} against {} exponents",
            grid.dim(),
            spec.dim()
        )));
    }
    if !basis_close(grid.basis(), &basis) {
        return Err(Error::Alignment("field grid is not aligned to the norm basis".into()));
    }
    let d = grid.dim();
    let g0: Vec<f64> = f
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == Complex64::new(0.0, 0.0) {
                0.0
            } else {
                weighted_abs(v, spec.weight.evaluate(&grid.point_of_flat(i)))
            }
        })
        .collect();
    // Storage is row-major with the last axis fastest; e_1 is axis 0, the
    // slowest, so transpose to put the innermost integration first.
    let mut data = transpose_reverse(&g0, grid.counts());
    let counts: Vec<usize> = grid.counts().iter().rev().copied().collect();
    let steps: Vec<f64> = grid.steps().iter().rev().copied().collect();
    // `data` now has axis order (e_d, ..., e_1) with e_d slowest; reduce e_1 last in memory.
    for k in 0..d {
        let axis = d - 1 - k;
        data = reduce_trailing(&data, counts[axis], spec.exponents[k], steps[axis]);
    }
    Ok(data[0])
}

/// Reduces the fastest axis of a row-major array.
fn reduce_trailing(values: &[f64], len: usize, p: Exponent, h: f64) -> Vec<f64> {
    values
        .par_chunks(len)
        .map(|row| axis_norm(row, len, 1, 0, p, h))
        .collect()
}

/// Reverses the axis order of a row-major array.
fn transpose_reverse(values: &[f64], counts: &[usize]) -> Vec<f64> {
    let d = counts.len();
    if d == 1 {
        return values.to_vec();
    }
    let rev: Vec<usize> = counts.iter().rev().copied().collect();
    let mut strides = vec![1usize; d];
    for k in (0..d - 1).rev() {
        strides[k] = strides[k + 1] * counts[k + 1];
    }
    let mut out = vec![0.0; values.len()];
    out.par_iter_mut().enumerate().for_each(|(flat, o)| {
        // `flat` indexes the reversed array; axis k of it is axis d-1-k of the input.
        let mut rem = flat;
        let mut src = 0;
        for k in (0..d).rev() {
            let j = rem % rev[k];
            rem /= rev[k];
            src += j * strides[d - 1 - k];
        }
        *o = values[src];
    });
    out
}

fn basis_close(a: &OrderedBasis, b: &OrderedBasis) -> bool {
    a.dim() == b.dim()
        && a
            .vectors()
            .iter()
            .flatten()
            .zip(b.vectors().iter().flatten())
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0))
}

/// Re-indexes `f` onto a grid aligned to `basis`, which must be a signed,
/// scaled permutation of the field's grid basis (samples are only relabeled).
pub fn align_to_basis(f: &SampledField, basis: &OrderedBasis) -> Result<SampledField> {
    let grid = f.grid();
    if basis_close(grid.basis(), basis) {
        return Ok(f.clone());
    }
    let perm = basis.scaled_permutation_of(grid.basis()).ok_or_else(|| {
        Error::Alignment("the norm basis is not a scaled permutation of the sampling basis".into())
    })?;
    let d = grid.dim();
    let mut counts = Vec::with_capacity(d);
    let mut steps = Vec::with_capacity(d);
    let mut offsets = Vec::with_capacity(d);
    for &(src, c) in &perm {
        let (n, h, o) = (grid.counts()[src], grid.steps()[src], grid.offsets()[src]);
        counts.push(n);
        steps.push(h / c.abs());
        offsets.push(if c > 0.0 { o / c } else { (o + (n - 1) as f64 * h) / c });
    }
    let target = UniformGrid::new(basis.clone(), counts, steps, offsets)?;
    let values: Vec<Complex64> = (0..target.len())
        .into_par_iter()
        .map(|flat| {
            let idx = target.unravel(flat);
            let mut src_idx = vec![0usize; d];
            for (k, &(src, c)) in perm.iter().enumerate() {
                let n = grid.counts()[src];
                src_idx[src] = if c > 0.0 { idx[k] } else { n - 1 - idx[k] };
            }
            f.get(&src_idx)
        })
        .collect();
    SampledField::new(target, values)
}

/// Mixed norm of the step function `sum_j a(j) chi_{j + kappa(E)}`, evaluated
/// exactly: every cell has unit length in basis coordinates, so each
/// integration collapses to a power sum. The weight enters through its value
/// at the lattice point `j`, which is exact for constant weights.
pub fn discrete_mixed_norm(entries: &[(Vec<i64>, Complex64)], spec: &MixedNormSpec) -> Result<f64> {
    let basis = spec.validate()?;
    let d = spec.dim();
    if let Some((j, _)) = entries.iter().find(|(j, _)| j.len() != d) {
        return Err(Error::InvalidDimension(format!(
            "lattice index of length {} in dimension {d}",
            j.len()
        )));
    }
    // Merge duplicate indices, then key by the reversed index so that groups
    // sharing the outer coordinates are contiguous.
    let mut merged: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (j, a) in entries {
        *merged.entry(j.iter().rev().copied().collect()).or_default() += a;
    }
    let mut level: Vec<(Vec<i64>, f64)> = merged
        .into_iter()
        .map(|(key, a)| {
            let j: Vec<f64> = key.iter().rev().map(|&c| c as f64).collect();
            let w = spec.weight.evaluate(&basis.combine(&j));
            (key, weighted_abs(a, w))
        })
        .collect();
    for p in &spec.exponents {
        let mut next: Vec<(Vec<i64>, f64)> = Vec::new();
        let mut i = 0;
        while i < level.len() {
            let outer = &level[i].0[..level[i].0.len() - 1];
            let mut end = i;
            while end < level.len() && &level[end].0[..level[end].0.len() - 1] == outer {
                end += 1;
            }
            let vals: Vec<f64> = level[i..end].iter().map(|(_, v)| *v).collect();
            next.push((outer.to_vec(), axis_norm(&vals, vals.len(), 1, 0, *p, 1.0)));
            i = end;
        }
        level = next;
    }
    Ok(level.first().map_or(0.0, |(_, v)| *v))
}
