//! `a_2 = exp(i <(A_1 - A_2) D_xi, D_x>) a_1`, which gives
//! `Op_{A_1}(a_1) = Op_{A_2}(a_2)`.
//!
//! With `T = A_1 - A_2` the exponent is `L = -i sum_{jl} T_jl d_{x_j} d_{xi_l}`.
//! Polynomials use the terminating series `sum_k L^k a / k!`, Gaussians the
//! closed form of the heat flow `exp(grad^T M grad / 2)` with
//! `M = -i [[0, T], [T^T, 0]]`, and samples the Fourier multiplier
//! `exp(i <T k_xi, k_x>)` where `k_x`, `k_xi` are dual to `x`, `xi`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::symbol::{covariance_of, poly_of, terms_of, ClosedForm, Poly, Profile, Repr, Symbol};
use crate::error::{Error, Result};
use crate::lattice::{dft_nd, QuantizationSpec, SampledField};

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Symbol `a_2` with `Op_{A_2}(a_2) = Op_{A_1}(a)`.
pub fn change_quantization(a: &Symbol, a1: &QuantizationSpec, a2: &QuantizationSpec) -> Result<Symbol> {
    let d = a.dim();
    if a1.dim() != d || a2.dim() != d {
        return Err(Error::InvalidDimension(format!(
            "quantization matrices of size {} and {} for a symbol in d = {d}",
            a1.dim(),
            a2.dim()
        )));
    }
    let t = a1.difference(a2)?;
    if t.iter().flatten().all(|&v| v == 0.0) {
        return Ok(a.clone());
    }
    convert(a, &t)
}

/// `b = exp(i <D_xi, D_x>) conj(a)`, the symbol of `Op_0(a)^*` in the
/// same quantization.
pub fn adjoint_symbol(a: &Symbol) -> Result<Symbol> {
    let d = a.dim();
    let id: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    convert(&a.conj()?, &id)
}

fn convert(a: &Symbol, t: &[Vec<f64>]) -> Result<Symbol> {
    let d = a.dim();
    let out = match &a.repr {
        Repr::Sampled { field, .. } => {
            if !a.decays() {
                return Err(Error::NonDecayingSymbol(format!(
                    "boundary maximum {:e} relative to {:e}; growing symbols need a closed form",
                    field.boundary_max(),
                    field.max_abs()
                )));
            }
            Symbol::sampled(convert_samples(field, t)?, false)?
        }
        Repr::Closed { form, .. } => match form {
            ClosedForm::Constant { .. } => a.clone(),
            ClosedForm::Polynomial { terms } => {
                Symbol::closed(ClosedForm::Polynomial { terms: terms_of(&convert_poly(&poly_of(terms), t, d)) }, d)?
            }
            ClosedForm::Separable { x, xi, c } => match (x, xi) {
                (Profile::One, _) | (_, Profile::One) => a.clone(),
                (Profile::Plane { k }, Profile::Plane { k: h }) => {
                    let phase: f64 = (0..d).map(|j| (0..d).map(|l| k[j] * t[j][l] * h[l]).sum::<f64>()).sum();
                    let c = c * Complex64::from_polar(1.0, phase);
                    Symbol::closed(ClosedForm::Separable { x: x.clone(), xi: xi.clone(), c }, d)?
                }
                (Profile::Gaussian { center: cx, width: wx }, Profile::Gaussian { center: cxi, width: wxi }) => {
                    let n = 2 * d;
                    let center: Vec<f64> = cx.iter().chain(cxi).copied().collect();
                    let cov = DMatrix::from_fn(n, n, |i, j| match (i == j, i < d) {
                        (true, true) => Complex64::new(wx * wx, 0.0),
                        (true, false) => Complex64::new(wxi * wxi, 0.0),
                        _ => c0(),
                    });
                    gaussian_convert(center, cov, *c, t, d)?
                }
                _ => {
                    return Err(Error::Unsupported(
                        "quantization change of this separable symbol has no closed form; sample it".into(),
                    ))
                }
            },
            ClosedForm::GaussianEnvelope { .. } | ClosedForm::Gaussian { .. } => {
                let (center, cov, amp) = covariance_of(form).expect("Gaussian forms have a covariance");
                gaussian_convert(center, cov, amp, t, d)?
            }
        },
    };
    Ok(Symbol { envelope: a.envelope.clone(), ..out })
}

/// `d_{x_j} d_{xi_l}` of a polynomial.
fn mixed_derivative(p: &Poly, j: usize, l: usize) -> Poly {
    let mut out = Poly::new();
    for ((x, xi), c) in p {
        if x[j] == 0 || xi[l] == 0 {
            continue;
        }
        let mut x2 = x.clone();
        let mut xi2 = xi.clone();
        let f = x[j] as f64 * xi[l] as f64;
        x2[j] -= 1;
        xi2[l] -= 1;
        *out.entry((x2, xi2)).or_insert_with(c0) += c * f;
    }
    out
}

pub(crate) fn convert_poly(p: &Poly, t: &[Vec<f64>], d: usize) -> Poly {
    let mut total = p.clone();
    let mut term = p.clone();
    let mut k = 0usize;
    while !term.is_empty() {
        k += 1;
        // L^k a / k! = L (L^{k-1} a / (k-1)!) / k
        let mut next = Poly::new();
        for j in 0..d {
            for l in 0..d {
                if t[j][l] == 0.0 {
                    continue;
                }
                let w = Complex64::new(0.0, -t[j][l] / k as f64);
                for (key, c) in mixed_derivative(&term, j, l) {
                    *next.entry(key).or_insert_with(c0) += c * w;
                }
            }
        }
        next.retain(|_, c| *c != c0());
        for (key, c) in &next {
            *total.entry(key.clone()).or_insert_with(c0) += c;
        }
        term = next;
    }
    total.retain(|_, c| *c != c0());
    total
}

fn gaussian_convert(
    center: Vec<f64>,
    cov: DMatrix<Complex64>,
    amp: Complex64,
    t: &[Vec<f64>],
    d: usize,
) -> Result<Symbol> {
    let n = 2 * d;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let v = match (i < d, j < d) {
            (true, false) => t[i][j - d],
            (false, true) => t[j][i - d],
            _ => 0.0,
        };
        Complex64::new(0.0, -v)
    });
    let new_cov = &cov + &m;
    // Follow sqrt(det(S + sM)) continuously in s so the branch is the one
    // reached from the real starting covariance.
    let steps = 64;
    let mut prev = cov.determinant().sqrt();
    let root0 = prev;
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let det = (&cov + &m * Complex64::new(s, 0.0)).determinant();
        if det.norm() == 0.0 {
            return Err(Error::NonDecayingSymbol("covariance path crosses a singular matrix".into()));
        }
        let r = det.sqrt();
        prev = if (r - prev).norm() <= (-r - prev).norm() { r } else { -r };
    }
    let amplitude = amp * root0 / prev;
    let covariance = (0..n).map(|i| (0..n).map(|j| new_cov[(i, j)]).collect()).collect();
    Symbol::closed(ClosedForm::Gaussian { center, covariance, amplitude }, d)
}

fn convert_samples(field: &SampledField, t: &[Vec<f64>]) -> Result<SampledField> {
    let grid = field.grid();
    let counts = grid.counts().to_vec();
    let d = counts.len() / 2;
    let kappa: Vec<Vec<f64>> = (0..2 * d)
        .map(|k| {
            let n = counts[k];
            let base = 2.0 * PI / (n as f64 * grid.steps()[k]);
            (0..n)
                .map(|m| {
                    let s = if m >= n / 2 { m as i64 - n as i64 } else { m as i64 };
                    s as f64 * base
                })
                .collect()
        })
        .collect();
    let mut values = field.values().to_vec();
    dft_nd(&mut values, &counts, false);
    let scale = 1.0 / values.len() as f64;
    for (i, v) in values.iter_mut().enumerate() {
        let idx = grid.unravel(i);
        let mut phase = 0.0;
        for j in 0..d {
            for l in 0..d {
                if t[j][l] != 0.0 {
                    phase += kappa[j][idx[j]] * t[j][l] * kappa[d + l][idx[d + l]];
                }
            }
        }
        *v *= Complex64::from_polar(scale, phase);
    }
    dft_nd(&mut values, &counts, true);
    SampledField::new(grid.clone(), values)
}
