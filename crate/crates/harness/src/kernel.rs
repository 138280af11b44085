//! Two-path check of the kernel form of `V_phi(Op(a) f)`:
//!
//! ```text
//! V(Op_0(a) f)(x, xi) = (2 pi)^{-d} (f, e^{i<., xi>} H(x, xi, .)) w(x, xi),
//! H(x, xi, y) = v(x - y) \int Phi(x, xi, y, eta) F phi(eta) v(eta) e^{i<y - x, eta>} d eta,
//! Phi = b(y, xi + eta) / (w(x, xi) v(x - y) v(eta)),
//! ```
//!
//! with `b` the adjoint symbol. The left side runs `apply_op` and `stft`;
//! the right side assembles `H` by quadrature on the signal and reciprocal grids.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use modcalc_core::lattice::{QuantizationSpec, SampledField};
use modcalc_core::pdo::{adjoint_symbol, apply_op, ApplyMethod, Symbol};
use modcalc_core::stft::{stft, StftOptions, Window};
use modcalc_core::weights::Weight;
use modcalc_core::{Complex64, Error, Result};

/// Most probes accepted per call.
pub const MAX_PROBES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeValue {
    pub x: f64,
    pub xi: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    /// `max |lhs - rhs| / max |lhs|` over the probes; 0 when both sides vanish.
    pub deviation: f64,
    pub probes: Vec<ProbeValue>,
}

/// Probes on an `k x k` lattice of spectrogram samples, `k^2 = count`,
/// spread over the middle of the position axis and the low frequencies.
pub fn default_probes(f: &SampledField, count: usize) -> Result<Vec<(f64, f64)>> {
    let k = (count as f64).sqrt().round() as usize;
    if k * k != count || k == 0 {
        return Err(Error::InvalidProbe(format!("{count} probes do not form a square lattice")));
    }
    let grid = f.grid();
    let freqs = grid.reciprocal()?;
    let n = grid.len();
    let xs = grid.axis_coords(0);
    let xis = freqs.axis_coords(0);
    let pick = |len: usize, span: usize, j: usize| -> usize {
        let lo = len / 2 - span / 2;
        lo + if k > 1 { j * span / (k - 1) } else { span / 2 }
    };
    let span_x = n / 2;
    let span_xi = (n / 4).min(freqs.len() - 1);
    let mut out = Vec::with_capacity(count);
    for i in 0..k {
        for j in 0..k {
            out.push((xs[pick(n, span_x, i).min(n - 1)], xis[pick(freqs.len(), span_xi, j).min(freqs.len() - 1)]));
        }
    }
    Ok(out)
}

pub fn stft_kernel_crosscheck(
    a: &Symbol,
    f: &SampledField,
    window: &Window,
    w: &Weight,
    v: &Weight,
    probes: &[(f64, f64)],
) -> Result<KernelReport> {
    let grid = f.grid();
    if grid.dim() != 1 || a.dim() != 1 {
        return Err(Error::Unsupported("the kernel crosscheck is one-dimensional".into()));
    }
    if probes.len() > MAX_PROBES {
        return Err(Error::InvalidProbe(format!("{} probes exceed the limit of {MAX_PROBES}", probes.len())));
    }
    w.check_dim(2)?;
    v.check_dim(1)?;

    let image = apply_op(a, &QuantizationSpec::kohn_nirenberg(1), f, ApplyMethod::Fast)?;
    let spec = stft(&image, window, &StftOptions::default())?;
    let sgrid = spec.field.grid();
    let lhs: Vec<Complex64> = probes
        .iter()
        .map(|&(x, xi)| {
            sgrid
                .index_of_point(&[x, xi])
                .map(|i| spec.field.get(&i))
                .ok_or_else(|| Error::InvalidProbe(format!("({x}, {xi}) is not a spectrogram sample")))
        })
        .collect::<Result<_>>()?;

    let b = adjoint_symbol(a)?;
    let phase = sgrid.clone();
    let b_at = |y: f64, zeta: f64| -> Complex64 {
        match b.samples() {
            None => b.evaluate(&[y, zeta]).expect("closed forms evaluate everywhere"),
            // Off the sampled box the (decayed) symbol counts as zero.
            Some(s) => phase.index_of_point(&[y, zeta]).map_or(Complex64::new(0.0, 0.0), |i| s.get(&i)),
        }
    };
    let phi = window.prepare()?;
    let freqs = grid.reciprocal()?;
    let etas = freqs.axis_coords(0);
    let deta = freqs.steps()[0];
    let ys = grid.axis_coords(0);
    let h = grid.steps()[0];
    let phi_hat: Vec<Complex64> = etas.iter().map(|&e| phi.fourier_eval(&[e])).collect();
    let v_eta: Vec<f64> = etas.iter().map(|&e| v.evaluate(&[e])).collect();

    let rhs: Vec<Complex64> = probes
        .par_iter()
        .map(|&(x, xi)| {
            let wx = w.evaluate(&[x, xi]);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&y, fy) in ys.iter().zip(f.values()) {
                if *fy == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let vxy = v.evaluate(&[x - y]);
                let mut hv = Complex64::new(0.0, 0.0);
                for (k, &eta) in etas.iter().enumerate() {
                    let big_phi = b_at(y, xi + eta) / (wx * vxy * v_eta[k]);
                    hv += big_phi * phi_hat[k] * v_eta[k] * Complex64::from_polar(1.0, (y - x) * eta);
                }
                let hv = hv * vxy * deta;
                acc += fy * Complex64::from_polar(1.0, -y * xi) * hv.conj();
            }
            acc * h * wx / (2.0 * PI)
        })
        .collect();

    let scale = lhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).norm()).fold(0.0, f64::max);
    let deviation = if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    };
    Ok(KernelReport {
        deviation,
        probes: probes.iter().zip(lhs.iter().zip(&rhs)).map(|(&(x, xi), (&l, &r))| ProbeValue { x, xi, lhs: l, rhs: r }).collect(),
    })
}
