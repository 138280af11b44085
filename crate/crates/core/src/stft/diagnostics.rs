use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transform::Spectrogram;
use crate::error::{Error, Result};
use crate::lattice::{SampledField, SpectralDifferentiator};
use crate::util::multi_indices;
use crate::weights::{log_factorial, Weight};

/// `max_{|alpha|, |beta| <= max_order, x} |x^beta d^alpha f(x)| / (h^{|alpha+beta|} alpha!^s beta!^sigma)`.
///
/// Derivative samples at or below the spectral rounding floor count as zero.
pub fn gs_seminorm(f: &SampledField, s: f64, sigma: f64, h: f64, max_order: usize) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::UndefinedFit(format!("h must be positive, got {h}")));
    }
    let d = f.grid().dim();
    let diff = SpectralDifferentiator::new(f)?;
    let points = f.grid().points();
    let mut best = 0.0f64;
    for ka in 0..=max_order {
        for alpha in multi_indices(d, ka) {
            let df = diff.derivative(&alpha)?;
            let floor = diff.noise_floor(&alpha);
            let la = s * log_factorial(&alpha);
            for kb in 0..=max_order {
                let scale = (ka + kb) as f64 * h.ln();
                for beta in multi_indices(d, kb) {
                    let lb = sigma * log_factorial(&beta);
                    for (v, p) in df.values().iter().zip(&points) {
                        let m = v.norm();
                        if m <= floor {
                            continue;
                        }
                        let xb: f64 = p.iter().zip(&beta).map(|(x, &b)| x.abs().powi(b as i32)).product();
                        if xb == 0.0 {
                            continue;
                        }
                        let val = (m.ln() + xb.ln() - scale - la - lb).exp();
                        best = best.max(val);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Fit of `|V f(x, xi)| <= C w(x) exp(-r |xi|^(1/s))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c: f64,
    pub r: f64,
    pub s: f64,
    /// Largest `r` compatible with the smallest possible `C`.
    pub r_max_at_c: f64,
    /// `boundary_ratio < 1e-10`; when false the box cuts off the decay and
    /// `r` is only a lower bound.
    pub decayed: bool,
    /// Largest `|V|` on the frequency boundary relative to the largest `|V|`.
    pub boundary_ratio: f64,
}

/// Fit plus the log residual `log|V| - log w + r|xi|^(1/s) - log C <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFitReport {
    pub fit: DecayFit,
    pub residual: SampledField,
}

/// Envelope fit of the spectrogram decay in frequency.
///
/// With `L(x, xi) = log|V| - log w(x)` and the row peak `A(x) = max_xi L`,
/// `C = exp(max A)` is the smallest admissible constant and
/// `r = min (A(x) - L(x, xi)) / |xi|^(1/s)` over `xi != 0`. This `r` does not
/// depend on `w`, so a larger weight never lowers it.
pub fn stft_decay_fit(spec: &Spectrogram, w: &Weight, s: f64) -> Result<DecayFitReport> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::UndefinedFit(format!("s must be positive, got {s}")));
    }
    let d = spec.dim();
    w.check_dim(d)?;
    let grid = spec.field.grid();
    let positions = grid.select_axes(&(0..d).collect::<Vec<_>>())?;
    let freqs = grid.select_axes(&(d..2 * d).collect::<Vec<_>>())?;
    let block = freqs.len();
    let vmax = spec.field.max_abs();
    if vmax == 0.0 {
        return Err(Error::UndefinedFit("the spectrogram vanishes".into()));
    }

    let xi_pow: Vec<f64> = (0..block)
        .map(|m| freqs.point_of_flat(m).iter().map(|v| v * v).sum::<f64>().sqrt().powf(1.0 / s))
        .collect();
    let on_boundary: Vec<bool> = (0..block)
        .map(|m| {
            freqs
                .unravel(m)
                .iter()
                .zip(freqs.counts())
                .any(|(&j, &n)| j == 0 || j + 1 == n)
        })
        .collect();

    let mut log_c = f64::NEG_INFINITY;
    let mut r = f64::INFINITY;
    let mut boundary = 0.0f64;
    let mut logs = vec![f64::NEG_INFINITY; spec.field.len()];
    for (i, row) in spec.field.values().chunks(block).enumerate() {
        let lw = w.log_eval(&positions.point_of_flat(i));
        let mut peak = f64::NEG_INFINITY;
        for (m, v) in row.iter().enumerate() {
            let l = v.norm().ln() - lw;
            logs[i * block + m] = l;
            peak = peak.max(l);
            if on_boundary[m] {
                boundary = boundary.max(v.norm());
            }
        }
        if peak == f64::NEG_INFINITY {
            continue;
        }
        log_c = log_c.max(peak);
        for m in 0..block {
            if xi_pow[m] > 0.0 {
                r = r.min((peak - logs[i * block + m]) / xi_pow[m]);
            }
        }
    }
    if !r.is_finite() {
        // Every nonzero row is concentrated at xi = 0.
        r = f64::MAX;
    }
    let mut r_max = f64::INFINITY;
    for (k, l) in logs.iter().enumerate() {
        let p = xi_pow[k % block];
        if p > 0.0 && l.is_finite() {
            r_max = r_max.min((log_c - l) / p);
        }
    }
    let residual: Vec<Complex64> = logs
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            // Exact zeros carry no information; mark them far below zero.
            let v = if l.is_finite() {
                l + r.min(1e300) * xi_pow[k % block] - log_c
            } else {
                -745.0
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    let boundary_ratio = boundary / vmax;
    Ok(DecayFitReport {
        fit: DecayFit {
            c: log_c.exp(),
            r,
            s,
            r_max_at_c: r_max,
            decayed: boundary_ratio < 1e-10,
            boundary_ratio,
        },
        residual: SampledField::new(grid.clone(), residual)?,
    })
}
