//! Envelope fits of `|d^alpha f(x)| <= C h^|alpha| alpha!^s w(x)`.
//!
//! For every order `k` the upper envelope
//! `e_k = max_{|alpha| = k} [ log max_x |d^alpha f(x)| / w(x) - s log alpha! ]`
//! is measured. The reported constants are anchored at order zero,
//! `C = exp(e_0)` and `h = max_k exp((e_k - e_0) / k)`, so the bound holds at
//! every sampled order. A least-squares line through the `e_k` is kept as a
//! diagnostic. Samples at or below the source's rounding floor are treated
//! as zero.

use serde::{Deserialize, Serialize};

use super::{log_factorial, Weight};
use crate::error::{Error, Result};
use crate::lattice::{SampledField, SpectralDifferentiator, UniformGrid};
use crate::util::multi_indices;

pub const MAX_GEVREY_ORDER: usize = 12;

/// Anything that can produce `d^alpha f` on a grid.
pub trait DerivativeSource {
    fn grid(&self) -> &UniformGrid;
    fn derivative(&self, alpha: &[usize]) -> Result<SampledField>;
    /// Magnitude below which samples of `d^alpha f` are rounding noise.
    fn noise_floor(&self, alpha: &[usize]) -> f64;
}

impl DerivativeSource for SpectralDifferentiator {
    fn grid(&self) -> &UniformGrid {
        SpectralDifferentiator::grid(self)
    }

    fn derivative(&self, alpha: &[usize]) -> Result<SampledField> {
        SpectralDifferentiator::derivative(self, alpha)
    }

    fn noise_floor(&self, alpha: &[usize]) -> f64 {
        SpectralDifferentiator::noise_floor(self, alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GevreyOptions {
    pub s: f64,
    pub max_order: usize,
    /// Orders whose required `h` exceeds this fail.
    #[serde(default)]
    pub h_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: usize,
    /// `e_k`; `None` when every derivative of this order is below noise.
    pub log_envelope: Option<f64>,
    /// `exp((e_k - e_0) / k)` for `k >= 1`.
    pub required_h: Option<f64>,
    /// `e_k - log C - k log h`, at most zero by construction.
    pub residual: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyFit {
    pub s: f64,
    pub c: f64,
    /// `0` together with `any_h` when no derivative of positive order is resolved.
    pub h: f64,
    pub any_h: bool,
    /// Least-squares `(log C, log h)` over orders with a resolved envelope.
    pub lsq_line: Option<(f64, f64)>,
    /// Required `h` is nonincreasing over the upper half of the orders.
    pub h_nonincreasing_tail: bool,
    pub orders: Vec<OrderReport>,
    pub passed: bool,
}

/// Fits the Gevrey envelope of the derivatives supplied by `source`.
pub fn gevrey_derivative_check<S: DerivativeSource + ?Sized>(
    source: &S,
    w: &Weight,
    opts: &GevreyOptions,
) -> Result<GevreyFit> {
    if opts.max_order > MAX_GEVREY_ORDER {
        return Err(Error::UndefinedFit(format!(
            "max_order {} exceeds {MAX_GEVREY_ORDER}",
            opts.max_order
        )));
    }
    if !(opts.s.is_finite() && opts.s > 0.0) {
        return Err(Error::UndefinedFit(format!("s must be positive, got {}", opts.s)));
    }
    let grid = source.grid();
    let d = grid.dim();
    w.check_dim(d)?;
    let log_w: Vec<f64> = (0..grid.len()).map(|i| w.log_eval(&grid.point_of_flat(i))).collect();

    let mut envelopes = Vec::with_capacity(opts.max_order + 1);
    for k in 0..=opts.max_order {
        let mut e_k: Option<f64> = None;
        for alpha in multi_indices(d, k) {
            let df = source.derivative(&alpha)?;
            let floor = source.noise_floor(&alpha);
            let env = df
                .values()
                .iter()
                .zip(&log_w)
                .filter(|(v, _)| v.norm() > floor)
                .map(|(v, lw)| v.norm().ln() - lw)
                .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
            if let Some(env) = env {
                let val = env - opts.s * log_factorial(&alpha);
                e_k = Some(e_k.map_or(val, |m| m.max(val)));
            }
        }
        envelopes.push(e_k);
    }

    let Some(e0) = envelopes[0] else {
        // f vanishes: every bound holds with C = 0.
        let orders = (0..=opts.max_order)
            .map(|order| OrderReport {
                order,
                log_envelope: envelopes[order],
                required_h: None,
                residual: None,
                pass: envelopes[order].is_none(),
            })
            .collect::<Vec<_>>();
        let passed = orders.iter().all(|o| o.pass);
        return Ok(GevreyFit {
            s: opts.s,
            c: 0.0,
            h: 0.0,
            any_h: true,
            lsq_line: None,
            h_nonincreasing_tail: true,
            orders,
            passed,
        });
    };

    let required: Vec<Option<f64>> = envelopes
        .iter()
        .enumerate()
        .map(|(k, e)| if k == 0 { None } else { e.map(|e| ((e - e0) / k as f64).exp()) })
        .collect();
    let h = required.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let any_h = required.iter().all(Option::is_none);
    let log_c = e0;
    let log_h = if any_h { f64::NEG_INFINITY } else { h.ln() };

    let orders: Vec<OrderReport> = (0..=opts.max_order)
        .map(|k| {
            let pass = match (k, required[k], opts.h_limit) {
                (0, _, _) => true,
                (_, None, _) => true,
                (_, Some(r), Some(limit)) => r <= limit * (1.0 + 1e-9),
                (_, Some(r), None) => r.is_finite(),
            };
            let residual = envelopes[k].map(|e| {
                if k == 0 {
                    0.0
                } else {
                    e - log_c - k as f64 * log_h
                }
            });
            OrderReport {
                order: k,
                log_envelope: envelopes[k],
                required_h: required[k],
                residual,
                pass,
            }
        })
        .collect();

    let pts: Vec<(f64, f64)> = envelopes
        .iter()
        .enumerate()
        .filter_map(|(k, e)| e.map(|e| (k as f64, e)))
        .collect();
    let lsq_line = least_squares(&pts);

    let tail: Vec<f64> = required
        .iter()
        .skip((opts.max_order / 2).max(1))
        .flatten()
        .copied()
        .collect();
    let h_nonincreasing_tail = tail.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-9));

    let passed = orders.iter().all(|o| o.pass) && log_c.is_finite();
    Ok(GevreyFit {
        s: opts.s,
        c: log_c.exp(),
        h,
        any_h,
        lsq_line,
        h_nonincreasing_tail,
        orders,
        passed,
    })
}

/// [`gevrey_derivative_check`] with spectral differentiation of `f`.
pub fn gevrey_field_check(f: &SampledField, w: &Weight, opts: &GevreyOptions) -> Result<GevreyFit> {
    let source = SpectralDifferentiator::new(f)?;
    gevrey_derivative_check(&source, w, opts)
}

fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}
