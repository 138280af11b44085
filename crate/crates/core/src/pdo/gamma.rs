//! Finite-grid diagnostics of the Gevrey symbol classes
//! `|d^alpha a(z)| <= C h^|alpha| alpha!^s w_0(z)`.
//!
//! A finite grid cannot certify membership. Verdicts say whether some finite
//! constants fit the sampled data and whether the constants behave as the
//! every-`h` (every-`r`) class would require along a sweep.

use serde::{Deserialize, Serialize};

use super::convert::change_quantization;
use super::symbol::{eval_poly_terms, poly_of, terms_of, ClosedForm, Poly, Symbol};
use crate::error::{Error, Result};
use crate::lattice::{QuantizationSpec, SampledField, SpectralDifferentiator, UniformGrid};
use crate::stft::{stft, stft_decay_fit, DecayFit, StftOptions, Window};
use crate::weights::{gevrey_derivative_check, DerivativeSource, GevreyFit, GevreyOptions, Weight};

/// Entries allowed in the phase-space STFT of a symbol.
pub const MAX_STFT_ENTRIES: usize = 1 << 26;
/// Largest per-axis size of the symbol grid in stft mode.
pub const MAX_STFT_N: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    Stft,
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Some finite constants fit on the sampled box.
    RoumieuConsistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaOptions {
    /// Samples per phase-space axis; 64 in derivative mode, 32 in stft mode.
    #[serde(default)]
    pub n: Option<usize>,
    /// Half width of the phase-space box; 8 by default.
    #[serde(default)]
    pub half_width: Option<f64>,
    /// Highest derivative order in derivative mode.
    #[serde(default = "default_order")]
    pub max_order: usize,
    /// Points of the `h` (or `r`) sweep.
    #[serde(default = "default_sweep")]
    pub sweep: usize,
}

fn default_order() -> usize {
    8
}

fn default_sweep() -> usize {
    4
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self { n: None, half_width: None, max_order: default_order(), sweep: default_sweep() }
    }
}

/// One point of the sweep toward the every-`h` (every-`r`) class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// `h` in derivative mode, `r` in stft mode.
    pub param: f64,
    /// Smallest admissible `log C` for this parameter on the box.
    pub log_constant: f64,
    /// The bound is attained away from the resolution limit (a derivative
    /// order below the highest resolved one, or a frequency in the inner half
    /// of the box).
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub mode: GammaMode,
    pub s: f64,
    pub verdict: Verdict,
    /// Constants stay governed by resolved data for every parameter of the sweep.
    pub beurling_trend: bool,
    pub derivative_fit: Option<GevreyFit>,
    pub stft_fit: Option<DecayFit>,
    pub sweep: Vec<SweepPoint>,
    pub grid: UniformGrid,
}

/// Derivatives of a polynomial symbol, computed symbolically.
struct PolyDerivatives {
    grid: UniformGrid,
    poly: Poly,
    d: usize,
}

impl DerivativeSource for PolyDerivatives {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn derivative(&self, alpha: &[usize]) -> Result<SampledField> {
        let mut p = Poly::new();
        for ((x, xi), c) in &self.poly {
            let mut coef = *c;
            let mut x2 = x.clone();
            let mut xi2 = xi.clone();
            let mut zero = false;
            for (k, &a) in alpha.iter().enumerate() {
                let e = if k < self.d { &mut x2[k] } else { &mut xi2[k - self.d] };
                if (*e as usize) < a {
                    zero = true;
                    break;
                }
                for m in 0..a {
                    coef *= (*e as usize - m) as f64;
                }
                *e -= a as u32;
            }
            if !zero {
                *p.entry((x2, xi2)).or_default() += coef;
            }
        }
        let terms = terms_of(&p);
        let d = self.d;
        SampledField::from_fn(self.grid.clone(), |z| eval_poly_terms(&terms, &z[..d], &z[d..]))
    }

    fn noise_floor(&self, _alpha: &[usize]) -> f64 {
        0.0
    }
}

/// Spectral derivatives, with the exact samples at order zero.
struct Sampled {
    field: SampledField,
    diff: SpectralDifferentiator,
}

impl DerivativeSource for Sampled {
    fn grid(&self) -> &UniformGrid {
        self.field.grid()
    }

    fn derivative(&self, alpha: &[usize]) -> Result<SampledField> {
        if alpha.iter().all(|&a| a == 0) {
            Ok(self.field.clone())
        } else {
            self.diff.derivative(alpha)
        }
    }

    fn noise_floor(&self, alpha: &[usize]) -> f64 {
        if alpha.iter().all(|&a| a == 0) {
            0.0
        } else {
            self.diff.noise_floor(alpha)
        }
    }
}

fn check_inputs(a: &Symbol, w0: &Weight, s: f64) -> Result<()> {
    w0.check_dim(2 * a.dim())?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidExponent(s));
    }
    Ok(())
}

/// Fits the Gevrey envelope of `a` against `w0` in the requested mode.
pub fn gamma_membership(a: &Symbol, w0: &Weight, s: f64, mode: GammaMode, opts: &GammaOptions) -> Result<GammaReport> {
    check_inputs(a, w0, s)?;
    match mode {
        GammaMode::Derivative => derivative_mode(a, w0, s, opts),
        GammaMode::Stft => stft_mode(a, w0, s, opts),
    }
}

fn phase_box(a: &Symbol, n: usize, half_width: f64) -> Result<UniformGrid> {
    match a.samples() {
        Some(f) => Ok(f.grid().clone()),
        None => UniformGrid::nodal(2 * a.dim(), n, half_width),
    }
}

fn derivative_mode(a: &Symbol, w0: &Weight, s: f64, opts: &GammaOptions) -> Result<GammaReport> {
    let grid = phase_box(a, opts.n.unwrap_or(64), opts.half_width.unwrap_or(8.0))?;
    let gopts = GevreyOptions { s, max_order: opts.max_order, h_limit: None };
    let poly = match a.closed_form() {
        Some(ClosedForm::Constant { c }) => {
            let mut p = Poly::new();
            p.insert((vec![0; a.dim()], vec![0; a.dim()]), *c);
            Some(p)
        }
        Some(ClosedForm::Polynomial { terms }) => Some(poly_of(terms)),
        _ => None,
    };
    let fit = match poly {
        Some(poly) => {
            let src = PolyDerivatives { grid: grid.clone(), poly, d: a.dim() };
            gevrey_derivative_check(&src, w0, &gopts)?
        }
        None => {
            if !a.decays() {
                return Err(Error::NonDecayingSymbol(
                    "spectral derivatives need a symbol that decays on the box".into(),
                ));
            }
            let field = a.sample_on(&grid)?;
            if field.boundary_max() > super::SYMBOL_DECAY_TOL * field.max_abs() {
                return Err(Error::NonDecayingSymbol(format!(
                    "symbol is {:e} of its maximum on the box boundary; enlarge the box",
                    field.boundary_max() / field.max_abs()
                )));
            }
            let diff = SpectralDifferentiator::new(&field)?;
            gevrey_derivative_check(&Sampled { field, diff }, w0, &gopts)?
        }
    };

    let resolved: Vec<(usize, f64)> = fit
        .orders
        .iter()
        .filter_map(|o| o.log_envelope.map(|e| (o.order, e)))
        .collect();
    let h0 = if fit.any_h || fit.h == 0.0 { 1.0 } else { fit.h };
    let sweep: Vec<SweepPoint> = (0..opts.sweep)
        .map(|j| {
            let h = h0 * 0.5f64.powi(j as i32);
            let (k, log_c) = resolved
                .iter()
                .map(|&(k, e)| (k, e - k as f64 * h.ln()))
                .fold((0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
            SweepPoint { param: h, log_constant: log_c, interior: fit.any_h || k < opts.max_order }
        })
        .collect();
    let beurling_trend = fit.passed && sweep.iter().all(|p| p.interior);
    Ok(GammaReport {
        mode: GammaMode::Derivative,
        s,
        verdict: if fit.passed { Verdict::RoumieuConsistent } else { Verdict::Inconsistent },
        beurling_trend,
        derivative_fit: Some(fit),
        stft_fit: None,
        sweep,
        grid,
    })
}

fn stft_mode(a: &Symbol, w0: &Weight, s: f64, opts: &GammaOptions) -> Result<GammaReport> {
    let d = a.dim();
    let n = opts.n.unwrap_or(32);
    let entries = (n as f64).powi(4 * d as i32);
    if entries > MAX_STFT_ENTRIES as f64 {
        return Err(Error::MemoryGuard { entries: entries.min(usize::MAX as f64) as usize, limit: MAX_STFT_ENTRIES });
    }
    if d != 1 {
        return Err(Error::Unsupported("stft mode handles symbols on R^2 only".into()));
    }
    if n > MAX_STFT_N {
        return Err(Error::InvalidGrid(format!("stft mode needs N <= {MAX_STFT_N} per axis, got {n}")));
    }
    let grid = phase_box(a, n, opts.half_width.unwrap_or(8.0))?;
    if grid.counts().iter().any(|&c| c > MAX_STFT_N) {
        return Err(Error::InvalidGrid(format!("stft mode needs N <= {MAX_STFT_N} per axis")));
    }
    let field = a.sample_on(&grid)?;
    let spec = stft(&field, &Window::gaussian(2), &StftOptions::default())?;
    let report = stft_decay_fit(&spec, w0, s)?;
    let fit = report.fit;
    let passed = fit.c.is_finite() && fit.r.is_finite() && fit.r > 0.0 && fit.r < f64::MAX;

    // Inner half of the dual-frequency box, per axis.
    let freqs = spec.frequency_grid()?;
    let inner: Vec<f64> = (0..2).map(|k| 0.5 * freqs.axis_coords(k).iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    let pgrid = spec.field.grid();
    let xi_pow: Vec<f64> = (0..pgrid.len())
        .map(|i| {
            let z = pgrid.point_of_flat(i);
            z[2..].iter().map(|v| v * v).sum::<f64>().sqrt().powf(1.0 / s)
        })
        .collect();
    let r0 = if passed { fit.r } else { 1.0 };
    let log_c0 = fit.c.ln();
    let sweep: Vec<SweepPoint> = (0..opts.sweep)
        .map(|j| {
            let r = r0 * 2f64.powi(j as i32);
            let (arg, best) = report
                .residual
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.re + (r - fit.r.min(1e300)) * xi_pow[i]))
                .fold((0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
            let z = pgrid.point_of_flat(arg);
            let interior = z[2..].iter().zip(&inner).all(|(v, lim)| v.abs() <= *lim);
            SweepPoint { param: r, log_constant: log_c0 + best.max(0.0), interior }
        })
        .collect();
    let beurling_trend = passed && sweep.iter().all(|p| p.interior);
    Ok(GammaReport {
        mode: GammaMode::Stft,
        s,
        verdict: if passed { Verdict::RoumieuConsistent } else { Verdict::Inconsistent },
        beurling_trend,
        derivative_fit: None,
        stft_fit: Some(fit),
        sweep,
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceEntry {
    pub quantization: QuantizationSpec,
    pub report: GammaReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub entries: Vec<InvarianceEntry>,
    /// Verdicts and Beurling trends coincide across all quantizations.
    pub verdicts_agree: bool,
}

/// Runs [`gamma_membership`] on `a` written in each listed quantization
/// (`a` itself is given in `base`).
pub fn quantization_invariance_check(
    a: &Symbol,
    base: &QuantizationSpec,
    w0: &Weight,
    s: f64,
    quantizations: &[QuantizationSpec],
    mode: GammaMode,
    opts: &GammaOptions,
) -> Result<InvarianceReport> {
    let entries = quantizations
        .iter()
        .map(|q| {
            let b = change_quantization(a, base, q)?;
            Ok(InvarianceEntry { quantization: q.clone(), report: gamma_membership(&b, w0, s, mode, opts)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdicts_agree = entries
        .windows(2)
        .all(|p| p[0].report.verdict == p[1].report.verdict && p[0].report.beurling_trend == p[1].report.beurling_trend);
    Ok(InvarianceReport { entries, verdicts_agree })
}
