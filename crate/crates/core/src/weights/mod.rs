//! Positive weight functions and finite-box diagnostics of their classes.
//!
//! Every class statement made here (moderateness, membership in the
//! sub-exponential families, compatibility of operator weights) is a scan
//! over a finite box and never a claim about all of R^d. Reports carry the
//! box and grid they were computed on.

mod gevrey;
mod mollify;
mod scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::io::FieldJson;
use crate::lattice::SampledField;

pub use gevrey::{
    gevrey_derivative_check, gevrey_field_check, DerivativeSource, GevreyFit, GevreyOptions,
    OrderReport,
};
pub use mollify::{mollify, MollifiedDerivatives, Mollified, MollifyOptions, MollifyReport};
pub use scan::{
    classify_pes, exponential_bounds, moderation_constant, weight_compatibility, Classification,
    ClassifyReport, ExponentialBoundsReport, ModerationReport, ScanBox, ScanReport,
};

/// A positive weight on R^d.
///
/// Closed forms accept points of any dimension; `TensorSplit` splits its
/// argument in half and `Tabulated` is fixed to the dimension of its table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    /// `(1 + |x|^2)^(t/2)`.
    Polynomial { t: f64 },
    /// `exp(r |x|^(1/s))`. The classes of interest have `s >= 1`; smaller
    /// `s` is accepted so that Gaussian weights (`s = 1/2`) can be written.
    ExpPower { r: f64, s: f64 },
    Product { factors: Vec<Weight> },
    /// `w_x(x) w_xi(xi)` for `(x, xi)` in R^d x R^d.
    TensorSplit { x: Box<Weight>, xi: Box<Weight> },
    /// `1 / w(x)`.
    Inverse { of: Box<Weight> },
    /// `w(x_{c_1}, ..., x_{c_m})` for the listed coordinates.
    Project { coords: Vec<usize>, of: Box<Weight> },
    Tabulated { table: TabulatedWeight },
}

impl Weight {
    pub fn one() -> Self {
        Weight::Polynomial { t: 0.0 }
    }

    /// Checks parameters and that the weight can be evaluated in dimension `d`.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::InvalidDimension("weights need d >= 1".into()));
        }
        match self {
            Weight::Polynomial { t } => {
                if !t.is_finite() {
                    return Err(Error::InvalidWeight("polynomial order must be finite".into()));
                }
            }
            Weight::ExpPower { r, s } => {
                if !r.is_finite() || !(s.is_finite() && *s > 0.0) {
                    return Err(Error::InvalidWeight(format!(
                        "exp_power needs finite r and s > 0, got r = {r}, s = {s}"
                    )));
                }
            }
            Weight::Product { factors } => {
                for w in factors {
                    w.check_dim(d)?;
                }
            }
            Weight::TensorSplit { x, xi } => {
                if d % 2 != 0 {
                    return Err(Error::InvalidDimension(format!(
                        "tensor_split needs an even dimension, got {d}"
                    )));
                }
                x.check_dim(d / 2)?;
                xi.check_dim(d / 2)?;
            }
            Weight::Inverse { of } => of.check_dim(d)?,
            Weight::Project { coords, of } => {
                if coords.is_empty() || coords.iter().any(|&c| c >= d) {
                    return Err(Error::InvalidDimension(format!(
                        "projection coordinates {coords:?} invalid in dimension {d}"
                    )));
                }
                of.check_dim(coords.len())?;
            }
            Weight::Tabulated { table } => {
                if table.dim() != d {
                    return Err(Error::InvalidDimension(format!(
                        "table has dimension {}, evaluated in {d}",
                        table.dim()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `log w(x)`; finite wherever the weight is.
    pub fn log_eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Polynomial { t } => {
                if *t == 0.0 {
                    0.0
                } else {
                    0.5 * t * norm_sqr(x).ln_1p()
                }
            }
            Weight::ExpPower { r, s } => {
                if *r == 0.0 {
                    0.0
                } else {
                    r * norm_sqr(x).sqrt().powf(1.0 / s)
                }
            }
            Weight::Product { factors } => factors.iter().map(|w| w.log_eval(x)).sum(),
            Weight::TensorSplit { x: wx, xi } => {
                let (a, b) = x.split_at(x.len() / 2);
                wx.log_eval(a) + xi.log_eval(b)
            }
            Weight::Inverse { of } => -of.log_eval(x),
            Weight::Project { coords, of } => {
                let y: Vec<f64> = coords.iter().map(|&c| x[c]).collect();
                of.log_eval(&y)
            }
            Weight::Tabulated { table } => table.interpolate(x).ln(),
        }
    }

    /// `w(x)`. Products are evaluated as products of their factors.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Polynomial { t } => {
                if *t == 0.0 {
                    1.0
                } else {
                    (1.0 + norm_sqr(x)).powf(0.5 * t)
                }
            }
            Weight::Product { factors } => factors.iter().map(|w| w.evaluate(x)).product(),
            Weight::TensorSplit { x: wx, xi } => {
                let (a, b) = x.split_at(x.len() / 2);
                wx.evaluate(a) * xi.evaluate(b)
            }
            Weight::Inverse { of } => of.evaluate(x).recip(),
            Weight::Project { coords, of } => {
                let y: Vec<f64> = coords.iter().map(|&c| x[c]).collect();
                of.evaluate(&y)
            }
            Weight::Tabulated { table } => table.interpolate(x),
            Weight::ExpPower { .. } => self.log_eval(x).exp(),
        }
    }

    /// Samples the weight on the grid of `like`.
    pub fn sample_on(&self, grid: &crate::lattice::UniformGrid) -> Result<SampledField> {
        self.check_dim(grid.dim())?;
        SampledField::from_real_fn(grid.clone(), |p| self.evaluate(p))
    }
}

fn norm_sqr(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Strictly positive real samples, interpolated multilinearly and clamped
/// to the boundary cell outside the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldJson", into = "FieldJson")]
pub struct TabulatedWeight {
    field: SampledField,
}

impl TabulatedWeight {
    pub fn new(field: SampledField) -> Result<Self> {
        for v in field.values() {
            if !(v.re > 0.0) || v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
                return Err(Error::InvalidWeight(format!(
                    "tabulated weight must be positive and real, found {v}"
                )));
            }
        }
        Ok(Self { field })
    }

    pub fn field(&self) -> &SampledField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.field.grid().dim()
    }

    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let grid = self.field.grid();
        let counts = grid.counts();
        let frac = grid.fractional_index(x);
        let d = frac.len();
        let mut base = vec![0usize; d];
        let mut t = vec![0.0; d];
        for k in 0..d {
            let top = (counts[k] - 1) as f64;
            let f = frac[k].clamp(0.0, top);
            let j = (f.floor() as usize).min(counts[k].saturating_sub(2));
            base[k] = j;
            t[k] = if counts[k] == 1 { 0.0 } else { f - j as f64 };
        }
        let mut acc = 0.0;
        let mut idx = vec![0usize; d];
        for corner in 0..(1usize << d) {
            let mut wgt = 1.0;
            for k in 0..d {
                let up = (corner >> k) & 1 == 1;
                if up && counts[k] == 1 {
                    wgt = 0.0;
                    break;
                }
                idx[k] = base[k] + up as usize;
                wgt *= if up { t[k] } else { 1.0 - t[k] };
            }
            if wgt != 0.0 {
                acc += wgt * self.field.get(&idx).re;
            }
        }
        acc
    }
}

impl TryFrom<FieldJson> for TabulatedWeight {
    type Error = Error;

    fn try_from(j: FieldJson) -> Result<Self> {
        Self::new(SampledField::try_from(j)?)
    }
}

impl From<TabulatedWeight> for FieldJson {
    fn from(t: TabulatedWeight) -> Self {
        FieldJson::from(&t.field)
    }
}

/// `log n!` summed over a multi-index.
pub(crate) fn log_factorial(alpha: &[usize]) -> f64 {
    alpha
        .iter()
        .map(|&a| (2..=a).map(|k| (k as f64).ln()).sum::<f64>())
        .sum()
}
