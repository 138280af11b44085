use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::io::{FieldFile, MetadataBlock};
use crate::lattice::{SampledField, UniformGrid};
use crate::weights::Weight;

/// Tag of the metadata block written with symbols.
pub const SYMB_TAG: &[u8; 4] = b"SYMB";

/// Sampled symbols count as decayed when the boundary maximum is below this
/// fraction of the global maximum.
pub const SYMBOL_DECAY_TOL: f64 = 1e-10;

fn one_c() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `coeff * x^x * xi^xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: Complex64,
    pub x: Vec<u32>,
    pub xi: Vec<u32>,
}

/// One-variable factors of separable symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `1`.
    One,
    /// `e^{i <k, y>}`.
    Plane { k: Vec<f64> },
    /// `e^{-|y - center|^2 / (2 width^2)}`.
    Gaussian { center: Vec<f64>, width: f64 },
    /// `(1 + |y|^2)^{t/2}`.
    Japanese { t: f64 },
    /// `e^{r |y|^2 / (1 + |y|^2)^{1/2}}`, a smooth version of `e^{r|y|}`.
    SmoothGrowth { r: f64 },
}

impl Profile {
    fn check(&self, d: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidField(m.to_string()));
        match self {
            Profile::Plane { k } if k.len() != d => bad("plane wave vector has the wrong length"),
            Profile::Gaussian { center, .. } if center.len() != d => bad("profile center has the wrong length"),
            Profile::Gaussian { width, .. } if !(*width > 0.0 && width.is_finite()) => bad("profile width must be positive"),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, y: &[f64]) -> Complex64 {
        let r2 = || y.iter().map(|v| v * v).sum::<f64>();
        match self {
            Profile::One => one_c(),
            Profile::Plane { k } => Complex64::from_polar(1.0, k.iter().zip(y).map(|(a, b)| a * b).sum()),
            Profile::Gaussian { center, width } => {
                let q: f64 = y.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                Complex64::new((-0.5 * q / (width * width)).exp(), 0.0)
            }
            Profile::Japanese { t } => Complex64::new((1.0 + r2()).powf(0.5 * t), 0.0),
            Profile::SmoothGrowth { r } => {
                let q = r2();
                Complex64::new((r * q / (1.0 + q).sqrt()).exp(), 0.0)
            }
        }
    }

    fn conj(&self) -> Self {
        match self {
            Profile::Plane { k } => Profile::Plane { k: k.iter().map(|v| -v).collect() },
            other => other.clone(),
        }
    }

    fn decays(&self) -> bool {
        matches!(self, Profile::Gaussian { .. })
    }
}

/// Closed-form symbols on `R^{2d}`, evaluated exactly at any point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosedForm {
    Constant { c: Complex64 },
    /// Polynomial in `(x, xi)`.
    Polynomial { terms: Vec<Monomial> },
    /// `c u(x) w(xi)`.
    Separable {
        x: Profile,
        xi: Profile,
        #[serde(default = "one_c")]
        c: Complex64,
    },
    /// `exp(-sum_k (z_k - center_k)^2 / (2 widths_k^2))`.
    GaussianEnvelope { center: Vec<f64>, widths: Vec<f64> },
    /// `amplitude exp(-(z - center)^T covariance^{-1} (z - center) / 2)` with a
    /// complex symmetric covariance; closed under quantization changes.
    Gaussian {
        center: Vec<f64>,
        covariance: Vec<Vec<Complex64>>,
        amplitude: Complex64,
    },
}

/// Gevrey envelope attached to a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    /// Weight on `R^{2d}`.
    pub weight: Weight,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Repr {
    Closed {
        form: ClosedForm,
        /// Inverse covariance, for the Gaussian forms.
        precision: Option<DMatrix<Complex64>>,
    },
    Sampled {
        field: SampledField,
        non_decaying: bool,
    },
}

/// A symbol `a(x, xi)` on `R^{2d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub(crate) repr: Repr,
    pub(crate) dim: usize,
    pub envelope: Option<Envelope>,
}

pub(crate) type Poly = BTreeMap<(Vec<u32>, Vec<u32>), Complex64>;

pub(crate) fn poly_of(terms: &[Monomial]) -> Poly {
    let mut p = Poly::new();
    for t in terms {
        *p.entry((t.x.clone(), t.xi.clone())).or_default() += t.coeff;
    }
    p.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    p
}

pub(crate) fn terms_of(p: &Poly) -> Vec<Monomial> {
    p.iter()
        .map(|((x, xi), c)| Monomial { coeff: *c, x: x.clone(), xi: xi.clone() })
        .collect()
}

fn gaussian_covariance(form: &ClosedForm) -> Option<(Vec<f64>, DMatrix<Complex64>, Complex64)> {
    match form {
        ClosedForm::GaussianEnvelope { center, widths } => {
            let n = widths.len();
            let cov = DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(widths[i] * widths[i], 0.0) } else { Complex64::new(0.0, 0.0) });
            Some((center.clone(), cov, one_c()))
        }
        ClosedForm::Gaussian { center, covariance, amplitude } => {
            let n = covariance.len();
            Some((center.clone(), DMatrix::from_fn(n, n, |i, j| covariance[i][j]), *amplitude))
        }
        _ => None,
    }
}

impl Symbol {
    /// Closed-form symbol on `R^{2d}`.
    pub fn closed(form: ClosedForm, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("symbols need d >= 1".into()));
        }
        let bad = |m: String| Err(Error::InvalidField(m));
        match &form {
            ClosedForm::Constant { .. } => {}
            ClosedForm::Polynomial { terms } => {
                if let Some(t) = terms.iter().find(|t| t.x.len() != dim || t.xi.len() != dim) {
                    return bad(format!("monomial {t:?} does not have {dim} + {dim} exponents"));
                }
            }
            ClosedForm::Separable { x, xi, .. } => {
                x.check(dim)?;
                xi.check(dim)?;
            }
            ClosedForm::GaussianEnvelope { center, widths } => {
                if center.len() != 2 * dim || widths.len() != 2 * dim {
                    return bad(format!("Gaussian envelope needs {} centers and widths", 2 * dim));
                }
                if widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                    return bad("Gaussian widths must be positive".into());
                }
            }
            ClosedForm::Gaussian { center, covariance, .. } => {
                if center.len() != 2 * dim || covariance.len() != 2 * dim || covariance.iter().any(|r| r.len() != 2 * dim) {
                    return bad(format!("Gaussian needs a {0} center and a {0}x{0} covariance", 2 * dim));
                }
            }
        }
        let precision = match gaussian_covariance(&form) {
            Some((_, cov, _)) => Some(
                cov.try_inverse()
                    .ok_or_else(|| Error::InvalidField("Gaussian covariance is singular".into()))?,
            ),
            None => None,
        };
        Ok(Self { repr: Repr::Closed { form, precision }, dim, envelope: None })
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::closed(ClosedForm::Constant { c }, dim).expect("constants are valid")
    }

    pub fn polynomial(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        Self::closed(ClosedForm::Polynomial { terms }, dim)
    }

    pub fn gaussian_envelope(center: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        let d = center.len() / 2;
        Self::closed(ClosedForm::GaussianEnvelope { center, widths }, d)
    }

    /// Samples on a phase-space grid of dimension `2d`, axes ordered `(x, xi)`.
    pub fn sampled(field: SampledField, non_decaying: bool) -> Result<Self> {
        let n = field.grid().dim();
        if n % 2 != 0 {
            return Err(Error::InvalidDimension(format!("phase-space grids have even dimension, got {n}")));
        }
        if !field.grid().is_axis_aligned() {
            return Err(Error::UnsupportedBasis("symbol grids must be axis-aligned".into()));
        }
        Ok(Self { repr: Repr::Sampled { field, non_decaying }, dim: n / 2, envelope: None })
    }

    pub fn with_envelope(mut self, weight: Weight, s: f64) -> Result<Self> {
        weight.check_dim(2 * self.dim)?;
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidExponent(s));
        }
        self.envelope = Some(Envelope { weight, s });
        Ok(self)
    }

    /// Signal dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        match &self.repr {
            Repr::Closed { form, .. } => Some(form),
            Repr::Sampled { .. } => None,
        }
    }

    pub fn samples(&self) -> Option<&SampledField> {
        match &self.repr {
            Repr::Sampled { field, .. } => Some(field),
            Repr::Closed { .. } => None,
        }
    }

    /// Whether the symbol decays at infinity (closed forms) or at the box
    /// boundary (samples, unless flagged non-decaying).
    pub fn decays(&self) -> bool {
        match &self.repr {
            Repr::Closed { form, .. } => match form {
                ClosedForm::Constant { c } => c.norm() == 0.0,
                ClosedForm::Polynomial { terms } => poly_of(terms).is_empty(),
                ClosedForm::Separable { x, xi, c } => c.norm() == 0.0 || (x.decays() && xi.decays()),
                ClosedForm::GaussianEnvelope { .. } | ClosedForm::Gaussian { .. } => true,
            },
            Repr::Sampled { field, non_decaying } => {
                !non_decaying && field.boundary_max() <= SYMBOL_DECAY_TOL * field.max_abs()
            }
        }
    }

    /// Exact value at `z = (x, xi)`; `None` for sampled symbols off their grid.
    pub fn evaluate(&self, z: &[f64]) -> Option<Complex64> {
        match &self.repr {
            Repr::Closed { form, precision } => Some(eval_closed(form, precision.as_ref(), self.dim, z)),
            Repr::Sampled { field, .. } => field.grid().index_of_point(z).map(|i| field.get(&i)),
        }
    }

    /// Values on a phase-space grid; sampled symbols must live on that grid.
    pub fn sample_on(&self, grid: &UniformGrid) -> Result<SampledField> {
        if grid.dim() != 2 * self.dim {
            return Err(Error::Alignment(format!(
                "symbol on R^{} sampled on a grid of dimension {}",
                2 * self.dim,
                grid.dim()
            )));
        }
        match &self.repr {
            Repr::Closed { form, precision } => {
                let values = (0..grid.len())
                    .into_par_iter()
                    .map(|i| eval_closed(form, precision.as_ref(), self.dim, &grid.point_of_flat(i)))
                    .collect();
                SampledField::new(grid.clone(), values)
            }
            Repr::Sampled { field, .. } => {
                if field.grid().approx_eq(grid) {
                    Ok(field.clone())
                } else {
                    Err(Error::Alignment("sampled symbol lives on a different grid".into()))
                }
            }
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Result<Self> {
        let repr = match &self.repr {
            Repr::Sampled { field, non_decaying } => Repr::Sampled { field: field.conj(), non_decaying: *non_decaying },
            Repr::Closed { form, .. } => {
                let form = match form {
                    ClosedForm::Constant { c } => ClosedForm::Constant { c: c.conj() },
                    ClosedForm::Polynomial { terms } => ClosedForm::Polynomial {
                        terms: terms.iter().map(|t| Monomial { coeff: t.coeff.conj(), ..t.clone() }).collect(),
                    },
                    ClosedForm::Separable { x, xi, c } => ClosedForm::Separable { x: x.conj(), xi: xi.conj(), c: c.conj() },
                    ClosedForm::GaussianEnvelope { .. } => form.clone(),
                    ClosedForm::Gaussian { center, covariance, amplitude } => ClosedForm::Gaussian {
                        center: center.clone(),
                        covariance: covariance.iter().map(|r| r.iter().map(|c| c.conj()).collect()).collect(),
                        amplitude: amplitude.conj(),
                    },
                };
                return Ok(Self { envelope: self.envelope.clone(), ..Symbol::closed(form, self.dim)? });
            }
        };
        Ok(Self { repr, dim: self.dim, envelope: self.envelope.clone() })
    }

    /// Lattice-core file: samples on `grid` plus a "SYMB" block.
    pub fn to_file(&self, grid: &UniformGrid) -> Result<FieldFile> {
        let field = self.sample_on(grid)?;
        let meta = SymbolMeta {
            descriptor: self.closed_form().cloned(),
            dim: self.dim,
            envelope: self.envelope.clone(),
            non_decaying: match &self.repr {
                Repr::Sampled { non_decaying, .. } => *non_decaying,
                Repr::Closed { .. } => !self.decays(),
            },
        };
        let mut file = FieldFile::new(field);
        file.blocks.push(MetadataBlock::json(SYMB_TAG, &meta)?);
        Ok(file)
    }

    pub fn from_file(file: &FieldFile) -> Result<Self> {
        let meta: SymbolMeta = match file.block(SYMB_TAG) {
            Some(b) => b.parse()?,
            None => {
                let d = file.field.grid().dim() / 2;
                SymbolMeta { descriptor: None, dim: d, envelope: None, non_decaying: false }
            }
        };
        let sym = match meta.descriptor {
            Some(form) => Symbol::closed(form, meta.dim)?,
            None => Symbol::sampled(file.field.clone(), meta.non_decaying)?,
        };
        Ok(Self { envelope: meta.envelope, ..sym })
    }
}

/// Contents of the "SYMB" block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolMeta {
    pub descriptor: Option<ClosedForm>,
    pub dim: usize,
    pub envelope: Option<Envelope>,
    pub non_decaying: bool,
}

pub(crate) fn eval_poly_terms(terms: &[Monomial], x: &[f64], xi: &[f64]) -> Complex64 {
    terms
        .iter()
        .map(|t| {
            let m: f64 = t
                .x
                .iter()
                .zip(x)
                .chain(t.xi.iter().zip(xi))
                .map(|(&e, &v)| v.powi(e as i32))
                .product();
            t.coeff * m
        })
        .sum()
}

fn eval_closed(form: &ClosedForm, precision: Option<&DMatrix<Complex64>>, d: usize, z: &[f64]) -> Complex64 {
    let (x, xi) = z.split_at(d);
    match form {
        ClosedForm::Constant { c } => *c,
        ClosedForm::Polynomial { terms } => eval_poly_terms(terms, x, xi),
        ClosedForm::Separable { x: u, xi: w, c } => c * u.evaluate(x) * w.evaluate(xi),
        ClosedForm::GaussianEnvelope { center, widths } => {
            let q: f64 = z
                .iter()
                .zip(center)
                .zip(widths)
                .map(|((v, c), w)| ((v - c) / w).powi(2))
                .sum();
            Complex64::new((-0.5 * q).exp(), 0.0)
        }
        ClosedForm::Gaussian { center, amplitude, .. } => {
            let p = precision.expect("Gaussian symbols carry their precision");
            let w: Vec<f64> = z.iter().zip(center).map(|(v, c)| v - c).collect();
            let n = w.len();
            let mut q = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let mut row = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    row += p[(i, j)] * w[j];
                }
                q += row * w[i];
            }
            amplitude * (-0.5 * q).exp()
        }
    }
}

pub(crate) fn covariance_of(form: &ClosedForm) -> Option<(Vec<f64>, DMatrix<Complex64>, Complex64)> {
    gaussian_covariance(form)
}
